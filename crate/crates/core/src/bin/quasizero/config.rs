use std::path::Path;

use serde::{Deserialize, Serialize};

use quasizero::criterion::{dyadic_radii, GrowthThresholds, MIN_RADII};
use quasizero::factorizer::FactorConfig;
use quasizero::quasimeasure::TestFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest |Im| accepted for a real zero.
    pub reality: f64,
    pub reconstruction: f64,
    /// Newton / quadrature refinement target for zero locations.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { reality: 1e-7, reconstruction: 1e-6, quadrature: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    pub gamma_max: f64,
    /// Real window `[x0, x1]` scanned for zeros.
    pub window: [f64; 2],
    /// Growth radii; dyadic up to `gamma_max` when absent.
    pub radii: Option<Vec<f64>>,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { gamma_max: 16.0, window: [-40.3, 40.7], radii: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonConfig {
    pub battery: Vec<TestFunction>,
    /// Translations `t` at which each test function is checked.
    pub shifts: Vec<f64>,
    /// Zeros are collected over `[-window, window]`.
    pub window: f64,
    pub gamma_max: f64,
}

impl Default for PoissonConfig {
    fn default() -> Self {
        Self {
            battery: [1.0, 2.0, 4.0].map(TestFunction::gaussian).to_vec(),
            shifts: vec![0.0],
            window: 25.25,
            gamma_max: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// CSV destination when `--out` is not given.
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub truncation: Truncation,
    pub thresholds: GrowthThresholds,
    pub poisson: PoissonConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn radii(&self) -> Vec<f64> {
        self.truncation.radii.clone().unwrap_or_else(|| dyadic_radii(self.truncation.gamma_max))
    }

    pub fn validate(&self) -> Result<(), String> {
        let t = &self.tolerances;
        for (name, v) in [("reality", t.reality), ("reconstruction", t.reconstruction), ("quadrature", t.quadrature)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        let tr = &self.truncation;
        if !(tr.gamma_max > 0.0 && tr.gamma_max.is_finite()) {
            return Err(format!("gamma_max must be positive, got {}", tr.gamma_max));
        }
        let [x0, x1] = tr.window;
        if !(x0 < x1 && x0.is_finite() && x1.is_finite()) {
            return Err(format!("window [{x0}, {x1}] is empty"));
        }
        let radii = self.radii();
        if radii.len() < MIN_RADII {
            return Err(format!("need at least {MIN_RADII} radii, got {}", radii.len()));
        }
        if radii[0] < 1.0 || !radii.windows(2).all(|w| w[0] < w[1]) || !radii.iter().all(|r| r.is_finite()) {
            return Err("radii must be finite, increasing and >= 1".into());
        }
        if radii[radii.len() - 1] > tr.gamma_max {
            return Err(format!("largest radius exceeds gamma_max {}", tr.gamma_max));
        }
        let th = &self.thresholds;
        if !(th.linear_slope > 0.0 && th.linear_slope <= th.superlinear_slope && th.ratio_spread >= 1.0) {
            return Err(format!("inconsistent growth thresholds {th:?}"));
        }
        let p = &self.poisson;
        for tf in &p.battery {
            tf.validate().map_err(|e| e.to_string())?;
        }
        if !p.shifts.iter().all(|t| t.is_finite()) {
            return Err("poisson shifts must be finite".into());
        }
        if !(p.window > 0.0 && p.window.is_finite()) || !(p.gamma_max > 0.0 && p.gamma_max.is_finite()) {
            return Err("poisson window and gamma_max must be positive".into());
        }
        Ok(())
    }

    pub fn factor_config(&self) -> FactorConfig {
        FactorConfig {
            gamma_max: self.truncation.gamma_max,
            radii: self.radii(),
            window: (self.truncation.window[0], self.truncation.window[1]),
            reality_tol: self.tolerances.reality,
            reconstruction_tol: self.tolerances.reconstruction,
            newton_tol: self.tolerances.quadrature,
            thresholds: self.thresholds,
        }
    }
}
