//! Growth of the cumulative coefficient mass `R(r) = sum_{|gamma| < r} |h+| + |h-|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logderiv::{DirichletCoefficients, HalfPlane};

pub const MIN_RADII: usize = 4;

/// Slope thresholds of the log-log fit and the spread allowed for `R(r)/r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthThresholds {
    pub linear_slope: f64,
    pub superlinear_slope: f64,
    pub ratio_spread: f64,
}

impl Default for GrowthThresholds {
    fn default() -> Self {
        Self { linear_slope: 1.1, superlinear_slope: 1.5, ratio_spread: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Classification {
    Linear { k: f64 },
    Superlinear,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub classification: Classification,
    pub fit_exponent: f64,
}

impl GrowthReport {
    pub fn is_linear(&self) -> bool {
        matches!(self.classification, Classification::Linear { .. })
    }
}

/// Dyadic radii `2, 4, ...` up to `gamma_max`.
pub fn dyadic_radii(gamma_max: f64) -> Vec<f64> {
    let mut r = 2.0;
    let mut out = Vec::new();
    while r <= gamma_max * (1.0 + 1e-12) {
        out.push(r);
        r *= 2.0;
    }
    out
}

pub fn growth_profile(
    upper: &DirichletCoefficients,
    lower: &DirichletCoefficients,
    radii: &[f64],
) -> Result<GrowthReport> {
    growth_profile_with(upper, lower, radii, &GrowthThresholds::default())
}

pub fn growth_profile_with(
    upper: &DirichletCoefficients,
    lower: &DirichletCoefficients,
    radii: &[f64],
    thresholds: &GrowthThresholds,
) -> Result<GrowthReport> {
    if upper.halfplane != HalfPlane::Upper || lower.halfplane != HalfPlane::Lower {
        return Err(Error::InvalidArgument("growth_profile needs (upper, lower) coefficients".into()));
    }
    if radii.len() < MIN_RADII {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_RADII} radii for the growth fit, got {}",
            radii.len()
        )));
    }
    if radii[0] < 1.0 || !radii.windows(2).all(|w| w[0] < w[1]) || !radii.iter().all(|r| r.is_finite()) {
        return Err(Error::InvalidArgument("radii must be finite, increasing and >= 1".into()));
    }
    let truncation = upper.gamma_max.min(lower.gamma_max);
    let r_max = radii[radii.len() - 1];
    if r_max > truncation * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "largest radius {r_max} exceeds coefficient truncation {truncation}"
        )));
    }

    let values: Vec<f64> = radii.iter().map(|&r| upper.abs_sum_within(r) + lower.abs_sum_within(r)).collect();
    let half = radii.len() / 2;
    let fit_exponent = log_log_slope(&radii[half..], &values[half..]);

    let classification = if values.iter().all(|&v| v == 0.0) {
        Classification::Linear { k: 0.0 }
    } else if fit_exponent >= thresholds.superlinear_slope {
        Classification::Superlinear
    } else {
        let ratios: Vec<f64> = radii.iter().zip(&values).map(|(r, v)| v / r).collect();
        let upper_ratios = &ratios[half..];
        let max_upper = upper_ratios.iter().copied().fold(0.0, f64::max);
        let spread_ok = max_upper <= thresholds.ratio_spread * median(upper_ratios);
        if fit_exponent <= thresholds.linear_slope && spread_ok {
            Classification::Linear { k: ratios.iter().copied().fold(0.0, f64::max) }
        } else {
            Classification::Inconclusive
        }
    };
    Ok(GrowthReport { radii: radii.to_vec(), values, classification, fit_exponent })
}

fn log_log_slope(r: &[f64], v: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = r.iter().zip(v).filter(|(_, &v)| v > 0.0).map(|(r, v)| (r.ln(), v.ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
