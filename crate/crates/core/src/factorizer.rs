//! Decomposition of a real zero set into arithmetic progressions and
//! reconstruction of `C e^{iaz} prod sin(alpha z + beta)^mult`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::criterion::{dyadic_radii, growth_profile_with, Classification, GrowthThresholds};
use crate::error::{Error, Result};
use crate::logderiv::{logderiv_coeffs_symbolic, HalfPlane};
use crate::measure::{AtomicMeasure, Rect};
use crate::polynomial::{
    expand_sine_product, zero_strip_estimate, ExpPolynomial, SineFactor, SineProduct, MERGE_TOL,
};
use crate::zeros::find_zeros;

pub const REALITY_TOL: f64 = 1e-7;
pub const JITTER_TOL: f64 = 1e-6;
pub const MIN_POINTS: usize = 4;
pub const MIN_ATOMS: usize = 6;
const NEAREST: usize = 8;
const PREFACTOR_SAMPLES: usize = 16;

/// The progression `{d n + c : n in Z}` carrying multiplicity `mult`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    pub d: f64,
    pub c: f64,
    pub mult: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub progressions: Vec<Progression>,
    /// Unmatched points, repeated according to their leftover mass.
    pub residual_points: Vec<f64>,
}

/// Greedy lattice fitting of the real atoms of `zeros` inside `window`.
pub fn detect_progressions(zeros: &AtomicMeasure, window: (f64, f64)) -> Result<Decomposition> {
    let (x_min, x_max) = window;
    if !(x_min < x_max) {
        return Err(Error::InvalidArgument(format!("empty window [{x_min}, {x_max}]")));
    }
    let inside = zeros.restrict_real_window(x_min, x_max);
    let max_imag = inside.max_abs_imag();
    if max_imag > REALITY_TOL {
        return Err(Error::NotReal { max_imag });
    }
    if inside.len() < MIN_ATOMS {
        return Err(Error::Precondition(format!(
            "window holds {} atoms, need at least {MIN_ATOMS}",
            inside.len()
        )));
    }
    let xs: Vec<f64> = inside.atoms().iter().map(|a| a.location.re).collect();
    let mut rem: Vec<u32> = inside.atoms().iter().map(|a| a.mass.re.round().max(0.0) as u32).collect();

    let mut progressions = Vec::new();
    let mut residual_points = Vec::new();
    while let Some(anchor) = rem.iter().position(|&m| m > 0) {
        let xa = xs[anchor];
        let mut neighbours: Vec<usize> = (0..xs.len()).filter(|&j| j != anchor && rem[j] > 0).collect();
        neighbours.sort_by(|&i, &j| (xs[i] - xa).abs().total_cmp(&(xs[j] - xa).abs()));

        let try_steps = |cands: &[usize]| -> Option<(f64, Vec<(i64, usize)>)> {
            let mut best: Option<(f64, Vec<(i64, usize)>)> = None;
            for &j in cands {
                let d = (xs[j] - xa).abs();
                if d < JITTER_TOL {
                    continue;
                }
                let Some(hits) = extend(&xs, &rem, xa, d, x_min, x_max) else { continue };
                if hits.len() < MIN_POINTS {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((bd, bh)) => hits.len() > bh.len() || (hits.len() == bh.len() && d < *bd),
                };
                if better {
                    best = Some((d, hits));
                }
            }
            best
        };
        // the eight nearest neighbours first; sparse progressions hidden
        // among denser ones need the full neighbour list
        let found = try_steps(&neighbours[..neighbours.len().min(NEAREST)])
            .or_else(|| try_steps(&neighbours[neighbours.len().min(NEAREST)..]));

        match found {
            None => {
                residual_points.extend(std::iter::repeat_n(xa, rem[anchor] as usize));
                rem[anchor] = 0;
            }
            Some((_, hits)) => {
                let mult = hits.iter().map(|&(_, i)| rem[i]).min().unwrap_or(1);
                for &(_, i) in &hits {
                    rem[i] -= mult;
                }
                let (d, c) = fit_line(&hits, &xs);
                progressions.push(Progression { d, c: normalize_offset(c, d), mult });
            }
        }
    }
    if progressions.is_empty() {
        return Err(Error::DecompositionFailure { min_points: MIN_POINTS });
    }
    Ok(Decomposition { progressions, residual_points })
}

/// Every predicted point `xa + k d` inside the window must carry remaining
/// mass; returns `(k, index)` pairs or `None` when one is missing. The step
/// is re-estimated from the farthest hit so far, so errors in the initial
/// step do not grow with `k`.
fn extend(xs: &[f64], rem: &[u32], xa: f64, d: f64, x_min: f64, x_max: f64) -> Option<Vec<(i64, usize)>> {
    let mut hits = Vec::new();
    let mut step = d;
    let mut k = 0i64;
    let mut dir = 1i64;
    loop {
        let x = xa + k as f64 * step;
        if x < x_min - JITTER_TOL || x > x_max + JITTER_TOL {
            if dir < 0 {
                break;
            }
            dir = -1;
            k = -1;
            continue;
        }
        let near_edge = x - x_min < JITTER_TOL || x_max - x < JITTER_TOL;
        let inside = x >= x_min && x <= x_max;
        match nearest_index(xs, x) {
            Some(i) if (xs[i] - x).abs() <= JITTER_TOL && rem[i] > 0 => {
                hits.push((k, i));
                if k != 0 {
                    step = (xs[i] - xa) / k as f64;
                }
            }
            _ if near_edge || !inside => {}
            _ => return None,
        }
        k += dir;
    }
    hits.sort_unstable();
    Some(hits)
}

fn nearest_index(xs: &[f64], x: f64) -> Option<usize> {
    let i = xs.partition_point(|&v| v < x);
    [i.checked_sub(1), (i < xs.len()).then_some(i)]
        .into_iter()
        .flatten()
        .min_by(|&a, &b| (xs[a] - x).abs().total_cmp(&(xs[b] - x).abs()))
}

/// Least-squares `x = c + d k` over the matched points.
fn fit_line(hits: &[(i64, usize)], xs: &[f64]) -> (f64, f64) {
    let n = hits.len() as f64;
    let mk = hits.iter().map(|h| h.0 as f64).sum::<f64>() / n;
    let mx = hits.iter().map(|h| xs[h.1]).sum::<f64>() / n;
    let skx: f64 = hits.iter().map(|h| (h.0 as f64 - mk) * (xs[h.1] - mx)).sum();
    let skk: f64 = hits.iter().map(|h| (h.0 as f64 - mk).powi(2)).sum();
    let d = skx / skk;
    (d, mx - d * mk)
}

fn normalize_offset(c: f64, d: f64) -> f64 {
    let c = c.rem_euclid(d);
    if d - c < JITTER_TOL * 1e-3 {
        0.0
    } else {
        c
    }
}

/// `alpha = pi/d`, `beta = -c alpha mod pi`, sorted by `(alpha, beta)`.
pub fn progressions_to_sines(ps: &[Progression]) -> Vec<SineFactor> {
    let mut out: Vec<SineFactor> = ps
        .iter()
        .map(|p| {
            let alpha = PI / p.d;
            let mut beta = (-p.c * alpha).rem_euclid(PI);
            if PI - beta < 1e-12 {
                beta = 0.0;
            }
            SineFactor { alpha, beta, mult: p.mult }
        })
        .collect();
    out.sort_by(|x, y| x.alpha.total_cmp(&y.alpha).then(x.beta.total_cmp(&y.beta)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrefactorFit {
    pub c: Complex64,
    pub a: f64,
    /// Imaginary part of the fitted `a`; zero for a genuine sine product.
    pub a_imag: f64,
    /// Largest deviation of `log D` samples from the linear fit.
    pub residual: f64,
}

/// Fits `p / prod sin^mult = C e^{iaz}` on a horizontal line above the zeros.
pub fn fit_exponential_prefactor(p: &ExpPolynomial, sines: &[SineFactor], tol: f64) -> Result<PrefactorFit> {
    if p.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    if sines.is_empty() {
        if p.len() != 1 {
            return Err(Error::Precondition("no sine factors for a polynomial with zeros".into()));
        }
        let t = p.terms()[0];
        return Ok(PrefactorFit { c: t.coeff, a: TAU * t.omega, a_imag: 0.0, residual: 0.0 });
    }
    let y0 = match zero_strip_estimate(p) {
        Ok(s) => s.beta.max(0.0) + 0.5,
        Err(_) => 1.0,
    };
    let h = 0.25 / (1.0 + p.min_frequency().unwrap_or(0.0).abs() + p.max_frequency().unwrap_or(0.0).abs());

    let sine_value = |z: Complex64| -> (Complex64, f64) {
        let mut prod = Complex64::new(1.0, 0.0);
        let mut smallest = f64::INFINITY;
        for f in sines {
            let s = (z * f.alpha + f.beta).sin();
            smallest = smallest.min(s.norm());
            prod *= s.powu(f.mult);
        }
        (prod, smallest)
    };

    let mut start = 0.0;
    let samples = 'resample: loop {
        let mut out = Vec::with_capacity(PREFACTOR_SAMPLES);
        for k in 0..PREFACTOR_SAMPLES {
            let x = start + k as f64 * h;
            let z = Complex64::new(x, y0);
            let (s, smallest) = sine_value(z);
            if smallest < 1e-6 {
                start += h / PI;
                continue 'resample;
            }
            out.push((x, p.evaluate(z) / s));
        }
        break out;
    };

    // unwrap the phase of log D along the line
    let mut logs: Vec<(f64, Complex64)> = Vec::with_capacity(samples.len());
    let mut prev_arg: Option<f64> = None;
    for (x, d) in samples {
        let mut arg = d.arg();
        if let Some(pa) = prev_arg {
            arg += TAU * ((pa - arg) / TAU).round();
        }
        prev_arg = Some(arg);
        logs.push((x, Complex64::new(d.norm().ln(), arg)));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|l| l.0).sum::<f64>() / n;
    let my: Complex64 = logs.iter().map(|l| l.1).sum::<Complex64>() / n;
    let sxx: f64 = logs.iter().map(|l| (l.0 - mx).powi(2)).sum();
    let sxy: Complex64 = logs.iter().map(|l| (l.1 - my) * (l.0 - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = logs.iter().map(|l| (l.1 - intercept - slope * l.0).norm()).fold(0.0, f64::max);

    // log D(x + i y0) = A + B x + i B y0 with B = i a
    let log_c = intercept - Complex64::i() * slope * y0;
    let a = -Complex64::i() * slope;
    if residual > tol {
        return Err(Error::NotSineProduct(format!("quotient is not exponential (fit residual {residual:.3e})")));
    }
    if a.im.abs() > tol {
        return Err(Error::NotSineProduct(format!("non-real exponent rate (Im a = {:.3e})", a.im)));
    }
    Ok(PrefactorFit { c: log_c.exp(), a: a.re, a_imag: a.im, residual })
}

/// Tunables of the full pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FactorConfig {
    pub gamma_max: f64,
    pub radii: Vec<f64>,
    pub window: (f64, f64),
    pub reality_tol: f64,
    pub reconstruction_tol: f64,
    pub newton_tol: f64,
    pub thresholds: GrowthThresholds,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self {
            gamma_max: 16.0,
            radii: dyadic_radii(16.0),
            window: (-40.3, 40.7),
            reality_tol: REALITY_TOL,
            reconstruction_tol: 1e-6,
            newton_tol: 1e-12,
            thresholds: GrowthThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationResult {
    pub product: SineProduct,
    pub max_zero_imag: f64,
    pub reconstruction_error: f64,
    pub residual_points: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactorOutcome {
    SineProduct(FactorizationResult),
    NotSineProduct {
        stage: &'static str,
        reason: String,
    },
    Inconclusive {
        stage: &'static str,
        reason: String,
        max_zero_imag: Option<f64>,
        reconstruction_error: Option<f64>,
        residual_points: Vec<f64>,
    },
}

impl FactorOutcome {
    pub fn verdict(&self) -> &'static str {
        match self {
            FactorOutcome::SineProduct(_) => "sine_product",
            FactorOutcome::NotSineProduct { .. } => "not_sine_product",
            FactorOutcome::Inconclusive { .. } => "inconclusive",
        }
    }

    /// Flat report: the sine-product fields (when found) plus verdict metadata.
    pub fn to_json(&self) -> Value {
        match self {
            FactorOutcome::SineProduct(r) => json!({
                "verdict": self.verdict(),
                "C": [r.product.c.re, r.product.c.im],
                "a": r.product.a,
                "factors": r.product.factors,
                "reason": Value::Null,
                "max_zero_imag": r.max_zero_imag,
                "reconstruction_error": r.reconstruction_error,
                "residual_points": r.residual_points,
            }),
            FactorOutcome::NotSineProduct { stage, reason } => json!({
                "verdict": self.verdict(),
                "stage": stage,
                "reason": reason,
                "max_zero_imag": Value::Null,
                "reconstruction_error": Value::Null,
                "residual_points": [],
            }),
            FactorOutcome::Inconclusive { stage, reason, max_zero_imag, reconstruction_error, residual_points } => {
                json!({
                    "verdict": self.verdict(),
                    "stage": stage,
                    "reason": reason,
                    "max_zero_imag": max_zero_imag,
                    "reconstruction_error": reconstruction_error,
                    "residual_points": residual_points,
                })
            }
        }
    }
}

/// Largest coefficient discrepancy relative to the largest coefficient of `p`.
pub fn reconstruction_error(p: &ExpPolynomial, q: &ExpPolynomial) -> f64 {
    let scale = p.max_abs_coeff().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for t in p.terms() {
        worst = worst.max((t.coeff - q.coeff_at(t.omega)).norm());
    }
    for t in q.terms() {
        if p.terms().iter().all(|s| (s.omega - t.omega).abs() >= MERGE_TOL) {
            worst = worst.max(t.coeff.norm());
        }
    }
    worst / scale
}

/// Runs criterion, zero finding, progression fitting and re-expansion.
pub fn factor(p: &ExpPolynomial, cfg: &FactorConfig) -> Result<FactorOutcome> {
    if p.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    if p.len() == 1 {
        let fit = fit_exponential_prefactor(p, &[], cfg.reconstruction_tol)?;
        let product = SineProduct::new(fit.c, fit.a, Vec::new())?;
        return Ok(FactorOutcome::SineProduct(FactorizationResult {
            product,
            max_zero_imag: 0.0,
            reconstruction_error: 0.0,
            residual_points: Vec::new(),
        }));
    }

    let upper = logderiv_coeffs_symbolic(p, HalfPlane::Upper, cfg.gamma_max).map_err(|e| e.at("logderiv"))?;
    let lower = logderiv_coeffs_symbolic(p, HalfPlane::Lower, cfg.gamma_max).map_err(|e| e.at("logderiv"))?;
    let growth = growth_profile_with(&upper, &lower, &cfg.radii, &cfg.thresholds).map_err(|e| e.at("criterion"))?;
    match growth.classification {
        Classification::Superlinear => {
            return Ok(FactorOutcome::NotSineProduct { stage: "criterion", reason: "criterion (r2) fails".into() })
        }
        Classification::Inconclusive => {
            return Ok(FactorOutcome::Inconclusive {
                stage: "criterion",
                reason: format!("growth exponent {:.3} between regimes", growth.fit_exponent),
                max_zero_imag: None,
                reconstruction_error: None,
                residual_points: Vec::new(),
            })
        }
        Classification::Linear { .. } => {}
    }

    let strip = zero_strip_estimate(p).map_err(|e| e.at("zeros"))?;
    let (x_min, x_max) = cfg.window;
    let rect = Rect::new(x_min, x_max, strip.alpha - strip.eta, strip.beta + strip.eta).map_err(|e| e.at("zeros"))?;
    let report = find_zeros(p, &rect, cfg.newton_tol).map_err(|e| e.at("zeros"))?;
    let measure = report.measure.restrict_real_window(x_min, x_max);
    let max_zero_imag = measure.max_abs_imag();
    if max_zero_imag > cfg.reality_tol {
        return Ok(FactorOutcome::NotSineProduct {
            stage: "zeros",
            reason: "complex zeros despite linear profile".into(),
        });
    }

    let inconclusive = |stage: &'static str, reason: String, residual_points: Vec<f64>, err: Option<f64>| {
        Ok(FactorOutcome::Inconclusive {
            stage,
            reason,
            max_zero_imag: Some(max_zero_imag),
            reconstruction_error: err,
            residual_points,
        })
    };

    let decomposition = match detect_progressions(&measure, cfg.window) {
        Ok(d) => d,
        Err(e @ (Error::DecompositionFailure { .. } | Error::Precondition(_))) => {
            return inconclusive("progressions", e.to_string(), Vec::new(), None)
        }
        Err(e) => return Err(e.at("progressions")),
    };
    if !decomposition.residual_points.is_empty() {
        return inconclusive(
            "progressions",
            format!("{} zeros fit no progression", decomposition.residual_points.len()),
            decomposition.residual_points,
            None,
        );
    }

    let sines = progressions_to_sines(&decomposition.progressions);
    let fit = match fit_exponential_prefactor(p, &sines, cfg.reconstruction_tol) {
        Ok(f) => f,
        Err(e @ Error::NotSineProduct(_)) => return inconclusive("prefactor", e.to_string(), Vec::new(), None),
        Err(e) => return Err(e.at("prefactor")),
    };
    let product = SineProduct::new(fit.c, fit.a, sines).map_err(|e| e.at("prefactor"))?;
    let rebuilt = expand_sine_product(&product).map_err(|e| e.at("verify"))?;
    let err = reconstruction_error(p, &rebuilt);
    if !(err <= cfg.reconstruction_tol) {
        return inconclusive("verify", format!("re-expansion differs by {err:.3e}"), Vec::new(), Some(err));
    }
    Ok(FactorOutcome::SineProduct(FactorizationResult {
        product,
        max_zero_imag,
        reconstruction_error: err,
        residual_points: Vec::new(),
    }))
}
