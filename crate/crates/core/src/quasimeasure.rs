//! Pure-point Fourier measure of a zero set and numerical checks of the
//! generalized Poisson formula `sum_gamma b_gamma phi(gamma) = sum_lambda a_lambda phi^c(lambda)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logderiv::{DirichletCoefficients, HalfPlane};
use crate::measure::{Atom, AtomicMeasure, Rect};
use crate::polynomial::{exp_2pi_i, ExpPolynomial, MERGE_TOL};
use crate::quad::{integrate_real, integrate_segment};
use crate::zeros::find_zeros;

/// Contour quadrature tolerance, absolute per edge.
pub const CONTOUR_TOL: f64 = 1e-10;

/// Test functions with an entire Fourier transform.
///
/// `Gaussian`: `phi(t) = exp(-pi (t - t0)^2 / s^2)`.
/// `Bump`: `phi(t) = exp(1 - 1/(1 - u^2))`, `u = (t - t0)/radius`, on `|u| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestFunction {
    Gaussian {
        s: f64,
        #[serde(default)]
        t0: f64,
    },
    Bump {
        radius: f64,
        #[serde(default)]
        t0: f64,
    },
}

impl TestFunction {
    pub fn gaussian(s: f64) -> Self {
        TestFunction::Gaussian { s, t0: 0.0 }
    }

    pub fn bump(radius: f64) -> Self {
        TestFunction::Bump { radius, t0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TestFunction::Gaussian { s, t0 } if s > 0.0 && s.is_finite() && t0.is_finite() => Ok(()),
            TestFunction::Bump { radius, t0 } if radius > 0.0 && radius.is_finite() && t0.is_finite() => Ok(()),
            _ => Err(Error::InvalidArgument(format!("invalid test function {self:?}"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { s, t0 } => (-PI * (t - t0).powi(2) / (s * s)).exp(),
            TestFunction::Bump { radius, t0 } => {
                let u = (t - t0) / radius;
                if u.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Entire extension `phi^c(z) = int phi(t) e^{-2 pi i z t} dt`.
pub fn transform_c(tf: &TestFunction, z: Complex64) -> Result<Complex64> {
    tf.validate()?;
    match *tf {
        TestFunction::Gaussian { s, t0 } => {
            Ok(exp_2pi_i(-t0, z) * (-PI * s * s * z * z).exp() * s)
        }
        TestFunction::Bump { radius, t0 } => {
            let f = |t: f64| exp_2pi_i(-t, z) * tf.eval(t);
            let tol = 1e-12 * (TAU * z.im.abs() * (t0.abs() + radius)).exp();
            let panels = ((2.0 * radius * 4.0 * (1.0 + z.re.abs())).ceil() as usize).max(8);
            let q = integrate_real(&f, t0 - radius, t0 + radius, panels, tol);
            if !q.converged {
                return Err(Error::NoConvergence { achieved: q.error_estimate });
            }
            Ok(q.value)
        }
    }
}

/// Assembles `sum i h+/(2 pi) delta_gamma - sum i h-/(2 pi) delta_gamma`.
pub fn fourier_measure(upper: &DirichletCoefficients, lower: &DirichletCoefficients) -> Result<AtomicMeasure> {
    if upper.halfplane != HalfPlane::Upper || lower.halfplane != HalfPlane::Lower {
        return Err(Error::InvalidArgument("fourier_measure needs (upper, lower) coefficients".into()));
    }
    let i_over = Complex64::new(0.0, 1.0 / TAU);
    // (gamma, mass, scale of the contributions)
    let mut parts: Vec<(f64, Complex64, f64)> = upper
        .coeffs
        .iter()
        .map(|c| (c.gamma, i_over * c.h, c.h.norm() / TAU))
        .chain(lower.coeffs.iter().map(|c| (c.gamma, -i_over * c.h, c.h.norm() / TAU)))
        .collect();
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, Complex64, f64)> = Vec::with_capacity(parts.len());
    for (g, m, s) in parts {
        match merged.last_mut() {
            Some(last) if (g - last.0).abs() < MERGE_TOL => {
                last.1 += m;
                last.2 = last.2.max(s);
            }
            _ => merged.push((g, m, s)),
        }
    }
    let atoms = merged
        .into_iter()
        .filter(|(_, m, s)| m.norm() > 1e-12 * s)
        .map(|(g, m, _)| Atom { location: Complex64::new(g, 0.0), mass: m })
        .collect();
    Ok(AtomicMeasure::from_atoms(atoms, 0.0))
}

/// Both sides of the translated Poisson identity and their truncation tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonReport {
    /// `sum_lambda a_lambda phi^c(lambda - t)` over the zero measure.
    pub lhs: Complex64,
    /// `sum_gamma b_gamma phi(gamma) e^{2 pi i t gamma}` over the Fourier measure.
    pub rhs: Complex64,
    pub residual: f64,
    pub lhs_tail: f64,
    pub rhs_tail: f64,
}

/// Compares `int phi(t - s) mu(ds)` with `int phi^(x) e^{2 pi i t x} mu^(dx)`,
/// written with the roles of `phi` and its transform exchanged so that
/// `phi` is sampled on the Fourier atoms and `phi^c` on the (complex) zeros.
pub fn poisson_check(
    mu: &AtomicMeasure,
    mu_hat: &AtomicMeasure,
    tf: &TestFunction,
    t: f64,
) -> Result<PoissonReport> {
    tf.validate()?;
    let shift = Complex64::new(t, 0.0);
    let mut lhs = Complex64::new(0.0, 0.0);
    for a in mu.atoms() {
        lhs += a.mass * transform_c(tf, a.location - shift)?;
    }
    let mut rhs = Complex64::new(0.0, 0.0);
    for a in mu_hat.atoms() {
        let g = a.location.re;
        rhs += a.mass * tf.eval(g) * exp_2pi_i(t, Complex64::new(g, 0.0));
    }
    let lhs_tail = extrapolated_tail(mu, |x, y| {
        transform_c(tf, Complex64::new(x - t, y)).map(|v| v.norm()).unwrap_or(f64::INFINITY)
    });
    let rhs_tail = extrapolated_tail(mu_hat, |x, _| tf.eval(x).abs());
    Ok(PoissonReport { lhs, rhs, residual: (lhs - rhs).norm(), lhs_tail, rhs_tail })
}

/// Estimates the contribution of atoms beyond both ends of a truncated
/// measure by continuing its outermost spacing and mass growth.
fn extrapolated_tail<W>(m: &AtomicMeasure, weight: W) -> f64
where
    W: Fn(f64, f64) -> f64,
{
    // group atoms by real part: (x, total |mass|, max |Im|)
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    for a in m.atoms() {
        match groups.last_mut() {
            Some(g) if (a.location.re - g.0).abs() < 1e-9 => {
                g.1 += a.mass.norm();
                g.2 = g.2.max(a.location.im.abs());
            }
            _ => groups.push((a.location.re, a.mass.norm(), a.location.im.abs())),
        }
    }
    if groups.len() < 2 {
        return 0.0;
    }
    let n = groups.len();
    let spacing = (groups[n - 1].0 - groups[0].0) / (n - 1) as f64;
    let mut total = 0.0;
    for (outer, inner, dir) in [(groups[n - 1], groups[n - 2], 1.0), (groups[0], groups[1], -1.0)] {
        let ratio = if inner.1 > 0.0 { (outer.1 / inner.1).max(1.0) } else { 1.0 };
        let mut mass = outer.1;
        for k in 1..=100_000 {
            mass *= ratio;
            let term = mass * weight(outer.0 + dir * spacing * k as f64, outer.2);
            if !term.is_finite() {
                return f64::INFINITY;
            }
            total += term;
            if k > 4 && term <= 1e-18 * total.max(1e-300) {
                break;
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourReport {
    /// `contour integral of phi^c p'/p dz` over the (possibly jittered) rectangle.
    pub contour: Complex64,
    /// `2 pi i sum_lambda a(lambda) phi^c(lambda)` over zeros inside.
    pub residue_sum: Complex64,
    pub residual: f64,
    pub rect: Rect,
    pub zero_count: usize,
}

/// Residue theorem check for `phi^c(z) p'(z)/p(z)` on a rectangle.
pub fn contour_residue_check(p: &ExpPolynomial, tf: &TestFunction, r: &Rect) -> Result<ContourReport> {
    tf.validate()?;
    let zeros = find_zeros(p, r, 1e-13)?;
    let rect = zeros.rect;
    let dp = p.derivative();
    let mut failure = None;
    let f = |z: Complex64| match transform_c(tf, z) {
        Ok(v) => v * dp.evaluate(z) / p.evaluate(z),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let oscillation = match *tf {
        TestFunction::Gaussian { s, t0 } => s * s * rect.y_max.abs().max(rect.y_min.abs()) + t0.abs(),
        TestFunction::Bump { radius, t0 } => radius + t0.abs(),
    };
    let mut contour = Complex64::new(0.0, 0.0);
    for (a, b) in rect.edges() {
        let len = (b - a).norm();
        let panels = ((len * 8.0 * (1.0 + p.spectral_width() + oscillation)).ceil() as usize).max(4);
        let q = integrate_segment(&f, a, b, panels, CONTOUR_TOL);
        if !q.converged {
            failure = Some(q.error_estimate);
        }
        contour += q.value;
    }
    if let Some(achieved) = failure {
        return Err(Error::NoConvergence { achieved });
    }
    let mut residue_sum = Complex64::new(0.0, 0.0);
    for a in zeros.measure.atoms() {
        residue_sum += a.mass * transform_c(tf, a.location)?;
    }
    residue_sum *= Complex64::new(0.0, TAU);
    Ok(ContourReport {
        contour,
        residue_sum,
        residual: (contour - residue_sum).norm(),
        rect,
        zero_count: zeros.count,
    })
}
