//! Dirichlet coefficients of the logarithmic derivative `f'/f` in the two
//! zero-free half-planes above and below the zero strip.
//!
//! In the upper half-plane write `f = q0 e^{2 pi i w0 z} (1 + g)` with `w0`
//! the smallest frequency, so `g` has strictly positive spectrum and
//! `f'/f = 2 pi i w0 + g'/(1 + g)`. The quotient `v = g'/(1 + g)` is computed
//! coefficient by coefficient from `(1 + g) v = g'` over the additive
//! semigroup generated by the spectrum of `g`. This is the same formal series
//! as `g' * sum (-g)^m`. The lower half-plane reduces to the upper one via
//! `z -> -z`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{exp_2pi_i, zero_strip_estimate, ExpPolynomial, MERGE_TOL};
use crate::quad::{gauss_legendre, GL_ORDER};

/// Default cap on the number of semigroup elements visited.
pub const DEFAULT_SEMIGROUP_CAP: usize = 200_000;

/// Relative size below which a recurrence output is treated as cancellation dust.
const DUST_REL: f64 = 1e-11;
/// Halvings of the Bohr-mean panel width before giving up.
const MEAN_REFINEMENTS: usize = 6;
/// Change between panel widths, relative to the size of the integrand,
/// accepted as converged.
const MEAN_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub gamma: f64,
    pub h: Complex64,
}

/// Truncated Dirichlet expansion `f'/f ~ sum h_gamma e^{2 pi i gamma z}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCoefficients {
    pub halfplane: HalfPlane,
    pub gamma_max: f64,
    /// Sorted by `gamma`; `gamma >= 0` (upper) or `gamma <= 0` (lower).
    pub coeffs: Vec<Coefficient>,
    /// Bound on the omitted tail `sum_{|gamma| > gamma_max} |h| e^{-2 pi gamma y}`
    /// valid for every `y` beyond `validity_height`; `None` when unknown.
    pub tail_bound: Option<f64>,
    /// Height beyond which the majorant `sum |g_j| e^{-2 pi lambda_j y}` is at most 1/2.
    pub validity_height: f64,
}

impl DirichletCoefficients {
    /// Coefficient at `gamma` (zero when absent).
    pub fn get(&self, gamma: f64) -> Complex64 {
        self.coeffs
            .iter()
            .find(|c| (c.gamma - gamma).abs() < MERGE_TOL)
            .map_or(Complex64::new(0.0, 0.0), |c| c.h)
    }

    /// Partial sum of the series at `z`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().map(|c| c.h * exp_2pi_i(c.gamma, z)).sum()
    }

    /// `sum_{|gamma| < r} |h_gamma|`.
    pub fn abs_sum_within(&self, r: f64) -> f64 {
        self.coeffs.iter().filter(|c| c.gamma.abs() < r).map(|c| c.h.norm()).sum()
    }
}

/// Index of frequencies keyed by their `MERGE_TOL`-rounded value.
#[derive(Default)]
struct FreqIndex {
    keys: BTreeMap<i64, f64>,
}

impl FreqIndex {
    fn key(freq: f64) -> i64 {
        (freq / MERGE_TOL).round() as i64
    }

    fn find(&self, freq: f64) -> Option<i64> {
        let k = Self::key(freq);
        (k - 1..=k + 1).find(|j| self.keys.get(j).is_some_and(|f| (f - freq).abs() < MERGE_TOL))
    }

    fn insert(&mut self, freq: f64) -> i64 {
        match self.find(freq) {
            Some(k) => k,
            None => {
                let k = Self::key(freq);
                self.keys.insert(k, freq);
                k
            }
        }
    }
}

pub fn logderiv_coeffs_symbolic(
    p: &ExpPolynomial,
    halfplane: HalfPlane,
    gamma_max: f64,
) -> Result<DirichletCoefficients> {
    logderiv_coeffs_symbolic_with_cap(p, halfplane, gamma_max, DEFAULT_SEMIGROUP_CAP)
}

pub fn logderiv_coeffs_symbolic_with_cap(
    p: &ExpPolynomial,
    halfplane: HalfPlane,
    gamma_max: f64,
    cap: usize,
) -> Result<DirichletCoefficients> {
    if p.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    if !(gamma_max >= 0.0) || !gamma_max.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma_max must be finite and >= 0, got {gamma_max}")));
    }
    match halfplane {
        HalfPlane::Upper => upper_coefficients(p, gamma_max, cap),
        HalfPlane::Lower => {
            // f(-z) has logarithmic derivative -u(-z), so h-_gamma = -h~+_{-gamma}
            let up = upper_coefficients(&p.reflect(), gamma_max, cap)?;
            let coeffs = up.coeffs.iter().rev().map(|c| Coefficient { gamma: -c.gamma, h: -c.h }).collect();
            Ok(DirichletCoefficients {
                halfplane: HalfPlane::Lower,
                gamma_max,
                coeffs,
                tail_bound: up.tail_bound,
                validity_height: -up.validity_height,
            })
        }
    }
}

fn upper_coefficients(p: &ExpPolynomial, gamma_max: f64, cap: usize) -> Result<DirichletCoefficients> {
    let terms = p.terms();
    let lead = terms[0];
    let g: Vec<(f64, Complex64)> = terms[1..].iter().map(|t| (t.omega - lead.omega, t.coeff / lead.coeff)).collect();

    let mut coeffs = Vec::new();
    let h0 = Complex64::new(0.0, TAU * lead.omega);
    if h0.norm() > 0.0 {
        coeffs.push(Coefficient { gamma: 0.0, h: h0 });
    }

    // v = g'/(1+g): v_l = g'_l - sum_j g_j v_{l - l_j}
    let mut index = FreqIndex::default();
    let mut values: BTreeMap<i64, Complex64> = BTreeMap::new();
    let mut candidates: BTreeMap<i64, f64> = BTreeMap::new();
    let limit = gamma_max + 0.5 * MERGE_TOL;
    for &(l, _) in &g {
        if l <= limit {
            candidates.insert(FreqIndex::key(l), l);
        }
    }
    let mut visited = 0usize;
    while let Some((_, lambda)) = candidates.pop_first() {
        visited += 1;
        if visited > cap {
            return Err(Error::Capacity { what: "Dirichlet semigroup enumeration", cap });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for &(l, gj) in &g {
            if (l - lambda).abs() < MERGE_TOL {
                let d = gj * Complex64::new(0.0, TAU * l);
                acc += d;
                scale += d.norm();
            } else if l < lambda {
                if let Some(k) = index.find(lambda - l) {
                    let term = gj * values[&k];
                    acc -= term;
                    scale += term.norm();
                }
            }
        }
        if acc.norm() <= DUST_REL * scale || acc.norm() == 0.0 {
            continue;
        }
        let k = index.insert(lambda);
        values.insert(k, acc);
        for &(l, _) in &g {
            let next = lambda + l;
            if next <= limit {
                let key = FreqIndex::key(next);
                let dup = (key - 1..=key + 1).any(|j| candidates.get(&j).is_some_and(|f| (f - next).abs() < MERGE_TOL));
                if !dup {
                    candidates.insert(key, next);
                }
            }
        }
    }
    coeffs.extend(index.keys.iter().map(|(k, &gamma)| Coefficient { gamma, h: values[k] }));

    let (validity_height, tail_bound) = majorant_bounds(&g, gamma_max);
    Ok(DirichletCoefficients { halfplane: HalfPlane::Upper, gamma_max, coeffs, tail_bound, validity_height })
}

/// `(validity height, tail bound)` from the majorant `G(y) = sum |g_j| e^{-2 pi l_j y}`.
fn majorant_bounds(g: &[(f64, Complex64)], gamma_max: f64) -> (f64, Option<f64>) {
    if g.is_empty() {
        return (f64::NEG_INFINITY, Some(0.0));
    }
    let big_g = |y: f64| g.iter().map(|(l, c)| c.norm() * (-TAU * l * y).exp()).sum::<f64>();
    let big_g_prime = |y: f64| g.iter().map(|(l, c)| TAU * l * c.norm() * (-TAU * l * y).exp()).sum::<f64>();
    let level = |target: f64| -> Option<f64> {
        let (mut lo, mut hi) = (-1.0, 1.0);
        let mut guard = 0;
        while big_g(lo) <= target {
            lo *= 2.0;
            guard += 1;
            if guard > 200 {
                return None;
            }
        }
        while big_g(hi) > target {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if big_g(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    };
    let Some(y_valid) = level(0.5) else {
        return (f64::NAN, None);
    };
    // terms beyond gamma_max at y_valid are at most e^{-2 pi gamma_max (y_valid - y1)}
    // times the whole majorant at any lower height y1 where G(y1) < 1
    let mut best = f64::INFINITY;
    for k in 0..=49 {
        let target = 0.5 + 0.49 * k as f64 / 49.0;
        if let Some(y1) = level(target) {
            let g1 = big_g(y1);
            if g1 < 1.0 {
                let bound = (-TAU * gamma_max * (y_valid - y1)).exp() * big_g_prime(y1) / (1.0 - g1);
                best = best.min(bound);
            }
        }
    }
    (y_valid, best.is_finite().then_some(best))
}

/// Bohr-mean estimate of one Dirichlet coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanValue {
    /// `e^{2 pi gamma y} (1/2T) int_{-T}^{T} (f'/f)(x+iy) e^{-2 pi i gamma x} dx`.
    pub value: Complex64,
    /// `|mean over [-2T, 2T] - mean over [-T, T]|`.
    pub error_estimate: f64,
}

/// Bohr mean of `(p'/p)(x+iy) e^{-2 pi i gamma x}` over `[-T, T]`, rescaled
/// by `e^{2 pi gamma y}`. `T` is rounded up to a multiple of the dyadic
/// panel width.
pub fn logderiv_coeffs_numeric(
    p: &ExpPolynomial,
    halfplane: HalfPlane,
    gamma: f64,
    y: f64,
    t: f64,
) -> Result<MeanValue> {
    if p.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    if !(t > 0.0) || !t.is_finite() || !y.is_finite() || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid mean parameters gamma={gamma}, y={y}, T={t}")));
    }
    match zero_strip_estimate(p) {
        Ok(strip) => {
            let ok = match halfplane {
                HalfPlane::Upper => y > strip.beta,
                HalfPlane::Lower => y < strip.alpha,
            };
            if !ok {
                return Err(Error::Precondition(format!(
                    "height {y} is not outside the zero strip [{}, {}]",
                    strip.alpha, strip.beta
                )));
            }
        }
        Err(Error::ZeroFree) => {}
        Err(e) => return Err(e),
    }
    let width = p.spectral_width();
    // p'/p = 2 pi i omega_lead + g'/(1 + g) with the term dominant in this
    // half-plane factored out; the constant is averaged in closed form and
    // only the small remainder is integrated, which keeps rounding in p'/p
    // from swamping coefficients damped by e^{-2 pi gamma y}
    let terms = p.terms();
    let lead = match halfplane {
        HalfPlane::Upper => terms[0],
        HalfPlane::Lower => terms[terms.len() - 1],
    };
    let rest: Vec<(f64, Complex64)> =
        terms.iter().filter(|t| t.omega != lead.omega).map(|t| (t.omega - lead.omega, t.coeff / lead.coeff)).collect();
    // dyadic panel width, so that every panel start k*h - T is an exact
    // double; node positions then carry no rounding however large T is
    let mut h = (4.0 * (1.0 + width + gamma.abs())).log2().ceil().exp2().recip();
    let half_t = ((t / h).ceil() * h).max(h);
    let scale = (TAU * gamma * y).exp();
    let constant = |half: f64| Complex64::new(0.0, TAU * lead.omega) * sinc_mean(gamma, half);
    // refinement is judged before the rescaling, against the size of g'
    let size: f64 = rest.iter().map(|&(l, c)| TAU * l.abs() * c.norm() * (-TAU * l * y).exp()).sum();
    let mut previous: Option<(Complex64, Complex64)> = None;
    for _ in 0..MEAN_REFINEMENTS {
        let v1 = composite_mean(&rest, gamma, y, half_t, h);
        let v2 = composite_mean(&rest, gamma, y, 2.0 * half_t, h);
        if let Some((p1, p2)) = previous {
            let change = (v1 - p1).norm().max((v2 - p2).norm());
            if change <= MEAN_TOL * (1.0 + size) {
                let m1 = (v1 + constant(half_t)) * scale;
                let m2 = (v2 + constant(2.0 * half_t)) * scale;
                return Ok(MeanValue { value: m1, error_estimate: (m2 - m1).norm() });
            }
        }
        previous = Some((v1, v2));
        h /= 2.0;
    }
    let (p1, _) = previous.expect("at least one refinement");
    Err(Error::NoConvergence { achieved: (composite_mean(&rest, gamma, y, half_t, h) - p1).norm() })
}

/// `(1/2T) int_{-T}^{T} e^{-2 pi i gamma x} dx`.
fn sinc_mean(gamma: f64, half_t: f64) -> Complex64 {
    if gamma == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let s = exp_2pi_i(gamma, Complex64::new(half_t, 0.0)).im;
    Complex64::new(s / (TAU * gamma * half_t), 0.0)
}

/// `(1/2T) int_{-T}^{T} g'/(1+g) (x+iy) e^{-2 pi i gamma x} dx` for
/// `g = sum c_j e^{2 pi i l_j z}`, by Gauss-Legendre on panels
/// `[kh - T, (k+1)h - T]`, with each exponential split as `e(c) e(u + iy)`
/// between panel start `c` and in-panel offset `u`.
fn composite_mean(g: &[(f64, Complex64)], gamma: f64, y: f64, half_t: f64, h: f64) -> Complex64 {
    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let local: Vec<Vec<(Complex64, Complex64)>> = nodes
        .iter()
        .map(|&x| {
            let u = 0.5 * h * (x + 1.0);
            g.iter()
                .map(|&(l, c)| {
                    let e = c * exp_2pi_i(l, Complex64::new(u, y));
                    (e, e * Complex64::new(0.0, TAU * l))
                })
                .collect()
        })
        .collect();
    let twist: Vec<Complex64> = nodes.iter().map(|&x| exp_2pi_i(-gamma, Complex64::new(0.5 * h * (x + 1.0), 0.0))).collect();
    let panels = (2.0 * half_t / h).round() as usize;
    let mut shift = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let c = Complex64::new(k as f64 * h - half_t, 0.0);
        for (s, &(l, _)) in shift.iter_mut().zip(g) {
            *s = exp_2pi_i(l, c);
        }
        let mut panel = Complex64::new(0.0, 0.0);
        for ((row, w), tw) in local.iter().zip(&weights).zip(&twist) {
            let (mut v, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for (&(e, de), s) in row.iter().zip(&shift) {
                v += e * s;
                d += de * s;
            }
            panel += d / (1.0 + v) * tw * w;
        }
        total += panel * exp_2pi_i(-gamma, c);
    }
    total * (0.5 * h) / (2.0 * half_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sin_poly() -> ExpPolynomial {
        ExpPolynomial::from_terms([(-0.5, c(0.0, 0.5)), (0.5, c(0.0, -0.5))]).unwrap()
    }

    fn cosh_poly() -> ExpPolynomial {
        ExpPolynomial::from_terms([(-1.0, c(1.0, 0.0)), (0.0, c(4.0, 0.0)), (1.0, c(1.0, 0.0))]).unwrap()
    }

    /// Power sums r1^k + r2^k of the roots of w^2 + 4w + 1, by Newton's identities.
    fn power_sums(n: usize) -> Vec<f64> {
        let mut s = vec![2.0, -4.0];
        for k in 2..=n {
            s.push(-4.0 * s[k - 1] - s[k - 2]);
        }
        s
    }

    #[test]
    fn cotangent_expansion_of_sine() {
        let h = logderiv_coeffs_symbolic(&sin_poly(), HalfPlane::Upper, 5.0).unwrap();
        assert_eq!(h.coeffs.len(), 6);
        assert!((h.get(0.0) - c(0.0, -PI)).norm() < 1e-14);
        for k in 1..=5 {
            assert!((h.get(k as f64) - c(0.0, -TAU)).norm() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn quadratic_example_matches_geometric_series() {
        // u = 2 pi i (-1 + sum_k -(r1^k + r2^k) ... ) from w/(w - r)
        let h = logderiv_coeffs_symbolic(&cosh_poly(), HalfPlane::Upper, 2.0).unwrap();
        assert!((h.get(0.0) - c(0.0, -TAU)).norm() < 1e-13);
        assert!((h.get(1.0) - c(0.0, 8.0 * PI)).norm() < 1e-12);
        assert!((h.get(2.0) - c(0.0, -28.0 * PI)).norm() < 1e-12);
        // w p'(w)/p(w) = -sum_k (r1^-k + r2^-k) w^k and r1 r2 = 1
        let h = logderiv_coeffs_symbolic(&cosh_poly(), HalfPlane::Upper, 12.0).unwrap();
        let s = power_sums(12);
        for k in 1..=12 {
            let expect = c(0.0, -TAU * s[k]);
            assert!((h.get(k as f64) - expect).norm() < 1e-12 * expect.norm(), "k = {k}");
        }
    }

    #[test]
    fn single_exponential_is_constant() {
        let p = ExpPolynomial::monomial(0.7, c(2.0, 1.0)).unwrap();
        for hp in [HalfPlane::Upper, HalfPlane::Lower] {
            let h = logderiv_coeffs_symbolic(&p, hp, 4.0).unwrap();
            assert_eq!(h.coeffs.len(), 1);
            assert!((h.get(0.0) - c(0.0, TAU * 0.7)).norm() < 1e-14);
        }
    }

    #[test]
    fn lower_half_plane_signs() {
        let h = logderiv_coeffs_symbolic(&sin_poly(), HalfPlane::Lower, 3.0).unwrap();
        assert!(h.coeffs.iter().all(|c| c.gamma <= 0.0));
        assert!((h.get(0.0) - c(0.0, PI)).norm() < 1e-14);
        assert!((h.get(-2.0) - c(0.0, TAU)).norm() < 1e-13);
        assert!(h.validity_height < 0.0);
    }

    #[test]
    fn capacity_is_enforced() {
        let p = ExpPolynomial::from_terms([
            (0.0, c(1.0, 0.0)),
            (0.11, c(0.3, 0.0)),
            (0.1713, c(0.2, 0.1)),
            (0.2371, c(0.1, 0.0)),
        ])
        .unwrap();
        assert!(matches!(
            logderiv_coeffs_symbolic_with_cap(&p, HalfPlane::Upper, 20.0, 1000),
            Err(Error::Capacity { .. })
        ));
        assert!(logderiv_coeffs_symbolic(&p, HalfPlane::Upper, -1.0).is_err());
    }

    #[test]
    fn numeric_mean_examples() {
        let m = logderiv_coeffs_numeric(&sin_poly(), HalfPlane::Upper, 1.0, 0.5, 200.0).unwrap();
        assert!((m.value - c(0.0, -TAU)).norm() < 5e-3);
        let m = logderiv_coeffs_numeric(&sin_poly(), HalfPlane::Upper, 0.37, 0.5, 200.0).unwrap();
        assert!(m.value.norm() < 5e-3);
        let p = ExpPolynomial::monomial(0.3, c(1.0, 0.0)).unwrap();
        let m = logderiv_coeffs_numeric(&p, HalfPlane::Upper, 0.0, -0.7, 10.0).unwrap();
        assert!((m.value - c(0.0, TAU * 0.3)).norm() < 1e-9);
    }

    #[test]
    fn numeric_mean_rejects_heights_inside_strip() {
        assert!(matches!(
            logderiv_coeffs_numeric(&sin_poly(), HalfPlane::Upper, 1.0, 0.05, 10.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            logderiv_coeffs_numeric(&sin_poly(), HalfPlane::Lower, 1.0, 0.5, 10.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn partial_sums_within_tail_bound() {
        for p in [sin_poly(), cosh_poly()] {
            let h = logderiv_coeffs_symbolic(&p, HalfPlane::Upper, 10.0).unwrap();
            let bound = h.tail_bound.unwrap();
            let dp = p.derivative();
            for k in 0..20 {
                let z = c(-3.0 + 0.37 * k as f64, h.validity_height + 0.05 * (k % 4) as f64);
                let exact = dp.evaluate(z) / p.evaluate(z);
                assert!((h.evaluate(z) - exact).norm() <= bound + 1e-12);
            }
        }
    }
}
