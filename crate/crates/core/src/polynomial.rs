//! Exponential polynomials `sum q e^{2 pi i omega z}` and finite sine products
//! `C e^{iaz} prod sin(alpha z + beta)^mult`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequencies closer than this are merged into one term.
pub const MERGE_TOL: f64 = 1e-9;
/// Terms below `PRUNE_REL * max |coeff|` are dropped.
pub const PRUNE_REL: f64 = 1e-14;
/// Default cap on the number of terms produced by [`expand_sine_product`].
pub const DEFAULT_TERM_CAP: usize = 4096;
/// Margin added around the estimated zero strip.
pub const DEFAULT_STRIP_MARGIN: f64 = 0.25;

const BETA_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub omega: f64,
    pub coeff: Complex64,
}

/// `p`, `p'`, `p''` and `max |q e^{2 pi i omega z}|` at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub max_term: f64,
}

/// A finite exponential polynomial with strictly increasing frequencies.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial")]
pub struct ExpPolynomial {
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct RawPolynomial {
    terms: Vec<Term>,
}

impl TryFrom<RawPolynomial> for ExpPolynomial {
    type Error = Error;

    fn try_from(raw: RawPolynomial) -> Result<Self> {
        ExpPolynomial::from_terms(raw.terms.into_iter().map(|t| (t.omega, t.coeff)))
    }
}

impl ExpPolynomial {
    /// Builds a polynomial from arbitrary `(omega, coeff)` pairs, merging
    /// near-equal frequencies and pruning negligible coefficients.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Complex64)>,
    {
        let raw: Vec<(f64, Complex64)> = terms.into_iter().collect();
        for (omega, c) in &raw {
            if !omega.is_finite() || !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite term ({omega}, {c})"
                )));
            }
        }
        Ok(Self { terms: normalize(raw) })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(omega: f64, coeff: Complex64) -> Result<Self> {
        Self::from_terms([(omega, coeff)])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_frequency(&self) -> Option<f64> {
        self.terms.first().map(|t| t.omega)
    }

    pub fn max_frequency(&self) -> Option<f64> {
        self.terms.last().map(|t| t.omega)
    }

    /// Width of the spectrum, `max omega - min omega` (0 when empty).
    pub fn spectral_width(&self) -> f64 {
        match (self.min_frequency(), self.max_frequency()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }

    /// Value at `z`, summed in ascending frequency order.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coeff * exp_2pi_i(t.omega, z);
        }
        acc
    }

    /// Largest single-term modulus `|q e^{2 pi i omega z}|` at `z`.
    pub fn max_term_modulus(&self, z: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.norm() * (-TAU * t.omega * z.im).exp())
            .fold(0.0, f64::max)
    }

    /// Value, first two derivatives and largest term modulus at `z`, sharing
    /// one exponential per term.
    pub fn jet(&self, z: Complex64) -> Jet {
        let mut j = Jet::default();
        for t in &self.terms {
            let term = t.coeff * exp_2pi_i(t.omega, z);
            let w = Complex64::new(0.0, TAU * t.omega);
            let d = w * term;
            j.value += term;
            j.d1 += d;
            j.d2 += w * d;
            j.max_term = j.max_term.max(term.norm_sqr());
        }
        j.max_term = j.max_term.sqrt();
        j
    }

    /// `(p(z), p'(z))` from one exponential per term.
    pub fn value_and_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let term = t.coeff * exp_2pi_i(t.omega, z);
            v += term;
            d += term * Complex64::new(0.0, TAU * t.omega);
        }
        (v, d)
    }

    /// Termwise derivative; the constant term disappears.
    pub fn derivative(&self) -> ExpPolynomial {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.omega != 0.0)
            .map(|t| Term { omega: t.omega, coeff: t.coeff * Complex64::new(0.0, TAU * t.omega) })
            .collect();
        ExpPolynomial { terms }
    }

    pub fn scale(&self, factor: Complex64) -> ExpPolynomial {
        if factor == Complex64::new(0.0, 0.0) {
            return ExpPolynomial::zero();
        }
        let terms = self.terms.iter().map(|t| Term { omega: t.omega, coeff: t.coeff * factor }).collect();
        ExpPolynomial { terms }
    }

    /// The polynomial `z -> p(-z)`.
    pub fn reflect(&self) -> ExpPolynomial {
        let terms = self.terms.iter().rev().map(|t| Term { omega: -t.omega, coeff: t.coeff }).collect();
        ExpPolynomial { terms }
    }

    pub fn mul(&self, other: &ExpPolynomial) -> ExpPolynomial {
        let mut raw = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                raw.push((a.omega + b.omega, a.coeff * b.coeff));
            }
        }
        ExpPolynomial { terms: normalize(raw) }
    }

    /// True when `q_{-omega} = conj(q_omega)` for every term (within `tol`),
    /// i.e. the function is real on the real axis.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        self.terms.iter().all(|t| {
            self.terms
                .iter()
                .find(|s| (s.omega + t.omega).abs() < MERGE_TOL)
                .is_some_and(|s| (s.coeff - t.coeff.conj()).norm() <= tol * scale)
        })
    }

    /// Coefficient attached to frequency `omega` (zero when absent).
    pub fn coeff_at(&self, omega: f64) -> Complex64 {
        self.terms
            .iter()
            .find(|t| (t.omega - omega).abs() < MERGE_TOL)
            .map_or(Complex64::new(0.0, 0.0), |t| t.coeff)
    }
}

#[inline]
pub(crate) fn exp_2pi_i(omega: f64, z: Complex64) -> Complex64 {
    let mag = (-TAU * omega * z.im).exp();
    // reduce omega * x to turns in [-1/2, 1/2] before scaling by 2 pi, with
    // the product's rounding error recovered by fma; keeps the phase exact
    // to ~1e-16 absolute however large x is
    let prod = omega * z.re;
    let err = omega.mul_add(z.re, -prod);
    let phase = TAU * ((prod - prod.round()) + err);
    let (sin, cos) = phase.sin_cos();
    Complex64::new(mag * cos, mag * sin)
}

fn normalize(mut raw: Vec<(f64, Complex64)>) -> Vec<Term> {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<Term> = Vec::with_capacity(raw.len());
    // frequency of the dominant member of the current cluster
    let mut lead = 0.0f64;
    let mut last_omega = f64::NEG_INFINITY;
    for (omega, coeff) in raw {
        match merged.last_mut() {
            Some(t) if omega - last_omega < MERGE_TOL => {
                t.coeff += coeff;
                if coeff.norm() > lead {
                    lead = coeff.norm();
                    t.omega = omega;
                }
            }
            _ => {
                lead = coeff.norm();
                merged.push(Term { omega, coeff });
            }
        }
        last_omega = omega;
    }
    let max = merged.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
    let floor = PRUNE_REL * max;
    merged.retain(|t| t.coeff.norm() > floor && t.coeff.norm() > 0.0);
    merged
}

/// One factor `sin(alpha z + beta)^mult`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineFactor {
    pub alpha: f64,
    pub beta: f64,
    pub mult: u32,
}

/// `C e^{iaz} prod_j sin(alpha_j z + beta_j)^{mult_j}` in canonical form:
/// every `alpha > 0`, every `beta` in `[0, pi)`, factors sorted and merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSineProduct")]
pub struct SineProduct {
    #[serde(rename = "C")]
    pub c: Complex64,
    pub a: f64,
    pub factors: Vec<SineFactor>,
}

#[derive(Deserialize)]
struct RawSineProduct {
    #[serde(rename = "C")]
    c: Complex64,
    a: f64,
    #[serde(default)]
    factors: Vec<SineFactor>,
}

impl TryFrom<RawSineProduct> for SineProduct {
    type Error = Error;

    fn try_from(raw: RawSineProduct) -> Result<Self> {
        SineProduct::new(raw.c, raw.a, raw.factors)
    }
}

impl SineProduct {
    /// Canonicalizes the factors, absorbing sign flips into `C`.
    pub fn new(c: Complex64, a: f64, factors: Vec<SineFactor>) -> Result<Self> {
        if !a.is_finite() || !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::InvalidArgument("non-finite prefactor".into()));
        }
        let mut c = c;
        let mut canon: Vec<SineFactor> = Vec::with_capacity(factors.len());
        for f in factors {
            if !f.alpha.is_finite() || !f.beta.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite factor {f:?}")));
            }
            if f.mult == 0 {
                continue;
            }
            let (mut alpha, mut beta) = (f.alpha, f.beta);
            let mut flips = 0i64;
            if alpha == 0.0 {
                c *= Complex64::new(beta.sin(), 0.0).powu(f.mult);
                continue;
            }
            if alpha < 0.0 {
                alpha = -alpha;
                beta = -beta;
                flips += 1;
            }
            let k = (beta / PI).floor();
            beta -= k * PI;
            flips += k as i64;
            if beta >= PI - BETA_EPS {
                beta = 0.0;
                flips += 1;
            }
            if beta < 0.0 {
                beta = 0.0;
            }
            if flips.rem_euclid(2) == 1 && f.mult % 2 == 1 {
                c = -c;
            }
            canon.push(SineFactor { alpha, beta, mult: f.mult });
        }
        canon.sort_by(|x, y| x.alpha.total_cmp(&y.alpha).then(x.beta.total_cmp(&y.beta)));
        let mut merged: Vec<SineFactor> = Vec::with_capacity(canon.len());
        for f in canon {
            match merged.last_mut() {
                Some(m)
                    if (m.alpha - f.alpha).abs() <= BETA_EPS * m.alpha.max(1.0)
                        && (m.beta - f.beta).abs() <= BETA_EPS =>
                {
                    m.mult += f.mult;
                }
                _ => merged.push(f),
            }
        }
        Ok(Self { c, a, factors: merged })
    }

    /// Total number of sine factors counted with multiplicity.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.mult).sum()
    }

    /// Direct product evaluation (no expansion).
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = self.c * (Complex64::i() * self.a * z).exp();
        for f in &self.factors {
            acc *= (z * f.alpha + f.beta).sin().powu(f.mult);
        }
        acc
    }
}

/// Expands a sine product into exponential-polynomial form.
pub fn expand_sine_product(s: &SineProduct) -> Result<ExpPolynomial> {
    expand_sine_product_with_cap(s, DEFAULT_TERM_CAP)
}

pub fn expand_sine_product_with_cap(s: &SineProduct, cap: usize) -> Result<ExpPolynomial> {
    let mut acc = ExpPolynomial::from_terms([(s.a / TAU, s.c)])?;
    let two_i = Complex64::new(0.0, 2.0);
    for f in &s.factors {
        let e = Complex64::from_polar(1.0, f.beta);
        let factor = ExpPolynomial {
            terms: vec![
                Term { omega: -f.alpha / TAU, coeff: -e.conj() / two_i },
                Term { omega: f.alpha / TAU, coeff: e / two_i },
            ],
        };
        for _ in 0..f.mult {
            acc = acc.mul(&factor);
            if acc.len() > cap {
                return Err(Error::Capacity { what: "sine-product expansion", cap });
            }
        }
    }
    Ok(acc)
}

/// Horizontal strip `alpha <= Im z <= beta` known to contain every zero,
/// plus a margin `eta` used when building enclosing rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
}

impl Strip {
    pub fn contains_height(&self, y: f64, tol: f64) -> bool {
        y >= self.alpha - tol && y <= self.beta + tol
    }
}

/// Dominant-term bound on the heights of all zeros.
///
/// Above `log(sum |q| / |q_min|) / (2 pi delta+)` the lowest-frequency term
/// outweighs all others, so no zeros live there; symmetrically below.
pub fn zero_strip_estimate(p: &ExpPolynomial) -> Result<Strip> {
    match p.len() {
        0 => return Err(Error::EmptyPolynomial),
        1 => return Err(Error::ZeroFree),
        _ => {}
    }
    let t = p.terms();
    let n = t.len();
    let total: f64 = t.iter().map(|t| t.coeff.norm()).sum();
    let gap_up = t[1].omega - t[0].omega;
    let gap_down = t[n - 1].omega - t[n - 2].omega;
    let y_plus = (total / t[0].coeff.norm()).ln() / (TAU * gap_up);
    let y_minus = (total / t[n - 1].coeff.norm()).ln() / (TAU * gap_down);
    Ok(Strip { alpha: -y_minus, beta: y_plus, eta: DEFAULT_STRIP_MARGIN })
}
