//! Generators and invariant checks shared by the property suites and the
//! acceptance run. Every check returns `Err(description)` on violation.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use quasizero::criterion::growth_profile;
use quasizero::factorizer::{
    detect_progressions, factor, reconstruction_error, FactorConfig, FactorOutcome, Progression,
};
use quasizero::logderiv::{logderiv_coeffs_numeric, logderiv_coeffs_symbolic, DirichletCoefficients, HalfPlane};
use quasizero::quad::integrate_real;
use quasizero::quasimeasure::{fourier_measure, poisson_check, transform_c, TestFunction};
use quasizero::*;
use rand::Rng;

pub type Check = std::result::Result<(), String>;

/// `log(2 + sqrt 3) / (2 pi)`, the height of the zeros of `4 + 2 cos 2 pi z`.
pub const HEIGHT: f64 = 0.209_600_359_139_491_37;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn sin_poly() -> ExpPolynomial {
    ExpPolynomial::from_terms([(-0.5, c(0.0, 0.5)), (0.5, c(0.0, -0.5))]).unwrap()
}

pub fn sin_sq() -> ExpPolynomial {
    expand_sine_product(&SineProduct::new(c(1.0, 0.0), 0.0, vec![SineFactor { alpha: PI, beta: 0.0, mult: 2 }]).unwrap())
        .unwrap()
}

/// `4 + 2 cos 2 pi z`.
pub fn cosh_poly() -> ExpPolynomial {
    ExpPolynomial::from_terms([(-1.0, c(1.0, 0.0)), (0.0, c(4.0, 0.0)), (1.0, c(1.0, 0.0))]).unwrap()
}

pub fn coeffs(p: &ExpPolynomial, gamma_max: f64) -> (DirichletCoefficients, DirichletCoefficients) {
    (
        logderiv_coeffs_symbolic(p, HalfPlane::Upper, gamma_max).unwrap(),
        logderiv_coeffs_symbolic(p, HalfPlane::Lower, gamma_max).unwrap(),
    )
}

/// Random canonical product with `1..=max_j` factors, `alpha` in [0.5, 5],
/// `beta` in [0, pi), multiplicities 1 or 2.
pub fn random_product<R: Rng>(rng: &mut R, max_j: usize) -> SineProduct {
    let j = rng.gen_range(1..=max_j);
    let factors = (0..j)
        .map(|_| SineFactor { alpha: rng.gen_range(0.5..5.0), beta: rng.gen_range(0.0..PI), mult: rng.gen_range(1..=2) })
        .collect();
    let c = Complex64::from_polar(rng.gen_range(0.5..3.0), rng.gen_range(-PI..PI));
    SineProduct::new(c, rng.gen_range(-2.0..2.0), factors).unwrap()
}

/// Polynomial with `q_{-omega} = conj(q_omega)`.
pub fn random_symmetric<R: Rng>(rng: &mut R) -> ExpPolynomial {
    let mut terms = vec![(0.0, c(rng.gen_range(-3.0..3.0), 0.0))];
    for _ in 0..rng.gen_range(1..=3) {
        let w = rng.gen_range(0.2..2.0);
        let q = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        terms.push((w, q));
        terms.push((-w, q.conj()));
    }
    ExpPolynomial::from_terms(terms).unwrap()
}

/// Conjugate-symmetric polynomial with frequencies in `Z/4`, so every
/// Dirichlet frequency sits on a lattice that a finite mean can resolve.
pub fn random_lattice_symmetric<R: Rng>(rng: &mut R) -> ExpPolynomial {
    let mut terms = vec![(0.0, c(rng.gen_range(-3.0..3.0), 0.0))];
    for _ in 0..rng.gen_range(1..=3) {
        let w = rng.gen_range(1..=8) as f64 / 4.0;
        let q = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        terms.push((w, q));
        terms.push((-w, q.conj()));
    }
    ExpPolynomial::from_terms(terms).unwrap()
}

/// Product of sines with `alpha` in `(pi/4) {2, .., 12}`.
pub fn random_lattice_product<R: Rng>(rng: &mut R, max_j: usize) -> SineProduct {
    let j = rng.gen_range(1..=max_j);
    let factors = (0..j)
        .map(|_| SineFactor {
            alpha: PI * rng.gen_range(2..=12) as f64 / 4.0,
            beta: rng.gen_range(0.0..PI),
            mult: rng.gen_range(1..=2),
        })
        .collect();
    SineProduct::new(c(1.0, 0.0), 0.0, factors).unwrap()
}

/// Two to four terms with arbitrary frequencies in [-2, 2].
pub fn random_poly<R: Rng>(rng: &mut R) -> ExpPolynomial {
    loop {
        let n = rng.gen_range(2..=4);
        let terms: Vec<(f64, Complex64)> = (0..n)
            .map(|_| (rng.gen_range(-2.0..2.0), c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))))
            .collect();
        let p = ExpPolynomial::from_terms(terms).unwrap();
        if p.len() >= 2 && p.spectral_width() > 0.1 {
            return p;
        }
    }
}

fn term_scale(p: &ExpPolynomial, z: Complex64) -> f64 {
    p.terms().iter().map(|t| (t.coeff * (Complex64::new(0.0, 2.0 * PI * t.omega) * z).exp()).norm()).sum()
}

fn strip_rect(p: &ExpPolynomial, x0: f64, x1: f64) -> Rect {
    let s = zero_strip_estimate(p).unwrap();
    Rect::new(x0, x1, s.alpha - s.eta, s.beta + s.eta).unwrap()
}

// ---------------------------------------------------------------- exp_core

pub fn expansion_matches_product<R: Rng>(s: &SineProduct, rng: &mut R) -> Check {
    let p = expand_sine_product(s).map_err(|e| e.to_string())?;
    for _ in 0..100 {
        let z = c(rng.gen_range(-10.0..10.0), rng.gen_range(-1.0..1.0));
        let (a, b) = (p.evaluate(z), s.evaluate(z));
        // relative to the size of the summands, which is what rounding sees
        let scale = term_scale(&p, z).max(b.norm());
        if (a - b).norm() > 1e-12 * scale {
            return Err(format!("{s:?} at {z}: expansion {a} vs product {b}"));
        }
    }
    Ok(())
}

pub fn derivative_matches_product_rule<R: Rng>(s: &SineProduct, rng: &mut R) -> Check {
    let dp = expand_sine_product(s).map_err(|e| e.to_string())?.derivative();
    for _ in 0..50 {
        let z = c(rng.gen_range(-10.0..10.0), rng.gen_range(-1.0..1.0));
        let sines: Vec<Complex64> = s.factors.iter().map(|f| (z * f.alpha + f.beta).sin()).collect();
        let pre = s.c * (Complex64::i() * s.a * z).exp();
        let full: Complex64 = s.factors.iter().zip(&sines).map(|(f, v)| v.powu(f.mult)).product();
        let mut d = Complex64::i() * s.a * full;
        for (j, f) in s.factors.iter().enumerate() {
            let mut term = sines[j].powu(f.mult - 1) * (z * f.alpha + f.beta).cos() * (f.alpha * f.mult as f64);
            for (k, g) in s.factors.iter().enumerate() {
                if k != j {
                    term *= sines[k].powu(g.mult);
                }
            }
            d += term;
        }
        let want = pre * d;
        let got = dp.evaluate(z);
        let scale = term_scale(&dp, z).max(want.norm());
        if (got - want).norm() > 1e-10 * scale {
            return Err(format!("{s:?} at {z}: derivative {got} vs product rule {want}"));
        }
    }
    Ok(())
}

pub fn conjugate_symmetric_evaluation<R: Rng>(p: &ExpPolynomial, rng: &mut R) -> Check {
    for _ in 0..50 {
        let z = c(rng.gen_range(-10.0..10.0), rng.gen_range(-2.0..2.0));
        let (a, b) = (p.evaluate(z.conj()), p.evaluate(z).conj());
        if (a - b).norm() > 1e-13 * term_scale(p, z) {
            return Err(format!("p(conj z) = {a}, conj p(z) = {b} at {z}"));
        }
    }
    Ok(())
}

/// Every zero found in the inflated strip rectangle lies inside the strip.
pub fn zeros_inside_strip(p: &ExpPolynomial, x0: f64, x1: f64) -> Check {
    let strip = zero_strip_estimate(p).map_err(|e| e.to_string())?;
    let rep = find_zeros(p, &strip_rect(p, x0, x1), 1e-12).map_err(|e| e.to_string())?;
    for z in &rep.zeros {
        if !strip.contains_height(z.location.im, 1e-12) {
            return Err(format!("zero {} outside strip [{}, {}]", z.location, strip.alpha, strip.beta));
        }
    }
    Ok(())
}

// ------------------------------------------------------------- strip_zeros

pub fn mass_equals_count(p: &ExpPolynomial, r: &Rect) -> Check {
    let rep = find_zeros(p, r, 1e-12).map_err(|e| e.to_string())?;
    let count = count_zeros(p, &rep.rect).map_err(|e| e.to_string())?;
    let mass = rep.measure.total_mass();
    if (mass - c(count as f64, 0.0)).norm() > 1e-12 || rep.count != count {
        return Err(format!("mass {mass} but winding count {count} on {:?}", rep.rect));
    }
    Ok(())
}

/// Zero mass over unit windows `[t, t+1]` never exceeds the number of
/// factor zeros an interval of length one can hold.
pub fn window_density_bounded(s: &SineProduct, ts: &[f64]) -> Check {
    let p = expand_sine_product(s).map_err(|e| e.to_string())?;
    let bound: f64 = s.factors.iter().map(|f| f.mult as f64 * (f.alpha / PI + 1.0).floor()).sum();
    for &t in ts {
        let rep = find_zeros(&p, &strip_rect(&p, t, t + 1.0), 1e-10).map_err(|e| e.to_string())?;
        let mass = rep.measure.total_mass().re;
        if mass > bound + 1e-9 {
            return Err(format!("mass {mass} on [{t}, {}] exceeds {bound}", t + 1.0));
        }
    }
    Ok(())
}

pub fn zero_set_conjugate_symmetric(p: &ExpPolynomial, x0: f64, x1: f64) -> Check {
    let rep = find_zeros(p, &strip_rect(p, x0, x1), 1e-12).map_err(|e| e.to_string())?;
    for a in rep.measure.atoms() {
        let mirror = a.location.conj();
        // atoms right at the vertical edges may have their partner outside
        if mirror.re - x0 < 1e-6 || x1 - mirror.re < 1e-6 {
            continue;
        }
        if rep.measure.mass_at(mirror, 1e-8) != a.mass {
            return Err(format!("zero {} (mass {}) has no mirror image", a.location, a.mass));
        }
    }
    Ok(())
}

// --------------------------------------------------------------- log_deriv

pub fn height_independence(p: &ExpPolynomial, gamma: f64, t: f64) -> Check {
    let strip = zero_strip_estimate(p).map_err(|e| e.to_string())?;
    let (y1, y2) = (strip.beta + 0.3, strip.beta + 0.7);
    let a = logderiv_coeffs_numeric(p, HalfPlane::Upper, gamma, y1, t).map_err(|e| e.to_string())?;
    let b = logderiv_coeffs_numeric(p, HalfPlane::Upper, gamma, y2, t).map_err(|e| e.to_string())?;
    let allowed = a.error_estimate + b.error_estimate + 1e-9 * (1.0 + a.value.norm());
    if (a.value - b.value).norm() > allowed {
        return Err(format!("gamma {gamma}: {} at y={y1} vs {} at y={y2} (allowed {allowed:e})", a.value, b.value));
    }
    Ok(())
}

pub fn symbolic_matches_numeric(p: &ExpPolynomial, gamma_max: f64, t: f64) -> Check {
    let strip = zero_strip_estimate(p).map_err(|e| e.to_string())?;
    let sym = logderiv_coeffs_symbolic(p, HalfPlane::Upper, gamma_max).map_err(|e| e.to_string())?;
    let y = sym.validity_height.max(strip.beta) + 0.1;
    for co in sym.coeffs.iter().filter(|co| co.h.norm() > 1e-6) {
        let num = logderiv_coeffs_numeric(p, HalfPlane::Upper, co.gamma, y, t).map_err(|e| e.to_string())?;
        if (num.value - co.h).norm() > 1e-2 * (1.0 + co.h.norm()) {
            return Err(format!("gamma {}: symbolic {} vs numeric {}", co.gamma, co.h, num.value));
        }
    }
    Ok(())
}

/// For real-symmetric input the lower expansion mirrors the upper one:
/// `h-_{-gamma} = conj(h+_gamma)`.
pub fn lower_mirrors_upper(p: &ExpPolynomial, gamma_max: f64) -> Check {
    let (up, lo) = coeffs(p, gamma_max);
    if up.coeffs.len() != lo.coeffs.len() {
        return Err(format!("{} upper vs {} lower coefficients", up.coeffs.len(), lo.coeffs.len()));
    }
    for co in &up.coeffs {
        let m = lo.get(-co.gamma);
        if (m - co.h.conj()).norm() > 1e-9 * (1.0 + co.h.norm()) {
            return Err(format!("gamma {}: h+ = {}, h- at -gamma = {m}", co.gamma, co.h));
        }
    }
    Ok(())
}

pub fn partial_sums_converge<R: Rng>(p: &ExpPolynomial, gamma_max: f64, rng: &mut R) -> Check {
    let finder = zeros::ZeroFinder::new(p).map_err(|e| e.to_string())?;
    for half in [HalfPlane::Upper, HalfPlane::Lower] {
        let co = logderiv_coeffs_symbolic(p, half, gamma_max).map_err(|e| e.to_string())?;
        let tail = co.tail_bound.ok_or("no tail bound")?;
        for _ in 0..20 {
            let lift = rng.gen_range(0.05..0.5);
            let y = match half {
                HalfPlane::Upper => co.validity_height + lift,
                HalfPlane::Lower => co.validity_height - lift,
            };
            let z = c(rng.gen_range(-10.0..10.0), y);
            let (sum, exact) = (co.evaluate(z), finder.log_derivative(z));
            let err = (sum - exact).norm();
            if err > tail + 1e-10 * (1.0 + exact.norm()) {
                return Err(format!("{half:?} at {z}: |partial sum - p'/p| = {err:e} > tail {tail:e}"));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------ quasimeasure

pub fn fourier_masses_conjugate_symmetric(p: &ExpPolynomial, gamma_max: f64) -> Check {
    let (up, lo) = coeffs(p, gamma_max);
    let m = fourier_measure(&up, &lo).map_err(|e| e.to_string())?;
    for a in m.atoms() {
        let mirror = m.mass_at(c(-a.location.re, 0.0), 1e-9);
        if (mirror - a.mass.conj()).norm() > 1e-9 * (1.0 + a.mass.norm()) {
            return Err(format!("mass {} at {} but {mirror} at the mirror point", a.mass, a.location.re));
        }
    }
    Ok(())
}

/// Residual of the Poisson check for zeros with `|Re| <= n + 1/2` and the
/// Fourier measure up to `gamma_max`, plus the reported tails.
pub fn poisson_at(p: &ExpPolynomial, tf: &TestFunction, n: f64, gamma_max: f64) -> (f64, f64) {
    let mu = if p.len() < 2 {
        AtomicMeasure::default()
    } else {
        find_zeros(p, &strip_rect(p, -n - 0.5, n + 0.5), 1e-13).unwrap().measure
    };
    let (up, lo) = coeffs(p, gamma_max);
    let mu_hat = fourier_measure(&up, &lo).unwrap();
    let r = poisson_check(&mu, &mu_hat, tf, 0.0).unwrap();
    (r.residual, r.lhs_tail + r.rhs_tail)
}

/// Doubling both truncations never makes the residual worse by more than
/// the tails reported at the coarser level.
pub fn poisson_residual_shrinks(p: &ExpPolynomial, tf: &TestFunction, levels: &[(f64, f64)]) -> Check {
    let mut prev: Option<(f64, f64)> = None;
    for &(n, g) in levels {
        let (res, tail) = poisson_at(p, tf, n, g);
        if let Some((pr, pt)) = prev {
            if res > pr + pt + 1e-12 {
                return Err(format!("residual grew from {pr:e} to {res:e} at n={n}, gamma={g} (tails {pt:e})"));
            }
        }
        prev = Some((res, tail));
    }
    Ok(())
}

pub fn gaussian_transform_matches_quadrature(s: f64, t0: f64, x: f64) -> Check {
    let tf = TestFunction::Gaussian { s, t0 };
    let got = transform_c(&tf, c(x, 0.0)).map_err(|e| e.to_string())?;
    let f = |t: f64| tf.eval(t) * Complex64::from_polar(1.0, -2.0 * PI * x * t);
    let half = 12.0 * s;
    let q = integrate_real(&f, t0 - half, t0 + half, 64, 1e-14);
    if (got - q.value).norm() > 1e-12 {
        return Err(format!("s={s}, t0={t0}, x={x}: closed form {got} vs quadrature {}", q.value));
    }
    Ok(())
}

/// `2 pi sum_{|gamma|<r} |mass|` equals `R(r)` when the spectrum hull
/// contains zero.
pub fn variation_matches_profile(p: &ExpPolynomial, gamma_max: f64) -> Check {
    let (up, lo) = coeffs(p, gamma_max);
    let m = fourier_measure(&up, &lo).map_err(|e| e.to_string())?;
    let radii = quasizero::criterion::dyadic_radii(gamma_max);
    let report = growth_profile(&up, &lo, &radii).map_err(|e| e.to_string())?;
    for (r, v) in radii.iter().zip(&report.values) {
        let w = 2.0 * PI * m.variation_within(*r);
        if (w - v).abs() > 1e-9 * (1.0 + v) {
            return Err(format!("r={r}: 2 pi |mu^|(-r, r) = {w} but R(r) = {v}"));
        }
    }
    Ok(())
}

/// Mass of the Fourier measure at 0 against the zero count per unit length
/// over `[-t, t]`.
pub fn zero_density_matches_mean_mass(p: &ExpPolynomial, t: f64) -> Check {
    let (up, lo) = coeffs(p, 4.0);
    let m0 = fourier_measure(&up, &lo).map_err(|e| e.to_string())?.mass_at(c(0.0, 0.0), 1e-9);
    let rep = find_zeros(p, &strip_rect(p, -t, t), 1e-10).map_err(|e| e.to_string())?;
    let density = rep.measure.total_mass().re / (2.0 * t);
    if (density - m0.re).abs() > 2.0 / t || m0.im.abs() > 1e-12 {
        return Err(format!("density {density} vs mass at 0 = {m0}"));
    }
    Ok(())
}

// --------------------------------------------------------------- criterion

pub fn sine_product_grows_linearly(s: &SineProduct) -> Check {
    let p = expand_sine_product(s).map_err(|e| e.to_string())?;
    let (up, lo) = coeffs(&p, 16.0);
    let r = growth_profile(&up, &lo, &quasizero::criterion::dyadic_radii(16.0)).map_err(|e| e.to_string())?;
    if !r.is_linear() {
        return Err(format!("{s:?} classified {:?} (exponent {})", r.classification, r.fit_exponent));
    }
    Ok(())
}

pub fn profile_monotone(p: &ExpPolynomial) -> Check {
    let (up, lo) = coeffs(p, 8.0);
    let radii: Vec<f64> = (1..=16).map(|k| 0.5 * k as f64).filter(|&r| r >= 1.0).collect();
    let r = growth_profile(&up, &lo, &radii).map_err(|e| e.to_string())?;
    if r.values.windows(2).any(|w| w[1] < w[0]) {
        return Err(format!("R not monotone: {:?}", r.values));
    }
    Ok(())
}

pub fn profile_scale_invariant(p: &ExpPolynomial, k: Complex64) -> Check {
    let radii = [2.0, 4.0, 6.0, 8.0];
    let (u1, l1) = coeffs(p, 8.0);
    let (u2, l2) = coeffs(&p.scale(k), 8.0);
    let a = growth_profile(&u1, &l1, &radii).map_err(|e| e.to_string())?;
    let b = growth_profile(&u2, &l2, &radii).map_err(|e| e.to_string())?;
    for (x, y) in a.values.iter().zip(&b.values) {
        if (x - y).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(format!("scaling by {k} changed R: {:?} vs {:?}", a.values, b.values));
        }
    }
    Ok(())
}

// -------------------------------------------------------------- factorizer

/// Unit (or `mult`) masses on the points of `ps` inside `window`, plus extras.
pub fn lattice_measure(ps: &[Progression], extra: &[f64], window: (f64, f64)) -> AtomicMeasure {
    let mut atoms = Vec::new();
    for p in ps {
        let k0 = ((window.0 - p.c) / p.d).ceil() as i64;
        let k1 = ((window.1 - p.c) / p.d).floor() as i64;
        for k in k0..=k1 {
            atoms.push(Atom { location: c(p.c + k as f64 * p.d, 0.0), mass: c(p.mult as f64, 0.0) });
        }
    }
    for &x in extra {
        atoms.push(Atom { location: c(x, 0.0), mass: c(1.0, 0.0) });
    }
    AtomicMeasure::from_atoms(atoms, 1e-9)
}

fn shifted(m: &AtomicMeasure, t: f64) -> AtomicMeasure {
    let atoms = m.atoms().iter().map(|a| Atom { location: a.location + t, mass: a.mass }).collect();
    AtomicMeasure::from_atoms(atoms, 1e-9)
}

fn circular_gap(a: f64, b: f64, d: f64) -> f64 {
    let r = (a - b).rem_euclid(d);
    r.min(d - r)
}

pub fn progressions_translation_covariant(m: &AtomicMeasure, window: (f64, f64), t: f64) -> Check {
    let a = detect_progressions(m, window).map_err(|e| e.to_string())?;
    let b = detect_progressions(&shifted(m, t), (window.0 + t, window.1 + t)).map_err(|e| e.to_string())?;
    if a.progressions.len() != b.progressions.len() {
        return Err(format!("{:?} vs shifted {:?}", a.progressions, b.progressions));
    }
    for (p, q) in a.progressions.iter().zip(&b.progressions) {
        if (p.d - q.d).abs() > 1e-9 || p.mult != q.mult || circular_gap(p.c + t, q.c, p.d) > 1e-8 {
            return Err(format!("{p:?} shifted by {t} became {q:?}"));
        }
    }
    if a.residual_points.len() != b.residual_points.len() {
        return Err("residual count changed under translation".into());
    }
    Ok(())
}

pub fn mass_conserved(m: &AtomicMeasure, window: (f64, f64)) -> Check {
    let dec = detect_progressions(m, window).map_err(|e| e.to_string())?;
    let mut matched = 0.0;
    for p in &dec.progressions {
        let k0 = ((window.0 - p.c) / p.d).ceil() as i64;
        let k1 = ((window.1 - p.c) / p.d).floor() as i64;
        // points within the jitter tolerance of an edge may be absent
        let points = (k0..=k1)
            .map(|k| p.c + k as f64 * p.d)
            .filter(|x| m.mass_at(c(*x, 0.0), 1e-6).norm() > 0.0)
            .count();
        matched += points as f64 * p.mult as f64;
    }
    let total = m.restrict_real_window(window.0, window.1).total_mass().re;
    let accounted = matched + dec.residual_points.len() as f64;
    if (accounted - total).abs() > 1e-9 {
        return Err(format!("matched {matched} + residual {} != total {total}", dec.residual_points.len()));
    }
    Ok(())
}

pub fn reconstruction_within_tolerance(p: &ExpPolynomial, cfg: &FactorConfig) -> Check {
    match factor(p, cfg).map_err(|e| e.to_string())? {
        FactorOutcome::SineProduct(r) => {
            let again = expand_sine_product(&r.product).map_err(|e| e.to_string())?;
            let err = reconstruction_error(p, &again);
            if r.reconstruction_error > cfg.reconstruction_tol || err > cfg.reconstruction_tol {
                return Err(format!("accepted with reconstruction error {} / {err}", r.reconstruction_error));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// `factor(expand(s))` recovers `s`; with `strict` the parameters must also
/// match to 1e-6, otherwise termwise agreement of the expansions suffices.
pub fn round_trip(s: &SineProduct, strict: bool) -> Check {
    let p = expand_sine_product(s).map_err(|e| e.to_string())?;
    let r = match factor(&p, &FactorConfig::default()).map_err(|e| e.to_string())? {
        FactorOutcome::SineProduct(r) => r,
        other => return Err(format!("{s:?}: {other:?}")),
    };
    if r.reconstruction_error > 1e-6 {
        return Err(format!("{s:?}: reconstruction error {}", r.reconstruction_error));
    }
    let again = expand_sine_product(&r.product).map_err(|e| e.to_string())?;
    let err = reconstruction_error(&p, &again);
    if err > 1e-6 {
        return Err(format!("{s:?}: re-expansion differs by {err}"));
    }
    if strict {
        let q = &r.product;
        let close = q.factors.len() == s.factors.len()
            && (q.c - s.c).norm() <= 1e-6 * s.c.norm().max(1.0)
            && (q.a - s.a).abs() <= 1e-6
            && q.factors.iter().zip(&s.factors).all(|(x, y)| {
                x.mult == y.mult && (x.alpha - y.alpha).abs() <= 1e-6 && circular_gap(x.beta, y.beta, PI) <= 1e-6
            });
        if !close {
            return Err(format!("recovered {q:?} from {s:?}"));
        }
    }
    Ok(())
}
