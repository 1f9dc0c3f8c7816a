//! Zero localization for exponential polynomials inside rectangles.
//!
//! Zeros are counted with the argument principle, isolated by recursive
//! bisection and polished by Newton's method. Multiplicities come from winding
//! numbers and contour moments around small squares, never from derivative
//! magnitudes.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{Atom, AtomicMeasure, Rect};
use crate::polynomial::{ExpPolynomial, Jet};
use crate::quad::{integrate_segment_capped, integrate_segment_vec};

/// Roots closer than this are reported as a single atom.
pub const CLUSTER_TOL: f64 = 1e-7;
/// `min |p|` on a contour must exceed this times the largest term modulus.
pub const BOUNDARY_SAFETY_REL: f64 = 1e-8;
/// The same check for the small contours used inside a rectangle, where
/// neighbouring zeros of a cluster make `|p|` legitimately tiny.
const INTERNAL_SAFETY_REL: f64 = 1e-12;
/// Number of jittered retries when a rectangle boundary passes too close to a zero.
pub const JITTER_ATTEMPTS: usize = 5;
/// Winding numbers further than this from an integer are a hard failure.
pub const WINDING_RESIDUAL_MAX: f64 = 0.1;

const WINDING_RESIDUAL_TARGET: f64 = 1e-3;
const JITTER_SEED: u64 = 0x5eed_2e70;
const JITTER_FRACTION: f64 = 0.01;
const SPLIT_FRACTIONS: [f64; 9] = [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65, 0.3, 0.7];
const TIGHT_RADII: [f64; 3] = [1e-3, 3e-3, 1e-2];
const MAX_DEPTH: u32 = 80;
/// Sample spacing, relative to the edge length, below which a zero close
/// to the boundary counts as lying on it.
const NEAR_ZERO_FLOOR: f64 = 1e-7;
const WINDING_PANEL_CAP: usize = 20_000;
const MOMENT_TOL: f64 = 1e-9;
const MOMENT_PANEL_CAP: usize = 800;
const MOMENT_FLOOR: f64 = 1e-4;
/// Grouping distances for moment roots, in units of the square's half-side.
const MERGE_SCALES: [f64; 7] = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
const MIN_SEPARATION_RATIO: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum ContourFailure {
    NearZero { min_modulus: f64, threshold: f64 },
    Quadrature { winding: f64 },
}

impl ContourFailure {
    fn into_error(self, attempts: usize) -> Error {
        match self {
            ContourFailure::NearZero { min_modulus, threshold } => {
                Error::BoundaryProximity { min_modulus, threshold, attempts }
            }
            ContourFailure::Quadrature { winding } => Error::QuadratureFailure { winding },
        }
    }
}

/// A located zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: u32,
    /// Newton did not converge; the location is a cell center.
    pub coarse: bool,
}

/// Output of [`find_zeros`].
#[derive(Debug, Clone, Serialize)]
pub struct ZeroReport {
    /// Zero measure: one atom per distinct zero, mass = multiplicity.
    pub measure: AtomicMeasure,
    pub zeros: Vec<Zero>,
    /// Rectangle actually used (possibly jittered outward).
    pub rect: Rect,
    /// Winding number of `rect`.
    pub count: usize,
    /// Largest `|p(location)|` over returned zeros.
    pub max_residual: f64,
    /// Number of atoms flagged coarse.
    pub coarse_count: usize,
}

/// Caches the derivatives needed for contour integrals and Newton steps.
pub struct ZeroFinder<'a> {
    p: &'a ExpPolynomial,
    width: f64,
}

impl<'a> ZeroFinder<'a> {
    pub fn new(p: &'a ExpPolynomial) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("the zero polynomial vanishes everywhere".into()));
        }
        Ok(Self { p, width: p.spectral_width() })
    }

    pub fn polynomial(&self) -> &ExpPolynomial {
        self.p
    }

    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        let (v, d) = self.p.value_and_derivative(z);
        d / v
    }

    fn samples_per_unit(&self) -> f64 {
        32.0 * (1.0 + self.width)
    }

    fn panels_for(&self, len: f64) -> usize {
        ((len * (1.0 + self.width)).ceil() as usize).clamp(1, 1_000_000)
    }

    /// Checks `|p(z)| >= rel * (largest term modulus at z)` on sampled
    /// boundary points.
    fn boundary_safe(&self, r: &Rect, rel: f64) -> std::result::Result<(), ContourFailure> {
        self.segments_safe(&r.edges(), rel)
    }

    fn segments_safe(&self, edges: &[(Complex64, Complex64)], rel: f64) -> std::result::Result<(), ContourFailure> {
        let mut worst = (f64::INFINITY, 0.0, f64::INFINITY);
        let mut near_zero = false;
        for &(a, b) in edges {
            let len = (b - a).norm();
            let n = ((len * self.samples_per_unit()).ceil() as usize).clamp(64, 400_000);
            let spacing = len / n as f64;
            for k in 0..n {
                let z = a + (b - a) * (k as f64 / n as f64);
                let j = self.p.jet(z);
                let v = j.value.norm();
                let scale = j.max_term;
                let ratio = v / scale;
                if !(ratio >= worst.2) {
                    worst = (v, scale, ratio);
                }
                // |p/p'| estimates the distance to the nearest zero; a zero
                // between two samples would otherwise go unnoticed
                if v < 0.5 * spacing * j.d1.norm() {
                    let step = (b - a) / n as f64;
                    near_zero |= self.zero_near_segment(z - step, z + step, len * NEAR_ZERO_FLOOR);
                }
            }
        }
        let (min_modulus, scale, ratio) = worst;
        let threshold = rel * scale;
        if near_zero || !(ratio >= rel) {
            Err(ContourFailure::NearZero { min_modulus, threshold })
        } else {
            Ok(())
        }
    }

    /// Resamples `[a, b]` until either every sample is farther from a zero
    /// than its spacing or the spacing drops below `floor`.
    fn zero_near_segment(&self, a: Complex64, b: Complex64, floor: f64) -> bool {
        const N: usize = 16;
        let spacing = (b - a).norm() / N as f64;
        if spacing < floor {
            return true;
        }
        (0..=N).any(|k| {
            let z = a + (b - a) * (k as f64 / N as f64);
            let j = self.p.jet(z);
            if j.value.norm() >= 0.5 * spacing * j.d1.norm() {
                return false;
            }
            let step = (b - a) / N as f64;
            self.zero_near_segment(z - step, z + step, floor)
        })
    }

    /// `(1/2 pi i) * contour integral of p'/p` over the boundary of `r`.
    fn winding(&self, r: &Rect) -> std::result::Result<usize, ContourFailure> {
        self.winding_with(r, INTERNAL_SAFETY_REL)
    }

    fn winding_with(&self, r: &Rect, rel: f64) -> std::result::Result<usize, ContourFailure> {
        self.boundary_safe(r, rel)?;
        self.winding_unchecked(r)
    }

    /// Winding number of the first half of a split of `cell`, checking only
    /// the cut since the remaining edges were checked with the parent.
    fn split_winding(&self, cell: &Rect, part: &Rect) -> std::result::Result<usize, ContourFailure> {
        let on_cell = |a: Complex64, b: Complex64| {
            (a.re == b.re && (a.re == cell.x_min || a.re == cell.x_max))
                || (a.im == b.im && (a.im == cell.y_min || a.im == cell.y_max))
        };
        let cut: Vec<_> = part.edges().into_iter().filter(|&(a, b)| !on_cell(a, b)).collect();
        self.segments_safe(&cut, INTERNAL_SAFETY_REL)?;
        self.winding_unchecked(part)
    }

    fn winding_unchecked(&self, r: &Rect) -> std::result::Result<usize, ContourFailure> {
        let f = |z: Complex64| self.log_derivative(z);
        let mut last = f64::NAN;
        for tol in [1e-4, 1e-6, 1e-8] {
            let mut total = Complex64::new(0.0, 0.0);
            let mut error = 0.0;
            let mut converged = true;
            for (a, b) in r.edges() {
                let panels = self.panels_for((b - a).norm());
                let q = integrate_segment_capped(&f, a, b, panels, TAU * tol, WINDING_PANEL_CAP.max(4 * panels));
                converged &= q.converged;
                error += q.error_estimate;
                total += q.value;
            }
            let w = total / Complex64::new(0.0, TAU);
            let n = w.re.round();
            let residual = (w - n).norm();
            last = w.re;
            if converged && residual < WINDING_RESIDUAL_TARGET && n >= 0.0 {
                return Ok(n as usize);
            }
            if !converged {
                // rounding noise in p'/p can stall refinement short of the
                // tolerance while the count is already unambiguous; a tighter
                // tolerance would only exhaust the same panel budget again
                if error / TAU < WINDING_RESIDUAL_MAX && residual < WINDING_RESIDUAL_MAX && n >= 0.0 {
                    return Ok(n as usize);
                }
                break;
            }
            if residual < WINDING_RESIDUAL_MAX && n >= 0.0 && tol <= 1e-8 {
                return Ok(n as usize);
            }
        }
        Err(ContourFailure::Quadrature { winding: last })
    }

    /// Winding number of `r`, inflating it by a small deterministic jitter
    /// when its boundary passes too close to a zero.
    pub fn prepare(&self, r: &Rect) -> Result<(Rect, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
        let mut current = *r;
        let mut failure = None;
        for _ in 0..=JITTER_ATTEMPTS {
            match self.winding_with(&current, BOUNDARY_SAFETY_REL) {
                Ok(n) => return Ok((current, n)),
                Err(e) => failure = Some(e),
            }
            let (w, h) = (r.width(), r.height());
            current = Rect {
                x_min: r.x_min - rng.gen_range(0.0..JITTER_FRACTION) * w,
                x_max: r.x_max + rng.gen_range(0.0..JITTER_FRACTION) * w,
                y_min: r.y_min - rng.gen_range(0.0..JITTER_FRACTION) * h,
                y_max: r.y_max + rng.gen_range(0.0..JITTER_FRACTION) * h,
            };
        }
        Err(failure.expect("at least one attempt").into_error(JITTER_ATTEMPTS + 1))
    }

    /// Newton's method on `p / p'`, which has only simple zeros.
    fn newton(&self, z0: Complex64, domain: &Rect, tol: f64) -> Option<Complex64> {
        let mut z = z0;
        let mut prev = f64::INFINITY;
        for it in 0..100 {
            let Jet { value: f, d1: f1, d2: f2, .. } = self.p.jet(z);
            if f.norm() == 0.0 {
                return Some(z);
            }
            let den = f1 * f1 - f * f2;
            if den.norm() == 0.0 {
                return None;
            }
            let step = f * f1 / den;
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z -= step;
            if !domain.contains(z) {
                return None;
            }
            let s = step.norm();
            if s < tol * z.norm().max(1.0) {
                return Some(z);
            }
            // rounding floor near multiple zeros
            if it > 8 && s >= prev && s < 1e-6 {
                return Some(z);
            }
            prev = s;
        }
        None
    }

    /// Newton on `p^{(m-1)}`, which has a simple zero at an m-fold zero of `p`.
    fn polish_multiple(&self, z0: Complex64, m: u32, tol: f64, radius: f64) -> Complex64 {
        self.newton_on_derivative(z0, m, tol, radius).unwrap_or(z0)
    }

    fn newton_on_derivative(&self, z0: Complex64, m: u32, tol: f64, radius: f64) -> Option<Complex64> {
        let mut q = self.p.clone();
        for _ in 0..m - 1 {
            q = q.derivative();
        }
        let dq = q.derivative();
        let mut z = z0;
        let mut prev = f64::INFINITY;
        for it in 0..50 {
            let step = q.evaluate(z) / dq.evaluate(z);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z -= step;
            if (z - z0).norm() > radius {
                return None;
            }
            let s = step.norm();
            if s < tol * z.norm().max(1.0) || (it > 4 && s >= prev && s < 1e-3 * radius) {
                return Some(z);
            }
            prev = s;
        }
        None
    }

    /// Resolves the `n` zeros near the Newton limit `z`: counts them on small
    /// squares and, for `n >= 2`, recovers the individual locations from
    /// contour moments. `None` when the squares do not hold exactly `n`.
    fn isolate(&self, z: Complex64, n: usize, tol: f64, cell: &Rect, radii: &[f64]) -> Option<Vec<Zero>> {
        let count = |rho: f64| self.winding(&Rect::around(z, rho)).ok();
        if n == 1 {
            let first = radii.iter().find_map(|&rho| count(rho))?;
            return (first == 1).then(|| vec![Zero { location: z, multiplicity: 1, coarse: false }]);
        }
        // moments are most accurate on the widest square that holds all n,
        // unless a zero just outside it spoils the quadrature
        let (rho, roots) = radii
            .iter()
            .rev()
            .filter(|&&rho| count(rho) == Some(n))
            .find_map(|&rho| self.cluster_roots(z, rho, n).map(|r| (rho, r)))?;
        // group nearby roots at growing scales until every group's
        // multiplicity is confirmed by its own winding number
        let floor = (MERGE_SCALES[0] * rho).max(CLUSTER_TOL);
        let mut best: Option<(f64, Vec<(Complex64, u32)>)> = None;
        let mut merged = None;
        for scale in MERGE_SCALES {
            let groups = group_roots(&roots, (scale * rho).max(CLUSTER_TOL));
            if groups.len() == 1 {
                merged = Some(groups);
                break;
            }
            let mut verdict = Some(true);
            for (i, &(w, k)) in groups.iter().enumerate() {
                match self.winding(&Rect::around(w, 0.4 * group_gap(&groups, i, rho))) {
                    Ok(c) if c == k as usize => {}
                    Ok(_) => {
                        verdict = None;
                        break;
                    }
                    Err(_) => verdict = Some(false),
                }
            }
            match verdict {
                Some(true) => return self.polish_groups(&groups, rho, tol, cell),
                // a lone root carries no noise signature to judge it by
                Some(false) if groups.iter().all(|g| g.1 >= 2) => {
                    let ratio = separation_ratio(&roots, &groups, floor);
                    if best.as_ref().is_none_or(|b| ratio > b.0) {
                        best = Some((ratio, groups));
                    }
                }
                _ => {}
            }
        }
        // Groups too tight for |p| to clear rounding noise on their own
        // squares: take the partition whose groups sit farthest apart
        // compared with their own spread. A noise-split multiple root forms
        // a near-regular polygon and never separates this way.
        if let Some((ratio, groups)) = best {
            if ratio >= MIN_SEPARATION_RATIO {
                return self.polish_groups(&groups, rho, tol, cell);
            }
        }
        merged.and_then(|g| self.polish_groups(&g, rho, tol, cell))
    }

    fn polish_groups(&self, groups: &[(Complex64, u32)], rho: f64, tol: f64, cell: &Rect) -> Option<Vec<Zero>> {
        let mut out = Vec::with_capacity(groups.len());
        for (i, &(w, k)) in groups.iter().enumerate() {
            let location = self.polish_multiple(w, k, tol, 0.4 * group_gap(groups, i, rho));
            if !cell.inflate(CLUSTER_TOL).contains(location) {
                return None;
            }
            out.push(Zero { location, multiplicity: k, coarse: false });
        }
        Some(out)
    }

    /// Roots of the degree-`m` polynomial whose power sums are the contour
    /// moments `(1/2 pi i) int w^k p'/p dz`, `w = (z - c)/rho`.
    fn cluster_roots(&self, c: Complex64, rho: f64, m: usize) -> Option<Vec<Complex64>> {
        let square = Rect::around(c, rho);
        let f = |z: Complex64, out: &mut [Complex64]| {
            let ld = self.log_derivative(z);
            let w = (z - c) / rho;
            let mut acc = ld;
            for o in out.iter_mut() {
                acc *= w;
                *o = acc;
            }
        };
        let mut sums = vec![Complex64::new(0.0, 0.0); m];
        for (a, b) in square.edges() {
            let (q, error, converged) = integrate_segment_vec(&f, m, a, b, 8, MOMENT_TOL, MOMENT_PANEL_CAP);
            // rounding in p'/p puts a floor under the achievable error
            if !converged && error > MOMENT_FLOOR {
                return None;
            }
            for (s, v) in sums.iter_mut().zip(q) {
                *s += v;
            }
        }
        let sums: Vec<Complex64> = sums.into_iter().map(|s| s / Complex64::new(0.0, TAU)).collect();
        // Newton's identities: k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} s_i
        let mut e = vec![Complex64::new(1.0, 0.0)];
        for k in 1..=m {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 1..=k {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                acc += e[k - i] * sums[i - 1] * sign;
            }
            e.push(acc / k as f64);
        }
        // monic coefficients, highest degree first
        let coeffs: Vec<Complex64> =
            e.iter().enumerate().map(|(k, &v)| if k % 2 == 1 { -v } else { v }).collect();
        let roots = aberth(&coeffs)?;
        if roots.iter().any(|r| r.norm() > 1.5) {
            return None;
        }
        Some(roots.into_iter().map(|r| c + r * rho).collect())
    }

    fn locate(&self, cell: Rect, n: usize, tol: f64, depth: u32) -> Vec<Zero> {
        if n == 0 {
            return Vec::new();
        }
        let search = cell.inflate(0.05 * cell.diameter());
        let guess = self.newton(cell.center(), &search, tol).filter(|z| cell.contains(*z));
        // a cell holding several zeros is worth resolving directly only once
        // it is about as small as the tight squares
        let reach = TIGHT_RADII[TIGHT_RADII.len() - 1];
        let small = cell.diameter() < 4.0 * reach;
        if let Some(found) = guess.filter(|_| n == 1 || small).and_then(|z| self.isolate(z, n, tol, &cell, &TIGHT_RADII)) {
            return found;
        }
        // Newton can stall between the members of a tight cluster
        if n > 1 && cell.diameter() < reach {
            if let Some(found) = self.isolate(cell.center(), n, tol, &cell, &TIGHT_RADII) {
                return found;
            }
        }
        if cell.diameter() < CLUSTER_TOL || depth >= MAX_DEPTH {
            return self.last_resort(cell, n, tol, guess);
        }
        for frac in SPLIT_FRACTIONS {
            let (a, b) = cell.split(frac);
            // the shared edge cancels, so the second count follows from the first
            let Ok(na) = self.split_winding(&cell, &a) else {
                continue;
            };
            if na > n {
                continue;
            }
            let nb = n - na;
            let (mut left, right) =
                rayon::join(|| self.locate(a, na, tol, depth + 1), || self.locate(b, nb, tol, depth + 1));
            left.extend(right);
            return left;
        }
        self.last_resort(cell, n, tol, guess)
    }

    /// A cell that can be neither split nor resolved on the fixed squares:
    /// retry on squares matched to the cell, which keep out neighbours the
    /// fixed squares would take in.
    fn last_resort(&self, cell: Rect, n: usize, tol: f64, guess: Option<Complex64>) -> Vec<Zero> {
        let d = cell.diameter();
        if d < TIGHT_RADII[TIGHT_RADII.len() - 1] {
            let z = guess.unwrap_or_else(|| cell.center());
            if let Some(found) = self.isolate(z, n, tol, &cell, &[0.6 * d, d]) {
                return found;
            }
            // moments drown in rounding on squares this small; a cluster
            // that tight is reported as one zero at the root of p^{(n-1)}
            if n > 1 && self.winding(&Rect::around(z, 0.6 * d)).ok() == Some(n) {
                if let Some(w) = self.newton_on_derivative(z, n as u32, tol, 0.6 * d) {
                    return vec![Zero { location: w, multiplicity: n as u32, coarse: false }];
                }
            }
        }
        let coarse = guess.is_none() || d >= CLUSTER_TOL;
        vec![Zero { location: guess.unwrap_or_else(|| cell.center()), multiplicity: n as u32, coarse }]
    }
}

fn group_gap(groups: &[(Complex64, u32)], i: usize, rho: f64) -> f64 {
    let w = groups[i].0;
    groups.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| (g.0 - w).norm()).fold(2.0 * rho, f64::min)
}

/// Smallest distance between group centres over the largest distance of a
/// root from its nearest centre, the latter bounded below by `floor`.
fn separation_ratio(roots: &[Complex64], groups: &[(Complex64, u32)], floor: f64) -> f64 {
    let spread = roots
        .iter()
        .map(|r| groups.iter().map(|g| (g.0 - r).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[..i] {
            gap = gap.min((a.0 - b.0).norm());
        }
    }
    gap / spread.max(floor)
}

/// Single-linkage grouping; returns `(centroid, size)` pairs.
fn group_roots(roots: &[Complex64], dist: f64) -> Vec<(Complex64, u32)> {
    let mut label: Vec<usize> = (0..roots.len()).collect();
    for i in 0..roots.len() {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() <= dist {
                let (from, to) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, u32)> = Vec::new();
    for (r, l) in roots.iter().zip(&label) {
        match groups.iter_mut().find(|g| g.0 == *l) {
            Some(g) => {
                g.1 += r;
                g.2 += 1;
            }
            None => groups.push((*l, *r, 1)),
        }
    }
    groups.into_iter().map(|(_, sum, k)| (sum / k as f64, k)).collect()
}

/// Simultaneous Aberth iteration for the roots of a monic polynomial given
/// by its coefficients, highest degree first.
fn aberth(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let eval = |z: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in coeffs {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    };
    let mut z: Vec<Complex64> =
        (0..deg).map(|k| Complex64::from_polar(0.5, TAU * (k as f64 + 0.25) / deg as f64)).collect();
    for _ in 0..500 {
        let mut largest = 0.0f64;
        for i in 0..deg {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            largest = largest.max(step.norm());
        }
        if largest < 1e-15 {
            break;
        }
    }
    Some(z)
}

/// Number of zeros (with multiplicity) inside `r`.
pub fn count_zeros(p: &ExpPolynomial, r: &Rect) -> Result<usize> {
    let finder = ZeroFinder::new(p)?;
    finder.prepare(r).map(|(_, n)| n)
}

/// Locates every zero inside `r`, refining locations to `tol`.
pub fn find_zeros(p: &ExpPolynomial, r: &Rect, tol: f64) -> Result<ZeroReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let finder = ZeroFinder::new(p)?;
    let (rect, count) = finder.prepare(r)?;
    let mut zeros = finder.locate(rect, count, tol, 0);
    zeros.sort_by(|a, b| a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im)));
    let atoms = zeros
        .iter()
        .map(|z| Atom { location: z.location, mass: Complex64::new(z.multiplicity as f64, 0.0) })
        .collect();
    let measure = AtomicMeasure::from_atoms(atoms, CLUSTER_TOL);
    let max_residual = zeros.iter().map(|z| p.evaluate(z.location).norm()).fold(0.0, f64::max);
    let coarse_count = zeros.iter().filter(|z| z.coarse).count();
    Ok(ZeroReport { measure, zeros, rect, count, max_residual, coarse_count })
}
