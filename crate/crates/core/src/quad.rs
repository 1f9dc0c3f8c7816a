//! Adaptive composite Gauss–Legendre quadrature along straight segments of
//! the complex plane.

use num_complex::Complex64;
use once_cell::sync::Lazy;

/// Order of the per-panel Gauss–Legendre rule.
pub const GL_ORDER: usize = 15;

const MAX_DEPTH: u32 = 48;
const MAX_PANELS: usize = 200_000;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static RULE: Lazy<Rule> = Lazy::new(|| {
    let (nodes, weights) = gauss_legendre(GL_ORDER);
    Rule { nodes, weights }
});

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl Rule {
    fn apply<F>(&self, f: &F, a: Complex64, b: Complex64) -> Complex64
    where
        F: Fn(Complex64) -> Complex64,
    {
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * *x) * *w;
        }
        acc * half
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    /// Sum of local |coarse - refined| differences over accepted panels.
    pub error_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl Rule {
    fn apply_vec<F>(&self, f: &F, a: Complex64, b: Complex64, out: &mut [Complex64], tmp: &mut [Complex64])
    where
        F: Fn(Complex64, &mut [Complex64]),
    {
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            f(mid + half * *x, tmp);
            for (o, t) in out.iter_mut().zip(tmp.iter()) {
                *o += *t * *w;
            }
        }
        out.iter_mut().for_each(|v| *v *= half);
    }
}

/// Adaptive integration of a vector of `dim` integrands sharing their
/// evaluation points. `f(z, out)` fills all components at `z`; a panel is
/// accepted once every component meets its share of `abs_tol`. The error
/// estimate is the largest per-component sum.
pub fn integrate_segment_vec<F>(
    f: &F,
    dim: usize,
    a: Complex64,
    b: Complex64,
    initial_panels: usize,
    abs_tol: f64,
    max_panels: usize,
) -> (Vec<Complex64>, f64, bool)
where
    F: Fn(Complex64, &mut [Complex64]),
{
    let rule = Lazy::force(&RULE);
    let zero = Complex64::new(0.0, 0.0);
    let total_len = (b - a).norm();
    let mut value = vec![zero; dim];
    let mut error = vec![0.0; dim];
    let mut converged = true;
    if total_len == 0.0 || dim == 0 {
        return (value, 0.0, converged);
    }
    let n0 = initial_panels.max(1);
    let mut tmp = vec![zero; dim];
    let mut panels = 0usize;
    let mut stack: Vec<(Complex64, Complex64, Vec<Complex64>, u32)> = Vec::new();
    for k in (0..n0).rev() {
        let s = a + (b - a) * (k as f64 / n0 as f64);
        let e = a + (b - a) * ((k + 1) as f64 / n0 as f64);
        let mut est = vec![zero; dim];
        rule.apply_vec(f, s, e, &mut est, &mut tmp);
        panels += 1;
        stack.push((s, e, est, 0));
    }
    while let Some((s, e, coarse, depth)) = stack.pop() {
        let m = (s + e) * 0.5;
        let mut left = vec![zero; dim];
        let mut right = vec![zero; dim];
        rule.apply_vec(f, s, m, &mut left, &mut tmp);
        rule.apply_vec(f, m, e, &mut right, &mut tmp);
        panels += 2;
        let share = abs_tol * (e - s).norm() / total_len;
        let mut ok = true;
        let mut finite = true;
        for i in 0..dim {
            let fine = left[i] + right[i];
            finite &= fine.re.is_finite() && fine.im.is_finite();
            ok &= (fine - coarse[i]).norm() <= share.max(4.0 * f64::EPSILON * fine.norm());
        }
        if !finite {
            return (value, f64::INFINITY, false);
        }
        if ok || depth >= MAX_DEPTH || panels > max_panels {
            converged &= ok;
            for i in 0..dim {
                let fine = left[i] + right[i];
                value[i] += fine;
                error[i] += (fine - coarse[i]).norm();
            }
        } else {
            stack.push((m, e, right, depth + 1));
            stack.push((s, m, left, depth + 1));
        }
    }
    (value, error.into_iter().fold(0.0, f64::max), converged)
}

/// Integrates `f(z) dz` along the segment `a -> b`.
///
/// The segment is first cut into `initial_panels` equal panels; each panel is
/// bisected until the 15-point rule on the panel agrees with the sum over its
/// halves to within the panel's share of `abs_tol`.
pub fn integrate_segment<F>(
    f: &F,
    a: Complex64,
    b: Complex64,
    initial_panels: usize,
    abs_tol: f64,
) -> QuadResult
where
    F: Fn(Complex64) -> Complex64,
{
    integrate_segment_capped(f, a, b, initial_panels, abs_tol, MAX_PANELS)
}

/// [`integrate_segment`] with at most about `max_panels` panel evaluations.
pub fn integrate_segment_capped<F>(
    f: &F,
    a: Complex64,
    b: Complex64,
    initial_panels: usize,
    abs_tol: f64,
    max_panels: usize,
) -> QuadResult
where
    F: Fn(Complex64) -> Complex64,
{
    let rule = Lazy::force(&RULE);
    let total_len = (b - a).norm();
    let n0 = initial_panels.max(1);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut converged = true;
    let mut evaluations = 0usize;
    if total_len == 0.0 {
        return QuadResult { value, error_estimate: 0.0, converged, evaluations };
    }

    // (start, end, coarse estimate, depth)
    let mut stack: Vec<(Complex64, Complex64, Complex64, u32)> = Vec::new();
    for k in (0..n0).rev() {
        let s = a + (b - a) * (k as f64 / n0 as f64);
        let e = a + (b - a) * ((k + 1) as f64 / n0 as f64);
        let est = rule.apply(f, s, e);
        evaluations += GL_ORDER;
        stack.push((s, e, est, 0));
    }

    while let Some((s, e, coarse, depth)) = stack.pop() {
        let m = (s + e) * 0.5;
        let left = rule.apply(f, s, m);
        let right = rule.apply(f, m, e);
        evaluations += 2 * GL_ORDER;
        let fine = left + right;
        let diff = (fine - coarse).norm();
        let share = abs_tol * (e - s).norm() / total_len;
        let ok = diff <= share.max(4.0 * f64::EPSILON * fine.norm());
        if !fine.re.is_finite() || !fine.im.is_finite() {
            converged = false;
            value += fine;
            error = f64::INFINITY;
            continue;
        }
        if ok || depth >= MAX_DEPTH || evaluations > max_panels * GL_ORDER {
            if !ok {
                converged = false;
            }
            value += fine;
            error += diff;
        } else {
            stack.push((m, e, right, depth + 1));
            stack.push((s, m, left, depth + 1));
        }
    }

    QuadResult { value, error_estimate: error, converged, evaluations }
}

/// Real-line convenience wrapper around [`integrate_segment`].
pub fn integrate_real<F>(f: &F, a: f64, b: f64, initial_panels: usize, abs_tol: f64) -> QuadResult
where
    F: Fn(f64) -> Complex64,
{
    let g = |z: Complex64| f(z.re);
    integrate_segment(&g, Complex64::new(a, 0.0), Complex64::new(b, 0.0), initial_panels, abs_tol)
}
