//! Quadrature building blocks: Gauss-Legendre rules (nodes by Newton on the
//! Legendre recurrence), fixed panel sweeps, and a simple adaptive splitter
//! for complex-valued integrands on finite intervals.

use num_complex::Complex64;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct GlRule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl GlRule {
    pub fn new(n: usize) -> GlRule {
        assert!(n >= 2);
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess, then Newton
            let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_pair(n, t);
                let dt = p / d;
                t -= dt;
                if dt.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, t);
            x[i] = -t;
            x[n - 1 - i] = t;
            let wt = 2.0 / ((1.0 - t * t) * dp * dp);
            w[i] = wt;
            w[n - 1 - i] = wt;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }
        GlRule { x, w }
    }

    /// Integrate a complex integrand over [a, b].
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&xi, &wi) in self.x.iter().zip(&self.w) {
            acc += wi * f(c + h * xi);
        }
        acc * h
    }

    /// Integrate over consecutive panels given by `pts`.
    pub fn integrate_panels<F: FnMut(f64) -> Complex64>(
        &self,
        pts: &[f64],
        mut f: F,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for win in pts.windows(2) {
            acc += self.integrate(win[0], win[1], &mut f);
        }
        acc
    }
}

/// (P_n(t), P_n'(t)) by the three-term recurrence.
fn legendre_pair(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Adaptive bisection with an embedded GL(15)/two-half comparison.
///
/// `rel_tol` is measured against the running magnitude of the whole integral
/// plus `abs_floor`, so wildly oscillatory but cancelling pieces don't force
/// infinite refinement.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Complex64 {
    let rule = GlRule::new(15);
    let whole = rule.integrate(a, b, f);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, whole, 0u32)];
    while let Some((a, b, coarse, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, f);
        let right = rule.integrate(m, b, f);
        let fine = left + right;
        let scale = fine.norm().max(abs_floor);
        if (fine - coarse).norm() <= rel_tol * scale || depth >= 28 {
            acc += fine;
        } else {
            stack.push((a, m, left, depth + 1));
            stack.push((m, b, right, depth + 1));
        }
    }
    acc
}

/// Trapezoid sum over a uniform grid of `n+1` points (periodic-accuracy use
/// cases: entire integrands on symmetric contours).
pub fn trapezoid_uniform<F: FnMut(f64) -> Complex64>(
    a: f64,
    b: f64,
    n: usize,
    mut f: F,
) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..n {
        acc += f(a + h * i as f64);
    }
    acc * h
}
