//! Laplace transforms of `H_kappa(t) = t^kappa e^{-t^3/12}`.
//!
//! `laplace_h_quadrature` integrates along the rotated ray
//! `t = e^{i theta} u^2`, `theta = clamp(-arg(lambda)/2, +-25 deg)`, so that
//! both exponent terms decay (`cos 3theta >= cos 75 deg` keeps the cubic
//! term dissipative, the clamp keeps `Re(lambda e^{i theta}) > 0`). The
//! remaining oscillation is finite; Gauss-Legendre panels are laid out
//! equidistributed in residual phase. Valid for `|arg lambda|` up to
//! `pi/2 + 25 deg`, which covers every contour used elsewhere in the crate.
//!
//! `laplace_h_asymptotic` evaluates the large-`lambda` expansion
//! `sum_m ((-1)^m / (12^m m!)) Gamma(kappa+3m+1) lambda^{-kappa-3m-1}`,
//! whose remainder after `n+1` terms is `O(|lambda|^{-kappa-3n-4})` in any
//! sector `|arg lambda| <= 2pi/3 - delta`.

use crate::quad::GlRule;
use crate::specfun::gamma::gamma;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Ray-clamp angle (radians): 25 degrees.
const CLAMP: f64 = 25.0 * PI / 180.0;

/// The profile itself, `t^kappa e^{-t^3/12}` for `t > 0`.
pub fn h_kappa(kappa: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    t.powf(kappa) * (-t * t * t / 12.0).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LaplaceMethod {
    Quadrature,
    /// Partial sum with terms m = 0..=n_terms.
    Asymptotic { n_terms: usize },
}

/// Dispatch on method.
pub fn laplace_h(kappa: f64, lam: Complex64, method: LaplaceMethod) -> Result<Complex64> {
    match method {
        LaplaceMethod::Quadrature => laplace_h_quadrature(kappa, lam),
        LaplaceMethod::Asymptotic { n_terms } => Ok(laplace_h_asymptotic(kappa, lam, n_terms)),
    }
}

/// Rotated-ray quadrature; requires `kappa > -1` and
/// `|arg lambda| < pi/2 + 25 deg`.
pub fn laplace_h_quadrature(kappa: f64, lam: Complex64) -> Result<Complex64> {
    if kappa <= -1.0 {
        return Err(Error::InvalidInput(format!(
            "kappa must exceed -1, got {kappa}"
        )));
    }
    let phi = if lam.norm() == 0.0 { 0.0 } else { lam.arg() };
    if phi.abs() >= PI / 2.0 + CLAMP - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "arg(lambda) = {phi:.6} outside the quadrature sector (|arg| < {:.6})",
            PI / 2.0 + CLAMP
        )));
    }
    let theta = (-phi / 2.0).clamp(-CLAMP, CLAMP);
    let w = Complex64::from_polar(1.0, theta);
    let w3 = Complex64::from_polar(1.0, 3.0 * theta);
    let a3 = (3.0 * theta).cos() / 12.0;
    let p3 = (3.0 * theta).sin().abs() / 12.0;
    let lw = lam * w;
    let a1 = lw.re;
    let p1 = lw.im.abs();
    debug_assert!(a3 > 0.0 && a1 >= 0.0);

    // truncation window: a3 u^6 + a1 u^2 = 48
    let mut hi = 1.0_f64;
    while a3 * hi.powi(6) + a1 * hi * hi < 48.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0_f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if a3 * mid.powi(6) + a1 * mid * mid < 48.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let umax = hi;

    // panel density: ~2.5 rad of residual phase or 1/12 of the window per
    // panel, whichever is finer (the second term prevents a single panel
    // from covering the whole window when lambda is real and phase == 0)
    let cost = |u: f64| (p3 * u.powi(6) + p1 * u * u) / 2.5 + 12.0 * u / umax;
    let total = cost(umax);
    let npieces = total.ceil() as usize;
    let mut pts = Vec::with_capacity(npieces + 1);
    pts.push(0.0);
    for j in 1..npieces {
        let target = total * j as f64 / npieces as f64;
        let (mut l, mut h) = (0.0, umax);
        for _ in 0..60 {
            let m = 0.5 * (l + h);
            if cost(m) < target {
                l = m;
            } else {
                h = m;
            }
        }
        pts.push(h);
    }
    pts.push(umax);

    // integrand 2 w^{kappa+1} u^{2 kappa + 1} exp(-w^3 u^6/12 - lam w u^2)
    let wk = Complex64::from_polar(1.0, theta * (kappa + 1.0));
    let rule = GlRule::new(16);
    let val = rule.integrate_panels(&pts, |u| {
        let u2 = u * u;
        let expo = -w3 * (u2 * u2 * u2) / 12.0 - lw * u2;
        2.0 * u.powf(2.0 * kappa + 1.0) * expo.exp()
    });
    Ok(wk * val)
}

/// Partial sum of the large-`lambda` expansion, terms `m = 0..=n_terms`.
pub fn laplace_h_asymptotic(kappa: f64, lam: Complex64, n_terms: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut fact = 1.0;
    for m in 0..=n_terms {
        if m > 0 {
            fact *= -12.0 * m as f64;
        }
        let g = gamma(Complex64::new(kappa + 3.0 * m as f64 + 1.0, 0.0)).re;
        acc += g / fact * lam.powf(-(kappa + 3.0 * m as f64 + 1.0));
    }
    acc
}
