//! Eigensystem of the Fourier-mode operator `nu d_y^2 - i k y` on the
//! half-line `y > 0` with a Dirichlet condition at the wall.
//!
//! With `kappa = (|k|/nu)^{1/3}` and `s = sgn k`, the eigenvalues are
//!
//! ```text
//! lambda_n = -nu k^2 + e^{i s pi/3} nu^{1/3} |k|^{2/3} xi_n ,
//! ```
//!
//! where `xi_n < 0` are the zeros of Ai, and the eigenfunctions are rotated,
//! shifted Airy functions `e_n(y) = C_n Ai(e^{i s pi/6} kappa y + xi_n)`.
//! The family is orthogonal under the *bilinear* pairing `(f,g) = int f g dy`
//! (no conjugation): the adjoint family is the pointwise conjugate
//! `conj(e_n)`, and `C_n^2 = kappa / A_n^2` with
//! `A_n^2 = int_0^inf Ai(e^{i s pi/6} u + xi_n)^2 du`, for which
//! `A_n^2 = e^{-i s pi/6} Ai'(xi_n)^2` in closed form (used as a test oracle;
//! the stored value comes from quadrature). The branch of `C_n` is fixed by
//! `arg C_n in (-pi/2, pi/2]`.

use crate::quad::integrate_adaptive;
use crate::specfun::{airy_ai, airy_zeros};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub nu: f64,
    pub k: f64,
    pub kappa: f64,
    /// Airy zeros xi_1..xi_{n_max} (negative, decreasing).
    pub xi: Vec<f64>,
    pub lambda: Vec<Complex64>,
    /// Normalization integrals A_n^2 (computed by quadrature).
    pub a2: Vec<Complex64>,
    /// Mode constants C_n.
    pub c: Vec<Complex64>,
}

impl EigenSystem {
    pub fn new(nu: f64, k: f64, n_max: usize) -> Result<EigenSystem> {
        if nu <= 0.0 || k == 0.0 || n_max == 0 {
            return Err(Error::InvalidInput(format!(
                "need nu > 0, k != 0, n_max >= 1 (got nu={nu}, k={k}, n_max={n_max})"
            )));
        }
        let s = k.signum();
        let kappa = (k.abs() / nu).powf(1.0 / 3.0);
        let xi = airy_zeros(n_max);
        let rot3 = Complex64::from_polar(1.0, s * PI / 3.0);
        let scale = nu.powf(1.0 / 3.0) * k.abs().powf(2.0 / 3.0);
        let lambda: Vec<_> = xi.iter().map(|&x| -nu * k * k + rot3 * scale * x).collect();
        let a2: Vec<_> = xi.iter().map(|&x| normalization_integral(s, x)).collect();
        let c: Vec<_> = a2
            .iter()
            .map(|&a| {
                let c2 = kappa / a;
                let mut r = c2.sqrt();
                if r.re < 0.0 || (r.re == 0.0 && r.im <= 0.0) {
                    r = -r;
                }
                r
            })
            .collect();
        Ok(EigenSystem { nu, k, kappa, xi, lambda, a2, c })
    }

    #[inline]
    fn rot(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.k.signum() * PI / 6.0)
    }

    /// e_n(y), 1-based n.
    pub fn eigenfunction(&self, n: usize, y: f64) -> Complex64 {
        let arg = self.rot() * (self.kappa * y) + self.xi[n - 1];
        self.c[n - 1] * airy_ai(arg)
    }

    /// Adjoint family member, the pointwise conjugate of `e_n`.
    pub fn adjoint(&self, n: usize, y: f64) -> Complex64 {
        self.eigenfunction(n, y).conj()
    }

    /// Wall-normal extent that safely contains mode `n`: the turning point
    /// plus a fixed margin, in physical `y` units.
    pub fn y_extent(&self, n: usize) -> f64 {
        (self.xi[n - 1].abs() + 14.0) / self.kappa
    }

    /// Coefficient functional `c_n(f) = C_n int_0^inf f(y) Ai(...) dy`
    /// (bilinear pairing against the unnormalized kernel).
    pub fn coefficient<F: Fn(f64) -> Complex64>(&self, n: usize, f: &F, y_max: f64) -> Complex64 {
        let rot = self.rot();
        let xi = self.xi[n - 1];
        let kap = self.kappa;
        let upper = y_max.max(self.y_extent(n));
        let v = integrate_adaptive(
            &|y: f64| f(y) * airy_ai(rot * (kap * y) + xi),
            0.0,
            upper,
            1e-12,
            1e-300,
        );
        self.c[n - 1] * v
    }

    /// Bilinear pairing of normalized modes, `int e_m e_n dy`; equals
    /// `delta_mn` in exact arithmetic.
    pub fn pairing(&self, m: usize, n: usize) -> Complex64 {
        let rot = self.rot();
        let (xm, xn) = (self.xi[m - 1], self.xi[n - 1]);
        let kap = self.kappa;
        let upper = self.y_extent(m.max(n));
        let v = integrate_adaptive(
            &|y: f64| {
                let a = airy_ai(rot * (kap * y) + xm);
                let b = airy_ai(rot * (kap * y) + xn);
                a * b
            },
            0.0,
            upper,
            1e-13,
            1e-300,
        );
        self.c[m - 1] * self.c[n - 1] * v
    }

    /// Earliest time at which the truncated eigen-expansion backend is
    /// trusted for this mode.
    pub fn t_min(&self) -> f64 {
        1e-3 * self.nu.powf(-1.0 / 3.0) * self.k.abs().powf(-2.0 / 3.0)
    }

    /// Number of modes needed so the discarded tail of `e^{lambda_n t}` is
    /// below `tol` relative to the leading mode, capped at the table size.
    pub fn modes_needed(&self, t: f64, tol: f64) -> usize {
        let lead = (self.lambda[0].re * t).exp();
        for n in 1..=self.xi.len() {
            let decay = (self.lambda[n - 1].re * t).exp();
            // C_n and the coefficient integrals grow only algebraically
            if decay < tol * lead {
                return n;
            }
        }
        self.xi.len()
    }

    /// Evolve initial data by the mode semigroup: sum over the first
    /// `n_modes` eigenmodes of `e^{lambda_n t} c_n(f0) e_n(y)`.
    pub fn evolve<F: Fn(f64) -> Complex64>(
        &self,
        f0: &F,
        y_data_max: f64,
        t: f64,
        ys: &[f64],
        n_modes: usize,
    ) -> Vec<Complex64> {
        let n_modes = n_modes.min(self.xi.len());
        let coefs: Vec<Complex64> = (1..=n_modes)
            .map(|n| self.coefficient(n, f0, y_data_max) * (self.lambda[n - 1] * t).exp())
            .collect();
        ys.iter()
            .map(|&y| {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 1..=n_modes {
                    acc += coefs[n - 1] * self.eigenfunction(n, y);
                }
                acc
            })
            .collect()
    }
}

/// `int_0^inf Ai(e^{i s pi/6} u + xi)^2 du` by adaptive quadrature.
fn normalization_integral(s: f64, xi: f64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, s * PI / 6.0);
    let upper = xi.abs() + 16.0;
    integrate_adaptive(
        &|u: f64| {
            let a = airy_ai(rot * u + xi);
            a * a
        },
        0.0,
        upper,
        1e-13,
        1e-300,
    )
}
