//! Spectral and semigroup analysis of the complex Airy operator on a
//! half-line, and the self-similar evolution of a vorticity layer sheared
//! against a wall.
//!
//! The library is organized bottom-up:
//!
//! * [`specfun`] — complex Airy functions, their zeros, the Gamma function,
//!   and Laplace transforms of the profiles `H_kappa(t) = t^kappa e^{-t^3/12}`;
//! * [`spectral`] — eigenvalues/eigenfunctions of the mode operator
//!   `-d_y^2 + i k y` with Dirichlet boundary, and expansions in them;
//! * [`resolvent`] — oscillatory Airy-kernel identities, the explicit
//!   solution of the mode evolution split into wall and interior parts, and
//!   contour-deformed evaluation of the wall terms;
//! * [`kernel`] — construction of the universal attractor profile from a
//!   weakly singular Volterra equation in Fourier variables;
//! * [`selfsim`] — finite-difference/spectral solver for the nonlinear
//!   self-similar vorticity equation on a half-plane, with diagnostics;
//! * [`cli`] — the `couette` command-line tool built on all of the above.
//!
//! Everything numerical is deterministic: randomized checks take explicit
//! seeds, quadratures have fixed node layouts, and CSV output is written
//! with 17 significant digits.

pub mod cli;
pub mod dd;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod quad;
pub mod resolvent;
pub mod selfsim;
pub mod specfun;
pub mod spectral;
pub mod verify;

pub use num_complex::Complex64;

/// Errors surfaced by library entry points.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerics: {0}")]
    Numerics(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Relative difference `|a-b| / max(|b|, floor)`, used throughout the tests.
pub fn rel_err(a: Complex64, b: Complex64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}
