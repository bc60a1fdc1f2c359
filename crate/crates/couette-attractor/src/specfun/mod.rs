//! Special functions: complex Airy Ai/Ai' and zeros, Gamma, and Laplace
//! transforms of the cubic-damped power profiles `H_kappa`.

pub mod airy;
pub mod gamma;
pub mod laplace;

pub use airy::{airy_ai, airy_ai_pair, airy_aip, airy_zero, airy_zeros};
pub use gamma::gamma;
pub use laplace::{h_kappa, laplace_h, laplace_h_asymptotic, laplace_h_quadrature, LaplaceMethod};
