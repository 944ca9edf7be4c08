//! Numerical toolkit for ζ on the critical line: evaluation, zeros, S(t),
//! Selberg's approximation, discrete and weighted moments, and the weighted
//! Dirichlet-polynomial mean value.

pub mod acceptance;
pub mod argument;
mod dd;
pub mod dirichlet_mean;
pub mod error;
pub mod quadrature;
pub mod selberg;
pub mod special;
pub mod sums_integrals;
pub mod summation;
pub mod zeros;
pub mod zeta_engine;

pub use error::{Error, Result};
