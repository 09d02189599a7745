//! Spectral toolkit for minimal cones and their Jacobi fields.
//!
//! * [`cone_spectrum`]: eigen-levels of the Jacobi operator on the cross-section
//!   of the cones over `S^p x S^q`, characteristic exponents, stability checks.
//! * [`beta_poly`]: exact beta-harmonic polynomials, the beta-Laplacian and the
//!   weighted half-sphere inner product.
//! * [`beta_solver`]: the weighted Dirichlet problem on the half-ball, mode
//!   expansion and reconstruction.
//! * [`cylinder_modes`]: Jacobi fields on `C_0 x R^ell` built from modes.
//! * [`growth`]: frequency profiles, log-convexity and the doubling dichotomy.
//! * [`cli`]: batch front-end used by the `jacobi-cone` binary.

pub mod beta_poly;
pub mod beta_solver;
pub mod cli;
pub mod cone_spectrum;
pub mod cylinder_modes;
pub mod error;
pub mod growth;
pub mod poly;
pub mod quadrature;

pub use error::{Error, Result};
