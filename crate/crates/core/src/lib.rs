//! Finite-dimensional laboratory for higher-order spectral shift trace
//! formulas on unitary, contractive, dissipative and self-adjoint matrices.
//!
//! Layers, bottom up:
//!
//! - [`linops`]: validated operator classes, spectral decompositions,
//!   Hermitian functional calculus, Schatten norms, defect operators.
//! - [`symbols`]: Laurent polynomials on the circle, divided differences,
//!   contour pairings, Poisson extensions.
//! - [`moi`]: multilinear operator integrals as joint eigenprojection sums.
//! - [`paths`]: multiplicative and linear paths, derivatives, Taylor
//!   remainders.
//! - [`dilation`]: truncated Schäffer dilation of a contraction.
//! - [`cayley`]: Cayley transforms and the real-line forms.
//! - [`ssf`]: spectral shift extraction, prediction and verification.
//! - [`ensemble`] and [`runner`]: reproducible random instances and batch runs.

pub mod cayley;
pub mod config;
pub mod dilation;
pub mod ensemble;
pub mod error;
pub mod linops;
pub mod moi;
pub mod paths;
pub mod quadrature;
pub mod runner;
pub mod ssf;
pub mod symbols;

pub use config::{Limits, Settings, Tolerances};
pub use error::{Error, OperatorKind, Result};
pub use linops::ComplexMatrix;
pub use symbols::LaurentPolynomial;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
