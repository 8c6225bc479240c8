//! Numerical tolerances and work limits.
//!
//! Every threshold used by the library lives in [`Tolerances`] or
//! [`Limits`]; operations take them explicitly.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max-norm defect allowed when validating operator classes.
    pub class: f64,
    /// Eigenvalues closer than this are merged into one projection.
    pub cluster: f64,
    /// Commutator defect allowed for normal matrices.
    pub normality: f64,
    /// Negative eigenvalues above `-sqrt_clamp` are clamped to zero in
    /// positive square roots.
    pub sqrt_clamp: f64,
    /// Minimum distance between 1 and the spectrum of a contraction before
    /// the inverse Cayley transform is attempted.
    pub eigenvalue_margin: f64,
    /// Pairwise spectral separation required of generated instances.
    pub separation: f64,
    /// Allowed deviation of divided-difference nodes from the unit circle.
    pub unimodular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            class: 1e-10,
            cluster: 1e-8,
            normality: 1e-9,
            sqrt_clamp: 1e-10,
            eigenvalue_margin: 1e-8,
            separation: 1e-6,
            unimodular: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest number of joint spectral tuples an operator integral may sum.
    pub max_moi_terms: f64,
    /// Largest derivative order for composition enumeration.
    pub max_derivative_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_moi_terms: 1e8,
            max_derivative_order: 8,
        }
    }
}

/// Tolerances and limits travelling together through the numerical layers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub tol: Tolerances,
    pub limits: Limits,
}
