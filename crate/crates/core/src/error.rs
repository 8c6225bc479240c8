use std::fmt;

use thiserror::Error;

/// Operator classes checked by [`crate::linops::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Unitary,
    Contraction,
    SelfAdjoint,
    Dissipative,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OperatorKind::Unitary => "unitary",
            OperatorKind::Contraction => "contraction",
            OperatorKind::SelfAdjoint => "self-adjoint",
            OperatorKind::Dissipative => "dissipative",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{kind} class violated: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    ClassViolation {
        kind: OperatorKind,
        defect: f64,
        tolerance: f64,
    },

    #[error("matrix is not normal: commutator defect {defect:.3e} exceeds {tolerance:.3e}")]
    NotNormal { defect: f64, tolerance: f64 },

    #[error(
        "eigenvalue cluster of diameter {diameter:.3e} exceeds cluster tolerance {cluster_tol:.3e}"
    )]
    ClusterAmbiguity { diameter: f64, cluster_tol: f64 },

    #[error("Schatten exponent must be >= 1 or infinite, got {0}")]
    InvalidP(f64),

    #[error("negative eigenvalue {value:.3e} below clamp tolerance {tolerance:.3e}")]
    NegativeEigenvalue { value: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator integral needs {terms:.3e} terms, above the limit {limit:.3e}")]
    TooManyTerms { terms: f64, limit: f64 },

    #[error("spectrum too clustered: separation {separation:.3e} below {required:.3e}")]
    SpectrumTooClustered { separation: f64, required: f64 },

    #[error("derivative order {order} exceeds the enumeration cap {max}")]
    PartitionOverflow { order: usize, max: usize },

    #[error("dilation depth {depth} is below the required {required}")]
    DepthTooSmall { depth: usize, required: usize },

    #[error("resolvent (L - iI) is singular")]
    SingularResolvent,

    #[error("1 is within {distance:.3e} of the spectrum (margin {margin:.3e})")]
    OnePointSpectrum { distance: f64, margin: f64 },

    #[error("factor {0} is singular")]
    SingularFactor(&'static str),

    #[error("theta quadrature gap does not decrease as delta shrinks: {gaps:?}")]
    QuadratureDivergence { gaps: Vec<f64> },

    #[error("function degree {degree} exceeds the probe range {probes}")]
    SupportExceedsProbes { degree: i32, probes: i32 },

    #[error("invalid configuration `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("spectral separation unreachable after {attempts} resamples")]
    SeparationUnreachable { attempts: usize },

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
