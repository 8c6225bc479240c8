//! Dense complex operator algebra.
//!
//! All operators are square [`ComplexMatrix`] values. The typed wrappers
//! ([`UnitaryOperator`], [`ContractionOperator`], [`SelfAdjointOperator`])
//! can only be built through validation, so holding one is proof that the
//! class invariant held at the recorded tolerance.

mod functions;
mod io;
mod spectral;

pub use functions::{
    defect_pair, hermitian_function, laurent_apply, matrix_exp_i, operator_norm, schatten_norm,
    singular_values, SchattenP,
};
pub use io::MatrixFile;
pub use spectral::{hermitian_decompose, spectral_decompose, SpectralDecomposition};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, OperatorKind, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(dim, dim)
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `[A, B] = AB - BA` in max-norm.
pub fn commutator_defect(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    max_abs_diff(&(a * b), &(b * a))
}

pub fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    for (col, column) in m.column_iter().enumerate() {
        for (row, z) in column.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(m.nrows())
}

pub(crate) fn check_same_dim(dim: usize, m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `max(‖M*M − I‖_max, ‖MM* − I‖_max)`.
pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    let id = identity(m.nrows());
    let a = m.adjoint();
    max_abs_diff(&(&a * m), &id).max(max_abs_diff(&(m * &a), &id))
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

macro_rules! typed_operator {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            matrix: ComplexMatrix,
            tolerance: f64,
        }

        impl $name {
            pub fn matrix(&self) -> &ComplexMatrix {
                &self.matrix
            }

            pub fn tolerance(&self) -> f64 {
                self.tolerance
            }

            pub fn dim(&self) -> usize {
                self.matrix.nrows()
            }

            pub fn into_matrix(self) -> ComplexMatrix {
                self.matrix
            }
        }

        impl AsRef<ComplexMatrix> for $name {
            fn as_ref(&self) -> &ComplexMatrix {
                &self.matrix
            }
        }
    };
}

typed_operator!(
    /// `‖U*U − I‖_max ≤ tol` and `‖UU* − I‖_max ≤ tol`.
    UnitaryOperator
);
typed_operator!(
    /// Largest singular value at most `1 + tol`.
    ContractionOperator
);
typed_operator!(
    /// `‖M − M*‖_max ≤ tol`.
    SelfAdjointOperator
);

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        check_square(&matrix)?;
        let defect = unitarity_defect(&matrix);
        if defect > tolerance {
            return Err(Error::ClassViolation {
                kind: OperatorKind::Unitary,
                defect,
                tolerance,
            });
        }
        Ok(Self { matrix, tolerance })
    }

    /// Every unitary is a contraction.
    pub fn as_contraction(&self) -> ContractionOperator {
        ContractionOperator {
            matrix: self.matrix.clone(),
            tolerance: self.tolerance,
        }
    }
}

impl ContractionOperator {
    pub fn new(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        check_square(&matrix)?;
        let defect = operator_norm(&matrix) - 1.0;
        if defect > tolerance {
            return Err(Error::ClassViolation {
                kind: OperatorKind::Contraction,
                defect,
                tolerance,
            });
        }
        Ok(Self { matrix, tolerance })
    }
}

impl SelfAdjointOperator {
    pub fn new(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        check_square(&matrix)?;
        let defect = hermiticity_defect(&matrix);
        if defect > tolerance {
            return Err(Error::ClassViolation {
                kind: OperatorKind::SelfAdjoint,
                defect,
                tolerance,
            });
        }
        Ok(Self { matrix, tolerance })
    }

    /// Zero operator of the given dimension.
    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: zeros(dim),
            tolerance: 0.0,
        }
    }
}

/// Result of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum TypedOperator {
    Unitary(UnitaryOperator),
    Contraction(ContractionOperator),
    SelfAdjoint(SelfAdjointOperator),
    Dissipative(crate::cayley::DissipativeOperator),
}

/// Wraps `m` in the typed operator for `kind` if its class invariant holds
/// at `tol`.
pub fn validate(m: ComplexMatrix, kind: OperatorKind, tol: f64) -> Result<TypedOperator> {
    match kind {
        OperatorKind::Unitary => UnitaryOperator::new(m, tol).map(TypedOperator::Unitary),
        OperatorKind::Contraction => {
            ContractionOperator::new(m, tol).map(TypedOperator::Contraction)
        }
        OperatorKind::SelfAdjoint => {
            SelfAdjointOperator::new(m, tol).map(TypedOperator::SelfAdjoint)
        }
        OperatorKind::Dissipative => {
            crate::cayley::DissipativeOperator::new(m, tol).map(TypedOperator::Dissipative)
        }
    }
}
