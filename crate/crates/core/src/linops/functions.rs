use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{identity, ComplexMatrix, ContractionOperator, SelfAdjointOperator, UnitaryOperator};
use crate::error::{Error, Result};
use crate::symbols::LaurentPolynomial;

/// `g(M)` for Hermitian `M` through its eigendecomposition.
pub fn hermitian_function(m: &ComplexMatrix, g: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut scaled = eig.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= g(eig.eigenvalues[j]);
    }
    scaled * eig.eigenvectors.adjoint()
}

/// `e^{isA}`.
pub fn matrix_exp_i(a: &SelfAdjointOperator, s: f64) -> UnitaryOperator {
    if s == 0.0 || a.matrix().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return UnitaryOperator::new(identity(a.dim()), 0.0).expect("identity is unitary");
    }
    let u = hermitian_function(a.matrix(), |x| Complex64::from_polar(1.0, s * x));
    // exact unitary up to roundoff of the eigensolver
    let defect = super::unitarity_defect(&u);
    UnitaryOperator::new(u, defect.max(1e-13)).expect("eigen exponential is unitary")
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Schatten exponent: `p ≥ 1` or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenP {
    Finite(f64),
    Infinity,
}

impl From<f64> for SchattenP {
    fn from(p: f64) -> Self {
        if p == f64::INFINITY {
            SchattenP::Infinity
        } else {
            SchattenP::Finite(p)
        }
    }
}

/// `ℓ_p` norm of the singular values.
pub fn schatten_norm(m: &ComplexMatrix, p: impl Into<SchattenP>) -> Result<f64> {
    let sv = singular_values(m);
    match p.into() {
        SchattenP::Infinity => Ok(sv.first().copied().unwrap_or(0.0)),
        SchattenP::Finite(p) if p.is_nan() || p < 1.0 => Err(Error::InvalidP(p)),
        SchattenP::Finite(p) => {
            let top = sv.first().copied().unwrap_or(0.0);
            if top == 0.0 {
                return Ok(0.0);
            }
            // scaled to avoid overflow for large p
            let sum: f64 = sv.iter().map(|s| (s / top).powf(p)).sum();
            Ok(top * sum.powf(1.0 / p))
        }
    }
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in `[-clamp, 0)` are treated as zero.
fn psd_sqrt(m: &ComplexMatrix, clamp: f64) -> Result<ComplexMatrix> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    if let Some(&worst) = eig.eigenvalues.iter().find(|&&x| x < -clamp) {
        return Err(Error::NegativeEigenvalue {
            value: worst,
            tolerance: clamp,
        });
    }
    let mut scaled = eig.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(eig.eigenvalues[j].max(0.0).sqrt(), 0.0);
    }
    Ok(scaled * eig.eigenvectors.adjoint())
}

/// Defect operators `D_T = (I − T*T)^{1/2}` and `D_{T*} = (I − TT*)^{1/2}`.
pub fn defect_pair(t: &ContractionOperator, clamp: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let m = t.matrix();
    let id = identity(t.dim());
    let dt = psd_sqrt(&(&id - m.adjoint() * m), clamp)?;
    let dts = psd_sqrt(&(&id - m * m.adjoint()), clamp)?;
    Ok((dt, dts))
}

/// `f(X) = Σ_{k≥0} f̂(k) X^k + Σ_{k≥1} f̂(−k) (X*)^k`.
///
/// For unitary `X` this is the ordinary functional calculus; for a
/// contraction it is the analytic/co-analytic split `f_+(X) + f_−(X)`.
pub fn laurent_apply(f: &LaurentPolynomial, x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.nrows();
    let mut out = ComplexMatrix::zeros(d, d);
    let top = f.coeffs().keys().next_back().copied().unwrap_or(0).max(0);
    let bottom = f.coeffs().keys().next().copied().unwrap_or(0).min(0);
    let mut power = identity(d);
    for k in 0..=top {
        let c = f.coeff(k);
        if c != Complex64::new(0.0, 0.0) {
            out += &power * c;
        }
        if k < top {
            power = &power * x;
        }
    }
    let xa = x.adjoint();
    let mut power = identity(d);
    for k in 1..=-bottom {
        power = &power * &xa;
        let c = f.coeff(-k);
        if c != Complex64::new(0.0, 0.0) {
            out += &power * c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c64, max_abs_diff, zeros};

    fn diag_real(values: &[f64]) -> ComplexMatrix {
        let mut m = zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c64(v, 0.0);
        }
        m
    }

    #[test]
    fn exponential_of_diagonal_generator() {
        let a = SelfAdjointOperator::new(diag_real(&[std::f64::consts::PI, 0.0]), 0.0).unwrap();
        let u = matrix_exp_i(&a, 1.0);
        assert!(max_abs_diff(u.matrix(), &diag_real(&[-1.0, 1.0])) < 1e-15);
        let u0 = matrix_exp_i(&a, 0.0);
        assert!(max_abs_diff(u0.matrix(), &identity(2)) < 1e-15);
    }

    #[test]
    fn schatten_norms_of_diagonal() {
        let m = diag_real(&[3.0, 4.0]);
        assert!((schatten_norm(&m, 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&m, 1.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((schatten_norm(&m, f64::INFINITY).unwrap() - 4.0).abs() < 1e-14);
        assert!(matches!(schatten_norm(&m, 0.5), Err(Error::InvalidP(_))));
        assert!(matches!(
            schatten_norm(&m, f64::NAN),
            Err(Error::InvalidP(_))
        ));
    }

    #[test]
    fn defects_of_zero_and_unitary() {
        let t = ContractionOperator::new(zeros(1), 0.0).unwrap();
        let (dt, dts) = defect_pair(&t, 1e-12).unwrap();
        assert!((dt[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((dts[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);

        let u = ContractionOperator::new(diag_real(&[1.0, -1.0]), 1e-12).unwrap();
        let (dt, dts) = defect_pair(&u, 1e-12).unwrap();
        assert!(max_abs_diff(&dt, &zeros(2)) < 1e-7);
        assert!(max_abs_diff(&dts, &zeros(2)) < 1e-7);
    }

    #[test]
    fn defects_of_nilpotent_shift() {
        // T*T = diag(0, 1), TT* = diag(1, 0)
        let mut t = zeros(2);
        t[(0, 1)] = c64(1.0, 0.0);
        let t = ContractionOperator::new(t, 1e-12).unwrap();
        let (dt, dts) = defect_pair(&t, 1e-12).unwrap();
        assert!(max_abs_diff(&dt, &diag_real(&[1.0, 0.0])) < 1e-14);
        assert!(max_abs_diff(&dts, &diag_real(&[0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn laurent_apply_on_shift() {
        // T = e_0 e_1*: T^2 = 0, (T*)^1 = e_1 e_0*
        let mut t = zeros(2);
        t[(0, 1)] = c64(1.0, 0.0);
        let f = LaurentPolynomial::from_coeffs([
            (0, c64(2.0, 0.0)),
            (1, c64(3.0, 0.0)),
            (2, c64(5.0, 0.0)),
            (-1, c64(0.0, 1.0)),
        ]);
        let mut expected = identity(2) * c64(2.0, 0.0);
        expected[(0, 1)] = c64(3.0, 0.0);
        expected[(1, 0)] = c64(0.0, 1.0);
        assert!(max_abs_diff(&laurent_apply(&f, &t), &expected) < 1e-15);
    }

    #[test]
    fn expansive_matrix_has_negative_defect() {
        let t = ContractionOperator::new(diag_real(&[1.5]), 1.0).unwrap();
        assert!(matches!(
            defect_pair(&t, 1e-10),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }
}
