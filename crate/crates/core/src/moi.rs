//! Multilinear operator integrals in finite dimensions.
//!
//! With spectral resolutions `U_i = Σ_j λ_{i,j} P_{i,j}` the integral
//!
//! ```text
//! T_φ^{U_0,…,U_k}(V_1,…,V_k) = Σ φ(λ_{0,j_0},…,λ_{k,j_k}) P_{0,j_0} V_1 P_{1,j_1} ⋯ V_k P_{k,j_k}
//! ```
//!
//! is a finite sum. It is evaluated in the eigenbases: with
//! `Ṽ_i = Q_{i−1}* V_i Q_i` the core is
//! `T̃[a_0, a_k] = Σ φ(λ_{a_0},…,λ_{a_k}) Ṽ_1[a_0,a_1] ⋯ Ṽ_k[a_{k−1},a_k]`
//! and `T = Q_0 T̃ Q_k*`. Rows `a_0` are distributed over the rayon pool;
//! each row is accumulated sequentially in lexicographic tuple order, so the
//! result does not depend on the number of workers.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Limits, Settings};
use crate::error::{Error, Result};
use crate::linops::{
    check_same_dim, max_abs_diff, operator_norm, spectral_decompose, trace, ComplexMatrix,
    SpectralDecomposition, UnitaryOperator,
};
use crate::symbols::LaurentPolynomial;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Scalar symbol of `arity` complex variables.
pub trait MoiSymbol: Sync {
    fn arity(&self) -> usize;
    fn eval(&self, points: &[Complex64]) -> Complex64;
}

/// `f^{[order]}` of a Laurent polynomial, through the closed forms.
#[derive(Debug, Clone, Copy)]
pub struct DividedDifference<'a> {
    pub f: &'a LaurentPolynomial,
    pub order: usize,
}

impl MoiSymbol for DividedDifference<'_> {
    fn arity(&self) -> usize {
        self.order + 1
    }

    fn eval(&self, points: &[Complex64]) -> Complex64 {
        self.f.divided_difference(points)
    }
}

/// `f^{[n]}(z_0,…,z_{n−1},z_0)`, the symbol left after cycling the last
/// perturbation out of a trace.
#[derive(Debug, Clone, Copy)]
pub struct CyclicDividedDifference<'a> {
    pub f: &'a LaurentPolynomial,
    pub order: usize,
}

impl MoiSymbol for CyclicDividedDifference<'_> {
    fn arity(&self) -> usize {
        self.order
    }

    fn eval(&self, points: &[Complex64]) -> Complex64 {
        let mut closed = Vec::with_capacity(points.len() + 1);
        closed.extend_from_slice(points);
        closed.push(points[0]);
        self.f.divided_difference(&closed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantSymbol {
    pub arity: usize,
    pub value: Complex64,
}

impl MoiSymbol for ConstantSymbol {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, _: &[Complex64]) -> Complex64 {
        self.value
    }
}

/// Arbitrary closure as a symbol.
pub struct FnSymbol<F> {
    pub arity: usize,
    pub f: F,
}

impl<F: Fn(&[Complex64]) -> Complex64 + Sync> MoiSymbol for FnSymbol<F> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, points: &[Complex64]) -> Complex64 {
        (self.f)(points)
    }
}

#[derive(Debug, Clone)]
pub struct MoiResult {
    pub matrix: ComplexMatrix,
    /// Joint spectral tuples: product of the numbers of distinct eigenvalues.
    pub term_count: u64,
    /// `sup |φ| · Π ‖V_i‖` over the evaluated tuples. Diagnostic only.
    pub bound_report: f64,
}

/// Evaluates `T_φ^{U_0,…,U_k}(V_1,…,V_k)` for `k = vs.len()`.
///
/// `k = 0` is the functional calculus `Σ φ(λ_j) P_j`.
pub fn moi_apply(
    symbol: &dyn MoiSymbol,
    decomps: &[&SpectralDecomposition],
    vs: &[&ComplexMatrix],
    limits: &Limits,
) -> Result<MoiResult> {
    let k = vs.len();
    if decomps.len() != k + 1 || symbol.arity() != k + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} perturbations need {} decompositions and arity {}, got {} and {}",
            k,
            k + 1,
            k + 1,
            decomps.len(),
            symbol.arity()
        )));
    }
    let d = decomps[0].dim();
    for sd in decomps {
        if sd.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "decomposition of dimension {} next to {d}",
                sd.dim()
            )));
        }
    }
    for v in vs {
        check_same_dim(d, v, "perturbation")?;
    }

    let term_count: f64 = decomps
        .iter()
        .map(|sd| sd.eigenvalues().len() as f64)
        .product();
    // the sum runs over basis tuples, which can exceed the spectral tuples
    let work = (d as f64).powi(k as i32 + 1);
    if term_count.max(work) > limits.max_moi_terms {
        return Err(Error::TooManyTerms {
            terms: term_count.max(work),
            limit: limits.max_moi_terms,
        });
    }

    let tilde: Vec<ComplexMatrix> = (0..k)
        .map(|i| decomps[i].basis().adjoint() * vs[i] * decomps[i + 1].basis())
        .collect();
    let lambdas: Vec<Vec<Complex64>> = decomps.iter().map(|sd| sd.column_eigenvalues()).collect();

    let rows: Vec<(Vec<Complex64>, f64)> = (0..d)
        .into_par_iter()
        .map(|a0| {
            let mut row = vec![ZERO; d];
            let mut points = vec![ZERO; k + 1];
            points[0] = lambdas[0][a0];
            let mut sup = 0.0_f64;
            if k == 0 {
                let phi = symbol.eval(&points);
                sup = phi.norm();
                row[a0] = phi;
            } else {
                let mut walk = Walk {
                    symbol,
                    tilde: &tilde,
                    lambdas: &lambdas,
                    points: &mut points,
                    row: &mut row,
                    sup: &mut sup,
                };
                walk.descend(1, a0, Complex64::new(1.0, 0.0));
            }
            (row, sup)
        })
        .collect();

    let mut core = ComplexMatrix::zeros(d, d);
    let mut sup = 0.0_f64;
    for (a0, (row, s)) in rows.into_iter().enumerate() {
        sup = sup.max(s);
        for (j, z) in row.into_iter().enumerate() {
            core[(a0, j)] = z;
        }
    }
    let matrix = decomps[0].basis() * core * decomps[k].basis().adjoint();
    let bound_report = sup * vs.iter().map(|v| operator_norm(v)).product::<f64>();
    Ok(MoiResult {
        matrix,
        term_count: term_count as u64,
        bound_report,
    })
}

struct Walk<'a> {
    symbol: &'a dyn MoiSymbol,
    tilde: &'a [ComplexMatrix],
    lambdas: &'a [Vec<Complex64>],
    points: &'a mut Vec<Complex64>,
    row: &'a mut Vec<Complex64>,
    sup: &'a mut f64,
}

impl Walk<'_> {
    fn descend(&mut self, level: usize, prev: usize, weight: Complex64) {
        let k = self.tilde.len();
        let v = &self.tilde[level - 1];
        for a in 0..v.ncols() {
            let w = weight * v[(prev, a)];
            if w == ZERO {
                continue;
            }
            self.points[level] = self.lambdas[level][a];
            if level == k {
                let phi = self.symbol.eval(self.points);
                *self.sup = self.sup.max(phi.norm());
                self.row[a] += phi * w;
            } else {
                self.descend(level + 1, a, w);
            }
        }
    }
}

/// `T_{f^{[order]}}` over the given decompositions.
pub fn moi_divided_difference(
    f: &LaurentPolynomial,
    decomps: &[&SpectralDecomposition],
    vs: &[&ComplexMatrix],
    limits: &Limits,
) -> Result<ComplexMatrix> {
    let symbol = DividedDifference { f, order: vs.len() };
    Ok(moi_apply(&symbol, decomps, vs, limits)?.matrix)
}

/// Decomposition pattern `(U_0, second, U_0, …, U_0)` of length `len`.
fn pattern<'a>(
    len: usize,
    first: &'a SpectralDecomposition,
    second: &'a SpectralDecomposition,
) -> Vec<&'a SpectralDecomposition> {
    (0..len)
        .map(|i| if i == 1 && i + 1 < len { second } else { first })
        .collect()
}

/// Both sides of the trace reduction
/// `Tr T_{f^{[n]}}^{U_0,U_1,U_0,…,U_0}(V_1,…,V_n) = Tr(T_{f̃}^{U_0,U_1,U_0,…}(V_1,…,V_{n−1}) V_n)`
/// with `f̃(z_0,…,z_{n−1}) = f^{[n]}(z_0,…,z_{n−1},z_0)`.
///
/// For `n = 1` the pattern is `(U_0, U_0)` and the right side is
/// `Tr(f′(U_0) V_1)`.
pub fn trace_reduce(
    f: &LaurentPolynomial,
    u0: &UnitaryOperator,
    u1: &UnitaryOperator,
    vs: &[&ComplexMatrix],
    settings: &Settings,
) -> Result<(Complex64, Complex64)> {
    let n = vs.len();
    if n == 0 {
        return Err(Error::DimensionMismatch(
            "trace reduction needs n >= 1".into(),
        ));
    }
    check_same_dim(u0.dim(), u1.matrix(), "U_1")?;
    let sd0 = spectral_decompose(u0.matrix(), &settings.tol)?;
    let sd1 = spectral_decompose(u1.matrix(), &settings.tol)?;

    let full = pattern(n + 1, &sd0, &sd1);
    let lhs = trace(&moi_divided_difference(f, &full, vs, &settings.limits)?);

    let reduced = &full[..n];
    let symbol = CyclicDividedDifference { f, order: n };
    let inner = moi_apply(&symbol, reduced, &vs[..n - 1], &settings.limits)?.matrix;
    let rhs = trace(&(inner * vs[n - 1]));
    Ok((lhs, rhs))
}

/// Residual of `f(U_1) − f(U_0) = T_{f^{[1]}}^{U_1,U_0}(U_1−U_0) = T_{f^{[1]}}^{U_0,U_1}(U_1−U_0)`,
/// the left side computed by the power-series functional calculus.
pub fn perturbation_first(
    f: &LaurentPolynomial,
    u0: &UnitaryOperator,
    u1: &UnitaryOperator,
    settings: &Settings,
) -> Result<f64> {
    check_same_dim(u0.dim(), u1.matrix(), "U_1")?;
    let sd0 = spectral_decompose(u0.matrix(), &settings.tol)?;
    let sd1 = spectral_decompose(u1.matrix(), &settings.tol)?;
    let lhs =
        crate::linops::laurent_apply(f, u1.matrix()) - crate::linops::laurent_apply(f, u0.matrix());
    let diff = u1.matrix() - u0.matrix();
    let a = moi_divided_difference(f, &[&sd1, &sd0], &[&diff], &settings.limits)?;
    let b = moi_divided_difference(f, &[&sd0, &sd1], &[&diff], &settings.limits)?;
    Ok(max_abs_diff(&lhs, &a).max(max_abs_diff(&lhs, &b)))
}

/// Residual of
/// `T_{f^{[n−1]}}^{U_0,U_1,U_0,…} − T_{f^{[n−1]}}^{U_0,U_2,U_0,…} = T_{f^{[n]}}^{U_0,U_1,U_2,U_0,…}(V_1, U_1−U_2, V_2, …)`
/// for `vs = (V_1,…,V_{n−1})`, `n ≥ 2`.
pub fn perturbation_split(
    f: &LaurentPolynomial,
    u0: &UnitaryOperator,
    u1: &UnitaryOperator,
    u2: &UnitaryOperator,
    vs: &[&ComplexMatrix],
    settings: &Settings,
) -> Result<f64> {
    if vs.is_empty() {
        return Err(Error::DimensionMismatch(
            "perturbation split needs n >= 2".into(),
        ));
    }
    let d = u0.dim();
    check_same_dim(d, u1.matrix(), "U_1")?;
    check_same_dim(d, u2.matrix(), "U_2")?;
    let sd0 = spectral_decompose(u0.matrix(), &settings.tol)?;
    let sd1 = spectral_decompose(u1.matrix(), &settings.tol)?;
    let sd2 = spectral_decompose(u2.matrix(), &settings.tol)?;
    let m = vs.len();

    let with_u1: Vec<&SpectralDecomposition> =
        (0..=m).map(|i| if i == 1 { &sd1 } else { &sd0 }).collect();
    let with_u2: Vec<&SpectralDecomposition> =
        (0..=m).map(|i| if i == 1 { &sd2 } else { &sd0 }).collect();
    let lhs = moi_divided_difference(f, &with_u1, vs, &settings.limits)?
        - moi_divided_difference(f, &with_u2, vs, &settings.limits)?;

    let diff = u1.matrix() - u2.matrix();
    let mut slots: Vec<&ComplexMatrix> = vec![vs[0], &diff];
    slots.extend_from_slice(&vs[1..]);
    let chain: Vec<&SpectralDecomposition> = (0..=m + 1)
        .map(|i| match i {
            1 => &sd1,
            2 => &sd2,
            _ => &sd0,
        })
        .collect();
    let rhs = moi_divided_difference(f, &chain, &slots, &settings.limits)?;
    Ok(max_abs_diff(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::linops::{c64, identity, zeros, I};

    fn sd(m: &ComplexMatrix) -> SpectralDecomposition {
        spectral_decompose(m, &Tolerances::default()).unwrap()
    }

    fn scalar(z: Complex64) -> ComplexMatrix {
        ComplexMatrix::from_element(1, 1, z)
    }

    fn z(k: i32) -> LaurentPolynomial {
        LaurentPolynomial::monomial(k, c64(1.0, 0.0))
    }

    #[test]
    fn scalar_examples() {
        let limits = Limits::default();
        let (u0, u1) = (sd(&scalar(c64(1.0, 0.0))), sd(&scalar(c64(-1.0, 0.0))));
        let v = scalar(c64(3.0, 0.0));
        let r = moi_divided_difference(&z(2), &[&u0, &u1], &[&v], &limits).unwrap();
        assert!(r[(0, 0)].norm() < 1e-15);

        let ui = sd(&scalar(I));
        let one = scalar(c64(1.0, 0.0));
        let r = moi_divided_difference(&z(2), &[&ui, &ui], &[&one], &limits).unwrap();
        assert!((r[(0, 0)] - 2.0 * I).norm() < 1e-15);
    }

    #[test]
    fn off_diagonal_weight_vanishes() {
        let mut u = zeros(2);
        u[(0, 0)] = c64(1.0, 0.0);
        u[(1, 1)] = c64(-1.0, 0.0);
        let mut v = zeros(2);
        v[(0, 1)] = c64(1.0, 0.0);
        v[(1, 0)] = c64(1.0, 0.0);
        let s = sd(&u);
        let r = moi_apply(
            &DividedDifference { f: &z(2), order: 1 },
            &[&s, &s],
            &[&v],
            &Limits::default(),
        )
        .unwrap();
        assert!(r.matrix.iter().all(|x| x.norm() < 1e-15));
        assert_eq!(r.term_count, 4);
    }

    #[test]
    fn constant_symbol_telescopes() {
        let mut u = zeros(2);
        u[(0, 0)] = I;
        u[(1, 1)] = c64(-1.0, 0.0);
        let mut v = zeros(2);
        v[(0, 1)] = c64(2.0, -1.0);
        v[(1, 1)] = c64(0.5, 0.0);
        let s = sd(&u);
        let t = sd(&identity(2));
        let c = c64(0.0, 3.0);
        let r = moi_apply(
            &ConstantSymbol { arity: 2, value: c },
            &[&s, &t],
            &[&v],
            &Limits::default(),
        )
        .unwrap();
        assert!(max_abs_diff(&r.matrix, &(v * c)) < 1e-14);
    }

    #[test]
    fn first_order_trace_reduction_example() {
        let mut u = zeros(2);
        u[(0, 0)] = c64(1.0, 0.0);
        u[(1, 1)] = c64(-1.0, 0.0);
        let u = UnitaryOperator::new(u, 1e-12).unwrap();
        let id = identity(2);
        let (lhs, rhs) = trace_reduce(&z(2), &u, &u, &[&id], &Settings::default()).unwrap();
        assert!(lhs.norm() < 1e-15 && rhs.norm() < 1e-15);
    }

    #[test]
    fn equal_unitaries_have_zero_residuals() {
        let mut u = zeros(2);
        u[(0, 0)] = Complex64::from_polar(1.0, 0.4);
        u[(1, 1)] = Complex64::from_polar(1.0, 2.0);
        let u = UnitaryOperator::new(u, 1e-12).unwrap();
        let f = &z(3) + &z(-2);
        let settings = Settings::default();
        assert!(perturbation_first(&f, &u, &u, &settings).unwrap() < 1e-15);
        let v = identity(2);
        assert!(perturbation_split(&f, &u, &u, &u, &[&v], &settings).unwrap() < 1e-15);
    }

    #[test]
    fn term_guard() {
        let s = sd(&identity(2));
        let v = identity(2);
        let limits = Limits {
            max_moi_terms: 4.0,
            ..Limits::default()
        };
        let err = moi_apply(
            &DividedDifference { f: &z(3), order: 2 },
            &[&s, &s, &s],
            &[&v, &v],
            &limits,
        );
        assert!(matches!(err, Err(Error::TooManyTerms { .. })));
    }
}
