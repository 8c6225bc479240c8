//! Operator paths, their derivatives and Taylor remainders.
//!
//! A [`MultiplicativePath`] is `X_s = e^{isG} X_0` with `X_0` unitary or a
//! contraction and `G` self-adjoint. Derivatives of `f(X_s)` are computed
//! two ways: from the power formula applied coefficient by coefficient
//! (valid for both bases) and, for unitary bases, from the operator
//! integral formula with composition sums.

use num_complex::Complex64;

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::linops::{
    check_same_dim, identity, laurent_apply, matrix_exp_i, max_abs_diff, spectral_decompose, trace,
    ComplexMatrix, ContractionOperator, SelfAdjointOperator, SpectralDecomposition,
    UnitaryOperator,
};
use crate::moi::moi_divided_difference;
use crate::quadrature::Rule;
use crate::symbols::LaurentPolynomial;

/// Largest derivative order for which compositions are enumerated.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum PathBase {
    Unitary(UnitaryOperator),
    Contraction(ContractionOperator),
}

impl PathBase {
    pub fn matrix(&self) -> &ComplexMatrix {
        match self {
            PathBase::Unitary(u) => u.matrix(),
            PathBase::Contraction(t) => t.matrix(),
        }
    }
}

/// `X_s = e^{isG} X_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativePath {
    base: PathBase,
    generator: SelfAdjointOperator,
}

impl MultiplicativePath {
    pub fn unitary(u0: UnitaryOperator, a: SelfAdjointOperator) -> Result<Self> {
        check_same_dim(u0.dim(), a.matrix(), "generator")?;
        Ok(Self {
            base: PathBase::Unitary(u0),
            generator: a,
        })
    }

    pub fn contraction(t0: ContractionOperator, b: SelfAdjointOperator) -> Result<Self> {
        check_same_dim(t0.dim(), b.matrix(), "generator")?;
        Ok(Self {
            base: PathBase::Contraction(t0),
            generator: b,
        })
    }

    pub fn base(&self) -> &PathBase {
        &self.base
    }

    pub fn generator(&self) -> &SelfAdjointOperator {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn is_unitary(&self) -> bool {
        matches!(self.base, PathBase::Unitary(_))
    }

    /// `X_s` as a plain matrix.
    pub fn at(&self, s: f64) -> ComplexMatrix {
        matrix_exp_i(&self.generator, s).matrix() * self.base.matrix()
    }

    fn unitary_at(&self, s: f64, settings: &Settings) -> Result<UnitaryOperator> {
        match self.base {
            PathBase::Unitary(_) => UnitaryOperator::new(self.at(s), settings.tol.class),
            PathBase::Contraction(_) => Err(Error::InvalidConfig {
                field: "path",
                reason: "operator integral derivatives need a unitary base".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemainderKind {
    MultUnitary,
    MultContraction,
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorRemainder {
    pub matrix: ComplexMatrix,
    pub kind: RemainderKind,
    pub order: usize,
}

impl TaylorRemainder {
    pub fn trace(&self) -> Complex64 {
        trace(&self.matrix)
    }
}

/// Ordered compositions of `n` into positive parts.
pub fn compositions(n: usize) -> Result<Vec<Vec<usize>>> {
    if n > MAX_ORDER {
        return Err(Error::PartitionOverflow {
            order: n,
            max: MAX_ORDER,
        });
    }
    if n == 0 {
        return Ok(vec![]);
    }
    // each of the n−1 gaps is either a cut or not
    let mut out = Vec::with_capacity(1 << (n - 1));
    for mask in 0..(1u32 << (n - 1)) {
        let mut parts = Vec::new();
        let mut run = 1;
        for gap in 0..n - 1 {
            if mask & (1 << gap) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        out.push(parts);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)));
    Ok(out)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// `n! / (l_1! ⋯ l_r!)`.
pub fn multinomial(parts: &[usize]) -> f64 {
    let n: usize = parts.iter().sum();
    factorial(n) / parts.iter().map(|&l| factorial(l)).product::<f64>()
}

/// `d^n/ds^n f(U_s)` by the operator integral formula
/// `i^n Σ_r Σ_{l_1+⋯+l_r=n} n!/(l_1!⋯l_r!) T_{f^{[r]}}^{U_s,…,U_s}(A^{l_1}U_s,…,A^{l_r}U_s)`.
pub fn derivative_mult(
    path: &MultiplicativePath,
    f: &LaurentPolynomial,
    n: usize,
    s: f64,
    settings: &Settings,
) -> Result<ComplexMatrix> {
    let comps = compositions(n)?;
    let us = path.unitary_at(s, settings)?;
    let sd = spectral_decompose(us.matrix(), &settings.tol)?;
    derivative_mult_with(path, f, n, &us, &sd, &comps, settings)
}

fn derivative_mult_with(
    path: &MultiplicativePath,
    f: &LaurentPolynomial,
    n: usize,
    us: &UnitaryOperator,
    sd: &SpectralDecomposition,
    comps: &[Vec<usize>],
    settings: &Settings,
) -> Result<ComplexMatrix> {
    let d = path.dim();
    let a = path.generator.matrix();
    // A^l U_s for l = 1..n
    let mut a_pow_u = Vec::with_capacity(n + 1);
    a_pow_u.push(us.matrix().clone());
    for l in 1..=n {
        let next = a * &a_pow_u[l - 1];
        a_pow_u.push(next);
    }
    let mut total = ComplexMatrix::zeros(d, d);
    for parts in comps {
        let slots: Vec<&ComplexMatrix> = parts.iter().map(|&l| &a_pow_u[l]).collect();
        let decomps = vec![sd; parts.len() + 1];
        let term = moi_divided_difference(f, &decomps, &slots, &settings.limits)?;
        total += term * Complex64::new(multinomial(parts), 0.0);
    }
    Ok(total * Complex64::i().powi(n as i32))
}

/// `d^n/ds^n X_s^k` by the explicit power formula
/// `Σ_r Σ_{l} n!/(l_1!⋯l_r!) Σ_{α_0+⋯+α_r=k} X^{α_0}(iG)^{l_1}X^{α_1}⋯(iG)^{l_r}X^{α_r}`
/// with `α_0 ≥ 0` and `α_1,…,α_r ≥ 1`. Negative `k` is the adjoint of the
/// `|k|` result, `d^n/ds^n (X_s*)^{|k|} = (d^n/ds^n X_s^{|k|})*`.
pub fn derivative_power(
    path: &MultiplicativePath,
    k: i32,
    n: usize,
    s: f64,
) -> Result<ComplexMatrix> {
    let comps = compositions(n)?;
    let x = path.at(s);
    let ig = path.generator.matrix() * Complex64::i();
    let positive = power_derivative_at(&x, &ig, k.unsigned_abs() as usize, n, &comps);
    Ok(if k < 0 { positive.adjoint() } else { positive })
}

fn power_derivative_at(
    x: &ComplexMatrix,
    ig: &ComplexMatrix,
    k: usize,
    n: usize,
    comps: &[Vec<usize>],
) -> ComplexMatrix {
    power_derivatives_upto(x, ig, k, n, comps).swap_remove(k)
}

/// `d^n/ds^n X_s^k` for every `k = 0, …, top` from one pass of the
/// placement recursion; the partial products do not depend on `k`.
fn power_derivatives_upto(
    x: &ComplexMatrix,
    ig: &ComplexMatrix,
    top: usize,
    n: usize,
    comps: &[Vec<usize>],
) -> Vec<ComplexMatrix> {
    let d = x.nrows();
    let x_pow: Vec<ComplexMatrix> = {
        let mut v = vec![identity(d)];
        for j in 1..=top {
            let next = &v[j - 1] * x;
            v.push(next);
        }
        v
    };
    if n == 0 {
        return x_pow;
    }
    let ig_pow: Vec<ComplexMatrix> = {
        let mut v = vec![identity(d)];
        for j in 1..=n {
            let next = &v[j - 1] * ig;
            v.push(next);
        }
        v
    };

    let mut total = vec![ComplexMatrix::zeros(d, d); top + 1];
    for parts in comps {
        if parts.len() > top {
            continue;
        }
        // acc[m]: sum over placements using m powers of X so far
        let mut acc: Vec<Option<ComplexMatrix>> = x_pow.iter().cloned().map(Some).collect();
        for &l in parts {
            let mut next: Vec<Option<ComplexMatrix>> = vec![None; top + 1];
            for m in 0..=top {
                let Some(prev) = &acc[m] else { continue };
                let with_g = prev * &ig_pow[l];
                for a in 1..=top - m {
                    let term = &with_g * &x_pow[a];
                    match &mut next[m + a] {
                        Some(sum) => *sum += term,
                        slot => *slot = Some(term),
                    }
                }
            }
            acc = next;
        }
        let w = Complex64::new(multinomial(parts), 0.0);
        for (k, slot) in acc.iter().enumerate() {
            if let Some(sum) = slot {
                total[k] += sum * w;
            }
        }
    }
    total
}

/// `T[k][m] = d^m/ds^m X_s^k` for `k ≤ top`, `m ≤ order`, from
/// `X_s^k = X_s X_s^{k−1}` and `d^j X_s = (iG)^j X_s`:
/// `T[k][m] = Σ_j C(m,j) (iG)^j X T[k−1][m−j]`.
fn leibniz_table(
    x: &ComplexMatrix,
    ig: &ComplexMatrix,
    top: usize,
    order: usize,
) -> Vec<Vec<ComplexMatrix>> {
    let d = x.nrows();
    let mut gx = vec![x.clone()];
    for j in 1..=order {
        let next = ig * &gx[j - 1];
        gx.push(next);
    }
    let mut table = vec![(0..=order)
        .map(|m| {
            if m == 0 {
                identity(d)
            } else {
                ComplexMatrix::zeros(d, d)
            }
        })
        .collect::<Vec<_>>()];
    for k in 1..=top {
        let prev = &table[k - 1];
        let row: Vec<ComplexMatrix> = (0..=order)
            .map(|m| {
                let mut acc = ComplexMatrix::zeros(d, d);
                for j in 0..=m {
                    acc += (&gx[j] * &prev[m - j]) * Complex64::new(binomial(m, j), 0.0);
                }
                acc
            })
            .collect();
        table.push(row);
    }
    table
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `Σ c_k T[k][m] + (Σ_{k<0} conj(c_k) T[|k|][m])*`, using
/// `d^m (X_s*)^{|k|} = (d^m X_s^{|k|})*`.
fn apply_table(table: &[Vec<ComplexMatrix>], f: &LaurentPolynomial, m: usize) -> ComplexMatrix {
    let d = table[0][0].nrows();
    let mut plus = ComplexMatrix::zeros(d, d);
    let mut minus = ComplexMatrix::zeros(d, d);
    for (k, c) in f.iter() {
        if k == 0 && m > 0 {
            continue;
        }
        let entry = &table[k.unsigned_abs() as usize][m];
        if k >= 0 {
            plus += entry * c;
        } else {
            minus += entry * c.conj();
        }
    }
    plus + minus.adjoint()
}

/// `d^n/ds^n f(X_s)` by linearity over the powers of `X_s`.
pub fn derivative_laurent(
    path: &MultiplicativePath,
    f: &LaurentPolynomial,
    n: usize,
    s: f64,
) -> Result<ComplexMatrix> {
    check_derivative_order(n)?;
    let x = path.at(s);
    let ig = path.generator.matrix() * Complex64::i();
    let top = f.max_abs_degree().max(0) as usize;
    Ok(apply_table(&leibniz_table(&x, &ig, top, n), f, n))
}

/// `f(X_1) − f(X_0) − Σ_{k=1}^{n−1} (1/k!) d^k/ds^k|_{s=0} f(X_s)`.
///
/// Derivatives come from the power formula; `f(X)` is
/// `Σ f̂(k) X^k + Σ f̂(−k) (X*)^k`, which for a contraction is `f_+(X) + f_−(X)`.
pub fn remainder_mult(
    path: &MultiplicativePath,
    f: &LaurentPolynomial,
    n: usize,
) -> Result<TaylorRemainder> {
    RemainderTable::new(path, f.max_abs_degree().max(0) as usize, n)?.remainder(f)
}

/// Power derivatives of one path, precomputed so that remainders of many
/// functions of degree at most `top` cost a linear combination each.
#[derive(Debug, Clone)]
pub struct RemainderTable {
    order: usize,
    top: usize,
    kind: RemainderKind,
    /// `d^m/ds^m|_0 X_s^k`, `m < order`.
    start: Vec<Vec<ComplexMatrix>>,
    /// `X_1^k`.
    end: Vec<ComplexMatrix>,
}

impl RemainderTable {
    pub fn new(path: &MultiplicativePath, top: usize, n: usize) -> Result<Self> {
        check_order(n)?;
        let ig = path.generator.matrix() * Complex64::i();
        let start = leibniz_table(&path.at(0.0), &ig, top, n - 1);
        let x1 = path.at(1.0);
        let mut end = vec![identity(path.dim())];
        for k in 1..=top {
            let next = &x1 * &end[k - 1];
            end.push(next);
        }
        let kind = if path.is_unitary() {
            RemainderKind::MultUnitary
        } else {
            RemainderKind::MultContraction
        };
        Ok(Self {
            order: n,
            top,
            kind,
            start,
            end,
        })
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// `f(X_1) − f(X_0) − Σ_{k=1}^{n−1} (1/k!) d^k/ds^k|_{s=0} f(X_s)`.
    pub fn remainder(&self, f: &LaurentPolynomial) -> Result<TaylorRemainder> {
        let degree = f.max_abs_degree();
        if degree > self.top as i32 {
            return Err(Error::SupportExceedsProbes {
                degree,
                probes: self.top as i32,
            });
        }
        let d = self.end[0].nrows();
        // f(X) = Σ c_k X^k + (Σ_{k<0} conj(c_k) X^{|k|})*
        let mut plus = ComplexMatrix::zeros(d, d);
        let mut minus = ComplexMatrix::zeros(d, d);
        for (k, c) in f.iter() {
            let j = k.unsigned_abs() as usize;
            let delta = &self.end[j] - &self.start[j][0];
            if k >= 0 {
                plus += delta * c;
            } else {
                minus += delta * c.conj();
            }
        }
        let mut r = plus + minus.adjoint();
        for m in 1..self.order {
            r -= apply_table(&self.start, f, m) * Complex64::new(1.0 / factorial(m), 0.0);
        }
        Ok(TaylorRemainder {
            matrix: r,
            kind: self.kind,
            order: self.order,
        })
    }
}

/// Same remainder with the derivatives taken from the operator integral
/// formula instead of the power formula. Unitary paths only.
pub fn remainder_mult_moi(
    path: &MultiplicativePath,
    f: &LaurentPolynomial,
    n: usize,
    settings: &Settings,
) -> Result<TaylorRemainder> {
    check_order(n)?;
    let u0 = path.unitary_at(0.0, settings)?;
    let u1 = path.unitary_at(1.0, settings)?;
    let sd0 = spectral_decompose(u0.matrix(), &settings.tol)?;
    let sd1 = spectral_decompose(u1.matrix(), &settings.tol)?;
    // f(U) through the spectral resolution rather than powers
    let mut r = sd1.apply(|z| f.eval(z)) - sd0.apply(|z| f.eval(z));
    for k in 1..n {
        let comps = compositions(k)?;
        let dk = derivative_mult_with(path, f, k, &u0, &sd0, &comps, settings)?;
        r -= dk * Complex64::new(1.0 / factorial(k), 0.0);
    }
    Ok(TaylorRemainder {
        matrix: r,
        kind: RemainderKind::MultUnitary,
        order: n,
    })
}

/// Quadrature form of the remainder,
/// `(1/(n−1)!) ∫_0^1 (1−t)^{n−1} d^n/ds^n|_{s=t} f(U_s) dt`, by Gauss–Legendre
/// with the integrand from the operator integral derivative formula.
/// Returns the matrix and its trace.
pub fn remainder_quadrature(
    path: &MultiplicativePath,
    f: &LaurentPolynomial,
    n: usize,
    nodes: usize,
    settings: &Settings,
) -> Result<(ComplexMatrix, Complex64)> {
    check_order(n)?;
    if nodes < 8 {
        return Err(Error::InvalidConfig {
            field: "nodes",
            reason: format!("quadrature needs at least 8 nodes, got {nodes}"),
        });
    }
    let rule = Rule::gauss_legendre(nodes, 0.0, 1.0)?;
    let comps = compositions(n)?;
    let d = path.dim();
    let mut total = ComplexMatrix::zeros(d, d);
    for (t, w) in rule.pairs() {
        let ut = path.unitary_at(t, settings)?;
        let sd = spectral_decompose(ut.matrix(), &settings.tol)?;
        let dn = derivative_mult_with(path, f, n, &ut, &sd, &comps, settings)?;
        total += dn * Complex64::new(w * (1.0 - t).powi(n as i32 - 1), 0.0);
    }
    total *= Complex64::new(1.0 / factorial(n - 1), 0.0);
    let tr = trace(&total);
    Ok((total, tr))
}

fn check_derivative_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::PartitionOverflow {
            order: n,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig {
            field: "n",
            reason: format!("remainder order must be at least 2, got {n}"),
        });
    }
    if n > MAX_ORDER {
        return Err(Error::PartitionOverflow {
            order: n,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Linear-path remainder in both of its forms.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRemainder {
    /// `f(U_1) − f(U_0) − Σ_{k=1}^{n−1} T_{f^{[k]}}^{U_0,…,U_0}(U_1−U_0,…,U_1−U_0)`.
    pub remainder: TaylorRemainder,
    /// `T_{f^{[n]}}^{U_0,U_1,U_0,…,U_0}(U_1−U_0,…,U_1−U_0)`.
    pub closed_form: ComplexMatrix,
    /// Max-norm distance between the two.
    pub residual: f64,
}

/// Modified Taylor remainder along `U_0 + s(U_1 − U_0)`.
pub fn remainder_lin(
    u0: &UnitaryOperator,
    u1: &UnitaryOperator,
    f: &LaurentPolynomial,
    n: usize,
    settings: &Settings,
) -> Result<LinearRemainder> {
    check_order(n)?;
    check_same_dim(u0.dim(), u1.matrix(), "U_1")?;
    let sd0 = spectral_decompose(u0.matrix(), &settings.tol)?;
    let sd1 = spectral_decompose(u1.matrix(), &settings.tol)?;
    let w = u1.matrix() - u0.matrix();

    let mut r = laurent_apply(f, u1.matrix()) - laurent_apply(f, u0.matrix());
    for k in 1..n {
        let decomps = vec![&sd0; k + 1];
        let slots = vec![&w; k];
        r -= moi_divided_difference(f, &decomps, &slots, &settings.limits)?;
    }

    let decomps: Vec<&SpectralDecomposition> =
        (0..=n).map(|i| if i == 1 { &sd1 } else { &sd0 }).collect();
    let slots = vec![&w; n];
    let closed_form = moi_divided_difference(f, &decomps, &slots, &settings.limits)?;
    let residual = max_abs_diff(&r, &closed_form);
    Ok(LinearRemainder {
        remainder: TaylorRemainder {
            matrix: r,
            kind: RemainderKind::Linear,
            order: n,
        },
        closed_form,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c64, zeros};
    use std::f64::consts::PI;

    fn scalar_path(u0: Complex64, a: f64) -> MultiplicativePath {
        let u = UnitaryOperator::new(ComplexMatrix::from_element(1, 1, u0), 1e-12).unwrap();
        let g =
            SelfAdjointOperator::new(ComplexMatrix::from_element(1, 1, c64(a, 0.0)), 0.0).unwrap();
        MultiplicativePath::unitary(u, g).unwrap()
    }

    fn z(k: i32) -> LaurentPolynomial {
        LaurentPolynomial::monomial(k, c64(1.0, 0.0))
    }

    #[test]
    fn leibniz_table_matches_composition_formula() {
        let mut x = zeros(2);
        x[(0, 0)] = c64(0.3, 0.4);
        x[(0, 1)] = c64(-0.2, 0.1);
        x[(1, 0)] = c64(0.5, 0.0);
        x[(1, 1)] = c64(0.1, -0.6);
        let t = ContractionOperator::new(x * c64(0.7, 0.0), 1e-12).unwrap();
        let mut g = zeros(2);
        g[(0, 0)] = c64(0.4, 0.0);
        g[(0, 1)] = c64(0.3, -0.2);
        g[(1, 0)] = c64(0.3, 0.2);
        g[(1, 1)] = c64(-0.9, 0.0);
        let b = SelfAdjointOperator::new(g, 1e-14).unwrap();
        let path = MultiplicativePath::contraction(t, b).unwrap();
        for n in 0..=4 {
            for k in -5..=5i32 {
                let f = LaurentPolynomial::monomial(k, c64(1.0, 0.0));
                let table = derivative_laurent(&path, &f, n, 0.3).unwrap();
                let comp = derivative_power(&path, k, n, 0.3).unwrap();
                let expect = if k == 0 && n > 0 { zeros(2) } else { comp };
                assert!(max_abs_diff(&table, &expect) < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn composition_counts() {
        for n in 1..=6 {
            let c = compositions(n).unwrap();
            assert_eq!(c.len(), 1 << (n - 1));
            assert!(c.iter().all(|p| p.iter().sum::<usize>() == n));
        }
        assert!(matches!(
            compositions(9),
            Err(Error::PartitionOverflow { .. })
        ));
        assert_eq!(multinomial(&[2, 1]), 3.0);
    }

    #[test]
    fn first_derivative_of_scalar_path() {
        let (u0, a, s) = (Complex64::from_polar(1.0, 0.3), 0.8, 0.4);
        let path = scalar_path(u0, a);
        let expected = Complex64::i() * a * Complex64::from_polar(1.0, s * a) * u0;
        let d = derivative_mult(&path, &z(1), 1, s, &Settings::default()).unwrap();
        assert!((d[(0, 0)] - expected).norm() < 1e-14);
        let p = derivative_power(&path, 1, 1, s).unwrap();
        assert!((p[(0, 0)] - expected).norm() < 1e-14);
    }

    #[test]
    fn zero_generator_has_no_derivatives() {
        let path = scalar_path(c64(0.0, 1.0), 0.0);
        for n in 1..4 {
            let d =
                derivative_mult(&path, &(&z(3) + &z(-2)), n, 0.2, &Settings::default()).unwrap();
            assert!(d[(0, 0)].norm() < 1e-15);
        }
    }

    #[test]
    fn contraction_product_rule() {
        let mut t = zeros(2);
        t[(0, 1)] = c64(0.6, 0.0);
        t[(1, 0)] = c64(0.0, 0.3);
        let mut b = zeros(2);
        b[(0, 0)] = c64(0.5, 0.0);
        b[(0, 1)] = c64(0.1, 0.2);
        b[(1, 0)] = c64(0.1, -0.2);
        let path = MultiplicativePath::contraction(
            ContractionOperator::new(t.clone(), 1e-12).unwrap(),
            SelfAdjointOperator::new(b.clone(), 0.0).unwrap(),
        )
        .unwrap();
        let ib = &b * Complex64::i();
        let expected = &ib * &t * &t + &t * &ib * &t;
        let got = derivative_power(&path, 2, 1, 0.0).unwrap();
        assert!(max_abs_diff(&got, &expected) < 1e-15);
    }

    #[test]
    fn scalar_second_order_remainder() {
        let path = scalar_path(c64(1.0, 0.0), PI);
        let r = remainder_mult(&path, &z(1), 2).unwrap();
        let expected = c64(-2.0, -PI);
        assert!((r.trace() - expected).norm() < 1e-14);
        let (q, tr) = remainder_quadrature(&path, &z(1), 2, 64, &Settings::default()).unwrap();
        assert!((q[(0, 0)] - expected).norm() < 1e-10);
        assert!((tr - expected).norm() < 1e-10);
    }

    #[test]
    fn constant_function_has_zero_remainder() {
        let path = scalar_path(c64(0.0, 1.0), 1.3);
        let c = LaurentPolynomial::constant(c64(2.0, -1.0));
        assert_eq!(remainder_mult(&path, &c, 3).unwrap().trace(), c64(0.0, 0.0));
    }

    #[test]
    fn scalar_linear_remainder_is_square_of_increment() {
        let u0 =
            UnitaryOperator::new(ComplexMatrix::from_element(1, 1, c64(1.0, 0.0)), 1e-12).unwrap();
        let u1v = Complex64::from_polar(1.0, 1.1);
        let u1 = UnitaryOperator::new(ComplexMatrix::from_element(1, 1, u1v), 1e-12).unwrap();
        let lin = remainder_lin(&u0, &u1, &z(2), 2, &Settings::default()).unwrap();
        let expected = (u1v - 1.0).powi(2);
        assert!((lin.remainder.matrix[(0, 0)] - expected).norm() < 1e-14);
        assert!((lin.closed_form[(0, 0)] - expected).norm() < 1e-14);
        let same = remainder_lin(&u0, &u0, &z(3), 3, &Settings::default()).unwrap();
        assert!(same.remainder.matrix[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn order_below_two_is_rejected() {
        let path = scalar_path(c64(1.0, 0.0), 1.0);
        assert!(remainder_mult(&path, &z(1), 1).is_err());
        assert!(remainder_quadrature(&path, &z(1), 2, 4, &Settings::default()).is_err());
    }
}
