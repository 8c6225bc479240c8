//! Cayley transforms between the real line and the circle.
//!
//! `c(λ) = (λ+i)/(λ−i)` carries self-adjoint matrices to unitaries and
//! dissipative matrices to contractions. A Laurent polynomial `f` on the
//! circle pulls back to `ψ = f∘c` on the real line, which is what the
//! real-line trace formulas are stated for.

use std::f64::consts::PI;

use nalgebra::Schur;
use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::config::{Settings, Tolerances};
use crate::error::{Error, OperatorKind, Result};
use crate::linops::{
    check_same_dim, check_square, hermitian_decompose, hermitian_function, identity, laurent_apply,
    matrix_exp_i, ComplexMatrix, ContractionOperator, SelfAdjointOperator, UnitaryOperator,
};
use crate::moi::{moi_apply, MoiSymbol};
use crate::paths::{derivative_laurent, MultiplicativePath};
use crate::quadrature::Rule;
use crate::symbols::{
    contour_pair, falling_factorial, shifted_inverse_power_dd, LaurentPolynomial,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Matrix with `(L − L*)/(2i) ≤ tol` in the Loewner order.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeOperator {
    matrix: ComplexMatrix,
    tolerance: f64,
}

impl DissipativeOperator {
    pub fn new(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        check_square(&matrix)?;
        let top = imaginary_part_max(&matrix);
        if top > tolerance {
            return Err(Error::ClassViolation {
                kind: OperatorKind::Dissipative,
                defect: top,
                tolerance,
            });
        }
        Ok(Self { matrix, tolerance })
    }

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

/// Largest eigenvalue of `(L − L*)/(2i)`.
pub fn imaginary_part_max(l: &ComplexMatrix) -> f64 {
    let k = (l - l.adjoint()) * Complex64::new(0.0, -0.5);
    let k = (&k + k.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(k)
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b))
}

/// `c(λ) = (λ+i)/(λ−i)`.
pub fn cayley_scalar(lambda: Complex64) -> Complex64 {
    (lambda + I) / (lambda - I)
}

fn cayley_matrix(l: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = identity(l.nrows());
    let inv = (l - &id * I)
        .try_inverse()
        .ok_or(Error::SingularResolvent)?;
    Ok((l + &id * I) * inv)
}

/// `T = (L + iI)(L − iI)^{−1}`.
pub fn cayley(l: &DissipativeOperator, tol: &Tolerances) -> Result<ContractionOperator> {
    let t = cayley_matrix(l.matrix())?;
    ContractionOperator::new(t, tol.class)
}

/// Cayley transform of a self-adjoint matrix, a unitary.
pub fn cayley_selfadjoint(h: &SelfAdjointOperator, tol: &Tolerances) -> Result<UnitaryOperator> {
    let u = hermitian_function(h.matrix(), |x| cayley_scalar(Complex64::new(x, 0.0)));
    UnitaryOperator::new(u, tol.class)
}

/// Eigenvalues of a general square matrix through its complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    let (_, t) = Schur::new(m.clone()).unpack();
    t.diagonal().iter().copied().collect()
}

/// `L = i(T + I)(T − I)^{−1}`; refuses `T` with an eigenvalue within
/// `eigenvalue_margin` of 1.
pub fn inverse_cayley(t: &ContractionOperator, tol: &Tolerances) -> Result<ComplexMatrix> {
    let distance = eigenvalues(t.matrix())
        .into_iter()
        .map(|z| (z - 1.0).norm())
        .fold(f64::INFINITY, f64::min);
    if distance < tol.eigenvalue_margin {
        return Err(Error::OnePointSpectrum {
            distance,
            margin: tol.eigenvalue_margin,
        });
    }
    let id = identity(t.dim());
    let inv = (t.matrix() - &id)
        .try_inverse()
        .ok_or(Error::OnePointSpectrum {
            distance,
            margin: tol.eigenvalue_margin,
        })?;
    Ok((t.matrix() + &id) * inv * I)
}

/// `U_j = (H_j + iI)(H_j − iI)^{−1}` for `H_1 = H_0 + V`.
pub fn selfadjoint_pair_to_unitaries(
    h0: &SelfAdjointOperator,
    v: &SelfAdjointOperator,
    tol: &Tolerances,
) -> Result<(UnitaryOperator, UnitaryOperator)> {
    check_same_dim(h0.dim(), v.matrix(), "V")?;
    let h1 = SelfAdjointOperator::new(h0.matrix() + v.matrix(), h0.tolerance() + v.tolerance())?;
    Ok((cayley_selfadjoint(h0, tol)?, cayley_selfadjoint(&h1, tol)?))
}

/// `−2i (H_1 − iI)^{−1} V (H_0 − iI)^{−1}`, the closed form of `U_1 − U_0`.
pub fn unitary_increment(
    h0: &SelfAdjointOperator,
    v: &SelfAdjointOperator,
) -> Result<ComplexMatrix> {
    let id = identity(h0.dim());
    let r0 = (h0.matrix() - &id * I)
        .try_inverse()
        .ok_or(Error::SingularFactor("H_0 - iI"))?;
    let r1 = (h0.matrix() + v.matrix() - &id * I)
        .try_inverse()
        .ok_or(Error::SingularFactor("H_1 - iI"))?;
    Ok(r1 * v.matrix() * r0 * Complex64::new(0.0, -2.0))
}

/// Chain perturbations for the resolvent trace formula.
///
/// Along `U_s = U_0 + s(U_1 − U_0)` the inverse Cayley transform is
/// `H_s = H_0 + Σ_{j≥1} s^j X_j` with `X_j = (H_0 − iI)((H_1 − iI)^{−1}V)^j`.
/// For `j_1 < ⋯ < j_k` this returns `X_{j_1−j_0}, …, X_{j_k−j_{k−1}}`,
/// `j_0 = 0`.
pub fn resolvent_chain(
    h0: &SelfAdjointOperator,
    v: &SelfAdjointOperator,
    js: &[usize],
) -> Result<Vec<ComplexMatrix>> {
    check_same_dim(h0.dim(), v.matrix(), "V")?;
    let id = identity(h0.dim());
    let shifted = h0.matrix() - &id * I;
    let r1 = (h0.matrix() + v.matrix() - &id * I)
        .try_inverse()
        .ok_or(Error::SingularFactor("H_1 - iI"))?;
    let step = r1 * v.matrix();
    let mut out = Vec::with_capacity(js.len());
    let mut prev = 0;
    for &j in js {
        if j <= prev {
            return Err(Error::InvalidConfig {
                field: "js",
                reason: format!("indices must increase from 1, got {js:?}"),
            });
        }
        let mut p = identity(h0.dim());
        for _ in 0..j - prev {
            p = &p * &step;
        }
        out.push(&shifted * p);
        prev = j;
    }
    Ok(out)
}

/// `ψ = f∘c` as partial fractions,
/// `ψ(λ) = a_0 + Σ_{j≥1} a_j (λ−i)^{−j} + Σ_{j≥1} b_j (λ+i)^{−j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pullback {
    pub constant: Complex64,
    /// `a_j`, index `j − 1`.
    pub upper: Vec<Complex64>,
    /// `b_j`, index `j − 1`.
    pub lower: Vec<Complex64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    falling_factorial(n as i32, k) / (1..=k).map(|x| x as f64).product::<f64>()
}

impl Pullback {
    /// `c(λ)^m = Σ_j C(m,j)(2i)^j (λ−i)^{−j}` and
    /// `c(λ)^{−p} = Σ_j C(p,j)(−2i)^j (λ+i)^{−j}`.
    pub fn new(f: &LaurentPolynomial) -> Self {
        let top = f.coeffs().keys().next_back().copied().unwrap_or(0).max(0) as u32;
        let bottom = (-f.coeffs().keys().next().copied().unwrap_or(0)).max(0) as u32;
        let mut constant = ZERO;
        let mut upper = vec![ZERO; top as usize];
        let mut lower = vec![ZERO; bottom as usize];
        for (m, c) in f.iter() {
            constant += c;
            let p = m.unsigned_abs();
            let base = if m > 0 { 2.0 * I } else { -2.0 * I };
            for j in 1..=p {
                let term = c * binomial(p, j) * base.powi(j as i32);
                if m > 0 {
                    upper[j as usize - 1] += term;
                } else {
                    lower[j as usize - 1] += term;
                }
            }
        }
        Self {
            constant,
            upper,
            lower,
        }
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let mut acc = self.constant;
        for (j, a) in self.upper.iter().enumerate() {
            acc += a * (lambda - I).powi(-(j as i32 + 1));
        }
        for (j, b) in self.lower.iter().enumerate() {
            acc += b * (lambda + I).powi(-(j as i32 + 1));
        }
        acc
    }

    /// `ψ^{[n]}` at `n + 1` real nodes, exact at coincident nodes.
    pub fn divided_difference(&self, points: &[Complex64]) -> Complex64 {
        let mut acc = if points.len() == 1 {
            self.constant
        } else {
            ZERO
        };
        for (j, a) in self.upper.iter().enumerate() {
            acc += a * shifted_inverse_power_dd(j as u32 + 1, points, I);
        }
        for (j, b) in self.lower.iter().enumerate() {
            acc += b * shifted_inverse_power_dd(j as u32 + 1, points, -I);
        }
        acc
    }

    /// `d^{k−1}/dλ^{k−1}((λ−i)^k ψ′(λ))`.
    pub fn weighted_derivative(&self, k: u32, lambda: Complex64) -> Complex64 {
        let m = k - 1;
        let (lm, lp) = (lambda - I, lambda + I);
        let mut acc = ZERO;
        // a_j (−j)(λ−i)^{k−j−1}
        for (idx, a) in self.upper.iter().enumerate() {
            let j = idx as i32 + 1;
            let p = k as i32 - j - 1;
            acc += a * (-j as f64) * falling_factorial(p, m) * lm.powi(p - m as i32);
        }
        // b_j (−j)(λ+i)^{−j−1}(λ−i)^k, Leibniz
        for (idx, b) in self.lower.iter().enumerate() {
            let j = idx as i32 + 1;
            let q = -j - 1;
            let mut inner = ZERO;
            for t in 0..=m {
                let coeff =
                    binomial(m, t) * falling_factorial(q, t) * falling_factorial(k as i32, m - t);
                if coeff != 0.0 {
                    inner += coeff * lp.powi(q - t as i32) * lm.powi(k as i32 - (m - t) as i32);
                }
            }
            acc += b * (-j as f64) * inner;
        }
        acc
    }
}

/// `ψ^{[order]}` with `ψ = f∘c`, for operator integrals over self-adjoint
/// spectra.
#[derive(Debug, Clone)]
pub struct PsiSymbol {
    pub pullback: Pullback,
    pub order: usize,
}

impl MoiSymbol for PsiSymbol {
    fn arity(&self) -> usize {
        self.order + 1
    }

    fn eval(&self, points: &[Complex64]) -> Complex64 {
        self.pullback.divided_difference(points)
    }
}

/// Increasing sequences `1 ≤ j_1 < ⋯ < j_k ≤ top`, all `k ≥ 1`.
fn increasing_sequences(top: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << top) {
        out.push(
            (0..top)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| b + 1)
                .collect(),
        );
    }
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Operator inside the trace on the left of the resolvent formula:
/// `ψ(H_1) − ψ(H_0) − Σ_k Σ_{j_1<⋯<j_k≤n−1} T_{ψ^{[k]}}^{H_0,…,H_0}(V_{j_1},…,V_{j_k})`.
pub fn resolvent_lhs(
    h0: &SelfAdjointOperator,
    v: &SelfAdjointOperator,
    f: &LaurentPolynomial,
    n: usize,
    settings: &Settings,
) -> Result<ComplexMatrix> {
    check_same_dim(h0.dim(), v.matrix(), "V")?;
    let pullback = Pullback::new(f);
    let h1 = h0.matrix() + v.matrix();
    let psi = |x: f64| pullback.eval(Complex64::new(x, 0.0));
    let mut out = hermitian_function(&h1, psi) - hermitian_function(h0.matrix(), psi);

    let sd = hermitian_decompose(h0.matrix(), &settings.tol)?;
    let separation = sd.min_separation();
    if separation < settings.tol.separation {
        return Err(Error::SpectrumTooClustered {
            separation,
            required: settings.tol.separation,
        });
    }
    for js in increasing_sequences(n - 1) {
        let chain = resolvent_chain(h0, v, &js)?;
        let slots: Vec<&ComplexMatrix> = chain.iter().collect();
        let symbol = PsiSymbol {
            pullback: pullback.clone(),
            order: js.len(),
        };
        let decomps = vec![&sd; js.len() + 1];
        out -= moi_apply(&symbol, &decomps, &slots, &settings.limits)?.matrix;
    }
    Ok(out)
}

/// `ψ(L) = Σ_{k≥0} f̂(k) T^k + Σ_{k≥1} f̂(−k) (T*)^k` with `T = c(L)`.
pub fn psi_of_dissipative(
    f: &LaurentPolynomial,
    l: &DissipativeOperator,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    Ok(laurent_apply(f, cayley(l, tol)?.matrix()))
}

/// Operator inside the trace on the left of the dissipative formula:
/// `ψ(L_1) − ψ(L_0) − Σ_{l=1}^{n−1} (1/l!) d^l/ds^l|_0 ψ-path terms`, where
/// `T_0 = c(L_0)`, `T_1 = e^{iB}T_0` and `L_1 = c^{−1}(T_1)`. The subtracted
/// sum is applied to every coefficient, negative ones through the adjoint
/// power formula.
pub fn dissipative_lhs(
    l0: &DissipativeOperator,
    b: &SelfAdjointOperator,
    f: &LaurentPolynomial,
    n: usize,
    settings: &Settings,
) -> Result<ComplexMatrix> {
    let tol = &settings.tol;
    let t0 = cayley(l0, tol)?;
    let t1 = ContractionOperator::new(matrix_exp_i(b, 1.0).matrix() * t0.matrix(), tol.class)?;
    let l1 = DissipativeOperator::new(inverse_cayley(&t1, tol)?, dissipative_slack(&t1))?;
    let mut out = psi_of_dissipative(f, &l1, tol)? - psi_of_dissipative(f, l0, tol)?;
    let path = MultiplicativePath::contraction(t0, b.clone())?;
    let mut factorial = 1.0;
    for l in 1..n {
        factorial *= l as f64;
        out -= derivative_laurent(&path, f, l, 0.0)? * Complex64::new(1.0 / factorial, 0.0);
    }
    Ok(out)
}

/// Roundoff allowance for the imaginary part of an inverse Cayley image,
/// which grows with `‖(T − I)^{−1}‖²`.
fn dissipative_slack(t: &ContractionOperator) -> f64 {
    let id = identity(t.dim());
    let inv_norm = (t.matrix() - id)
        .try_inverse()
        .map(|m| crate::linops::operator_norm(&m))
        .unwrap_or(f64::INFINITY);
    1e-12 * (1.0 + inv_norm * inv_norm)
}

/// `γ_k(λ) = (λ−i)^{−2} η_k(c(λ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaDensity {
    pub k: u32,
    pub eta: LaurentPolynomial,
}

impl GammaDensity {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        (lambda - I).powi(-2) * self.eta.eval(cayley_scalar(lambda))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealLineMode {
    /// Substitute `z = c(λ)` and pair on the circle exactly.
    ExactPullback,
    /// Integrate over `λ(θ) = cot(θ/2)`, `θ ∈ (δ, 2π−δ)`.
    ThetaQuadrature { delta: f64, nodes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealLineValue {
    pub value: Complex64,
    /// Distance to the exact pullback value (quadrature mode only).
    pub gap: Option<f64>,
    /// Gaps over the δ-sweep `10^{-1}, 10^{-2}, …` down to the requested δ.
    pub sweep: Vec<f64>,
}

/// Right side of the real-line trace formulas,
/// `Σ_k (i^{k−1}/2^{k−1}) ∮ (λ−i)^k D^{k−1}((λ−i)^k ψ′) γ_k dλ`.
///
/// The integral is taken along the orientation induced by the
/// counter-clockwise circle (λ from +∞ to −∞), which makes the value equal
/// to `Σ_k ∫_𝕋 f^{(k)} η_k dz`.
pub fn rhs_real_line(
    f: &LaurentPolynomial,
    gammas: &[GammaDensity],
    mode: RealLineMode,
) -> Result<RealLineValue> {
    let exact: Complex64 = gammas
        .iter()
        .map(|g| contour_pair(&f.derivative(g.k), &g.eta))
        .sum();
    match mode {
        RealLineMode::ExactPullback => Ok(RealLineValue {
            value: exact,
            gap: None,
            sweep: Vec::new(),
        }),
        RealLineMode::ThetaQuadrature { delta, nodes } => {
            if !(delta > 0.0 && delta < PI) {
                return Err(Error::InvalidConfig {
                    field: "delta",
                    reason: format!("need 0 < delta < pi, got {delta}"),
                });
            }
            let pullback = Pullback::new(f);
            let mut deltas = Vec::new();
            let mut d = 1e-1;
            while d > delta * 1.0000001 {
                deltas.push(d);
                d /= 10.0;
            }
            deltas.push(delta);
            let mut sweep = Vec::with_capacity(deltas.len());
            let mut value = ZERO;
            for &d in &deltas {
                value = theta_integral(&pullback, gammas, d, nodes)?;
                sweep.push((value - exact).norm());
            }
            if sweep.windows(2).any(|w| w[1] >= w[0] && w[0] > 1e-14) {
                return Err(Error::QuadratureDivergence { gaps: sweep });
            }
            Ok(RealLineValue {
                value,
                gap: sweep.last().copied(),
                sweep,
            })
        }
    }
}

fn theta_integral(
    pullback: &Pullback,
    gammas: &[GammaDensity],
    delta: f64,
    nodes: usize,
) -> Result<Complex64> {
    let rule = Rule::gauss_legendre(nodes, delta, 2.0 * PI - delta)?;
    let mut total = ZERO;
    for g in gammas {
        let k = g.k;
        let prefactor = I.powi(k as i32 - 1) / 2f64.powi(k as i32 - 1);
        let mut acc = ZERO;
        for (theta, w) in rule.pairs() {
            let half = 0.5 * theta;
            let lambda = Complex64::new(half.cos() / half.sin(), 0.0);
            let dlambda = -0.5 / (half.sin() * half.sin());
            let integrand = (lambda - I).powi(k as i32)
                * pullback.weighted_derivative(k, lambda)
                * g.eval(lambda);
            acc += integrand * (w * dlambda);
        }
        total += acc * prefactor;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c64, max_abs_diff, zeros};

    fn one(z: Complex64) -> ComplexMatrix {
        ComplexMatrix::from_element(1, 1, z)
    }

    #[test]
    fn scalar_cayley_examples() {
        let tol = Tolerances::default();
        let l = DissipativeOperator::new(one(-I), 0.0).unwrap();
        assert!(cayley(&l, &tol).unwrap().matrix()[(0, 0)].norm() < 1e-15);
        let l = DissipativeOperator::new(one(ZERO), 0.0).unwrap();
        assert!((cayley(&l, &tol).unwrap().matrix()[(0, 0)] + 1.0).norm() < 1e-15);

        let t = ContractionOperator::new(one(ZERO), 0.0).unwrap();
        assert!((inverse_cayley(&t, &tol).unwrap()[(0, 0)] + I).norm() < 1e-15);
        let t = ContractionOperator::new(one(c64(-1.0, 0.0)), 0.0).unwrap();
        assert!(inverse_cayley(&t, &tol).unwrap()[(0, 0)].norm() < 1e-15);
        let t = ContractionOperator::new(one(c64(1.0, 0.0)), 0.0).unwrap();
        assert!(matches!(
            inverse_cayley(&t, &tol),
            Err(Error::OnePointSpectrum { .. })
        ));
    }

    #[test]
    fn anti_dissipative_matrix_is_rejected() {
        assert!(DissipativeOperator::new(one(I), 1e-12).is_err());
    }

    #[test]
    fn zero_pair_maps_to_minus_one() {
        let tol = Tolerances::default();
        let h0 = SelfAdjointOperator::zero(1);
        let v = SelfAdjointOperator::zero(1);
        let (u0, u1) = selfadjoint_pair_to_unitaries(&h0, &v, &tol).unwrap();
        assert!((u0.matrix()[(0, 0)] + 1.0).norm() < 1e-15);
        assert_eq!(u0.matrix(), u1.matrix());
        let chain = resolvent_chain(&h0, &v, &[1, 2]).unwrap();
        assert!(chain.iter().all(|x| x.iter().all(|z| z.norm() == 0.0)));
    }

    #[test]
    fn pullback_matches_composition() {
        let f = LaurentPolynomial::from_coeffs([
            (2, c64(1.0, 0.5)),
            (-3, c64(-0.5, 2.0)),
            (0, c64(0.3, 0.0)),
        ]);
        let p = Pullback::new(&f);
        for &x in &[-3.0, -0.2, 0.0, 0.7, 12.0] {
            let lambda = c64(x, 0.0);
            assert!((p.eval(lambda) - f.eval(cayley_scalar(lambda))).norm() < 1e-12);
        }
    }

    #[test]
    fn pullback_divided_difference_matches_quotient() {
        let f = LaurentPolynomial::from_coeffs([(3, c64(1.0, 0.0)), (-1, c64(0.0, 2.0))]);
        let p = Pullback::new(&f);
        let (a, b) = (c64(0.4, 0.0), c64(-1.3, 0.0));
        let q = (p.eval(a) - p.eval(b)) / (a - b);
        assert!((p.divided_difference(&[a, b]) - q).norm() < 1e-12);
    }

    #[test]
    fn weighted_derivative_first_order() {
        // k = 1: (λ−i) ψ′(λ), checked by a central difference
        let f = LaurentPolynomial::from_coeffs([(2, c64(1.0, 0.0)), (-2, c64(0.5, -0.5))]);
        let p = Pullback::new(&f);
        let x = 0.37;
        let h = 1e-5;
        let fd = (p.eval(c64(x + h, 0.0)) - p.eval(c64(x - h, 0.0))) / (2.0 * h);
        let expected = (c64(x, 0.0) - I) * fd;
        assert!((p.weighted_derivative(1, c64(x, 0.0)) - expected).norm() < 1e-8);
    }

    #[test]
    fn constant_function_and_zero_gamma_vanish() {
        let c = LaurentPolynomial::constant(c64(2.0, 0.0));
        let g = GammaDensity {
            k: 2,
            eta: LaurentPolynomial::monomial(-1, c64(1.0, 0.0)),
        };
        let mode = RealLineMode::ThetaQuadrature {
            delta: 1e-3,
            nodes: 512,
        };
        assert_eq!(
            rhs_real_line(&c, &[g.clone()], RealLineMode::ExactPullback)
                .unwrap()
                .value,
            ZERO
        );
        assert!(rhs_real_line(&c, &[g], mode).unwrap().value.norm() < 1e-15);
        let f = LaurentPolynomial::monomial(3, c64(1.0, 0.0));
        assert_eq!(
            rhs_real_line(&f, &[], RealLineMode::ExactPullback)
                .unwrap()
                .value,
            ZERO
        );
    }

    #[test]
    fn increment_identity_scalar() {
        let tol = Tolerances::default();
        let h0 = SelfAdjointOperator::new(one(c64(0.5, 0.0)), 0.0).unwrap();
        let v = SelfAdjointOperator::new(one(c64(-1.25, 0.0)), 0.0).unwrap();
        let (u0, u1) = selfadjoint_pair_to_unitaries(&h0, &v, &tol).unwrap();
        let w = unitary_increment(&h0, &v).unwrap();
        assert!(max_abs_diff(&(u1.matrix() - u0.matrix()), &w) < 1e-15);
        let _ = zeros(1);
    }
}
