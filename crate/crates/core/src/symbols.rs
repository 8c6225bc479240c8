//! Laurent polynomials on the unit circle and their scalar calculus.
//!
//! A [`LaurentPolynomial`] `f(z) = Σ_k f̂(k) z^k` is the only function class
//! implemented. Every trace formula in the crate is linear in the Fourier
//! coefficients, so finite support costs nothing.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const TWO_PI_I: Complex64 = Complex64 {
    re: 0.0,
    im: 2.0 * PI,
};

/// Finitely supported Fourier series. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i32, Complex64>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_coeffs([(0, c)])
    }

    /// `c z^k`.
    pub fn monomial(k: i32, c: Complex64) -> Self {
        Self::from_coeffs([(k, c)])
    }

    /// Duplicate degrees are summed; zero results are dropped.
    pub fn from_coeffs(pairs: impl IntoIterator<Item = (i32, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in pairs {
            *coeffs.entry(k).or_insert(ZERO) += c;
        }
        coeffs.retain(|_, c| *c != ZERO);
        Self { coeffs }
    }

    pub fn coeff(&self, k: i32) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(ZERO)
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, Complex64> {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .values()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `max |k|` over the support, 0 for the zero polynomial.
    pub fn max_abs_degree(&self) -> i32 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_coeffs(self.iter().map(|(k, c)| (k, c * s)))
    }

    /// Coefficients of `g` with `g(U) = f(U)*` for unitary `U`:
    /// `ĝ(k) = conj f̂(−k)`.
    pub fn adjoint(&self) -> Self {
        Self::from_coeffs(self.iter().map(|(k, c)| (-k, c.conj())))
    }

    /// `k`-th complex derivative, exact on coefficients.
    pub fn derivative(&self, k: u32) -> Self {
        Self::from_coeffs(
            self.iter()
                .map(|(m, c)| (m - k as i32, c * falling_factorial(m, k))),
        )
    }

    /// `f(z)` for `z ≠ 0`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.iter().map(|(k, c)| c * z.powi(k)).sum()
    }

    /// `Σ |k|^n |f̂(k)|`.
    pub fn class_norm(&self, n: u32) -> f64 {
        self.iter()
            .map(|(k, c)| (k.unsigned_abs() as f64).powi(n as i32) * c.norm())
            .sum()
    }

    /// Analytic part (degrees ≥ 0) and co-analytic part (degrees ≤ −1).
    pub fn split_plus_minus(&self) -> (Self, Self) {
        let plus = self.iter().filter(|&(k, _)| k >= 0);
        let minus = self.iter().filter(|&(k, _)| k < 0);
        (Self::from_coeffs(plus), Self::from_coeffs(minus))
    }

    /// Evaluates `f^{[n]}` at `points.len() = n + 1` nonzero nodes.
    ///
    /// Uses the closed forms `(z^m)^{[n]} = h_{m−n}(z_0,…,z_n)` for `m ≥ 0`
    /// and `(z^{−j})^{[n]} = (−1)^n Π z_i^{−1} · h_{j−1}(z_0^{−1},…,z_n^{−1})`
    /// for `j ≥ 1`, with `h_d` the complete homogeneous symmetric polynomial.
    /// Both are polynomial in the nodes and so exact at coincident points.
    pub fn divided_difference(&self, points: &[Complex64]) -> Complex64 {
        assert!(
            !points.is_empty(),
            "divided difference needs at least one node"
        );
        let n = points.len() - 1;
        let top = self.coeffs.keys().next_back().copied().unwrap_or(0);
        let bottom = self.coeffs.keys().next().copied().unwrap_or(0);
        let mut total = ZERO;

        if top >= n as i32 {
            let h = complete_homogeneous(points, (top - n as i32) as usize);
            for (m, c) in self.coeffs.range(n as i32..) {
                total += c * h[(*m - n as i32) as usize];
            }
        }
        if bottom < 0 {
            let inv: Vec<Complex64> = points.iter().map(|z| z.inv()).collect();
            total += self.inverse_part(&inv, n, (-bottom) as usize);
        }
        total
    }

    fn inverse_part(&self, inv: &[Complex64], n: usize, max_j: usize) -> Complex64 {
        let h = complete_homogeneous(inv, max_j - 1);
        let mut prefactor: Complex64 = inv.iter().product();
        if n % 2 == 1 {
            prefactor = -prefactor;
        }
        let mut acc = ZERO;
        for (m, c) in self.coeffs.range(..0) {
            acc += c * h[(-*m - 1) as usize];
        }
        acc * prefactor
    }
}

/// `h_0, …, h_max` of the given variables.
///
/// Dynamic programme over variables: `H_j[d] = H_{j−1}[d] + x_j H_j[d−1]`.
pub fn complete_homogeneous(vars: &[Complex64], max: usize) -> Vec<Complex64> {
    let mut h = vec![ZERO; max + 1];
    h[0] = ONE;
    for &x in vars {
        for d in 1..=max {
            let prev = h[d - 1];
            h[d] += x * prev;
        }
    }
    h
}

/// Divided difference of `x ↦ (x − a)^{−j}` (`j ≥ 0`) at the given nodes.
pub fn shifted_inverse_power_dd(j: u32, points: &[Complex64], a: Complex64) -> Complex64 {
    let n = points.len() - 1;
    if j == 0 {
        return if n == 0 { ONE } else { ZERO };
    }
    let u: Vec<Complex64> = points.iter().map(|x| (x - a).inv()).collect();
    let h = complete_homogeneous(&u, j as usize - 1);
    let mut prefactor: Complex64 = u.iter().product();
    if n % 2 == 1 {
        prefactor = -prefactor;
    }
    prefactor * h[j as usize - 1]
}

/// `m (m−1) ⋯ (m−k+1)` as a float.
pub fn falling_factorial(m: i32, k: u32) -> f64 {
    (0..k as i32).map(|j| (m - j) as f64).product()
}

/// `∫_𝕋 f(z) η(z) dz = 2πi Σ_k f̂(k) η̂(−k−1)`.
pub fn contour_pair(f: &LaurentPolynomial, eta: &LaurentPolynomial) -> Complex64 {
    let mut acc = ZERO;
    for (k, c) in f.iter() {
        acc += c * eta.coeff(-k - 1);
    }
    acc * TWO_PI_I
}

/// Point of the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.norm() <= 1.0 + 1e-15) {
            return Err(Error::InvalidConfig {
                field: "z",
                reason: format!("|z| = {} lies outside the closed disk", z.norm()),
            });
        }
        Ok(Self(z))
    }

    pub fn z(self) -> Complex64 {
        self.0
    }
}

/// Poisson extension value and its Wirtinger partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonValue {
    pub value: Complex64,
    pub d_dz: Complex64,
    pub d_dzbar: Complex64,
}

/// `f̃(z, z̄) = f̂(0) + Σ_{n≥1} f̂(n) z^n + Σ_{n≥1} f̂(−n) z̄^n` and partials.
pub fn poisson_eval(f: &LaurentPolynomial, point: DiskPoint) -> PoissonValue {
    let z = point.z();
    let zb = z.conj();
    let mut out = PoissonValue {
        value: f.coeff(0),
        d_dz: ZERO,
        d_dzbar: ZERO,
    };
    for (k, c) in f.iter() {
        let n = k.unsigned_abs() as i32;
        if k > 0 {
            out.value += c * z.powi(n);
            out.d_dz += c * (n as f64) * z.powi(n - 1);
        } else if k < 0 {
            out.value += c * zb.powi(n);
            out.d_dzbar += c * (n as f64) * zb.powi(n - 1);
        }
    }
    out
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        LaurentPolynomial::from_coeffs(self.iter().chain(rhs.iter()))
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        LaurentPolynomial::from_coeffs(self.iter().chain(rhs.iter().map(|(k, c)| (k, -c))))
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(-ONE)
    }
}

impl Mul<Complex64> for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Complex64) -> LaurentPolynomial {
        self.scale(rhs)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({}{:+}i)z^{}", c.re, c.im, k)?;
        }
        Ok(())
    }
}

/// On-disk form `{"coeffs": {"k": [re, im], ...}}`.
#[derive(Serialize, Deserialize)]
struct FunctionFile {
    coeffs: BTreeMap<String, [f64; 2]>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionFile {
            coeffs: self
                .iter()
                .map(|(k, c)| (k.to_string(), [c.re, c.im]))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = FunctionFile::deserialize(d)?;
        let mut pairs = Vec::with_capacity(file.coeffs.len());
        for (k, [re, im]) in file.coeffs {
            let k: i32 = k
                .trim()
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("bad degree key {k:?}")))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(serde::de::Error::custom(format!(
                    "non-finite coefficient at {k}"
                )));
            }
            pairs.push((k, Complex64::new(re, im)));
        }
        Ok(LaurentPolynomial::from_coeffs(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c64, I};

    fn z(k: i32) -> LaurentPolynomial {
        LaurentPolynomial::monomial(k, ONE)
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            z(3).derivative(2),
            LaurentPolynomial::monomial(1, c64(6.0, 0.0))
        );
        assert!(LaurentPolynomial::constant(c64(2.0, 1.0))
            .derivative(1)
            .is_zero());
        // z^{-1} -> -z^{-2} -> 2 z^{-3}
        assert_eq!(
            z(-1).derivative(2),
            LaurentPolynomial::monomial(-3, c64(2.0, 0.0))
        );
    }

    #[test]
    fn divided_difference_examples() {
        assert!((z(3).divided_difference(&[ONE, I]) - I).norm() < 1e-15);
        assert!((z(2).divided_difference(&[I, I]) - 2.0 * I).norm() < 1e-15);
        assert!((z(-1).divided_difference(&[I, -I]) - c64(-1.0, 0.0)).norm() < 1e-15);
        // below the order the difference vanishes
        assert_eq!(z(1).divided_difference(&[ONE, I, -I]), ZERO);
    }

    #[test]
    fn confluent_negative_power_is_derivative() {
        // (z^{-2})' = -2 z^{-3}
        let p = Complex64::from_polar(1.0, 0.3);
        let dd = z(-2).divided_difference(&[p, p]);
        assert!((dd + 2.0 * p.powi(-3)).norm() < 1e-14);
        // second order: (z^{-2})''/2 = 3 z^{-4}
        let dd2 = z(-2).divided_difference(&[p, p, p]);
        assert!((dd2 - 3.0 * p.powi(-4)).norm() < 1e-13);
    }

    #[test]
    fn class_norm_examples() {
        assert_eq!(z(3).class_norm(2), 9.0);
        assert_eq!(LaurentPolynomial::constant(ONE).class_norm(3), 0.0);
        assert_eq!((&z(1) + &z(-2)).class_norm(1), 3.0);
    }

    #[test]
    fn split_examples() {
        let (p, m) = (&z(1) + &z(-1)).split_plus_minus();
        assert_eq!((p, m), (z(1), z(-1)));
        let (p, m) = LaurentPolynomial::constant(ONE).split_plus_minus();
        assert_eq!(p, LaurentPolynomial::constant(ONE));
        assert!(m.is_zero());
    }

    #[test]
    fn contour_pair_examples() {
        assert!((contour_pair(&z(2), &z(-3)) - TWO_PI_I).norm() < 1e-15);
        assert_eq!(contour_pair(&z(1), &z(-1)), ZERO);
        for m in -4..4 {
            for q in -4..4 {
                let expected = if m + q == -1 { TWO_PI_I } else { ZERO };
                assert_eq!(contour_pair(&z(m), &z(q)), expected);
            }
        }
    }

    #[test]
    fn poisson_examples() {
        let half = DiskPoint::new(c64(0.5, 0.0)).unwrap();
        assert!((poisson_eval(&z(2), half).value - c64(0.25, 0.0)).norm() < 1e-15);
        assert!((poisson_eval(&z(-1), half).value - c64(0.5, 0.0)).norm() < 1e-15);
        let p = DiskPoint::new(c64(0.3, -0.4)).unwrap();
        assert_eq!(poisson_eval(&z(2), p).d_dzbar, ZERO);
        assert!(DiskPoint::new(c64(1.1, 0.0)).is_err());
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let f = LaurentPolynomial::from_coeffs([(1, ONE), (1, -ONE), (2, ZERO)]);
        assert!(f.is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let f = LaurentPolynomial::from_coeffs([(-2, c64(1.0, -1.0)), (3, c64(0.5, 0.0))]);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"-2\":[1.0,-1.0]"));
        let back: LaurentPolynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<LaurentPolynomial>(r#"{"coeffs":{"x":[1,0]}}"#).is_err());
    }

    #[test]
    fn shifted_inverse_power_matches_direct_difference() {
        let a = c64(0.0, 1.0);
        let (x0, x1) = (c64(0.3, 0.0), c64(-1.2, 0.0));
        let g = |x: Complex64| (x - a).powi(-3);
        let direct = (g(x0) - g(x1)) / (x0 - x1);
        assert!((shifted_inverse_power_dd(3, &[x0, x1], a) - direct).norm() < 1e-14);
        assert!((shifted_inverse_power_dd(3, &[x0], a) - g(x0)).norm() < 1e-15);
    }
}
