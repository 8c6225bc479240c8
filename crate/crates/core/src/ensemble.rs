//! Seeded random instances.
//!
//! Every draw comes from a `ChaCha8Rng` seeded with the 64-bit run seed, so
//! instances are reproducible across platforms and worker counts. Draws whose
//! spectrum is too clustered are discarded and redrawn from the same stream,
//! at most [`MAX_RESAMPLES`] times.

use nalgebra::Complex;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cayley::{cayley, eigenvalues, DissipativeOperator};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linops::{
    hermitian_decompose, matrix_exp_i, operator_norm, ComplexMatrix, ContractionOperator,
    SelfAdjointOperator, UnitaryOperator,
};
use crate::symbols::LaurentPolynomial;

pub const MAX_RESAMPLES: usize = 100;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Unitary,
    SelfadjointGenerator,
    Contraction,
    Dissipative,
    SelfadjointPair,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::Unitary,
        InstanceKind::SelfadjointGenerator,
        InstanceKind::Contraction,
        InstanceKind::Dissipative,
        InstanceKind::SelfadjointPair,
    ];

    pub fn id(self) -> &'static str {
        match self {
            InstanceKind::Unitary => "unitary",
            InstanceKind::SelfadjointGenerator => "selfadjoint-generator",
            InstanceKind::Contraction => "contraction",
            InstanceKind::Dissipative => "dissipative",
            InstanceKind::SelfadjointPair => "selfadjoint-pair",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::InvalidConfig {
                field: "kind",
                reason: format!("unknown instance kind `{s}`"),
            })
    }
}

/// Scale parameters of the draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    /// Operator norm of self-adjoint generators and perturbations, at most 2.
    pub generator_norm: f64,
    /// Contractions are scaled to norm `1 − contraction_margin`.
    pub contraction_margin: f64,
    /// Operator norm of the self-adjoint part of dissipative draws.
    pub real_part_norm: f64,
    /// Operator norm of `K` in `L = H − iK`.
    pub imaginary_part_norm: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            generator_norm: 1.0,
            contraction_margin: 0.05,
            real_part_norm: 1.0,
            imaginary_part_norm: 0.5,
        }
    }
}

/// `dim × dim` matrix of independent standard complex Gaussians.
pub fn ginibre<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar unitary: QR of a Ginibre draw with the phases of `R`'s diagonal
/// moved into `Q`.
pub fn haar_unitary<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let qr = ginibre(rng, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Hermitian `(G + G*)/2` rescaled to operator norm `norm`.
pub fn hermitian<R: Rng>(rng: &mut R, dim: usize, norm: f64) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    rescale(h, norm)
}

fn rescale(m: ComplexMatrix, norm: f64) -> ComplexMatrix {
    let current = operator_norm(&m);
    if current == 0.0 {
        m
    } else {
        m * Complex64::new(norm / current, 0.0)
    }
}

/// Smallest pairwise distance of a list of eigenvalues.
pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

fn hermitian_gap(h: &ComplexMatrix, tol: &Tolerances) -> f64 {
    match hermitian_decompose(h, tol) {
        Ok(sd) if sd.multiplicities().iter().all(|&m| m == 1) => min_gap(&sd.column_eigenvalues()),
        _ => 0.0,
    }
}

/// Repeats `draw` until the reported separation reaches `tol.separation`.
fn resample<R: Rng, T>(
    rng: &mut R,
    tol: &Tolerances,
    mut draw: impl FnMut(&mut R) -> Result<(T, f64)>,
) -> Result<T> {
    for _ in 0..MAX_RESAMPLES {
        let (value, gap) = draw(rng)?;
        if gap >= tol.separation {
            return Ok(value);
        }
    }
    Err(Error::SeparationUnreachable {
        attempts: MAX_RESAMPLES,
    })
}

pub fn random_unitary<R: Rng>(
    rng: &mut R,
    dim: usize,
    tol: &Tolerances,
) -> Result<UnitaryOperator> {
    resample(rng, tol, |r| {
        let u = haar_unitary(r, dim);
        let gap = min_gap(&eigenvalues(&u));
        Ok((UnitaryOperator::new(u, tol.class)?, gap))
    })
}

pub fn random_selfadjoint<R: Rng>(
    rng: &mut R,
    dim: usize,
    norm: f64,
    tol: &Tolerances,
) -> Result<SelfAdjointOperator> {
    if !(0.0..=2.0).contains(&norm) {
        return Err(Error::InvalidConfig {
            field: "generator_norm",
            reason: format!("self-adjoint generators need 0 <= norm <= 2, got {norm}"),
        });
    }
    resample(rng, tol, |r| {
        let h = hermitian(r, dim, norm);
        // a zero generator has nothing to separate
        let gap = if dim == 1 || norm == 0.0 {
            f64::INFINITY
        } else {
            hermitian_gap(&h, tol)
        };
        Ok((SelfAdjointOperator::new(h, tol.class)?, gap))
    })
}

/// Ginibre draw scaled to operator norm `1 − margin`.
pub fn random_contraction<R: Rng>(
    rng: &mut R,
    dim: usize,
    margin: f64,
    tol: &Tolerances,
) -> Result<ContractionOperator> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidConfig {
            field: "contraction_margin",
            reason: format!("need 0 < margin < 1, got {margin}"),
        });
    }
    resample(rng, tol, |r| {
        let t = rescale(ginibre(r, dim), 1.0 - margin);
        let ev = eigenvalues(&t);
        let to_one = ev
            .iter()
            .map(|z| (z - 1.0).norm())
            .fold(f64::INFINITY, f64::min);
        let gap = min_gap(&ev).min(if to_one >= tol.eigenvalue_margin {
            f64::INFINITY
        } else {
            0.0
        });
        Ok((ContractionOperator::new(t, tol.class)?, gap))
    })
}

/// `L = H − iK` with `K ≥ 0`, so `(L − L*)/(2i) = −K ≤ 0`.
pub fn random_dissipative<R: Rng>(
    rng: &mut R,
    dim: usize,
    params: &GenParams,
    tol: &Tolerances,
) -> Result<DissipativeOperator> {
    resample(rng, tol, |r| {
        let h = hermitian(r, dim, params.real_part_norm);
        let g = ginibre(r, dim);
        let k = rescale(&g * g.adjoint(), params.imaginary_part_norm);
        let l = h - k * Complex64::new(0.0, 1.0);
        let l = DissipativeOperator::new(l, tol.class)?;
        let t = cayley(&l, tol)?;
        let gap = min_gap(&eigenvalues(t.matrix()));
        Ok((l, gap))
    })
}

/// `(H_0, V)` with both `H_0` and `H_0 + V` separated.
pub fn random_selfadjoint_pair<R: Rng>(
    rng: &mut R,
    dim: usize,
    params: &GenParams,
    tol: &Tolerances,
) -> Result<(SelfAdjointOperator, SelfAdjointOperator)> {
    resample(rng, tol, |r| {
        let h0 = hermitian(r, dim, params.real_part_norm);
        let v = hermitian(r, dim, params.generator_norm);
        let gap = if dim == 1 {
            f64::INFINITY
        } else {
            hermitian_gap(&h0, tol).min(hermitian_gap(&(&h0 + &v), tol))
        };
        Ok((
            (
                SelfAdjointOperator::new(h0, tol.class)?,
                SelfAdjointOperator::new(v, tol.class)?,
            ),
            gap,
        ))
    })
}

/// `U_1 = e^{iA}U_0` for a fresh generator `A`, separated at both ends.
pub fn random_unitary_pair<R: Rng>(
    rng: &mut R,
    dim: usize,
    params: &GenParams,
    tol: &Tolerances,
) -> Result<(UnitaryOperator, UnitaryOperator, SelfAdjointOperator)> {
    resample(rng, tol, |r| {
        let u0 = random_unitary(r, dim, tol)?;
        let a = random_selfadjoint(r, dim, params.generator_norm, tol)?;
        let u1 = UnitaryOperator::new(matrix_exp_i(&a, 1.0).matrix() * u0.matrix(), tol.class)?;
        let gap = min_gap(&eigenvalues(u1.matrix()));
        Ok(((u0, u1, a), gap))
    })
}

/// `Σ_{|k|≤degree} c_k z^k` with complex Gaussian `c_k` scaled by
/// `1/(1+|k|)`, the constant term included.
pub fn random_trig_polynomial<R: Rng>(rng: &mut R, degree: usize) -> LaurentPolynomial {
    let d = degree as i32;
    LaurentPolynomial::from_coeffs((-d..=d).map(|k| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        (k, Complex64::new(re, im) / (1.0 + k.abs() as f64))
    }))
}

pub fn random_functions<R: Rng>(
    rng: &mut R,
    degree: usize,
    count: usize,
) -> Vec<LaurentPolynomial> {
    (0..count)
        .map(|_| random_trig_polynomial(rng, degree))
        .collect()
}

/// Named matrices of one generated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub kind: InstanceKind,
    pub matrices: Vec<(&'static str, ComplexMatrix)>,
}

pub fn gen_instance(
    kind: InstanceKind,
    dim: usize,
    seed: u64,
    params: &GenParams,
    tol: &Tolerances,
) -> Result<GeneratedInstance> {
    if dim == 0 {
        return Err(Error::InvalidConfig {
            field: "dim",
            reason: "dimension must be positive".into(),
        });
    }
    let mut r = rng(seed);
    let matrices = match kind {
        InstanceKind::Unitary => vec![("U0", random_unitary(&mut r, dim, tol)?.into_matrix())],
        InstanceKind::SelfadjointGenerator => vec![(
            "A",
            random_selfadjoint(&mut r, dim, params.generator_norm, tol)?.into_matrix(),
        )],
        InstanceKind::Contraction => vec![(
            "T0",
            random_contraction(&mut r, dim, params.contraction_margin, tol)?.into_matrix(),
        )],
        InstanceKind::Dissipative => vec![(
            "L0",
            random_dissipative(&mut r, dim, params, tol)?.into_matrix(),
        )],
        InstanceKind::SelfadjointPair => {
            let (h0, v) = random_selfadjoint_pair(&mut r, dim, params, tol)?;
            vec![("H0", h0.into_matrix()), ("V", v.into_matrix())]
        }
    };
    Ok(GeneratedInstance { kind, matrices })
}
