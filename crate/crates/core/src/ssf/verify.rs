//! Per-theorem verification: both sides of each trace formula on one
//! instance and a list of test functions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    extract_from_pair, extract_lin, extract_mult_contraction, extract_mult_unitary,
    helton_quadrature, helton_series, norm_diagnostics, SpectralShiftData,
};
use crate::cayley::{
    cayley, dissipative_lhs, resolvent_lhs, rhs_real_line, selfadjoint_pair_to_unitaries,
    DissipativeOperator, GammaDensity, RealLineMode,
};
use crate::config::Settings;
use crate::dilation::DilatedPair;
use crate::error::{Error, Result};
use crate::linops::{
    trace, ComplexMatrix, ContractionOperator, SelfAdjointOperator, UnitaryOperator,
};
use crate::paths::{remainder_lin, remainder_mult, remainder_mult_moi, MultiplicativePath};
use crate::symbols::LaurentPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    UnitaryMult,
    ContractionMult,
    Helton,
    Dissipative,
    LinUnitary,
    SelfadjointResolvent,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::UnitaryMult,
        Theorem::ContractionMult,
        Theorem::Helton,
        Theorem::Dissipative,
        Theorem::LinUnitary,
        Theorem::SelfadjointResolvent,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::UnitaryMult => "unitary-mult",
            Theorem::ContractionMult => "contraction-mult",
            Theorem::Helton => "helton",
            Theorem::Dissipative => "dissipative",
            Theorem::LinUnitary => "lin-unitary",
            Theorem::SelfadjointResolvent => "selfadjoint-resolvent",
        }
    }

    /// Relative tolerance used when none is configured.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Theorem::ContractionMult | Theorem::Dissipative => 1e-6,
            _ => 1e-7,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::InvalidConfig {
                field: "theorem",
                reason: format!("unknown theorem `{s}`"),
            })
    }
}

/// Operators a theorem is checked on.
#[derive(Debug, Clone)]
pub enum Instance {
    /// `U_0`, `A` for `U_s = e^{isA}U_0`.
    Unitary {
        u0: UnitaryOperator,
        a: SelfAdjointOperator,
    },
    /// `T_0`, `B` for `T_s = e^{isB}T_0`.
    Contraction {
        t0: ContractionOperator,
        b: SelfAdjointOperator,
    },
    /// `L_0`, `B`; the path runs through `c(L_0)`.
    Dissipative {
        l0: DissipativeOperator,
        b: SelfAdjointOperator,
    },
    UnitaryPair {
        u0: UnitaryOperator,
        u1: UnitaryOperator,
    },
    SelfAdjointPair {
        h0: SelfAdjointOperator,
        v: SelfAdjointOperator,
    },
}

impl Instance {
    pub fn dim(&self) -> usize {
        match self {
            Instance::Unitary { u0, .. } => u0.dim(),
            Instance::Contraction { t0, .. } => t0.dim(),
            Instance::Dissipative { l0, .. } => l0.dim(),
            Instance::UnitaryPair { u0, .. } => u0.dim(),
            Instance::SelfAdjointPair { h0, .. } => h0.dim(),
        }
    }

    fn family(&self) -> &'static str {
        match self {
            Instance::Unitary { .. } => "unitary",
            Instance::Contraction { .. } => "contraction",
            Instance::Dissipative { .. } => "dissipative",
            Instance::UnitaryPair { .. } => "unitary-pair",
            Instance::SelfAdjointPair { .. } => "selfadjoint-pair",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyOptions {
    pub n: usize,
    /// Probe range `M`.
    pub probes: usize,
    /// Dilation depth for contraction-mult.
    pub depth: usize,
    /// Gauss–Legendre nodes of the θ-quadrature.
    pub nodes: usize,
    /// Smallest θ cut-off.
    pub delta: f64,
    /// Relative pass tolerance.
    pub tol: f64,
    /// Disk radius of the Helton quadrature.
    pub radius: f64,
    /// Radial nodes of the Helton quadrature.
    pub disk_grid: usize,
    /// Circle samples for the `‖η_n‖_1` estimate.
    pub l1_grid: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n: 2,
            probes: 8,
            depth: 9,
            nodes: 4096,
            delta: 1e-3,
            tol: 1e-7,
            radius: 0.99,
            disk_grid: 48,
            l1_grid: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionResult {
    pub f_descriptor: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
}

impl FunctionResult {
    fn new(f: &LaurentPolynomial, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = relative(abs_err, lhs.norm());
        Self {
            f_descriptor: f.to_string(),
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            abs_err,
            rel_err,
            pass: rel_err <= tol,
        }
    }
}

fn relative(abs_err: f64, scale: f64) -> f64 {
    if abs_err == 0.0 {
        0.0
    } else {
        abs_err / scale.max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `‖η_n‖_1` estimate.
    pub eta_l1: f64,
    /// `‖η_n‖_1 / ‖A‖_n^n`.
    pub schatten_ratio: f64,
    /// `sup_q |η̂_n(q)| / ‖A‖_n^n`.
    pub sup_ratio: f64,
    /// `‖A‖_n^n` of the perturbation.
    pub schatten_power: f64,
    /// Largest `|Tr 𝓡_U − Tr 𝓡_T|` over probes and test functions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilation_gap: Option<f64>,
    /// Largest θ-quadrature gap to the exact pullback.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_gap: Option<f64>,
    /// Largest relative gap of the disk quadrature to the series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub helton_quadrature_gap: Option<f64>,
    /// Largest gap between two representations of the left side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub config: serde_json::Value,
    pub version: String,
    pub results: Vec<FunctionResult>,
    pub diagnostics: Diagnostics,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn max_rel_err(&self) -> f64 {
        self.results.iter().map(|r| r.rel_err).fold(0.0, f64::max)
    }
}

fn par_map<T: Send>(
    fs: &[LaurentPolynomial],
    g: impl Fn(&LaurentPolynomial) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    fs.par_iter().map(&g).collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn check_pairing(theorem: Theorem, instance: &Instance) -> Result<()> {
    let ok = matches!(
        (theorem, instance),
        (Theorem::UnitaryMult, Instance::Unitary { .. })
            | (Theorem::ContractionMult, Instance::Contraction { .. })
            | (Theorem::Helton, Instance::Contraction { .. })
            | (Theorem::Helton, Instance::Unitary { .. })
            | (Theorem::Dissipative, Instance::Dissipative { .. })
            | (Theorem::LinUnitary, Instance::UnitaryPair { .. })
            | (
                Theorem::SelfadjointResolvent,
                Instance::SelfAdjointPair { .. }
            )
    );
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig {
            field: "theorem",
            reason: format!(
                "{theorem} cannot be checked on a {} instance",
                instance.family()
            ),
        })
    }
}

/// Both sides of `theorem` on `instance` for every function in `functions`.
///
/// The left side comes from the operator expression, the right side from
/// the extracted spectral shift data. Returns the data alongside the report.
pub fn verify(
    theorem: Theorem,
    instance: &Instance,
    functions: &[LaurentPolynomial],
    opts: &VerifyOptions,
    settings: &Settings,
) -> Result<(VerificationReport, SpectralShiftData)> {
    check_pairing(theorem, instance)?;
    let n = opts.n;
    let m = opts.probes;
    let mut diag = Diagnostics::default();
    let sides: Vec<(Complex64, Complex64)>;
    let ssf;
    let perturbation: ComplexMatrix;

    match (theorem, instance) {
        (Theorem::UnitaryMult, Instance::Unitary { u0, a }) => {
            ssf = extract_mult_unitary(u0, a, n, m)?;
            let path = MultiplicativePath::unitary(u0.clone(), a.clone())?;
            let lhs = par_map(functions, |f| {
                Ok(remainder_mult_moi(&path, f, n, settings)?.trace())
            })?;
            let cross = par_map(functions, |f| Ok(remainder_mult(&path, f, n)?.trace()))?;
            diag.cross_check_gap =
                Some(max_of(lhs.iter().zip(&cross).map(|(x, y)| (x - y).norm())));
            sides = zip_predict(&ssf, functions, lhs)?;
            perturbation = a.matrix().clone();
        }
        (Theorem::ContractionMult, Instance::Contraction { t0, b }) => {
            let top = functions
                .iter()
                .map(|f| f.max_abs_degree().max(0) as usize)
                .fold(m, usize::max);
            let pair = DilatedPair::new(t0, b, n, top, opts.depth, settings)?;
            let (data, probe_gap) = extract_from_pair(&pair, n, m)?;
            ssf = data;
            let parts = par_map(functions, |f| pair.remainder(f))?;
            let lhs = parts.iter().map(|r| trace(&r.contraction)).collect();
            diag.dilation_gap = Some(max_of(parts.iter().map(|r| r.trace_gap)).max(probe_gap));
            sides = zip_predict(&ssf, functions, lhs)?;
            perturbation = b.matrix().clone();
        }
        (Theorem::Helton, inst) => {
            let (path, data, pert) = match inst {
                Instance::Contraction { t0, b } => (
                    MultiplicativePath::contraction(t0.clone(), b.clone())?,
                    extract_mult_contraction(t0, b, n, m)?,
                    b.matrix().clone(),
                ),
                Instance::Unitary { u0, a } => (
                    MultiplicativePath::unitary(u0.clone(), a.clone())?,
                    extract_mult_unitary(u0, a, n, m)?,
                    a.matrix().clone(),
                ),
                _ => unreachable!("pairing checked above"),
            };
            ssf = data;
            let lhs = par_map(functions, |f| Ok(remainder_mult(&path, f, n)?.trace()))?;
            let series = par_map(functions, |f| helton_series(&ssf, f))?;
            let predicted = par_map(functions, |f| ssf.predict_trace(f))?;
            diag.cross_check_gap = Some(max_of(
                series.iter().zip(&predicted).map(|(s, p)| (s - p).norm()),
            ));
            let disk = par_map(functions, |f| {
                helton_quadrature(&ssf, f, opts.radius, opts.disk_grid)
            })?;
            diag.helton_quadrature_gap = Some(max_of(
                disk.iter()
                    .zip(&series)
                    .map(|(q, s)| relative((q - s).norm(), s.norm())),
            ));
            sides = lhs.into_iter().zip(series).collect();
            perturbation = pert;
        }
        (Theorem::Dissipative, Instance::Dissipative { l0, b }) => {
            let t0 = cayley(l0, &settings.tol)?;
            ssf = extract_mult_contraction(&t0, b, n, m)?;
            let gammas = gammas(&ssf);
            let lhs = par_map(functions, |f| {
                Ok(trace(&dissipative_lhs(l0, b, f, n, settings)?))
            })?;
            let rhs = par_map(functions, |f| {
                Ok(rhs_real_line(f, &gammas, RealLineMode::ExactPullback)?.value)
            })?;
            let quad = par_map(functions, |f| {
                let mode = RealLineMode::ThetaQuadrature {
                    delta: opts.delta,
                    nodes: opts.nodes,
                };
                Ok(rhs_real_line(f, &gammas, mode)?.gap.unwrap_or(0.0))
            })?;
            diag.quadrature_gap = Some(max_of(quad));
            sides = lhs.into_iter().zip(rhs).collect();
            perturbation = b.matrix().clone();
        }
        (Theorem::LinUnitary, Instance::UnitaryPair { u0, u1 }) => {
            ssf = extract_lin(u0, u1, n, m, settings)?;
            let lin = par_map(functions, |f| remainder_lin(u0, u1, f, n, settings))?;
            diag.cross_check_gap = Some(max_of(lin.iter().map(|r| r.residual)));
            let lhs = lin.iter().map(|r| trace(&r.remainder.matrix)).collect();
            sides = zip_predict(&ssf, functions, lhs)?;
            perturbation = u1.matrix() - u0.matrix();
        }
        (Theorem::SelfadjointResolvent, Instance::SelfAdjointPair { h0, v }) => {
            let (u0, u1) = selfadjoint_pair_to_unitaries(h0, v, &settings.tol)?;
            ssf = extract_lin(&u0, &u1, n, m, settings)?;
            let gammas = gammas(&ssf);
            let lhs = par_map(functions, |f| {
                Ok(trace(&resolvent_lhs(h0, v, f, n, settings)?))
            })?;
            let lin = par_map(functions, |f| {
                Ok(trace(
                    &remainder_lin(&u0, &u1, f, n, settings)?.remainder.matrix,
                ))
            })?;
            diag.cross_check_gap = Some(max_of(lhs.iter().zip(&lin).map(|(x, y)| (x - y).norm())));
            let rhs = par_map(functions, |f| {
                Ok(rhs_real_line(f, &gammas, RealLineMode::ExactPullback)?.value)
            })?;
            sides = lhs.into_iter().zip(rhs).collect();
            perturbation = u1.matrix() - u0.matrix();
        }
        _ => unreachable!("pairing checked above"),
    }

    let norms = norm_diagnostics(&ssf, &perturbation, opts.l1_grid)?;
    diag.eta_l1 = norms.eta_l1;
    diag.schatten_ratio = norms.l1_ratio;
    diag.sup_ratio = norms.sup_ratio;
    diag.schatten_power = norms.schatten_power;

    let results = functions
        .iter()
        .zip(sides)
        .map(|(f, (lhs, rhs))| FunctionResult::new(f, lhs, rhs, opts.tol))
        .collect();
    let config = serde_json::json!({
        "dim": instance.dim(),
        "instance": instance.family(),
        "options": opts,
    });
    let report = VerificationReport {
        theorem,
        config,
        version: crate::VERSION.to_string(),
        results,
        diagnostics: diag,
    };
    Ok((report, ssf))
}

fn zip_predict(
    ssf: &SpectralShiftData,
    functions: &[LaurentPolynomial],
    lhs: Vec<Complex64>,
) -> Result<Vec<(Complex64, Complex64)>> {
    let rhs = par_map(functions, |f| ssf.predict_trace(f))?;
    Ok(lhs.into_iter().zip(rhs).collect())
}

/// `γ_k` built from the extracted `η_k`.
pub fn gammas(ssf: &SpectralShiftData) -> Vec<GammaDensity> {
    ssf.etas()
        .into_iter()
        .map(|(k, eta)| GammaDensity { k: k as u32, eta })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c64, zeros};

    fn fs() -> Vec<LaurentPolynomial> {
        vec![
            LaurentPolynomial::from_coeffs([(2, c64(1.0, 0.0)), (-1, c64(0.0, 0.5))]),
            LaurentPolynomial::monomial(3, c64(0.5, -0.5)),
        ]
    }

    #[test]
    fn theorem_ids_roundtrip() {
        for t in Theorem::ALL {
            assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
            assert_eq!(
                serde_json::to_string(&t).unwrap(),
                format!("\"{}\"", t.id())
            );
        }
        assert!("nope".parse::<Theorem>().is_err());
    }

    #[test]
    fn zero_perturbation_gives_zero_errors() {
        let mut u = zeros(2);
        u[(0, 0)] = c64(0.0, 1.0);
        u[(1, 1)] = c64(-0.6, 0.8);
        let u0 = UnitaryOperator::new(u, 1e-12).unwrap();
        let a = SelfAdjointOperator::zero(2);
        let opts = VerifyOptions {
            probes: 4,
            ..VerifyOptions::default()
        };
        let inst = Instance::Unitary { u0: u0.clone(), a };
        let (r, _) = verify(
            Theorem::UnitaryMult,
            &inst,
            &fs(),
            &opts,
            &Settings::default(),
        )
        .unwrap();
        assert!(r.results.iter().all(|x| x.abs_err == 0.0 && x.pass));
        let inst = Instance::UnitaryPair {
            u0: u0.clone(),
            u1: u0,
        };
        let (r, _) = verify(
            Theorem::LinUnitary,
            &inst,
            &fs(),
            &opts,
            &Settings::default(),
        )
        .unwrap();
        assert!(r.results.iter().all(|x| x.abs_err == 0.0 && x.pass));
    }

    #[test]
    fn mismatched_instance_is_rejected() {
        let u0 = UnitaryOperator::new(crate::linops::identity(1), 0.0).unwrap();
        let inst = Instance::UnitaryPair {
            u0: u0.clone(),
            u1: u0,
        };
        let err = verify(
            Theorem::Dissipative,
            &inst,
            &fs(),
            &VerifyOptions::default(),
            &Settings::default(),
        );
        assert!(matches!(
            err,
            Err(Error::InvalidConfig {
                field: "theorem",
                ..
            })
        ));
    }
}
