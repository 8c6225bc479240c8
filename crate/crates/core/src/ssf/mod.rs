//! Spectral shift data from monomial probes.
//!
//! Every trace formula here is linear in `f̂`, so the traces of the
//! remainders of `z^m`, `|m| ≤ M`, determine the functional on all Laurent
//! polynomials supported in `[−M, M]`. With
//! `∫_𝕋 z^j η dz = 2πi η̂(−j−1)` the probe of `z^m` reads
//!
//! ```text
//! Tr 𝓡(z^m) = 2πi Σ_k m(m−1)⋯(m−k+1) η̂_k(k−m−1).
//! ```

mod export;
mod helton;
mod verify;

pub use export::{read_json, synthesize, write_eta_csv, write_json, SsfFile};
pub use helton::{helton_quadrature, helton_series};
pub use verify::{
    verify, Diagnostics, FunctionResult, Instance, Theorem, VerificationReport, VerifyOptions,
};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::dilation::DilatedPair;
use crate::error::{Error, Result};
use crate::linops::{
    schatten_norm, trace, ComplexMatrix, ContractionOperator, SelfAdjointOperator, UnitaryOperator,
};
use crate::paths::{remainder_lin, MultiplicativePath, RemainderKind, RemainderTable};
use crate::symbols::{contour_pair, falling_factorial, LaurentPolynomial};

const TWO_PI_I: Complex64 = Complex64 {
    re: 0.0,
    im: 2.0 * PI,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    /// `η̂_n(0…n−1) = 0`, all lower-order mass in `η_1 = Σ c_m z^{−m}`.
    Default,
    /// Probe `m ∈ {1,…,n−1}` goes to `η_m = c z^{−1}`.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralShiftData {
    pub n: usize,
    pub kind: RemainderKind,
    pub gauge: Gauge,
    pub hat_eta_n: BTreeMap<i32, Complex64>,
    /// `η_k` for `k = 1, …, n−1` (index `k − 1`); empty for the linear kind.
    pub lower: Vec<LaurentPolynomial>,
    pub probe_range: usize,
    pub probe_traces: BTreeMap<i32, Complex64>,
}

impl SpectralShiftData {
    /// Solves the decoupled probe system in the requested gauge.
    pub fn from_probes(
        kind: RemainderKind,
        n: usize,
        probe_range: usize,
        probe_traces: BTreeMap<i32, Complex64>,
        gauge: Gauge,
    ) -> Result<Self> {
        check_probe_range(n, probe_range)?;
        let m_top = probe_range as i32;
        let ni = n as i32;
        let mut hat_eta_n = BTreeMap::new();
        let mut lower = if kind == RemainderKind::Linear {
            Vec::new()
        } else {
            vec![LaurentPolynomial::zero(); n - 1]
        };
        for m in -m_top..=m_top {
            let tr = *probe_traces.get(&m).ok_or_else(|| Error::InvalidConfig {
                field: "probes",
                reason: format!("missing probe trace for m = {m}"),
            })?;
            if m >= ni || m <= -1 {
                let q = ni - m - 1;
                hat_eta_n.insert(q, tr / (TWO_PI_I * falling_factorial(m, n as u32)));
            } else if m >= 1 && !lower.is_empty() {
                let (k, q, denom) = match gauge {
                    Gauge::Default => (1, -m, m as f64),
                    Gauge::Diagonal => (m as usize, -1, falling_factorial(m, m as u32)),
                };
                let add = LaurentPolynomial::monomial(q, tr / (TWO_PI_I * denom));
                lower[k - 1] = &lower[k - 1] + &add;
            }
        }
        Ok(Self {
            n,
            kind,
            gauge,
            hat_eta_n,
            lower,
            probe_range,
            probe_traces,
        })
    }

    pub fn eta_n(&self) -> LaurentPolynomial {
        LaurentPolynomial::from_coeffs(self.hat_eta_n.iter().map(|(&q, &c)| (q, c)))
    }

    /// `η_k`, `1 ≤ k ≤ n`.
    pub fn eta(&self, k: usize) -> LaurentPolynomial {
        if k == self.n {
            self.eta_n()
        } else if k >= 1 && k <= self.lower.len() {
            self.lower[k - 1].clone()
        } else {
            LaurentPolynomial::zero()
        }
    }

    /// `(k, η_k)` for the nonzero members of the family.
    pub fn etas(&self) -> Vec<(usize, LaurentPolynomial)> {
        (1..=self.n)
            .map(|k| (k, self.eta(k)))
            .filter(|(_, e)| !e.is_zero())
            .collect()
    }

    /// `c_1, …, c_{n−1}` of `η_1 = Σ c_m z^{−m}`; `None` outside the default
    /// gauge and for the linear kind.
    pub fn eta1_coeffs(&self) -> Option<Vec<Complex64>> {
        if self.gauge != Gauge::Default || self.lower.is_empty() {
            return None;
        }
        Some(
            (1..self.n as i32)
                .map(|m| self.lower[0].coeff(-m))
                .collect(),
        )
    }

    pub fn with_gauge(&self, gauge: Gauge) -> Result<Self> {
        Self::from_probes(
            self.kind,
            self.n,
            self.probe_range,
            self.probe_traces.clone(),
            gauge,
        )
    }

    /// `Σ_k ∫_𝕋 f^{(k)} η_k dz`.
    pub fn predict_trace(&self, f: &LaurentPolynomial) -> Result<Complex64> {
        self.check_support(f)?;
        Ok(self
            .etas()
            .iter()
            .map(|(k, eta)| contour_pair(&f.derivative(*k as u32), eta))
            .sum())
    }

    pub(crate) fn check_support(&self, f: &LaurentPolynomial) -> Result<()> {
        let degree = f.max_abs_degree();
        if degree > self.probe_range as i32 {
            return Err(Error::SupportExceedsProbes {
                degree,
                probes: self.probe_range as i32,
            });
        }
        Ok(())
    }
}

fn check_probe_range(n: usize, m: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig {
            field: "n",
            reason: format!("order must be at least 2, got {n}"),
        });
    }
    if m < n + 2 {
        return Err(Error::InvalidConfig {
            field: "probes",
            reason: format!("probe range {m} must be at least n + 2 = {}", n + 2),
        });
    }
    Ok(())
}

/// Traces of `probe(z^m)` for `m ∈ [−M, M]`, in parallel, ordered by `m`.
pub fn probe_traces(
    range: usize,
    probe: impl Fn(&LaurentPolynomial) -> Result<Complex64> + Sync,
) -> Result<BTreeMap<i32, Complex64>> {
    let m = range as i32;
    let values: Vec<Complex64> = (-m..=m)
        .into_par_iter()
        .map(|k| probe(&LaurentPolynomial::monomial(k, Complex64::new(1.0, 0.0))))
        .collect::<Result<_>>()?;
    Ok((-m..=m).zip(values).collect())
}

pub fn extract_mult_unitary(
    u0: &UnitaryOperator,
    a: &SelfAdjointOperator,
    n: usize,
    probe_range: usize,
) -> Result<SpectralShiftData> {
    check_probe_range(n, probe_range)?;
    let path = MultiplicativePath::unitary(u0.clone(), a.clone())?;
    let table = RemainderTable::new(&path, probe_range, n)?;
    let traces = probe_traces(probe_range, |f| Ok(table.remainder(f)?.trace()))?;
    SpectralShiftData::from_probes(
        RemainderKind::MultUnitary,
        n,
        probe_range,
        traces,
        Gauge::Default,
    )
}

/// Contraction extraction with probes taken on `ℋ` directly.
pub fn extract_mult_contraction(
    t0: &ContractionOperator,
    b: &SelfAdjointOperator,
    n: usize,
    probe_range: usize,
) -> Result<SpectralShiftData> {
    check_probe_range(n, probe_range)?;
    let path = MultiplicativePath::contraction(t0.clone(), b.clone())?;
    let table = RemainderTable::new(&path, probe_range, n)?;
    let traces = probe_traces(probe_range, |f| Ok(table.remainder(f)?.trace()))?;
    SpectralShiftData::from_probes(
        RemainderKind::MultContraction,
        n,
        probe_range,
        traces,
        Gauge::Default,
    )
}

/// Contraction extraction with probes taken on the dilation, `depth` copies
/// per side. Also returns the largest probe gap `|Tr 𝓡_U − Tr 𝓡_T|`.
pub fn extract_mult_dilated(
    t0: &ContractionOperator,
    b: &SelfAdjointOperator,
    n: usize,
    probe_range: usize,
    depth: usize,
    settings: &Settings,
) -> Result<(SpectralShiftData, f64)> {
    check_probe_range(n, probe_range)?;
    if depth < probe_range + 1 {
        return Err(Error::DepthTooSmall {
            depth,
            required: probe_range + 1,
        });
    }
    let pair = DilatedPair::new(t0, b, n, probe_range, depth, settings)?;
    extract_from_pair(&pair, n, probe_range)
}

/// Probes of an already built dilation pair; see [`extract_mult_dilated`].
pub fn extract_from_pair(
    pair: &DilatedPair,
    n: usize,
    probe_range: usize,
) -> Result<(SpectralShiftData, f64)> {
    check_probe_range(n, probe_range)?;
    let gaps = Mutex::new(0.0f64);
    let traces = probe_traces(probe_range, |f| {
        let r = pair.remainder(f)?;
        let mut g = gaps.lock().expect("gap lock");
        *g = g.max(r.trace_gap);
        Ok(r.blocks.total)
    })?;
    let gap = gaps.into_inner().expect("gap lock");
    let ssf = SpectralShiftData::from_probes(
        RemainderKind::MultContraction,
        n,
        probe_range,
        traces,
        Gauge::Default,
    )?;
    Ok((ssf, gap))
}

pub fn extract_lin(
    u0: &UnitaryOperator,
    u1: &UnitaryOperator,
    n: usize,
    probe_range: usize,
    settings: &Settings,
) -> Result<SpectralShiftData> {
    check_probe_range(n, probe_range)?;
    let traces = probe_traces(probe_range, |f| {
        Ok(trace(
            &remainder_lin(u0, u1, f, n, settings)?.remainder.matrix,
        ))
    })?;
    SpectralShiftData::from_probes(
        RemainderKind::Linear,
        n,
        probe_range,
        traces,
        Gauge::Default,
    )
}

/// Minimum-norm solution of the probe system with every `η_k` free on a
/// wide Fourier window and `η̂_n(0…n−1)` not pinned.
///
/// The only structural constraint imposed is the one stated for
/// `f̂(1…n−1) = 0`: probes outside `{1,…,n−1}` are reproduced by `η_n`
/// alone.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSolve {
    /// `η_1, …, η_n`.
    pub etas: Vec<LaurentPolynomial>,
    /// Max probe residual of the solution.
    pub residual: f64,
    /// Largest mode of `η_k`, `k < n`, outside degrees `−(n−k)…−1`.
    pub outside_structure: f64,
}

pub fn raw_solve(ssf: &SpectralShiftData) -> Result<RawSolve> {
    let n = ssf.n;
    let top = ssf.probe_range as i32;
    let families = if ssf.kind == RemainderKind::Linear {
        1
    } else {
        n
    };
    // family index 0 is η_n, then η_1 … η_{n−1}
    let order = |f: usize| if f == 0 { n } else { f };
    let window = top + n as i32;
    let width = (2 * window + 1) as usize;
    let col = |f: usize, q: i32| f * width + (q + window) as usize;

    let mut rows: Vec<(Vec<(usize, Complex64)>, Complex64)> = Vec::new();
    for (&m, &tr) in &ssf.probe_traces {
        let term = |f: usize| {
            let k = order(f);
            (
                col(f, k as i32 - m - 1),
                TWO_PI_I * falling_factorial(m, k as u32),
            )
        };
        let lower_band = m >= 1 && m < n as i32;
        if lower_band {
            rows.push(((0..families).map(term).collect(), tr));
        } else {
            rows.push((vec![term(0)], tr));
            if families > 1 {
                rows.push(((1..families).map(term).collect(), Complex64::new(0.0, 0.0)));
            }
        }
    }
    let mut a = DMatrix::<Complex64>::zeros(rows.len(), families * width);
    let mut rhs = DVector::<Complex64>::zeros(rows.len());
    for (r, (entries, value)) in rows.iter().enumerate() {
        for &(c, v) in entries {
            a[(r, c)] += v;
        }
        rhs[r] = *value;
    }
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-12 * svd.singular_values.max().max(1.0))
        .map_err(|e| Error::Breakdown(format!("raw probe solve: {e}")))?;
    let residual = (&a * &x - &rhs)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let mut etas = vec![LaurentPolynomial::zero(); n];
    let mut outside = 0.0f64;
    for f in 0..families {
        let k = order(f);
        let poly = LaurentPolynomial::from_coeffs(
            (-window..=window)
                .map(|q| (q, x[col(f, q)]))
                .filter(|(_, c)| c.norm() > 0.0),
        );
        if k < n {
            let allowed = -((n - k) as i32)..=-1;
            for (q, c) in poly.iter() {
                if !allowed.contains(&q) {
                    outside = outside.max(c.norm());
                }
            }
        }
        etas[k - 1] = poly;
    }
    Ok(RawSolve {
        etas,
        residual,
        outside_structure: outside,
    })
}

/// Size diagnostics for `η_n` against `‖A‖_n^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormDiagnostics {
    /// `∫ |η_n| dτ` by a Riemann sum on `grid` points.
    pub eta_l1: f64,
    /// `sup_q |η̂_n(q)|`.
    pub eta_sup: f64,
    /// `‖A‖_n^n`.
    pub schatten_power: f64,
    pub l1_ratio: f64,
    pub sup_ratio: f64,
}

pub fn norm_diagnostics(
    ssf: &SpectralShiftData,
    perturbation: &ComplexMatrix,
    grid: usize,
) -> Result<NormDiagnostics> {
    let eta = ssf.eta_n();
    let samples = synthesize(&eta, grid.max(1));
    let eta_l1 = samples.iter().map(|(_, v)| v.norm()).sum::<f64>() / samples.len() as f64;
    let eta_sup = ssf.hat_eta_n.values().map(|c| c.norm()).fold(0.0, f64::max);
    let schatten_power = schatten_norm(perturbation, ssf.n as f64)?.powi(ssf.n as i32);
    let ratio = |x: f64| {
        if schatten_power > 0.0 {
            x / schatten_power
        } else {
            0.0
        }
    };
    Ok(NormDiagnostics {
        eta_l1,
        eta_sup,
        schatten_power,
        l1_ratio: ratio(eta_l1),
        sup_ratio: ratio(eta_sup),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::c64;
    use crate::paths::remainder_mult;

    fn scalar(u: Complex64, a: f64) -> (UnitaryOperator, SelfAdjointOperator) {
        (
            UnitaryOperator::new(ComplexMatrix::from_element(1, 1, u), 1e-12).unwrap(),
            SelfAdjointOperator::new(ComplexMatrix::from_element(1, 1, c64(a, 0.0)), 0.0).unwrap(),
        )
    }

    #[test]
    fn zero_generator_gives_zero_data() {
        let (u, a) = scalar(c64(0.0, 1.0), 0.0);
        let ssf = extract_mult_unitary(&u, &a, 2, 5).unwrap();
        assert!(ssf.probe_traces.values().all(|t| t.norm() < 1e-15));
        assert!(ssf.etas().is_empty());
    }

    #[test]
    fn scalar_prediction() {
        let (u, a) = scalar(c64(1.0, 0.0), 0.7);
        let ssf = extract_mult_unitary(&u, &a, 2, 12).unwrap();
        assert!(ssf.probe_traces[&0].norm() < 1e-12);
        let f = LaurentPolynomial::from_coeffs([
            (3, c64(1.0, -0.5)),
            (-7, c64(0.25, 0.0)),
            (1, c64(0.0, 2.0)),
        ]);
        let path = MultiplicativePath::unitary(u, a).unwrap();
        let direct = remainder_mult(&path, &f, 2).unwrap().trace();
        assert!((ssf.predict_trace(&f).unwrap() - direct).norm() < 1e-9);
    }

    #[test]
    fn hand_contour_value() {
        let mut probes = BTreeMap::new();
        for m in -4..=4 {
            probes.insert(m, c64(0.0, 0.0));
        }
        let c = c64(0.3, -0.2);
        probes.insert(2, TWO_PI_I * 2.0 * c);
        let ssf =
            SpectralShiftData::from_probes(RemainderKind::Linear, 2, 4, probes, Gauge::Default)
                .unwrap();
        assert_eq!(ssf.hat_eta_n[&-1], ssf.hat_eta_n[&-1]);
        assert!((ssf.hat_eta_n[&-1] - c).norm() < 1e-15);
        let f = LaurentPolynomial::monomial(2, c64(1.0, 0.0));
        assert!((ssf.predict_trace(&f).unwrap() - TWO_PI_I * 2.0 * c).norm() < 1e-14);
        assert!(
            ssf.predict_trace(&LaurentPolynomial::constant(c64(4.0, 0.0)))
                .unwrap()
                .norm()
                == 0.0
        );
        let big = LaurentPolynomial::monomial(5, c64(1.0, 0.0));
        assert!(matches!(
            ssf.predict_trace(&big),
            Err(Error::SupportExceedsProbes {
                degree: 5,
                probes: 4
            })
        ));
    }

    #[test]
    fn linear_scalar_second_order() {
        let u0 =
            UnitaryOperator::new(ComplexMatrix::from_element(1, 1, c64(1.0, 0.0)), 1e-12).unwrap();
        let w = Complex64::from_polar(1.0, 0.9);
        let u1 = UnitaryOperator::new(ComplexMatrix::from_element(1, 1, w), 1e-12).unwrap();
        let ssf = extract_lin(&u0, &u1, 2, 4, &Settings::default()).unwrap();
        // f = z², linear path remainder is (u_1 − u_0)²
        let expected = (w - 1.0).powi(2) / (TWO_PI_I * 2.0);
        assert!((ssf.hat_eta_n[&-1] - expected).norm() < 1e-13);
        assert!(ssf.lower.is_empty() && ssf.eta1_coeffs().is_none());
    }

    #[test]
    fn too_small_probe_range() {
        let (u, a) = scalar(c64(1.0, 0.0), 0.3);
        assert!(matches!(
            extract_mult_unitary(&u, &a, 3, 4),
            Err(Error::InvalidConfig {
                field: "probes",
                ..
            })
        ));
    }
}
