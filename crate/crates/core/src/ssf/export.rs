//! JSON and CSV forms of spectral shift data.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Gauge, SpectralShiftData};
use crate::error::Result;
use crate::paths::RemainderKind;
use crate::symbols::LaurentPolynomial;

/// On-disk layout: `{n, kind, gauge, probe_range, hat_eta_n, eta1, lower, probes}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsfFile {
    pub n: usize,
    pub kind: RemainderKind,
    pub gauge: Gauge,
    pub probe_range: usize,
    pub hat_eta_n: BTreeMap<i32, [f64; 2]>,
    /// `c_1, …, c_{n−1}`; empty when the gauge or kind has no `η_1` series.
    pub eta1: Vec<[f64; 2]>,
    /// `η_k`, `k < n`, keyed by `k`; written for every gauge.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lower: BTreeMap<usize, LaurentPolynomial>,
    pub probes: BTreeMap<i32, [f64; 2]>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl From<&SpectralShiftData> for SsfFile {
    fn from(ssf: &SpectralShiftData) -> Self {
        let lower = if ssf.gauge == Gauge::Default {
            BTreeMap::new()
        } else {
            ssf.lower
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(i, e)| (i + 1, e.clone()))
                .collect()
        };
        Self {
            n: ssf.n,
            kind: ssf.kind,
            gauge: ssf.gauge,
            probe_range: ssf.probe_range,
            hat_eta_n: ssf.hat_eta_n.iter().map(|(&q, &c)| (q, pair(c))).collect(),
            eta1: ssf
                .eta1_coeffs()
                .unwrap_or_default()
                .into_iter()
                .map(pair)
                .collect(),
            lower,
            probes: ssf
                .probe_traces
                .iter()
                .map(|(&m, &t)| (m, pair(t)))
                .collect(),
        }
    }
}

impl SsfFile {
    /// Rebuilds the data from the stored probe traces.
    pub fn to_data(&self) -> Result<SpectralShiftData> {
        let probes = self
            .probes
            .iter()
            .map(|(&m, &[re, im])| (m, Complex64::new(re, im)))
            .collect();
        SpectralShiftData::from_probes(self.kind, self.n, self.probe_range, probes, self.gauge)
    }
}

pub fn write_json(ssf: &SpectralShiftData, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&SsfFile::from(ssf))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_json(path: impl AsRef<Path>) -> Result<SpectralShiftData> {
    let file: SsfFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.to_data()
}

/// `(θ_j, η(e^{iθ_j}))` on `θ_j = 2πj/grid`.
pub fn synthesize(eta: &LaurentPolynomial, grid: usize) -> Vec<(f64, Complex64)> {
    (0..grid)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / grid as f64;
            (theta, eta.eval(Complex64::from_polar(1.0, theta)))
        })
        .collect()
}

/// Samples of `η_n` as `theta,re,im` rows under a header line.
pub fn write_eta_csv(ssf: &SpectralShiftData, grid: usize, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["theta", "re", "im"])?;
    for (theta, v) in synthesize(&ssf.eta_n(), grid) {
        w.serialize((theta, v.re, v.im))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::c64;

    fn sample(gauge: Gauge) -> SpectralShiftData {
        let probes = (-5..=5)
            .map(|m| (m, c64(0.1 * m as f64, -0.05 * (m * m) as f64)))
            .collect();
        SpectralShiftData::from_probes(RemainderKind::MultUnitary, 3, 5, probes, gauge).unwrap()
    }

    #[test]
    fn json_roundtrip() {
        let dir = std::env::temp_dir().join(format!("tracelab-ssf-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        for gauge in [Gauge::Default, Gauge::Diagonal] {
            let ssf = sample(gauge);
            let p = dir.join("ssf.json");
            write_json(&ssf, &p).unwrap();
            let back = read_json(&p).unwrap();
            assert_eq!(back, ssf);
        }
        let text = serde_json::to_string(&SsfFile::from(&sample(Gauge::Default))).unwrap();
        assert!(text.contains("\"hat_eta_n\"") && text.contains("\"eta1\""));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn synthesis_grid() {
        let eta = LaurentPolynomial::monomial(-1, c64(2.0, 0.0));
        let s = synthesize(&eta, 4);
        assert_eq!(s.len(), 4);
        assert!((s[1].1 - c64(0.0, -2.0)).norm() < 1e-15);
    }
}
