//! Batch runs: configuration, instance construction, verification and
//! extraction with file output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cayley::{cayley, selfadjoint_pair_to_unitaries};
use crate::config::Settings;
use crate::ensemble::{
    gen_instance, random_contraction, random_dissipative, random_functions, random_selfadjoint,
    random_selfadjoint_pair, random_unitary, random_unitary_pair, rng, GenParams, InstanceKind,
};
use crate::error::{Error, Result};
use crate::linops::MatrixFile;
use crate::ssf::{
    extract_lin, extract_mult_contraction, extract_mult_dilated, extract_mult_unitary, verify,
    write_eta_csv, write_json, Instance, SpectralShiftData, Theorem, VerificationReport,
    VerifyOptions,
};
use crate::symbols::LaurentPolynomial;

pub const MAX_DIM: usize = 12;
pub const ORDERS: std::ops::RangeInclusive<usize> = 2..=6;

/// Exit status for an error: 2 for configuration problems, 3 for
/// numerical breakdown.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig { .. }
        | Error::DepthTooSmall { .. }
        | Error::SupportExceedsProbes { .. }
        | Error::DimensionMismatch(_)
        | Error::NotSquare { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => 2,
        _ => 3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub theorem: Theorem,
    pub dim: usize,
    pub n: usize,
    /// Degree of the random test functions.
    pub degree: usize,
    /// Number of test functions.
    pub functions: usize,
    /// Probe range `M`; defaults to `max(degree, n + 2)`.
    pub probes: Option<usize>,
    pub seed: u64,
    /// Dilation depth; defaults to `M + 1`.
    pub depth: Option<usize>,
    /// θ-quadrature nodes.
    pub nodes: usize,
    pub delta: f64,
    /// Relative pass tolerance; defaults per theorem.
    pub tol: Option<f64>,
    pub radius: f64,
    pub disk_grid: usize,
    pub gen: GenParams,
    pub settings: Settings,
    /// Report or SSF JSON destination.
    pub out: Option<PathBuf>,
    /// η samples destination for extraction.
    pub csv: Option<PathBuf>,
    /// Number of η samples.
    pub grid: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            theorem: Theorem::UnitaryMult,
            dim: 3,
            n: 2,
            degree: 6,
            functions: 20,
            probes: None,
            seed: 0,
            depth: None,
            nodes: 4096,
            delta: 1e-3,
            tol: None,
            radius: 0.99,
            disk_grid: 48,
            gen: GenParams::default(),
            settings: Settings::default(),
            out: None,
            csv: None,
            grid: None,
        }
    }
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidConfig { field, reason }
}

impl RunConfig {
    /// Fills the derived defaults and checks every invariant.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = self.clone();
        let probes = *c.probes.get_or_insert(c.degree.max(c.n + 2));
        c.depth.get_or_insert(probes + 1);
        c.tol.get_or_insert(c.theorem.default_tolerance());
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(invalid(
                "dim",
                format!("must lie in 1..={MAX_DIM}, got {}", self.dim),
            ));
        }
        if !ORDERS.contains(&self.n) {
            return Err(invalid("n", format!("must lie in 2..=6, got {}", self.n)));
        }
        let probes = self.probes.unwrap_or(self.degree.max(self.n + 2));
        if probes < self.n + 2 {
            return Err(invalid(
                "probes",
                format!("must be at least n + 2 = {}, got {probes}", self.n + 2),
            ));
        }
        if self.degree > probes {
            return Err(invalid(
                "degree",
                format!("{} exceeds the probe range {probes}", self.degree),
            ));
        }
        let depth = self.depth.unwrap_or(probes + 1);
        if depth < probes + 1 {
            return Err(invalid(
                "depth",
                format!("must be at least probes + 1 = {}, got {depth}", probes + 1),
            ));
        }
        if self.functions == 0 {
            return Err(invalid(
                "functions",
                "need at least one test function".into(),
            ));
        }
        if self.nodes < 8 {
            return Err(invalid(
                "nodes",
                format!("need at least 8, got {}", self.nodes),
            ));
        }
        if !(self.delta > 0.0 && self.delta < std::f64::consts::PI) {
            return Err(invalid(
                "delta",
                format!("need 0 < delta < pi, got {}", self.delta),
            ));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(invalid("tol", format!("must be positive, got {tol}")));
            }
        }
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return Err(invalid(
                "radius",
                format!("need 0 < R < 1, got {}", self.radius),
            ));
        }
        if self.disk_grid == 0 {
            return Err(invalid("disk_grid", "must be positive".into()));
        }
        if self.grid == Some(0) {
            return Err(invalid("grid", "must be positive".into()));
        }
        Ok(())
    }

    fn options(&self) -> VerifyOptions {
        let probes = self.probes.expect("resolved");
        VerifyOptions {
            n: self.n,
            probes,
            depth: self.depth.expect("resolved"),
            nodes: self.nodes,
            delta: self.delta,
            tol: self.tol.expect("resolved"),
            radius: self.radius,
            disk_grid: self.disk_grid,
            ..VerifyOptions::default()
        }
    }
}

/// Instance and test functions drawn from the seed, in that order.
pub fn build_instance(config: &RunConfig) -> Result<(Instance, Vec<LaurentPolynomial>)> {
    let mut r = rng(config.seed);
    let (d, g, tol) = (config.dim, &config.gen, &config.settings.tol);
    let instance = match config.theorem {
        Theorem::UnitaryMult => Instance::Unitary {
            u0: random_unitary(&mut r, d, tol)?,
            a: random_selfadjoint(&mut r, d, g.generator_norm, tol)?,
        },
        Theorem::ContractionMult | Theorem::Helton => Instance::Contraction {
            t0: random_contraction(&mut r, d, g.contraction_margin, tol)?,
            b: random_selfadjoint(&mut r, d, g.generator_norm, tol)?,
        },
        Theorem::Dissipative => Instance::Dissipative {
            l0: random_dissipative(&mut r, d, g, tol)?,
            b: random_selfadjoint(&mut r, d, g.generator_norm, tol)?,
        },
        Theorem::LinUnitary => {
            let (u0, u1, _) = random_unitary_pair(&mut r, d, g, tol)?;
            Instance::UnitaryPair { u0, u1 }
        }
        Theorem::SelfadjointResolvent => {
            let (h0, v) = random_selfadjoint_pair(&mut r, d, g, tol)?;
            Instance::SelfAdjointPair { h0, v }
        }
    };
    let functions = random_functions(&mut r, config.degree, config.functions);
    Ok((instance, functions))
}

/// Verifies the configured theorem and writes the report when `out` is set.
pub fn run_verify(config: &RunConfig) -> Result<VerificationReport> {
    let config = config.resolve()?;
    let (instance, functions) = build_instance(&config)?;
    let (mut report, _) = verify(
        config.theorem,
        &instance,
        &functions,
        &config.options(),
        &config.settings,
    )?;
    report.config = serde_json::to_value(&config)?;
    if let Some(path) = &config.out {
        write_report(&report, path)?;
    }
    Ok(report)
}

pub fn write_report(report: &VerificationReport, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
    Ok(())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<VerificationReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Extracts the spectral shift data of the configured instance. Writes the
/// JSON to `out` and, when `grid` is set, `grid` samples of `η_n` to `csv`
/// (or next to `out` with a `.csv` extension).
pub fn run_extract(config: &RunConfig) -> Result<SpectralShiftData> {
    let config = config.resolve()?;
    let (instance, _) = build_instance(&config)?;
    let (n, m) = (config.n, config.probes.expect("resolved"));
    let settings = &config.settings;
    let ssf = match (&instance, config.theorem) {
        (Instance::Unitary { u0, a }, _) => extract_mult_unitary(u0, a, n, m)?,
        (Instance::Contraction { t0, b }, Theorem::ContractionMult) => {
            extract_mult_dilated(t0, b, n, m, config.depth.expect("resolved"), settings)?.0
        }
        (Instance::Contraction { t0, b }, _) => extract_mult_contraction(t0, b, n, m)?,
        (Instance::Dissipative { l0, b }, _) => {
            extract_mult_contraction(&cayley(l0, &settings.tol)?, b, n, m)?
        }
        (Instance::UnitaryPair { u0, u1 }, _) => extract_lin(u0, u1, n, m, settings)?,
        (Instance::SelfAdjointPair { h0, v }, _) => {
            let (u0, u1) = selfadjoint_pair_to_unitaries(h0, v, &settings.tol)?;
            extract_lin(&u0, &u1, n, m, settings)?
        }
    };
    if let Some(path) = &config.out {
        write_json(&ssf, path)?;
    }
    if let Some(grid) = config.grid {
        let csv = match (&config.csv, &config.out) {
            (Some(p), _) => p.clone(),
            (None, Some(out)) => out.with_extension("csv"),
            (None, None) => {
                return Err(invalid("csv", "a sample grid needs --csv or --out".into()))
            }
        };
        write_eta_csv(&ssf, grid, csv)?;
    }
    Ok(ssf)
}

/// Draws an instance of `kind` and writes one matrix file per operator into
/// `dir`, named after the operator. Returns the written paths.
pub fn run_gen(
    kind: InstanceKind,
    dim: usize,
    seed: u64,
    params: &GenParams,
    settings: &Settings,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if dim > MAX_DIM {
        return Err(invalid(
            "dim",
            format!("must lie in 1..={MAX_DIM}, got {dim}"),
        ));
    }
    let inst = gen_instance(kind, dim, seed, params, &settings.tol)?;
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, m) in &inst.matrices {
        let p = dir.join(format!("{name}.json"));
        MatrixFile::write(m, &p)?;
        paths.push(p);
    }
    Ok(paths)
}
