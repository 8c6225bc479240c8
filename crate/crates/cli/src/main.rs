use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tracelab::ensemble::InstanceKind;
use tracelab::runner::{exit_code, read_report, run_extract, run_gen, run_verify, RunConfig};
use tracelab::ssf::{SsfFile, Theorem, VerificationReport};
use tracelab::Error;

/// Finite-dimensional checks of higher-order spectral shift trace formulas.
#[derive(Debug, Parser)]
#[command(name = "tracelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a random instance and write its matrices as JSON files.
    Gen(GenArgs),
    /// Verify one trace formula on a seeded instance and random test functions.
    Verify(RunArgs),
    /// Extract spectral shift data from monomial probes.
    Extract(RunArgs),
    /// Summarize a saved verification report.
    Report {
        /// Report JSON written by `verify --out`.
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    /// unitary, selfadjoint-generator, contraction, dissipative or selfadjoint-pair
    #[arg(long)]
    kind: InstanceKind,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the matrix files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Run configuration JSON (inline or a path); its `gen` and `settings` apply.
    #[arg(long)]
    config: Option<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Run configuration JSON (inline or a path); flags override its fields.
    #[arg(long)]
    config: Option<String>,
    /// unitary-mult, contraction-mult, helton, dissipative, lin-unitary or selfadjoint-resolvent
    #[arg(long)]
    theorem: Option<Theorem>,
    /// Matrix dimension, at most 12.
    #[arg(long)]
    dim: Option<usize>,
    /// Remainder order, 2 to 6.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Degree of the random test functions.
    #[arg(long)]
    degree: Option<usize>,
    /// Number of random test functions.
    #[arg(long)]
    functions: Option<usize>,
    /// Probe range M.
    #[arg(long)]
    probes: Option<usize>,
    /// Dilation depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Theta-quadrature nodes.
    #[arg(long)]
    nodes: Option<usize>,
    /// Theta cut-off.
    #[arg(long)]
    delta: Option<f64>,
    /// Relative pass tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of eta samples to write as CSV.
    #[arg(long)]
    grid: Option<usize>,
    /// CSV path; defaults to the output path with a .csv extension.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn load_config(source: Option<&str>) -> Result<RunConfig, Error> {
    let Some(source) = source else {
        return Ok(RunConfig::default());
    };
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(source)?
    };
    serde_json::from_str(&text).map_err(|e| Error::InvalidConfig {
        field: "config",
        reason: e.to_string(),
    })
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut c = load_config(self.config.as_deref())?;
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field.clone() { c.$field = v; })*
            };
        }
        set!(theorem, dim, n, seed, degree, functions, nodes, delta);
        macro_rules! set_opt {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field.clone() { c.$field = Some(v); })*
            };
        }
        set_opt!(probes, depth, tol, out, grid, csv);
        Ok(c)
    }
}

fn summarize(report: &VerificationReport) {
    let passed = report.results.iter().filter(|r| r.pass).count();
    eprintln!(
        "{}: {passed}/{} functions within tolerance, max rel err {:.3e}",
        report.theorem,
        report.results.len(),
        report.max_rel_err()
    );
    let d = &report.diagnostics;
    eprintln!(
        "  eta_l1 {:.3e}  schatten_ratio {:.3e}  sup_ratio {:.3e}",
        d.eta_l1, d.schatten_ratio, d.sup_ratio
    );
    let optional = [
        ("dilation_gap", d.dilation_gap),
        ("quadrature_gap", d.quadrature_gap),
        ("helton_quadrature_gap", d.helton_quadrature_gap),
        ("cross_check_gap", d.cross_check_gap),
    ];
    for (name, value) in optional {
        if let Some(v) = value {
            eprintln!("  {name} {v:.3e}");
        }
    }
    let failures: Vec<_> = report
        .results
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.pass)
        .collect();
    for (i, r) in failures.iter().take(5) {
        eprintln!("  FAIL #{i} abs {:.3e} rel {:.3e}", r.abs_err, r.rel_err);
    }
    if failures.len() > 5 {
        eprintln!("  ... {} more", failures.len() - 5);
    }
}

fn verdict(report: &VerificationReport) -> i32 {
    if report.all_pass() {
        0
    } else {
        1
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn gen(args: &GenArgs) -> Result<i32, Error> {
    let c = load_config(args.config.as_deref())?;
    let written = run_gen(
        args.kind,
        args.dim,
        args.seed,
        &c.gen,
        &c.settings,
        &args.out,
    )?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(0)
}

fn verify(args: &RunArgs) -> Result<i32, Error> {
    let config = args.config()?;
    let report = run_verify(&config)?;
    if config.out.is_none() {
        print_json(&report)?;
    }
    summarize(&report);
    Ok(verdict(&report))
}

fn extract(args: &RunArgs) -> Result<i32, Error> {
    let config = args.config()?;
    let ssf = run_extract(&config)?;
    if config.out.is_none() {
        print_json(&SsfFile::from(&ssf))?;
    }
    eprintln!(
        "extracted n = {} from {} probes, {} coefficients of eta_n",
        ssf.n,
        ssf.probe_traces.len(),
        ssf.hat_eta_n.len()
    );
    Ok(0)
}

fn report(path: &Path) -> Result<i32, Error> {
    let report = read_report(path)?;
    println!("{} (tracelab {})", report.theorem, report.version);
    println!("{:>4}  {:>11}  {:>11}  pass  f", "#", "abs_err", "rel_err");
    for (i, r) in report.results.iter().enumerate() {
        println!(
            "{i:>4}  {:>11.3e}  {:>11.3e}  {:<4}  {}",
            r.abs_err, r.rel_err, r.pass, r.f_descriptor
        );
    }
    summarize(&report);
    Ok(verdict(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(args) => gen(args),
        Command::Verify(args) => verify(args),
        Command::Extract(args) => extract(args),
        Command::Report { path } => report(path),
    };
    let code = outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    });
    ExitCode::from(code as u8)
}
