//! Command-line front end behind the `kry` binary.
//!
//! Exit codes: 0 converged, 2 not converged, 1 input or solver error,
//! 64 usage error (including an unknown method).

mod output;

pub use output::{format_float, history_csv, indexed_path, write_history, write_json, RunReport};

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dense::{dense_eig, hermitian_eig, DenseMatrix, DENSE_EIG_CAP};
use crate::error::{Error, Result};
use crate::hpd::{effective_condition_number, AugBasis};
use crate::operators::{CsrMatrix, Identity, Jacobi, LinearOperator, Preconditioner};
use crate::sequences::{
    load_deflation_space, load_matrix, load_rhs, run_method, solve_sequence, Method, MethodParams, SequenceConfig,
    SequenceManifest, SystemEntry, SystemSequence,
};
use crate::C64;

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "kry", version, about = "Augmented and deflated Krylov solvers")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dense spectral diagnostics: condition number, extreme eigenvalues, effective condition number.
    Spectrum(SpectrumArgs),
    /// Runs several methods on one system and tabulates iteration counts.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Matrix Market file or `gen:<kind>:<n>`.
    #[arg(long)]
    pub matrix: Option<String>,
    /// `ones`, `random`, `random:<seed>` or a dense array file.
    #[arg(long, default_value = "ones")]
    pub rhs: String,
    #[arg(long, default_value = "gmres")]
    pub method: String,
    #[arg(long, default_value_t = 20)]
    pub restart: usize,
    #[arg(long = "recycle-dim", default_value_t = 4)]
    pub recycle_dim: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub maxiter: usize,
    /// `none` or `jacobi`.
    #[arg(long, default_value = "none")]
    pub precond: String,
    /// `none`, `auto-eig:<k>`, or `<W file>[,<W~ file>]`.
    #[arg(long = "deflation-space", default_value = "none")]
    pub deflation_space: String,
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "sequence-manifest")]
    pub sequence_manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub matrix: String,
    #[arg(long = "deflation-space", default_value = "none")]
    pub deflation_space: String,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub matrix: String,
    /// Comma-separated method names.
    #[arg(long, default_value = "gmres,gmres-dr")]
    pub methods: String,
    #[arg(long, default_value = "ones")]
    pub rhs: String,
    #[arg(long, default_value_t = 20)]
    pub restart: usize,
    #[arg(long = "recycle-dim", default_value_t = 4)]
    pub recycle_dim: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub maxiter: usize,
    #[arg(long = "deflation-space", default_value = "none")]
    pub deflation_space: String,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecondKind {
    None,
    Jacobi,
}

impl std::str::FromStr for PrecondKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PrecondKind::None),
            "jacobi" => Ok(PrecondKind::Jacobi),
            _ => Err(Error::invalid(format!("unknown preconditioner `{s}` (expected none or jacobi)"))),
        }
    }
}

/// Validated single-solve request.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub method: Method,
    pub matrix: String,
    pub rhs: String,
    pub precond: PrecondKind,
    pub deflation_space: String,
    pub params: MethodParams,
    pub history: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub seed: u64,
}

impl RunManifest {
    pub fn from_args(args: &SolveArgs) -> Result<Self> {
        let method: Method = args.method.parse()?;
        let matrix = args.matrix.clone().ok_or_else(|| Error::invalid("--matrix is required"))?;
        let params = MethodParams::new(args.restart, args.recycle_dim, args.tol, args.maxiter);
        validate_params(&params)?;
        Ok(Self {
            method,
            matrix,
            rhs: args.rhs.clone(),
            precond: args.precond.parse()?,
            deflation_space: args.deflation_space.clone(),
            params,
            history: args.history.clone(),
            report: args.report.clone(),
            seed: args.seed,
        })
    }
}

fn validate_params(p: &MethodParams) -> Result<()> {
    if p.restart == 0 || p.max_iter == 0 || !(p.tol > 0.0) || !p.tol.is_finite() {
        return Err(Error::invalid("restart, maxiter and tol must be positive"));
    }
    Ok(())
}

fn build_precond(kind: PrecondKind, a: &CsrMatrix) -> Box<dyn Preconditioner> {
    match kind {
        PrecondKind::None => Box::new(Identity::new(a.n())),
        PrecondKind::Jacobi => Box::new(Jacobi::new(&a.diagonal())),
    }
}

fn clamp_recycle(method: Method, params: &mut MethodParams) {
    if matches!(method, Method::GmresDr | Method::GcroDr | Method::Gcro) && params.recycle_dim >= params.restart {
        log::warn!("recycle dimension {} reduced below restart {}", params.recycle_dim, params.restart);
        params.recycle_dim = params.restart - 1;
    }
}

/// Single solve; returns the process exit code.
pub fn run_solve(manifest: &RunManifest) -> Result<i32> {
    let base = Path::new(".");
    let a = load_matrix(&manifest.matrix, base, manifest.seed)?;
    let b = load_rhs(Some(&manifest.rhs), a.n(), base, manifest.seed)?;
    let deflation = load_deflation_space(&manifest.deflation_space, &a, base)?;
    let mut m = build_precond(manifest.precond, &a);
    if manifest.precond != PrecondKind::None && matches!(manifest.method, Method::AugCg | Method::DeflCg) {
        log::warn!("{} ignores the preconditioner", manifest.method);
    }
    let mut params = manifest.params.clone();
    clamp_recycle(manifest.method, &mut params);
    let start = Instant::now();
    let run = run_method(manifest.method, &a, m.as_mut(), &b, None, &params, deflation.as_ref(), None, false)?;
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let report = RunReport::new(manifest.method.name(), a.n(), &run.report, wall);
    log::info!(
        "{}: {} iterations, relres {:.3e}, converged {}",
        report.method,
        report.iterations,
        report.final_relres,
        report.converged
    );
    if let Some(path) = &manifest.history {
        write_history(&run.report.history, path)?;
    }
    if let Some(path) = &manifest.report {
        write_json(&report, path)?;
    }
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(if report.converged { EXIT_CONVERGED } else { EXIT_NOT_CONVERGED })
}

#[derive(Debug, Serialize)]
struct SequenceRow {
    system: usize,
    recycled_dim: usize,
    #[serde(flatten)]
    report: Option<RunReport>,
    error: Option<String>,
}

/// Sequence solve driven by a TOML manifest; paths resolve against the
/// manifest's directory. `history` and `report` paths get a system index.
pub fn run_sequence(path: &Path, history: Option<&Path>, report: Option<&Path>) -> Result<i32> {
    let manifest = SequenceManifest::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let method = manifest.method()?;
    let precond: PrecondKind = manifest.precond.as_deref().unwrap_or("none").parse()?;
    let mut params = manifest.params();
    validate_params(&params)?;
    clamp_recycle(method, &mut params);
    let mut seq = SystemSequence::new();
    for s in &manifest.systems {
        let a = load_matrix(&s.matrix, base, manifest.seed)?;
        let rhs = load_rhs(s.rhs.as_deref(), a.n(), base, manifest.seed)?;
        let m = build_precond(precond, &a);
        let method = s.method.as_deref().map(str::parse).transpose()?;
        seq.push(SystemEntry { operator: Box::new(a), rhs, method, precond: Some(m) })?;
    }
    let n = seq.dim().unwrap_or(0);
    let cfg = SequenceConfig { method, params, deflation: None };
    let start = Instant::now();
    let outcomes = solve_sequence(&mut seq, &manifest.strategy(), &cfg)?;
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let mut rows = Vec::new();
    let mut all_converged = true;
    for o in &outcomes {
        let row = match &o.result {
            Ok(rep) => {
                all_converged &= rep.converged;
                if let Some(h) = history {
                    write_history(&rep.history, &indexed_path(h, o.index))?;
                }
                let r = RunReport::new(o.method.name(), n, rep, wall);
                println!("{}", serde_json::to_string(&r).expect("report serializes"));
                SequenceRow { system: o.index, recycled_dim: o.recycled_dim, report: Some(r), error: None }
            }
            Err(e) => {
                all_converged = false;
                eprintln!("system {}: {e}", o.index);
                SequenceRow { system: o.index, recycled_dim: o.recycled_dim, report: None, error: Some(e.to_string()) }
            }
        };
        rows.push(row);
    }
    if let Some(r) = report {
        write_json(&rows, r)?;
    }
    Ok(if all_converged { EXIT_CONVERGED } else { EXIT_NOT_CONVERGED })
}

/// Dense spectral summary of a matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub hermitian: bool,
    /// 2-norm condition number `sigma_max / sigma_min`.
    pub kappa: f64,
    /// Extreme eigenvalues by modulus (real parts for Hermitian input).
    pub lambda_min: [f64; 2],
    pub lambda_max: [f64; 2],
    pub kappa_eff: Option<f64>,
    pub deflation_dim: usize,
}

pub fn spectrum_report(a: &CsrMatrix, deflation: Option<&[crate::vector::Vector]>) -> Result<SpectrumReport> {
    let n = a.n();
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_EIG_CAP });
    }
    let d = a.to_dense();
    let hermitian = a.is_hermitian();
    let (lmin, lmax, kappa) = if hermitian {
        let (vals, _) = hermitian_eig(&d)?;
        let mut abs: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let pick = |target: f64| vals.iter().copied().find(|v| v.abs() == target).unwrap_or(target);
        (C64::new(pick(abs[0]), 0.0), C64::new(pick(abs[n - 1]), 0.0), abs[n - 1] / abs[0])
    } else {
        let eig = dense_eig(&d)?;
        let gram: DenseMatrix = d.adjoint().matmul(&d);
        let (sv, _) = hermitian_eig(&gram)?;
        let kappa = (sv[n - 1] / sv[0].max(0.0)).sqrt();
        (eig.values[0], eig.values[n - 1], kappa)
    };
    let (kappa_eff, deflation_dim) = match deflation {
        Some(w) if !w.is_empty() => {
            if !hermitian {
                return Err(Error::invalid("effective condition number needs a Hermitian positive definite matrix"));
            }
            (Some(effective_condition_number(a, &AugBasis::new(a, w.to_vec())?)?), w.len())
        }
        _ => (None, 0),
    };
    Ok(SpectrumReport {
        n,
        hermitian,
        kappa,
        lambda_min: [lmin.re, lmin.im],
        lambda_max: [lmax.re, lmax.im],
        kappa_eff,
        deflation_dim,
    })
}

pub fn run_spectrum(args: &SpectrumArgs) -> Result<i32> {
    let base = Path::new(".");
    let a = load_matrix(&args.matrix, base, args.seed)?;
    let space = load_deflation_space(&args.deflation_space, &a, base)?;
    let rep = spectrum_report(&a, space.as_ref().map(|s| &s.w[..]))?;
    let text = serde_json::to_string_pretty(&rep).expect("report serializes");
    println!("{text}");
    if let Some(path) = &args.report {
        write_json(&rep, path)?;
    }
    Ok(EXIT_CONVERGED)
}

pub fn run_compare(args: &CompareArgs) -> Result<i32> {
    let methods: Vec<Method> = args.methods.split(',').map(str::parse).collect::<Result<_>>()?;
    let base = Path::new(".");
    let a = load_matrix(&args.matrix, base, args.seed)?;
    let b = load_rhs(Some(&args.rhs), a.n(), base, args.seed)?;
    let deflation = load_deflation_space(&args.deflation_space, &a, base)?;
    let params = MethodParams::new(args.restart, args.recycle_dim, args.tol, args.maxiter);
    validate_params(&params)?;
    let mut rows = Vec::new();
    println!("{:<20} {:>10} {:>7} {:>12} {:>9}", "method", "iterations", "cycles", "relres", "converged");
    for method in methods {
        let mut p = params.clone();
        clamp_recycle(method, &mut p);
        let start = Instant::now();
        let run = run_method(method, &a, &mut Identity::new(a.n()), &b, None, &p, deflation.as_ref(), None, false)?;
        let r = RunReport::new(method.name(), a.n(), &run.report, start.elapsed().as_secs_f64() * 1e3);
        println!("{:<20} {:>10} {:>7} {:>12.3e} {:>9}", r.method, r.iterations, r.cycles, r.final_relres, r.converged);
        rows.push(r);
    }
    if let Some(path) = &args.report {
        write_json(&rows, path)?;
    }
    Ok(if rows.iter().all(|r| r.converged) { EXIT_CONVERGED } else { EXIT_NOT_CONVERGED })
}

fn init_logging() {
    let level = match std::env::var("KRY_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::UnknownMethod(_) => EXIT_USAGE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first) and runs the requested command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_CONVERGED };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Some(Command::Spectrum(a)) => run_spectrum(a),
        Some(Command::Compare(a)) => run_compare(a),
        None => match &cli.solve.sequence_manifest {
            Some(path) => run_sequence(path, cli.solve.history.as_deref(), cli.solve.report.as_deref()),
            None => RunManifest::from_args(&cli.solve).and_then(|m| run_solve(&m)),
        },
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_method_is_usage_error() {
        assert_eq!(main_with_args(["kry", "--matrix", "gen:diag:5", "--method", "sor"]), EXIT_USAGE);
    }

    #[test]
    fn bad_flag_is_usage_error() {
        assert_eq!(main_with_args(["kry", "--no-such-flag"]), EXIT_USAGE);
    }

    #[test]
    fn missing_matrix_is_input_error() {
        assert_eq!(main_with_args(["kry", "--method", "cg"]), EXIT_INPUT);
    }

    #[test]
    fn spectrum_of_diagonal() {
        let a = CsrMatrix::from_diagonal(&crate::vector::from_real(&[1.0, 10.0, 100.0]));
        let r = spectrum_report(&a, Some(&[crate::vector::unit(3, 0)])).unwrap();
        assert!((r.kappa - 100.0).abs() < 1e-10);
        assert!((r.kappa_eff.unwrap() - 10.0).abs() < 1e-10);
        let r = spectrum_report(&CsrMatrix::from_diagonal(&crate::vector::from_real(&[1.0, 2.0, 3.0, 4.0])), None).unwrap();
        assert!((r.kappa - 4.0).abs() < 1e-12);
        assert_eq!(r.kappa_eff, None);
    }

    #[test]
    fn precond_kinds() {
        assert_eq!("jacobi".parse::<PrecondKind>().unwrap(), PrecondKind::Jacobi);
        assert!("ilu".parse::<PrecondKind>().is_err());
    }
}
