//! Batch front-end behind the `ncpot` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::circle::square_grid;
use crate::curvature::classify_field;
use crate::dirichlet::{newton_schwarz_solve, solve_dirichlet, DirichletOptions, NewtonOptions, Truncation};
use crate::error::{Error, Result};
use crate::harnack::{harnack_family, write_family_csv};
use crate::io::{
    discs_from_json, points_from_json, read_json, write_json, BoundaryJson, DiscJson, FieldJson, FlatMetricJson,
    LaurentJson, MatrixJson, PolynomialJson,
};
use crate::linalg::c64;
use crate::meanvalue::{certify_semipositive, certify_seminegative, default_disc_family, profile_rows, write_profile_csv};
use crate::specfact::{fejer_riesz_factor, FactorOptions, Method};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ncpot", version, about = "Operator-valued potential theory on the unit disc")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outer factor H with H*H = F for a Laurent symbol.
    Factor(FactorArgs),
    /// Flat extension of boundary data.
    Dirichlet(DirichletArgs),
    /// Curvature sign of a metric field on a grid.
    Curvature(CurvatureArgs),
    /// Mean-value certificate over a disc family.
    Certify(CertifyArgs),
    /// The weighted-shift family with P(0) fixed and P(z0) growing.
    Harnack(HarnackArgs),
    /// Small versions of the invariant suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    /// Laurent symbol JSON.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Bauer)]
    pub method: Method,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    /// Boundary samples JSON.
    #[arg(long, visible_alias = "in")]
    pub boundary: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub degree: usize,
    /// JSON list of `[re, im]` points at which to report `P`.
    #[arg(long)]
    pub eval: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Bauer)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Truncation::Auto)]
    pub truncation: Truncation,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Use the Newton-Schwarz iteration instead of truncation plus factorization.
    #[arg(long)]
    pub newton: bool,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long, visible_alias = "in")]
    pub field: PathBuf,
    /// Side of the Cartesian grid over the domain.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Exit 1 unless the field has this sign.
    #[arg(long, value_enum)]
    pub expect: Option<Mode>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Seminegative,
    Semipositive,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, visible_alias = "in")]
    pub field: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// JSON list of `{"z0": [re, im], "r": r}`; defaults to the 75-disc family.
    #[arg(long)]
    pub discs: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of the Schur mean about the domain center against radius.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HarnackArgs {
    /// `re` or `re,im`.
    #[arg(long, default_value = "0.5", value_parser = parse_complex)]
    pub z0: Complex64,
    #[arg(long, default_value_t = 8)]
    pub kmax: u32,
    #[arg(long, default_value_t = 1024)]
    pub dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    match parts.as_slice() {
        [re] => Ok(c64(num(re)?, 0.0)),
        [re, im] => Ok(c64(num(re)?, num(im)?)),
        _ => Err(format!("expected 're' or 're,im', got '{s}'")),
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

/// JSON diagnostic for a library error.
pub fn diagnostic(e: &Error) -> serde_json::Value {
    json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": exit_code(e),
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut impl Write) -> Result<()> {
    if let Some(path) = out {
        write_json(path, value)?;
    }
    serde_json::to_writer_pretty(&mut *stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

/// Caps the global thread pool at `NCPOT_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NCPOT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("NCPOT_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Error::InvalidInput("NCPOT_THREADS must be positive".into()));
        }
        // A pool may already exist when the CLI runs inside a test process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses arguments, runs the subcommand and returns the exit code. Reports go
/// to `stdout`, JSON diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_PASS;
            }
            let diag = json!({"error": "usage", "message": e.to_string(), "exit_code": EXIT_INPUT});
            let _ = writeln!(stderr, "{diag}");
            return EXIT_INPUT;
        }
    };
    let outcome = configure_threads().and_then(|_| dispatch(&cli.command, stdout));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}", diagnostic(&e));
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut impl Write) -> Result<i32> {
    match cmd {
        Command::Factor(a) => factor(a, stdout),
        Command::Dirichlet(a) => dirichlet(a, stdout),
        Command::Curvature(a) => curvature(a, stdout),
        Command::Certify(a) => certify(a, stdout),
        Command::Harnack(a) => harnack(a, stdout),
        Command::Selftest(a) => selftest(a, stdout),
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")))
    }
}

fn factor(a: &FactorArgs, stdout: &mut impl Write) -> Result<i32> {
    check_tol(a.tol)?;
    let f = read_json::<LaurentJson>(&a.input)?.to_laurent()?;
    let opts = FactorOptions {
        tol: a.tol,
        method: a.method,
        ..FactorOptions::default()
    };
    let (h, report) = fejer_riesz_factor(&f, &opts)?;
    write_json(&a.out, &PolynomialJson::from_polynomial(&h))?;
    emit(&report, None, stdout)?;
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct EvalPoint {
    z: [f64; 2],
    #[serde(rename = "P")]
    p: MatrixJson,
}

fn dirichlet(a: &DirichletArgs, stdout: &mut impl Write) -> Result<i32> {
    check_tol(a.tol)?;
    let samples = read_json::<BoundaryJson>(&a.boundary)?.to_samples()?;
    let (metric, report) = if a.newton {
        let opts = NewtonOptions {
            tol: a.tol,
            ..NewtonOptions::default()
        };
        let (m, r) = newton_schwarz_solve(&samples, &opts)?;
        (m, serde_json::to_value(r)?)
    } else {
        let opts = DirichletOptions {
            degree: a.degree,
            tol: a.tol,
            method: a.method,
            truncation: a.truncation,
            ..DirichletOptions::default()
        };
        let (m, r) = solve_dirichlet(&samples, &opts)?;
        (m, serde_json::to_value(r)?)
    };
    write_json(&a.out, &FlatMetricJson::from_metric(&metric))?;
    let values = match &a.eval {
        Some(path) => points_from_json(&read_json::<Vec<[f64; 2]>>(path)?)
            .into_iter()
            .map(|z| {
                Ok(EvalPoint {
                    z: [z.re, z.im],
                    p: MatrixJson::from_psd(&metric.evaluate(z)?),
                })
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    emit(&json!({"report": report, "values": values}), None, stdout)?;
    Ok(EXIT_PASS)
}

fn curvature(a: &CurvatureArgs, stdout: &mut impl Write) -> Result<i32> {
    check_tol(a.tol)?;
    if a.grid < 2 {
        return Err(Error::InvalidInput("grid must be at least 2".into()));
    }
    let field = read_json::<FieldJson>(&a.field)?.to_field()?;
    let grid = square_grid(field.domain(), a.grid, 0.95);
    let class = classify_field(&field, &grid, a.tol)?;
    emit(&class, a.out.as_deref(), stdout)?;
    use crate::curvature::CurvatureClass::*;
    let ok = match a.expect {
        None => true,
        Some(Mode::Seminegative) => matches!(class.class, Flat | Seminegative),
        Some(Mode::Semipositive) => matches!(class.class, Flat | Semipositive),
    };
    Ok(if ok { EXIT_PASS } else { EXIT_NEGATIVE })
}

fn certify(a: &CertifyArgs, stdout: &mut impl Write) -> Result<i32> {
    check_tol(a.tol)?;
    let field = read_json::<FieldJson>(&a.field)?.to_field()?;
    let discs = match &a.discs {
        Some(p) => discs_from_json(&read_json::<Vec<DiscJson>>(p)?)?,
        None => default_disc_family(field.domain()),
    };
    if discs.is_empty() {
        return Err(Error::InvalidInput("disc family is empty".into()));
    }
    let report = match a.mode {
        Mode::Seminegative => certify_seminegative(&field, &discs, a.samples, a.tol)?,
        Mode::Semipositive => certify_semipositive(&field, &discs, a.samples, a.tol)?,
    };
    if let Some(path) = &a.profile {
        let dom = field.domain();
        let radii: Vec<f64> = (1..=18).map(|j| 0.05 * j as f64 * dom.r).collect();
        let rows = profile_rows(&field, dom.z0, &radii, a.samples)?;
        write_profile_csv(&rows, std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    emit(&report, a.out.as_deref(), stdout)?;
    Ok(if report.passed { EXIT_PASS } else { EXIT_NEGATIVE })
}

fn harnack(a: &HarnackArgs, stdout: &mut impl Write) -> Result<i32> {
    if a.kmax == 0 {
        return Err(Error::InvalidInput("kmax must be at least 1".into()));
    }
    let ks: Vec<u32> = (1..=a.kmax).collect();
    let family = harnack_family(a.z0, &ks, a.dim)?;
    if let Some(path) = &a.out {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_family_csv(&family, &mut w)?;
        w.flush()?;
    }
    emit(&family, None, stdout)?;
    let ok = family.records.iter().all(|r| r.zero_exact && r.boundary_margin >= -1e-12 && r.flatness <= 1e-9);
    Ok(if ok { EXIT_PASS } else { EXIT_NEGATIVE })
}

#[derive(Serialize)]
struct SelftestItem {
    name: &'static str,
    passed: bool,
    detail: serde_json::Value,
}

fn selftest(a: &SelftestArgs, stdout: &mut impl Write) -> Result<i32> {
    let items = crate::selftest::run_all(a.seed)?
        .into_iter()
        .map(|(name, passed, detail)| SelftestItem { name, passed, detail })
        .collect::<Vec<_>>();
    let all = items.iter().all(|i| i.passed);
    emit(&json!({"seed": a.seed, "passed": all, "checks": items}), a.out.as_deref(), stdout)?;
    Ok(if all { EXIT_PASS } else { EXIT_NEGATIVE })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.5").unwrap(), c64(0.5, 0.0));
        assert_eq!(parse_complex("0.1, -0.2").unwrap(), c64(0.1, -0.2));
        assert!(parse_complex("a").is_err());
    }

    #[test]
    fn usage_errors_exit_two_with_json() {
        let (code, _, err) = run_args(&["ncpot", "factor"]);
        assert_eq!(code, EXIT_INPUT);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "usage");
    }

    #[test]
    fn missing_file_is_input_error() {
        let (code, _, err) = run_args(&["ncpot", "factor", "--in", "/nonexistent.json", "--out", "/tmp/x.json"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("\"io\""));
    }

    #[test]
    fn harnack_small_row() {
        let (code, out, _) = run_args(&["ncpot", "harnack", "--z0", "0.5", "--kmax", "2", "--dim", "16"]);
        assert_eq!(code, EXIT_PASS);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["records"][1]["lower_bound"], 625.0);
    }
}
