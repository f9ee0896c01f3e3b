//! Command-line front end.
//!
//! ```text
//! extropy measure     --dist D --measure ID [--n N] [--k K] [--m M] [--side S] [--tol T]
//! extropy verify      --dist D [--max-n N] [--max-k K] [--max-m M] [--tol T] [--residual-tol R]
//! extropy records-sim --dist D [--n N] [--k K] [--side S] [--count C] [--seed S] [--max-draws M]
//! extropy symtest     --input FILE [--replicates R] [--alpha A] [--seed S]
//! extropy classc      --dist D [--grid-size G]
//! ```
//!
//! Every command accepts `--output json|table` (default `json`). Exit status
//! is 0 on success, 2 on usage or input errors and 3 when an integration
//! fails to converge. Seeded commands fall back to `EXTROPY_SEED`, then 0.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dist::{ContinuousLaw, Distribution};
use crate::measures::{MeasureId, MeasureParams, MeasureValue, Measures};
use crate::quad::{QuadConfig, QuadStatus, DEFAULT_TOL};
use crate::records::{ks_distance, simulate_records, RecordLaw, Side, DEFAULT_MAX_DRAWS};
use crate::symmetry::{
    eta_profile, symmetry_test, Characterization, ClassC, SymmetryReport, TestResult, DEFAULT_RESIDUAL_TOL,
    MIN_REPLICATES, MIN_TEST_SAMPLE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "EXTROPY_SEED";

#[derive(Debug, Parser)]
#[command(name = "extropy", version, about = "Extropy measures, record laws and symmetry checks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one functional of a distribution.
    Measure(MeasureArgs),
    /// Check every characterization residual over an (n, k, m) grid.
    Verify(VerifyArgs),
    /// Simulate k-record values and compare them with the analytic law.
    #[command(name = "records-sim")]
    RecordsSim(RecordsSimArgs),
    /// Bootstrap symmetry test on a data file.
    Symtest(SymtestArgs),
    /// Class-C membership of a distribution.
    Classc(ClasscArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Distribution descriptor, e.g. `exponential:rate=1`.
    #[arg(long)]
    pub dist: String,
    /// Functional id, e.g. `crj`, `record_gcpj`, `delta2`.
    #[arg(long)]
    pub measure: String,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Record side; only meaningful for `kij`.
    #[arg(long)]
    pub side: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value_t = 4)]
    pub max_n: u32,
    #[arg(long, default_value_t = 4)]
    pub max_k: u32,
    #[arg(long, default_value_t = 4)]
    pub max_m: u32,
    /// Integration tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Residual equality tolerance.
    #[arg(long, default_value_t = DEFAULT_RESIDUAL_TOL)]
    pub residual_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,
}

#[derive(Debug, Args)]
pub struct RecordsSimArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value = "upper")]
    pub side: String,
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_DRAWS)]
    pub max_draws: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,
}

#[derive(Debug, Args)]
pub struct SymtestArgs {
    /// One decimal per line; an optional header on the first line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 999)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,
}

#[derive(Debug, Args)]
pub struct ClasscArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value_t = 1024)]
    pub grid_size: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,
}

/// A command failure carrying its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

/// What a command prints, plus an optional numerical failure that still
/// produced a report.
struct Report {
    json: serde_json::Value,
    table: String,
    failure: Option<String>,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let _ = writeln!(err, "{}", line.trim());
            return EXIT_USAGE;
        }
    };
    let seed_env = std::env::var(SEED_ENV).ok();
    let (outcome, format) = match &config.command {
        Command::Measure(a) => (cmd_measure(a), a.output),
        Command::Verify(a) => (cmd_verify(a), a.output),
        Command::RecordsSim(a) => (cmd_records_sim(a, seed_env.as_deref()), a.output),
        Command::Symtest(a) => (cmd_symtest(a, seed_env.as_deref()), a.output),
        Command::Classc(a) => (cmd_classc(a), a.output),
    };
    match outcome {
        Ok(report) => {
            let printed = match format {
                Format::Json => serde_json::to_string_pretty(&report.json).map(|s| s + "\n"),
                Format::Table => Ok(report.table),
            };
            match printed {
                Ok(text) => {
                    let _ = out.write_all(text.as_bytes());
                }
                Err(e) => {
                    let _ = writeln!(err, "error: cannot serialize report: {e}");
                    return EXIT_NUMERIC;
                }
            }
            match report.failure {
                Some(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    EXIT_NUMERIC
                }
                None => EXIT_OK,
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {}", one_line(&msg));
            EXIT_USAGE
        }
        Err(Failure::Numeric(msg)) => {
            let _ = writeln!(err, "error: {}", one_line(&msg));
            EXIT_NUMERIC
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn to_json<T: Serialize>(value: &T) -> Result<serde_json::Value, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::Numeric(format!("cannot serialize report: {e}")))
}

fn parse_dist(text: &str) -> Result<Distribution, Failure> {
    Ok(text.parse::<Distribution>()?)
}

fn check_tol(name: &str, tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be a positive number, got {tol}")))
    }
}

fn check_positive(name: &str, value: u64) -> Result<(), Failure> {
    if value >= 1 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be at least 1")))
    }
}

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, Failure> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(text)) => text
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV} must be a non-negative integer, got `{text}`"))),
        (None, None) => Ok(0),
    }
}

#[derive(Serialize)]
struct MeasureOutput<'a> {
    command: &'static str,
    distribution: String,
    tol: f64,
    #[serde(flatten)]
    result: &'a MeasureValue,
}

fn cmd_measure(a: &MeasureArgs) -> Outcome {
    let dist = parse_dist(&a.dist)?;
    let id: MeasureId = a.measure.parse()?;
    check_tol("tol", a.tol)?;
    check_positive("n", a.n.into())?;
    check_positive("k", a.k.into())?;
    check_positive("m", a.m.into())?;
    let side = match (&a.side, id) {
        (None, _) => Side::Upper,
        (Some(s), MeasureId::Kij) => s.parse()?,
        (Some(_), _) => {
            return Err(Failure::Usage(format!(
                "--side only applies to `kij`; `{id}` has a fixed side"
            )))
        }
    };

    let value = evaluate(&dist, id, a.n, a.k, a.m, side, QuadConfig::with_tol(a.tol))?;
    let json = to_json(&MeasureOutput {
        command: "measure",
        distribution: dist.to_string(),
        tol: a.tol,
        result: &value,
    })?;
    let mut table = String::new();
    let _ = writeln!(table, "distribution  {dist}");
    let _ = writeln!(table, "measure       {}{}", value.measure, describe(&value.params));
    let _ = writeln!(table, "value         {}", value.display_value());
    let _ = writeln!(table, "abs_error     {:.3e}", value.abs_error);
    let _ = writeln!(table, "status        {}", value.status);
    if let Some(d) = &value.diagnostic {
        let _ = writeln!(table, "diagnostic    {d}");
    }
    let failure = (value.status == QuadStatus::NoConvergence).then(|| {
        format!(
            "{} did not converge: {}",
            value.measure,
            value.diagnostic.clone().unwrap_or_else(|| "no diagnostic".into())
        )
    });
    Ok(Report { json, table, failure })
}

fn describe(p: &MeasureParams) -> String {
    let mut parts = Vec::new();
    if let Some(n) = p.n {
        parts.push(format!("n={n}"));
    }
    if let Some(k) = p.k {
        parts.push(format!("k={k}"));
    }
    if let Some(m) = p.m {
        parts.push(format!("m={m}"));
    }
    if let Some(s) = p.side {
        parts.push(format!("side={s}"));
    }
    if parts.is_empty() {
        String::new()
    } else {
        format!(" ({})", parts.join(", "))
    }
}

/// Evaluates functional `id` of `law`; parameters a functional does not use
/// are ignored.
pub fn evaluate<L: ContinuousLaw + ?Sized>(
    law: &L,
    id: MeasureId,
    n: u32,
    k: u32,
    m: u32,
    side: Side,
    cfg: QuadConfig,
) -> crate::Result<MeasureValue> {
    let ms = Measures::with_config(law, cfg);
    let ch = Characterization::with_config(law, cfg);
    Ok(match id {
        MeasureId::Extropy => ms.extropy_quantile(),
        MeasureId::Crj => ms.crj(),
        MeasureId::Cpj => ms.cpj(),
        MeasureId::Gcrj => ms.gcrj(m)?,
        MeasureId::Gcpj => ms.gcpj(m)?,
        MeasureId::RecordCrj => ms.record_crj_upper(n, k)?,
        MeasureId::RecordCpj => ms.record_cpj_lower(n, k)?,
        MeasureId::RecordGcrj => ms.record_gcrj_upper(n, k, m)?,
        MeasureId::RecordGcpj => ms.record_gcpj_lower(n, k, m)?,
        MeasureId::Kij => ms.kij_record(n, k, side)?,
        MeasureId::Crij => ms.crij_upper(n, k)?,
        MeasureId::Cpij => ms.cpij_lower(n, k)?,
        MeasureId::Delta1 => ch.delta1(),
        MeasureId::Delta2 => ch.delta2(n, k)?,
        MeasureId::Delta3 => ch.delta3(m)?,
        MeasureId::DeltaGeneralized => ch.delta_generalized(n, k, m)?,
        MeasureId::DeltaKij => ch.delta_kij_order(n, k)?,
        MeasureId::DeltaCrij => ch.delta_crij(n, k)?,
    })
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    command: &'static str,
    distribution: String,
    #[serde(flatten)]
    report: &'a SymmetryReport,
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let dist = parse_dist(&a.dist)?;
    check_tol("tol", a.tol)?;
    check_tol("residual-tol", a.residual_tol)?;
    check_positive("max-n", a.max_n.into())?;
    check_positive("max-k", a.max_k.into())?;
    check_positive("max-m", a.max_m.into())?;

    let report = Characterization::with_config(&dist, QuadConfig::with_tol(a.tol)).verify(
        a.max_n,
        a.max_k,
        a.max_m,
        a.residual_tol,
    )?;
    let json = to_json(&VerifyOutput {
        command: "verify",
        distribution: dist.to_string(),
        report: &report,
    })?;
    let mut table = String::new();
    let _ = writeln!(table, "{:<22} {:>3} {:>3} {:>3}  {:>24}  {:<18} counted", "family", "n", "k", "m", "residual", "status");
    for r in &report.residuals {
        let p = r.params();
        let cell = |v: Option<u32>| v.map_or("-".to_string(), |x| x.to_string());
        let _ = writeln!(
            table,
            "{:<22} {:>3} {:>3} {:>3}  {:>24}  {:<18} {}",
            r.family.name(),
            cell(p.n),
            cell(p.k),
            cell(p.m),
            r.value.display_value(),
            r.value.status.to_string(),
            if r.in_verdict { "yes" } else { "no" }
        );
    }
    let _ = writeln!(table, "class_c   {}", report.class_c);
    let _ = writeln!(table, "tolerance {:e}", report.tolerance);
    let _ = writeln!(table, "verdict   {}", report.verdict);
    Ok(Report {
        json,
        table,
        failure: None,
    })
}

#[derive(Serialize)]
struct RecordsSimOutput {
    command: &'static str,
    distribution: String,
    n: u32,
    k: u32,
    side: Side,
    count: usize,
    seed: u64,
    max_draws: u64,
    aborted: usize,
    mean: Option<f64>,
    ks_distance: Option<f64>,
    ks_critical_99: f64,
    values: Vec<f64>,
}

/// Asymptotic 99% Kolmogorov-Smirnov critical value for `count` draws.
pub fn ks_critical_99(count: usize) -> f64 {
    1.63 / (count as f64).sqrt()
}

fn cmd_records_sim(a: &RecordsSimArgs, seed_env: Option<&str>) -> Outcome {
    let dist = parse_dist(&a.dist)?;
    check_positive("n", a.n.into())?;
    check_positive("k", a.k.into())?;
    check_positive("count", a.count as u64)?;
    check_positive("max-draws", a.max_draws)?;
    let side: Side = a.side.parse()?;
    let seed = resolve_seed(a.seed, seed_env)?;

    let sample = simulate_records(&dist, a.n, a.k, side, a.count, seed, a.max_draws)?;
    let law = RecordLaw::new(&dist, a.n, a.k, side)?;
    let (mean, ks) = if sample.values.is_empty() {
        (None, None)
    } else {
        let mean = sample.values.iter().sum::<f64>() / sample.values.len() as f64;
        (Some(mean), Some(ks_distance(&sample.values, |x| law.cdf(x))))
    };
    let out = RecordsSimOutput {
        command: "records-sim",
        distribution: dist.to_string(),
        n: a.n,
        k: a.k,
        side,
        count: a.count,
        seed,
        max_draws: a.max_draws,
        aborted: sample.aborted,
        mean,
        ks_distance: ks,
        ks_critical_99: ks_critical_99(sample.values.len().max(1)),
        values: sample.values,
    };
    let mut table = String::new();
    let _ = writeln!(table, "distribution   {dist}");
    let _ = writeln!(table, "record         n={} k={} side={side}", a.n, a.k);
    let _ = writeln!(table, "realizations   {} ({} aborted)", out.values.len(), out.aborted);
    let _ = writeln!(table, "seed           {seed}");
    if let (Some(mean), Some(ks)) = (out.mean, out.ks_distance) {
        let _ = writeln!(table, "mean           {mean}");
        let _ = writeln!(table, "ks_distance    {ks}");
        let _ = writeln!(table, "ks_critical_99 {}", out.ks_critical_99);
    }
    Ok(Report {
        json: to_json(&out)?,
        table,
        failure: None,
    })
}

/// Reads one finite decimal per line. Blank lines are skipped and a first
/// line that is not a number is taken as a header.
pub fn parse_sample(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => return Err(format!("line {}: value `{line}` is not finite", i + 1)),
            Err(_) if i == 0 => {}
            Err(_) => return Err(format!("line {}: cannot parse `{line}` as a number", i + 1)),
        }
    }
    Ok(values)
}

fn read_sample(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let values = parse_sample(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if values.len() < MIN_TEST_SAMPLE {
        return Err(Failure::Usage(format!(
            "{}: need at least {MIN_TEST_SAMPLE} observations, found {}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

#[derive(Serialize)]
struct SymtestOutput<'a> {
    command: &'static str,
    input: String,
    #[serde(flatten)]
    result: &'a TestResult,
}

fn cmd_symtest(a: &SymtestArgs, seed_env: Option<&str>) -> Outcome {
    if a.replicates < MIN_REPLICATES {
        return Err(Failure::Usage(format!("--replicates must be at least {MIN_REPLICATES}")));
    }
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Failure::Usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let seed = resolve_seed(a.seed, seed_env)?;
    let sample = read_sample(&a.input)?;
    let result = symmetry_test(&sample, a.replicates, a.alpha, seed)?;
    let json = to_json(&SymtestOutput {
        command: "symtest",
        input: a.input.display().to_string(),
        result: &result,
    })?;
    let mut table = String::new();
    let _ = writeln!(table, "sample_size  {}", result.sample_size);
    let _ = writeln!(table, "center       {}", result.center);
    let _ = writeln!(table, "statistic    {}", result.statistic);
    let _ = writeln!(table, "replicates   {}", result.bootstrap_replicates);
    let _ = writeln!(table, "p_value      {}", result.p_value);
    let _ = writeln!(table, "alpha        {}", result.alpha);
    let _ = writeln!(table, "decision     {}", result.decision);
    let _ = writeln!(table, "seed         {}", result.seed);
    Ok(Report {
        json,
        table,
        failure: None,
    })
}

#[derive(Serialize)]
struct ClasscOutput {
    command: &'static str,
    distribution: String,
    grid_size: usize,
    class_c: ClassC,
    eta_min: f64,
    eta_max: f64,
}

fn cmd_classc(a: &ClasscArgs) -> Outcome {
    let dist = parse_dist(&a.dist)?;
    let class_c = crate::symmetry::class_c_check(&dist, a.grid_size)?;
    let profile = eta_profile(&dist, a.grid_size, 1e-4);
    let eta_min = profile.values.iter().copied().fold(f64::INFINITY, f64::min);
    let eta_max = profile.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let out = ClasscOutput {
        command: "classc",
        distribution: dist.to_string(),
        grid_size: a.grid_size,
        class_c,
        eta_min,
        eta_max,
    };
    let mut table = String::new();
    let _ = writeln!(table, "distribution {dist}");
    let _ = writeln!(table, "grid_size    {}", a.grid_size);
    let _ = writeln!(table, "eta range    [{eta_min}, {eta_max}]");
    let _ = writeln!(table, "class_c      {class_c}");
    Ok(Report {
        json: to_json(&out)?,
        table,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("extropy").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parses_samples_with_header_and_blanks() {
        let v = parse_sample("x\n1.5\n\n-2e-3\n  4 \n").unwrap();
        assert_eq!(v, vec![1.5, -0.002, 4.0]);
        let e = parse_sample("1\n2\nabc\n").unwrap_err();
        assert!(e.starts_with("line 3"), "{e}");
        assert!(parse_sample("1\ninf\n").unwrap_err().starts_with("line 2"));
    }

    #[test]
    fn seed_resolution() {
        assert_eq!(resolve_seed(Some(4), Some("9")).unwrap(), 4);
        assert_eq!(resolve_seed(None, Some(" 9 ")).unwrap(), 9);
        assert_eq!(resolve_seed(None, None).unwrap(), 0);
        assert!(resolve_seed(None, Some("x")).is_err());
    }

    #[test]
    fn measure_exit_codes() {
        let (code, out, _) = run_args(&["measure", "--dist", "exponential:rate=1", "--measure", "crj"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["value"].as_f64().unwrap() + 0.25).abs() < 1e-6);
        let (code, _, err) = run_args(&["measure", "--dist", "power:theta=-3", "--measure", "crj"]);
        assert_eq!(code, 2);
        assert_eq!(err.lines().count(), 1);
        let (code, _, _) = run_args(&["measure", "--dist", "uniform", "--measure", "crj", "--side", "lower"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_args(&["measure", "--dist", "uniform", "--measure", "nope"]);
        assert_eq!(code, 2);
    }
}
