//! The `sdioph` command line.
//!
//! Subcommands `search`, `verify`, `bounds` and `solve` write JSON lines (one
//! record per line) to stdout or `--output`. Exit codes: 0 success, 1
//! verification failure, 2 usage or validation error, 3 budget exceeded.
//! `SDIOPH_BUDGET` overrides the grid and candidate budgets. An optional JSON
//! `--config` file may supply any flag by its long name (dashes or
//! underscores); flags on the command line win.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{BoundCalculator, BoundReport, BoundValue, DEFAULT_DIGIT_BUDGET};
use crate::smooth::PrimeSet;
use crate::sunit_solver::{
    parse_coefficient, solution_counts, solve_affine_with, solve_homogeneous_projective, HeightBound, SolveOptions,
    SolverError, UnitEquation,
};
use crate::sunit_system::{
    catalan_scan, check_product_identities, check_system, equation4_scan_partitioned, find_vanishing_subsums,
    positivity_witness, recover_quadruple, sextuple_of, solution_vector, Classification, Sextuple,
};
use crate::tuple_search::{find_tuples, is_s_diophantine, SearchConfig, SearchError, Tuple, TupleRecord};
use crate::budget_from_env;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sdioph", version, about = "Search, verify and bound S-Diophantine tuples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; csv is available for `search` only.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Parallel work split; output does not depend on it.
    #[arg(long, global = true)]
    pub partitions: Option<usize>,

    /// JSON file supplying default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    JsonLines,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find every S-Diophantine m-tuple with max element at most N.
    Search(SearchArgs),
    /// Check quadruples against the S-unit system (records from --tuple or stdin).
    Verify(VerifyArgs),
    /// Evaluate the solution-count bounds for a rank r.
    Bounds(BoundsArgs),
    /// Solve S-unit equations in a height window, or run the exponent scans.
    ///
    /// The affine window holds every S-unit whose exponents lie in [-H, H] for
    /// each prime and variable: (2 (2H+1)^r)^(n-1) grid points.
    Solve(SolveArgs),
}

#[derive(Debug, Args, Default)]
pub struct SearchArgs {
    /// Comma-separated primes, e.g. 2,3.
    #[arg(long)]
    pub primes: Option<String>,
    /// Largest tuple element N.
    #[arg(long)]
    pub max: Option<u64>,
    /// Tuple size m (2..=6).
    #[arg(long)]
    pub size: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct VerifyArgs {
    /// Default prime set for records that carry none.
    #[arg(long)]
    pub primes: Option<String>,
    /// A single quadruple, e.g. 1,2,3,4; stdin is read when absent.
    #[arg(long)]
    pub tuple: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct BoundsArgs {
    /// Rank r = |S|.
    #[arg(long)]
    pub rank: Option<u32>,
    /// Select the A(5,r) A(3,r) count (two primes, or 2 not in S).
    #[arg(long)]
    pub special: bool,
    /// Drop exact values with more decimal digits than this.
    #[arg(long)]
    pub digit_budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// a_1 x_1 + ... + a_n x_n = 1
    Affine,
    /// 2^x - p^y = +-1
    Catalan,
    /// 2^a6 p^b6 = 2^a5 p^b5 + 2^a2 p^b2
    Eq4,
    /// sum sigma_i y_i = 0 up to scaling
    Projective,
}

#[derive(Debug, Args, Default)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub mode: Option<SolveMode>,
    #[arg(long)]
    pub primes: Option<String>,
    /// Comma-separated rational coefficients, e.g. 1,1 or 1/2,-3.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Exponent cap H.
    #[arg(long)]
    pub height: Option<u32>,
    /// Odd prime for the catalan and eq4 scans.
    #[arg(long)]
    pub p: Option<u64>,
    /// Exponent cap for the catalan and eq4 scans.
    #[arg(long)]
    pub max_exp: Option<u32>,
    /// Sign pattern for projective mode, e.g. +,-,-.
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
}

/// Flag values read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    #[serde(alias = "s")]
    primes: Option<Value>,
    #[serde(alias = "n_max")]
    max: Option<u64>,
    #[serde(alias = "m")]
    size: Option<usize>,
    tuple: Option<Value>,
    rank: Option<u32>,
    special: Option<bool>,
    #[serde(alias = "digit-budget")]
    digit_budget: Option<u64>,
    mode: Option<SolveMode>,
    coeffs: Option<Value>,
    height: Option<u32>,
    p: Option<u64>,
    #[serde(alias = "max-exp")]
    max_exp: Option<u32>,
    signs: Option<Value>,
    format: Option<Format>,
    output: Option<PathBuf>,
    partitions: Option<usize>,
}

/// A list given either as `"2,3"` or `[2, 3]`.
fn list_value(v: &Value) -> String {
    match v {
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join(","),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("missing required flag --{flag}")))
}

fn parse_primes(s: &str) -> Result<PrimeSet, Failure> {
    s.parse().map_err(|e| usage(format!("--primes: {e}")))
}

fn parse_u64_list(s: &str, flag: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("--{flag}: cannot parse {t:?}"))))
        .collect()
}

fn apply_config(cli: &mut Cli) -> Result<(), Failure> {
    let Some(path) = &cli.config else {
        return Ok(());
    };
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
    let cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| usage(format!("--config: {e}")))?;
    cli.format = cli.format.or(cfg.format);
    cli.output = cli.output.take().or(cfg.output);
    cli.partitions = cli.partitions.or(cfg.partitions);
    let primes = cfg.primes.as_ref().map(list_value);
    match &mut cli.command {
        Command::Search(a) => {
            a.primes = a.primes.take().or(primes);
            a.max = a.max.or(cfg.max);
            a.size = a.size.or(cfg.size);
        }
        Command::Verify(a) => {
            a.primes = a.primes.take().or(primes);
            a.tuple = a.tuple.take().or(cfg.tuple.as_ref().map(list_value));
        }
        Command::Bounds(a) => {
            a.rank = a.rank.or(cfg.rank);
            a.special = a.special || cfg.special.unwrap_or(false);
            a.digit_budget = a.digit_budget.or(cfg.digit_budget);
        }
        Command::Solve(a) => {
            a.mode = a.mode.or(cfg.mode);
            a.primes = a.primes.take().or(primes);
            a.coeffs = a.coeffs.take().or(cfg.coeffs.as_ref().map(list_value));
            a.height = a.height.or(cfg.height);
            a.p = a.p.or(cfg.p);
            a.max_exp = a.max_exp.or(cfg.max_exp);
            a.signs = a.signs.take().or(cfg.signs.as_ref().map(list_value));
        }
    }
    Ok(())
}

fn write_json_line<T: Serialize>(out: &mut dyn Write, v: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    out.write_all(b"\n")
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_search(args: &SearchArgs, format: Format, partitions: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let set = parse_primes(&required(args.primes.clone(), "primes")?)?;
    let max = required(args.max, "max")?;
    let size = required(args.size, "size")?;
    let budget = budget_from_env().map_err(usage)?;
    let cfg = SearchConfig::new(set, max, size)
        .and_then(|c| c.with_partitions(partitions))
        .map_err(|e| usage(e.to_string()))?
        .with_budget(budget);
    let tuples = find_tuples(&cfg).map_err(|e| match e {
        SearchError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
        other => usage(other.to_string()),
    })?;
    match format {
        Format::JsonLines => {
            for t in tuples {
                write_json_line(out, &TupleRecord::new(&cfg, t))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let csv_err = |e: csv::Error| Failure::Io(io::Error::other(e));
            w.write_record(["s", "m", "n_max", "tuple"]).map_err(csv_err)?;
            for t in tuples {
                w.write_record([
                    join(cfg.prime_set.primes()),
                    cfg.tuple_size.to_string(),
                    cfg.max_element.to_string(),
                    join(t.elements()),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(EXIT_OK)
}

/// One annotated `verify` record.
#[derive(Debug, Default, Serialize)]
pub struct VerifyRecord {
    pub s: Option<Vec<u64>>,
    pub tuple: Option<Vec<u64>>,
    pub s_diophantine: Option<bool>,
    pub sextuple: Option<Sextuple>,
    pub system_holds: Option<bool>,
    #[serde(serialize_with = "opt_big_as_string")]
    pub product_identity: Option<BigUint>,
    pub classification: Option<Classification>,
    pub vanishing_subsets: Option<Vec<Vec<usize>>>,
    pub round_trip: Option<bool>,
    #[serde(serialize_with = "opt_big_as_string")]
    pub positivity_witness: Option<BigUint>,
    pub verified: bool,
    pub error: Option<String>,
}

fn opt_big_as_string<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_none(),
    }
}

/// Runs every check on one quadruple.
pub fn verify_quadruple(set: &PrimeSet, elements: &[u64]) -> VerifyRecord {
    let mut rec = VerifyRecord {
        s: Some(set.primes().to_vec()),
        tuple: Some(elements.to_vec()),
        ..VerifyRecord::default()
    };
    let quad = match Tuple::new(elements.to_vec()) {
        Ok(t) if t.len() == 4 => t,
        Ok(_) => {
            rec.error = Some("expected a quadruple".into());
            return rec;
        }
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    let s_dioph = is_s_diophantine(&quad, set);
    let sext = sextuple_of(&quad, set).expect("validated quadruple");
    let system = check_system(&sext);
    rec.s_diophantine = Some(s_dioph);
    rec.system_holds = Some(system);
    rec.product_identity = check_product_identities(&sext);
    if let Ok(v) = solution_vector(&sext) {
        let report = find_vanishing_subsums(&v);
        rec.classification = Some(report.classification);
        rec.vanishing_subsets = Some(report.vanishing_subsets);
    }
    let round_trip = recover_quadruple(&sext).as_ref() == Some(&quad);
    rec.round_trip = Some(round_trip);
    rec.positivity_witness = positivity_witness(&sext).ok();
    rec.verified = s_dioph && system && round_trip && rec.positivity_witness.is_some();
    rec.sextuple = Some(sext);
    rec
}

fn verify_line(line: &str, default_set: Option<&PrimeSet>) -> VerifyRecord {
    let fail = |msg: String| VerifyRecord { error: Some(msg), ..VerifyRecord::default() };
    let v: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return fail(format!("malformed record: {e}")),
    };
    let set = match v.get("s") {
        Some(s) => match serde_json::from_value::<Vec<u64>>(s.clone()).map_err(|e| e.to_string()).and_then(|p| {
            PrimeSet::new(&p).map_err(|e| e.to_string())
        }) {
            Ok(set) => set,
            Err(e) => return fail(format!("bad prime list: {e}")),
        },
        None => match default_set {
            Some(set) => set.clone(),
            None => return fail("record has no \"s\" and no --primes given".into()),
        },
    };
    let elements = match v.get("tuple").map(|t| serde_json::from_value::<Vec<u64>>(t.clone())) {
        Some(Ok(e)) => e,
        Some(Err(e)) => return fail(format!("bad tuple: {e}")),
        None => return fail("record has no \"tuple\"".into()),
    };
    let mut rec = verify_quadruple(&set, &elements);
    if rec.error.is_some() {
        rec.s = Some(set.primes().to_vec());
    }
    rec
}

fn cmd_verify(args: &VerifyArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32, Failure> {
    let default_set = args.primes.as_deref().map(parse_primes).transpose()?;
    let mut records = Vec::new();
    if let Some(t) = &args.tuple {
        let set = default_set.as_ref().ok_or_else(|| usage("--tuple needs --primes"))?;
        records.push(verify_quadruple(set, &parse_u64_list(t, "tuple")?));
    } else {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(verify_line(&line, default_set.as_ref()));
        }
    }
    let all_ok = records.iter().all(|r| r.verified);
    for r in &records {
        write_json_line(out, r)?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[derive(Serialize)]
struct BoundsOutput<'a> {
    #[serde(flatten)]
    report: &'a BoundReport,
    selected: &'static str,
    theorem: &'a BoundValue,
}

fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let r = required(args.rank, "rank")?;
    if r < 1 {
        return Err(usage("--rank must be at least 1"));
    }
    let calc = BoundCalculator::with_digit_budget(args.digit_budget.unwrap_or(DEFAULT_DIGIT_BUDGET));
    let report = calc.report(r).map_err(|e| usage(e.to_string()))?;
    let (selected, theorem) = if args.special {
        ("special", &report.theorem_special)
    } else {
        ("general", &report.theorem_general)
    };
    write_json_line(out, &BoundsOutput { report: &report, selected, theorem })?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Summary {
    summary: SummaryCounts,
}

#[derive(Serialize)]
struct SummaryCounts {
    total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    nondegenerate: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nondegenerate_unsigned: Option<u64>,
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
        other => usage(other.to_string()),
    }
}

fn cmd_solve(args: &SolveArgs, partitions: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let budget = budget_from_env().map_err(usage)?;
    let opts = SolveOptions { budget, partitions };
    match args.mode.unwrap_or(SolveMode::Affine) {
        SolveMode::Affine => {
            let set = parse_primes(&required(args.primes.clone(), "primes")?)?;
            let coeffs = required(args.coeffs.clone(), "coeffs")?
                .split(',')
                .map(|c| parse_coefficient(c).ok_or_else(|| usage(format!("--coeffs: bad coefficient {c:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let h = HeightBound(required(args.height, "height")?);
            let eq = UnitEquation::new(coeffs, set).map_err(|e| usage(e.to_string()))?;
            let records = solve_affine_with(&eq, h, opts).map_err(solver_failure)?;
            for r in &records {
                write_json_line(out, r)?;
            }
            let c = solution_counts(&records);
            let summary = SummaryCounts {
                total: c.total,
                nondegenerate: Some(c.nondegenerate),
                nondegenerate_unsigned: Some(c.nondegenerate_unsigned),
            };
            write_json_line(out, &Summary { summary })?;
        }
        SolveMode::Catalan => {
            let p = required(args.p, "p")?;
            let max_exp = required(args.max_exp, "max-exp")?;
            let sols = catalan_scan(p, max_exp).map_err(|e| usage(e.to_string()))?;
            for s in &sols {
                write_json_line(out, s)?;
            }
            let summary = SummaryCounts { total: sols.len() as u64, nondegenerate: None, nondegenerate_unsigned: None };
            write_json_line(out, &Summary { summary })?;
        }
        SolveMode::Eq4 => {
            let p = required(args.p, "p")?;
            let max_exp = required(args.max_exp, "max-exp")?;
            let grid = u128::from(max_exp + 1).pow(4);
            if grid > u128::from(budget) {
                return Err(Failure::Budget(format!("scan needs {grid} grid points, budget is {budget}")));
            }
            let sols = equation4_scan_partitioned(p, max_exp, partitions).map_err(|e| usage(e.to_string()))?;
            #[derive(Serialize)]
            struct Eq4Record {
                p: u64,
                exponents: [u32; 6],
            }
            for s in &sols {
                write_json_line(out, &Eq4Record { p, exponents: s.0 })?;
            }
            let summary = SummaryCounts { total: sols.len() as u64, nondegenerate: None, nondegenerate_unsigned: None };
            write_json_line(out, &Summary { summary })?;
        }
        SolveMode::Projective => {
            let set = parse_primes(&required(args.primes.clone(), "primes")?)?;
            let signs = required(args.signs.clone(), "signs")?
                .split(',')
                .map(|s| match s.trim() {
                    "+" | "+1" | "1" => Ok(1i8),
                    "-" | "-1" => Ok(-1i8),
                    other => Err(usage(format!("--signs: bad sign {other:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let h = HeightBound(required(args.height, "height")?);
            let sols = solve_homogeneous_projective(&signs, &set, h, opts).map_err(solver_failure)?;
            #[derive(Serialize)]
            struct ProjectiveRecord {
                normalized: Vec<String>,
                representative: Vec<String>,
                degenerate: bool,
            }
            for s in &sols {
                write_json_line(
                    out,
                    &ProjectiveRecord {
                        normalized: s.normalized.iter().map(|q| q.to_string()).collect(),
                        representative: s.representative.iter().map(|v| v.to_string()).collect(),
                        degenerate: s.degenerate,
                    },
                )?;
            }
            let nondeg = sols.iter().filter(|s| !s.degenerate).count() as u64;
            let summary = SummaryCounts { total: sols.len() as u64, nondegenerate: Some(nondeg), nondegenerate_unsigned: None };
            write_json_line(out, &Summary { summary })?;
        }
    }
    Ok(EXIT_OK)
}

fn dispatch(mut cli: Cli, input: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<i32, Failure> {
    apply_config(&mut cli)?;
    let format = cli.format.unwrap_or(Format::JsonLines);
    let partitions = cli.partitions.unwrap_or(1);
    if partitions == 0 {
        return Err(usage("--partitions must be at least 1"));
    }
    if format == Format::Csv && !matches!(cli.command, Command::Search(_)) {
        return Err(usage("--format csv is only available for search"));
    }
    // buffer everything so a failing run leaves no partial output file
    let mut buf: Vec<u8> = Vec::new();
    let code = match &cli.command {
        Command::Search(a) => cmd_search(a, format, partitions, &mut buf)?,
        Command::Verify(a) => cmd_verify(a, input, &mut buf)?,
        Command::Bounds(a) => cmd_bounds(a, &mut buf)?,
        Command::Solve(a) => cmd_solve(a, partitions, &mut buf)?,
    };
    match &cli.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => stdout.write_all(&buf)?,
    }
    Ok(code)
}

/// Runs the CLI on explicit streams and returns the process exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli, input, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Budget(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_BUDGET
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
