//! `fabius`: exact Fabius function values from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod output;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fabius_core::oracle::unit_grid;
use fabius_core::verify::{verify_values, ORACLE_PROVENANCE};
use fabius_core::{
    parse_real_literal, verify_golden, verify_identities, verify_oracle, DyadicRational, Evaluator, ExactRational,
    IdentityTable, NumberError, VerificationReport,
};

use crate::output::{print_approx, print_reports, print_table, print_value, ValueSink};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "fabius", version, about = "Exact values of the Fabius function at dyadic rationals")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    format: Format,

    /// Decimal places shown next to exact values (0 hides decimals)
    #[arg(long, default_value_t = 12, global = true)]
    digits: usize,

    /// Identity-table cache file
    #[arg(long, env = "FABIUS_CACHE", global = true)]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate f at a nonnegative dyadic rational such as 5/16, 0.3125 or 3/2^5
    Eval {
        #[arg(allow_hyphen_values = true)]
        arg: String,
    },
    /// Print the sum/difference identity coefficients for levels 1..=MAX_N
    Table {
        max_n: u32,
        /// Report how many levels were loaded from the cache and how many computed
        #[arg(long)]
        stats: bool,
    },
    /// Print f(j/2^M) for j = 0..=2^M
    Values {
        m: u64,
        /// Largest accepted exponent
        #[arg(long, default_value_t = 20)]
        limit: u64,
    },
    /// Run verification suites (all of them when none is selected)
    Verify {
        /// Compare against the 31 published values
        #[arg(long)]
        golden: bool,
        /// Check the identities for levels up to N on the grid j/16
        #[arg(long, value_name = "N")]
        identities: Option<u32>,
        /// Check CDF brackets of level N on the grid j/16
        #[arg(long, value_name = "N")]
        oracle: Option<u32>,
        /// Compare against reference values from a CSV file with rows `argument,value`
        #[arg(long, value_name = "PATH")]
        golden_file: Option<PathBuf>,
    },
    /// Certified approximation of f at a real x >= 0
    Approx {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        eps: String,
    },
}

/// A user-facing failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}

fn describe(input: &str, err: NumberError) -> Failure {
    let message = match err {
        NumberError::Malformed(token) => format!("malformed number: cannot parse `{token}` in `{input}`"),
        NumberError::NotDyadic(_) => format!(
            "`{input}` is not a dyadic rational; only k/2^m values are exact, use `fabius approx` for other reals"
        ),
        NumberError::OutOfDomain(reason) => format!("`{input}` is out of domain: {reason}"),
        NumberError::DivisionByZero => format!("`{input}` has a zero denominator"),
    };
    Failure::usage(message)
}

fn load_table(path: Option<&Path>) -> Result<Option<IdentityTable>, Failure> {
    let Some(path) = path else { return Ok(None) };
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read cache {}: {e}", path.display())))?;
    IdentityTable::from_json(&text)
        .map(Some)
        .map_err(|e| Failure::usage(format!("corrupt cache {}: {e}", path.display())))
}

/// Reads `argument,value` rows; a first line that does not parse is taken as a header.
fn read_reference_values(path: &Path) -> Result<Vec<(DyadicRational, ExactRational)>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut cases = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed = line.split_once(',').and_then(|(arg, value)| {
            let arg = arg.trim().parse::<DyadicRational>().ok()?;
            let value = parse_real_literal(value.trim()).ok()?;
            Some((arg, value))
        });
        match parsed {
            Some(case) => cases.push(case),
            None if i == 0 => continue,
            None => {
                return Err(Failure::usage(format!(
                    "{}:{}: expected `argument,value`, found `{line}`",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(cases)
}

fn evaluator(cli: &Cli) -> Result<Evaluator, Failure> {
    Ok(Evaluator::with_table(load_table(cli.cache.as_deref())?.unwrap_or_default()))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match &cli.command {
        Command::Eval { arg } => {
            let value = parse_real_literal(arg).map_err(|e| describe(arg, e))?;
            let d = DyadicRational::try_from(&value).map_err(|e| describe(arg, e))?;
            let f = evaluator(cli)?.eval_extended(&d);
            print_value(&mut out, cli.format, cli.digits, &d, &f)?;
        }
        Command::Table { max_n, stats } => {
            if *max_n == 0 {
                return Err(Failure::usage("max_n must be at least 1"));
            }
            let mut table = load_table(cli.cache.as_deref())?.unwrap_or_default();
            let loaded = table.max_n();
            let computed = table.extend_to(*max_n);
            if let (Some(path), true) = (&cli.cache, computed > 0) {
                fs::write(path, table.to_json())
                    .map_err(|e| Failure::usage(format!("cannot write cache {}: {e}", path.display())))?;
            }
            if *stats {
                eprintln!("levels loaded: {loaded}, computed: {computed}");
            }
            print_table(&mut out, cli.format, &table, *max_n)?;
        }
        Command::Values { m, limit } => {
            if m > limit {
                return Err(Failure::usage(format!("exponent {m} exceeds the limit {limit}")));
            }
            let e = evaluator(cli)?;
            let mut sink = ValueSink::new(&mut out, cli.format, cli.digits, *m)?;
            for (j, v) in e.values_iter(*m).enumerate() {
                sink.row(j as u64, &v.value)?;
            }
            sink.finish()?;
        }
        Command::Verify { golden, identities, oracle, golden_file } => {
            let e = evaluator(cli)?;
            let all = !golden && identities.is_none() && oracle.is_none() && golden_file.is_none();
            let mut reports: Vec<VerificationReport> = Vec::new();
            if *golden || all {
                reports.push(verify_golden(&e));
            }
            if let Some(path) = golden_file {
                reports.push(verify_values(&e, &read_reference_values(path)?));
            }
            if let Some(n) = identities.or(all.then_some(5)) {
                if n == 0 {
                    return Err(Failure::usage("--identities needs a level of at least 1"));
                }
                reports.push(verify_identities(&e, n, &unit_grid(4)));
            }
            if let Some(n) = oracle.or(all.then_some(12)) {
                if !(1..=fabius_core::oracle::MAX_ORACLE_LEVEL).contains(&n) {
                    return Err(Failure::usage(format!("--oracle level {n} outside 1..=24")));
                }
                reports.push(verify_oracle(&e, n, &unit_grid(4)));
            }
            print_reports(&mut out, cli.format, &reports)?;
            if cli.format == Format::Pretty && reports.iter().any(|r| r.suite == "oracle") {
                writeln!(out, "note: {ORACLE_PROVENANCE}")?;
            }
            out.flush()?;
            if reports.iter().any(|r| !r.pass) {
                return Err(Failure { code: 1, message: "verification failed".into() });
            }
        }
        Command::Approx { x, eps } => {
            let xv = parse_real_literal(x).map_err(|e| describe(x, e))?;
            let ev: ExactRational = parse_real_literal(eps).map_err(|e| describe(eps, e))?;
            let result = evaluator(cli)?
                .approx_eval(&xv, &ev)
                .map_err(|e| Failure::usage(e.to_string()))?;
            print_approx(&mut out, cli.format, cli.digits, &result)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
