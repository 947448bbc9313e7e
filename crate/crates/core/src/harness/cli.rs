//! Command-line surface.
//!
//! Exit codes: 0 success, 1 verification failure or a FAIL flag in a
//! report, 2 usage or parse error, 3 enumeration budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::enumerate::{Budget, BUDGET_ENV};
use crate::error::Error;
use crate::single::Policy;

use super::commands::{analyze, bounds, simulate, verify, McSettings, SimulateOptions, VerifySources};
use super::file::{load_file, LoadedProblem};
use super::report::PASS;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pandora",
    version,
    about = "Index policies, bounds and verification for Pandora's box problems with optional inspection",
    after_help = format!("The enumeration budget defaults to 10^7 branches; {BUDGET_ENV} or --budget overrides it.")
)]
pub struct Cli {
    /// Emit JSON instead of a text table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Maximum number of branches for exact enumeration.
    #[arg(long, global = true, value_name = "BRANCHES")]
    pub budget: Option<u128>,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print each item's mean, reservation price, backup price, hedging
    /// probability and local approximation ratio.
    Analyze { path: PathBuf },

    /// Print the surrogate lower bounds and, within budget, the optimal
    /// values.
    Bounds {
        path: PathBuf,
        /// Estimate combinatorial bounds by Monte Carlo.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Evaluate policies exactly or by Monte Carlo.
    Simulate {
        path: PathBuf,
        /// weitzman (frugal in combinatorial files), local-hedging or
        /// commit-enum; all applicable policies when omitted.
        #[arg(long)]
        policy: Option<Policy>,
        /// Exact enumeration (the default).
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Monte Carlo estimation.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print this many sampled policy traces.
        #[arg(long, value_name = "K", default_value_t = 0)]
        trace: u64,
    },

    /// Run the invariant suite on files, a corpus directory and/or random
    /// instances.
    #[command(long_about = "Run the invariant suite on files, a corpus directory and/or random instances.\n\n\
        Random instances (--random N --seed S) have 1 to 5 items; each item has 2 to 4 distinct \
        values on a 0.5 grid in [0, 10] with integer weights 1 to 5 (normalized) and a cost on a \
        0.25 grid in [0, 4]. One case in three carries a uniform matroid of rank at most 3 or a \
        connected graphic matroid on at most 4 vertices. Case i depends only on (S, i).")]
    Verify {
        paths: Vec<PathBuf>,
        /// Verify every *.json file in this directory.
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
        /// Verify this many random instances.
        #[arg(long, value_name = "N")]
        random: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit<R: Serialize>(out: &mut dyn Write, json: bool, report: &R, text: impl FnOnce() -> String) -> std::io::Result<()> {
    if json {
        let mut s = serde_json::to_string_pretty(report).expect("serializable report");
        s.push('\n');
        out.write_all(s.as_bytes())
    } else {
        out.write_all(text().as_bytes())
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

macro_rules! with_problem {
    ($loaded:expr, $p:ident => $body:expr) => {
        match $loaded {
            LoadedProblem::Float($p) => $body,
            LoadedProblem::Exact($p) => $body,
        }
    };
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Error> {
    let budget = cli.budget.map(Budget).unwrap_or_else(Budget::from_env);
    let io = |e: std::io::Error| Error::Parse(format!("writing output: {e}"));
    match &cli.command {
        Command::Analyze { path } => {
            let (_, loaded) = load_file(path)?;
            with_problem!(&loaded, p => {
                let r = analyze(p);
                emit(out, cli.json, &r, || r.render()).map_err(io)?;
            });
            Ok(EXIT_OK)
        }
        Command::Bounds { path, mc, trials, seed } => {
            let (_, loaded) = load_file(path)?;
            let mc = mc.then_some(McSettings { trials: *trials, seed: *seed });
            with_problem!(&loaded, p => {
                let r = bounds(p, mc, budget)?;
                emit(out, cli.json, &r, || r.render()).map_err(io)?;
            });
            Ok(EXIT_OK)
        }
        Command::Simulate { path, policy, mc, trials, seed, trace, .. } => {
            let (_, loaded) = load_file(path)?;
            let opts = SimulateOptions {
                policy: *policy,
                mc: mc.then_some(McSettings { trials: *trials, seed: *seed }),
                trace: *trace,
                seed: *seed,
            };
            let status = with_problem!(&loaded, p => {
                let r = simulate(p, &opts, budget)?;
                emit(out, cli.json, &r, || r.render()).map_err(io)?;
                r.status
            });
            Ok(if status == PASS { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Verify { paths, corpus, random, seed } => {
            let sources = VerifySources {
                files: paths.clone(),
                corpus: corpus.clone(),
                random: random.map(|n| (n, *seed)),
            };
            let r = verify(&sources, budget)?;
            emit(out, cli.json, &r, || r.render()).map_err(io)?;
            Ok(if r.status == PASS { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut buffer = Vec::new();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli, &mut buffer)),
            Err(e) => Err(Error::Parse(format!("cannot start {n} threads: {e}"))),
        },
        None => execute(&cli, &mut buffer),
    };
    let _ = out.write_all(&buffer);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
