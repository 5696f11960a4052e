//! `sqglab`: runs the SQG solver and the inequality verification suites, and
//! merges their reports.
//!
//! Exit codes: 0 everything passed, 1 a verdict failed (or a numerical
//! routine gave up), 2 bad input (usage, config, report files, duplicate
//! ids), 3 the solver hit a blow-up or resolution failure.

mod config;
mod report;
mod rows;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use rows::{ReportFile, FORMAT_VERSION};
use verify::Suite;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input: exit 2.
    Input(String),
    /// Two reports disagree on one id: exit 2.
    Conflict(String),
    /// Output could not be written: exit 2.
    Io(String),
    /// Blow-up or resolution failure: exit 3.
    Breakdown(String),
    /// Any other failure inside the numerics: exit 1.
    Numerics(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Numerics(_) => 1,
            CliError::Input(_) | CliError::Conflict(_) | CliError::Io(_) => 2,
            CliError::Breakdown(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Conflict(m) => write!(f, "conflicting reports: {m}"),
            CliError::Io(m) => write!(f, "cannot write output: {m}"),
            CliError::Breakdown(m) => write!(f, "solver stopped: {m}"),
            CliError::Numerics(m) => write!(f, "{m}"),
        }
    }
}

impl From<sqg_core::Error> for CliError {
    fn from(e: sqg_core::Error) -> Self {
        use sqg_core::Error as E;
        match e {
            E::BlowUp { .. } | E::Resolution { .. } => CliError::Breakdown(e.to_string()),
            E::InvalidDomain(_) | E::InvalidParameter(_) | E::CutoffScale { .. } | E::Displacement(..) => {
                CliError::Input(e.to_string())
            }
            E::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Numerics(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "sqglab", version, about = "Critical SQG on Dirichlet rectangles: solver runs and inequality checks")]
struct Cli {
    /// TOML run configuration (defaults apply to missing keys).
    #[arg(long, global = true, env = "SQGLAB_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, env = "SQGLAB_OUT", default_value = "sqglab-out")]
    out: PathBuf,
    /// Worker threads; `verify` runs up to this many suites at once.
    #[arg(long, global = true, env = "SQGLAB_THREADS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
    /// Seed for synthetic data; overrides `seed` in the config file.
    #[arg(long, global = true, env = "SQGLAB_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the Galerkin solver and its monitors.
    Solve,
    /// Run verification suites; one report per suite.
    Verify {
        /// Suites to run (comma separated or repeated); all when omitted.
        #[arg(long, env = "SQGLAB_SUITE", value_enum, value_delimiter = ',')]
        suite: Vec<Suite>,
    },
    /// Merge report files into one table keyed by id.
    Report {
        /// Report JSON files written by `solve` or `verify`.
        paths: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sqglab: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn print_rows(rows: &[rows::Row]) {
    for r in rows {
        println!("{} {} constant={} stability={}", if r.passed() { "PASS" } else { "FAIL" }, r.id, r.constant, r.stability);
    }
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Solve => {
            let cfg = load(cli)?;
            prepare_out(&cli.out)?;
            std::fs::write(cli.out.join("config.toml"), cfg.to_toml())?;
            let result = solve::solve(&cfg, &cli.out)?;
            print_rows(&result.rows);
            if let Err(e) = result.outcome.into_result() {
                return Err(e.into());
            }
            Ok(if result.rows.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
        Command::Verify { suite } => {
            let cfg = load(cli)?;
            prepare_out(&cli.out)?;
            std::fs::write(cli.out.join("config.toml"), cfg.to_toml())?;
            let mut suites = if suite.is_empty() {
                vec![Suite::Kernel, Suite::Cordoba, Suite::LowerBounds, Suite::Commutators, Suite::Riesz, Suite::Halfspace]
            } else {
                suite.clone()
            };
            suites.sort();
            suites.dedup();
            let results = run_suites(&suites, &cfg, cli.threads as usize);
            let mut all_pass = true;
            for (s, rows) in suites.iter().zip(results) {
                let rows = rows?;
                print_rows(&rows);
                all_pass &= rows.iter().all(|r| r.passed());
                let file = ReportFile {
                    format: FORMAT_VERSION,
                    command: "verify".into(),
                    suite: Some(s.name().into()),
                    seed: cfg.seed,
                    rows,
                };
                file.write(&cli.out, &format!("verify-{}", s.name()))?;
            }
            Ok(if all_pass { 0 } else { 1 })
        }
        Command::Report { paths } => {
            let rows = report::merge(paths)?;
            print!("{}", report::table(&rows));
            prepare_out(&cli.out)?;
            report::write_summary(&cli.out, &rows)?;
            Ok(0)
        }
    }
}

/// Suites run in batches of `threads`; results come back in `suites` order,
/// so the reports do not depend on the thread count.
fn run_suites(suites: &[Suite], cfg: &RunConfig, threads: usize) -> Vec<Result<Vec<rows::Row>, CliError>> {
    let mut out = Vec::with_capacity(suites.len());
    for batch in suites.chunks(threads.max(1)) {
        if batch.len() == 1 {
            out.push(batch[0].run(cfg));
            continue;
        }
        std::thread::scope(|scope| {
            let handles: Vec<_> = batch.iter().map(|s| scope.spawn(move || s.run(cfg))).collect();
            for h in handles {
                out.push(h.join().unwrap_or_else(|_| Err(CliError::Numerics("suite panicked".into()))));
            }
        });
    }
    out
}
