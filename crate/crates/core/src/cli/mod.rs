//! Command-line surface: JSON configs, the multiplier expression language and
//! dispatch to the numerical checks.

pub mod config;
pub mod expr;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config, parse_refine, Command, CommandKind, ConfigError, OutputFormat, RunConfig};
pub use expr::{parse_multiplier, Expr, ExprMultiplier, ParseError};
pub use run::{exit_code_for, run, Report, RunOutput, EXIT_CONSISTENT, EXIT_INCONSISTENT, EXIT_NUMERICAL, EXIT_USAGE};

/// Environment variable that sizes the worker pool.
pub const THREADS_ENV: &str = "FRAMELAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "framelab", version, about = "Frame-bound and translate-system checks on discretized L2 spaces")]
struct Args {
    /// JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides `output.path`. Without either, stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Refinement levels, e.g. "64,128,256"; overrides `grid.refine`.
    #[arg(long, value_parser = parse_levels)]
    refine: Option<Levels>,
}

#[derive(Debug, Clone)]
struct Levels(Vec<usize>);

fn parse_levels(s: &str) -> Result<Levels, String> {
    parse_refine(s).map(Levels)
}

fn init_threads() -> Result<(), String> {
    let Some(v) = std::env::var_os(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    // a pool built earlier in this process stays in place
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses arguments, runs the command, writes the report and returns the
/// process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_CONSISTENT };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("framelab: {msg}");
        return EXIT_USAGE;
    }
    let mut cfg = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("framelab: {}: {e}", args.config.display());
            return EXIT_USAGE;
        }
    };
    if let Some(out) = args.out {
        cfg.output.path = Some(out);
    }
    if let Some(f) = args.format {
        cfg.output.format = if f == "csv" { OutputFormat::Csv } else { OutputFormat::Json };
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(Levels(levels)) = args.refine {
        cfg.grid.refine = levels;
    }
    let output = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("framelab: {}: {e}", cfg.command.kind().name());
            return exit_code_for(&e);
        }
    };
    if let Err(e) = output.write(&cfg) {
        eprintln!("framelab: writing report: {e}");
        return EXIT_USAGE;
    }
    eprintln!(
        "framelab: {} {}",
        cfg.command.kind().name(),
        if output.report.consistent { "consistent" } else { "INCONSISTENT" }
    );
    output.exit_code()
}
