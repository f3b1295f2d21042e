//! Command-line entry point.

use std::path::PathBuf;

use clap::Parser;

use crate::config::{parse_config, Experiment};
use crate::emit::emit;
use crate::run::{execute, verification_checks};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FAILED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "qlg", version, about = "Quantum lattice gas experiments")]
pub struct Cli {
    /// Experiment to run; must match the `experiment` key of the config.
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: the config's `output`, else `qlg-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `rng_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "QLG_THREADS")]
    pub threads: Option<usize>,
    /// Also run the acceptance suite and fail on any miss.
    #[arg(long)]
    pub verify: bool,
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> u8 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return EXIT_USAGE;
        }
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return EXIT_USAGE;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(errs) => {
            for d in &errs.diagnostics {
                eprintln!("{}: {d}", cli.config.display());
            }
            return EXIT_USAGE;
        }
    };
    if cfg.experiment != cli.experiment {
        eprintln!(
            "error: subcommand {} does not match `experiment = {}` in {}",
            cli.experiment,
            cfg.experiment,
            cli.config.display()
        );
        return EXIT_USAGE;
    }
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }

    let mut report = execute(&cfg);
    if cli.verify && cfg.experiment != Experiment::Verify {
        report.checks.extend(verification_checks(cfg.rng_seed));
    }

    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("qlg-out"));
    if let Err(e) = emit(&report, &dir, cfg.format) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }

    for c in &report.checks {
        println!("{}", c.line());
    }
    if let Some(e) = &report.error {
        println!("FAIL run: {e}");
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
