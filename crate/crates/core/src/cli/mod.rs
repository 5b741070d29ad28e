//! Command-line front end: reads a motive definition, runs one pipeline and
//! writes a JSON report. Exit codes: 0 success, 2 parse/config error,
//! 3 precondition violation, 4 undetermined at the working precision.

pub mod commands;
pub mod config;
pub mod literal;
pub mod report;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::json;

use crate::error::Error;
use crate::shtuka::SliceOptions;
use crate::tate::Precision;

pub use commands::{Command, RunParams};
pub use config::{parse_config, print_config, MotiveConfig};
pub use literal::parse_literal;
pub use report::{exit_code, ErrorInfo, PrecisionMeta, Report, REPORT_VERSION};

#[derive(Clone, Debug, Parser)]
#[command(name = "motcoh", version, about = "Realizations, regulators and shtuka cohomology of t-motives")]
pub struct Cli {
    /// Pipeline to run.
    #[arg(value_enum)]
    pub command: Command,
    /// Motive definition file (`-` for stdin).
    pub config: PathBuf,
    /// Number of t-coefficients kept.
    #[arg(long)]
    pub prec_t: Option<usize>,
    /// 1/θ-adic precision cap.
    #[arg(long)]
    pub prec_u: Option<i64>,
    /// j-adic precision.
    #[arg(long)]
    pub prec_j: Option<usize>,
    /// θ-degree bound for boxes and normal forms.
    #[arg(long)]
    pub degree_bound: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomly drawn sample classes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random sample classes for `regulator`.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

const DEFAULT_DEGREE_BOUND: u32 = 4;

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn params(cli: &Cli, cfg: Option<&MotiveConfig>) -> RunParams {
    let d = Precision::default();
    let prec = Precision {
        t: cli.prec_t.or(cfg.and_then(|c| c.prec_t)).unwrap_or(d.t),
        u: cli.prec_u.or(cfg.and_then(|c| c.prec_u)).unwrap_or(d.u),
        j: cli.prec_j.or(cfg.and_then(|c| c.prec_j)).unwrap_or(d.j),
    };
    let degree_bound = cli.degree_bound.or(cfg.and_then(|c| c.degree_bound)).unwrap_or(DEFAULT_DEGREE_BOUND);
    RunParams { prec, degree_bound, seed: cli.seed, samples: cli.samples }
}

/// Runs a command on config text; never panics on bad input.
pub fn run_text(cli: &Cli, text: &str) -> Report {
    let parsed = parse_config(text);
    let cfg = parsed.as_ref().ok();
    let p = params(cli, cfg);
    let explicit_bound = cli.degree_bound.or(cfg.and_then(|c| c.degree_bound));
    let slices = SliceOptions {
        max_theta: explicit_bound.unwrap_or(SliceOptions::default().max_theta),
        ..SliceOptions::default()
    };
    let mut report = Report {
        version: REPORT_VERSION,
        command: cli.command.name().into(),
        inputs: json!({ "config": cfg.map(print_config), "flags": p }),
        precision: PrecisionMeta { t: p.prec.t, u: p.prec.u, j: p.prec.j, degree_bound: p.degree_bound },
        status: "ok",
        exit_code: 0,
        results: json!(null),
        error: None,
        timestamp: now(),
    };
    let outcome = match parsed {
        Err(e) => Err(commands::Failure { module: "cli", error: e }),
        Ok(cfg) => match cfg.motive() {
            Err(e) => Err(commands::Failure { module: "motive", error: e }),
            Ok(m) => commands::run(cli.command, &m, cfg.class.as_ref(), &p, slices),
        },
    };
    match outcome {
        Ok(v) => report.results = v,
        Err(f) => {
            report.status = "error";
            report.exit_code = exit_code(&f.error);
            report.error = Some(f.info());
        }
    }
    report
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { report::EXIT_CONFIG } else { 0 };
        }
    };
    let text = if cli.config.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map(|_| s)
    } else {
        std::fs::read_to_string(&cli.config)
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("motcoh: cannot read {}: {e}", cli.config.display());
            return report::EXIT_CONFIG;
        }
    };
    let report = run_text(&cli, &text);
    let json = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("motcoh: cannot write {}: {e}", path.display());
                return report::EXIT_CONFIG;
            }
        }
        None => {
            use std::io::Write;
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{json}");
        }
    }
    if let Some(err) = &report.error {
        eprintln!("motcoh: {} error in {}: {}", err.kind, err.module, err.message);
    }
    report.exit_code
}

#[doc(hidden)]
pub fn error_exit_code(e: &Error) -> i32 {
    exit_code(e)
}
