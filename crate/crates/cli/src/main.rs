//! `o2cocycle`: batch experiments on 2x2 orthogonal matrix cocycles.
//!
//! Exit status: 0 success, 2 usage or invalid configuration, 3 resource cap
//! exceeded, 4 internal invariant breach, 1 I/O failure.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use toml::Value;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] o2cocycle::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use o2cocycle::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Domain(_) | E::Precondition(_) | E::Provenance(_)) => 2,
            CliError::Core(E::Resource(_)) => 3,
            CliError::Core(E::Invariant(_)) => 4,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "o2cocycle",
    version,
    about = "Experiments on 2x2 orthogonal matrix cocycles"
)]
#[command(
    after_help = "Configuration layers, lowest first: built-in defaults, --config FILE, \
environment variables O2WB_<SECTION>_<KEY> (e.g. O2WB_RUN_STARTS=32), command-line flags."
)]
struct Cli {
    /// TOML configuration with [base], [cocycle] and [run] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory, or a file path ending in .json (.csv for orbit).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct SystemArgs {
    /// example1 | example2 | example3 | cex1 | cex2
    #[arg(long)]
    cocycle: Option<String>,
    /// Decimal, p/q, sqrt2-1 or sqrt3-1.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    /// auto | rotation | bernoulli
    #[arg(long)]
    base: Option<String>,
}

#[derive(Args, Debug, Default)]
struct ScanArgs {
    /// Orbit length.
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long)]
    starts: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one orbit of a skew system as CSV.
    Orbit {
        #[command(flatten)]
        sys: SystemArgs,
        /// S | R | N | Z3
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Growth rates (1/n) log |A(n,x) v| from random starts.
    Lyapunov {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Birkhoff-average ergodicity scan (heuristic verdict).
    Diagnose {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        system: Option<String>,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// First-return chain S -> S_B -> P -> Q for the example2 cocycle.
    Induce {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        events: Option<usize>,
    },
    /// Invariant sections, diagonalization and irreducibility verdict.
    SearchReducibility {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Exact and numerical checks of the two counterexamples.
    VerifyCounterexamples {
        #[arg(long)]
        eta: Option<String>,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Every example, counterexample and the inducing chain, tabulated.
    ReproducePaper {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        eta: Option<String>,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        events: Option<usize>,
    },
}

type Flags = Vec<(&'static str, &'static str, Value)>;

fn push_str(flags: &mut Flags, section: &'static str, key: &'static str, v: &Option<String>) {
    if let Some(v) = v {
        flags.push((section, key, Value::String(v.clone())));
    }
}

fn push_int<T: Copy + TryInto<i64>>(
    flags: &mut Flags,
    key: &'static str,
    v: Option<T>,
) -> Result<(), CliError> {
    if let Some(v) = v {
        let i = v
            .try_into()
            .map_err(|_| CliError::Usage(format!("--{key} is too large")))?;
        flags.push(("run", key, Value::Integer(i)));
    }
    Ok(())
}

fn push_system(flags: &mut Flags, sys: &SystemArgs) {
    push_str(flags, "cocycle", "kind", &sys.cocycle);
    push_str(flags, "cocycle", "alpha", &sys.alpha);
    push_str(flags, "base", "eta", &sys.eta);
    push_str(flags, "base", "kind", &sys.base);
}

fn push_scan(flags: &mut Flags, scan: &ScanArgs) -> Result<(), CliError> {
    push_int(flags, "n", scan.n)?;
    push_int(flags, "starts", scan.starts)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Orbit { .. } => "orbit",
            Command::Lyapunov { .. } => "lyapunov",
            Command::Diagnose { .. } => "diagnose",
            Command::Induce { .. } => "induce",
            Command::SearchReducibility { .. } => "search-reducibility",
            Command::VerifyCounterexamples { .. } => "verify-counterexamples",
            Command::ReproducePaper { .. } => "reproduce-paper",
        }
    }

    fn flags(&self) -> Result<Flags, CliError> {
        let mut f = Flags::new();
        match self {
            Command::Orbit { sys, system, steps } => {
                push_system(&mut f, sys);
                push_str(&mut f, "run", "system", system);
                push_int(&mut f, "steps", *steps)?;
            }
            Command::Lyapunov { sys, scan } => {
                push_system(&mut f, sys);
                push_scan(&mut f, scan)?;
            }
            Command::Diagnose { sys, system, scan } => {
                push_system(&mut f, sys);
                push_str(&mut f, "run", "system", system);
                push_scan(&mut f, scan)?;
            }
            Command::Induce { sys, events } => {
                if sys.cocycle.is_none() {
                    f.push(("cocycle", "kind", Value::String("example2".into())));
                }
                push_system(&mut f, sys);
                push_int(&mut f, "events", *events)?;
            }
            Command::SearchReducibility { sys, scan, samples } => {
                push_system(&mut f, sys);
                push_scan(&mut f, scan)?;
                push_int(&mut f, "samples", *samples)?;
            }
            Command::VerifyCounterexamples { eta, scan, grid } => {
                push_str(&mut f, "base", "eta", eta);
                push_scan(&mut f, scan)?;
                push_int(&mut f, "grid", *grid)?;
            }
            Command::ReproducePaper {
                alpha,
                eta,
                scan,
                events,
            } => {
                push_str(&mut f, "cocycle", "alpha", alpha);
                push_str(&mut f, "base", "eta", eta);
                push_scan(&mut f, scan)?;
                push_int(&mut f, "events", *events)?;
            }
        }
        f.push(("", "experiment", Value::String(self.name().into())));
        Ok(f)
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a ExperimentConfig,
    result: &'a serde_json::Value,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn timing_path(report: &Path) -> PathBuf {
    report.with_extension("timing.json")
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let mut flags = cli.command.flags()?;
    if let Some(seed) = cli.seed {
        push_int(&mut flags, "seed", Some(seed))?;
    }
    let mut config = config::load(
        cli.config.as_deref(),
        std::env::vars(),
        flags.iter().filter(|f| !f.0.is_empty()).cloned().collect(),
    )?;
    config.experiment = cli.command.name().into();

    let started = Instant::now();
    let output = match &cli.command {
        Command::Orbit { .. } => commands::orbit(&config)?,
        Command::Lyapunov { .. } => commands::lyapunov(&config)?,
        Command::Diagnose { .. } => commands::diagnose(&config)?,
        Command::Induce { .. } => commands::induce(&config)?,
        Command::SearchReducibility { .. } => commands::search(&config)?,
        Command::VerifyCounterexamples { .. } => commands::verify_counterexamples(&config)?,
        Command::ReproducePaper { .. } => commands::reproduce(&config)?,
    };
    let wall = started.elapsed().as_secs_f64();

    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: "o2cocycle",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        config: &config,
        result: &output.result,
    };
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    let timing = serde_json::json!({ "command": cli.command.name(), "wall_seconds": wall })
        .to_string()
        + "\n";
    let is_orbit = matches!(cli.command, Command::Orbit { .. });

    match &cli.out {
        None if is_orbit => print!("{}", output.csv[0].1),
        None => print!("{json}"),
        Some(path) if path.extension().is_some_and(|e| e == "json") => {
            write(path, &json)?;
            write(&timing_path(path), &timing)?;
        }
        Some(path) if is_orbit && path.extension().is_some_and(|e| e == "csv") => {
            write(path, &output.csv[0].1)?;
        }
        Some(dir) => {
            let report_path = dir.join(format!("{}.json", cli.command.name()));
            write(&report_path, &json)?;
            write(&timing_path(&report_path), &timing)?;
            for (name, text) in &output.csv {
                write(&dir.join(name), text)?;
            }
        }
    }
    if let Some(summary) = &output.summary {
        eprintln!("{summary}");
    }
    eprintln!("{} finished in {wall:.1} s", cli.command.name());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("o2cocycle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
