use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use uavcov_cli::config::{apply, parse_config, RunConfig};
use uavcov_cli::sweep::{run_sweep, write_rows};
use uavcov_cli::validate::{validate, Suite};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "uavcov",
    version,
    about = "UAV downlink coverage: analytic evaluation and Monte Carlo simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a configuration file.
    Sweep {
        config: PathBuf,
        /// Override the configured output path ("-" for standard output).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the first point of a configuration and print JSON.
    Point { config: PathBuf },
    /// Run a validation suite: distributions, coverage, numerics or all.
    Validate {
        suite: String,
        /// Monte Carlo samples per statistical check.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
}

fn load(path: &PathBuf) -> Result<RunConfig, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG)
    })?;
    parse_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG)
    })
}

fn sweep(config: PathBuf, output: Option<PathBuf>) -> ExitCode {
    let cfg = match load(&config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let rows = run_sweep(&cfg);
    let target = output.or_else(|| cfg.output.clone());
    let written = match target.filter(|p| p.as_os_str() != "-") {
        Some(path) => File::create(&path).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_rows(&rows, cfg.format, &mut w)?;
            w.flush()
        }),
        None => write_rows(&rows, cfg.format, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing results: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let failures: Vec<_> = rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| (r.sweep_value, e)))
        .collect();
    for (x, e) in &failures {
        eprintln!("point {} = {x}: {e}", cfg.sweep.var.name());
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERIC)
    }
}

fn point(config: PathBuf) -> ExitCode {
    let cfg = match load(&config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let single = RunConfig {
        sweep: uavcov_cli::config::Sweep {
            steps: 1,
            stop: cfg.sweep.start,
            ..cfg.sweep
        },
        ..cfg.clone()
    };
    let row = run_sweep(&single).remove(0);
    let (params, elevation) = match apply(&cfg, &single.sweep, single.sweep.start) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let doc = json!({
        "params": params,
        "elevation": elevation,
        "mode": cfg.mode,
        "metric": cfg.metric,
        "result": row,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    if row.error.is_some() {
        ExitCode::from(EXIT_NUMERIC)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_validate(suite: &str, samples: u64) -> ExitCode {
    let Some(suite) = Suite::parse(suite) else {
        eprintln!("error: unknown suite {suite:?}; expected distributions, coverage, numerics or all");
        return ExitCode::from(EXIT_CONFIG);
    };
    if samples < 10 {
        eprintln!("error: --samples must be at least 10");
        return ExitCode::from(EXIT_CONFIG);
    }
    let report = validate(suite, samples);
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Sweep { config, output } => sweep(config, output),
        Command::Point { config } => point(config),
        Command::Validate { suite, samples } => run_validate(&suite, samples),
    }
}
