use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use netfilter_cli::commands::{self, Target};
use netfilter_cli::config::ExperimentConfig;
use netfilter_cli::reproduce::{reproduce, EXAMPLE_IDS};
use netfilter_cli::{CliError, CliResult};

/// Hidden non-n-locality in sequential linear quantum networks.
#[derive(Debug, Parser)]
#[command(name = "netfilter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate b_lin, b_seq and the success probability.
    Eval {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate every point of the config's scan grid and write CSV.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisect a parameter for the point where a bound crosses 1.
    Threshold {
        #[arg(long)]
        config: PathBuf,
        /// Parameter path, e.g. channels.0.param.
        #[arg(long)]
        axis: String,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        min: Option<f64>,
        #[arg(long)]
        max: Option<f64>,
    },
    /// Maximize b_seq over free filter entries.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated filter paths, e.g. filters.middle.0.0,filters.first.
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named reproduction (or `all`).
    Reproduce {
        id: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross-check the Born-rule outcome enumeration (n <= 3).
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_config(path: &Path) -> CliResult<(Value, ExperimentConfig)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    commands::load_config(&text)
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    writeln!(io::stdout().lock(), "{text}")?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Eval { config } => {
            let (_, cfg) = read_config(&config)?;
            if cfg.scan.is_some() {
                return Err(CliError::config(
                    "scan: eval takes a config without a scan block",
                ));
            }
            print_json(&commands::eval(&cfg)?)
        }
        Command::Scan { config, out } => {
            let (raw, cfg) = read_config(&config)?;
            let table = commands::scan(&raw, &cfg)?;
            match out {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(&path)?);
                    table.write_csv(&mut w)?;
                    w.flush()?;
                }
                None => table.write_csv(&mut io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Threshold {
            config,
            axis,
            target,
            min,
            max,
        } => {
            let (raw, cfg) = read_config(&config)?;
            let range = commands::threshold_range(&cfg, &axis, min, max)?;
            print_json(&commands::threshold(&raw, &axis, target, range)?)
        }
        Command::Optimize { config, free, seed } => {
            let (raw, _) = read_config(&config)?;
            print_json(&commands::optimize(&raw, &free, seed)?)
        }
        Command::Reproduce { id, seed } => {
            let ids: Vec<&str> = if id == "all" {
                EXAMPLE_IDS.to_vec()
            } else {
                vec![id.as_str()]
            };
            let mut all_passed = true;
            for id in ids {
                let report = reproduce(id, seed)?;
                println!("{report}");
                all_passed &= report.passed();
            }
            if all_passed {
                Ok(())
            } else {
                Err(CliError::Failure("reproduction failed".into()))
            }
        }
        Command::Oracle { config } => {
            let (_, cfg) = read_config(&config)?;
            print_json(&commands::oracle(&cfg)?)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("NETFILTER_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::config(format!(
            "NETFILTER_THREADS: expected a positive integer, got `{value}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        // The reader went away (e.g. `| head`); nothing left to report.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("netfilter: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
