use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qrepeater::chain::PlanOutcome;
use qrepeater::config::Config;
use qrepeater::report::{self, Format, Table};
use qrepeater::Error;

#[derive(Parser, Debug)]
#[command(
    name = "qrepeater",
    version,
    about = "Quantum repeater rate and fidelity simulator"
)]
struct Cli {
    /// Configuration file of `key = value` lines; defaults apply otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FcChoice {
    Off,
    On,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-link budget: reflection, success probability, timing.
    Link,
    /// Fidelity and rate against purification rounds.
    Purify {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Fastest two-stage plan for one chain.
    Chain {
        #[arg(long)]
        stations: usize,
        #[arg(long)]
        distance_km: f64,
        /// Enable frequency conversion to the telecom band.
        #[arg(long)]
        fc: bool,
        /// End-to-end fidelity target; overrides the configuration.
        #[arg(long)]
        target: Option<f64>,
    },
    /// Optimized rate over a distance grid.
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = [5usize, 9, 17])]
        stations: Vec<usize>,
        /// `lo:hi:points[,log|lin]` or a comma list in km.
        #[arg(long, default_value = report::DEFAULT_DISTANCE_GRID)]
        distances: String,
        #[arg(long, value_enum, default_value_t = FcChoice::Both)]
        fc: FcChoice,
        #[arg(long)]
        target: Option<f64>,
    },
}

enum Failure {
    Input(Error),
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ConfigParse { .. }
            | Error::ConfigInvalid(_)
            | Error::InvalidStations(_)
            | Error::ParameterRange { .. } => Failure::Input(e),
            other => Failure::Other(other),
        }
    }
}

fn load_config(path: Option<&PathBuf>, target: Option<f64>) -> Result<Config, Failure> {
    let mut config = match path {
        Some(p) => Config::load(p).map_err(|e| match e {
            Error::Io(_) => Failure::Input(e),
            other => Failure::from(other),
        })?,
        None => Config::default(),
    };
    if let Some(t) = target {
        config.fidelity_target = t;
        config.validate()?;
    }
    Ok(config)
}

fn emit(table: &Table, config: &Config, cli: &Cli) -> Result<(), Failure> {
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let text = table.render(config, format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Other(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Link => {
            let config = load_config(cli.config.as_ref(), None)?;
            emit(&report::link_table(&config)?, &config, cli)?;
        }
        Command::Purify { n_max } => {
            let config = load_config(cli.config.as_ref(), None)?;
            emit(&report::purify_table(&config, *n_max)?, &config, cli)?;
        }
        Command::Chain {
            stations,
            distance_km,
            fc,
            target,
        } => {
            let config = load_config(cli.config.as_ref(), *target)?;
            let (table, outcome) = report::chain_table(&config, *stations, *distance_km, *fc)?;
            emit(&table, &config, cli)?;
            if let PlanOutcome::Infeasible { best_fidelity, .. } = outcome {
                eprintln!(
                    "no plan reaches fidelity {} (best {best_fidelity:.6})",
                    config.fidelity_target
                );
                return Ok(false);
            }
        }
        Command::Sweep {
            stations,
            distances,
            fc,
            target,
        } => {
            let config = load_config(cli.config.as_ref(), *target)?;
            let grid = report::parse_distance_grid(distances)?;
            let fc_options: &[bool] = match fc {
                FcChoice::Off => &[false],
                FcChoice::On => &[true],
                FcChoice::Both => &[false, true],
            };
            emit(
                &report::sweep_table(&config, stations, &grid, fc_options)?,
                &config,
                cli,
            )?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
