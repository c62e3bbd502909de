mod config;
mod error;
mod output;
mod presets;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lambda_cavity::solver::Method;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{to_value, write_json, Format};
use crate::run::{Settings, DEFAULT_N_MAX};

/// Probe absorption of a cavity-coupled three-level atom.
#[derive(Debug, Parser)]
#[command(name = "lambda-cavity", version)]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Output file (stdout when omitted); overrides `output` in the config.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// csv or json; default from the config, then the output extension.
    #[arg(long)]
    format: Option<String>,
    /// analytic, linear_response or finite_epsilon.
    #[arg(long)]
    method: Option<String>,
    /// Photon-number truncation.
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the spectral regime (JSON on stdout).
    Classify {
        #[arg(long, short)]
        config: PathBuf,
        /// Also write the report to this file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Probe absorption spectrum over a detuning grid.
    Spectrum(RunArgs),
    /// Photon-number populations of the probe-free steady state.
    Populations(RunArgs),
    /// Write the data bundle for one figure.
    Reproduce {
        /// Figure id: 3a, 3b, 4ab, 4cd, 5a, 5b, 5c, 5d, 6, 7a, 7b, 8a or 8b.
        figure: String,
        /// Output directory (default fig<id>).
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
    },
}

fn settings(cfg: &RunConfig, args: &RunArgs, output: Option<&Path>) -> CliResult<Settings> {
    let method = match &args.method {
        Some(m) => Some(m.parse::<Method>().map_err(CliError::Config)?),
        None => cfg.method()?,
    };
    let n_max = args.n_max.or(cfg.n_max).unwrap_or(DEFAULT_N_MAX);
    let explicit = args.format.as_deref().or(cfg.format.as_deref());
    Ok(Settings {
        n_max,
        format: Format::resolve(explicit, output)?,
        method,
    })
}

fn execute(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Classify { config, output } => {
            let cfg = RunConfig::load(&config)?;
            let report = to_value(&run::classify(&cfg)?);
            println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            if let Some(path) = output.or(cfg.output.map(PathBuf::from)) {
                write_json(&path, &report)?;
            }
            Ok(())
        }
        Command::Spectrum(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let output = args.output.clone().or(cfg.output.clone().map(PathBuf::from));
            let set = settings(&cfg, &args, output.as_deref())?;
            run::run_spectrum(&cfg, &set, output.as_deref())
        }
        Command::Populations(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let output = args.output.clone().or(cfg.output.clone().map(PathBuf::from));
            let set = settings(&cfg, &args, output.as_deref())?;
            run::run_populations(&cfg, &set, output.as_deref())
        }
        Command::Reproduce {
            figure,
            output,
            format,
            n_max,
        } => {
            let format = Format::resolve(format.as_deref(), None)?;
            let dir = presets::reproduce(&figure, output.as_deref(), format, n_max)?;
            eprintln!("wrote {}", dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
