//! `ptscatter`: spectra, coherence curves, oracle validation and medium realizations.
//!
//! Exit codes: 0 success, 1 validation failure (or a numerical failure), 2 configuration error.

mod config;
mod output;
mod run;
mod validate;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptscatter::presets::Figure;

use config::{Command, ConfigError, RunConfig};
use output::OutDir;

#[derive(Parser)]
#[command(name = "ptscatter", version, about = "Weak scattering from PT-symmetric and classic random media")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Far-zone spectral-density map over (theta, phi).
    Spectrum(Common),
    /// Spectral degree of coherence for symmetric direction pairs.
    Coherence(Common),
    /// Cross-check closed forms against quadrature, Monte-Carlo and PSD oracles.
    Validate(Common),
    /// Write sampled medium realizations and an ensemble summary.
    Realize(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH", conflicts_with = "figure", required_unless_present = "figure")]
    config: Option<PathBuf>,
    /// Published parameter preset.
    #[arg(long, value_parser = figure_parser())]
    figure: Option<Figure>,
    /// RNG seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config. Defaults to `ptscatter-out`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Cross-check against the oracles; overrides the config.
    #[arg(long, value_enum)]
    oracle: Option<Toggle>,
}

fn figure_parser() -> impl clap::builder::TypedValueParser<Value = Figure> {
    use clap::builder::TypedValueParser;
    let names: Vec<&'static str> = Figure::ALL.iter().map(|f| f.name()).collect();
    clap::builder::PossibleValuesParser::new(names).map(|s| s.parse::<Figure>().expect("listed figure"))
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io(std::io::Error),
    Compute(ptscatter::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ptscatter::Error> for CliError {
    fn from(e: ptscatter::Error) -> Self {
        match e {
            ptscatter::Error::InvalidParameter(_) | ptscatter::Error::InvalidGrid(_) => {
                CliError::Config(ConfigError(e.to_string()))
            }
            e => CliError::Compute(e),
        }
    }
}

fn resolve(cmd: Command, args: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = match (&args.config, args.figure) {
        (Some(p), _) => RunConfig::from_path(p)?,
        (None, Some(f)) => RunConfig::from_figure(f, cmd)?,
        (None, None) => unreachable!("clap requires one of --config and --figure"),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.oracle {
        cfg.oracle = Some(matches!(t, Toggle::On));
    }
    cfg.resolve_defaults(cmd);
    cfg.check_common()?;
    let out =
        args.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| "ptscatter-out".into());
    Ok((cfg, out))
}

fn execute(cmd: Command, args: &Common) -> Result<Status, CliError> {
    let (cfg, dir) = resolve(cmd, args)?;
    let mut out = OutDir::create(&dir)?;
    let status = match cmd {
        Command::Spectrum => run::spectrum(&cfg, &mut out)?,
        Command::Coherence => run::coherence(&cfg, &mut out)?,
        Command::Validate => validate::validate(&cfg, &mut out)?,
        Command::Realize => run::realize(&cfg, &mut out)?,
    };
    for f in out.written() {
        println!("{}", dir.join(f).display());
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match &cli.command {
        Sub::Spectrum(a) => (Command::Spectrum, a),
        Sub::Coherence(a) => (Command::Coherence, a),
        Sub::Validate(a) => (Command::Validate, a),
        Sub::Realize(a) => (Command::Realize, a),
    };
    match execute(cmd, args) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => {
            eprintln!("{}: checks failed", cmd.name());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) | CliError::Io(_) => ExitCode::from(2),
                CliError::Compute(_) => ExitCode::from(1),
            }
        }
    }
}
