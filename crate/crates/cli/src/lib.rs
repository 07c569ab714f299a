//! The `cslgrav` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{CommandName, Context};
use error::{exit, CliError};
use output::{write_json, ConfigEcho, Manifest};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "cslgrav", version, about = "Collapse models with gravitational noise: parameters, simulations, checks")]
pub struct Cli {
    /// JSON run configuration, or a manifest from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "CSLGRAV_OUT", default_value = "cslgrav-out")]
    pub out: PathBuf,
    /// Exit with status 2 if any result misses its tolerance.
    #[arg(long, global = true)]
    pub check: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the fluctuation-model parameter relations for a named scenario.
    SolveParams {
        /// planck-nucleon-monopole or planck-dipole.
        scenario: Option<String>,
        #[arg(long = "scenario", conflicts_with = "scenario")]
        scenario_flag: Option<String>,
    },
    /// Trajectory ensemble against the master equation for a few-site system.
    SimulateCsl {
        /// grwp or dggr.
        #[arg(long)]
        kernel: Option<String>,
    },
    /// Monte Carlo covariances of the vacuum fluctuation field.
    SampleVacuum {
        /// monopole or dipole.
        #[arg(long)]
        model: Option<String>,
    },
    /// Brownian heating of a free mass under sampled vacuum forces.
    Brownian {
        /// monopole or dipole.
        #[arg(long)]
        model: Option<String>,
    },
    /// Detectability verdicts for probe scenarios and a random sweep.
    CheckSemiclassical {
        /// Number of random scenarios.
        #[arg(long)]
        sweep: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> CommandName {
        match self {
            Command::SolveParams { .. } => CommandName::SolveParams,
            Command::SimulateCsl { .. } => CommandName::SimulateCsl,
            Command::SampleVacuum { .. } => CommandName::SampleVacuum,
            Command::Brownian { .. } => CommandName::Brownian,
            Command::CheckSemiclassical { .. } => CommandName::CheckSemiclassical,
        }
    }

    /// Flags that override keys of the parameter block.
    fn overrides(&self) -> Vec<(&'static str, serde_json::Value)> {
        let mut out = Vec::new();
        match self {
            Command::SolveParams { scenario, scenario_flag } => {
                if let Some(s) = scenario.as_ref().or(scenario_flag.as_ref()) {
                    out.push(("scenario", s.clone().into()));
                }
            }
            Command::SimulateCsl { kernel } => {
                if let Some(k) = kernel {
                    out.push(("kernel", k.clone().into()));
                }
            }
            Command::SampleVacuum { model } | Command::Brownian { model } => {
                if let Some(m) = model {
                    out.push(("model", m.clone().into()));
                }
            }
            Command::CheckSemiclassical { sweep } => {
                if let Some(n) = sweep {
                    out.push(("sweep", (*n).into()));
                }
            }
        }
        out
    }
}

/// Run the tool and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::ERROR } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::ERROR
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let file_config = cli.config.as_deref().map(config::load).transpose()?;
    let file_command = file_config.as_ref().and_then(|c| c.command.clone());
    let command = match (&cli.command, file_command) {
        (Some(c), Some(f)) if c.name().name() != f => {
            return Err(CliError::Usage(format!("command `{}` differs from `{f}` in the config", c.name().name())));
        }
        (Some(c), _) => c.name(),
        (None, Some(f)) => CommandName::parse(&f).ok_or_else(|| CliError::Config {
            file: cli.config.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            path: "command".into(),
            message: format!("unknown command `{f}`"),
        })?,
        (None, None) => return Err(CliError::Usage("no command given; see --help".into())),
    };

    let source = cli.config.clone().unwrap_or_else(|| PathBuf::from("<command line>"));
    let mut params = match file_config.as_ref().and_then(|c| c.params.clone()) {
        None => serde_json::Value::Object(Default::default()),
        Some(v @ serde_json::Value::Object(_)) => v,
        Some(_) => {
            return Err(CliError::Config {
                file: source.display().to_string(),
                path: "params".into(),
                message: "expected an object".into(),
            })
        }
    };
    if let (Some(c), serde_json::Value::Object(map)) = (&cli.command, &mut params) {
        for (key, value) in c.overrides() {
            map.insert(key.into(), value);
        }
    }
    if cli.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let seed = cli.seed.or(file_config.as_ref().and_then(|c| c.seed)).unwrap_or(DEFAULT_SEED);
    let ctx = Context { source, seed, workers: cli.workers, out: cli.out.clone() };

    let report = commands::run(command, &ctx, &params)?;
    let mut manifest = Manifest::new(
        ConfigEcho { command: command.name().into(), seed, params: report.params.clone() },
        cli.workers,
    );
    manifest.results = report.results;
    manifest.files = report.files;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::io(format!("creating {}", cli.out.display()), e))?;
    write_json(&manifest, &cli.out.join(MANIFEST))?;

    if let Some(text) = &report.stdout {
        print!("{text}");
    }
    for row in &manifest.results {
        eprintln!("{}", row.summary());
    }
    eprintln!("wrote {} and {} data file(s) to {}", MANIFEST, manifest.files.len(), cli.out.display());
    Ok(if cli.check && !manifest.all_pass() { exit::CHECK_FAILED } else { exit::OK })
}
