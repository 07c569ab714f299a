mod brownian;
mod check_semiclassical;
mod sample_vacuum;
mod simulate_csl;
mod solve_params;

use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::config::parse_params;
use crate::error::CliError;
use crate::output::{emit_series, write_json, ResultRow, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandName {
    SolveParams,
    SimulateCsl,
    SampleVacuum,
    Brownian,
    CheckSemiclassical,
}

impl CommandName {
    pub const ALL: [CommandName; 5] = [
        CommandName::SolveParams,
        CommandName::SimulateCsl,
        CommandName::SampleVacuum,
        CommandName::Brownian,
        CommandName::CheckSemiclassical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandName::SolveParams => "solve-params",
            CommandName::SimulateCsl => "simulate-csl",
            CommandName::SampleVacuum => "sample-vacuum",
            CommandName::Brownian => "brownian",
            CommandName::CheckSemiclassical => "check-semiclassical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Everything a command needs besides its own parameter block.
pub struct Context {
    /// Where the parameters came from, for error messages.
    pub source: PathBuf,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: PathBuf,
}

impl Context {
    fn params<T: for<'de> Deserialize<'de> + Default>(&self, params: &serde_json::Value) -> Result<T, CliError> {
        parse_params(&self.source, Some(params))
    }

    fn config_error(&self, path: &str, message: impl Into<String>) -> CliError {
        CliError::Config { file: self.source.display().to_string(), path: path.into(), message: message.into() }
    }

    fn ensure_out(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(format!("creating {}", self.out.display()), e))
    }
}

/// What a command produced, before the manifest is written.
#[derive(Default)]
pub struct Report {
    pub params: serde_json::Value,
    pub results: Vec<ResultRow>,
    pub files: Vec<PathBuf>,
    /// Printed on stdout.
    pub stdout: Option<String>,
}

impl Report {
    fn new<P: Serialize>(params: &P) -> Result<Self, CliError> {
        Ok(Report { params: serde_json::to_value(params)?, ..Report::default() })
    }

    fn series(&mut self, ctx: &Context, name: &str, series: &Series) -> Result<(), CliError> {
        ctx.ensure_out()?;
        let path = ctx.out.join(name);
        emit_series(series, &path)?;
        self.files.push(PathBuf::from(name));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, ctx: &Context, name: &str, value: &T) -> Result<(), CliError> {
        ctx.ensure_out()?;
        write_json(value, &ctx.out.join(name))?;
        self.files.push(PathBuf::from(name));
        Ok(())
    }
}

pub fn run(command: CommandName, ctx: &Context, params: &serde_json::Value) -> Result<Report, CliError> {
    match command {
        CommandName::SolveParams => solve_params::run(ctx, params),
        CommandName::SimulateCsl => simulate_csl::run(ctx, params),
        CommandName::SampleVacuum => sample_vacuum::run(ctx, params),
        CommandName::Brownian => brownian::run(ctx, params),
        CommandName::CheckSemiclassical => check_semiclassical::run(ctx, params),
    }
}
