//! Command-line front end for `treeheat-core`: reads a run configuration,
//! runs one computation and writes CSV reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod run_config;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::CommandOutput;
use crate::output::{write_file, RunMeta};
use crate::run_config::{LoadError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Geometry,
    Heat,
    Bounds,
    Schrodinger,
    OracleCompare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Geometry => "geometry",
            Command::Heat => "heat",
            Command::Bounds => "bounds",
            Command::Schrodinger => "schrodinger",
            Command::OracleCompare => "oracle-compare",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Run configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Directory for output files (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Multiplies points_per_unit.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub refine: usize,
    /// Not supported; nothing here is random.
    #[arg(long, value_name = "SEED", hide = true)]
    pub seed: Option<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CommandArgs {
    /// Doubling, dimension and Sobolev constants of the tree.
    Geometry(CommonArgs),
    /// Diagonal heat kernel over the sweep.
    Heat(CommonArgs),
    /// Verify heat kernel and functional inequalities.
    Bounds(CommonArgs),
    /// Eigenvalue moments of -Δ - V against their bounds.
    Schrodinger(CommonArgs),
    /// Channel synthesis against the full-graph discretization.
    OracleCompare(CommonArgs),
}

impl CommandArgs {
    pub fn split(&self) -> (Command, &CommonArgs) {
        match self {
            CommandArgs::Geometry(a) => (Command::Geometry, a),
            CommandArgs::Heat(a) => (Command::Heat, a),
            CommandArgs::Bounds(a) => (Command::Bounds, a),
            CommandArgs::Schrodinger(a) => (Command::Schrodinger, a),
            CommandArgs::OracleCompare(a) => (Command::OracleCompare, a),
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "treeheat", version, about = "Heat kernels and Schrödinger bounds on symmetric metric trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("--seed is not supported: every computation is deterministic")]
    SeedRejected,
    #[error("{0}")]
    Config(#[from] LoadError),
    #[error("{0}")]
    Core(#[from] treeheat_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub violated: bool,
}

impl RunResult {
    /// Process exit status: nonzero iff a verified bound was violated.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.violated)
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<CommandOutput, treeheat_core::Error> {
    match command {
        Command::Geometry => commands::geometry(cfg),
        Command::Heat => commands::heat(cfg),
        Command::Bounds => commands::bounds(cfg),
        Command::Schrodinger => commands::schrodinger(cfg),
        Command::OracleCompare => commands::oracle_compare(cfg),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn run(args: &CommandArgs) -> Result<RunResult, CliError> {
    let (command, common) = args.split();
    if common.seed.is_some() {
        return Err(CliError::SeedRejected);
    }
    let cfg = RunConfig::load(&common.config, command, common.refine)?;
    let out = execute(command, &cfg)?;
    std::fs::create_dir_all(&common.out).map_err(io_err(&common.out))?;
    let meta = RunMeta {
        command: command.name(),
        digest: cfg.digest.clone(),
        refine: common.refine,
    };
    let mut files = Vec::new();
    for (name, table) in &out.tables {
        let path = common.out.join(name);
        files.push(write_file(&common.out, name, &table.render(&meta)).map_err(io_err(&path))?);
    }
    if let Some((name, text)) = &out.text {
        let path = common.out.join(name);
        let content = format!("{}{text}", meta.header());
        files.push(write_file(&common.out, name, &content).map_err(io_err(&path))?);
    }
    Ok(RunResult {
        files,
        summary: out.summary,
        violated: out.violated,
    })
}
