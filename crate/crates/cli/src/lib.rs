//! Argument handling and the end-to-end run behind the `qcminer` binary.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use qcminer::graph::load_graph;
use qcminer::postprocess::render_results;
use qcminer::{
    mine, mine_to_file, ConfigError, EngineConfig, Gamma, GraphError, GraphFormat, MiningParams, Mode,
    PipelineError,
};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// One `u v` pair per line.
    Edge,
    /// `id degree n1 n2 ...` per line.
    Adj,
}

/// Mine maximal gamma-quasi-cliques.
#[derive(Debug, Parser)]
#[command(name = "qcminer", version)]
pub struct Args {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "edge")]
    pub format: FormatArg,
    /// Degree ratio, as a decimal or `p/q`; at least 0.5.
    #[arg(long)]
    pub gamma: String,
    /// Smallest result size to report.
    #[arg(long)]
    pub min_size: usize,
    #[arg(long, default_value = "time")]
    pub mode: String,
    /// Tasks with more candidates than this are big.
    #[arg(long, default_value_t = 50)]
    pub tau_split: usize,
    /// Mining budget per task in seconds before the rest is split off.
    #[arg(long, default_value_t = 5.0)]
    pub tau_time: f64,
    /// Defaults to the number of hardware threads.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1024)]
    pub queue_cap: usize,
    /// Parent directory for spill files; the system temp dir otherwise.
    #[arg(long)]
    pub spill_dir: Option<PathBuf>,
    #[arg(long, overrides_with = "no_recode")]
    pub recode: bool,
    #[arg(long)]
    pub no_recode: bool,
    /// Result file; results go to stdout without it.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print the run statistics to stderr.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IoSettings {
    pub input: PathBuf,
    pub format: GraphFormat,
    pub recode: bool,
    pub output: Option<PathBuf>,
    pub stats: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub params: MiningParams,
    pub engine: EngineConfig,
    pub io: IoSettings,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: GraphError },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("writing results: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    /// 2 for bad invocations, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Parses and validates a full argument vector, program name included.
pub fn parse_config<I, T>(argv: I) -> Result<Settings, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    settings_from(args)
}

pub fn settings_from(args: Args) -> Result<Settings, CliError> {
    let gamma: Gamma = args.gamma.parse()?;
    let params = MiningParams::new(gamma, args.min_size)?;
    let mode: Mode = args.mode.parse()?;
    if !args.tau_time.is_finite() || args.tau_time < 0.0 {
        return Err(ConfigError::Invalid(format!(
            "tau-time must be a non-negative number of seconds, got {}",
            args.tau_time
        ))
        .into());
    }
    let workers = args.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let engine = EngineConfig {
        mode,
        tau_split: args.tau_split,
        tau_time: Duration::from_secs_f64(args.tau_time),
        workers,
        batch: args.batch_size,
        queue_capacity: args.queue_cap,
        spill_dir: args.spill_dir,
    };
    engine.validate()?;
    let format = match args.format {
        FormatArg::Edge => GraphFormat::EdgeList,
        FormatArg::Adj => GraphFormat::Adjacency,
    };
    Ok(Settings {
        params,
        engine,
        io: IoSettings {
            input: args.input,
            format,
            recode: !args.no_recode,
            output: args.output,
            stats: args.stats,
        },
    })
}

/// Loads, mines and writes results; statistics go to `err` when requested.
pub fn run(settings: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let io = &settings.io;
    let input_error = |source| CliError::Input { path: io.input.clone(), source };
    let file = File::open(&io.input).map_err(|e| input_error(GraphError::Io(e)))?;
    let loaded = load_graph(BufReader::new(file), io.format).map_err(input_error)?;
    let outcome = match &io.output {
        Some(path) => mine_to_file(&loaded, settings.params, &settings.engine, io.recode, path)?,
        None => {
            let outcome =
                mine(&loaded, settings.params, &settings.engine, io.recode).map_err(PipelineError::from)?;
            out.write_all(render_results(&outcome.results).as_bytes())?;
            outcome
        }
    };
    if io.stats {
        err.write_all(outcome.stats.report().as_bytes())?;
    }
    Ok(())
}
