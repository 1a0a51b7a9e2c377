//! Multi-worker task engine.
//!
//! Each worker owns a local queue for small tasks; one shared global queue
//! holds big tasks and is always tried first, with a non-blocking lock so a
//! busy global queue never stalls a worker. Both kinds of queue spill
//! batches to disk when full. Long-running mining tasks can hand subtrees
//! off as new tasks, either by splitting big tasks one level (`Split`) or
//! after a time budget runs out (`Time`).

pub mod codec;
pub mod queue;
pub mod task;
mod worker;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{ConfigError, EngineError};
use crate::graph::{Graph, VertexId};
use crate::pruning::MiningParams;

pub use task::{classify, iteration_1, iteration_2, task_spawn, Task, TaskClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every task is mined to completion by the worker that pops it.
    Base,
    /// Big mining tasks are split into one task per child.
    Split,
    /// Tasks mine for up to `tau_time`, then hand remaining children off.
    #[default]
    Time,
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(Mode::Base),
            "split" => Ok(Mode::Split),
            "time" => Ok(Mode::Time),
            other => Err(ConfigError::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Base => "base",
            Mode::Split => "split",
            Mode::Time => "time",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    pub tau_split: usize,
    pub tau_time: Duration,
    pub workers: usize,
    /// Tasks per spill file, and the refill threshold.
    pub batch: usize,
    /// In-memory tasks per queue before spilling.
    pub queue_capacity: usize,
    /// Parent directory for the run's spill files; the system temp
    /// directory when unset.
    pub spill_dir: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Time,
            tau_split: 50,
            tau_time: Duration::from_secs(5),
            workers: 1,
            batch: 128,
            queue_capacity: 1024,
            spill_dir: None,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tau_split < 1 {
            return Err(ConfigError::NonPositive("tau-split"));
        }
        if self.workers < 1 {
            return Err(ConfigError::NonPositive("workers"));
        }
        if self.batch < 1 {
            return Err(ConfigError::NonPositive("batch-size"));
        }
        if self.queue_capacity < self.batch {
            return Err(ConfigError::Invalid(format!(
                "queue capacity {} is smaller than batch size {}",
                self.queue_capacity, self.batch
            )));
        }
        Ok(())
    }
}

/// Counters and cumulative timings of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunStats {
    /// Tasks created from spawning vertices.
    pub tasks_spawned: u64,
    /// Enqueues into the global queue.
    pub tasks_big: u64,
    /// Tasks created by splitting or timeouts.
    pub subtasks_created: u64,
    pub tasks_completed: u64,
    pub mining: Duration,
    pub materialize: Duration,
    pub results_raw: usize,
    pub results_maximal: usize,
    pub peak_queue_len: usize,
    pub spill_files: usize,
    /// Shortest time a task mined before creating its first subtask on a
    /// timeout.
    pub first_timeout_split: Option<Duration>,
    /// Every created task completed exactly once.
    pub tasks_conserved: bool,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl RunStats {
    pub fn mining_ms_total(&self) -> f64 {
        ms(self.mining)
    }

    pub fn materialize_ms_total(&self) -> f64 {
        ms(self.materialize)
    }

    /// `key value` lines.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push(' ');
            out.push_str(&v);
            out.push('\n');
        };
        line("tasks_spawned", self.tasks_spawned.to_string());
        line("tasks_big", self.tasks_big.to_string());
        line("subtasks_created", self.subtasks_created.to_string());
        line("tasks_completed", self.tasks_completed.to_string());
        line("mining_ms_total", format!("{:.3}", self.mining_ms_total()));
        line("materialize_ms_total", format!("{:.3}", self.materialize_ms_total()));
        line("results_raw", self.results_raw.to_string());
        line("results_maximal", self.results_maximal.to_string());
        line("peak_queue_len", self.peak_queue_len.to_string());
        line("spill_files", self.spill_files.to_string());
        if let Some(d) = self.first_timeout_split {
            line("first_timeout_split_ms", format!("{:.3}", ms(d)));
        }
        line("tasks_conserved", self.tasks_conserved.to_string());
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    /// Emitted sets per worker, ids of the engine's input graph.
    pub raw_by_worker: Vec<Vec<Vec<VertexId>>>,
    pub stats: RunStats,
}

impl RunOutput {
    pub fn raw(&self) -> Vec<Vec<VertexId>> {
        self.raw_by_worker.iter().flatten().cloned().collect()
    }
}

/// Mines `g` with `config.workers` threads. With `recoded`, `g` is taken to
/// come from [`crate::graph::recode_ids`] and neighbors of vertex 0 are not
/// spawned.
pub fn run(
    g: &Graph,
    params: MiningParams,
    config: &EngineConfig,
    recoded: bool,
) -> Result<RunOutput, EngineError> {
    config.validate()?;
    worker::run_workers(g, params, config, recoded)
}
