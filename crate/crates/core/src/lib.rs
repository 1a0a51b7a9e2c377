//! Enumeration of maximal γ-quasi-cliques.
//!
//! The pipeline is: load → k-core → optional id recoding → task engine →
//! maximality filter. The search itself lives in [`miner`] and [`pruning`];
//! [`engine`] runs it on a pool of workers that always serve big tasks
//! first and can split long-running tasks into subtasks.

pub mod engine;
pub mod error;
pub mod gamma;
pub mod graph;
pub mod miner;
pub mod oracle;
pub mod pipeline;
pub mod postprocess;
pub mod pruning;
pub mod sink;
pub mod synth;

pub use engine::{run, EngineConfig, Mode, RunOutput, RunStats};
pub use error::{ConfigError, EngineError, GraphError};
pub use gamma::Gamma;
pub use graph::{Graph, GraphFormat, IdRecoding, Subgraph, VertexId};
pub use pipeline::{mine, mine_to_file, MiningOutcome, PipelineError};
pub use pruning::MiningParams;
