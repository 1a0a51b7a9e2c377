//! End-to-end mining of a loaded graph, with ids translated back to the
//! ones used in the input.

use std::path::Path;

use crate::engine::{run, EngineConfig, RunStats};
use crate::error::{EngineError, ResultIoError};
use crate::graph::{k_core, recode_ids, IdRecoding, LoadedGraph, Subgraph, VertexId};
use crate::postprocess::{maximality_filter, merge_and_emit, write_sink_file};
use crate::pruning::MiningParams;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Results(#[from] ResultIoError),
    #[error("work directory: {0}")]
    WorkDir(#[source] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct MiningOutcome {
    /// Maximal sets in input ids, canonically ordered.
    pub results: Vec<Vec<u64>>,
    pub stats: RunStats,
}

/// The graph the engine sees, and the way back to input ids.
struct Prepared {
    core: Subgraph,
    recoding: IdRecoding,
    work: crate::graph::Graph,
}

fn prepare(loaded: &LoadedGraph, params: &MiningParams, recode: bool) -> Prepared {
    let core = k_core(&loaded.graph, params.k());
    let (work, recoding) = if recode {
        recode_ids(&core.graph)
    } else {
        (core.graph.clone(), IdRecoding::identity(core.vertex_count()))
    };
    Prepared { core, recoding, work }
}

impl Prepared {
    fn to_input(&self, loaded: &LoadedGraph, v: VertexId) -> u64 {
        loaded.original_ids[self.core.ids[self.recoding.to_old(v) as usize] as usize]
    }
}

/// Size descending, then lexicographic.
pub fn canonical_order(sets: &mut [Vec<u64>]) {
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
}

/// k-core, optional recoding, engine run and maximality filter, all in
/// memory.
pub fn mine(
    loaded: &LoadedGraph,
    params: MiningParams,
    config: &EngineConfig,
    recode: bool,
) -> Result<MiningOutcome, EngineError> {
    let prep = prepare(loaded, &params, recode);
    let out = run(&prep.work, params, config, recode)?;
    let mut results: Vec<Vec<u64>> = maximality_filter(&out.raw())
        .iter()
        .map(|s| {
            let mut t: Vec<u64> = s.iter().map(|&v| prep.to_input(loaded, v)).collect();
            t.sort_unstable();
            t
        })
        .collect();
    canonical_order(&mut results);
    let mut stats = out.stats;
    stats.results_maximal = results.len();
    Ok(MiningOutcome { results, stats })
}

/// Same as [`mine`], but each worker's raw output goes through a sink file
/// that is then merged into the result file at `out`.
pub fn mine_to_file(
    loaded: &LoadedGraph,
    params: MiningParams,
    config: &EngineConfig,
    recode: bool,
    out: &Path,
) -> Result<MiningOutcome, PipelineError> {
    let prep = prepare(loaded, &params, recode);
    let run_out = run(&prep.work, params, config, recode)?;
    let dir = match &config.spill_dir {
        Some(parent) => tempfile::Builder::new().prefix("qcminer-sinks-").tempdir_in(parent),
        None => tempfile::Builder::new().prefix("qcminer-sinks-").tempdir(),
    }
    .map_err(PipelineError::WorkDir)?;
    let mut files = Vec::with_capacity(run_out.raw_by_worker.len());
    for (i, sets) in run_out.raw_by_worker.iter().enumerate() {
        let path = dir.path().join(format!("worker-{i}.txt"));
        write_sink_file(&path, sets)?;
        files.push(path);
    }
    let results = merge_and_emit(&files, out, |v| prep.to_input(loaded, v))?;
    let mut stats = run_out.stats;
    stats.results_maximal = results.len();
    Ok(MiningOutcome { results, stats })
}
