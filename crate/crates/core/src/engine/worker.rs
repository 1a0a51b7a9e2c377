use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use parking_lot::Mutex;

use super::queue::SpillQueue;
use super::task::{classify, iteration_1, iteration_2, task_spawn, Task, TaskClass};
use super::{EngineConfig, Mode, RunOutput, RunStats};
use crate::error::EngineError;
use crate::graph::{induced_subgraph, Graph, Subgraph, VertexId};
use crate::miner::{recursive_mine, spawn_vertices, split_children, time_delayed, SubtaskEmitter, WallClock};
use crate::pruning::{Context, MiningParams};
use crate::sink::EmitSite;

const WORKER_STACK: usize = 256 << 20;

pub(super) struct Shared<'g> {
    graph: &'g Graph,
    params: MiningParams,
    config: &'g EngineConfig,
    spawn_order: Vec<VertexId>,
    cursor: AtomicUsize,
    /// Tasks created and not yet completed, plus spawns in progress.
    live: AtomicUsize,
    next_seq: AtomicU64,
    global: Mutex<SpillQueue>,
    abort: AtomicBool,
}

impl<'g> Shared<'g> {
    fn new(
        graph: &'g Graph,
        params: MiningParams,
        config: &'g EngineConfig,
        spawn_order: Vec<VertexId>,
        dir: &std::path::Path,
    ) -> Self {
        Shared {
            graph,
            params,
            config,
            spawn_order,
            cursor: AtomicUsize::new(0),
            live: AtomicUsize::new(0),
            next_seq: AtomicU64::new(0),
            global: Mutex::new(SpillQueue::new(
                config.queue_capacity,
                config.batch,
                dir.to_path_buf(),
                "global",
            )),
            abort: AtomicBool::new(false),
        }
    }

    fn spawning_done(&self) -> bool {
        self.cursor.load(Ordering::SeqCst) >= self.spawn_order.len()
    }

    fn finished(&self) -> bool {
        self.spawning_done() && self.live.load(Ordering::SeqCst) == 0
    }
}

#[derive(Default)]
struct WorkerStats {
    tasks_spawned: u64,
    tasks_big: u64,
    subtasks_created: u64,
    mining: Duration,
    materialize: Duration,
    first_timeout_split: Option<Duration>,
}

/// Where a task goes, given its class. Asserts the routing invariant.
fn enqueue(
    t: Task,
    shared: &Shared<'_>,
    local: &mut SpillQueue,
    stats: &mut WorkerStats,
) -> Result<TaskClass, EngineError> {
    let class = classify(&t, shared.config.tau_split);
    match class {
        TaskClass::Big => {
            stats.tasks_big += 1;
            push_global(&mut shared.global.lock(), t, shared.config.tau_split)?;
        }
        TaskClass::Small => push_local(local, t, shared.config.tau_split)?,
    }
    Ok(class)
}

fn push_global(q: &mut SpillQueue, t: Task, tau_split: usize) -> Result<(), EngineError> {
    assert_eq!(classify(&t, tau_split), TaskClass::Big, "small task routed to the global queue");
    q.push(t)
}

fn push_local(q: &mut SpillQueue, t: Task, tau_split: usize) -> Result<(), EngineError> {
    assert_eq!(classify(&t, tau_split), TaskClass::Small, "big task routed to a local queue");
    q.push(t)
}

/// Turns handed-off search nodes into iteration-3 tasks on the subgraph
/// they induce.
struct TaskEmitter<'a, 'g> {
    shared: &'a Shared<'g>,
    local: &'a mut SpillQueue,
    stats: &'a mut WorkerStats,
    root: VertexId,
    started: Instant,
    record_first: bool,
    first: Option<Duration>,
    materialize: Duration,
    error: Option<EngineError>,
}

impl SubtaskEmitter for TaskEmitter<'_, '_> {
    fn emit_subtask(&mut self, graph: &Graph, ids: &[VertexId], s: &[VertexId], ext: &[VertexId]) {
        if self.record_first && self.first.is_none() {
            self.first = Some(self.started.elapsed());
        }
        let t0 = Instant::now();
        let mut members = s.to_vec();
        members.extend_from_slice(ext);
        let sub = induced_subgraph(graph, &members);
        let global = |xs: &[VertexId]| xs.iter().map(|&x| ids[x as usize]).collect::<Vec<_>>();
        let task = Task {
            seq: self.shared.next_seq.fetch_add(1, Ordering::SeqCst),
            root: self.root,
            iteration: 3,
            s: global(s),
            ext: global(ext),
            g: Subgraph { ids: global(&sub.ids), graph: sub.graph },
        };
        self.materialize += t0.elapsed();
        self.shared.live.fetch_add(1, Ordering::SeqCst);
        self.stats.subtasks_created += 1;
        if self.error.is_none() {
            if let Err(e) = enqueue(task, self.shared, self.local, self.stats) {
                self.error = Some(e);
            }
        }
    }
}

pub(super) struct Worker<'s, 'g> {
    shared: &'s Shared<'g>,
    local: SpillQueue,
    sink: Vec<Vec<VertexId>>,
    stats: WorkerStats,
    completed: Vec<u64>,
}

impl<'s, 'g> Worker<'s, 'g> {
    fn new(id: usize, shared: &'s Shared<'g>, dir: &std::path::Path) -> Self {
        Worker {
            shared,
            local: SpillQueue::new(
                shared.config.queue_capacity,
                shared.config.batch,
                dir.to_path_buf(),
                format!("local{id}"),
            ),
            sink: Vec::new(),
            stats: WorkerStats::default(),
            completed: Vec::new(),
        }
    }

    /// One scheduling step: a big task if the global queue can be locked
    /// right away and has one, else a small task, else a fresh batch of
    /// spawned tasks. Returns whether anything happened.
    fn step(&mut self) -> Result<bool, EngineError> {
        let big = match self.shared.global.try_lock() {
            Some(mut q) => q.pop()?,
            None => None,
        };
        if let Some(t) = big {
            self.execute(t)?;
            return Ok(true);
        }
        if let Some(t) = self.local.pop()? {
            self.execute(t)?;
            return Ok(true);
        }
        Ok(self.spawn_batch()? > 0)
    }

    /// Spawns up to one batch of tasks from the shared vertex cursor,
    /// stopping after the first big one.
    fn spawn_batch(&mut self) -> Result<usize, EngineError> {
        let shared = self.shared;
        let mut made = 0;
        while made < shared.config.batch {
            shared.live.fetch_add(1, Ordering::SeqCst);
            let i = shared.cursor.fetch_add(1, Ordering::SeqCst);
            let Some(&v) = shared.spawn_order.get(i) else {
                shared.live.fetch_sub(1, Ordering::SeqCst);
                break;
            };
            let Some(mut t) = task_spawn(v, shared.graph, &shared.params, 0) else {
                shared.live.fetch_sub(1, Ordering::SeqCst);
                continue;
            };
            t.seq = shared.next_seq.fetch_add(1, Ordering::SeqCst);
            self.stats.tasks_spawned += 1;
            made += 1;
            if enqueue(t, shared, &mut self.local, &mut self.stats)? == TaskClass::Big {
                break;
            }
        }
        Ok(made)
    }

    fn execute(&mut self, mut t: Task) -> Result<(), EngineError> {
        let shared = self.shared;
        let result = match t.iteration {
            1 => {
                if iteration_1(&mut t, shared.graph, &shared.params) {
                    // still pulling: requeue under its new pending count
                    return enqueue(t, shared, &mut self.local, &mut self.stats).map(|_| ());
                }
                Ok(())
            }
            2 => {
                if iteration_2(&mut t, shared.graph, &shared.params) {
                    self.mine(&t)
                } else {
                    Ok(())
                }
            }
            _ => self.mine(&t),
        };
        self.completed.push(t.seq);
        shared.live.fetch_sub(1, Ordering::SeqCst);
        result
    }

    fn mine(&mut self, t: &Task) -> Result<(), EngineError> {
        let shared = self.shared;
        let config = shared.config;
        let started = Instant::now();
        let local = |xs: &[VertexId]| -> Vec<VertexId> {
            xs.iter().map(|&x| t.g.local(x).expect("task vertex outside its subgraph")).collect()
        };
        let s = local(&t.s);
        let ext = local(&t.ext);
        let is_root = s.len() == 1;
        let ext_len = ext.len();
        let mut ctx = Context::new(&t.g.graph, &t.g.ids, shared.params);
        let mut emitter = TaskEmitter {
            shared,
            local: &mut self.local,
            stats: &mut self.stats,
            root: t.root,
            started,
            record_first: config.mode == Mode::Time,
            first: None,
            materialize: Duration::ZERO,
            error: None,
        };
        let sink = &mut self.sink;
        let found = match config.mode {
            Mode::Base => recursive_mine(&mut ctx, s.clone(), ext, sink),
            Mode::Split if ext_len > config.tau_split => {
                split_children(&mut ctx, s.clone(), ext, &mut emitter, sink);
                true
            }
            Mode::Split => recursive_mine(&mut ctx, s.clone(), ext, sink),
            Mode::Time => {
                let mut clock = WallClock::start_at(started);
                time_delayed(&mut ctx, s.clone(), ext, &mut clock, config.tau_time, &mut emitter, sink)
            }
        };
        if is_root && !found {
            ctx.check_candidate(&s, sink, EmitSite::Singleton);
        }
        let materialize = emitter.materialize;
        let first = emitter.first;
        let error = emitter.error.take();
        drop(emitter);
        self.stats.materialize += materialize;
        self.stats.mining += started.elapsed().saturating_sub(materialize);
        if let Some(d) = first {
            let best = self.stats.first_timeout_split.get_or_insert(d);
            *best = (*best).min(d);
        }
        error.map_or(Ok(()), Err)
    }

    fn run(&mut self) -> Result<(), EngineError> {
        let mut idle = 0u32;
        loop {
            if self.shared.abort.load(Ordering::SeqCst) {
                return Ok(());
            }
            if self.step()? {
                idle = 0;
                continue;
            }
            if self.shared.finished() {
                return Ok(());
            }
            idle += 1;
            if idle < 64 {
                std::thread::yield_now();
            } else {
                std::thread::sleep(Duration::from_micros(100));
            }
        }
    }
}

struct WorkerOutput {
    sink: Vec<Vec<VertexId>>,
    stats: WorkerStats,
    completed: Vec<u64>,
    peak_len: usize,
    spill_files: usize,
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".into()
    }
}

pub(super) fn run_workers(
    g: &Graph,
    params: MiningParams,
    config: &EngineConfig,
    recoded: bool,
) -> Result<RunOutput, EngineError> {
    let dir = match &config.spill_dir {
        Some(parent) => {
            std::fs::create_dir_all(parent)?;
            tempfile::Builder::new().prefix("qcminer-").tempdir_in(parent)?
        }
        None => tempfile::Builder::new().prefix("qcminer-").tempdir()?,
    };
    let shared = Shared::new(g, params, config, spawn_vertices(g, recoded), dir.path());
    let results: Vec<Result<WorkerOutput, EngineError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..config.workers)
            .map(|id| {
                let shared = &shared;
                let dir = dir.path();
                std::thread::Builder::new()
                    .name(format!("qc-worker-{id}"))
                    .stack_size(WORKER_STACK)
                    .spawn_scoped(scope, move || {
                        let outcome = catch_unwind(AssertUnwindSafe(|| {
                            let mut w = Worker::new(id, shared, dir);
                            w.run().map(|()| w)
                        }));
                        let outcome = match outcome {
                            Ok(r) => r,
                            Err(payload) => Err(EngineError::WorkerPanic(format!(
                                "worker {id}: {}",
                                panic_message(payload)
                            ))),
                        };
                        match outcome {
                            Ok(w) => Ok(WorkerOutput {
                                peak_len: w.local.peak_len(),
                                spill_files: w.local.files_written(),
                                sink: w.sink,
                                stats: w.stats,
                                completed: w.completed,
                            }),
                            Err(e) => {
                                shared.abort.store(true, Ordering::SeqCst);
                                Err(e)
                            }
                        }
                    })
                    .expect("spawn worker thread")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| Err(EngineError::WorkerPanic(panic_message(p)))))
            .collect()
    });

    let mut stats = RunStats::default();
    let mut raw_by_worker = Vec::new();
    let mut completed = Vec::new();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(w) => {
                stats.tasks_spawned += w.stats.tasks_spawned;
                stats.tasks_big += w.stats.tasks_big;
                stats.subtasks_created += w.stats.subtasks_created;
                stats.mining += w.stats.mining;
                stats.materialize += w.stats.materialize;
                stats.first_timeout_split = match (stats.first_timeout_split, w.stats.first_timeout_split) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                stats.peak_queue_len = stats.peak_queue_len.max(w.peak_len);
                stats.spill_files += w.spill_files;
                stats.results_raw += w.sink.len();
                completed.extend(w.completed);
                raw_by_worker.push(w.sink);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    let global = shared.global.into_inner();
    stats.peak_queue_len = stats.peak_queue_len.max(global.peak_len());
    stats.spill_files += global.files_written();
    stats.tasks_completed = completed.len() as u64;
    completed.sort_unstable();
    let created = shared.next_seq.load(Ordering::SeqCst);
    stats.tasks_conserved = completed.iter().copied().eq(0..created);
    Ok(RunOutput { raw_by_worker, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as VertexId {
            for v in u + 1..n as VertexId {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).0
    }

    fn mining_task(seq: u64, g: &Graph, root: VertexId) -> Task {
        let ids: Vec<VertexId> = (root..g.vertex_count() as VertexId).collect();
        let sub = induced_subgraph(g, &ids);
        Task { seq, root, iteration: 3, s: vec![root], ext: ids[1..].to_vec(), g: sub }
    }

    fn setup(config: &EngineConfig, g: &Graph, dir: &std::path::Path) -> Shared<'static> {
        let g: &'static Graph = Box::leak(Box::new(g.clone()));
        let config: &'static EngineConfig = Box::leak(Box::new(config.clone()));
        let params = MiningParams::new("1".parse().unwrap(), 3).unwrap();
        Shared::new(g, params, config, Vec::new(), dir)
    }

    #[test]
    fn big_task_first() {
        let dir = tempfile::tempdir().unwrap();
        let g = complete(6);
        let config = EngineConfig { tau_split: 3, mode: Mode::Base, ..EngineConfig::default() };
        let shared = setup(&config, &g, dir.path());
        let mut w = Worker::new(0, &shared, dir.path());
        let big = mining_task(0, &g, 0);
        let small = mining_task(1, &g, 3);
        push_local(&mut w.local, small, 3).unwrap();
        push_global(&mut shared.global.lock(), big, 3).unwrap();
        shared.live.store(2, Ordering::SeqCst);
        assert!(w.step().unwrap());
        assert_eq!(w.completed, vec![0]);
        assert!(w.step().unwrap());
        assert_eq!(w.completed, vec![0, 1]);
        assert!(!w.step().unwrap());
        assert!(shared.finished());
    }

    #[test]
    fn locked_global_falls_through() {
        let dir = tempfile::tempdir().unwrap();
        let g = complete(6);
        let config = EngineConfig { tau_split: 3, mode: Mode::Base, ..EngineConfig::default() };
        let shared = setup(&config, &g, dir.path());
        let mut w = Worker::new(0, &shared, dir.path());
        push_global(&mut shared.global.lock(), mining_task(0, &g, 0), 3).unwrap();
        push_local(&mut w.local, mining_task(1, &g, 3), 3).unwrap();
        shared.live.store(2, Ordering::SeqCst);
        let guard = shared.global.lock();
        assert!(w.step().unwrap());
        assert_eq!(w.completed, vec![1]);
        drop(guard);
        assert!(w.step().unwrap());
        assert_eq!(w.completed, vec![1, 0]);
    }

    #[test]
    #[should_panic(expected = "big task routed")]
    fn routing_is_asserted() {
        let dir = tempfile::tempdir().unwrap();
        let g = complete(6);
        let mut q = SpillQueue::new(4, 2, dir.path().to_path_buf(), "q");
        push_local(&mut q, mining_task(0, &g, 0), 3).unwrap();
    }
}
