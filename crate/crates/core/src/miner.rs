//! Serial set-enumeration search over `⟨S, ext(S)⟩` nodes, and the two
//! decomposing variants the engine uses to hand subtrees off as new tasks.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::graph::{induced_subgraph, recode_ids, two_hop_set, Graph, IdRecoding, VertexId};
use crate::pruning::{
    compute_degrees, cover_vertex, iterative_bounding, CandidateState, Context, MiningParams,
};
use crate::sink::{EmitSite, ResultSink};

/// Receives search nodes that should become independent tasks. `s` and
/// `ext` are local to `graph`; `ids` maps them to output ids.
pub trait SubtaskEmitter {
    fn emit_subtask(&mut self, graph: &Graph, ids: &[VertexId], s: &[VertexId], ext: &[VertexId]);
}

/// Time source for the timeout check.
pub trait Clock {
    /// Time since the current mining phase began.
    fn elapsed(&mut self) -> Duration;
}

pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn start_at(start: Instant) -> Self {
        WallClock { start }
    }
}

impl Clock for WallClock {
    fn elapsed(&mut self) -> Duration {
        self.start.elapsed()
    }
}

/// Sorts `ext` ascending by `d_S`, then `d_ext(S)`, then id. Degree arrays
/// (including `deg_ee`) are permuted along with it.
pub fn order_ext(st: &mut CandidateState) {
    assert!(st.ee_valid, "order_ext needs deg_ee");
    let mut idx: Vec<usize> = (0..st.ext.len()).collect();
    idx.sort_unstable_by_key(|&j| (st.deg_se[j], st.deg_ee[j], st.ext[j]));
    st.ext = idx.iter().map(|&j| st.ext[j]).collect();
    st.deg_se = idx.iter().map(|&j| st.deg_se[j]).collect();
    st.deg_ee = idx.iter().map(|&j| st.deg_ee[j]).collect();
}

/// Orders `ext` and puts the largest cover set at its tail. Returns the
/// reordered list and how many leading vertices must be branched on.
fn prepare_branching(ctx: &mut Context<'_>, s: &[VertexId], ext: Vec<VertexId>) -> (Vec<VertexId>, usize) {
    let mut st = CandidateState::new(s.to_vec(), ext);
    compute_degrees(ctx, &mut st, true);
    order_ext(&mut st);
    let Some((_, cover)) = cover_vertex(ctx, &st) else {
        let n = st.ext.len();
        return (st.ext, n);
    };
    let (mut head, tail): (Vec<VertexId>, Vec<VertexId>) = st.ext.iter().partition(|u| !cover.contains(u));
    let branch = head.len();
    head.extend(tail);
    (head, branch)
}

enum Descent<'c> {
    Recurse,
    Timed { clock: &'c mut dyn Clock, tau_time: Duration, emitter: &'c mut dyn SubtaskEmitter },
}

fn search(
    ctx: &mut Context<'_>,
    s: Vec<VertexId>,
    ext: Vec<VertexId>,
    sink: &mut dyn ResultSink,
    descent: &mut Descent<'_>,
) -> bool {
    let tau = ctx.params.tau_size();
    let mut found = false;
    let (ordered, branch) = prepare_branching(ctx, &s, ext);
    let mut ext: VecDeque<VertexId> = ordered.into();
    for _ in 0..branch {
        if s.len() + ext.len() < tau {
            return found;
        }
        let ext_slice = ext.make_contiguous();
        if ctx.is_quasi_clique_union(&s, ext_slice) {
            let mut all = s.clone();
            all.extend_from_slice(ext_slice);
            ctx.emit(sink, &all, EmitSite::Lookahead);
            return true;
        }
        let v = ext.pop_front().expect("branch vertex");
        let mut s1 = s.clone();
        s1.push(v);
        let ext1 = ctx.within_two_hops(v, ext.make_contiguous());
        if ext1.is_empty() {
            found |= ctx.check_candidate(&s1, sink, EmitSite::EmptyAfterDiameter);
            continue;
        }
        let mut child = CandidateState::new(s1, ext1);
        let pruned = iterative_bounding(ctx, &mut child, sink);
        let viable = !pruned && child.s.len() + child.ext.len() >= tau;
        let timed_out = match descent {
            Descent::Recurse => false,
            Descent::Timed { clock, tau_time, .. } => clock.elapsed() > *tau_time,
        };
        if timed_out {
            if let Descent::Timed { emitter, .. } = descent {
                if viable {
                    emitter.emit_subtask(ctx.graph, ctx.ids, &child.s, &child.ext);
                }
            }
            ctx.check_candidate(&child.s, sink, EmitSite::TimeoutChild);
        } else if viable {
            let child_found = search(ctx, child.s.clone(), child.ext, sink, descent);
            found |= child_found;
            if !child_found {
                found |= ctx.check_candidate(&child.s, sink, EmitSite::NoLargerFound);
            }
        }
    }
    found
}

/// Mines every valid quasi-clique extending `S` with vertices of `ext`.
/// Returns `true` iff some valid `Q ⊋ S` was emitted along the way.
pub fn recursive_mine(
    ctx: &mut Context<'_>,
    s: Vec<VertexId>,
    ext: Vec<VertexId>,
    sink: &mut dyn ResultSink,
) -> bool {
    search(ctx, s, ext, sink, &mut Descent::Recurse)
}

/// Same search as [`recursive_mine`], except that once `clock` passes
/// `tau_time`, surviving children are handed to `emitter` instead of being
/// explored, and each such child's `S'` is checked on the spot.
pub fn time_delayed(
    ctx: &mut Context<'_>,
    s: Vec<VertexId>,
    ext: Vec<VertexId>,
    clock: &mut dyn Clock,
    tau_time: Duration,
    emitter: &mut dyn SubtaskEmitter,
    sink: &mut dyn ResultSink,
) -> bool {
    search(ctx, s, ext, sink, &mut Descent::Timed { clock, tau_time, emitter })
}

/// One level of the search with every surviving child handed to `emitter`
/// as a task. Each child's `S'` is checked immediately since its subtree is
/// mined elsewhere.
pub fn split_children(
    ctx: &mut Context<'_>,
    s: Vec<VertexId>,
    ext: Vec<VertexId>,
    emitter: &mut dyn SubtaskEmitter,
    sink: &mut dyn ResultSink,
) {
    let tau = ctx.params.tau_size();
    let (ordered, branch) = prepare_branching(ctx, &s, ext);
    let mut ext: VecDeque<VertexId> = ordered.into();
    for _ in 0..branch {
        if s.len() + ext.len() < tau {
            return;
        }
        let ext_slice = ext.make_contiguous();
        if ctx.is_quasi_clique_union(&s, ext_slice) {
            let mut all = s.clone();
            all.extend_from_slice(ext_slice);
            ctx.emit(sink, &all, EmitSite::Lookahead);
            return;
        }
        let v = ext.pop_front().expect("branch vertex");
        let mut s1 = s.clone();
        s1.push(v);
        let ext1 = ctx.within_two_hops(v, ext.make_contiguous());
        ctx.check_candidate(&s1, sink, EmitSite::SplitChild);
        if ext1.is_empty() {
            continue;
        }
        let mut child = CandidateState::new(s1, ext1);
        let pruned = iterative_bounding(ctx, &mut child, sink);
        if !pruned && child.s.len() + child.ext.len() >= tau {
            emitter.emit_subtask(ctx.graph, ctx.ids, &child.s, &child.ext);
        }
    }
}

/// Mines the subtree of a spawning vertex (`s = [root]`), also covering the
/// root on its own when the size threshold allows singletons.
pub fn mine_root(
    ctx: &mut Context<'_>,
    root: VertexId,
    ext: Vec<VertexId>,
    sink: &mut dyn ResultSink,
) -> bool {
    let found = recursive_mine(ctx, vec![root], ext, sink);
    if !found {
        ctx.check_candidate(&[root], sink, EmitSite::Singleton);
    }
    found
}

/// Vertices that need a top-level search. With recoding, neighbors of the
/// max-degree vertex (id 0) are skipped: anything they yield alone can be
/// extended by vertex 0.
pub fn spawn_vertices(g: &Graph, recoded: bool) -> Vec<VertexId> {
    if recoded && g.vertex_count() > 0 {
        let nbrs = g.neighbors(0);
        g.vertices().filter(|v| nbrs.binary_search(v).is_err()).collect()
    } else {
        g.vertices().collect()
    }
}

/// Serial driver on a graph already shrunk to its k-core. Emitted ids refer
/// to `g` whether or not recoding is used internally.
pub fn mine_serial(g: &Graph, params: MiningParams, recode: bool, sink: &mut dyn ResultSink) {
    let (work, recoding) = if recode {
        let (rg, rec) = recode_ids(g);
        (rg, rec)
    } else {
        (g.clone(), IdRecoding::identity(g.vertex_count()))
    };
    for v in spawn_vertices(&work, recode) {
        let mut members = two_hop_set(&work, v, Some(v));
        members.push(v);
        let sub = induced_subgraph(&work, &members);
        let ids: Vec<VertexId> = sub.ids.iter().map(|&x| recoding.to_old(x)).collect();
        let mut ctx = Context::new(&sub.graph, &ids, params);
        let ext: Vec<VertexId> = (1..sub.vertex_count() as VertexId).collect();
        mine_root(&mut ctx, 0, ext, sink);
    }
}
