//! Search-node bookkeeping and the pruning rules applied to it.
//!
//! A node is a pair `⟨S, ext(S)⟩`: `S` is already part of every quasi-clique
//! mined below the node and `ext(S)` holds the candidates still able to
//! extend it. All ids here are local to the graph held by [`Context`].
//!
//! Four degree arrays drive every rule:
//!
//! | array    | indexed by | counts            |
//! |----------|------------|-------------------|
//! | `deg_ss` | `v ∈ S`    | `|N(v) ∩ S|`      |
//! | `deg_es` | `v ∈ S`    | `|N(v) ∩ ext(S)|` |
//! | `deg_se` | `u ∈ ext`  | `|N(u) ∩ S|`      |
//! | `deg_ee` | `u ∈ ext`  | `|N(u) ∩ ext(S)|` |
//!
//! `deg_ee` is only needed by the candidate-removal rules, so it is filled
//! lazily right before they run.

use crate::error::ConfigError;
use crate::gamma::Gamma;
use crate::graph::{Graph, VertexId};
use crate::sink::{EmitSite, ResultSink};

/// `(gamma, tau_size)` with gamma restricted to `[1/2, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MiningParams {
    gamma: Gamma,
    tau_size: usize,
}

impl MiningParams {
    pub fn new(gamma: Gamma, tau_size: usize) -> Result<Self, ConfigError> {
        if !gamma.at_least_half() {
            return Err(ConfigError::GammaBelowHalf(gamma.to_string()));
        }
        if tau_size < 1 {
            return Err(ConfigError::NonPositive("min-size"));
        }
        Ok(MiningParams { gamma, tau_size })
    }

    pub fn gamma(&self) -> Gamma {
        self.gamma
    }

    pub fn tau_size(&self) -> usize {
        self.tau_size
    }

    /// Minimum degree of any vertex in a result: `ceil(gamma * (tau_size - 1))`.
    pub fn k(&self) -> usize {
        self.gamma.ceil_mul(self.tau_size - 1)
    }
}

const NONE: u8 = 0;
const IN_S: u8 = 1;
const IN_EXT: u8 = 2;

/// Per-worker mark arrays sized to the graph being mined.
#[derive(Debug, Default)]
pub struct Scratch {
    role: Vec<u8>,
    pos: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch { role: vec![NONE; n], pos: vec![0; n], stamp: vec![0; n], epoch: 0 }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    fn mark(&mut self, s: &[VertexId], ext: &[VertexId]) {
        for (i, &v) in s.iter().enumerate() {
            self.role[v as usize] = IN_S;
            self.pos[v as usize] = i as u32;
        }
        for (j, &u) in ext.iter().enumerate() {
            self.role[u as usize] = IN_EXT;
            self.pos[u as usize] = j as u32;
        }
    }

    fn unmark(&mut self, s: &[VertexId], ext: &[VertexId]) {
        for &v in s.iter().chain(ext) {
            self.role[v as usize] = NONE;
        }
    }
}

/// Graph plus everything a worker needs to evaluate rules and emit results.
pub struct Context<'a> {
    pub graph: &'a Graph,
    /// Output id of each local vertex.
    pub ids: &'a [VertexId],
    pub params: MiningParams,
    scratch: Scratch,
}

impl<'a> Context<'a> {
    pub fn new(graph: &'a Graph, ids: &'a [VertexId], params: MiningParams) -> Self {
        assert_eq!(graph.vertex_count(), ids.len());
        Context { graph, ids, params, scratch: Scratch::new(graph.vertex_count()) }
    }

    /// Degree condition of a gamma-quasi-clique on `G(set)`; connectivity
    /// follows from it when gamma >= 1/2.
    pub fn is_quasi_clique(&mut self, set: &[VertexId]) -> bool {
        if set.is_empty() {
            return false;
        }
        let need = self.params.gamma.ceil_mul(set.len() - 1);
        for &v in set {
            self.scratch.role[v as usize] = IN_S;
        }
        let ok = set.iter().all(|&v| {
            self.graph.neighbors(v).iter().filter(|&&u| self.scratch.role[u as usize] == IN_S).count() >= need
        });
        for &v in set {
            self.scratch.role[v as usize] = NONE;
        }
        ok
    }

    pub fn is_quasi_clique_union(&mut self, a: &[VertexId], b: &[VertexId]) -> bool {
        let mut all = Vec::with_capacity(a.len() + b.len());
        all.extend_from_slice(a);
        all.extend_from_slice(b);
        self.is_quasi_clique(&all)
    }

    pub fn emit(&self, sink: &mut dyn ResultSink, set: &[VertexId], site: EmitSite) {
        let mut out: Vec<VertexId> = set.iter().map(|&v| self.ids[v as usize]).collect();
        out.sort_unstable();
        sink.emit(&out, site);
    }

    /// Emits `set` when it meets the size threshold and is valid.
    pub fn check_candidate(&mut self, set: &[VertexId], sink: &mut dyn ResultSink, site: EmitSite) -> bool {
        if set.len() >= self.params.tau_size && self.is_quasi_clique(set) {
            self.emit(sink, set, site);
            true
        } else {
            false
        }
    }

    /// `ext ∩ 𝔹(v)`, preserving the order of `ext`.
    pub fn within_two_hops(&mut self, v: VertexId, ext: &[VertexId]) -> Vec<VertexId> {
        let epoch = self.scratch.next_epoch();
        for &u in self.graph.neighbors(v) {
            self.scratch.stamp[u as usize] = epoch;
        }
        let stamp = &self.scratch.stamp;
        ext.iter()
            .copied()
            .filter(|&w| {
                w != v
                    && (stamp[w as usize] == epoch
                        || self.graph.neighbors(w).iter().any(|&x| stamp[x as usize] == epoch))
            })
            .collect()
    }
}

/// A search node `⟨S, ext(S)⟩` with its degree arrays and bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateState {
    pub s: Vec<VertexId>,
    pub ext: Vec<VertexId>,
    pub deg_ss: Vec<usize>,
    pub deg_es: Vec<usize>,
    pub deg_se: Vec<usize>,
    pub deg_ee: Vec<usize>,
    pub ee_valid: bool,
    pub upper: Option<usize>,
    pub lower: Option<usize>,
}

impl CandidateState {
    pub fn new(s: Vec<VertexId>, ext: Vec<VertexId>) -> Self {
        CandidateState { s, ext, ..Default::default() }
    }

    fn sorted_se_prefix(&self) -> Vec<usize> {
        let mut se = self.deg_se.clone();
        se.sort_unstable_by(|a, b| b.cmp(a));
        let mut prefix = Vec::with_capacity(se.len() + 1);
        prefix.push(0);
        let mut acc = 0;
        for d in se {
            acc += d;
            prefix.push(acc);
        }
        prefix
    }
}

/// Fills `deg_ss`, `deg_es`, `deg_se` in one pass over the cross edges, and
/// `deg_ee` too when `include_ee` is set.
pub fn compute_degrees(ctx: &mut Context<'_>, st: &mut CandidateState, include_ee: bool) {
    let g = ctx.graph;
    let sc = &mut ctx.scratch;
    sc.mark(&st.s, &st.ext);
    st.deg_ss.clear();
    st.deg_ss.extend(
        st.s.iter().map(|&v| g.neighbors(v).iter().filter(|&&w| sc.role[w as usize] == IN_S).count()),
    );
    st.deg_es.clear();
    st.deg_es.resize(st.s.len(), 0);
    st.deg_se.clear();
    st.deg_se.resize(st.ext.len(), 0);
    st.deg_ee.clear();
    st.deg_ee.resize(st.ext.len(), 0);
    for (j, &u) in st.ext.iter().enumerate() {
        for &w in g.neighbors(u) {
            match sc.role[w as usize] {
                IN_S => {
                    st.deg_se[j] += 1;
                    st.deg_es[sc.pos[w as usize] as usize] += 1;
                }
                IN_EXT if include_ee => st.deg_ee[j] += 1,
                _ => {}
            }
        }
    }
    st.ee_valid = include_ee;
    sc.unmark(&st.s, &st.ext);
}

/// Fills `deg_ee` from scratch.
pub fn compute_ee(ctx: &mut Context<'_>, st: &mut CandidateState) {
    let g = ctx.graph;
    let sc = &mut ctx.scratch;
    sc.mark(&[], &st.ext);
    st.deg_ee.clear();
    st.deg_ee.extend(
        st.ext.iter().map(|&u| g.neighbors(u).iter().filter(|&&w| sc.role[w as usize] == IN_EXT).count()),
    );
    st.ee_valid = true;
    sc.unmark(&[], &st.ext);
}

/// Largest `t ∈ [1, U_min]` for which `S` plus the `t` candidates with the
/// most links into `S` can still meet the summed degree requirement of `S`.
/// `None` means no extension of `S` can be valid (S itself may still be).
pub fn upper_bound(st: &CandidateState, params: &MiningParams) -> Option<usize> {
    let prefix = st.sorted_se_prefix();
    upper_bound_with(st, params, &prefix)
}

fn upper_bound_with(st: &CandidateState, params: &MiningParams, prefix: &[usize]) -> Option<usize> {
    let gamma = params.gamma;
    let s = st.s.len();
    let d_min = st.deg_ss.iter().zip(&st.deg_es).map(|(a, b)| a + b).min()?;
    let u_min = (gamma.floor_div(d_min)? + 1).checked_sub(s)?;
    let sum_s: usize = st.deg_ss.iter().sum();
    let hi = u_min.min(st.ext.len());
    (1..=hi).rev().find(|&t| sum_s + prefix[t] >= s * gamma.ceil_mul(s + t - 1))
}

/// Smallest number of candidates that must join `S`. `None` means neither
/// `S` nor any extension of it can be valid.
pub fn lower_bound(st: &CandidateState, params: &MiningParams) -> Option<usize> {
    let prefix = st.sorted_se_prefix();
    lower_bound_with(st, params, &prefix)
}

fn lower_bound_with(st: &CandidateState, params: &MiningParams, prefix: &[usize]) -> Option<usize> {
    let gamma = params.gamma;
    let s = st.s.len();
    let n = st.ext.len();
    let ds_min = *st.deg_ss.iter().min()?;
    let l_min = (0..=n).find(|&t| ds_min + t >= gamma.ceil_mul(s + t - 1))?;
    let sum_s: usize = st.deg_ss.iter().sum();
    (l_min..=n).find(|&t| sum_s + prefix[t] >= s * gamma.ceil_mul(s + t - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsVerdict {
    /// Both bounds set on the state.
    Bounded,
    /// No extension of `S` can be valid; `S` itself remains a candidate.
    ExtensionsPruned,
    /// Neither `S` nor any extension can be valid.
    AllPruned,
}

/// Computes the upper and lower bounds into the state, reporting any pruning
/// the bound computation itself implies (including upper < lower).
pub fn compute_bounds(st: &mut CandidateState, params: &MiningParams) -> BoundsVerdict {
    st.upper = None;
    st.lower = None;
    let prefix = st.sorted_se_prefix();
    let Some(lower) = lower_bound_with(st, params, &prefix) else {
        return BoundsVerdict::AllPruned;
    };
    let Some(upper) = upper_bound_with(st, params, &prefix) else {
        return BoundsVerdict::ExtensionsPruned;
    };
    st.upper = Some(upper);
    st.lower = Some(lower);
    if upper < lower {
        return BoundsVerdict::AllPruned;
    }
    BoundsVerdict::Bounded
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Type2Verdict {
    NotPruned,
    /// Only the "low inner degree, no candidates left" rule fired: extensions
    /// are pruned, `S` itself is still a candidate.
    ExtensionsPruned,
    AllPruned,
}

/// Scans `S` for members that rule out the whole subtree.
pub fn type2_check(st: &CandidateState, params: &MiningParams) -> Type2Verdict {
    let (Some(upper), Some(lower)) = (st.upper, st.lower) else {
        panic!("type2_check needs both bounds");
    };
    let gamma = params.gamma;
    let s = st.s.len();
    let need_s = gamma.ceil_mul(s);
    let need_upper = gamma.ceil_mul(s + upper - 1);
    let need_lower = gamma.ceil_mul(s + lower - 1);
    let mut verdict = Type2Verdict::NotPruned;
    for (&ds, &de) in st.deg_ss.iter().zip(&st.deg_es) {
        if ds + de < gamma.ceil_mul(s - 1 + de) || ds + upper < need_upper || ds + de < need_lower {
            return Type2Verdict::AllPruned;
        }
        if ds < need_s && de == 0 {
            verdict = Type2Verdict::ExtensionsPruned;
        }
    }
    verdict
}

/// Removes every candidate that cannot belong to a valid extension,
/// decrementing the ext-degrees of its neighbors as it goes. Returns the
/// removed vertices in scan order.
pub fn type1_prune_pass(ctx: &mut Context<'_>, st: &mut CandidateState) -> Vec<VertexId> {
    assert!(st.ee_valid, "deg_ee must be computed before the type-I scan");
    let (Some(upper), Some(lower)) = (st.upper, st.lower) else {
        panic!("type1_prune_pass needs both bounds");
    };
    let gamma = ctx.params.gamma;
    let s = st.s.len();
    let need_upper = gamma.ceil_mul(s + upper - 1);
    let need_lower = gamma.ceil_mul(s + lower - 1);
    let g = ctx.graph;
    let sc = &mut ctx.scratch;
    sc.mark(&st.s, &st.ext);
    let mut removed = Vec::new();
    let mut keep = vec![true; st.ext.len()];
    for (j, kept) in keep.iter_mut().enumerate() {
        let (ds, de) = (st.deg_se[j], st.deg_ee[j]);
        let prune = ds + de < gamma.ceil_mul(s + de) || ds + upper - 1 < need_upper || ds + de < need_lower;
        if !prune {
            continue;
        }
        let u = st.ext[j];
        *kept = false;
        removed.push(u);
        sc.role[u as usize] = NONE;
        for &w in g.neighbors(u) {
            match sc.role[w as usize] {
                IN_S => st.deg_es[sc.pos[w as usize] as usize] -= 1,
                IN_EXT => st.deg_ee[sc.pos[w as usize] as usize] -= 1,
                _ => {}
            }
        }
    }
    sc.unmark(&st.s, &st.ext);
    if !removed.is_empty() {
        let mut idx = 0;
        st.ext.retain(|_| {
            idx += 1;
            keep[idx - 1]
        });
        let mut idx = 0;
        st.deg_se.retain(|_| {
            idx += 1;
            keep[idx - 1]
        });
        let mut idx = 0;
        st.deg_ee.retain(|_| {
            idx += 1;
            keep[idx - 1]
        });
    }
    removed
}

/// Members of `S` whose total degree exactly meets the requirement implied
/// by the lower bound; ascending position in `S`.
pub fn critical_vertices(st: &CandidateState, params: &MiningParams) -> Vec<VertexId> {
    let lower = st.lower.expect("critical vertices need the lower bound");
    let need = params.gamma.ceil_mul(st.s.len() + lower - 1);
    st.s.iter()
        .zip(st.deg_ss.iter().zip(&st.deg_es))
        .filter(|(_, (&ds, &de))| ds + de == need)
        .map(|(&v, _)| v)
        .collect()
}

/// ext-neighbors of all critical vertices, in ext order.
fn critical_neighbors(ctx: &mut Context<'_>, st: &CandidateState) -> Vec<VertexId> {
    let critical = critical_vertices(st, &ctx.params);
    if critical.is_empty() {
        return Vec::new();
    }
    let epoch = ctx.scratch.next_epoch();
    for &v in &critical {
        for &u in ctx.graph.neighbors(v) {
            ctx.scratch.stamp[u as usize] = epoch;
        }
    }
    let stamp = &ctx.scratch.stamp;
    st.ext.iter().copied().filter(|&u| stamp[u as usize] == epoch).collect()
}

fn absorb(st: &mut CandidateState, moved: &[VertexId]) {
    if moved.is_empty() {
        return;
    }
    st.s.extend_from_slice(moved);
    st.ext.retain(|u| !moved.contains(u));
    st.ee_valid = false;
    st.upper = None;
    st.lower = None;
}

/// Moves the ext-neighbors of every critical vertex into `S`. Returns the
/// moved vertices (ext order); degree arrays and bounds are left stale for
/// the caller to recompute.
pub fn critical_vertex_pass(ctx: &mut Context<'_>, st: &mut CandidateState) -> Vec<VertexId> {
    let moved = critical_neighbors(ctx, st);
    absorb(st, &moved);
    moved
}

/// The candidate `u` whose cover set `C_S(u)` is largest, together with that
/// set (ext order). Only candidates with `d_S(u) >= ceil(gamma |S|)` whose
/// non-neighbors in `S` also meet that bound qualify. Ties go to the smaller
/// id. Needs `deg_ss`, `deg_se` and `deg_ee`.
pub fn cover_vertex(ctx: &mut Context<'_>, st: &CandidateState) -> Option<(VertexId, Vec<VertexId>)> {
    assert!(st.ee_valid, "cover_vertex needs deg_ee");
    let need = ctx.params.gamma.ceil_mul(st.s.len());
    let g = ctx.graph;
    let mut order: Vec<usize> = (0..st.ext.len()).collect();
    order.sort_unstable_by_key(|&j| st.ext[j]);

    let mut best: Option<(VertexId, Vec<VertexId>)> = None;
    let mut best_len = 0usize;
    let mut non_nbrs: Vec<VertexId> = Vec::new();
    for j in order {
        if st.deg_se[j] < need || st.deg_ee[j] < best_len {
            continue;
        }
        let u = st.ext[j];
        let epoch = ctx.scratch.next_epoch();
        for &w in g.neighbors(u) {
            ctx.scratch.stamp[w as usize] = epoch;
        }
        non_nbrs.clear();
        let mut applicable = true;
        for (i, &v) in st.s.iter().enumerate() {
            if ctx.scratch.stamp[v as usize] != epoch {
                if st.deg_ss[i] < need {
                    applicable = false;
                    break;
                }
                non_nbrs.push(v);
            }
        }
        if !applicable {
            continue;
        }
        let cover: Vec<VertexId> = st
            .ext
            .iter()
            .copied()
            .filter(|&w| ctx.scratch.stamp[w as usize] == epoch && non_nbrs.iter().all(|&v| g.has_edge(v, w)))
            .collect();
        if cover.len() > best_len {
            best_len = cover.len();
            best = Some((u, cover));
        }
    }
    best
}

/// Shrinks `ext(S)` to a fixpoint of all rules. Returns `true` when no
/// extension of `S` needs exploring; then `S` has already been emitted if it
/// qualifies. Returns `false` only with `ext(S)` nonempty.
pub fn iterative_bounding(ctx: &mut Context<'_>, st: &mut CandidateState, sink: &mut dyn ResultSink) -> bool {
    debug_assert!(!st.ext.is_empty());
    let params = ctx.params;
    'outer: loop {
        compute_degrees(ctx, st, false);
        match compute_bounds(st, &params) {
            BoundsVerdict::AllPruned => return true,
            BoundsVerdict::ExtensionsPruned => {
                ctx.check_candidate(&st.s, sink, EmitSite::ExtensionsPruned);
                return true;
            }
            BoundsVerdict::Bounded => {}
        }

        loop {
            let moved = critical_neighbors(ctx, st);
            if moved.is_empty() {
                break;
            }
            ctx.check_candidate(&st.s, sink, EmitSite::BeforeCriticalMove);
            absorb(st, &moved);
            if st.ext.is_empty() {
                break 'outer;
            }
            compute_degrees(ctx, st, false);
            match compute_bounds(st, &params) {
                BoundsVerdict::AllPruned => return true,
                BoundsVerdict::ExtensionsPruned => {
                    ctx.check_candidate(&st.s, sink, EmitSite::ExtensionsPruned);
                    return true;
                }
                BoundsVerdict::Bounded => {}
            }
        }

        match type2_check(st, &params) {
            Type2Verdict::AllPruned => return true,
            Type2Verdict::ExtensionsPruned => {
                ctx.check_candidate(&st.s, sink, EmitSite::ExtensionsPruned);
                return true;
            }
            Type2Verdict::NotPruned => {}
        }

        compute_ee(ctx, st);
        let removed = type1_prune_pass(ctx, st);
        if st.ext.is_empty() || removed.is_empty() {
            break;
        }
    }
    if st.ext.is_empty() {
        ctx.check_candidate(&st.s, sink, EmitSite::BoundingExhausted);
        return true;
    }
    false
}

/// Degree-only validity check without a [`Context`]; `set` need not be
/// sorted.
pub fn is_quasi_clique(g: &Graph, set: &[VertexId], gamma: Gamma) -> bool {
    if set.is_empty() {
        return false;
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let need = gamma.ceil_mul(sorted.len() - 1);
    sorted.iter().all(|&v| g.neighbors(v).iter().filter(|u| sorted.binary_search(u).is_ok()).count() >= need)
}
