use std::time::Duration;

use proptest::prelude::*;
use qcminer::graph::{induced_subgraph, k_core, Graph, VertexId};
use qcminer::miner::{mine_serial, recursive_mine, time_delayed, Clock, SubtaskEmitter};
use qcminer::oracle::maximal_quasicliques;
use qcminer::postprocess::maximality_filter;
use qcminer::pruning::{
    compute_bounds, compute_degrees, critical_vertices, BoundsVerdict, CandidateState, Context,
};
use qcminer::sink::{EmitSite, SiteRecorder};
use qcminer::synth::gnp;
use qcminer::{Gamma, MiningParams};

/// Advances one millisecond per reading.
struct Ticks(u64);

impl Clock for Ticks {
    fn elapsed(&mut self) -> Duration {
        self.0 += 1;
        Duration::from_millis(self.0)
    }
}

/// Subgraph, its parent ids, then local `S` and `ext`.
type Handoff = (Graph, Vec<VertexId>, Vec<VertexId>, Vec<VertexId>);

#[derive(Default)]
struct Collected {
    tasks: Vec<Handoff>,
}

impl SubtaskEmitter for Collected {
    fn emit_subtask(&mut self, graph: &Graph, ids: &[VertexId], s: &[VertexId], ext: &[VertexId]) {
        let mut members = s.to_vec();
        members.extend_from_slice(ext);
        let sub = induced_subgraph(graph, &members);
        let local = |xs: &[VertexId]| xs.iter().map(|x| sub.local(*x).unwrap()).collect();
        let out_ids = sub.ids.iter().map(|&x| ids[x as usize]).collect();
        let (ls, le) = (local(s), local(ext));
        self.tasks.push((sub.graph, out_ids, ls, le));
    }
}

fn complete(n: usize) -> Graph {
    let edges: Vec<(VertexId, VertexId)> =
        (0..n as VertexId).flat_map(|u| (u + 1..n as VertexId).map(move |v| (u, v))).collect();
    Graph::from_edges(n, edges).0
}

#[test]
fn timeout_hands_off_remaining_siblings() {
    let params = MiningParams::new("2/3".parse().unwrap(), 3).unwrap();
    let mut layered = 0;
    for seed in 0..40 {
        let g = gnp(14, 0.6, seed);
        let ids: Vec<VertexId> = g.vertices().collect();
        let ext: Vec<VertexId> = (1..14).collect();
        let mut ctx = Context::new(&g, &ids, params);
        let mut parent = Vec::<Vec<VertexId>>::new();
        let mut tasks = Collected::default();
        time_delayed(
            &mut ctx,
            vec![0],
            ext.clone(),
            &mut Ticks(0),
            Duration::from_millis(3),
            &mut tasks,
            &mut parent,
        );
        // once the budget is gone every later child is handed off, at
        // whatever depth the search is unwinding through
        let mut sizes: Vec<usize> = tasks.tasks.iter().map(|t| t.2.len()).collect();
        sizes.dedup();
        if sizes.len() > 1 {
            layered += 1;
        }

        let mut all = parent.clone();
        for (sub, out_ids, s, ext) in &tasks.tasks {
            let mut c = Context::new(sub, out_ids, params);
            recursive_mine(&mut c, s.clone(), ext.clone(), &mut all);
        }
        let mut serial = Vec::<Vec<VertexId>>::new();
        recursive_mine(&mut ctx, vec![0], ext, &mut serial);
        assert_eq!(maximality_filter(&all), maximality_filter(&serial), "seed {seed}");
    }
    assert!(layered > 0, "no run handed off subtasks at more than one depth");
}

#[test]
fn unbounded_budget_is_plain_recursion() {
    let g = gnp(12, 0.6, 4);
    let params = MiningParams::new("3/5".parse().unwrap(), 3).unwrap();
    let ids: Vec<VertexId> = g.vertices().collect();
    let mut ctx = Context::new(&g, &ids, params);
    let ext: Vec<VertexId> = (1..12).collect();
    let mut a = SiteRecorder::default();
    let mut b = SiteRecorder::default();
    recursive_mine(&mut ctx, vec![0], ext.clone(), &mut a);
    let mut tasks = Collected::default();
    time_delayed(&mut ctx, vec![0], ext, &mut Ticks(0), Duration::MAX, &mut tasks, &mut b);
    assert_eq!(a.emitted, b.emitted);
    assert!(tasks.tasks.is_empty());
}

/// A five-vertex path 4-1-0-2-3: the set {0,1,2} is found only when the
/// two-hop restriction leaves its extension set empty.
fn empty_after_diameter_instance() -> Graph {
    Graph::from_edges(5, [(0, 1), (0, 2), (1, 4), (2, 3)]).0
}

#[test]
fn empty_extension_after_two_hop_cut_is_checked() {
    let g = empty_after_diameter_instance();
    let gamma: Gamma = "1/2".parse().unwrap();
    let params = MiningParams::new(gamma, 2).unwrap();
    let core = k_core(&g, params.k());
    let mut rec = SiteRecorder::default();
    mine_serial(&core.graph, params, false, &mut rec);
    let maximal = maximal_quasicliques(&g, gamma, 2).unwrap();
    assert!(maximal.contains(&vec![0, 1, 2]));
    assert_eq!(rec.sites_of(&[0, 1, 2]), vec![EmitSite::EmptyAfterDiameter]);
    let mut got = maximality_filter(&rec.sets());
    got.sort();
    let mut want = maximal;
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn critical_move_on_invalid_set() {
    // S = {0,1,2} is invalid at 3/5, so the pre-move check emits nothing and
    // the move completes the quasi-clique
    let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 3), (1, 3), (2, 3)]).0;
    let params = MiningParams::new("3/5".parse().unwrap(), 4).unwrap();
    let ids: Vec<VertexId> = g.vertices().collect();
    let mut ctx = Context::new(&g, &ids, params);
    let mut st = CandidateState::new(vec![0, 1, 2], vec![3]);
    let mut rec = SiteRecorder::default();
    assert!(qcminer::pruning::iterative_bounding(&mut ctx, &mut st, &mut rec));
    assert_eq!(rec.emitted, vec![(vec![0, 1, 2, 3], EmitSite::BoundingExhausted)]);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    /// A valid `S` always has lower bound 0, so any critical vertex of it has no
    /// candidate neighbors and no move follows.
    #[test]
    fn valid_set_has_no_movable_critical_vertex(
        n in 4usize..=12, p in 0.3f64..=0.9, seed in any::<u64>(), gi in 0usize..5, cut in 1usize..6,
    ) {
        let gammas = ["1/2", "3/5", "2/3", "3/4", "9/10"];
        let g = gnp(n, p, seed);
        let gamma: Gamma = gammas[gi].parse().unwrap();
        let s: Vec<VertexId> = (0..cut.min(n) as VertexId).collect();
        prop_assume!(qcminer::pruning::is_quasi_clique(&g, &s, gamma));
        let ext: Vec<VertexId> = (cut.min(n) as VertexId..n as VertexId).collect();
        let params = MiningParams::new(gamma, 1).unwrap();
        let ids: Vec<VertexId> = g.vertices().collect();
        let mut ctx = Context::new(&g, &ids, params);
        let mut st = CandidateState::new(s, ext);
        compute_degrees(&mut ctx, &mut st, false);
        if compute_bounds(&mut st, &params) == BoundsVerdict::Bounded {
            prop_assert_eq!(st.lower, Some(0));
            for v in critical_vertices(&st, &params) {
                let i = st.s.iter().position(|&x| x == v).unwrap();
                prop_assert_eq!(st.deg_es[i], 0);
            }
        }
    }
}

#[test]
fn k5_lookahead_from_root() {
    let g = complete(5);
    let params = MiningParams::new("0.8".parse().unwrap(), 3).unwrap();
    let mut rec = SiteRecorder::default();
    mine_serial(&g, params, false, &mut rec);
    assert_eq!(rec.sites_of(&[0, 1, 2, 3, 4]), vec![EmitSite::Lookahead]);
}
