use proptest::prelude::*;
use qcminer::graph::{k_core, load_graph, recode_ids, Graph, GraphFormat, VertexId};
use qcminer::postprocess::maximality_filter;
use qcminer::synth::gnp;

/// Repeatedly drops one vertex of degree below `k` until none is left.
pub fn naive_core(g: &Graph, k: usize) -> Vec<VertexId> {
    let mut alive: Vec<VertexId> = g.vertices().collect();
    loop {
        let deg = |v: VertexId| g.neighbors(v).iter().filter(|u| alive.contains(u)).count();
        match alive.iter().position(|&v| deg(v) < k) {
            Some(i) => {
                alive.remove(i);
            }
            None => return alive,
        }
    }
}

pub fn naive_maximal(raw: &[Vec<VertexId>]) -> Vec<Vec<VertexId>> {
    let mut sets: Vec<Vec<VertexId>> = raw
        .iter()
        .map(|s| {
            let mut t = s.clone();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect();
    sets.sort();
    sets.dedup();
    let subset = |a: &[VertexId], b: &[VertexId]| a.iter().all(|x| b.contains(x));
    let mut out: Vec<Vec<VertexId>> =
        sets.iter().filter(|a| !sets.iter().any(|b| b.len() > a.len() && subset(a, b))).cloned().collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

fn arb_sets() -> impl Strategy<Value = Vec<Vec<VertexId>>> {
    prop::collection::vec(prop::collection::vec(0u32..24, 1..8), 0..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn k_core_matches_fixpoint(n in 1usize..=200, p in 0.0f64..0.1, seed in any::<u64>(), k in 0usize..6) {
        let g = gnp(n, p, seed);
        prop_assert_eq!(k_core(&g, k).ids, naive_core(&g, k));
    }

    #[test]
    fn trie_filter_matches_pairwise(raw in arb_sets()) {
        let fast = maximality_filter(&raw);
        prop_assert_eq!(&fast, &naive_maximal(&raw));
        prop_assert_eq!(maximality_filter(&fast), fast);
    }

    #[test]
    fn recoding_preserves_edges(n in 1usize..60, p in 0.0f64..0.5, seed in any::<u64>()) {
        let g = gnp(n, p, seed);
        let (r, rec) = recode_ids(&g);
        let mut mapped: Vec<(VertexId, VertexId)> = r
            .edges()
            .map(|(u, v)| {
                let (a, b) = (rec.to_old(u), rec.to_old(v));
                (a.min(b), a.max(b))
            })
            .collect();
        mapped.sort_unstable();
        prop_assert_eq!(mapped, g.edges().collect::<Vec<_>>());
        if n > 0 && g.edge_count() > 0 {
            let vmax = rec.to_old(0);
            prop_assert_eq!(Some(vmax), g.max_degree_vertex());
            let tail_start = (n - g.degree(vmax)) as VertexId;
            for &u in r.neighbors(0) {
                prop_assert!(u >= tail_start);
            }
        }
    }

    #[test]
    fn edge_list_round_trip(n in 1usize..40, p in 0.0f64..0.6, seed in any::<u64>()) {
        let g = gnp(n, p, seed);
        let text: String = g.edges().map(|(u, v)| format!("{u} {v}\n")).collect();
        let loaded = load_graph(text.as_bytes(), GraphFormat::EdgeList).unwrap();
        let back: Vec<(u64, u64)> = loaded
            .graph
            .edges()
            .map(|(u, v)| (loaded.original_ids[u as usize], loaded.original_ids[v as usize]))
            .collect();
        let want: Vec<(u64, u64)> = g.edges().map(|(u, v)| (u as u64, v as u64)).collect();
        prop_assert_eq!(back, want);
    }
}
