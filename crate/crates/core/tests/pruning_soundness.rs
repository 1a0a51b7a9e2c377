use proptest::prelude::*;
use qcminer::graph::{Graph, VertexId};
use qcminer::oracle::state_extensions;
use qcminer::pruning::{
    compute_bounds, compute_degrees, compute_ee, critical_vertices, iterative_bounding, type1_prune_pass,
    type2_check, BoundsVerdict, CandidateState, Context, Type2Verdict,
};
use qcminer::sink::SiteRecorder;
use qcminer::synth::gnp;
use qcminer::{Gamma, MiningParams};

const GAMMAS: [&str; 5] = ["1/2", "3/5", "2/3", "3/4", "9/10"];

#[derive(Debug, Clone)]
struct Case {
    g: Graph,
    s: Vec<VertexId>,
    ext: Vec<VertexId>,
    gamma: Gamma,
    tau: usize,
}

fn case() -> impl Strategy<Value = Case> {
    (5usize..=12, 0.3f64..=0.9, any::<u64>(), 0usize..5, 1usize..=4)
        .prop_flat_map(|(n, p, seed, gi, tau)| {
            let g = gnp(n, p, seed);
            let gamma: Gamma = GAMMAS[gi].parse().unwrap();
            (Just(g), Just(gamma), Just(tau), prop::collection::vec(0u8..10, n))
        })
        .prop_filter_map("S must be nonempty", |(g, gamma, tau, roles)| {
            // 0-1: in S, 2-8: in ext, 9: outside
            let mut s = Vec::new();
            let mut ext = Vec::new();
            for (v, r) in roles.iter().enumerate() {
                match r {
                    0 if s.len() < 3 => s.push(v as VertexId),
                    0..=8 => ext.push(v as VertexId),
                    _ => {}
                }
            }
            (!s.is_empty()).then_some(Case { g, s, ext, gamma, tau })
        })
}

fn valid_extensions(c: &Case) -> Vec<Vec<VertexId>> {
    state_extensions(&c.g, &c.s, &c.ext, c.gamma).unwrap()
}

fn ctx_for<'a>(c: &'a Case, ids: &'a [VertexId]) -> Context<'a> {
    Context::new(&c.g, ids, MiningParams::new(c.gamma, c.tau).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn rules_agree_with_state_oracle(c in case()) {
        let ids: Vec<VertexId> = c.g.vertices().collect();
        let mut ctx = ctx_for(&c, &ids);
        let params = ctx.params;
        let exts = valid_extensions(&c);
        let nonempty: Vec<&Vec<VertexId>> = exts.iter().filter(|v| !v.is_empty()).collect();

        let mut st = CandidateState::new(c.s.clone(), c.ext.clone());
        compute_degrees(&mut ctx, &mut st, true);
        match compute_bounds(&mut st, &params) {
            BoundsVerdict::AllPruned => prop_assert!(exts.is_empty(), "AllPruned but {:?}", exts),
            BoundsVerdict::ExtensionsPruned => prop_assert!(nonempty.is_empty()),
            BoundsVerdict::Bounded => {
                let (u, l) = (st.upper.unwrap(), st.lower.unwrap());
                for v in &exts {
                    prop_assert!(l <= v.len(), "L={} but valid extension {:?}", l, v);
                    if !v.is_empty() {
                        prop_assert!(v.len() <= u, "U={} but valid extension {:?}", u, v);
                    }
                }
                for v in critical_vertices(&st, &params) {
                    let forced: Vec<VertexId> =
                        c.ext.iter().copied().filter(|&w| c.g.has_edge(v, w)).collect();
                    for e in &nonempty {
                        prop_assert!(forced.iter().all(|w| e.contains(w)));
                    }
                }
                match type2_check(&st, &params) {
                    Type2Verdict::AllPruned => prop_assert!(exts.is_empty()),
                    Type2Verdict::ExtensionsPruned => prop_assert!(nonempty.is_empty()),
                    Type2Verdict::NotPruned => {
                        compute_ee(&mut ctx, &mut st);
                        let removed = type1_prune_pass(&mut ctx, &mut st);
                        for e in &exts {
                            prop_assert!(removed.iter().all(|r| !e.contains(r)),
                                "removed {:?} but valid extension {:?}", removed, e);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bounding_loses_nothing(c in case()) {
        prop_assume!(!c.ext.is_empty());
        let ids: Vec<VertexId> = c.g.vertices().collect();
        let mut ctx = ctx_for(&c, &ids);
        let mut rec = SiteRecorder::default();
        let mut st = CandidateState::new(c.s.clone(), c.ext.clone());
        let done = iterative_bounding(&mut ctx, &mut st, &mut rec);
        prop_assert!(done || !st.ext.is_empty());
        let emitted = rec.sets();
        for v in valid_extensions(&c) {
            let mut q = c.s.clone();
            q.extend(&v);
            q.sort_unstable();
            if q.len() < c.tau || emitted.contains(&q) {
                continue;
            }
            prop_assert!(!done, "{:?} lost by a finished bounding", q);
            let inside = st.s.iter().all(|x| q.contains(x))
                && q.iter().all(|x| st.s.contains(x) || st.ext.contains(x));
            prop_assert!(inside, "{:?} outside the bounded state {:?}", q, st);
        }
        for q in &emitted {
            prop_assert!(q.len() >= c.tau);
            prop_assert!(qcminer::pruning::is_quasi_clique(&c.g, q, c.gamma));
        }
    }
}
