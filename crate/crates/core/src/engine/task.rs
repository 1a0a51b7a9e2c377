//! Tasks and the first two lifecycle iterations, which build a root's
//! two-hop ego network and shrink it to its k-core.

use crate::graph::{induced_subgraph, k_core, Graph, Subgraph, VertexId};
use crate::pruning::MiningParams;

/// A unit of work. Ids in `s`, `ext` and `g.ids` refer to the engine's
/// input graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Task {
    pub seq: u64,
    pub root: VertexId,
    /// 1: pulling first-hop neighbors, 2: pulling the second hop,
    /// 3: mining.
    pub iteration: u8,
    pub s: Vec<VertexId>,
    /// Pending pulls in iterations 1 and 2, `ext(S)` in iteration 3.
    pub ext: Vec<VertexId>,
    pub g: Subgraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskClass {
    Big,
    Small,
}

/// Pulling tasks are big with at least `tau_split` pending pulls, mining
/// tasks with strictly more than `tau_split` candidates.
pub fn classify(t: &Task, tau_split: usize) -> TaskClass {
    let big = if t.iteration < 3 { t.ext.len() >= tau_split } else { t.ext.len() > tau_split };
    if big {
        TaskClass::Big
    } else {
        TaskClass::Small
    }
}

/// A new iteration-1 task for `v`, unless `v` has fewer than `k` neighbors.
pub fn task_spawn(v: VertexId, g: &Graph, params: &MiningParams, seq: u64) -> Option<Task> {
    if g.degree(v) < params.k() {
        return None;
    }
    Some(Task {
        seq,
        root: v,
        iteration: 1,
        s: vec![v],
        ext: g.neighbors(v).iter().copied().filter(|&u| u > v).collect(),
        g: Subgraph::default(),
    })
}

/// Keeps the root and its pulled neighbors of degree `>= k`, then peels
/// them to a k-core in which edges to second-hop vertices still count but
/// those vertices are never removed. Returns `false` if the root is
/// peeled. Otherwise the task moves to iteration 2 with the second-hop
/// frontier as its pending pulls.
pub fn iteration_1(t: &mut Task, g: &Graph, params: &MiningParams) -> bool {
    let k = params.k();
    let root = t.root;
    let mut first: Vec<VertexId> = t.ext.iter().copied().filter(|&u| g.degree(u) >= k).collect();
    first.insert(0, root);
    let pos = |u: VertexId| first.binary_search(&u).ok();
    let usable = |w: VertexId| w >= root && g.degree(w) >= k;
    let mut deg: Vec<usize> =
        first.iter().map(|&u| g.neighbors(u).iter().filter(|&&w| usable(w)).count()).collect();
    let mut alive = vec![true; first.len()];
    let mut stack: Vec<usize> = (0..first.len()).filter(|&i| deg[i] < k).collect();
    for &i in &stack {
        alive[i] = false;
    }
    while let Some(i) = stack.pop() {
        for &w in g.neighbors(first[i]) {
            if let Some(j) = pos(w) {
                if alive[j] && usable(w) {
                    deg[j] -= 1;
                    if deg[j] < k {
                        alive[j] = false;
                        stack.push(j);
                    }
                }
            }
        }
    }
    if !alive[0] {
        return false;
    }
    let survivors: Vec<VertexId> = first.iter().zip(&alive).filter(|(_, &a)| a).map(|(&u, _)| u).collect();
    let in_first_hop = |w: VertexId| w == root || g.has_edge(root, w);
    let mut frontier: Vec<VertexId> = survivors
        .iter()
        .flat_map(|&u| g.neighbors(u).iter().copied())
        .filter(|&w| w > root && !in_first_hop(w))
        .collect();
    frontier.sort_unstable();
    frontier.dedup();
    t.g = induced_subgraph(g, &survivors);
    t.ext = frontier;
    t.iteration = 2;
    true
}

/// Adds frontier vertices of degree `>= k`, re-peels the ego network and
/// turns the task into a mining task `⟨{root}, rest⟩`. Returns `false` if
/// the root is peeled.
pub fn iteration_2(t: &mut Task, g: &Graph, params: &MiningParams) -> bool {
    let k = params.k();
    let mut members = t.g.ids.clone();
    members.extend(t.ext.iter().copied().filter(|&w| g.degree(w) >= k));
    let ego = induced_subgraph(g, &members);
    let core = k_core(&ego.graph, k);
    if core.ids.first() != Some(&0) {
        return false;
    }
    let ids: Vec<VertexId> = core.ids.iter().map(|&l| ego.ids[l as usize]).collect();
    t.g = Subgraph { ids, graph: core.graph };
    t.s = vec![t.root];
    t.ext = t.g.ids[1..].to_vec();
    t.iteration = 3;
    true
}
