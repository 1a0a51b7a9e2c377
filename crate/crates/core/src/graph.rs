//! Immutable undirected graphs in CSR form, plus the preprocessing steps the
//! miner relies on: k-core peeling, two-hop neighborhoods, induced subgraphs
//! and the max-degree-first id recoding.

use std::collections::VecDeque;
use std::io::BufRead;

use crate::error::GraphError;

pub type VertexId = u32;

/// Undirected simple graph with ascending adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
}

impl Default for Graph {
    fn default() -> Self {
        Graph::empty(0)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { offsets: vec![0; n + 1], neighbors: Vec::new() }
    }

    /// Builds a graph from an edge iterator. Self-loops are dropped and
    /// parallel edges merged; the returned counts report how many of each
    /// were seen.
    pub fn from_edges<I>(n: usize, edges: I) -> (Self, EdgeCleanup)
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut cleanup = EdgeCleanup::default();
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        for (u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) outside vertex range {n}");
            if u == v {
                cleanup.self_loops += 1;
                continue;
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        cleanup.duplicate_edges = (before - pairs.len()) / 2;

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = pairs.into_iter().map(|(_, v)| v).collect();
        (Graph { offsets, neighbors }, cleanup)
    }

    /// Builds a graph from per-vertex adjacency lists that are already
    /// symmetric, sorted and free of self-loops.
    pub fn from_sorted_adjacency(adj: &[Vec<VertexId>]) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for list in adj {
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        Graph { offsets, neighbors }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertex_count() as VertexId
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn max_degree_vertex(&self) -> Option<VertexId> {
        // ties go to the smaller id
        self.vertices().fold(None, |best, v| match best {
            Some(b) if self.degree(b) >= self.degree(v) => Some(b),
            _ => Some(v),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeCleanup {
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

/// A graph whose vertex `i` corresponds to vertex `ids[i]` of a parent
/// graph. `ids` is strictly ascending, so local order agrees with parent
/// order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subgraph {
    pub ids: Vec<VertexId>,
    pub graph: Graph,
}

impl Subgraph {
    pub fn identity(graph: Graph) -> Self {
        Subgraph { ids: graph.vertices().collect(), graph }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Local id of a parent vertex.
    pub fn local(&self, parent: VertexId) -> Option<VertexId> {
        self.ids.binary_search(&parent).ok().map(|i| i as VertexId)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    /// `u v` per line.
    EdgeList,
    /// `v d n1 ... nd` per line.
    Adjacency,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub lines: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Dense id -> id as written in the input.
    pub original_ids: Vec<u64>,
    pub stats: LoadStats,
}

fn parse_id(tok: &str, line: usize) -> Result<u64, GraphError> {
    tok.parse::<u64>().map_err(|_| GraphError::Parse { line, msg: format!("invalid vertex id {tok:?}") })
}

/// Reads a graph in either text format. Lines starting with `#` and blank
/// lines are skipped.
///
/// Edge-list ids may be sparse: they are densified by ascending original id,
/// which is the identity when the input already uses `0..n`. Adjacency input
/// must use dense ids.
pub fn load_graph<R: BufRead>(reader: R, format: GraphFormat) -> Result<LoadedGraph, GraphError> {
    let mut stats = LoadStats::default();
    match format {
        GraphFormat::EdgeList => {
            let mut raw: Vec<(u64, u64)> = Vec::new();
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                let lineno = idx + 1;
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                stats.lines += 1;
                let toks: Vec<&str> = t.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(GraphError::Parse {
                        line: lineno,
                        msg: format!("expected 2 ids, found {}", toks.len()),
                    });
                }
                raw.push((parse_id(toks[0], lineno)?, parse_id(toks[1], lineno)?));
            }
            let mut original_ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
            original_ids.sort_unstable();
            original_ids.dedup();
            let dense = |x: u64| original_ids.binary_search(&x).unwrap() as VertexId;
            let edges: Vec<_> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
            let (graph, cleanup) = Graph::from_edges(original_ids.len(), edges);
            stats.self_loops = cleanup.self_loops;
            stats.duplicate_edges = cleanup.duplicate_edges;
            Ok(LoadedGraph { graph, original_ids, stats })
        }
        GraphFormat::Adjacency => {
            let mut rows: Vec<(usize, u64, Vec<u64>)> = Vec::new();
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                let lineno = idx + 1;
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                stats.lines += 1;
                let mut toks = t.split_whitespace();
                let v = parse_id(toks.next().unwrap(), lineno)?;
                let d = toks
                    .next()
                    .ok_or_else(|| GraphError::Parse { line: lineno, msg: "missing degree".into() })?;
                let d = parse_id(d, lineno)? as usize;
                let nbrs = toks.map(|x| parse_id(x, lineno)).collect::<Result<Vec<_>, _>>()?;
                if nbrs.len() != d {
                    return Err(GraphError::Parse {
                        line: lineno,
                        msg: format!("degree {d} but {} neighbors listed", nbrs.len()),
                    });
                }
                rows.push((lineno, v, nbrs));
            }
            let n = rows.iter().map(|r| r.1 as usize + 1).max().unwrap_or(0);
            let mut edges = Vec::new();
            for (lineno, v, nbrs) in &rows {
                for &u in nbrs {
                    if u as usize >= n {
                        return Err(GraphError::OutOfRange { line: *lineno, id: u, count: n });
                    }
                    edges.push((*v as VertexId, u as VertexId));
                }
            }
            let (graph, cleanup) = Graph::from_edges(n, edges);
            stats.self_loops = cleanup.self_loops;
            // every edge appears from both endpoints in a well-formed file
            stats.duplicate_edges = cleanup.duplicate_edges.saturating_sub(graph.edge_count());
            Ok(LoadedGraph { graph, original_ids: (0..n as u64).collect(), stats })
        }
    }
}

/// Membership mask of the k-core: repeatedly deletes vertices of degree
/// below `k` until none remain. Runs in `O(|V| + |E|)`.
pub fn core_mask(g: &Graph, k: usize) -> Vec<bool> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: VecDeque<VertexId> = g.vertices().filter(|&v| deg[v as usize] < k).collect();
    for &v in &queue {
        alive[v as usize] = false;
    }
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            let ui = u as usize;
            if alive[ui] {
                deg[ui] -= 1;
                if deg[ui] < k {
                    alive[ui] = false;
                    queue.push_back(u);
                }
            }
        }
    }
    alive
}

/// The maximal subgraph with minimum degree `>= k`; possibly empty.
pub fn k_core(g: &Graph, k: usize) -> Subgraph {
    let mask = core_mask(g, k);
    let keep: Vec<VertexId> = g.vertices().filter(|&v| mask[v as usize]).collect();
    induced_subgraph(g, &keep)
}

/// Vertices within two hops of `v`, excluding `v`, restricted to ids
/// strictly above `id_floor` when given. Returned ascending.
pub fn two_hop_set(g: &Graph, v: VertexId, id_floor: Option<VertexId>) -> Vec<VertexId> {
    let above = |u: VertexId| id_floor.is_none_or(|f| u > f);
    let mut out: Vec<VertexId> = Vec::new();
    for &u in g.neighbors(v) {
        if above(u) {
            out.push(u);
        }
        for &w in g.neighbors(u) {
            if w != v && above(w) {
                out.push(w);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Subgraph induced by `vertices` (any order, duplicates ignored).
pub fn induced_subgraph(g: &Graph, vertices: &[VertexId]) -> Subgraph {
    let mut ids = vertices.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let adj: Vec<Vec<VertexId>> = ids
        .iter()
        .map(|&v| {
            g.neighbors(v).iter().filter_map(|u| ids.binary_search(u).ok().map(|l| l as VertexId)).collect()
        })
        .collect();
    Subgraph { ids, graph: Graph::from_sorted_adjacency(&adj) }
}

/// Bijective relabeling produced by [`recode_ids`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdRecoding {
    pub old_to_new: Vec<VertexId>,
    pub new_to_old: Vec<VertexId>,
}

impl IdRecoding {
    pub fn identity(n: usize) -> Self {
        let ids: Vec<VertexId> = (0..n as VertexId).collect();
        IdRecoding { old_to_new: ids.clone(), new_to_old: ids }
    }

    pub fn to_old(&self, v: VertexId) -> VertexId {
        self.new_to_old[v as usize]
    }

    pub fn to_new(&self, v: VertexId) -> VertexId {
        self.old_to_new[v as usize]
    }
}

/// Relabels so the max-degree vertex becomes 0, its neighbors take the
/// highest ids, and everything else sits in between. Both blocks are ordered
/// by ascending degree, ties by old id.
pub fn recode_ids(g: &Graph) -> (Graph, IdRecoding) {
    let n = g.vertex_count();
    let Some(vmax) = g.max_degree_vertex() else {
        return (g.clone(), IdRecoding::identity(0));
    };
    let mut in_nbr = vec![false; n];
    for &u in g.neighbors(vmax) {
        in_nbr[u as usize] = true;
    }
    let by_degree = |a: &VertexId, b: &VertexId| g.degree(*a).cmp(&g.degree(*b)).then(a.cmp(b));
    let mut middle: Vec<VertexId> = g.vertices().filter(|&v| v != vmax && !in_nbr[v as usize]).collect();
    middle.sort_by(by_degree);
    let mut tail: Vec<VertexId> = g.neighbors(vmax).to_vec();
    tail.sort_by(by_degree);

    let mut new_to_old = Vec::with_capacity(n);
    new_to_old.push(vmax);
    new_to_old.extend(middle);
    new_to_old.extend(tail);
    let mut old_to_new = vec![0; n];
    for (new, &old) in new_to_old.iter().enumerate() {
        old_to_new[old as usize] = new as VertexId;
    }
    let adj: Vec<Vec<VertexId>> = new_to_old
        .iter()
        .map(|&old| {
            let mut l: Vec<VertexId> = g.neighbors(old).iter().map(|&u| old_to_new[u as usize]).collect();
            l.sort_unstable();
            l
        })
        .collect();
    (Graph::from_sorted_adjacency(&adj), IdRecoding { old_to_new, new_to_old })
}
