//! Seeded random graphs for tests and benchmarks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId};

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).0
}

/// Layout of a graph made of overlapping dense blocks over a sparse
/// background.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    pub vertices: usize,
    /// Expected background degree.
    pub background_degree: f64,
    pub blocks: usize,
    pub block_size: (usize, usize),
    pub block_density: f64,
    /// Size and edge density of the one block meant to dominate the work.
    pub heavy_size: usize,
    pub heavy_density: f64,
    pub seed: u64,
}

impl Default for BlockLayout {
    fn default() -> Self {
        BlockLayout {
            vertices: 20_000,
            background_degree: 4.0,
            blocks: 1_500,
            block_size: (8, 16),
            block_density: 0.7,
            heavy_size: 33,
            heavy_density: 0.9,
            seed: 7,
        }
    }
}

fn add_block(
    rng: &mut ChaCha8Rng,
    members: &[VertexId],
    density: f64,
    edges: &mut Vec<(VertexId, VertexId)>,
) {
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
}

/// Blocks draw their members from a window twice their size at a random
/// offset, so neighboring blocks share vertices. The heavy block overlaps
/// the first ordinary block.
pub fn dense_blocks(layout: &BlockLayout) -> Graph {
    let n = layout.vertices;
    let mut rng = ChaCha8Rng::seed_from_u64(layout.seed);
    let mut edges = Vec::new();
    let background = (layout.background_degree * n as f64 / 2.0) as usize;
    for _ in 0..background {
        let u = rng.gen_range(0..n) as VertexId;
        let v = rng.gen_range(0..n) as VertexId;
        edges.push((u, v));
    }
    let (lo, hi) = layout.block_size;
    for _ in 0..layout.blocks {
        let size = rng.gen_range(lo..=hi);
        let window = (2 * size).min(n);
        let start = rng.gen_range(0..=n - window);
        let members: Vec<VertexId> =
            sample(&mut rng, window, size).into_iter().map(|i| (start + i) as VertexId).collect();
        add_block(&mut rng, &members, layout.block_density, &mut edges);
    }
    if layout.heavy_size > 0 {
        let window = (layout.heavy_size * 3 / 2).min(n);
        let start = rng.gen_range(0..=n - window);
        let members: Vec<VertexId> = sample(&mut rng, window, layout.heavy_size)
            .into_iter()
            .map(|i| (start + i) as VertexId)
            .collect();
        add_block(&mut rng, &members, layout.heavy_density, &mut edges);
    }
    Graph::from_edges(n, edges).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_is_seeded() {
        assert_eq!(gnp(30, 0.3, 5), gnp(30, 0.3, 5));
        assert_eq!(gnp(10, 1.0, 1).edge_count(), 45);
        assert_eq!(gnp(10, 0.0, 1).edge_count(), 0);
    }

    #[test]
    fn blocks_shape() {
        let layout = BlockLayout { vertices: 500, blocks: 20, heavy_size: 20, ..BlockLayout::default() };
        let g = dense_blocks(&layout);
        assert_eq!(g.vertex_count(), 500);
        assert_eq!(g, dense_blocks(&layout));
        let max = g.vertices().map(|v| g.degree(v)).max().unwrap();
        assert!(max >= 15);
    }
}
