//! Exhaustive ground truth for small graphs, used by the test suites.
//!
//! Everything here enumerates subsets as bitmasks, checks connectivity
//! explicitly, and shares no code with the miner.

use crate::error::OracleError;
use crate::gamma::Gamma;
use crate::graph::{Graph, VertexId};

pub const MAX_ORACLE_VERTICES: usize = 20;

fn masks(g: &Graph) -> Vec<u32> {
    g.vertices().map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u))).collect()
}

fn connected(adj: &[u32], set: u32) -> bool {
    if set == 0 {
        return false;
    }
    let start = set & set.wrapping_neg();
    let mut seen = start;
    let mut frontier = start;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & set & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == set
}

fn degree_ok(adj: &[u32], set: u32, gamma: Gamma) -> bool {
    let n = set.count_ones() as usize;
    let need = gamma.ceil_mul(n - 1) as u32;
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (adj[v] & set).count_ones() < need {
            return false;
        }
    }
    true
}

fn valid(adj: &[u32], set: u32, gamma: Gamma) -> bool {
    degree_ok(adj, set, gamma) && connected(adj, set)
}

fn to_vec(set: u32) -> Vec<VertexId> {
    (0..32).filter(|i| set >> i & 1 == 1).collect()
}

fn guard(g: &Graph) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    if n > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooLarge { what: "graph", size: n, limit: MAX_ORACLE_VERTICES });
    }
    Ok(n)
}

fn validity_table(g: &Graph, gamma: Gamma) -> Result<Vec<bool>, OracleError> {
    let n = guard(g)?;
    let adj = masks(g);
    Ok((0..1u32 << n).map(|m| m != 0 && valid(&adj, m, gamma)).collect())
}

/// Every nonempty vertex set inducing a connected, degree-qualified
/// subgraph, ordered by size then by bitmask value.
pub fn all_quasicliques(g: &Graph, gamma: Gamma) -> Result<Vec<Vec<VertexId>>, OracleError> {
    let table = validity_table(g, gamma)?;
    let mut found: Vec<u32> = (0..table.len() as u32).filter(|&m| table[m as usize]).collect();
    found.sort_by_key(|&m| (m.count_ones(), m));
    Ok(found.into_iter().map(to_vec).collect())
}

/// Valid sets of size `>= tau_size` with no valid proper superset of any
/// size.
pub fn maximal_quasicliques(
    g: &Graph,
    gamma: Gamma,
    tau_size: usize,
) -> Result<Vec<Vec<VertexId>>, OracleError> {
    let table = validity_table(g, gamma)?;
    let n = g.vertex_count();
    // has_valid_superset[m]: some valid set strictly contains m
    let mut sup: Vec<bool> = table.clone();
    for bit in 0..n {
        for m in 0..sup.len() {
            if m >> bit & 1 == 0 && sup[m | 1 << bit] {
                sup[m] = true;
            }
        }
    }
    let mut out: Vec<u32> = (0..table.len() as u32)
        .filter(|&m| {
            table[m as usize]
                && m.count_ones() as usize >= tau_size
                && !(0..n).any(|b| m >> b & 1 == 0 && sup[(m | 1 << b) as usize])
        })
        .collect();
    out.sort_by_key(|&m| (m.count_ones(), m));
    Ok(out.into_iter().map(to_vec).collect())
}

/// Every `V' ⊆ ext` (including the empty set) with `S ∪ V'` a
/// gamma-quasi-clique.
pub fn state_extensions(
    g: &Graph,
    s: &[VertexId],
    ext: &[VertexId],
    gamma: Gamma,
) -> Result<Vec<Vec<VertexId>>, OracleError> {
    guard(g)?;
    if ext.len() > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooLarge { what: "ext", size: ext.len(), limit: MAX_ORACLE_VERTICES });
    }
    let adj = masks(g);
    let base = s.iter().fold(0u32, |m, &v| m | 1 << v);
    let mut picks: Vec<u32> = (0..1u32 << ext.len()).collect();
    picks.sort_by_key(|&p| (p.count_ones(), p));
    let mut out = Vec::new();
    for p in picks {
        let mut set = base;
        let mut chosen = Vec::new();
        for (i, &u) in ext.iter().enumerate() {
            if p >> i & 1 == 1 {
                set |= 1 << u;
                chosen.push(u);
            }
        }
        if set != 0 && valid(&adj, set, gamma) {
            out.push(chosen);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma(s: &str) -> Gamma {
        s.parse().unwrap()
    }

    fn k4_pendant() -> Graph {
        Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).0
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as VertexId {
            for v in u + 1..n as VertexId {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).0
    }

    #[test]
    fn triangle_all() {
        let all = all_quasicliques(&complete(3), gamma("1")).unwrap();
        assert_eq!(all.len(), 7);
        assert_eq!(all[6], vec![0, 1, 2]);
        assert_eq!(maximal_quasicliques(&complete(3), gamma("1"), 3).unwrap(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn disconnected_pair_excluded() {
        let g = Graph::empty(2);
        assert_eq!(all_quasicliques(&g, gamma("0.5")).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn k4_pendant_results() {
        let all = all_quasicliques(&k4_pendant(), gamma("0.6")).unwrap();
        assert!(all.contains(&vec![0, 1, 2, 3]));
        assert!(!all.contains(&vec![0, 1, 2, 3, 4]));
        assert_eq!(maximal_quasicliques(&k4_pendant(), gamma("0.6"), 4).unwrap(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn state_examples() {
        let g = k4_pendant();
        assert_eq!(state_extensions(&g, &[0, 1], &[], gamma("1")).unwrap(), vec![Vec::<VertexId>::new()]);
        let k5 = complete(5);
        assert_eq!(state_extensions(&k5, &[0, 1], &[2, 3, 4], gamma("0.8")).unwrap().len(), 8);
        let fan = Graph::from_edges(4, [(0, 1), (1, 2), (0, 3), (1, 3), (2, 3)]).0;
        assert_eq!(state_extensions(&fan, &[0, 1, 2], &[3], gamma("0.6")).unwrap(), vec![vec![3]]);
    }

    #[test]
    fn size_guard() {
        assert!(all_quasicliques(&Graph::empty(21), gamma("1")).is_err());
    }

    #[test]
    fn maximality_ignores_size_threshold() {
        // triangle plus pendant: {0,1} is valid at gamma 1 but contained in
        // the triangle, so it is not maximal even with tau_size 2
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).0;
        assert_eq!(maximal_quasicliques(&g, gamma("1"), 2).unwrap(), vec![vec![2, 3], vec![0, 1, 2]]);
    }
}
