//! Merging raw emissions and keeping only the maximal sets.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::ResultIoError;
use crate::graph::VertexId;

/// A collection of vertex sets, each an ascending id list.
pub type ResultSet = Vec<Vec<VertexId>>;

#[derive(Default)]
struct TrieNode {
    children: BTreeMap<VertexId, usize>,
}

/// Prefix tree over ascending id sequences supporting "is there a stored
/// superset of this set" queries.
#[derive(Default)]
pub struct SetTrie {
    nodes: Vec<TrieNode>,
}

impl SetTrie {
    pub fn new() -> Self {
        SetTrie { nodes: vec![TrieNode::default()] }
    }

    pub fn insert(&mut self, set: &[VertexId]) {
        let mut cur = 0;
        for &v in set {
            cur = match self.nodes[cur].children.get(&v) {
                Some(&next) => next,
                None => {
                    self.nodes.push(TrieNode::default());
                    let next = self.nodes.len() - 1;
                    self.nodes[cur].children.insert(v, next);
                    next
                }
            };
        }
    }

    /// True if some stored set contains every element of `set`.
    pub fn contains_superset_of(&self, set: &[VertexId]) -> bool {
        self.search(0, set)
    }

    fn search(&self, node: usize, rest: &[VertexId]) -> bool {
        let Some((&need, tail)) = rest.split_first() else {
            return true;
        };
        // a stored path may skip ids smaller than `need`; anything larger
        // can no longer lead to `need`
        for (&key, &child) in self.nodes[node].children.range(..=need) {
            let found = if key == need { self.search(child, tail) } else { self.search(child, rest) };
            if found {
                return true;
            }
        }
        false
    }
}

/// The ⊆-maximal members of `raw`, deduplicated, in canonical order.
pub fn maximality_filter(raw: &[Vec<VertexId>]) -> ResultSet {
    let mut sets: Vec<Vec<VertexId>> = raw.to_vec();
    for s in &mut sets {
        s.sort_unstable();
        s.dedup();
    }
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut trie = SetTrie::new();
    let mut kept = Vec::new();
    for s in sets {
        if !trie.contains_superset_of(&s) {
            trie.insert(&s);
            kept.push(s);
        }
    }
    kept
}

/// Size descending, then lexicographic.
pub fn canonical_sort(sets: &mut [Vec<VertexId>]) {
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
}

/// Renders `count N` followed by one `k v1 ... vk` line per set.
pub fn render_results<T: std::fmt::Display>(sets: &[Vec<T>]) -> String {
    let mut out = format!("count {}\n", sets.len());
    for s in sets {
        out.push_str(&s.len().to_string());
        for v in s {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Writes a headerless per-worker sink file.
pub fn write_sink_file(path: &Path, sets: &[Vec<VertexId>]) -> Result<(), ResultIoError> {
    let io = |source| ResultIoError::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for s in sets {
        write!(w, "{}", s.len()).map_err(io)?;
        for v in s {
            write!(w, " {v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a sink file (a `count` header, if present, is skipped).
pub fn read_sink_file(path: &Path) -> Result<ResultSet, ResultIoError> {
    let io = |source| ResultIoError::Io { path: path.to_path_buf(), source };
    let parse_err = |line: usize, msg: String| ResultIoError::Parse { path: path.to_path_buf(), line, msg };
    let reader = BufReader::new(File::open(path).map_err(io)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        let t = line.trim();
        if t.is_empty() || t.starts_with("count") {
            continue;
        }
        let nums = t
            .split_whitespace()
            .map(|x| x.parse::<VertexId>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| parse_err(idx + 1, e.to_string()))?;
        let (&k, ids) = nums.split_first().ok_or_else(|| parse_err(idx + 1, "empty line".into()))?;
        if k as usize != ids.len() {
            return Err(parse_err(idx + 1, format!("declared {k} ids, found {}", ids.len())));
        }
        out.push(ids.to_vec());
    }
    Ok(out)
}

/// Concatenates per-worker sink files, keeps the maximal sets, translates
/// ids through `translate` and writes the canonical result file.
pub fn merge_and_emit<F>(
    worker_files: &[PathBuf],
    out: &Path,
    translate: F,
) -> Result<Vec<Vec<u64>>, ResultIoError>
where
    F: Fn(VertexId) -> u64,
{
    let mut raw = Vec::new();
    for f in worker_files {
        raw.extend(read_sink_file(f)?);
    }
    let filtered = maximality_filter(&raw);
    let mut final_sets: Vec<Vec<u64>> = filtered
        .iter()
        .map(|s| {
            let mut t: Vec<u64> = s.iter().map(|&v| translate(v)).collect();
            t.sort_unstable();
            t
        })
        .collect();
    final_sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    std::fs::write(out, render_results(&final_sets))
        .map_err(|source| ResultIoError::Io { path: out.to_path_buf(), source })?;
    Ok(final_sets)
}
