//! Destinations for emitted result sets.

use crate::graph::VertexId;

/// Which check produced an emission. Only used for diagnostics and tests;
/// every site emits a valid quasi-clique of at least the size threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EmitSite {
    /// `S ∪ ext(S)` is itself valid.
    Lookahead,
    /// `ext(S')` became empty after the two-hop restriction.
    EmptyAfterDiameter,
    /// Bounding emptied `ext(S)`.
    BoundingExhausted,
    /// Extensions of `S` were pruned but `S` itself survived.
    ExtensionsPruned,
    /// `S` checked right before a critical-vertex move enlarged it.
    BeforeCriticalMove,
    /// No larger result was found below `S'`.
    NoLargerFound,
    /// Child of a split task, checked because its subtree runs elsewhere.
    SplitChild,
    /// Child handed off after a timeout.
    TimeoutChild,
    /// A spawning vertex on its own (only reachable with size threshold 1).
    Singleton,
}

pub trait ResultSink {
    /// `set` is ascending.
    fn emit(&mut self, set: &[VertexId], site: EmitSite);
}

impl ResultSink for Vec<Vec<VertexId>> {
    fn emit(&mut self, set: &[VertexId], _site: EmitSite) {
        self.push(set.to_vec());
    }
}

/// Keeps the emitting site next to each set.
#[derive(Debug, Default, Clone)]
pub struct SiteRecorder {
    pub emitted: Vec<(Vec<VertexId>, EmitSite)>,
}

impl ResultSink for SiteRecorder {
    fn emit(&mut self, set: &[VertexId], site: EmitSite) {
        self.emitted.push((set.to_vec(), site));
    }
}

impl SiteRecorder {
    pub fn sets(&self) -> Vec<Vec<VertexId>> {
        self.emitted.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn sites_of(&self, set: &[VertexId]) -> Vec<EmitSite> {
        self.emitted.iter().filter(|(s, _)| s == set).map(|(_, site)| *site).collect()
    }
}
