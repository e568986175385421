//! Dynamic spanners: subgraphs `H` with `dist_G <= dist_H <= a dist_G + b`.

pub mod algebraic;
pub mod combinatorial;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{all_pairs, Dist, DynamicGraph, EdgeEvent};

pub use algebraic::{AlgSpanner, AlgSpannerConfig};
pub use combinatorial::{CombSpanner, CombSpannerConfig, SpannerMode};

/// Certified stretch `dist_H <= mult * dist_G + additive`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stretch {
    pub mult: f64,
    pub additive: u64,
}

impl Stretch {
    pub fn bound(&self, dist_g: u32) -> f64 {
        self.mult * dist_g as f64 + self.additive as f64
    }
}

/// A spanner kept in step with an update stream on its host graph.
pub trait DynamicSpanner {
    fn apply(&mut self, ev: EdgeEvent) -> Result<()>;
    /// The host graph as the spanner currently sees it.
    fn graph(&self) -> &DynamicGraph;
    fn subgraph(&self) -> &DynamicGraph;
    fn stretch(&self) -> Stretch;
}

/// `H = G`; zero stretch. Useful as a baseline companion.
#[derive(Debug, Clone)]
pub struct IdentitySpanner {
    g: DynamicGraph,
}

impl IdentitySpanner {
    pub fn new(g: &DynamicGraph) -> Self {
        IdentitySpanner { g: g.clone() }
    }
}

impl DynamicSpanner for IdentitySpanner {
    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.g.apply(ev)
    }

    fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    fn subgraph(&self) -> &DynamicGraph {
        &self.g
    }

    fn stretch(&self) -> Stretch {
        Stretch { mult: 1.0, additive: 0 }
    }
}

/// Hop distance from `s` to `t` if it is at most `limit`.
fn bounded_hops(h: &DynamicGraph, s: usize, t: usize, limit: usize, seen: &mut [u32], stamp: u32) -> bool {
    if s == t {
        return true;
    }
    let mut q = VecDeque::from([(s, 0usize)]);
    seen[s] = stamp;
    while let Some((x, d)) = q.pop_front() {
        if d == limit {
            continue;
        }
        for y in h.out_neighbors(x) {
            if y == t {
                return true;
            }
            if seen[y] != stamp {
                seen[y] = stamp;
                q.push_back((y, d + 1));
            }
        }
    }
    false
}

/// Greedy multiplicative spanner: scan edges in sorted order and keep an
/// edge when its endpoints are more than `stretch` hops apart in `H` so far.
pub fn greedy_spanner(g: &DynamicGraph, stretch: usize) -> Result<DynamicGraph> {
    if g.is_directed() {
        return Err(Error::ParamDomain("spanners are defined on undirected graphs".into()));
    }
    let mut h = DynamicGraph::new(g.n(), false);
    let mut seen = vec![0u32; g.n()];
    for (stamp, (u, v)) in g.edges().into_iter().enumerate() {
        if !bounded_hops(&h, u, v, stretch, &mut seen, stamp as u32 + 1) {
            h.insert(u, v)?;
        }
    }
    Ok(h)
}

/// `2 ceil(log2 n) - 1`, at least 1.
pub fn log_stretch(n: usize) -> usize {
    (2 * crate::path_reporter::ceil_log2(n)).saturating_sub(1).max(1)
}

/// Greedy `(2 ceil(log2 n) - 1)`-spanner rebuilt after every update.
#[derive(Debug, Clone)]
pub struct GreedySpanner {
    g: DynamicGraph,
    h: DynamicGraph,
    t: usize,
}

impl GreedySpanner {
    pub fn new(g: &DynamicGraph) -> Result<Self> {
        Self::with_stretch(g, log_stretch(g.n()))
    }

    pub fn with_stretch(g: &DynamicGraph, t: usize) -> Result<Self> {
        Ok(GreedySpanner { g: g.clone(), h: greedy_spanner(g, t)?, t })
    }
}

impl DynamicSpanner for GreedySpanner {
    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.g.apply(ev)?;
        self.h = greedy_spanner(&self.g, self.t)?;
        Ok(())
    }

    fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    fn subgraph(&self) -> &DynamicGraph {
        &self.h
    }

    fn stretch(&self) -> Stretch {
        Stretch { mult: self.t as f64, additive: 0 }
    }
}

/// First pair violating `dist_G <= dist_H <= stretch` or `H ⊆ G`, if any.
#[derive(Debug, Clone, PartialEq)]
pub enum AuditFailure {
    NotSubgraph(usize, usize),
    Underestimate(usize, usize),
    Stretch { s: usize, t: usize, dist_g: Dist, dist_h: Dist },
}

pub fn audit(g: &DynamicGraph, h: &DynamicGraph, stretch: Stretch) -> Option<AuditFailure> {
    if let Some((u, v)) = h.edges().into_iter().find(|&(u, v)| !g.has_edge(u, v)) {
        return Some(AuditFailure::NotSubgraph(u, v));
    }
    let dg = all_pairs(g);
    let dh = all_pairs(h);
    for s in 0..g.n() {
        for t in 0..g.n() {
            match (dg[s][t], dh[s][t]) {
                (Dist::Inf, Dist::Inf) => {}
                (Dist::Finite(a), Dist::Finite(b)) if b < a => return Some(AuditFailure::Underestimate(s, t)),
                (Dist::Finite(a), Dist::Finite(b)) if b as f64 <= stretch.bound(a) + 1e-9 => {}
                (dist_g, dist_h) => return Some(AuditFailure::Stretch { s, t, dist_g, dist_h }),
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{complete, gnp, path};

    #[test]
    fn greedy_keeps_trees_whole() {
        let g = path(10);
        assert_eq!(greedy_spanner(&g, 3).unwrap(), g);
    }

    #[test]
    fn greedy_sparsifies_cliques() {
        let g = complete(12);
        let h = greedy_spanner(&g, 3).unwrap();
        assert!(h.edge_count() < g.edge_count());
        assert_eq!(audit(&g, &h, Stretch { mult: 3.0, additive: 0 }), None);
    }

    #[test]
    fn greedy_dynamic_audit() {
        let g = gnp(30, 0.2, false, 5);
        let mut sp = GreedySpanner::new(&g).unwrap();
        for ev in crate::graph::generators::random_updates(&g, 20, 0.5, 1) {
            sp.apply(ev).unwrap();
            assert_eq!(audit(sp.graph(), sp.subgraph(), sp.stretch()), None);
        }
    }

    #[test]
    fn audit_flags_missing_edges() {
        let g = path(4);
        let h = DynamicGraph::from_edges(4, false, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(audit(&g, &h, Stretch { mult: 1.0, additive: 0 }), Some(AuditFailure::Stretch { .. })));
        assert_eq!(audit(&h, &g, Stretch { mult: 1.0, additive: 0 }), Some(AuditFailure::NotSubgraph(2, 3)));
        assert_eq!(log_stretch(2), 1);
        assert_eq!(log_stretch(128), 13);
    }
}
