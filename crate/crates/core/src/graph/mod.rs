//! Dynamic unweighted graphs, BFS oracles, update scripts and ES-trees.

mod es_tree;
pub mod generators;
pub mod script;

pub use es_tree::{EsDelta, EsMode, EsTree, LevelChange};

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Hop distance with a dedicated unreachable value. `Finite(_) < Inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Finite(u32),
    Inf,
}

impl Dist {
    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Inf => None,
        }
    }

    pub fn plus(self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Inf,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Inf => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeEvent {
    Insert(usize, usize),
    Delete(usize, usize),
}

impl EdgeEvent {
    pub fn endpoints(self) -> (usize, usize) {
        match self {
            EdgeEvent::Insert(u, v) | EdgeEvent::Delete(u, v) => (u, v),
        }
    }

    pub fn is_insert(self) -> bool {
        matches!(self, EdgeEvent::Insert(..))
    }

    pub fn reversed(self) -> EdgeEvent {
        match self {
            EdgeEvent::Insert(u, v) => EdgeEvent::Delete(u, v),
            EdgeEvent::Delete(u, v) => EdgeEvent::Insert(u, v),
        }
    }
}

/// Simple graph on vertices `0..n`. Undirected edges are stored once in the
/// count and mirrored in adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicGraph {
    n: usize,
    directed: bool,
    out: Vec<BTreeSet<usize>>,
    inn: Vec<BTreeSet<usize>>,
    edge_count: usize,
}

impl DynamicGraph {
    pub fn new(n: usize, directed: bool) -> Self {
        DynamicGraph {
            n,
            directed,
            out: vec![BTreeSet::new(); n],
            inn: if directed { vec![BTreeSet::new(); n] } else { Vec::new() },
            edge_count: 0,
        }
    }

    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = DynamicGraph::new(n, directed);
        for &(u, v) in edges {
            g.insert(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.out[u].contains(&v)
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[u].iter().copied()
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let set = if self.directed { &self.inn[v] } else { &self.out[v] };
        set.iter().copied()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out[u].len()
    }

    fn check(&self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::IllegalUpdate(format!("edge ({u}, {v}) out of range for n = {}", self.n)));
        }
        if u == v {
            return Err(Error::IllegalUpdate(format!("self-loop at {u}")));
        }
        Ok(())
    }

    pub fn insert(&mut self, u: usize, v: usize) -> Result<()> {
        self.check(u, v)?;
        if self.out[u].contains(&v) {
            return Err(Error::IllegalUpdate(format!("edge ({u}, {v}) already present")));
        }
        self.out[u].insert(v);
        if self.directed {
            self.inn[v].insert(u);
        } else {
            self.out[v].insert(u);
        }
        self.edge_count += 1;
        Ok(())
    }

    pub fn delete(&mut self, u: usize, v: usize) -> Result<()> {
        self.check(u, v)?;
        if !self.out[u].remove(&v) {
            return Err(Error::IllegalUpdate(format!("edge ({u}, {v}) not present")));
        }
        if self.directed {
            self.inn[v].remove(&u);
        } else {
            self.out[v].remove(&u);
        }
        self.edge_count -= 1;
        Ok(())
    }

    pub fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        match ev {
            EdgeEvent::Insert(u, v) => self.insert(u, v),
            EdgeEvent::Delete(u, v) => self.delete(u, v),
        }
    }

    /// Edge list; undirected edges appear once as `(min, max)`. Sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for &v in &self.out[u] {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Stable 64-bit digest of the edge set.
    pub fn fingerprint(&self) -> u64 {
        let mut h = crate::rng::splitmix64(self.n as u64 ^ ((self.directed as u64) << 63));
        for (u, v) in self.edges() {
            h = crate::rng::splitmix64(h ^ ((u as u64) << 32 | v as u64));
        }
        h
    }

    /// Induced subgraph check helper: is every edge of `other` present here?
    pub fn contains_subgraph(&self, other: &DynamicGraph) -> bool {
        other.n == self.n && other.edges().iter().all(|&(u, v)| self.has_edge(u, v))
    }
}

/// Exact hop distances from `s`.
pub fn bfs_dist(g: &DynamicGraph, s: usize) -> Vec<Dist> {
    bfs_bounded(g, s, u32::MAX)
}

/// BFS truncated at `radius`; vertices further away are `Inf`.
pub fn bfs_bounded(g: &DynamicGraph, s: usize, radius: u32) -> Vec<Dist> {
    let mut dist = vec![Dist::Inf; g.n()];
    let mut q = VecDeque::new();
    dist[s] = Dist::Finite(0);
    q.push_back((s, 0u32));
    while let Some((x, d)) = q.pop_front() {
        if d == radius {
            continue;
        }
        for y in g.out_neighbors(x) {
            if dist[y] == Dist::Inf {
                dist[y] = Dist::Finite(d + 1);
                q.push_back((y, d + 1));
            }
        }
    }
    dist
}

/// BFS parents (first discovery, neighbors in increasing order).
pub fn bfs_parents(g: &DynamicGraph, s: usize) -> Vec<Option<usize>> {
    let mut parent = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    let mut q = VecDeque::new();
    seen[s] = true;
    q.push_back(s);
    while let Some(x) = q.pop_front() {
        for y in g.out_neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                q.push_back(y);
            }
        }
    }
    parent
}

/// A shortest path `s -> t`, or `None` if unreachable.
pub fn bfs_path(g: &DynamicGraph, s: usize, t: usize) -> Option<Vec<usize>> {
    let parent = bfs_parents(g, s);
    if s != t && parent[t].is_none() {
        return None;
    }
    let mut path = vec![t];
    let mut x = t;
    while x != s {
        x = parent[x]?;
        path.push(x);
    }
    path.reverse();
    Some(path)
}

pub fn all_pairs(g: &DynamicGraph) -> Vec<Vec<Dist>> {
    (0..g.n()).map(|s| bfs_dist(g, s)).collect()
}

/// True iff `path` is a walk along present edges from `s` to `t`.
pub fn path_is_valid(g: &DynamicGraph, path: &[usize], s: usize, t: usize) -> bool {
    path.first() == Some(&s) && path.last() == Some(&t) && path.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Dist::{Finite as F, Inf};

    #[test]
    fn insert_delete_and_illegal() {
        let mut g = DynamicGraph::new(3, false);
        g.insert(0, 1).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(1, 0));
        assert!(matches!(g.insert(0, 1), Err(Error::IllegalUpdate(_))));
        assert!(matches!(g.insert(1, 0), Err(Error::IllegalUpdate(_))));
        assert!(matches!(g.insert(2, 2), Err(Error::IllegalUpdate(_))));
        g.delete(0, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(matches!(g.delete(0, 1), Err(Error::IllegalUpdate(_))));
    }

    #[test]
    fn directed_is_not_symmetric() {
        let mut g = DynamicGraph::new(2, true);
        g.insert(0, 1).unwrap();
        assert!(!g.has_edge(1, 0));
        g.insert(1, 0).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(bfs_dist(&g, 1), vec![F(1), F(0)]);
    }

    #[test]
    fn bfs_examples() {
        let path = DynamicGraph::from_edges(4, false, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(bfs_dist(&path, 0), vec![F(0), F(1), F(2), F(3)]);
        let two = DynamicGraph::new(2, false);
        assert_eq!(bfs_dist(&two, 0), vec![F(0), Inf]);
        let cyc = DynamicGraph::from_edges(4, false, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(bfs_dist(&cyc, 0), vec![F(0), F(1), F(2), F(1)]);
        assert_eq!(bfs_bounded(&path, 0, 2), vec![F(0), F(1), F(2), Inf]);
    }

    #[test]
    fn bfs_path_is_shortest() {
        let cyc = DynamicGraph::from_edges(6, false, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let p = bfs_path(&cyc, 0, 4).unwrap();
        assert_eq!(p.len(), 3);
        assert!(path_is_valid(&cyc, &p, 0, 4));
        assert_eq!(bfs_path(&DynamicGraph::new(2, false), 0, 1), None);
        assert_eq!(bfs_path(&cyc, 3, 3), Some(vec![3]));
    }

    #[test]
    fn dist_order_and_plus() {
        assert!(F(1_000_000) < Inf);
        assert_eq!(F(2).plus(F(3)), F(5));
        assert_eq!(F(2).plus(Inf), Inf);
    }

    #[test]
    fn fingerprint_tracks_edge_set() {
        let mut g = DynamicGraph::new(5, false);
        let f0 = g.fingerprint();
        g.insert(1, 3).unwrap();
        assert_ne!(f0, g.fingerprint());
        g.delete(3, 1).unwrap();
        assert_eq!(f0, g.fingerprint());
    }
}
