//! Dynamic Steiner tree: MST over approximate terminal-pair distances, each
//! MST edge expanded into a path, then a BFS spanning tree of the union with
//! non-terminal leaves pruned.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::apsp::ApproxApsp;
use crate::error::{Error, Result};
use crate::graph::{Dist, DynamicGraph, EdgeEvent};
use crate::path_reporter::PathReporterConfig;
use crate::rng::derive;
use crate::spanner::{CombSpanner, CombSpannerConfig, SpannerMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTree {
    pub vertices: BTreeSet<usize>,
    /// Sorted `(min, max)` pairs.
    pub edges: Vec<(usize, usize)>,
}

impl SteinerTree {
    pub fn weight(&self) -> usize {
        self.edges.len()
    }

    /// Edge list with a `# weight` header.
    pub fn to_text(&self) -> String {
        let mut s = format!("# weight {}\n", self.weight());
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Connected, acyclic, inside `g`, and covering `terminals`.
    pub fn is_valid_for(&self, g: &DynamicGraph, terminals: &BTreeSet<usize>) -> bool {
        if !terminals.is_subset(&self.vertices) || !self.edges.iter().all(|&(u, v)| g.has_edge(u, v)) {
            return false;
        }
        if self.vertices.is_empty() {
            return true;
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(u, v) in &self.edges {
            if !self.vertices.contains(&u) || !self.vertices.contains(&v) {
                return false;
            }
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let start = *self.vertices.iter().next().expect("nonempty");
        let mut seen = BTreeSet::from([start]);
        let mut q = VecDeque::from([start]);
        while let Some(x) = q.pop_front() {
            for &y in adj.get(&x).into_iter().flatten() {
                if seen.insert(y) {
                    q.push_back(y);
                }
            }
        }
        seen == self.vertices
    }
}

/// Minimum Steiner tree weight by enumerating vertex supersets of `terminals`
/// and keeping the smallest connected one. Exponential; for small graphs.
pub fn steiner_opt(g: &DynamicGraph, terminals: &BTreeSet<usize>) -> Option<usize> {
    if terminals.len() <= 1 {
        return Some(0);
    }
    let others: Vec<usize> = (0..g.n()).filter(|v| !terminals.contains(v)).collect();
    let mut best: Option<usize> = None;
    for mask in 0u64..(1u64 << others.len()) {
        let size = terminals.len() + mask.count_ones() as usize;
        if best.is_some_and(|b| size > b) {
            continue;
        }
        let mut inside = vec![false; g.n()];
        for &t in terminals {
            inside[t] = true;
        }
        for (b, &v) in others.iter().enumerate() {
            if mask >> b & 1 == 1 {
                inside[v] = true;
            }
        }
        let start = *terminals.iter().next().expect("nonempty");
        let mut seen = vec![false; g.n()];
        seen[start] = true;
        let mut count = 1;
        let mut q = VecDeque::from([start]);
        while let Some(x) = q.pop_front() {
            for y in g.out_neighbors(x) {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    q.push_back(y);
                }
            }
        }
        if count == size {
            best = Some(size - 1);
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct SteinerState {
    apsp: ApproxApsp<CombSpanner>,
    terminals: BTreeSet<usize>,
    closure: BTreeMap<(usize, usize), Dist>,
    mst: Vec<(usize, usize)>,
    tree: Option<SteinerTree>,
}

impl SteinerState {
    /// Distances come from an approximate APSP at `eps / 2` over a rebuilt
    /// combinatorial spanner at `eps / 4`.
    pub fn new(g: &DynamicGraph, terminals: &[usize], eps: f64, seed: u64) -> Result<Self> {
        let sp = CombSpanner::new(
            g,
            CombSpannerConfig::new(eps / 4.0, derive(seed, "steiner-spanner", 0), SpannerMode::Rebuild),
        )?;
        let apsp = ApproxApsp::new(sp, eps / 2.0, PathReporterConfig::new(0, derive(seed, "steiner-apsp", 0)))?;
        let mut s =
            SteinerState { apsp, terminals: BTreeSet::new(), closure: BTreeMap::new(), mst: Vec::new(), tree: None };
        for &t in terminals {
            if t >= g.n() || !s.terminals.insert(t) {
                return Err(Error::TerminalStateError(format!("bad or repeated terminal {t}")));
            }
        }
        s.recompute_closure();
        s.rebuild_tree()?;
        Ok(s)
    }

    pub fn graph(&self) -> &DynamicGraph {
        self.apsp.graph()
    }

    pub fn terminals(&self) -> &BTreeSet<usize> {
        &self.terminals
    }

    pub fn tree(&self) -> Option<&SteinerTree> {
        self.tree.as_ref()
    }

    pub fn closure_mst(&self) -> &[(usize, usize)] {
        &self.mst
    }

    /// Weight of the MST over the approximate closure.
    pub fn closure_mst_weight(&self) -> u64 {
        self.mst.iter().map(|&(a, b)| self.closure_dist(a, b).finite().unwrap_or(0) as u64).sum()
    }

    fn closure_dist(&self, a: usize, b: usize) -> Dist {
        self.closure.get(&(a.min(b), a.max(b))).copied().unwrap_or(Dist::Inf)
    }

    /// Terminals grouped by connected component of the current graph.
    pub fn terminal_partition(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &t in &self.terminals {
            match groups.iter_mut().find(|grp| self.closure_dist(grp[0], t).is_finite()) {
                Some(grp) => grp.push(t),
                None => groups.push(vec![t]),
            }
        }
        groups
    }

    fn recompute_closure(&mut self) {
        self.closure.clear();
        let ts: Vec<usize> = self.terminals.iter().copied().collect();
        for (x, &a) in ts.iter().enumerate() {
            let row = self.apsp.dist_from(a);
            for &b in &ts[x + 1..] {
                self.closure.insert((a, b), row[b]);
            }
        }
    }

    fn rebuild_tree(&mut self) -> Result<Option<&SteinerTree>> {
        self.tree = None;
        self.mst.clear();
        let ts: Vec<usize> = self.terminals.iter().copied().collect();
        if ts.is_empty() {
            self.tree = Some(SteinerTree { vertices: BTreeSet::new(), edges: Vec::new() });
            return Ok(self.tree.as_ref());
        }
        // Prim over the closure.
        let m = ts.len();
        let mut in_tree = vec![false; m];
        let mut best: Vec<(Dist, usize)> = vec![(Dist::Inf, usize::MAX); m];
        best[0] = (Dist::Finite(0), usize::MAX);
        for _ in 0..m {
            let x = (0..m).filter(|&x| !in_tree[x]).min_by_key(|&x| (best[x].0, x)).expect("vertex left");
            if !best[x].0.is_finite() {
                let a = ts[0];
                return Err(Error::Disconnected(a, ts[x]));
            }
            in_tree[x] = true;
            if best[x].1 != usize::MAX {
                self.mst.push((ts[best[x].1], ts[x]));
            }
            for y in 0..m {
                let d = self.closure_dist(ts[x], ts[y]);
                if !in_tree[y] && d < best[y].0 {
                    best[y] = (d, x);
                }
            }
        }
        // Union of expanded paths.
        let g = self.graph();
        let mut union = DynamicGraph::new(g.n(), false);
        for &(a, b) in &self.mst {
            let path = self.apsp.path(a, b)?;
            for w in path.windows(2) {
                if !union.has_edge(w[0], w[1]) {
                    union.insert(w[0], w[1])?;
                }
            }
        }
        // BFS spanning tree from the lowest terminal, then prune.
        let root = ts[0];
        let parents = crate::graph::bfs_parents(&union, root);
        let mut vertices: BTreeSet<usize> = BTreeSet::from([root]);
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                vertices.insert(v);
                adj.entry(v).or_default().insert(p);
                adj.entry(p).or_default().insert(v);
            }
        }
        let mut leaves: Vec<usize> = vertices
            .iter()
            .copied()
            .filter(|v| !self.terminals.contains(v) && adj.get(v).map_or(0, |s| s.len()) <= 1)
            .collect();
        while let Some(v) = leaves.pop() {
            if !vertices.remove(&v) {
                continue;
            }
            for u in adj.remove(&v).unwrap_or_default() {
                let nu = adj.get_mut(&u).expect("symmetric");
                nu.remove(&v);
                if nu.len() <= 1 && !self.terminals.contains(&u) {
                    leaves.push(u);
                }
            }
        }
        let mut edges: Vec<(usize, usize)> =
            adj.iter().flat_map(|(&u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v))).collect();
        edges.sort_unstable();
        self.tree = Some(SteinerTree { vertices, edges });
        Ok(self.tree.as_ref())
    }

    pub fn apply(&mut self, ev: EdgeEvent) -> Result<Option<&SteinerTree>> {
        self.apsp.apply(ev)?;
        self.recompute_closure();
        self.rebuild_tree()
    }

    pub fn add_terminal(&mut self, v: usize) -> Result<Option<&SteinerTree>> {
        if v >= self.graph().n() || self.terminals.contains(&v) {
            return Err(Error::TerminalStateError(format!("{v} is already a terminal or out of range")));
        }
        let row = self.apsp.dist_from(v);
        for &t in &self.terminals {
            self.closure.insert((t.min(v), t.max(v)), row[t]);
        }
        self.terminals.insert(v);
        self.rebuild_tree()
    }

    pub fn remove_terminal(&mut self, v: usize) -> Result<Option<&SteinerTree>> {
        if !self.terminals.remove(&v) {
            return Err(Error::TerminalStateError(format!("{v} is not a terminal")));
        }
        self.closure.retain(|&(a, b), _| a != v && b != v);
        self.rebuild_tree()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{gnp, path, star};

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn adjacent_pair_is_one_edge() {
        let g = path(5);
        let s = SteinerState::new(&g, &[1, 2], 1.0, 0).unwrap();
        assert_eq!(s.tree().unwrap().edges, vec![(1, 2)]);
    }

    #[test]
    fn star_leaves_give_the_star() {
        let g = star(5);
        let s = SteinerState::new(&g, &[1, 2, 3, 4, 5], 1.0, 0).unwrap();
        assert_eq!(s.tree().unwrap().weight(), 5);
        assert!(s.tree().unwrap().vertices.contains(&0));
    }

    #[test]
    fn terminal_updates_on_a_path() {
        let g = path(10);
        let mut s = SteinerState::new(&g, &[4], 1.0, 1).unwrap();
        assert_eq!(s.tree().unwrap().weight(), 0);
        let mut ts = vec![4usize];
        for v in [7, 2, 9, 5] {
            s.add_terminal(v).unwrap();
            ts.push(v);
            let span = ts.iter().max().unwrap() - ts.iter().min().unwrap();
            assert_eq!(s.tree().unwrap().weight(), span);
        }
        assert_eq!(
            s.add_terminal(5).unwrap_err(),
            Error::TerminalStateError("5 is already a terminal or out of range".into())
        );
        for v in [9, 2, 7, 5] {
            s.remove_terminal(v).unwrap();
            ts.retain(|&x| x != v);
            let span = ts.iter().max().unwrap() - ts.iter().min().unwrap();
            assert_eq!(s.tree().unwrap().weight(), span);
        }
        assert!(s.remove_terminal(9).is_err());
    }

    #[test]
    fn random_instances_within_factor() {
        for seed in 0..6 {
            let g = gnp(12, 0.35, false, seed);
            let ts = set(&[0, 3, 7, 11]);
            let Some(opt) = steiner_opt(&g, &ts) else { continue };
            let s = SteinerState::new(&g, &ts.iter().copied().collect::<Vec<_>>(), 1.0, seed).unwrap();
            let tree = s.tree().unwrap();
            assert!(tree.is_valid_for(&g, &ts));
            assert!(tree.weight() >= opt);
            assert!(tree.weight() as f64 <= 3.0 * opt as f64);
        }
    }

    #[test]
    fn disconnection_is_reported() {
        let mut s = SteinerState::new(&path(6), &[0, 5], 1.0, 2).unwrap();
        assert_eq!(s.apply(EdgeEvent::Delete(2, 3)).unwrap_err(), Error::Disconnected(0, 5));
        assert!(s.tree().is_none());
        assert_eq!(s.terminal_partition(), vec![vec![0], vec![5]]);
        s.apply(EdgeEvent::Insert(2, 3)).unwrap();
        assert_eq!(s.tree().unwrap().weight(), 5);
    }

    #[test]
    fn opt_oracle_small_cases() {
        assert_eq!(steiner_opt(&path(6), &set(&[1, 4])), Some(3));
        assert_eq!(steiner_opt(&star(4), &set(&[1, 2, 3])), Some(3));
        assert_eq!(steiner_opt(&DynamicGraph::new(3, false), &set(&[0, 2])), None);
    }
}
