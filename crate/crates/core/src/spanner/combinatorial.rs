//! Partially dynamic `(1 + eps, beta)`-spanner from nested level samples.
//!
//! `A_0 = V ⊇ A_1 ⊇ ... ⊇ A_k`. A vertex of level `i` is blocked when some
//! vertex of a higher level `j` lies within `e'^-(j+1) - e'^-(i+1)`;
//! unblocked (active) vertices grow a truncated BFS tree of radius
//! `ceil(e'^-(i+1))`, and `H` is the union of those trees. In decremental
//! mode vertices only ever become active, in incremental mode only inactive.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{bfs_bounded, Dist, DynamicGraph, EdgeEvent};
use crate::graph::{EsDelta, EsMode, EsTree};
use crate::rng::unit;
use crate::spanner::{DynamicSpanner, Stretch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpannerMode {
    Incremental,
    Decremental,
    /// Fully dynamic: rerun the static construction after every update.
    Rebuild,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSpannerConfig {
    pub eps: f64,
    /// `None` means `ceil(sqrt(log2 n))`.
    pub k: Option<usize>,
    pub seed: u64,
    pub mode: SpannerMode,
}

impl CombSpannerConfig {
    pub fn new(eps: f64, seed: u64, mode: SpannerMode) -> Self {
        CombSpannerConfig { eps, k: None, seed, mode }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }
}

pub fn default_k(n: usize) -> usize {
    ((n.max(2) as f64).log2().sqrt().ceil() as usize).max(1)
}

/// Net change to `H` caused by one update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpannerDelta {
    pub added: Vec<(usize, usize)>,
    pub removed: Vec<(usize, usize)>,
}

impl SpannerDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }
}

/// Radii and block thresholds for one `(eps, k, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelGeometry {
    pub radius: Vec<u32>,
    /// `threshold[j][i]` for `i < j`.
    pub threshold: Vec<Vec<u32>>,
}

impl LevelGeometry {
    pub fn new(eps: f64, k: usize, n: usize) -> Self {
        let inv = 8.0 / eps;
        let cap = n.max(1) as f64;
        let pw = |i: usize| inv.powi(i as i32 + 1);
        let radius = (0..=k).map(|i| (pw(i) - 1e-9).ceil().min(cap) as u32).collect();
        let threshold =
            (0..=k).map(|j| (0..j).map(|i| (pw(j) - pw(i) + 1e-9).floor().clamp(0.0, cap) as u32).collect()).collect();
        LevelGeometry { radius, threshold }
    }

    /// Largest threshold any blocker at level `j` uses.
    fn reach(&self, j: usize) -> u32 {
        self.threshold[j].iter().copied().max().unwrap_or(0)
    }
}

/// `level(v) = max { i : v in A_i }` with `A_i` drawn from one uniform per
/// vertex, so the samples nest.
pub fn sample_levels(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let ln = (n.max(2) as f64).ln();
    (0..n)
        .map(|v| {
            let x = unit(seed, "spanner-level", v as u64);
            (1..=k).take_while(|&i| x < (ln * (n as f64).powf(-(i as f64) / k as f64)).min(1.0)).last().unwrap_or(0)
        })
        .collect()
}

/// Activeness straight from the predicate, by BFS from every vertex above level 0.
pub fn active_from_scratch(g: &DynamicGraph, levels: &[usize], geo: &LevelGeometry) -> Vec<bool> {
    let mut active = vec![true; g.n()];
    for (a, &j) in levels.iter().enumerate() {
        if j == 0 {
            continue;
        }
        let d = bfs_bounded(g, a, geo.reach(j));
        for (y, dy) in d.into_iter().enumerate() {
            if let Dist::Finite(dy) = dy {
                let i = levels[y];
                if i < j && dy <= geo.threshold[j][i] {
                    active[y] = false;
                }
            }
        }
    }
    active
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone)]
pub struct CombSpanner {
    config: CombSpannerConfig,
    k: usize,
    geo: LevelGeometry,
    levels: Vec<usize>,
    g: DynamicGraph,
    active: Vec<bool>,
    trees: BTreeMap<usize, EsTree>,
    blockers: Vec<BTreeSet<usize>>,
    refcount: BTreeMap<(usize, usize), u32>,
    h: DynamicGraph,
    violations: u64,
    updates: u64,
}

impl CombSpanner {
    pub fn new(g: &DynamicGraph, config: CombSpannerConfig) -> Result<Self> {
        if !(config.eps > 0.0 && config.eps <= 1.0) {
            return Err(Error::ParamDomain(format!("eps {} outside (0, 1]", config.eps)));
        }
        if g.is_directed() {
            return Err(Error::ParamDomain("spanners are defined on undirected graphs".into()));
        }
        let n = g.n();
        let k = config.k.unwrap_or_else(|| default_k(n));
        if k == 0 {
            return Err(Error::ParamDomain("k must be at least 1".into()));
        }
        let mut s = CombSpanner {
            config,
            k,
            geo: LevelGeometry::new(config.eps, k, n),
            levels: sample_levels(n, k, config.seed),
            g: g.clone(),
            active: vec![false; n],
            trees: BTreeMap::new(),
            blockers: vec![BTreeSet::new(); n],
            refcount: BTreeMap::new(),
            h: DynamicGraph::new(n, false),
            violations: 0,
            updates: 0,
        };
        s.build();
        Ok(s)
    }

    fn build(&mut self) {
        let n = self.g.n();
        self.active = vec![false; n];
        self.trees.clear();
        self.blockers = vec![BTreeSet::new(); n];
        self.refcount.clear();
        self.h = DynamicGraph::new(n, false);
        let dirty = (0..n).collect();
        let mut sink = BTreeMap::new();
        self.cascade(dirty, &mut sink, false);
    }

    pub fn config(&self) -> &CombSpannerConfig {
        &self.config
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn geometry(&self) -> &LevelGeometry {
        &self.geo
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Blockers currently recorded against `v`.
    pub fn blockers_of(&self, v: usize) -> &BTreeSet<usize> {
        &self.blockers[v]
    }

    /// `2 ceil(e'^-(k+1))`.
    pub fn beta(&self) -> u64 {
        let raw = (8.0 / self.config.eps).powi(self.k as i32 + 1);
        2 * (raw - 1e-9).ceil() as u64
    }

    /// Activeness flips against the mode's direction so far.
    pub fn monotonicity_violations(&self) -> u64 {
        self.violations
    }

    pub fn active_from_scratch(&self) -> Vec<bool> {
        active_from_scratch(&self.g, &self.levels, &self.geo)
    }

    fn blocks(&self, a: usize, y: usize, dist: Dist) -> bool {
        let (j, i) = (self.levels[a], self.levels[y]);
        i < j && matches!(dist, Dist::Finite(d) if d <= self.geo.threshold[j][i])
    }

    fn bump(&mut self, edge: (usize, usize), up: bool, net: &mut BTreeMap<(usize, usize), i64>) {
        let e = key(edge.0, edge.1);
        let c = self.refcount.entry(e).or_insert(0);
        if up {
            *c += 1;
            if *c == 1 {
                self.h.insert(e.0, e.1).expect("refcount tracks H");
                *net.entry(e).or_insert(0) += 1;
            }
        } else {
            *c -= 1;
            if *c == 0 {
                self.refcount.remove(&e);
                self.h.delete(e.0, e.1).expect("refcount tracks H");
                *net.entry(e).or_insert(0) -= 1;
            }
        }
    }

    /// Settles activeness for `dirty` and everything it affects, highest level first.
    fn cascade(&mut self, dirty: BTreeSet<usize>, net: &mut BTreeMap<(usize, usize), i64>, count: bool) {
        let mut queue: BTreeSet<(Reverse<usize>, usize)> =
            dirty.into_iter().map(|v| (Reverse(self.levels[v]), v)).collect();
        while let Some((_, v)) = queue.pop_first() {
            let should = self.blockers[v].is_empty();
            if should == self.active[v] {
                continue;
            }
            if count {
                let against = match self.config.mode {
                    SpannerMode::Decremental => !should,
                    SpannerMode::Incremental => should,
                    SpannerMode::Rebuild => false,
                };
                if against {
                    self.violations += 1;
                }
            }
            self.active[v] = should;
            if should {
                let mode = match self.config.mode {
                    SpannerMode::Incremental => EsMode::Incremental,
                    _ => EsMode::Decremental,
                };
                let tree = EsTree::new(&self.g, v, self.geo.radius[self.levels[v]], mode);
                let edges: Vec<_> = tree.tree_edges().collect();
                let ball: Vec<_> = tree.ball().collect();
                self.trees.insert(v, tree);
                for e in edges {
                    self.bump(e, true, net);
                }
                for (y, d) in ball {
                    if self.blocks(v, y, Dist::Finite(d)) && self.blockers[y].insert(v) {
                        queue.insert((Reverse(self.levels[y]), y));
                    }
                }
            } else {
                let tree = self.trees.remove(&v).expect("active vertices own a tree");
                for e in tree.tree_edges() {
                    self.bump(e, false, net);
                }
                for (y, _) in tree.ball() {
                    if self.blockers[y].remove(&v) {
                        queue.insert((Reverse(self.levels[y]), y));
                    }
                }
            }
        }
    }

    fn absorb_delta(
        &mut self,
        a: usize,
        delta: &EsDelta,
        dirty: &mut BTreeSet<usize>,
        net: &mut BTreeMap<(usize, usize), i64>,
    ) {
        for ch in &delta.changes {
            let was = self.blocks(a, ch.vertex, ch.old);
            let now = self.blocks(a, ch.vertex, ch.new);
            if was && !now {
                self.blockers[ch.vertex].remove(&a);
                dirty.insert(ch.vertex);
            } else if now && !was {
                self.blockers[ch.vertex].insert(a);
                dirty.insert(ch.vertex);
            }
        }
        for &(v, old, new) in &delta.reparented {
            if let Some(p) = old {
                self.bump((p, v), false, net);
            }
            if let Some(p) = new {
                self.bump((p, v), true, net);
            }
        }
    }

    /// Applies one edge event and returns the net change to `H`.
    pub fn update(&mut self, ev: EdgeEvent) -> Result<SpannerDelta> {
        match (self.config.mode, ev) {
            (SpannerMode::Decremental, EdgeEvent::Insert(..)) => {
                return Err(Error::ModeViolation("insertion into a decremental spanner".into()))
            }
            (SpannerMode::Incremental, EdgeEvent::Delete(..)) => {
                return Err(Error::ModeViolation("deletion from an incremental spanner".into()))
            }
            _ => {}
        }
        self.g.apply(ev)?;
        self.updates += 1;
        let mut net = BTreeMap::new();
        if self.config.mode == SpannerMode::Rebuild {
            let before: BTreeSet<_> = self.refcount.keys().copied().collect();
            self.build();
            let after: BTreeSet<_> = self.refcount.keys().copied().collect();
            return Ok(SpannerDelta {
                added: after.difference(&before).copied().collect(),
                removed: before.difference(&after).copied().collect(),
            });
        }
        let (u, v) = ev.endpoints();
        let mut dirty = BTreeSet::new();
        let roots: Vec<usize> = self.trees.keys().copied().collect();
        for a in roots {
            let tree = self.trees.get_mut(&a).expect("root listed");
            let delta = match ev {
                EdgeEvent::Delete(..) if tree.contains(u) && tree.contains(v) => tree.delete(&self.g, u, v)?,
                EdgeEvent::Insert(..) if tree.contains(u) || tree.contains(v) => tree.insert(&self.g, u, v)?,
                _ => continue,
            };
            self.absorb_delta(a, &delta, &mut dirty, &mut net);
        }
        self.cascade(dirty, &mut net, true);
        let mut out = SpannerDelta::default();
        for (e, d) in net {
            match d.cmp(&0) {
                std::cmp::Ordering::Greater => out.added.push(e),
                std::cmp::Ordering::Less => out.removed.push(e),
                std::cmp::Ordering::Equal => {}
            }
        }
        Ok(out)
    }

    /// `H` as an edge list, one `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.h.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl DynamicSpanner for CombSpanner {
    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.update(ev).map(|_| ())
    }

    fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    fn subgraph(&self) -> &DynamicGraph {
        &self.h
    }

    fn stretch(&self) -> Stretch {
        Stretch { mult: 1.0 + self.config.eps, additive: self.beta() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{gnp, path, random_deletions};
    use crate::spanner::audit;

    fn cfg(mode: SpannerMode) -> CombSpannerConfig {
        CombSpannerConfig::new(1.0, 7, mode).with_k(2)
    }

    #[test]
    fn geometry_at_eps_one() {
        let geo = LevelGeometry::new(1.0, 2, 10_000);
        assert_eq!(geo.radius, vec![8, 64, 512]);
        assert_eq!(geo.threshold, vec![vec![], vec![56], vec![504, 448]]);
        let capped = LevelGeometry::new(1.0, 2, 100);
        assert_eq!(capped.radius, vec![8, 64, 100]);
        assert_eq!(default_k(256), 3);
    }

    #[test]
    fn levels_nest_and_shrink() {
        let lv = sample_levels(4096, 2, 3);
        let c1 = lv.iter().filter(|&&l| l >= 1).count();
        let c2 = lv.iter().filter(|&&l| l >= 2).count();
        assert!(c2 < c1 && c1 < 4096);
        assert!(c2 > 0);
    }

    #[test]
    fn trivial_graphs() {
        let s = CombSpanner::new(&DynamicGraph::new(1, false), cfg(SpannerMode::Decremental)).unwrap();
        assert_eq!(s.subgraph().edge_count(), 0);
        let s = CombSpanner::new(&DynamicGraph::new(30, false), cfg(SpannerMode::Decremental)).unwrap();
        assert_eq!(s.subgraph().edge_count(), 0);
        assert!(s.active().iter().all(|&a| a));
    }

    #[test]
    fn random_graph_certificate() {
        let g = gnp(64, 0.2, false, 1);
        let s = CombSpanner::new(&g, cfg(SpannerMode::Decremental)).unwrap();
        assert_eq!(audit(&g, s.subgraph(), s.stretch()), None);
        assert_eq!(s.active(), &s.active_from_scratch()[..]);
    }

    #[test]
    fn decremental_run_tracks_scratch() {
        let g = gnp(60, 0.08, false, 4);
        let mut s = CombSpanner::new(&g, CombSpannerConfig::new(1.0, 2, SpannerMode::Decremental).with_k(1)).unwrap();
        let mut h = s.subgraph().clone();
        for ev in random_deletions(&g, 120, 9) {
            let d = s.update(ev).unwrap();
            for &(a, b) in &d.removed {
                h.delete(a, b).unwrap();
            }
            for &(a, b) in &d.added {
                h.insert(a, b).unwrap();
            }
            assert_eq!(&h, s.subgraph());
            assert_eq!(s.active(), &s.active_from_scratch()[..]);
            assert_eq!(audit(s.graph(), s.subgraph(), s.stretch()), None);
        }
        assert_eq!(s.monotonicity_violations(), 0);
    }

    #[test]
    fn incremental_run_tracks_scratch() {
        let full = gnp(60, 0.08, false, 4);
        let dels = random_deletions(&full, full.edge_count(), 3);
        let mut g = full.clone();
        for ev in &dels {
            g.apply(*ev).unwrap();
        }
        let mut s = CombSpanner::new(&g, CombSpannerConfig::new(1.0, 2, SpannerMode::Incremental).with_k(1)).unwrap();
        for ev in dels.iter().rev() {
            s.update(ev.reversed()).unwrap();
            assert_eq!(s.active(), &s.active_from_scratch()[..]);
            assert_eq!(audit(s.graph(), s.subgraph(), s.stretch()), None);
        }
        assert_eq!(s.monotonicity_violations(), 0);
    }

    #[test]
    fn mode_checks_and_rebuild() {
        let g = path(12);
        let mut s = CombSpanner::new(&g, cfg(SpannerMode::Decremental)).unwrap();
        assert!(matches!(s.update(EdgeEvent::Insert(0, 5)), Err(Error::ModeViolation(_))));
        let mut s2 = CombSpanner::new(&g, cfg(SpannerMode::Incremental)).unwrap();
        assert!(matches!(s2.update(EdgeEvent::Delete(0, 1)), Err(Error::ModeViolation(_))));
        let mut r = CombSpanner::new(&g, cfg(SpannerMode::Rebuild)).unwrap();
        r.update(EdgeEvent::Insert(0, 11)).unwrap();
        r.update(EdgeEvent::Delete(3, 4)).unwrap();
        assert_eq!(audit(r.graph(), r.subgraph(), r.stretch()), None);
        assert!(s.update(EdgeEvent::Delete(5, 6)).is_ok());
        assert_eq!(audit(s.graph(), s.subgraph(), s.stretch()), None);
    }

    #[test]
    fn deleting_an_edge_no_tree_uses_changes_nothing() {
        let g = crate::graph::generators::complete(10);
        let mut s = CombSpanner::new(&g, cfg(SpannerMode::Decremental)).unwrap();
        let (a, b) = g.edges().into_iter().find(|&(a, b)| !s.subgraph().has_edge(a, b)).unwrap();
        assert!(s.update(EdgeEvent::Delete(a, b)).unwrap().is_empty());
        assert_eq!(s.beta(), 1024);
    }

    #[test]
    fn long_paths_activate_as_they_split() {
        let mut g = path(400);
        for i in (0..380).step_by(37) {
            g.insert(i, i + 20).unwrap();
        }
        let mut s = CombSpanner::new(&g, cfg(SpannerMode::Decremental).with_k(1)).unwrap();
        let start = s.active_count();
        for ev in random_deletions(&g, 60, 5) {
            s.update(ev).unwrap();
            assert_eq!(s.active(), &s.active_from_scratch()[..]);
            assert_eq!(audit(s.graph(), s.subgraph(), s.stretch()), None);
        }
        assert!(s.active_count() > start);
        assert_eq!(s.monotonicity_violations(), 0);
    }
}
