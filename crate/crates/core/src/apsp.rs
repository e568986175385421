//! All-pairs distances beyond the reporter depth.
//!
//! [`HittingSetApsp`] stitches short hops through a random vertex sample `H`
//! that meets every long shortest path; the `H x H` distances come from a
//! submatrix view and Floyd-Warshall. [`ApproxApsp`] answers short pairs
//! exactly and falls back to BFS on a maintained spanner for long ones.

use std::cell::Cell;

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::graph::{bfs_dist, bfs_path, Dist, DynamicGraph, EdgeEvent};
use crate::inverse::ViewId;
use crate::path_reporter::{PathReporter, PathReporterConfig};
use crate::rng::rng_for;
use crate::spanner::DynamicSpanner;

const INF: u32 = u32::MAX / 4;

/// `ceil(c n ln n / (D / 2))`, clamped to `[1, n]`.
pub fn hitting_set_size(n: usize, depth: usize, c: f64) -> usize {
    if n <= 1 {
        return n;
    }
    let raw = (c * n as f64 * (n as f64).ln() / (depth as f64 / 2.0)).ceil();
    (raw as usize).clamp(1, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactApspConfig {
    pub reporter: PathReporterConfig,
    /// Constant in the hitting-set size.
    pub c: f64,
}

impl ExactApspConfig {
    pub fn new(depth: usize, seed: u64) -> Self {
        ExactApspConfig { reporter: PathReporterConfig::new(depth, seed), c: 2.0 }
    }
}

#[derive(Debug, Clone)]
pub struct HittingSetApsp {
    pr: PathReporter,
    hitting: Vec<usize>,
    view: ViewId,
    fw_dist: Vec<u32>,
    fw_next: Vec<usize>,
}

fn to_dist(x: u32) -> Dist {
    if x >= INF {
        Dist::Inf
    } else {
        Dist::Finite(x)
    }
}

impl HittingSetApsp {
    pub fn new(g: &DynamicGraph, config: ExactApspConfig) -> Result<Self> {
        let n = g.n();
        let size = hitting_set_size(n, config.reporter.depth, config.c);
        let mut rng = rng_for(config.reporter.seed, "hitting-set", 0);
        let mut hitting: Vec<usize> = sample(&mut rng, n, size).into_vec();
        hitting.sort_unstable();
        let mut pr = PathReporter::new(g, config.reporter)?;
        let view = pr.host_mut().register_submatrix(&hitting)?;
        let mut s = HittingSetApsp { pr, hitting, view, fw_dist: Vec::new(), fw_next: Vec::new() };
        s.floyd_warshall();
        Ok(s)
    }

    pub fn reporter(&self) -> &PathReporter {
        &self.pr
    }

    pub fn graph(&self) -> &DynamicGraph {
        self.pr.graph()
    }

    pub fn hitting_set(&self) -> &[usize] {
        &self.hitting
    }

    pub fn depth(&self) -> usize {
        self.pr.depth()
    }

    pub fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.pr.apply(ev)?;
        self.floyd_warshall();
        Ok(())
    }

    fn floyd_warshall(&mut self) {
        let k = self.hitting.len();
        let view = self.pr.host().view(self.view);
        let depth = self.pr.depth();
        let mut d = vec![INF; k * k];
        let mut next = vec![usize::MAX; k * k];
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    d[a * k + b] = 0;
                    next[a * k + b] = b;
                } else if let Some(w) = view.min_degree(a, b).filter(|&w| w <= depth) {
                    d[a * k + b] = w as u32;
                    next[a * k + b] = b;
                }
            }
        }
        for m in 0..k {
            for a in 0..k {
                let dam = d[a * k + m];
                if dam >= INF {
                    continue;
                }
                for b in 0..k {
                    let via = dam + d[m * k + b];
                    if via < d[a * k + b] {
                        d[a * k + b] = via;
                        next[a * k + b] = next[a * k + m];
                    }
                }
            }
        }
        self.fw_dist = d;
        self.fw_next = next;
    }

    /// Distance between hitting-set members by position.
    pub fn hub_dist(&self, a: usize, b: usize) -> Dist {
        to_dist(self.fw_dist[a * self.hitting.len() + b])
    }

    fn short(&self, i: usize, j: usize) -> u32 {
        self.pr.dist(i, j).map_or(INF, |d| d as u32)
    }

    /// `min_q (min_p d(i, p) + fw(p, q))` for every hub `q`.
    fn reach_from(&self, to_hubs: &[u32]) -> Vec<u32> {
        let k = self.hitting.len();
        let mut a = vec![INF; k];
        for (p, &dp) in to_hubs.iter().enumerate() {
            if dp >= INF {
                continue;
            }
            let row = &self.fw_dist[p * k..(p + 1) * k];
            for (slot, &w) in a.iter_mut().zip(row) {
                let v = dp + w;
                if v < *slot {
                    *slot = v;
                }
            }
        }
        a
    }

    pub fn dist(&self, i: usize, j: usize) -> Dist {
        let direct = self.short(i, j);
        let to_hubs: Vec<u32> = self.hitting.iter().map(|&p| self.short(i, p)).collect();
        let a = self.reach_from(&to_hubs);
        let mut best = direct;
        for (q, &hq) in self.hitting.iter().enumerate() {
            best = best.min(a[q] + self.short(hq, j));
        }
        to_dist(best)
    }

    /// Every pair at once; `O(n |H|^2 + n^2 |H|)` after `O(n |H|)` short queries.
    pub fn all_dist(&self) -> Vec<Vec<Dist>> {
        let n = self.pr.n();
        let k = self.hitting.len();
        let from_hub: Vec<Vec<u32>> =
            self.hitting.iter().map(|&q| (0..n).map(|j| self.short(q, j)).collect()).collect();
        (0..n)
            .map(|i| {
                let to_hubs: Vec<u32> = self.hitting.iter().map(|&p| self.short(i, p)).collect();
                let a = self.reach_from(&to_hubs);
                (0..n)
                    .map(|j| {
                        let mut best = self.short(i, j);
                        for q in 0..k {
                            best = best.min(a[q] + from_hub[q][j]);
                        }
                        to_dist(best)
                    })
                    .collect()
            })
            .collect()
    }

    fn segment(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        if self.pr.dist(a, b).is_none() {
            return Err(Error::StitchFailure(a, b));
        }
        self.pr.path(a, b)
    }

    pub fn path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        let direct = self.short(i, j);
        let k = self.hitting.len();
        let to_hubs: Vec<u32> = self.hitting.iter().map(|&p| self.short(i, p)).collect();
        let from_hubs: Vec<u32> = self.hitting.iter().map(|&q| self.short(q, j)).collect();
        let mut best = (INF, usize::MAX, usize::MAX);
        for p in 0..k {
            if to_hubs[p] >= INF {
                continue;
            }
            for q in 0..k {
                let v = to_hubs[p] + self.fw_dist[p * k + q] + from_hubs[q];
                if v < best.0 {
                    best = (v, p, q);
                }
            }
        }
        if direct < INF && direct <= best.0 {
            return self.pr.path(i, j);
        }
        if best.0 >= INF {
            return Err(Error::Disconnected(i, j));
        }
        let (_, p, q) = best;
        let mut hubs = vec![p];
        let mut cur = p;
        while cur != q {
            cur = self.fw_next[cur * k + q];
            hubs.push(cur);
        }
        let mut out = self.segment(i, self.hitting[p])?;
        for w in hubs.windows(2) {
            let seg = self.segment(self.hitting[w[0]], self.hitting[w[1]])?;
            out.extend_from_slice(&seg[1..]);
        }
        let tail = self.segment(self.hitting[q], j)?;
        out.extend_from_slice(&tail[1..]);
        Ok(out)
    }
}

/// Reporter depth `ceil(2 beta / eps)`, capped at `n - 1` (at least 1).
pub fn approx_depth(n: usize, beta: u64, eps: f64) -> usize {
    let d = (2.0 * beta as f64 / eps).ceil() as usize;
    d.min(n.saturating_sub(1)).max(1)
}

#[derive(Debug, Clone)]
pub struct ApproxApsp<S> {
    pr: PathReporter,
    spanner: S,
    eps: f64,
    scans: Cell<u64>,
}

impl<S: DynamicSpanner> ApproxApsp<S> {
    /// Depth from the spanner certificate unless `config.depth` is nonzero.
    pub fn new(spanner: S, eps: f64, mut config: PathReporterConfig) -> Result<Self> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::ParamDomain(format!("eps {eps} must be positive")));
        }
        let g = spanner.graph().clone();
        if config.depth == 0 {
            config.depth = approx_depth(g.n(), spanner.stretch().additive, eps);
        }
        let pr = PathReporter::new(&g, config)?;
        Ok(ApproxApsp { pr, spanner, eps, scans: Cell::new(0) })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn depth(&self) -> usize {
        self.pr.depth()
    }

    pub fn graph(&self) -> &DynamicGraph {
        self.pr.graph()
    }

    pub fn spanner(&self) -> &S {
        &self.spanner
    }

    pub fn reporter(&self) -> &PathReporter {
        &self.pr
    }

    pub fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.pr.apply(ev)?;
        self.spanner.apply(ev)
    }

    pub fn dist(&self, i: usize, j: usize) -> Dist {
        match self.pr.dist(i, j) {
            Some(d) => Dist::Finite(d as u32),
            None => bfs_dist(self.spanner.subgraph(), i)[j],
        }
    }

    /// All distances from `i` with one spanner BFS.
    pub fn dist_from(&self, i: usize) -> Vec<Dist> {
        let far = bfs_dist(self.spanner.subgraph(), i);
        (0..self.pr.n()).map(|j| self.pr.dist(i, j).map_or(far[j], |d| Dist::Finite(d as u32))).collect()
    }

    /// Within the reporter depth the path follows witnesses; a step whose
    /// witness search fails scans the neighbors of the current vertex against
    /// the reporter distances instead (counted in [`Self::successor_scans`]).
    pub fn path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        if self.pr.dist(i, j).is_none() {
            return bfs_path(self.spanner.subgraph(), i, j).ok_or(Error::Disconnected(i, j));
        }
        let mut out = vec![i];
        let mut cur = i;
        while cur != j {
            cur = match self.pr.successor(cur, j) {
                Err(Error::NoWitnessFound(..)) => self.scan_successor(cur, j)?,
                r => r?,
            };
            out.push(cur);
        }
        Ok(out)
    }

    fn scan_successor(&self, i: usize, j: usize) -> Result<usize> {
        self.scans.set(self.scans.get() + 1);
        let d = self.pr.dist(i, j).ok_or(Error::Disconnected(i, j))?;
        self.pr.graph().out_neighbors(i).find(|&s| self.pr.dist(s, j) == Some(d - 1)).ok_or(Error::NoWitnessFound(i, j))
    }

    pub fn successor_scans(&self) -> u64 {
        self.scans.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{cycle, gnp, grid, path, random_updates};
    use crate::graph::{all_pairs, path_is_valid};
    use crate::spanner::IdentitySpanner;

    fn small_h(depth: usize, seed: u64, c: f64) -> ExactApspConfig {
        let mut cfg = ExactApspConfig::new(depth, seed);
        cfg.c = c;
        cfg
    }

    fn check_all(ap: &HittingSetApsp) {
        let g = ap.graph();
        let want = all_pairs(g);
        assert_eq!(ap.all_dist(), want);
        for i in 0..g.n() {
            for j in 0..g.n() {
                if let Dist::Finite(d) = want[i][j] {
                    let p = ap.path(i, j).unwrap();
                    assert!(path_is_valid(g, &p, i, j));
                    assert_eq!(p.len(), d as usize + 1);
                }
            }
        }
    }

    #[test]
    fn hitting_set_size_clamps() {
        assert_eq!(hitting_set_size(128, 8, 2.0), 128);
        assert_eq!(hitting_set_size(1000, 200, 0.5), 35);
        assert_eq!(hitting_set_size(1, 8, 2.0), 1);
    }

    #[test]
    fn path_graph_hub_distances() {
        // First seed whose sample leaves no gap wider than D on the path.
        let ap = (0..)
            .map(|seed| HittingSetApsp::new(&path(32), small_h(4, seed, 0.4)).unwrap())
            .find(|ap| ap.hitting_set().windows(2).all(|w| w[1] - w[0] <= 4))
            .unwrap();
        let h = ap.hitting_set().to_vec();
        assert!(h.len() < 32);
        for (a, &p) in h.iter().enumerate() {
            for (b, &q) in h.iter().enumerate() {
                assert_eq!(ap.hub_dist(a, b), Dist::Finite(p.abs_diff(q) as u32));
            }
        }
    }

    #[test]
    fn long_path_end_to_end() {
        let ap = HittingSetApsp::new(&path(64), small_h(8, 1, 0.8)).unwrap();
        assert_eq!(ap.dist(0, 63), Dist::Finite(63));
        assert_eq!(ap.path(0, 63).unwrap(), (0..64).collect::<Vec<_>>());
        check_all(&ap);
    }

    #[test]
    fn cycle_and_grid_paths() {
        let ap = HittingSetApsp::new(&cycle(48), small_h(8, 2, 0.8)).unwrap();
        let p = ap.path(0, 24).unwrap();
        assert_eq!(p.len(), 25);
        assert!(path_is_valid(ap.graph(), &p, 0, 24));
        let ap = HittingSetApsp::new(&grid(8, 8), small_h(6, 4, 0.8)).unwrap();
        let p = ap.path(0, 63).unwrap();
        assert_eq!(p.len(), 15);
        check_all(&ap);
    }

    #[test]
    fn bridge_deletion_disconnects() {
        let mut ap = HittingSetApsp::new(&path(20), small_h(4, 9, 0.8)).unwrap();
        ap.apply(EdgeEvent::Delete(9, 10)).unwrap();
        assert_eq!(ap.dist(0, 19), Dist::Inf);
        assert_eq!(ap.path(0, 19), Err(Error::Disconnected(0, 19)));
        check_all(&ap);
    }

    #[test]
    fn dynamic_random_graph() {
        let g0 = gnp(24, 0.08, false, 6);
        let mut ap = HittingSetApsp::new(&g0, small_h(4, 5, 1.0)).unwrap();
        for ev in random_updates(&g0, 15, 0.5, 8) {
            ap.apply(ev).unwrap();
            check_all(&ap);
        }
    }

    #[test]
    fn approx_with_identity_spanner_is_exact() {
        let g = path(30);
        let ap = ApproxApsp::new(IdentitySpanner::new(&g), 1.0, PathReporterConfig::new(4, 1)).unwrap();
        assert_eq!(ap.dist(0, 1), Dist::Finite(1));
        assert_eq!(ap.dist(3, 3), Dist::Finite(0));
        assert_eq!(ap.path(3, 3).unwrap(), vec![3]);
        assert_eq!(ap.dist(0, 29), Dist::Finite(29));
        assert_eq!(ap.dist_from(0)[29], Dist::Finite(29));
        assert!(path_is_valid(&g, &ap.path(0, 29).unwrap(), 0, 29));
    }

    #[test]
    fn approx_depth_caps() {
        assert_eq!(approx_depth(100, 5, 1.0), 10);
        assert_eq!(approx_depth(8, 512, 1.0), 7);
        assert_eq!(approx_depth(100, 0, 1.0), 1);
    }

    #[test]
    fn approx_paths_survive_sparse_witness_sampling() {
        let g = grid(6, 6);
        let ap = ApproxApsp::new(IdentitySpanner::new(&g), 1.0, PathReporterConfig::new(10, 4).with_reps(1)).unwrap();
        let want = all_pairs(&g);
        for s in 0..g.n() {
            for t in 0..g.n() {
                let p = ap.path(s, t).unwrap();
                assert!(path_is_valid(&g, &p, s, t));
                assert_eq!(Dist::Finite(p.len() as u32 - 1), want[s][t]);
            }
        }
        assert_eq!(ap.successor_scans(), ap.reporter().witness_failures());
    }
}
