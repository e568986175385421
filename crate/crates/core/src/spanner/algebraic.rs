//! Fully dynamic `(1 + eps, b^(k+1))`-spanner rebuilt from scratch after each
//! update. Activeness is measured in a helper log-stretch spanner `G~`;
//! same-level active pairs that are close in `G` are joined by shortest
//! paths, taken from the path reporter on high levels and from BFS on low ones.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{bfs_parents, bfs_path, Dist, DynamicGraph, EdgeEvent};
use crate::path_reporter::{PathReporter, PathReporterConfig};
use crate::rng::derive;
use crate::spanner::combinatorial::{default_k, sample_levels};
use crate::spanner::{greedy_spanner, log_stretch, DynamicSpanner, Stretch};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgSpannerConfig {
    pub eps: f64,
    pub kappa: f64,
    pub seed: u64,
    /// `None` means `ceil(sqrt(log2 n))`.
    pub k: Option<usize>,
    /// `None` means `ceil(log2 n / eps')` with `eps' = eps / (20 (k + 1))`.
    pub b: Option<u64>,
    /// Path-reporter repetitions; `None` keeps its default.
    pub reps: Option<usize>,
}

impl AlgSpannerConfig {
    pub fn new(eps: f64, kappa: f64, seed: u64) -> Self {
        AlgSpannerConfig { eps, kappa, seed, k: None, b: None, reps: None }
    }
}

/// `b^(i+1) / (8 log2 n)`, kept as a numerator/denominator pair.
#[derive(Debug, Clone, Copy)]
struct Ratio {
    num: f64,
    den: f64,
}

impl Ratio {
    fn floor(self) -> u32 {
        (self.num / self.den + 1e-9).floor() as u32
    }

    fn ceil(self) -> u32 {
        (self.num / self.den - 1e-9).ceil() as u32
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlgSpannerStats {
    pub rebuilds: u64,
    pub reinits: u64,
    /// Pairs where the reporter found no witness and BFS filled in.
    pub witness_fallbacks: u64,
    pub reporter_pairs: u64,
    pub bfs_pairs: u64,
}

#[derive(Debug, Clone)]
pub struct AlgSpanner {
    config: AlgSpannerConfig,
    k: usize,
    b: u64,
    gamma: usize,
    log_n: f64,
    levels: Vec<usize>,
    g: DynamicGraph,
    helper: DynamicGraph,
    pr: PathReporter,
    active: Vec<bool>,
    h: DynamicGraph,
    stats: AlgSpannerStats,
}

/// `c_{i,j} = sum_{y=i+1}^{j} b^y`.
pub fn cumulative(b: u64, i: usize, j: usize) -> u128 {
    (i + 1..=j).map(|y| (b as u128).pow(y as u32)).sum()
}

/// Activeness straight from the predicate over all-pairs distances in `helper`.
pub fn alg_active_from_scratch(helper: &DynamicGraph, levels: &[usize], b: u64) -> Vec<bool> {
    let n = helper.n();
    let dist = crate::graph::all_pairs(helper);
    (0..n)
        .map(|a| {
            !(0..n).any(|x| {
                levels[x] > levels[a]
                    && matches!(dist[a][x], Dist::Finite(d) if 4 * d as u128 <= cumulative(b, levels[a], levels[x]))
            })
        })
        .collect()
}

impl AlgSpanner {
    pub fn new(g: &DynamicGraph, config: AlgSpannerConfig) -> Result<Self> {
        if !(config.eps > 0.0 && config.eps <= 1.0) {
            return Err(Error::ParamDomain(format!("eps {} outside (0, 1]", config.eps)));
        }
        if !(config.kappa > 0.0 && config.kappa <= 0.529) {
            return Err(Error::ParamDomain(format!("kappa {} outside (0, 0.529]", config.kappa)));
        }
        if g.is_directed() {
            return Err(Error::ParamDomain("spanners are defined on undirected graphs".into()));
        }
        let n = g.n();
        let k = config.k.unwrap_or_else(|| default_k(n));
        if k == 0 {
            return Err(Error::ParamDomain("k must be at least 1".into()));
        }
        let log_n = (n.max(2) as f64).log2();
        let eps_p = config.eps / (20.0 * (k as f64 + 1.0));
        let b = config.b.unwrap_or_else(|| (log_n / eps_p - 1e-9).ceil() as u64).max(2);
        let gamma = ((config.kappa * k as f64) + 1e-9).floor() as usize;
        let helper = greedy_spanner(g, log_stretch(n))?;
        let d_star = Ratio { num: (b as f64).powi(k as i32 + 1), den: 8.0 * log_n }.ceil().max(1) as usize;
        let mut prc = PathReporterConfig::new(d_star, derive(config.seed, "alg-reporter", 0));
        prc.reps = config.reps;
        let pr = PathReporter::new(g, prc)?;
        let mut s = AlgSpanner {
            config,
            k,
            b,
            gamma,
            log_n,
            levels: sample_levels(n, k, config.seed),
            g: g.clone(),
            helper,
            pr,
            active: vec![false; n],
            h: DynamicGraph::new(n, false),
            stats: AlgSpannerStats::default(),
        };
        s.rebuild()?;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn reporter_depth(&self) -> usize {
        self.pr.depth()
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn helper(&self) -> &DynamicGraph {
        &self.helper
    }

    pub fn stats(&self) -> AlgSpannerStats {
        self.stats
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    /// Active members of `A_level \ A_(level+1)`.
    pub fn active_at(&self, level: usize) -> Vec<usize> {
        (0..self.g.n()).filter(|&v| self.levels[v] == level && self.active[v]).collect()
    }

    /// Largest `G`-distance at which level-`i` active pairs are joined.
    pub fn pair_threshold(&self, i: usize) -> u32 {
        Ratio { num: (self.b as f64).powi(i as i32 + 1), den: 8.0 * self.log_n }.floor()
    }

    /// Size bound above which the structure reinitializes.
    pub fn density_limit(&self) -> f64 {
        let n = self.g.n() as f64;
        8.0 * n.powf(1.0 + 1.0 / self.k as f64) * self.log_n.powi(3)
    }

    pub fn active_from_scratch(&self) -> Vec<bool> {
        alg_active_from_scratch(&self.helper, &self.levels, self.b)
    }

    /// Descending pass: every active vertex of level `i` clears the lower
    /// levels it is close to in `G~`.
    fn compute_active(&mut self) {
        let n = self.g.n();
        self.active = vec![true; n];
        let mut dist = vec![u32::MAX; n];
        let mut seen = Vec::new();
        for i in (1..=self.k).rev() {
            let depth = (cumulative(self.b, 0, i) / 4) as u32;
            for a in 0..n {
                if self.levels[a] != i || !self.active[a] {
                    continue;
                }
                for &v in &seen {
                    dist[v] = u32::MAX;
                }
                seen.clear();
                dist[a] = 0;
                seen.push(a);
                let mut q = VecDeque::from([a]);
                while let Some(x) = q.pop_front() {
                    let dx = dist[x];
                    let p = self.levels[x];
                    if p < i && 4 * dx as u128 <= cumulative(self.b, p, i) {
                        self.active[x] = false;
                    }
                    if dx == depth {
                        continue;
                    }
                    for y in self.helper.out_neighbors(x) {
                        if dist[y] == u32::MAX {
                            dist[y] = dx + 1;
                            seen.push(y);
                            q.push_back(y);
                        }
                    }
                }
            }
        }
    }

    fn add_path(h: &mut DynamicGraph, path: &[usize]) {
        for w in path.windows(2) {
            if !h.has_edge(w[0], w[1]) {
                h.insert(w[0], w[1]).expect("path edges are graph edges");
            }
        }
    }

    fn rebuild(&mut self) -> Result<()> {
        self.stats.rebuilds += 1;
        self.compute_active();
        let n = self.g.n();
        let mut h = self.helper.clone();
        for i in 0..=self.k {
            let thr = self.pair_threshold(i);
            if thr == 0 {
                continue;
            }
            let members = self.active_at(i);
            if i >= self.gamma {
                for (x, &a) in members.iter().enumerate() {
                    for &c in &members[x + 1..] {
                        let Some(d) = self.pr.dist(a, c) else { continue };
                        if d as u32 > thr {
                            continue;
                        }
                        self.stats.reporter_pairs += 1;
                        let path = match self.pr.path(a, c) {
                            Ok(p) => p,
                            Err(Error::NoWitnessFound(..)) => {
                                self.stats.witness_fallbacks += 1;
                                eprintln!(
                                    "alg-spanner: no witness for ({a}, {c}), seed {}; using BFS",
                                    self.config.seed
                                );
                                bfs_path(&self.g, a, c).ok_or(Error::Disconnected(a, c))?
                            }
                            Err(e) => return Err(e),
                        };
                        Self::add_path(&mut h, &path);
                    }
                }
            } else {
                let mut is_member = vec![false; n];
                for &a in &members {
                    is_member[a] = true;
                }
                for &a in &members {
                    let d = crate::graph::bfs_bounded(&self.g, a, thr);
                    let parents = bfs_parents(&self.g, a);
                    for &c in members.iter().filter(|&&c| c > a) {
                        if !d[c].is_finite() {
                            continue;
                        }
                        self.stats.bfs_pairs += 1;
                        let mut path = vec![c];
                        let mut cur = c;
                        while let Some(p) = parents[cur] {
                            path.push(p);
                            cur = p;
                        }
                        Self::add_path(&mut h, &path);
                    }
                }
            }
        }
        self.h = h;
        Ok(())
    }

    /// Applies one update and rebuilds `H`.
    pub fn update(&mut self, ev: EdgeEvent) -> Result<&DynamicGraph> {
        self.g.apply(ev)?;
        self.pr.apply(ev)?;
        self.helper = greedy_spanner(&self.g, log_stretch(self.g.n()))?;
        self.rebuild()?;
        if self.h.edge_count() as f64 > self.density_limit() {
            self.stats.reinits += 1;
            let seed = derive(self.config.seed, "alg-reinit", self.stats.reinits);
            self.levels = sample_levels(self.g.n(), self.k, seed);
            let mut prc = *self.pr.config();
            prc.seed = derive(seed, "alg-reporter", 0);
            self.pr = PathReporter::new(&self.g, prc)?;
            self.rebuild()?;
        }
        Ok(&self.h)
    }
}

impl DynamicSpanner for AlgSpanner {
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
        Stretch { mult: 1.0 + self.config.eps, additive: self.b.pow(self.k as u32 + 1) }
    }
}
