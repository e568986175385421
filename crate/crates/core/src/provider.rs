//! A common face for every structure that answers distance queries under
//! edge updates, so scripts can be replayed against any of them.

use crate::apsp::{ApproxApsp, HittingSetApsp};
use crate::error::Result;
use crate::graph::{bfs_dist, bfs_path, Dist, DynamicGraph, EdgeEvent};
use crate::path_reporter::PathReporter;
use crate::spanner::{CombSpanner, CombSpannerConfig, DynamicSpanner, SpannerMode};

pub trait DistanceProvider {
    fn name(&self) -> &'static str;
    fn apply(&mut self, ev: EdgeEvent) -> Result<()>;
    /// Estimated distance. Queries take `&mut self` so providers may defer work.
    fn dist(&mut self, u: usize, v: usize) -> Result<Dist>;
    /// A path realizing `dist`, or `None` if the provider does not report paths
    /// or the pair is unreachable for it.
    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>>;
}

/// Exact BFS on the graph itself.
#[derive(Debug, Clone)]
pub struct BfsOracle {
    g: DynamicGraph,
}

impl BfsOracle {
    pub fn new(g: &DynamicGraph) -> Self {
        BfsOracle { g: g.clone() }
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }
}

impl DistanceProvider for BfsOracle {
    fn name(&self) -> &'static str {
        "bfs-oracle"
    }

    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.g.apply(ev)
    }

    fn dist(&mut self, u: usize, v: usize) -> Result<Dist> {
        Ok(bfs_dist(&self.g, u)[v])
    }

    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>> {
        Ok(bfs_path(&self.g, u, v))
    }
}

/// Answers `inf` for everything.
#[derive(Debug, Clone, Default)]
pub struct NeverReachable;

impl DistanceProvider for NeverReachable {
    fn name(&self) -> &'static str {
        "never"
    }

    fn apply(&mut self, _ev: EdgeEvent) -> Result<()> {
        Ok(())
    }

    fn dist(&mut self, _u: usize, _v: usize) -> Result<Dist> {
        Ok(Dist::Inf)
    }

    fn path(&mut self, _u: usize, _v: usize) -> Result<Option<Vec<usize>>> {
        Ok(None)
    }
}

/// Path reporter alone; pairs beyond its depth read as `inf`.
impl DistanceProvider for PathReporter {
    fn name(&self) -> &'static str {
        "path-reporter"
    }

    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        PathReporter::apply(self, ev)
    }

    fn dist(&mut self, u: usize, v: usize) -> Result<Dist> {
        Ok(PathReporter::dist(self, u, v).map_or(Dist::Inf, |d| Dist::Finite(d as u32)))
    }

    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>> {
        match PathReporter::dist(self, u, v) {
            Some(_) => PathReporter::path(self, u, v).map(Some),
            None => Ok(None),
        }
    }
}

impl DistanceProvider for HittingSetApsp {
    fn name(&self) -> &'static str {
        "exact-apsp"
    }

    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        HittingSetApsp::apply(self, ev)
    }

    fn dist(&mut self, u: usize, v: usize) -> Result<Dist> {
        Ok(HittingSetApsp::dist(self, u, v))
    }

    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>> {
        match HittingSetApsp::dist(self, u, v) {
            Dist::Inf => Ok(None),
            Dist::Finite(_) => HittingSetApsp::path(self, u, v).map(Some),
        }
    }
}

impl<S: DynamicSpanner> DistanceProvider for ApproxApsp<S> {
    fn name(&self) -> &'static str {
        "approx-apsp"
    }

    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        ApproxApsp::apply(self, ev)
    }

    fn dist(&mut self, u: usize, v: usize) -> Result<Dist> {
        Ok(ApproxApsp::dist(self, u, v))
    }

    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>> {
        match ApproxApsp::dist(self, u, v) {
            Dist::Inf => Ok(None),
            Dist::Finite(_) => ApproxApsp::path(self, u, v).map(Some),
        }
    }
}

/// BFS on a maintained spanner.
#[derive(Debug, Clone)]
pub struct SpannerBfs<S> {
    pub spanner: S,
    name: &'static str,
}

impl<S: DynamicSpanner> SpannerBfs<S> {
    pub fn new(spanner: S, name: &'static str) -> Self {
        SpannerBfs { spanner, name }
    }
}

impl<S: DynamicSpanner> DistanceProvider for SpannerBfs<S> {
    fn name(&self) -> &'static str {
        self.name
    }

    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.spanner.apply(ev)
    }

    fn dist(&mut self, u: usize, v: usize) -> Result<Dist> {
        Ok(bfs_dist(self.spanner.subgraph(), u)[v])
    }

    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>> {
        Ok(bfs_path(self.spanner.subgraph(), u, v))
    }
}

/// Combinatorial spanner in rebuild mode, rebuilt only when a query arrives
/// after updates. Answers equal rebuilding after every update, since the
/// construction depends only on the current graph and the fixed seed.
#[derive(Debug, Clone)]
pub struct LazyCombSpanner {
    g: DynamicGraph,
    config: CombSpannerConfig,
    built: Option<CombSpanner>,
    rebuilds: u64,
}

impl LazyCombSpanner {
    pub fn new(g: &DynamicGraph, mut config: CombSpannerConfig) -> Result<Self> {
        config.mode = SpannerMode::Rebuild;
        let built = CombSpanner::new(g, config)?;
        Ok(LazyCombSpanner { g: g.clone(), config, built: Some(built), rebuilds: 1 })
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    /// Current spanner, building it first if updates are pending.
    pub fn spanner(&mut self) -> Result<&CombSpanner> {
        if self.built.is_none() {
            self.built = Some(CombSpanner::new(&self.g, self.config)?);
            self.rebuilds += 1;
        }
        Ok(self.built.as_ref().expect("just built"))
    }
}

impl DistanceProvider for LazyCombSpanner {
    fn name(&self) -> &'static str {
        "spanner-comb"
    }

    fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.g.apply(ev)?;
        self.built = None;
        Ok(())
    }

    fn dist(&mut self, u: usize, v: usize) -> Result<Dist> {
        Ok(bfs_dist(self.spanner()?.subgraph(), u)[v])
    }

    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>> {
        Ok(bfs_path(self.spanner()?.subgraph(), u, v))
    }
}
