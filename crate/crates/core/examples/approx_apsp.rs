//! (1 + eps)-approximate distances over a combinatorial spanner.

use dynpaths::apsp::ApproxApsp;
use dynpaths::graph::bfs_dist;
use dynpaths::graph::generators::path;
use dynpaths::path_reporter::PathReporterConfig;
use dynpaths::spanner::{CombSpanner, CombSpannerConfig, SpannerMode};

fn main() -> dynpaths::error::Result<()> {
    let g = path(120);
    let eps = 1.0;
    let sp = CombSpanner::new(&g, CombSpannerConfig::new(eps / 2.0, 9, SpannerMode::Decremental))?;
    println!("spanner beta = {}", sp.beta());
    // Small explicit depth so the spanner half of the answer is exercised.
    let apsp = ApproxApsp::new(sp, eps, PathReporterConfig::new(6, 2).with_reps(2))?;
    let truth = bfs_dist(&g, 0);
    for t in [3, 30, 119] {
        println!("dist(0, {t}) ~ {} (bfs {})", apsp.dist(0, t), truth[t]);
    }
    println!("path 0 -> 10: {:?}", apsp.path(0, 10)?);
    Ok(())
}
