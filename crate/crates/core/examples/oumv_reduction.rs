//! Encode an OuMv instance as a fully dynamic distance workload and decode
//! the answers from a spanner's distance estimates.

use dynpaths::gadgets::{gen_oumv_fully, harness_run, OuMvInstance};
use dynpaths::provider::{BfsOracle, LazyCombSpanner};
use dynpaths::spanner::{CombSpannerConfig, SpannerMode};

fn main() -> dynpaths::error::Result<()> {
    let inst = OuMvInstance::random(3, 0.5, 12);
    let gs = gen_oumv_fully(&inst, 0.0, 0)?;
    let g = gs.script.initial_graph()?;
    let exact = harness_run(&gs, &mut BfsOracle::new(&g))?;
    print!("{}", exact.to_csv(false));

    // Beta must dominate the spanner's additive term: k = 1 at eps = 0.5 gives 512.
    let gs = gen_oumv_fully(&inst, 0.5, 512)?;
    let g = gs.script.initial_graph()?;
    let mut sp = LazyCombSpanner::new(&g, CombSpannerConfig::new(0.5, 1, SpannerMode::Rebuild).with_k(1))?;
    let report = harness_run(&gs, &mut sp)?;
    println!(
        "spanner provider on {} vertices: {} phases, {} mismatches, {} rebuilds",
        g.n(),
        report.phases.len(),
        report.mismatches().len(),
        sp.rebuilds()
    );
    Ok(())
}
