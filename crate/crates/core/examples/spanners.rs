//! The two dynamic spanners side by side, with a stretch audit after the run.

use dynpaths::graph::generators::{gnp, random_deletions, random_updates};
use dynpaths::spanner::{
    audit, AlgSpanner, AlgSpannerConfig, CombSpanner, CombSpannerConfig, DynamicSpanner, SpannerMode,
};

fn main() -> dynpaths::error::Result<()> {
    let g = gnp(96, 0.12, false, 1);

    let mut comb = CombSpanner::new(&g, CombSpannerConfig::new(1.0, 7, SpannerMode::Decremental).with_k(2))?;
    for ev in random_deletions(&g, 150, 3) {
        comb.apply(ev)?;
    }
    println!(
        "combinatorial: {} of {} edges, {} active, audit {:?}",
        comb.subgraph().edge_count(),
        comb.graph().edge_count(),
        comb.active_count(),
        audit(comb.graph(), comb.subgraph(), comb.stretch())
    );

    let mut cfg = AlgSpannerConfig::new(1.0, 0.5, 7);
    cfg.k = Some(2);
    cfg.b = Some(5);
    cfg.reps = Some(2);
    let mut alg = AlgSpanner::new(&g, cfg)?;
    for ev in random_updates(&g, 40, 0.5, 5) {
        alg.apply(ev)?;
    }
    let st = alg.stretch();
    println!(
        "algebraic: {} of {} edges, stretch ({}, {}), stats {:?}",
        alg.subgraph().edge_count(),
        alg.graph().edge_count(),
        st.mult,
        st.additive,
        alg.stats()
    );
    println!("audit {:?}", audit(alg.graph(), alg.subgraph(), st));
    Ok(())
}
