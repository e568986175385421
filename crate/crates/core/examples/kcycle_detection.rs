//! Detect directed k-cycles by color coding and layered distance queries.

use dynpaths::gadgets::kcycle::{default_reps, has_k_cycle};
use dynpaths::gadgets::{gen_kcycle, harness_run, KCycleMode};
use dynpaths::graph::DynamicGraph;
use dynpaths::provider::BfsOracle;

fn main() -> dynpaths::error::Result<()> {
    let k = 3;
    let with = DynamicGraph::from_edges(5, true, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])?;
    let without = DynamicGraph::from_edges(5, true, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)])?;
    for (name, g) in [("with triangle", &with), ("acyclic", &without)] {
        for mode in [KCycleMode::Fully { alpha: 0.0, beta: 1 }, KCycleMode::Incremental { beta: 1 }] {
            let gs = gen_kcycle(g, k, mode, default_reps(k), 11)?;
            let g0 = gs.script.initial_graph()?;
            let r = harness_run(&gs, &mut BfsOracle::new(&g0))?;
            println!(
                "{name}, {mode:?}: {} phases, detected {} (brute force {})",
                r.phases.len(),
                r.any_observed(),
                has_k_cycle(g, k)
            );
        }
    }
    Ok(())
}
