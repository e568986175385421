//! Exact all-pairs distances: short pairs from the path reporter, long ones
//! stitched through a random hitting set.

use dynpaths::apsp::{ExactApspConfig, HittingSetApsp};
use dynpaths::graph::all_pairs;
use dynpaths::graph::generators::{cycle, random_updates};

fn main() -> dynpaths::error::Result<()> {
    let g0 = cycle(40);
    let mut cfg = ExactApspConfig::new(6, 1);
    cfg.c = 0.5;
    let mut apsp = HittingSetApsp::new(&g0, cfg)?;
    println!("n = 40, D = 6, |H| = {}", apsp.hitting_set().len());

    let mut g = g0.clone();
    for ev in random_updates(&g0, 20, 0.3, 4) {
        g.apply(ev)?;
        apsp.apply(ev)?;
    }
    let exact = all_pairs(&g) == apsp.all_dist();
    println!("all pairs agree with BFS: {exact}");
    println!("dist(0, 20) = {}, path {:?}", apsp.dist(0, 20), apsp.path(0, 20)?);
    Ok(())
}
