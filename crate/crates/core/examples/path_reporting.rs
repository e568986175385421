//! Shortest paths of up to D hops, recovered one successor at a time from
//! witness products.

use dynpaths::graph::generators::grid;
use dynpaths::graph::{path_is_valid, EdgeEvent};
use dynpaths::path_reporter::{PathReporter, PathReporterConfig};

fn main() -> dynpaths::error::Result<()> {
    let mut g = grid(4, 4);
    let mut pr = PathReporter::new(&g, PathReporterConfig::new(8, 42))?;
    println!("{} product copies", pr.copy_count());

    println!("0 -> 15: {:?}", pr.path(0, 15)?);
    // Cut the first row so the path has to go around.
    for ev in [EdgeEvent::Delete(1, 2), EdgeEvent::Delete(5, 6)] {
        g.apply(ev)?;
        pr.apply(ev)?;
    }
    let p = pr.path(0, 3)?;
    println!("0 -> 3 after cuts: {p:?} (valid: {})", path_is_valid(&g, &p, 0, 3));
    println!("dist(0, 3) = {:?}, witness failures {}", pr.dist(0, 3), pr.witness_failures());
    Ok(())
}
