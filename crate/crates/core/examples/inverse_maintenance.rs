//! Maintain (I - A)^-1 over truncated polynomials while edges change, and
//! read hop distances off the lowest nonzero coefficient.

use dynpaths::graph::bfs_dist;
use dynpaths::graph::generators::{gnp, random_updates};
use dynpaths::inverse::{InverseState, DEFAULT_KAPPA};
use dynpaths::polymat::encode;
use dynpaths::ring::FieldParams;

fn main() -> dynpaths::error::Result<()> {
    let (n, depth) = (24, 8);
    let g0 = gnp(n, 0.12, true, 5);
    let enc = encode(&g0, FieldParams { rng_seed: 3, ..Default::default() }, depth)?;
    let mut inv = InverseState::from_encoded(&enc, DEFAULT_KAPPA)?;
    println!("n = {n}, depth = {depth}, reset every {} updates", inv.reset_period());

    let mut g = g0.clone();
    for ev in random_updates(&g0, 60, 0.5, 8) {
        let (i, j) = ev.endpoints();
        let val = enc.entry_for(i, j);
        g.apply(ev)?;
        inv.update(i, j, &if ev.is_insert() { val } else { val.neg() })?;
    }

    let truth = bfs_dist(&g, 0);
    for t in 1..6 {
        println!("dist(0, {t}): algebraic {:?}, bfs {}", inv.min_degree_upto(0, t, depth), truth[t]);
    }
    let st = inv.stats();
    println!("det(I - A) constant term {}, resets so far {}", inv.det().coeff(0), st.resets);
    Ok(())
}
