//! Dynamic Steiner tree with terminal and edge updates.

use dynpaths::graph::generators::grid;
use dynpaths::graph::EdgeEvent;
use dynpaths::steiner::{steiner_opt, SteinerState};

fn main() -> dynpaths::error::Result<()> {
    let g = grid(3, 4);
    let mut st = SteinerState::new(&g, &[0, 11], 1.0, 5)?;
    print!("{}", st.tree().expect("connected").to_text());

    st.add_terminal(3)?;
    st.apply(EdgeEvent::Delete(1, 2))?;
    let tree = st.tree().expect("connected");
    let opt = steiner_opt(st.graph(), st.terminals()).expect("connected");
    println!("terminals {:?}: weight {} (optimum {opt})", st.terminals(), tree.weight());

    // Isolating vertex 0 disconnects the terminals.
    st.apply(EdgeEvent::Delete(0, 1))?;
    if let Err(e) = st.apply(EdgeEvent::Delete(0, 4)) {
        println!("{e}; partition {:?}", st.terminal_partition());
    }
    Ok(())
}
