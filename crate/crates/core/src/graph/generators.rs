//! Seeded graph families and random update streams.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DynamicGraph, EdgeEvent};
use crate::rng::rng_for;

pub fn path(n: usize) -> DynamicGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    DynamicGraph::from_edges(n, false, &edges).expect("path edges are simple")
}

pub fn cycle(n: usize) -> DynamicGraph {
    let mut g = path(n);
    if n >= 3 {
        g.insert(n - 1, 0).expect("closing edge is new");
    }
    g
}

/// `rows x cols` grid, vertex `(r, c)` has index `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> DynamicGraph {
    let mut g = DynamicGraph::new(rows * cols, false);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                g.insert(v, v + 1).expect("grid edge");
            }
            if r + 1 < rows {
                g.insert(v, v + cols).expect("grid edge");
            }
        }
    }
    g
}

pub fn star(leaves: usize) -> DynamicGraph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    DynamicGraph::from_edges(leaves + 1, false, &edges).expect("star edges are simple")
}

pub fn complete(n: usize) -> DynamicGraph {
    let mut g = DynamicGraph::new(n, false);
    for u in 0..n {
        for v in u + 1..n {
            g.insert(u, v).expect("clique edge");
        }
    }
    g
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, directed: bool, seed: u64) -> DynamicGraph {
    let mut rng = rng_for(seed, "gnp", n as u64);
    let mut g = DynamicGraph::new(n, directed);
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.gen::<f64>() < p {
                g.insert(u, v).expect("fresh pair");
            }
        }
    }
    g
}

/// Legal fully dynamic stream: each step deletes an existing edge with
/// probability `p_delete` (when any exist), otherwise inserts an absent pair.
pub fn random_updates(g: &DynamicGraph, count: usize, p_delete: f64, seed: u64) -> Vec<EdgeEvent> {
    let mut rng = rng_for(seed, "updates", count as u64);
    let mut g = g.clone();
    let n = g.n();
    let mut out = Vec::with_capacity(count);
    let max_edges = if g.is_directed() { n * n.saturating_sub(1) } else { n * n.saturating_sub(1) / 2 };
    while out.len() < count && n >= 2 {
        let del = g.edge_count() > 0 && (g.edge_count() == max_edges || rng.gen::<f64>() < p_delete);
        let ev = if del {
            let edges = g.edges();
            let &(u, v) = edges.choose(&mut rng).expect("nonempty");
            EdgeEvent::Delete(u, v)
        } else {
            loop {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && !g.has_edge(u, v) {
                    break EdgeEvent::Insert(u, v);
                }
            }
        };
        g.apply(ev).expect("generated event is legal");
        out.push(ev);
    }
    out
}

/// `count` deletions of distinct existing edges, in random order.
pub fn random_deletions(g: &DynamicGraph, count: usize, seed: u64) -> Vec<EdgeEvent> {
    let mut rng = rng_for(seed, "deletions", count as u64);
    let mut edges = g.edges();
    edges.shuffle(&mut rng);
    edges.into_iter().take(count).map(|(u, v)| EdgeEvent::Delete(u, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_have_expected_sizes() {
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(grid(3, 4).edge_count(), 3 * 3 + 2 * 4);
        assert_eq!(star(4).edge_count(), 4);
        assert_eq!(complete(6).edge_count(), 15);
    }

    #[test]
    fn gnp_deterministic() {
        assert_eq!(gnp(30, 0.2, false, 5), gnp(30, 0.2, false, 5));
        assert_ne!(gnp(30, 0.2, false, 5), gnp(30, 0.2, false, 6));
    }

    #[test]
    fn updates_are_legal() {
        let g = gnp(20, 0.2, false, 1);
        let evs = random_updates(&g, 300, 0.5, 9);
        let mut h = g.clone();
        for ev in evs {
            h.apply(ev).unwrap();
        }
    }
}
