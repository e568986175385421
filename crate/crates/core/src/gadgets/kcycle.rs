//! k-cycle detection gadgets. Each repetition colors the input with `1..k`
//! and builds a layered undirected graph where `x_i` in the first layer is at
//! distance `k` from its copy in the last layer iff a colorful cycle passes
//! through `x_i`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gadgets::GadgetScript;
use crate::graph::script::{ScriptEvent, UpdateScript};
use crate::graph::DynamicGraph;
use crate::rng::rng_for;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KCycleMode {
    Fully { alpha: f64, beta: u64 },
    Incremental { beta: u64 },
    Decremental { beta: u64 },
}

/// `3 k^(k-1)` colorings.
pub fn default_reps(k: usize) -> usize {
    3 * k.pow(k as u32 - 1)
}

pub fn coloring(n: usize, k: usize, seed: u64, rep: usize) -> Vec<usize> {
    let mut rng = rng_for(seed, "kcycle-color", rep as u64);
    (0..n).map(|_| rng.gen_range(1..=k)).collect()
}

/// Is there a cycle `x -> c2 -> ... -> ck -> x` with colors `1, 2, .., k` in order?
pub fn colorful_through(g: &DynamicGraph, color: &[usize], k: usize, x: usize) -> bool {
    if color[x] != 1 {
        return false;
    }
    let mut layer = vec![x];
    for t in 2..=k {
        let mut next = vec![false; g.n()];
        for &a in &layer {
            for b in g.out_neighbors(a).filter(|&b| color[b] == t) {
                next[b] = true;
            }
        }
        layer = (0..g.n()).filter(|&b| next[b]).collect();
    }
    layer.iter().any(|&a| g.has_edge(a, x))
}

/// Exhaustive search for a directed simple cycle of length exactly `k`.
pub fn has_k_cycle(g: &DynamicGraph, k: usize) -> bool {
    fn extend(g: &DynamicGraph, k: usize, path: &mut Vec<usize>, on: &mut [bool]) -> bool {
        let (start, last) = (path[0], *path.last().unwrap());
        if path.len() == k {
            return g.has_edge(last, start);
        }
        for y in g.out_neighbors(last).collect::<Vec<_>>() {
            // Only cycles whose smallest vertex is the start.
            if y > start && !on[y] {
                on[y] = true;
                path.push(y);
                if extend(g, k, path, on) {
                    return true;
                }
                path.pop();
                on[y] = false;
            }
        }
        false
    }
    let mut on = vec![false; g.n()];
    (0..g.n()).any(|s| {
        on[s] = true;
        let found = extend(g, k, &mut vec![s], &mut on);
        on[s] = false;
        found
    })
}

/// One colored copy layout: layer positions for every vertex, plus the
/// extra last layer holding the color-1 vertices again.
struct Layered {
    pos: Vec<usize>,
    tail: Vec<usize>,
    ones: Vec<usize>,
    size: usize,
    edges: Vec<(usize, usize)>,
}

impl Layered {
    fn new(g: &DynamicGraph, color: &[usize], k: usize) -> Self {
        let n = g.n();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (color[v], v));
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let ones: Vec<usize> = order.iter().copied().filter(|&v| color[v] == 1).collect();
        let mut tail = vec![usize::MAX; n];
        for (r, &v) in ones.iter().enumerate() {
            tail[v] = n + r;
        }
        let mut edges = Vec::new();
        for (a, b) in g.edges() {
            let (ca, cb) = (color[a], color[b]);
            if cb == ca + 1 {
                edges.push((pos[a], pos[b]));
            } else if ca == k && cb == 1 {
                edges.push((pos[a], tail[b]));
            }
        }
        Layered { pos, tail, size: n + ones.len(), ones, edges }
    }
}

/// Builds the gadget script for `g` (directed). Phases are numbered across
/// all repetitions; a phase bit is the colorful-cycle answer for its vertex.
pub fn gen_kcycle(g: &DynamicGraph, k: usize, mode: KCycleMode, reps: usize, seed: u64) -> Result<GadgetScript> {
    if !g.is_directed() {
        return Err(Error::ParamDomain("k-cycle input must be directed".into()));
    }
    if k < 3 {
        return Err(Error::ParamDomain(format!("k = {k} must be at least 3")));
    }
    let mut blocks = Vec::new();
    for rep in 0..reps {
        let color = coloring(g.n(), k, seed, rep);
        blocks.push((Layered::new(g, &color, k), color));
    }
    let copies = match mode {
        KCycleMode::Fully { alpha, beta } => {
            if !(0.0..2.0 / k as f64).contains(&alpha) {
                return Err(Error::ParamDomain(format!("alpha {alpha} outside [0, 2/k)")));
            }
            (beta as f64 / (2.0 - k as f64 * alpha) - 1e-9).ceil().max(0.0) as usize + 1
        }
        KCycleMode::Incremental { beta } | KCycleMode::Decremental { beta } => beta as usize + 1,
    };
    let path_len = |l: &Layered| if l.ones.is_empty() { 0 } else { 2 * l.ones.len() - 1 };
    let block_size = |l: &Layered| match mode {
        KCycleMode::Fully { .. } => copies * l.size,
        _ => copies * l.size + (copies + 1) * path_len(l),
    };
    let total: usize = blocks.iter().map(|(l, _)| block_size(l)).sum();
    let mut script = UpdateScript::new(total, false);
    script.annotations.push(format!("gadget kcycle k={k} mode={mode:?} reps={reps} seed={seed}"));
    let mut gs = GadgetScript::new(script);
    let mut base = 0;
    let mut phase = 0;
    for (l, color) in &blocks {
        let copy = |j: usize, local: usize| base + j * l.size + local;
        for j in 0..copies {
            for &(a, b) in &l.edges {
                gs.script.initial_edges.push((copy(j, a), copy(j, b)));
            }
        }
        let bits: Vec<bool> = l.ones.iter().map(|&x| colorful_through(g, color, k, x)).collect();
        let n1 = l.ones.len();
        match mode {
            KCycleMode::Fully { .. } => {
                let threshold = ((k + 2) * copies - 1) as u64;
                for (r, &x) in l.ones.iter().enumerate() {
                    let links: Vec<_> = (0..copies - 1).map(|j| (copy(j, l.tail[x]), copy(j + 1, l.pos[x]))).collect();
                    for &(a, b) in &links {
                        gs.script.push(ScriptEvent::Insert(a, b));
                    }
                    phase += 1;
                    gs.phase(phase, copy(0, l.pos[x]), copy(copies - 1, l.tail[x]), threshold, bits[r]);
                    for &(a, b) in &links {
                        gs.script.push(ScriptEvent::Delete(a, b));
                    }
                }
            }
            KCycleMode::Incremental { beta } | KCycleMode::Decremental { beta } => {
                let pbase = |p: usize| base + copies * l.size + p * path_len(l);
                for p in 0..=copies {
                    for x in 0..path_len(l).saturating_sub(1) {
                        gs.script.initial_edges.push((pbase(p) + x, pbase(p) + x + 1));
                    }
                }
                let z = |p: usize, i: usize| pbase(p) + i - 1;
                let y = |p: usize, i: usize| pbase(p) + 2 * n1 - 1 - i;
                let attach = |i: usize| -> Vec<(usize, usize)> {
                    let x = l.ones[i - 1];
                    (1..=copies)
                        .flat_map(|j| [(y(j - 1, i), copy(j - 1, l.pos[x])), (z(j, i), copy(j - 1, l.tail[x]))])
                        .collect()
                };
                let threshold = |i: usize| {
                    let (b, n1, i, k) = (beta, n1 as u64, i as u64, k as u64);
                    (k + 3) * (b + 1) + (b + 2) * (2 * n1 - 2 * i) + 2 * (i - 1)
                };
                let (src, dst) = if n1 > 0 { (z(0, 1), y(copies, 1)) } else { (0, 0) };
                if matches!(mode, KCycleMode::Incremental { .. }) {
                    for i in 1..=n1 {
                        for (a, b) in attach(i) {
                            gs.script.push(ScriptEvent::Insert(a, b));
                        }
                        phase += 1;
                        gs.phase(phase, src, dst, threshold(i), bits[i - 1]);
                    }
                } else {
                    for i in 1..=n1 {
                        gs.script.initial_edges.extend(attach(i));
                    }
                    for i in (1..=n1).rev() {
                        phase += 1;
                        gs.phase(phase, src, dst, threshold(i), bits[i - 1]);
                        for (a, b) in attach(i) {
                            gs.script.push(ScriptEvent::Delete(a, b));
                        }
                    }
                }
            }
        }
        base += block_size(l);
    }
    Ok(gs)
}
