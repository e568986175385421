//! OuMv gadgets: bipartite `A x B` copies of the matrix, wired per phase to
//! the query vectors so that a short `source -> target` distance means
//! `u^T M v = 1`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gadgets::GadgetScript;
use crate::graph::script::{ScriptEvent, UpdateScript};
use crate::rng::rng_for;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuMvInstance {
    pub m: Vec<Vec<bool>>,
    pub pairs: Vec<(Vec<bool>, Vec<bool>)>,
}

impl OuMvInstance {
    pub fn new(m: Vec<Vec<bool>>, pairs: Vec<(Vec<bool>, Vec<bool>)>) -> Result<Self> {
        let n = m.len();
        let square = m.iter().all(|r| r.len() == n);
        let vectors = pairs.iter().all(|(u, v)| u.len() == n && v.len() == n);
        if n == 0 || !square || !vectors {
            return Err(Error::DimMismatch("OuMv matrix must be n x n with length-n vectors".into()));
        }
        Ok(OuMvInstance { m, pairs })
    }

    /// Random instance with `n` phases and entry density `p`.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = rng_for(seed, "oumv-instance", n as u64);
        let mut bits = |len: usize| (0..len).map(|_| rng.gen_bool(p)).collect::<Vec<bool>>();
        let m = (0..n).map(|_| bits(n)).collect();
        let pairs = (0..n).map(|_| (bits(n), bits(n))).collect();
        OuMvInstance { m, pairs }
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    /// `u^T M v` for phase `i` (0-based).
    pub fn bit(&self, i: usize) -> bool {
        let (u, v) = &self.pairs[i];
        (0..self.n()).any(|j| u[j] && (0..self.n()).any(|k| self.m[j][k] && v[k]))
    }
}

/// `ceil(beta / (2 - 3 alpha)) + 1`.
pub fn fully_copies(alpha: f64, beta: u64) -> Result<usize> {
    if !(0.0..2.0 / 3.0).contains(&alpha) {
        return Err(Error::ParamDomain(format!("alpha {alpha} outside [0, 2/3)")));
    }
    Ok((beta as f64 / (2.0 - 3.0 * alpha) - 1e-9).ceil().max(0.0) as usize + 1)
}

/// `4(beta+1) + (beta+2)(2n-2i) + 2(i-1)` for 1-based `i`.
pub fn partial_threshold(n: usize, beta: u64, i: usize) -> u64 {
    let (n, i) = (n as u64, i as u64);
    4 * (beta + 1) + (beta + 2) * (2 * n - 2 * i) + 2 * (i - 1)
}

/// Vertex numbering for `copies` bipartite gadgets laid out back to back.
struct Copies {
    n: usize,
}

impl Copies {
    fn a(&self, copy: usize, k: usize) -> usize {
        copy * 2 * self.n + k
    }

    fn b(&self, copy: usize, k: usize) -> usize {
        copy * 2 * self.n + self.n + k
    }

    fn edges(&self, inst: &OuMvInstance, copies: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for c in 0..copies {
            for j in 0..self.n {
                for k in 0..self.n {
                    if inst.m[j][k] {
                        out.push((self.a(c, j), self.b(c, k)));
                    }
                }
            }
        }
        out
    }
}

/// Fully dynamic gadget: `c` copies and hubs `w_0..w_c`; each phase wires
/// `w_(j-1)` to the `u`-side and `w_j` to the `v`-side of copy `j`, queries
/// `(w_0, w_c)` against `5c`, then removes its edges.
pub fn gen_oumv_fully(inst: &OuMvInstance, alpha: f64, beta: u64) -> Result<GadgetScript> {
    let c = fully_copies(alpha, beta)?;
    let n = inst.n();
    let lay = Copies { n };
    let w = |l: usize| 2 * n * c + l;
    let mut script = UpdateScript::new(2 * n * c + c + 1, false);
    script.initial_edges = lay.edges(inst, c);
    script.annotations.push(format!("gadget oumv-fully n={n} alpha={alpha} beta={beta} c={c}"));
    let mut gs = GadgetScript::new(script);
    for (i, (u, v)) in inst.pairs.iter().enumerate() {
        let mut added = Vec::new();
        for j in 1..=c {
            for k in (0..n).filter(|&k| u[k]) {
                added.push((w(j - 1), lay.a(j - 1, k)));
            }
            for k in (0..n).filter(|&k| v[k]) {
                added.push((w(j), lay.b(j - 1, k)));
            }
        }
        for &(x, y) in &added {
            gs.script.push(ScriptEvent::Insert(x, y));
        }
        gs.phase(i + 1, w(0), w(c), 5 * c as u64, inst.bit(i));
        for &(x, y) in &added {
            gs.script.push(ScriptEvent::Delete(x, y));
        }
    }
    Ok(gs)
}

type Edges = Vec<(usize, usize)>;

/// Layout shared by the partially dynamic gadgets: `beta + 1` copies and
/// `beta + 2` paths `z_1 .. z_n = y_n .. y_1`.
struct Partial {
    lay: Copies,
    copies: usize,
}

impl Partial {
    fn path_base(&self, p: usize) -> usize {
        2 * self.lay.n * self.copies + p * (2 * self.lay.n - 1)
    }

    fn z(&self, p: usize, i: usize) -> usize {
        self.path_base(p) + i - 1
    }

    fn y(&self, p: usize, i: usize) -> usize {
        self.path_base(p) + 2 * self.lay.n - 1 - i
    }

    fn vertex_count(&self) -> usize {
        self.path_base(self.copies + 1)
    }

    fn static_edges(&self, inst: &OuMvInstance) -> Vec<(usize, usize)> {
        let mut out = self.lay.edges(inst, self.copies);
        for p in 0..=self.copies {
            let base = self.path_base(p);
            for x in 0..2 * self.lay.n - 2 {
                out.push((base + x, base + x + 1));
            }
        }
        out
    }

    /// Attachment edges at index `i` for copy `j` (1-based), split by whether
    /// the vector entry is set.
    fn attachments(&self, i: usize, j: usize, u: &[bool], v: &[bool]) -> (Edges, Edges) {
        let (mut on, mut off) = (Vec::new(), Vec::new());
        for k in 0..self.lay.n {
            let e = (self.y(j - 1, i), self.lay.a(j - 1, k));
            if u[k] {
                on.push(e)
            } else {
                off.push(e)
            }
            let e = (self.z(j, i), self.lay.b(j - 1, k));
            if v[k] {
                on.push(e)
            } else {
                off.push(e)
            }
        }
        (on, off)
    }
}

fn partial_layout(inst: &OuMvInstance, beta: u64) -> Partial {
    Partial { lay: Copies { n: inst.n() }, copies: beta as usize + 1 }
}

/// Incremental gadget: phase `i` attaches `y_i` / `z_i` to the vector sides of
/// every copy and queries `(z_1 in P_0, y_1 in P_(beta+1))`.
pub fn gen_oumv_incremental(inst: &OuMvInstance, beta: u64) -> Result<GadgetScript> {
    let pl = partial_layout(inst, beta);
    let n = inst.n();
    let mut script = UpdateScript::new(pl.vertex_count(), false);
    script.initial_edges = pl.static_edges(inst);
    script.annotations.push(format!("gadget oumv-incremental n={n} beta={beta}"));
    let mut gs = GadgetScript::new(script);
    let (src, dst) = (pl.z(0, 1), pl.y(pl.copies, 1));
    for (idx, (u, v)) in inst.pairs.iter().enumerate() {
        let i = idx + 1;
        for j in 1..=pl.copies {
            for (x, y) in pl.attachments(i, j, u, v).0 {
                gs.script.push(ScriptEvent::Insert(x, y));
            }
        }
        gs.phase(i, src, dst, partial_threshold(n, beta, i), inst.bit(idx));
    }
    Ok(gs)
}

/// Decremental gadget: starts with every attachment; phase `i` works at index
/// `n - i + 1`, deleting the zero-entry attachments, querying, then deleting
/// the rest.
pub fn gen_oumv_decremental(inst: &OuMvInstance, beta: u64) -> Result<GadgetScript> {
    let pl = partial_layout(inst, beta);
    let n = inst.n();
    if inst.pairs.len() > n {
        return Err(Error::ParamDomain("decremental gadget supports at most n phases".into()));
    }
    let all = vec![true; n];
    let mut script = UpdateScript::new(pl.vertex_count(), false);
    script.initial_edges = pl.static_edges(inst);
    for i in 1..=n {
        for j in 1..=pl.copies {
            script.initial_edges.extend(pl.attachments(i, j, &all, &all).0);
        }
    }
    script.annotations.push(format!("gadget oumv-decremental n={n} beta={beta}"));
    let mut gs = GadgetScript::new(script);
    let (src, dst) = (pl.z(0, 1), pl.y(pl.copies, 1));
    for (idx, (u, v)) in inst.pairs.iter().enumerate() {
        let i = idx + 1;
        let at = n - i + 1;
        let mut keep = Vec::new();
        for j in 1..=pl.copies {
            let (on, off) = pl.attachments(at, j, u, v);
            for (x, y) in off {
                gs.script.push(ScriptEvent::Delete(x, y));
            }
            keep.extend(on);
        }
        gs.phase(i, src, dst, partial_threshold(n, beta, at), inst.bit(idx));
        for (x, y) in keep {
            gs.script.push(ScriptEvent::Delete(x, y));
        }
    }
    Ok(gs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::harness_run;
    use crate::graph::Dist;
    use crate::provider::{BfsOracle, NeverReachable};

    fn identity2(u: [bool; 2], v: [bool; 2]) -> OuMvInstance {
        OuMvInstance::new(vec![vec![true, false], vec![false, true]], vec![(u.to_vec(), v.to_vec())]).unwrap()
    }

    fn replay(gs: &GadgetScript) -> crate::gadgets::HarnessReport {
        let g = gs.script.validate().and_then(|_| gs.script.initial_graph()).unwrap();
        harness_run(gs, &mut BfsOracle::new(&g)).unwrap()
    }

    #[test]
    fn identity_examples() {
        let gs = gen_oumv_fully(&identity2([true, false], [true, false]), 0.0, 0).unwrap();
        let r = replay(&gs);
        assert_eq!(r.phases[0].distance, Dist::Finite(3));
        assert!(r.phases[0].observed);
        let gs = gen_oumv_fully(&identity2([true, false], [false, true]), 0.0, 0).unwrap();
        let r = replay(&gs);
        assert!(r.phases[0].distance >= Dist::Finite(5));
        assert!(!r.phases[0].observed);
    }

    #[test]
    fn zero_matrix_gives_zero_bits() {
        let inst = OuMvInstance::new(vec![vec![false; 3]; 3], vec![(vec![true; 3], vec![true; 3]); 3]).unwrap();
        for gs in [
            gen_oumv_fully(&inst, 0.2, 3).unwrap(),
            gen_oumv_incremental(&inst, 1).unwrap(),
            gen_oumv_decremental(&inst, 1).unwrap(),
        ] {
            assert!(gs.expected_bits.values().all(|&b| !b));
            assert!(replay(&gs).mismatches().is_empty());
        }
    }

    #[test]
    fn fully_phases_restore_the_graph() {
        let inst = OuMvInstance::random(5, 0.4, 2);
        let gs = gen_oumv_fully(&inst, 0.3, 2).unwrap();
        let mut g = gs.script.initial_graph().unwrap();
        let start = g.fingerprint();
        for ev in &gs.script.events {
            if let Some(e) = ev.edge_event() {
                g.apply(e).unwrap();
            }
        }
        assert_eq!(g.fingerprint(), start);
        assert_eq!(fully_copies(0.3, 2).unwrap(), 3);
        assert_eq!(fully_copies(0.5, 512).unwrap(), 1025);
        assert!(fully_copies(0.7, 1).is_err());
    }

    #[test]
    fn partial_identity_example() {
        let m = vec![vec![true, false], vec![false, true]];
        let pairs = vec![(vec![true, false], vec![true, false]), (vec![false, true], vec![false, true])];
        let inst = OuMvInstance::new(m, pairs).unwrap();
        let inc = gen_oumv_incremental(&inst, 0).unwrap();
        let r = replay(&inc);
        assert_eq!(r.phases.iter().map(|p| p.observed).collect::<Vec<_>>(), vec![true, true]);
        for p in &r.phases {
            assert_eq!(p.distance, Dist::Finite(p.threshold as u32 - 1));
        }
        assert_eq!(
            inc.thresholds.values().copied().collect::<Vec<_>>(),
            vec![partial_threshold(2, 0, 1), partial_threshold(2, 0, 2)]
        );
        let dec = gen_oumv_decremental(&inst, 0).unwrap();
        let r = replay(&dec);
        assert_eq!(r.phases.iter().map(|p| p.observed).collect::<Vec<_>>(), vec![true, true]);
        assert!(dec.script.events.iter().all(|e| !matches!(e, ScriptEvent::Insert(..))));
        assert!(inc.script.events.iter().all(|e| !matches!(e, ScriptEvent::Delete(..))));
    }

    #[test]
    fn random_instances_replay_cleanly() {
        for seed in 0..8 {
            let inst = OuMvInstance::random(4 + seed as usize % 3, 0.35, seed);
            for gs in [
                gen_oumv_fully(&inst, 0.1, seed % 3).unwrap(),
                gen_oumv_incremental(&inst, seed % 3).unwrap(),
                gen_oumv_decremental(&inst, seed % 3).unwrap(),
            ] {
                assert!(replay(&gs).mismatches().is_empty());
            }
        }
    }

    #[test]
    fn never_provider_misses_exactly_the_ones() {
        let inst = OuMvInstance::random(6, 0.4, 11);
        let gs = gen_oumv_fully(&inst, 0.0, 1).unwrap();
        let r = harness_run(&gs, &mut NeverReachable).unwrap();
        let ones = gs.expected_bits.values().filter(|&&b| b).count();
        assert_eq!(r.mismatches().len(), ones);
        assert!(!r.any_observed());
    }

    #[test]
    fn script_text_round_trip() {
        let inst = OuMvInstance::random(3, 0.5, 1);
        let gs = gen_oumv_incremental(&inst, 1).unwrap();
        let back = GadgetScript::from_script(UpdateScript::parse(&gs.script.to_text()).unwrap()).unwrap();
        assert_eq!(back, gs);
    }
}
