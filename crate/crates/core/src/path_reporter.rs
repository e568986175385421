//! Distance, successor and short-path queries for hop distances up to `D`.
//!
//! Successors come from products `E M^{-1}` where `E` is the adjacency with
//! some columns zeroed: for bit `l`, copy `l` keeps only columns whose index
//! has bit `l` set. If exactly one successor survives a column sample, the
//! bits read off the copies spell its index. Samples of `2^w` columns for
//! every `w` make a unique survivor likely whatever the witness count.

use std::cell::Cell;

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::graph::{DynamicGraph, EdgeEvent};
use crate::inverse::{InverseState, ProductId, DEFAULT_KAPPA};
use crate::polymat::edge_value;
use crate::ring::{Field, TruncPoly};
use crate::rng::{derive, rng_for};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathReporterConfig {
    pub depth: usize,
    pub kappa: f64,
    pub seed: u64,
    /// Samples per witness-count exponent; `None` means `3 * ceil(log2 n)`.
    pub reps: Option<usize>,
    pub field: Field,
}

impl PathReporterConfig {
    pub fn new(depth: usize, seed: u64) -> Self {
        PathReporterConfig { depth, kappa: DEFAULT_KAPPA, seed, reps: None, field: Field::default() }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = Some(reps);
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// One column mask with its per-bit product copies.
#[derive(Debug, Clone)]
struct ColumnSet {
    /// `None` keeps every column.
    keep: Option<Vec<bool>>,
    bits: Vec<ProductId>,
}

impl ColumnSet {
    fn keeps(&self, j: usize) -> bool {
        self.keep.as_ref().is_none_or(|k| k[j])
    }
}

#[derive(Debug, Clone)]
pub struct PathReporter {
    host: InverseState,
    graph: DynamicGraph,
    config: PathReporterConfig,
    bit_count: usize,
    reps: usize,
    sets: Vec<ColumnSet>,
    witness_failures: Cell<u64>,
}

impl PathReporter {
    pub fn new(g: &DynamicGraph, config: PathReporterConfig) -> Result<Self> {
        let n = g.n();
        let f = config.field;
        if config.depth == 0 {
            return Err(Error::ParamDomain("path reporter needs D >= 1".into()));
        }
        let bit_count = ceil_log2(n).max(1);
        let reps = config.reps.unwrap_or(3 * ceil_log2(n).max(1));
        let mut host = InverseState::new(n, config.depth, f, config.kappa)?;
        let mut graph = DynamicGraph::new(n, g.is_directed());
        for (u, v) in g.edges() {
            graph.insert(u, v)?;
            for (i, j) in oriented(&graph, u, v) {
                host.update(i, j, &adj_value(&config, i, j))?;
            }
        }

        let mut masks: Vec<Option<Vec<bool>>> = vec![None];
        for w in 0..ceil_log2(n) {
            for r in 0..reps {
                let idx = ((w as u64) << 32) | r as u64;
                let mut rng = rng_for(config.seed, "pr-columns", idx);
                let mut keep = vec![false; n];
                for c in sample(&mut rng, n, (1usize << w).min(n)) {
                    keep[c] = true;
                }
                masks.push(Some(keep));
            }
        }

        let mut sets = Vec::with_capacity(masks.len());
        for keep in masks {
            let mut bits = Vec::with_capacity(bit_count);
            for l in 0..bit_count {
                let entries: Vec<(usize, usize, TruncPoly)> = graph
                    .edges()
                    .into_iter()
                    .flat_map(|(u, v)| oriented(&graph, u, v))
                    .filter(|&(_, j)| (j >> l) & 1 == 1 && keep.as_ref().is_none_or(|k| k[j]))
                    .map(|(i, j)| (i, j, TruncPoly::constant(f, config.depth, witness_value(&config, i, j))))
                    .collect();
                bits.push(host.register_product(&entries)?);
            }
            sets.push(ColumnSet { keep, bits });
        }
        Ok(PathReporter { host, graph, config, bit_count, reps, sets, witness_failures: Cell::new(0) })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn depth(&self) -> usize {
        self.config.depth
    }

    pub fn config(&self) -> &PathReporterConfig {
        &self.config
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn host(&self) -> &InverseState {
        &self.host
    }

    pub fn host_mut(&mut self) -> &mut InverseState {
        &mut self.host
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn copy_count(&self) -> usize {
        self.sets.len() * self.bit_count
    }

    /// Successor lookups that found no verified candidate so far.
    pub fn witness_failures(&self) -> u64 {
        self.witness_failures.get()
    }

    pub fn insert(&mut self, u: usize, v: usize) -> Result<()> {
        self.apply(EdgeEvent::Insert(u, v))
    }

    pub fn delete(&mut self, u: usize, v: usize) -> Result<()> {
        self.apply(EdgeEvent::Delete(u, v))
    }

    pub fn apply(&mut self, ev: EdgeEvent) -> Result<()> {
        self.graph.apply(ev)?;
        let (u, v) = ev.endpoints();
        for (i, j) in oriented(&self.graph, u, v) {
            let a = adj_value(&self.config, i, j);
            self.host.update(i, j, &if ev.is_insert() { a } else { a.neg() })?;
            let w = if ev.is_insert() { witness_value(&self.config, i, j) } else { 0 };
            for set in &self.sets {
                if !set.keeps(j) {
                    continue;
                }
                for (l, &pid) in set.bits.iter().enumerate() {
                    if (j >> l) & 1 == 1 {
                        self.host.product_set_e_scalar(pid, i, j, w)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Hop distance if it is at most `D`, `None` ("beyond") otherwise.
    pub fn dist(&self, i: usize, j: usize) -> Option<usize> {
        if i == j {
            return Some(0);
        }
        self.host.min_degree_upto(i, j, self.config.depth)
    }

    /// A vertex `s` with edge `(i, s)` and `dist(s, j) = dist(i, j) - 1`.
    pub fn successor(&self, i: usize, j: usize) -> Result<usize> {
        let d = match self.dist(i, j) {
            Some(0) => return Err(Error::ParamDomain(format!("successor of ({i}, {i}) is undefined"))),
            Some(d) => d,
            None => return Err(Error::Disconnected(i, j)),
        };
        if d == 1 {
            return Ok(j);
        }
        let n = self.n();
        for set in &self.sets {
            let mut cand = 0usize;
            for (l, &pid) in set.bits.iter().enumerate() {
                let pre = self.host.product_coeff_prefix(pid, i, j, d - 1)?;
                if pre.iter().position(|&c| c != 0) == Some(d - 1) {
                    cand |= 1 << l;
                }
            }
            if cand < n && self.graph.has_edge(i, cand) && self.dist(cand, j) == Some(d - 1) {
                return Ok(cand);
            }
        }
        self.witness_failures.set(self.witness_failures.get() + 1);
        Err(Error::NoWitnessFound(i, j))
    }

    /// `[i, ..., j]` of exactly `dist(i, j) + 1` vertices.
    pub fn path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        if self.dist(i, j).is_none() {
            return Err(Error::Disconnected(i, j));
        }
        let mut out = vec![i];
        let mut cur = i;
        while cur != j {
            cur = self.successor(cur, j)?;
            out.push(cur);
        }
        Ok(out)
    }

    /// Checks that every copy's `E` equals the current adjacency under its
    /// mask. Intended for tests on small graphs.
    pub fn copies_consistent(&self) -> bool {
        let n = self.n();
        for set in &self.sets {
            for (l, &pid) in set.bits.iter().enumerate() {
                let p = self.host.product(pid);
                let mut count = 0;
                for i in 0..n {
                    for j in 0..n {
                        let want = self.graph.has_edge(i, j) && set.keeps(j) && (j >> l) & 1 == 1;
                        let got = p.e_entry(i, j);
                        match (want, got) {
                            (true, Some(c)) if c[0] == witness_value(&self.config, i, j) => count += 1,
                            (false, None) => {}
                            _ => return false,
                        }
                    }
                }
                if count != p.e_nonzeros() {
                    return false;
                }
            }
        }
        true
    }
}

/// Matrix entries an edge `{u, v}` occupies.
fn oriented(g: &DynamicGraph, u: usize, v: usize) -> Vec<(usize, usize)> {
    if g.is_directed() || u == v {
        vec![(u, v)]
    } else {
        vec![(u, v), (v, u)]
    }
}

fn adj_value(c: &PathReporterConfig, i: usize, j: usize) -> TruncPoly {
    TruncPoly::monomial(c.field, c.depth, 1, edge_value(&c.field, c.seed, i, j))
}

fn witness_value(c: &PathReporterConfig, i: usize, j: usize) -> u64 {
    c.field.nonzero_from_hash(derive(c.seed, "witness-r", ((i as u64) << 32) | j as u64))
}
