//! Maintained products `E M^{-1}` sharing `T` and `N` with an
//! [`InverseState`](crate::inverse::InverseState).
//!
//! The product stores `V = E T`, so `E M^{-1} = V (I + N)`. Around each host
//! reset it must either absorb `N` into `V` before `T` changes, or be rebuilt
//! from the new `T` afterwards. The phase field enforces that order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::inverse::absorb_row;
use crate::polymat::PolyMatrix;
use crate::ring::{Field, WideAcc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResetStrategy {
    /// `V <- V (I + N)` before `T` is reset.
    Absorb,
    /// `V <- E T` after `T` is reset.
    Recompute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Synced(u64),
    Absorbed(u64),
}

/// `V` keeps only rows where `E` has entries; an empty row is zero.
#[derive(Debug, Clone)]
pub struct ProductState {
    n: usize,
    depth: usize,
    e: Vec<BTreeMap<usize, Vec<u64>>>,
    e_nnz: usize,
    non_scalar: usize,
    v: Vec<Vec<u64>>,
    zero: Vec<u64>,
    phase: Phase,
}

fn is_scalar(c: &[u64]) -> bool {
    c[1..].iter().all(|&x| x == 0)
}

impl ProductState {
    pub(crate) fn new(n: usize, depth: usize, epoch: u64) -> Self {
        ProductState {
            n,
            depth,
            e: vec![BTreeMap::new(); n],
            e_nnz: 0,
            non_scalar: 0,
            v: vec![Vec::new(); n],
            zero: vec![0; depth + 1],
            phase: Phase::Synced(epoch),
        }
    }

    /// Entry `(i, j)` of `V = E T`.
    pub fn v_entry(&self, i: usize, j: usize) -> &[u64] {
        let row = &self.v[i];
        if row.is_empty() {
            return &self.zero;
        }
        let s = self.depth + 1;
        &row[j * s..(j + 1) * s]
    }

    pub fn e_nonzeros(&self) -> usize {
        self.e_nnz
    }

    pub fn e_entry(&self, i: usize, j: usize) -> Option<&[u64]> {
        self.e.get(i).and_then(|r| r.get(&j)).map(|v| v.as_slice())
    }

    /// Words held by `V`.
    pub fn stored_words(&self) -> usize {
        self.v.iter().map(Vec::len).sum()
    }

    pub fn is_synced(&self, epoch: u64) -> bool {
        self.phase == Phase::Synced(epoch)
    }

    pub(crate) fn check_synced(&self, epoch: u64) -> Result<()> {
        match self.phase {
            Phase::Synced(e) if e == epoch => Ok(()),
            Phase::Synced(e) => {
                Err(Error::HookOrderViolation(format!("product synced to epoch {e}, host is at epoch {epoch}")))
            }
            Phase::Absorbed(e) => Err(Error::HookOrderViolation(format!(
                "product absorbed N of epoch {e} but the reset was not completed"
            ))),
        }
    }

    /// `acc += c * T[j, :]`.
    fn accumulate(f: &Field, acc: &mut WideAcc, s: usize, cols: usize, c: &[u64], trow: &[u64]) {
        if is_scalar(c) {
            acc.scale(f, c[0], trow);
        } else {
            acc.reserve_terms(f, s);
            for y in 0..cols {
                acc.conv_row_entry(f, y * s, c, &trow[y * s..(y + 1) * s]);
            }
        }
    }

    pub(crate) fn set_e(&mut self, f: &Field, t: &PolyMatrix, i: usize, j: usize, coeffs: &[u64]) {
        let s = self.depth + 1;
        let old = self.e[i].get(&j).cloned().unwrap_or_else(|| vec![0; s]);
        let diff: Vec<u64> = coeffs.iter().zip(&old).map(|(&a, &b)| f.sub(a, b)).collect();
        if self.e[i].contains_key(&j) {
            self.e_nnz -= 1;
            if !is_scalar(&old) {
                self.non_scalar -= 1;
            }
            self.e[i].remove(&j);
        }
        if coeffs.iter().any(|&x| x != 0) {
            self.e_nnz += 1;
            if !is_scalar(coeffs) {
                self.non_scalar += 1;
            }
            self.e[i].insert(j, coeffs.to_vec());
        }
        if self.e[i].is_empty() {
            self.v[i] = Vec::new();
            return;
        }
        if diff.iter().all(|&x| x == 0) {
            return;
        }
        if self.v[i].is_empty() {
            self.v[i] = vec![0; self.n * s];
        }
        let mut acc = WideAcc::new(self.n * s);
        for (slot, &x) in acc.buf.iter_mut().zip(&self.v[i]) {
            *slot = x as u128;
        }
        Self::accumulate(f, &mut acc, s, self.n, &diff, t.row(j));
        acc.write_reduced(f, &mut self.v[i]);
    }

    /// Picks the cheaper way through a reset with `r` nonzero rows of `N`.
    pub fn choose_strategy(&self, r: usize) -> ResetStrategy {
        let s = (self.depth + 1) as u128;
        let n = self.n as u128;
        let conv = s * (s + 1) / 2;
        let e_rows = self.e.iter().filter(|m| !m.is_empty()).count() as u128;
        let absorb = e_rows * r as u128 * n * conv;
        let per = if self.non_scalar == 0 { s } else { conv };
        let recompute = self.e_nnz as u128 * n * per;
        if absorb < recompute {
            ResetStrategy::Absorb
        } else {
            ResetStrategy::Recompute
        }
    }

    /// Hook run after every host update to `A`.
    pub fn on_a_update(&self, epoch: u64) -> Result<()> {
        self.check_synced(epoch)
    }

    /// First half of a reset under [`ResetStrategy::Absorb`]; must run while
    /// the host still holds the `T` and `N` of `epoch`.
    pub fn absorb(&mut self, f: &Field, nmat: &PolyMatrix, rows: &[usize], epoch: u64) -> Result<()> {
        self.check_synced(epoch)?;
        if !rows.is_empty() {
            let mut acc = WideAcc::new(self.n * (self.depth + 1));
            let mut snap = Vec::with_capacity(rows.len());
            for row in self.v.iter_mut().filter(|r| !r.is_empty()) {
                absorb_row(f, row, nmat, rows, &mut acc, &mut snap);
            }
        }
        self.phase = Phase::Absorbed(epoch);
        Ok(())
    }

    /// Second half of an absorbing reset.
    pub fn finish_reset(&mut self, epoch: u64) -> Result<()> {
        match self.phase {
            Phase::Absorbed(e) if e == epoch => {
                self.phase = Phase::Synced(epoch + 1);
                Ok(())
            }
            _ => Err(Error::HookOrderViolation(format!("finish_reset for epoch {epoch} without a preceding absorb"))),
        }
    }

    /// Reset under [`ResetStrategy::Recompute`]; `t_new` is the host's `T`
    /// after it absorbed `N`.
    pub fn recompute(&mut self, f: &Field, t_new: &PolyMatrix, epoch: u64) -> Result<()> {
        self.check_synced(epoch)?;
        let s = self.depth + 1;
        let mut acc = WideAcc::new(self.n * s);
        for i in 0..self.n {
            if self.e[i].is_empty() {
                continue;
            }
            acc.reset();
            for (&j, c) in &self.e[i] {
                Self::accumulate(f, &mut acc, s, self.n, c, t_new.row(j));
            }
            acc.write_reduced(f, &mut self.v[i]);
        }
        self.phase = Phase::Synced(epoch + 1);
        Ok(())
    }
}
