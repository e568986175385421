//! Dynamic inverse of `M = I - A` kept as `M^{-1} = T (I + N)` with `N`
//! row-sparse between periodic resets, plus the determinant, `H x H`
//! submatrix views and registered `E M^{-1}` products.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::polymat::{EncodedAdjacency, PolyMatrix};
use crate::product::{ProductState, ResetStrategy};
use crate::ring::{conv_into, Field, TruncPoly, WideAcc};

pub const DEFAULT_KAPPA: f64 = 0.529;

pub fn reset_period(n: usize, kappa: f64) -> usize {
    ((n as f64).powf(kappa).round() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ViewId(usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductId(pub(crate) usize);

/// Cached `M^{-1}` restricted to `H x H`.
#[derive(Debug, Clone)]
pub struct SubmatrixView {
    h: Vec<usize>,
    pos: BTreeMap<usize, usize>,
    cached: PolyMatrix,
}

impl SubmatrixView {
    pub fn members(&self) -> &[usize] {
        &self.h
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.pos.get(&v).copied()
    }

    /// Entry by position in `members()`.
    pub fn get(&self, a: usize, b: usize) -> TruncPoly {
        self.cached.get(a, b)
    }

    pub fn min_degree(&self, a: usize, b: usize) -> Option<usize> {
        self.cached.entry(a, b).iter().position(|&c| c != 0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InverseStats {
    pub updates: u64,
    pub resets: u64,
}

#[derive(Debug, Clone)]
pub struct InverseState {
    n: usize,
    depth: usize,
    field: Field,
    kappa: f64,
    reset_period: usize,
    t: PolyMatrix,
    nmat: PolyMatrix,
    nrows: Vec<usize>,
    in_nrows: Vec<bool>,
    det: TruncPoly,
    updates_since_reset: usize,
    epoch: u64,
    adjacency: BTreeMap<(usize, usize), TruncPoly>,
    views: Vec<SubmatrixView>,
    products: Vec<ProductState>,
    forced_strategy: Option<ResetStrategy>,
    stats: InverseStats,
}

/// `row <- row (I + N)` for one flat row of `cols` entries, `N` nonzero only
/// on `rows`. Returns false when the row had nothing to absorb.
pub(crate) fn absorb_row(
    f: &Field,
    row: &mut [u64],
    nmat: &PolyMatrix,
    rows: &[usize],
    acc: &mut WideAcc,
    snap: &mut Vec<(usize, Vec<u64>)>,
) -> bool {
    let s = nmat.stride();
    snap.clear();
    for &r in rows {
        let e = &row[r * s..(r + 1) * s];
        if e.iter().any(|&c| c != 0) {
            snap.push((r, e.to_vec()));
        }
    }
    if snap.is_empty() {
        return false;
    }
    acc.reset();
    for (slot, &c) in acc.buf.iter_mut().zip(row.iter()) {
        *slot = c as u128;
    }
    for (r, coef) in snap.iter() {
        acc.reserve_terms(f, s);
        let nrow = nmat.row(*r);
        for y in 0..nmat.cols() {
            acc.conv_row_entry(f, y * s, coef, &nrow[y * s..(y + 1) * s]);
        }
    }
    acc.write_reduced(f, row);
    true
}

/// `m <- m (I + N)` where `N` is nonzero only on `rows`.
pub(crate) fn absorb_lazy(f: &Field, m: &mut PolyMatrix, nmat: &PolyMatrix, rows: &[usize]) {
    if rows.is_empty() {
        return;
    }
    let mut acc = WideAcc::new(m.cols() * m.stride());
    let mut snap = Vec::with_capacity(rows.len());
    for x in 0..m.rows() {
        absorb_row(f, m.row_mut(x), nmat, rows, &mut acc, &mut snap);
    }
}

impl InverseState {
    /// Inverse of the empty graph: `T = I`, `N = 0`, `det = 1`.
    pub fn new(n: usize, depth: usize, field: Field, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::ParamDomain(format!("kappa {kappa} outside (0, 1]")));
        }
        Ok(InverseState {
            n,
            depth,
            field,
            kappa,
            reset_period: reset_period(n, kappa),
            t: PolyMatrix::identity(field, depth, n),
            nmat: PolyMatrix::zeros(field, depth, n, n),
            nrows: Vec::new(),
            in_nrows: vec![false; n],
            det: TruncPoly::one(field, depth),
            updates_since_reset: 0,
            epoch: 0,
            adjacency: BTreeMap::new(),
            views: Vec::new(),
            products: Vec::new(),
            forced_strategy: None,
            stats: InverseStats::default(),
        })
    }

    /// Builds from an encoded adjacency by inserting its entries one at a
    /// time, so the determinant is carried by the update formula.
    pub fn from_encoded(enc: &EncodedAdjacency, kappa: f64) -> Result<Self> {
        let mut s = InverseState::new(enc.n(), enc.depth(), enc.field(), kappa)?;
        for (i, j) in enc.nonzero_entries() {
            s.update(i, j, &enc.matrix.get(i, j))?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn reset_period(&self) -> usize {
        self.reset_period
    }

    pub fn updates_since_reset(&self) -> usize {
        self.updates_since_reset
    }

    pub fn nonzero_rows(&self) -> &[usize] {
        &self.nrows
    }

    pub fn det(&self) -> &TruncPoly {
        &self.det
    }

    pub fn t(&self) -> &PolyMatrix {
        &self.t
    }

    pub fn n_matrix(&self) -> &PolyMatrix {
        &self.nmat
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn stats(&self) -> InverseStats {
        self.stats
    }

    /// Current `A` as a dense matrix.
    pub fn adjacency(&self) -> PolyMatrix {
        let mut a = PolyMatrix::zeros(self.field, self.depth, self.n, self.n);
        for (&(i, j), v) in &self.adjacency {
            a.set(i, j, v).expect("mirror entries share parameters");
        }
        a
    }

    /// Dense `T (I + N)`.
    pub fn reconstruct(&self) -> PolyMatrix {
        let mut m = self.t.clone();
        absorb_lazy(&self.field, &mut m, &self.nmat, &self.nrows);
        m
    }

    fn check_poly(&self, v: &TruncPoly) -> Result<()> {
        if v.field() != self.field || v.depth() != self.depth {
            return Err(Error::ParamMismatch);
        }
        Ok(())
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::DimMismatch(format!("entry ({i}, {j}) outside {}x{}", self.n, self.n)));
        }
        Ok(())
    }

    /// Row `j` of `M^{-1}` as flat coefficients.
    fn inverse_row(&self, j: usize) -> Vec<u64> {
        let s = self.depth + 1;
        let mut acc = WideAcc::new(self.n * s);
        for (slot, &c) in acc.buf.iter_mut().zip(self.t.row(j)) {
            *slot = c as u128;
        }
        for &r in &self.nrows {
            let coef = self.t.entry(j, r);
            if coef.iter().all(|&c| c == 0) {
                continue;
            }
            acc.reserve_terms(&self.field, s);
            let nrow = self.nmat.row(r);
            for y in 0..self.n {
                acc.conv_row_entry(&self.field, y * s, coef, &nrow[y * s..(y + 1) * s]);
            }
        }
        let mut out = vec![0; self.n * s];
        acc.write_reduced(&self.field, &mut out);
        out
    }

    /// Applies `A_ij += delta`. Callers pass the change to `A`; the sign flip
    /// for `M = I - A` happens here.
    pub fn update(&mut self, i: usize, j: usize, delta: &TruncPoly) -> Result<()> {
        self.check_index(i, j)?;
        self.check_poly(delta)?;
        let f = self.field;
        let s = self.depth + 1;
        let n = self.n;
        let v = delta.neg();

        // b = v * (row j of M^{-1})
        let row = self.inverse_row(j);
        let mut b = vec![0u64; n * s];
        let mut tmp = vec![0u128; s];
        for y in 0..n {
            tmp.iter_mut().for_each(|x| *x = 0);
            conv_into(&f, &mut tmp, v.coeffs(), &row[y * s..(y + 1) * s]);
            for (o, &x) in b[y * s..(y + 1) * s].iter_mut().zip(&tmp) {
                *o = f.reduce(x);
            }
        }
        let mut pivot = b[i * s..(i + 1) * s].to_vec();
        pivot[0] = f.add(pivot[0], 1);
        let pivot = TruncPoly::from_raw(f, pivot);
        let pinv = pivot.inv().map_err(|_| Error::NonUnitPivot(i))?;
        // c = -b / (1 + b_i)
        let neg_pinv = pinv.neg();
        let mut c = vec![0u64; n * s];
        for y in 0..n {
            tmp.iter_mut().for_each(|x| *x = 0);
            conv_into(&f, &mut tmp, neg_pinv.coeffs(), &b[y * s..(y + 1) * s]);
            for (o, &x) in c[y * s..(y + 1) * s].iter_mut().zip(&tmp) {
                *o = f.reduce(x);
            }
        }

        // Old column i on each view's H, before N moves.
        let view_cols: Vec<Vec<TruncPoly>> =
            self.views.iter().map(|vw| vw.h.iter().map(|&h| self.query_unchecked(h, i)).collect()).collect();

        // N <- N + (N[:, i] + e_i) c
        let mut targets: Vec<(usize, Vec<u64>)> = Vec::with_capacity(self.nrows.len() + 1);
        for &r in &self.nrows {
            let mut coef = self.nmat.entry(r, i).to_vec();
            if r == i {
                coef[0] = f.add(coef[0], 1);
            }
            targets.push((r, coef));
        }
        if !self.in_nrows[i] {
            let mut coef = vec![0; s];
            coef[0] = 1;
            targets.push((i, coef));
            self.in_nrows[i] = true;
            self.nrows.push(i);
        }
        let mut acc = WideAcc::new(n * s);
        for (r, coef) in targets {
            if coef.iter().all(|&x| x == 0) {
                continue;
            }
            acc.reset();
            for (slot, &x) in acc.buf.iter_mut().zip(self.nmat.row(r)) {
                *slot = x as u128;
            }
            acc.reserve_terms(&f, s);
            for y in 0..n {
                acc.conv_row_entry(&f, y * s, &coef, &c[y * s..(y + 1) * s]);
            }
            acc.write_reduced(&f, self.nmat.row_mut(r));
        }

        self.det = self.det.mul(&pivot)?;

        for (vw, col) in self.views.iter_mut().zip(view_cols) {
            let k = vw.h.len();
            for a in 0..k {
                if col[a].is_zero() {
                    continue;
                }
                for bpos in 0..k {
                    let hb = vw.h[bpos];
                    let cb = &c[hb * s..(hb + 1) * s];
                    tmp.iter_mut().for_each(|x| *x = 0);
                    for (slot, &x) in tmp.iter_mut().zip(vw.cached.entry(a, bpos)) {
                        *slot = x as u128;
                    }
                    conv_into(&f, &mut tmp, col[a].coeffs(), cb);
                    for (o, &x) in vw.cached.entry_mut(a, bpos).iter_mut().zip(&tmp) {
                        *o = f.reduce(x);
                    }
                }
            }
        }

        let e = self.adjacency.entry((i, j)).or_insert_with(|| TruncPoly::zero(f, self.depth));
        *e = e.add(delta)?;
        if e.is_zero() {
            self.adjacency.remove(&(i, j));
        }

        for p in &self.products {
            p.on_a_update(self.epoch)?;
        }
        self.stats.updates += 1;
        self.updates_since_reset += 1;
        if self.updates_since_reset >= self.reset_period {
            self.reset()?;
        }
        Ok(())
    }

    /// `V <- V(I+N)` for absorbing products, then `T <- T(I+N)`, then
    /// recomputing products rebuild `V = E T`, then `N <- 0`.
    fn reset(&mut self) -> Result<()> {
        let rows = self.nrows.clone();
        let f = self.field;
        let plan: Vec<ResetStrategy> = self
            .products
            .iter()
            .map(|p| self.forced_strategy.unwrap_or_else(|| p.choose_strategy(rows.len())))
            .collect();
        for (p, st) in self.products.iter_mut().zip(&plan) {
            if *st == ResetStrategy::Absorb {
                p.absorb(&f, &self.nmat, &rows, self.epoch)?;
            }
        }
        absorb_lazy(&f, &mut self.t, &self.nmat, &rows);
        for (p, st) in self.products.iter_mut().zip(&plan) {
            match st {
                ResetStrategy::Absorb => p.finish_reset(self.epoch)?,
                ResetStrategy::Recompute => p.recompute(&f, &self.t, self.epoch)?,
            }
        }
        for &r in &rows {
            self.nmat.row_mut(r).iter_mut().for_each(|x| *x = 0);
            self.in_nrows[r] = false;
        }
        self.nrows.clear();
        self.updates_since_reset = 0;
        self.epoch += 1;
        self.stats.resets += 1;
        Ok(())
    }

    fn query_unchecked(&self, i: usize, j: usize) -> TruncPoly {
        let s = self.depth + 1;
        let mut acc = vec![0u128; s];
        for (slot, &x) in acc.iter_mut().zip(self.t.entry(i, j)) {
            *slot = x as u128;
        }
        let mut used = 0;
        for &r in &self.nrows {
            let a = self.t.entry(i, r);
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            if used + s.min(crate::ring::LAZY_TERMS) > crate::ring::LAZY_TERMS {
                crate::ring::fold(&self.field, &mut acc);
                used = 0;
            }
            used += s.min(crate::ring::LAZY_TERMS);
            conv_into(&self.field, &mut acc, a, self.nmat.entry(r, j));
        }
        TruncPoly::from_raw(self.field, acc.iter().map(|&x| self.field.reduce(x)).collect())
    }

    /// `M^{-1}_{ij} = T_ij + sum_r T_ir N_rj`.
    pub fn query(&self, i: usize, j: usize) -> Result<TruncPoly> {
        self.check_index(i, j)?;
        Ok(self.query_unchecked(i, j))
    }

    /// Coefficients `0..=upto` of `M^{-1}_{ij}`.
    pub fn coeff_prefix(&self, i: usize, j: usize, upto: usize) -> Vec<u64> {
        prefix_from(&self.field, self.t.entry(i, j), |r| self.t.entry(i, r), &self.nmat, &self.nrows, j, upto)
    }

    /// Least degree `<= max_deg` with a nonzero coefficient in `M^{-1}_{ij}`,
    /// computed one coefficient at a time.
    pub fn min_degree_upto(&self, i: usize, j: usize, max_deg: usize) -> Option<usize> {
        let f = &self.field;
        let tij = self.t.entry(i, j);
        let max_deg = max_deg.min(self.depth);
        let terms: Vec<(&[u64], &[u64])> = self
            .nrows
            .iter()
            .map(|&r| (self.t.entry(i, r), self.nmat.entry(r, j)))
            .filter(|(a, b)| a.iter().any(|&x| x != 0) && b.iter().any(|&x| x != 0))
            .collect();
        (0..=max_deg).find(|&k| coefficient_at(f, tij, &terms, k) != 0)
    }

    // ---- submatrix views ----

    pub fn register_submatrix(&mut self, h: &[usize]) -> Result<ViewId> {
        let mut members: Vec<usize> = h.to_vec();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&x| x >= self.n) {
            return Err(Error::DimMismatch(format!("view member {bad} outside [0, {})", self.n)));
        }
        let k = members.len();
        let mut cached = PolyMatrix::zeros(self.field, self.depth, k, k);
        for (a, &ha) in members.iter().enumerate() {
            for (b, &hb) in members.iter().enumerate() {
                cached.set(a, b, &self.query_unchecked(ha, hb))?;
            }
        }
        let pos = members.iter().enumerate().map(|(p, &v)| (v, p)).collect();
        self.views.push(SubmatrixView { h: members, pos, cached });
        Ok(ViewId(self.views.len() - 1))
    }

    pub fn view(&self, id: ViewId) -> &SubmatrixView {
        &self.views[id.0]
    }

    // ---- products E M^{-1} ----

    /// Registers a product with the given `E` entries; `V = E T` is formed now.
    pub fn register_product(&mut self, entries: &[(usize, usize, TruncPoly)]) -> Result<ProductId> {
        let mut p = ProductState::new(self.n, self.depth, self.epoch);
        for (i, j, v) in entries {
            self.check_index(*i, *j)?;
            self.check_poly(v)?;
            p.set_e(&self.field, &self.t, *i, *j, v.coeffs());
        }
        self.products.push(p);
        Ok(ProductId(self.products.len() - 1))
    }

    /// Pins every product to one reset strategy (`None` restores the cost rule).
    pub fn force_reset_strategy(&mut self, s: Option<ResetStrategy>) {
        self.forced_strategy = s;
    }

    pub fn product(&self, id: ProductId) -> &ProductState {
        &self.products[id.0]
    }

    /// Test hook: direct mutable access to a registered product.
    pub fn product_mut(&mut self, id: ProductId) -> &mut ProductState {
        &mut self.products[id.0]
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    /// `E_ij <- v`.
    pub fn product_set_e(&mut self, id: ProductId, i: usize, j: usize, v: &TruncPoly) -> Result<()> {
        self.check_index(i, j)?;
        self.check_poly(v)?;
        let p = &mut self.products[id.0];
        p.check_synced(self.epoch)?;
        p.set_e(&self.field, &self.t, i, j, v.coeffs());
        Ok(())
    }

    /// `E_ij <- c` for a field constant `c` (faster path of `product_set_e`).
    pub fn product_set_e_scalar(&mut self, id: ProductId, i: usize, j: usize, c: u64) -> Result<()> {
        self.check_index(i, j)?;
        let p = &mut self.products[id.0];
        p.check_synced(self.epoch)?;
        let mut v = vec![0u64; self.depth + 1];
        v[0] = c % self.field.modulus();
        p.set_e(&self.field, &self.t, i, j, &v);
        Ok(())
    }

    /// `(E M^{-1})_{ij} = V_ij + sum_r V_ir N_rj`.
    pub fn product_query(&self, id: ProductId, i: usize, j: usize) -> Result<TruncPoly> {
        self.check_index(i, j)?;
        let p = &self.products[id.0];
        p.check_synced(self.epoch)?;
        let s = self.depth + 1;
        Ok(TruncPoly::from_raw(self.field, self.product_prefix_unchecked(p, i, j, s - 1)))
    }

    /// Coefficients `0..=upto` of `(E M^{-1})_{ij}`.
    pub fn product_coeff_prefix(&self, id: ProductId, i: usize, j: usize, upto: usize) -> Result<Vec<u64>> {
        self.check_index(i, j)?;
        let p = &self.products[id.0];
        p.check_synced(self.epoch)?;
        Ok(self.product_prefix_unchecked(p, i, j, upto.min(self.depth)))
    }

    fn product_prefix_unchecked(&self, p: &ProductState, i: usize, j: usize, upto: usize) -> Vec<u64> {
        prefix_from(&self.field, p.v_entry(i, j), |r| p.v_entry(i, r), &self.nmat, &self.nrows, j, upto)
    }
}

fn coefficient_at(f: &Field, base: &[u64], terms: &[(&[u64], &[u64])], k: usize) -> u64 {
    let mut acc = base[k] as u128;
    let mut used = 0;
    for (a, b) in terms {
        for t in 0..=k {
            if used == crate::ring::LAZY_TERMS - 1 {
                acc = f.reduce(acc) as u128;
                used = 0;
            }
            acc += a[t] as u128 * b[k - t] as u128;
            used += 1;
        }
    }
    f.reduce(acc)
}

fn prefix_from<'a>(
    f: &Field,
    base: &'a [u64],
    left: impl Fn(usize) -> &'a [u64],
    nmat: &'a PolyMatrix,
    nrows: &[usize],
    j: usize,
    upto: usize,
) -> Vec<u64> {
    let terms: Vec<(&[u64], &[u64])> = nrows
        .iter()
        .map(|&r| (left(r), nmat.entry(r, j)))
        .filter(|(a, b)| a.iter().any(|&x| x != 0) && b.iter().any(|&x| x != 0))
        .collect();
    (0..=upto).map(|k| coefficient_at(f, base, &terms, k)).collect()
}
