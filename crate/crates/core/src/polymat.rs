//! Dense matrices over truncated polynomials, the graph encoding `A_ij = u r_ij`,
//! and the static power-series inverse `(I - A)^{-1}`.

use crate::error::{Error, Result};
use crate::graph::DynamicGraph;
use crate::ring::{Field, FieldParams, TruncPoly, WideAcc};
use crate::rng::derive;

/// Row-major `rows x cols` grid; entry `(i, j)` occupies `depth + 1` words.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    depth: usize,
    field: Field,
    data: Vec<u64>,
}

impl std::fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "PolyMatrix {}x{} (D={})", self.rows, self.cols, self.depth)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl PolyMatrix {
    pub fn zeros(field: Field, depth: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, depth, field, data: vec![0; rows * cols * (depth + 1)] }
    }

    pub fn identity(field: Field, depth: usize, n: usize) -> Self {
        let mut m = Self::zeros(field, depth, n, n);
        for i in 0..n {
            m.entry_mut(i, i)[0] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub(crate) fn stride(&self) -> usize {
        self.depth + 1
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> &[u64] {
        let s = self.stride();
        let o = (i * self.cols + j) * s;
        &self.data[o..o + s]
    }

    #[inline]
    pub(crate) fn entry_mut(&mut self, i: usize, j: usize) -> &mut [u64] {
        let s = self.stride();
        let o = (i * self.cols + j) * s;
        &mut self.data[o..o + s]
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        let w = self.cols * self.stride();
        &self.data[i * w..(i + 1) * w]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let w = self.cols * self.stride();
        &mut self.data[i * w..(i + 1) * w]
    }

    pub fn get(&self, i: usize, j: usize) -> TruncPoly {
        TruncPoly::from_raw(self.field, self.entry(i, j).to_vec())
    }

    pub fn set(&mut self, i: usize, j: usize, v: &TruncPoly) -> Result<()> {
        if v.field() != self.field || v.depth() != self.depth {
            return Err(Error::ParamMismatch);
        }
        self.entry_mut(i, j).copy_from_slice(v.coeffs());
        Ok(())
    }

    pub fn is_entry_zero(&self, i: usize, j: usize) -> bool {
        self.entry(i, j).iter().all(|&c| c == 0)
    }

    pub fn nonzero_count(&self) -> usize {
        (0..self.rows).map(|i| (0..self.cols).filter(|&j| !self.is_entry_zero(i, j)).count()).sum()
    }

    fn compatible(&self, other: &PolyMatrix) -> Result<()> {
        if self.field != other.field || self.depth != other.depth {
            return Err(Error::ParamMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.compatible(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimMismatch(format!("{}x{} + {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(PolyMatrix { data, ..*self })
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.compatible(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimMismatch(format!("{}x{} - {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(PolyMatrix { data, ..*self })
    }

    /// `self * other`, using only the listed rows of `other` (all rows when `None`).
    fn mul_impl(&self, other: &PolyMatrix, rows_of_b: Option<&[usize]>) -> Result<PolyMatrix> {
        self.compatible(other)?;
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!("{}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let f = self.field;
        let s = self.stride();
        let mut out = PolyMatrix::zeros(f, self.depth, self.rows, other.cols);
        let all: Vec<usize>;
        let ks: &[usize] = match rows_of_b {
            Some(r) => r,
            None => {
                all = (0..self.cols).collect();
                &all
            }
        };
        let mut acc = WideAcc::new(other.cols * s);
        for i in 0..self.rows {
            acc.reset();
            for &k in ks {
                let a = self.entry(i, k);
                if a.iter().all(|&c| c == 0) {
                    continue;
                }
                acc.reserve_terms(&f, s);
                let brow = other.row(k);
                for j in 0..other.cols {
                    acc.conv_row_entry(&f, j * s, a, &brow[j * s..(j + 1) * s]);
                }
            }
            acc.write_reduced(&f, out.row_mut(i));
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.entry(i, j);
                    e.iter().enumerate().all(|(d, &c)| c == if i == j && d == 0 { 1 } else { 0 })
                })
            })
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zeros(self.field, self.depth, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entry_mut(j, i).copy_from_slice(self.entry(i, j));
            }
        }
        t
    }
}

impl WideAcc {
    /// Convolution into one entry of a row accumulator; the caller reserves
    /// headroom once per contributing `k` via `reserve_terms`.
    #[inline]
    pub(crate) fn conv_row_entry(&mut self, f: &Field, off: usize, a: &[u64], b: &[u64]) {
        let len = a.len();
        crate::ring::conv_into(f, &mut self.buf[off..off + len], a, b);
    }
}

pub fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
    a.mul_impl(b, None)
}

/// `a * b` where `b` is zero outside `nonzero_rows`; bit-identical to `mat_mul`.
pub fn mat_mul_row_sparse(a: &PolyMatrix, b: &PolyMatrix, nonzero_rows: &[usize]) -> Result<PolyMatrix> {
    if let Some(&r) = nonzero_rows.iter().find(|&&r| r >= b.rows) {
        return Err(Error::DimMismatch(format!("row {r} outside {} rows", b.rows)));
    }
    a.mul_impl(b, Some(nonzero_rows))
}

fn check_nilpotent_constant(a: &PolyMatrix) -> Result<()> {
    if a.rows != a.cols {
        return Err(Error::DimMismatch(format!("{}x{} is not square", a.rows, a.cols)));
    }
    for i in 0..a.rows {
        for j in 0..a.cols {
            if a.entry(i, j)[0] != 0 {
                return Err(Error::NotNilpotentConstant(i, j));
            }
        }
    }
    Ok(())
}

/// `(I - A)^{-1}` mod `u^{D+1}` for `A` with zero constant terms.
///
/// Sparse inputs use Horner steps `X <- I + A X`; dense inputs use the doubling
/// product `prod (I + A^{2^i})`. Both give the exact truncated series.
pub fn series_inverse(a: &PolyMatrix) -> Result<PolyMatrix> {
    check_nilpotent_constant(a)?;
    let n = a.rows;
    let d = a.depth;
    let nnz = a.nonzero_count();
    let levels = usize::BITS - d.leading_zeros();
    // Horner: d steps of nnz*n convolutions; doubling: 2*levels dense products.
    if nnz.saturating_mul(d) <= 2 * levels as usize * n * n {
        series_inverse_horner(a)
    } else {
        series_inverse_doubling(a)
    }
}

pub fn series_inverse_doubling(a: &PolyMatrix) -> Result<PolyMatrix> {
    check_nilpotent_constant(a)?;
    let n = a.rows;
    let id = PolyMatrix::identity(a.field, a.depth, n);
    let mut result = id.clone();
    let mut power = a.clone();
    let mut covered = 1usize;
    // sum_{k < 2^L} A^k = prod_{i < L} (I + A^{2^i}); terms past degree D vanish.
    while covered <= a.depth {
        result = mat_mul(&result, &id.add(&power)?)?;
        covered *= 2;
        if covered <= a.depth {
            power = mat_mul(&power, &power)?;
        }
    }
    Ok(result)
}

pub fn series_inverse_horner(a: &PolyMatrix) -> Result<PolyMatrix> {
    check_nilpotent_constant(a)?;
    let n = a.rows;
    let f = a.field;
    let s = a.stride();
    let entries: Vec<Vec<(usize, &[u64])>> =
        (0..n).map(|i| (0..n).filter(|&k| !a.is_entry_zero(i, k)).map(|k| (k, a.entry(i, k))).collect()).collect();
    let mut x = PolyMatrix::identity(f, a.depth, n);
    let mut acc = WideAcc::new(n * s);
    for _ in 0..a.depth {
        let mut next = PolyMatrix::identity(f, a.depth, n);
        for (i, row) in entries.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            acc.reset();
            for j in 0..n {
                acc.buf[j * s] = (i == j) as u128;
            }
            for &(k, aik) in row {
                acc.reserve_terms(&f, s);
                let xrow = x.row(k);
                for j in 0..n {
                    acc.conv_row_entry(&f, j * s, aik, &xrow[j * s..(j + 1) * s]);
                }
            }
            acc.write_reduced(&f, next.row_mut(i));
        }
        x = next;
    }
    Ok(x)
}

/// Deterministic per-ordered-pair edge value `r_ij`, nonzero. Reinserting an
/// edge reproduces the same value.
pub fn edge_value(field: &Field, seed: u64, i: usize, j: usize) -> u64 {
    field.nonzero_from_hash(derive(seed, "edge-r", ((i as u64) << 32) | j as u64))
}

/// `A_ij = u r_ij` over the edges of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedAdjacency {
    pub matrix: PolyMatrix,
    pub seed: u64,
}

impl EncodedAdjacency {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn depth(&self) -> usize {
        self.matrix.depth()
    }

    pub fn field(&self) -> Field {
        self.matrix.field()
    }

    /// The entry value `u r_ij` an edge `(i, j)` contributes.
    pub fn entry_for(&self, i: usize, j: usize) -> TruncPoly {
        let f = self.field();
        TruncPoly::monomial(f, self.depth(), 1, edge_value(&f, self.seed, i, j))
    }

    /// Oriented nonzero entries, row-major.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| !self.matrix.is_entry_zero(i, j)).collect()
    }
}

pub fn encode(g: &DynamicGraph, params: FieldParams, depth: usize) -> Result<EncodedAdjacency> {
    let field = params.field()?;
    let n = g.n();
    let mut m = PolyMatrix::zeros(field, depth, n, n);
    for u in 0..n {
        for v in g.out_neighbors(u) {
            if depth >= 1 {
                m.entry_mut(u, v)[1] = edge_value(&field, params.rng_seed, u, v);
            }
        }
    }
    Ok(EncodedAdjacency { matrix: m, seed: params.rng_seed })
}
