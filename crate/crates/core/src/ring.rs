//! Prime field `F_p` and the truncated ring `F_p[u] / <u^{D+1}>`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

pub const MERSENNE61: u64 = (1 << 61) - 1;

/// Products of reduced elements are below 2^122, so 60 of them fit a u128.
pub(crate) const LAZY_TERMS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
}

impl Default for Field {
    fn default() -> Self {
        Field { p: MERSENNE61 }
    }
}

impl Field {
    /// `p` must be a prime in `[2, 2^61 - 1]`.
    pub fn new(p: u64) -> Result<Self> {
        if p > MERSENNE61 || !is_prime(p) {
            return Err(Error::ParamDomain(format!("modulus {p} is not a prime <= 2^61-1")));
        }
        Ok(Field { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: u128) -> u64 {
        if self.p == MERSENNE61 {
            let lo = (x as u64) & MERSENNE61;
            let mid = ((x >> 61) as u64) & MERSENNE61;
            let hi = (x >> 122) as u64;
            let mut s = lo + mid + hi;
            s = (s & MERSENNE61) + (s >> 61);
            if s >= MERSENNE61 {
                s -= MERSENNE61;
            }
            s
        } else {
            (x % self.p as u128) as u64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        (!a.is_multiple_of(self.p)).then(|| self.pow(a, self.p - 2))
    }

    /// Uniform nonzero element.
    pub fn random_nonzero<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.p)
    }

    /// Nonzero element derived from a 64-bit hash (for keyed, order-free draws).
    pub fn nonzero_from_hash(&self, h: u64) -> u64 {
        1 + h % (self.p - 1)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u64,
    pub rng_seed: u64,
}

impl Default for FieldParams {
    fn default() -> Self {
        FieldParams { p: MERSENNE61, rng_seed: 0 }
    }
}

impl FieldParams {
    pub fn field(&self) -> Result<Field> {
        Field::new(self.p)
    }
}

// ---- slice kernels shared by the matrix layers ----

/// `acc[k] += sum_{s+t=k} a[s] b[t]`, `k < acc.len()`, lazily in u128.
/// Entries of `acc` must be below 2^64 on entry.
#[inline]
pub(crate) fn conv_into(f: &Field, acc: &mut [u128], a: &[u64], b: &[u64]) {
    let d = acc.len();
    for (s, &x) in a.iter().enumerate().take(d) {
        if s > 0 && s % LAZY_TERMS == 0 {
            fold(f, acc);
        }
        if x == 0 {
            continue;
        }
        let x = x as u128;
        for (slot, &y) in acc[s..].iter_mut().zip(b) {
            *slot += x * y as u128;
        }
    }
}

/// `acc[k] += c * b[k]`.
#[inline]
pub(crate) fn scale_into(acc: &mut [u128], c: u64, b: &[u64]) {
    let c = c as u128;
    for (slot, &y) in acc.iter_mut().zip(b) {
        *slot += c * y as u128;
    }
}

#[inline]
pub(crate) fn fold(f: &Field, acc: &mut [u128]) {
    for x in acc.iter_mut() {
        *x = f.reduce(*x) as u128;
    }
}

/// Accumulator with automatic folding before overflow.
pub(crate) struct WideAcc {
    pub(crate) buf: Vec<u128>,
    used: usize,
}

impl WideAcc {
    pub(crate) fn new(len: usize) -> Self {
        WideAcc { buf: vec![0; len], used: 0 }
    }

    pub(crate) fn reset(&mut self) {
        self.buf.iter_mut().for_each(|x| *x = 0);
        self.used = 0;
    }

    #[inline]
    fn reserve(&mut self, f: &Field, terms: usize) {
        if self.used + terms.min(LAZY_TERMS) > LAZY_TERMS {
            fold(f, &mut self.buf);
            self.used = 0;
        }
        self.used += terms.min(LAZY_TERMS);
    }

    /// Whole-buffer update: `buf[k] += c * b[k]` for a row of entries.
    #[inline]
    pub(crate) fn scale(&mut self, f: &Field, c: u64, b: &[u64]) {
        self.reserve(f, 1);
        scale_into(&mut self.buf[..b.len()], c, b);
    }

    /// Marks one more product per slot without doing arithmetic (for callers
    /// writing into `buf` directly).
    pub(crate) fn reserve_terms(&mut self, f: &Field, terms: usize) {
        self.reserve(f, terms);
    }

    pub(crate) fn write_reduced(&self, f: &Field, out: &mut [u64]) {
        for (o, &x) in out.iter_mut().zip(&self.buf) {
            *o = f.reduce(x);
        }
    }
}

/// Element of `F_p[u] / <u^{D+1}>`, dense coefficients `coeffs[d]` of `u^d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncPoly {
    field: Field,
    coeffs: Vec<u64>,
}

impl fmt::Debug for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncPoly(p={}, {:?})", self.field.p, self.coeffs)
    }
}

impl TruncPoly {
    pub fn zero(field: Field, depth: usize) -> Self {
        TruncPoly { field, coeffs: vec![0; depth + 1] }
    }

    pub fn one(field: Field, depth: usize) -> Self {
        Self::constant(field, depth, 1)
    }

    pub fn constant(field: Field, depth: usize, c: u64) -> Self {
        let mut p = Self::zero(field, depth);
        p.coeffs[0] = c % field.p;
        p
    }

    /// `c * u^k` (zero if `k > depth`).
    pub fn monomial(field: Field, depth: usize, k: usize, c: u64) -> Self {
        let mut p = Self::zero(field, depth);
        if k <= depth {
            p.coeffs[k] = c % field.p;
        }
        p
    }

    /// Coefficients are reduced mod p and padded/truncated to `depth + 1`.
    pub fn from_coeffs(field: Field, depth: usize, coeffs: &[u64]) -> Self {
        let mut p = Self::zero(field, depth);
        for (dst, &c) in p.coeffs.iter_mut().zip(coeffs) {
            *dst = c % field.p;
        }
        p
    }

    pub fn random<R: Rng>(field: Field, depth: usize, rng: &mut R) -> Self {
        let coeffs = (0..=depth).map(|_| rng.gen_range(0..field.p)).collect();
        TruncPoly { field, coeffs }
    }

    pub(crate) fn from_raw(field: Field, coeffs: Vec<u64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        TruncPoly { field, coeffs }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> u64 {
        self.coeffs[d]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same(&self, other: &TruncPoly) -> Result<()> {
        if self.field != other.field || self.coeffs.len() != other.coeffs.len() {
            return Err(Error::ParamMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.same(other)?;
        let f = self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(TruncPoly { field: f, coeffs })
    }

    pub fn sub(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.same(other)?;
        let f = self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(TruncPoly { field: f, coeffs })
    }

    pub fn neg(&self) -> TruncPoly {
        let f = self.field;
        TruncPoly { field: f, coeffs: self.coeffs.iter().map(|&a| f.neg(a)).collect() }
    }

    /// Multiplication by a field scalar.
    pub fn scale(&self, c: u64) -> TruncPoly {
        let f = self.field;
        let c = c % f.p;
        TruncPoly { field: f, coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn mul(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.same(other)?;
        let mut acc = vec![0u128; self.coeffs.len()];
        conv_into(&self.field, &mut acc, &self.coeffs, &other.coeffs);
        let coeffs = acc.iter().map(|&x| self.field.reduce(x)).collect();
        Ok(TruncPoly { field: self.field, coeffs })
    }

    /// Inverse by Newton iteration `x <- x (2 - a x)`, doubling precision.
    pub fn inv(&self) -> Result<TruncPoly> {
        let f = self.field;
        let a0inv = f.inv(self.coeffs[0]).ok_or(Error::NonUnit)?;
        let len = self.coeffs.len();
        let mut x = vec![0u64; len];
        x[0] = a0inv;
        let mut prec = 1;
        while prec < len {
            prec = (2 * prec).min(len);
            let mut ax = vec![0u128; prec];
            conv_into(&f, &mut ax, &self.coeffs[..prec], &x[..prec]);
            // e = 2 - a x
            let e: Vec<u64> = ax
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let v = f.reduce(v);
                    if k == 0 {
                        f.sub(2 % f.p, v)
                    } else {
                        f.neg(v)
                    }
                })
                .collect();
            let mut nx = vec![0u128; prec];
            conv_into(&f, &mut nx, &x[..prec], &e);
            for (k, v) in nx.into_iter().enumerate() {
                x[k] = f.reduce(v);
            }
        }
        Ok(TruncPoly { field: f, coeffs: x })
    }

    /// Least `d` with a nonzero coefficient, `None` for the zero element.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}u")?,
                _ => write!(f, "{c}u^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
