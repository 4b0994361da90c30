//! Arithmetic and linear algebra over the prime field `Z_b`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Largest base accepted; entries are stored as `u8`.
pub const MAX_BASE: u32 = 251;

/// A prime `b` together with its table of multiplicative inverses.
#[derive(Clone)]
pub struct PrimeBase {
    b: u32,
    inv: Arc<[u8]>,
}

impl PrimeBase {
    /// Checks primality by trial division.
    pub fn new(b: u32) -> Result<Self> {
        if !(2..=MAX_BASE).contains(&b) || !is_prime(b) {
            return Err(Error::NotPrime(b));
        }
        let mut inv = vec![0u8; b as usize];
        for x in 1..b {
            // b is tiny, a linear search is fine.
            let y = (1..b).find(|y| (x * y) % b == 1).unwrap();
            inv[x as usize] = y as u8;
        }
        Ok(PrimeBase { b, inv: inv.into() })
    }

    #[inline]
    pub fn get(&self) -> u32 {
        self.b
    }

    #[inline]
    pub fn add(&self, x: u8, y: u8) -> u8 {
        ((x as u32 + y as u32) % self.b) as u8
    }

    #[inline]
    pub fn sub(&self, x: u8, y: u8) -> u8 {
        ((x as u32 + self.b - y as u32) % self.b) as u8
    }

    #[inline]
    pub fn mul(&self, x: u8, y: u8) -> u8 {
        ((x as u32 * y as u32) % self.b) as u8
    }

    #[inline]
    pub fn neg(&self, x: u8) -> u8 {
        self.sub(0, x)
    }

    /// Inverse of a nonzero residue.
    #[inline]
    pub fn inv(&self, x: u8) -> u8 {
        debug_assert!(x != 0);
        self.inv[x as usize]
    }

    /// `b^e` as an integer, `None` on overflow.
    pub fn pow(&self, e: u32) -> Option<u64> {
        (self.b as u64).checked_pow(e)
    }
}

impl PartialEq for PrimeBase {
    fn eq(&self, other: &Self) -> bool {
        self.b == other.b
    }
}

impl Eq for PrimeBase {}

impl fmt::Debug for PrimeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeBase({})", self.b)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense row-major matrix over `Z_b`.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixZb {
    base: PrimeBase,
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl fmt::Debug for MatrixZb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixZb(b={}, {}x{})", self.base.get(), self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl MatrixZb {
    pub fn new(base: &PrimeBase, rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if let Some(&e) = entries.iter().find(|&&e| e as u32 >= base.get()) {
            return Err(Error::invalid(alloc::format!(
                "entry {e} is not a residue mod {}",
                base.get()
            )));
        }
        Ok(MatrixZb {
            base: base.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(base: &PrimeBase, rows: &[&[u8]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(base, rows.len(), cols, entries)
    }

    pub fn zeros(base: &PrimeBase, rows: usize, cols: usize) -> Self {
        MatrixZb {
            base: base.clone(),
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(base: &PrimeBase, n: usize) -> Self {
        let mut m = Self::zeros(base, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Antidiagonal ones: maps digit `i` to digit `n - 1 - i`.
    pub fn reversal(base: &PrimeBase, n: usize) -> Self {
        let mut m = Self::zeros(base, n, n);
        for i in 0..n {
            m.set(i, n - 1 - i, 1);
        }
        m
    }

    #[inline]
    /// Upper triangular Pascal matrix `P[r][c] = binom(c, r) mod b`.
    pub fn pascal(base: &PrimeBase, n: usize) -> Self {
        let b = base.get() as u64;
        let mut p = Self::zeros(base, n, n);
        for c in 0..n {
            // row c of Pascal's triangle mod b, built additively
            let mut row = vec![0u64; c + 1];
            row[0] = 1;
            for k in 1..=c {
                for r in (1..=k).rev() {
                    row[r] = (row[r] + row[r - 1]) % b;
                }
            }
            for (r, &v) in row.iter().enumerate() {
                p.set(r, c, v as u8);
            }
        }
        p
    }

    pub fn base(&self) -> &PrimeBase {
        &self.base
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!((v as u32) < self.base.get());
        self.entries[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `M · v` over `Z_b`.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let b = self.base.get();
        Ok((0..self.rows)
            .map(|r| {
                let s: u32 = self.row(r).iter().zip(v).map(|(&x, &y)| x as u32 * y as u32).sum();
                (s % b) as u8
            })
            .collect())
    }

    pub fn mul(&self, other: &MatrixZb) -> Result<MatrixZb> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        if self.base != other.base {
            return Err(Error::invalid("matrices over different bases"));
        }
        let b = self.base.get();
        let mut out = Self::zeros(&self.base, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let s: u32 = (0..self.cols)
                    .map(|k| self.get(r, k) as u32 * other.get(k, c) as u32)
                    .sum();
                out.set(r, c, (s % b) as u8);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> MatrixZb {
        let mut out = Self::zeros(&self.base, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Result<MatrixZb> {
        if !self.is_square() {
            return Err(Error::invalid("power of a non-square matrix"));
        }
        let mut acc = Self::identity(&self.base, self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Rank via Gaussian elimination with inverse-table pivots.
    pub fn rank(&self) -> usize {
        rank_of_rows(&self.base, self.entries.clone(), self.rows, self.cols)
    }

    /// A basis of `{v : M v = 0}`, as vectors of length `cols`.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        let bz = &self.base;
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.entries.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
                continue;
            };
            if p != r {
                for k in 0..cols {
                    a.swap(p * cols + k, r * cols + k);
                }
            }
            let inv = bz.inv(a[r * cols + c]);
            for k in 0..cols {
                a[r * cols + k] = bz.mul(a[r * cols + k], inv);
            }
            for i in 0..rows {
                let f = a[i * cols + c];
                if i != r && f != 0 {
                    for k in 0..cols {
                        let sub = bz.mul(f, a[r * cols + k]);
                        a[i * cols + k] = bz.sub(a[i * cols + k], sub);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut basis = Vec::new();
        for free in (0..cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u8; cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = bz.neg(a[i * cols + free]);
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank of a row-major `rows x cols` array, consumed in place.
pub(crate) fn rank_of_rows(bz: &PrimeBase, mut a: Vec<u8>, rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if p != rank {
            for k in 0..cols {
                a.swap(p * cols + k, rank * cols + k);
            }
        }
        let inv = bz.inv(a[rank * cols + c]);
        for i in rank + 1..rows {
            let f = a[i * cols + c];
            if f == 0 {
                continue;
            }
            let f = bz.mul(f, inv);
            for k in c..cols {
                let sub = bz.mul(f, a[rank * cols + k]);
                a[i * cols + k] = bz.sub(a[i * cols + k], sub);
            }
        }
        rank += 1;
    }
    rank
}

/// Calls `f` with every `(l_1, ..., l_d)` in `N_0^d` summing to `total`;
/// stops early and returns `false` as soon as `f` does.
fn for_each_composition(d: usize, total: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(parts: &mut Vec<usize>, d: usize, left: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if parts.len() + 1 == d {
            parts.push(left);
            let ok = f(parts);
            parts.pop();
            return ok;
        }
        for l in 0..=left {
            parts.push(l);
            let ok = rec(parts, d, left - l, f);
            parts.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    if d == 0 {
        return total == 0 || f(&[]);
    }
    rec(&mut Vec::with_capacity(d), d, total, f)
}

/// Whether `matrices` (all `m x m` over the same base) satisfy the digital
/// `(t, m, d)`-net condition: for every `l_1 + ... + l_d = m - t`, the first
/// `l_j` rows of each `C_j` together are linearly independent.
pub fn is_net_system(matrices: &[MatrixZb], t: usize) -> bool {
    let Some(first) = matrices.first() else {
        return true;
    };
    let m = first.rows();
    if t >= m {
        return true;
    }
    let k = m - t;
    let bz = first.base().clone();
    let cols = first.cols();
    for_each_composition(matrices.len(), k, &mut |ls| {
        let mut stacked = Vec::with_capacity(k * cols);
        for (c, &l) in matrices.iter().zip(ls) {
            for r in 0..l {
                stacked.extend_from_slice(c.row(r));
            }
        }
        rank_of_rows(&bz, stacked, k, cols) == k
    })
}

/// Smallest `t` for which [`is_net_system`] holds; never exceeds `m`.
pub fn strict_t_value(matrices: &[MatrixZb]) -> usize {
    let m = matrices.first().map_or(0, |c| c.rows());
    (0..=m).find(|&t| is_net_system(matrices, t)).unwrap_or(m)
}
