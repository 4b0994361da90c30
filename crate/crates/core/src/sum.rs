//! Compensated summation and the deterministic block reduction used by all
//! O(N²) pair sums.
//!
//! Work is split into blocks of [`BLOCK`] rows whose size does not depend on the
//! executor, and block results are combined by a fixed binary tree. The value
//! of a pair sum is therefore bitwise identical for any thread count.

use alloc::vec::Vec;

/// Rows per block of a pair sum.
pub const BLOCK: usize = 64;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().total()
}

/// Pairwise sum with a fixed split point at every level.
pub fn tree_reduce(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (l, r) = xs.split_at(n / 2);
            tree_reduce(l) + tree_reduce(r)
        }
    }
}

/// Evaluates `f(0), ..., f(n-1)`, possibly in parallel; results are returned in
/// index order.
pub trait Executor: Sync {
    fn map(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64>;

    fn threads(&self) -> usize {
        1
    }
}

/// Evaluates on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64> {
        (0..n).map(f).collect()
    }
}

/// `Σ_{n,p < len} k(n, p)` for a symmetric kernel, evaluated as
/// `Σ_n k(n, n) + 2 Σ_{n<p} k(n, p)`.
pub fn symmetric_pair_sum<E, K>(exec: &E, len: usize, k: K) -> f64
where
    E: Executor + ?Sized,
    K: Fn(usize, usize) -> f64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let partial = exec.map(blocks, &|blk| {
        let mut acc = Neumaier::new();
        for n in blk * BLOCK..((blk + 1) * BLOCK).min(len) {
            let mut row = Neumaier::new();
            for p in n + 1..len {
                row.add(k(n, p));
            }
            acc.add(2.0 * row.total());
            acc.add(k(n, n));
        }
        acc.total()
    });
    tree_reduce(&partial)
}

/// `Σ_{n < len} f(n)` with the same block structure as [`symmetric_pair_sum`].
pub fn block_sum<E, F>(exec: &E, len: usize, f: F) -> f64
where
    E: Executor + ?Sized,
    F: Fn(usize) -> f64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let partial = exec.map(blocks, &|blk| compensated((blk * BLOCK..((blk + 1) * BLOCK).min(len)).map(&f)));
    tree_reduce(&partial)
}
