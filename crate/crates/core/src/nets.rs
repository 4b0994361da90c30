//! Digital nets, digital shifts of depth `m` and symmetrized nets.
//!
//! All randomness goes through [`rng`]: a ChaCha8 generator seeded with
//! `seed_from_u64(seed)`, with the stream number selecting independent
//! replicates (sample `i` of an experiment uses stream `i`).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{self, MatrixZb, PrimeBase};
use crate::{Error, Result};

/// Largest number of points a generator set may produce.
pub const MAX_POINTS: u64 = 1 << 26;

/// The seeded generator used everywhere randomness is needed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `d` square `m x m` generating matrices over one prime base, with their
/// verified strict t-value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    base: PrimeBase,
    m: usize,
    matrices: Vec<MatrixZb>,
    t: usize,
}

impl GeneratorSet {
    pub fn new(matrices: Vec<MatrixZb>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::invalid("at least one generating matrix is required"))?;
        let base = first.base().clone();
        let m = first.rows();
        for c in &matrices {
            if !c.is_square() || c.rows() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: if c.rows() != m { c.rows() } else { c.cols() },
                });
            }
            if c.base() != &base {
                return Err(Error::invalid("generating matrices over different bases"));
            }
        }
        match base.pow(m as u32) {
            Some(n) if n <= MAX_POINTS => {}
            _ => {
                return Err(Error::LimitExceeded {
                    required: (base.get() as u128).saturating_pow(m as u32),
                    limit: MAX_POINTS as u128,
                })
            }
        }
        let t = field::strict_t_value(&matrices);
        Ok(GeneratorSet { base, m, matrices, t })
    }

    /// Base-2 Hammersley net: `C_1` reversal, `C_2` identity.
    pub fn hammersley(m: usize) -> Result<Self> {
        check_m(m, 1)?;
        let b2 = PrimeBase::new(2)?;
        Self::new(vec![MatrixZb::reversal(&b2, m), MatrixZb::identity(&b2, m)])
    }

    /// The `P_a` family: `C_1` reversal and `C_2` the identity whose last
    /// column is `(a_1, ..., a_{m-1}, 1)`.
    pub fn family_pa(m: usize, a: &[u8]) -> Result<Self> {
        check_m(m, 2)?;
        check_bits(a, m - 1, "a")?;
        let b2 = PrimeBase::new(2)?;
        let mut c2 = MatrixZb::identity(&b2, m);
        for (i, &ai) in a.iter().enumerate() {
            c2.set(i, m - 1, ai);
        }
        Self::new(vec![MatrixZb::reversal(&b2, m), c2])
    }

    /// The `P_c` family: `C_2` unit upper triangular with row `i` equal to
    /// `(0, ..., 0, 1, c_i, ..., c_i)`. `c = (1, ..., 1)` is the upper-1-net.
    pub fn family_pc(m: usize, c: &[u8]) -> Result<Self> {
        check_m(m, 2)?;
        check_bits(c, m - 1, "c")?;
        let b2 = PrimeBase::new(2)?;
        let mut c2 = MatrixZb::identity(&b2, m);
        for (i, &ci) in c.iter().enumerate() {
            for col in i + 1..m {
                c2.set(i, col, ci);
            }
        }
        Self::new(vec![MatrixZb::reversal(&b2, m), c2])
    }

    pub fn upper_one(m: usize) -> Result<Self> {
        Self::family_pc(m, &vec![1; m.saturating_sub(1)])
    }

    /// Base-2 net in dimension 3: the Hammersley pair plus the Pascal matrix.
    pub fn hammersley_pascal(m: usize) -> Result<Self> {
        check_m(m, 1)?;
        let b2 = PrimeBase::new(2)?;
        Self::new(vec![MatrixZb::reversal(&b2, m), MatrixZb::identity(&b2, m), MatrixZb::pascal(&b2, m)])
    }

    /// Faure net: `C_j = P^{j-1} mod b` with `P[r][c] = binom(c, r)`
    /// (0-based, upper triangular Pascal matrix).
    pub fn faure(b: u32, d: usize, m: usize) -> Result<Self> {
        let base = PrimeBase::new(b)?;
        check_m(m, 1)?;
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if (b as usize) < d {
            return Err(Error::invalid(format!("Faure nets need b >= d, got b={b}, d={d}")));
        }
        let pascal = MatrixZb::pascal(&base, m);
        let mut mats = Vec::with_capacity(d);
        let mut acc = MatrixZb::identity(&base, m);
        for _ in 0..d {
            mats.push(acc.clone());
            acc = acc.mul(&pascal)?;
        }
        Self::new(mats)
    }

    #[inline]
    pub fn base(&self) -> &PrimeBase {
        &self.base
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    /// Strict t-value.
    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn matrices(&self) -> &[MatrixZb] {
        &self.matrices
    }

    pub fn num_points(&self) -> u64 {
        self.base.pow(self.m as u32).unwrap()
    }

    pub fn is_net_system(&self, t: usize) -> bool {
        field::is_net_system(&self.matrices, t)
    }

    /// The `b^m` points in index order `n = 0, 1, ...`.
    pub fn generate(&self) -> PointSet {
        let b = self.base.get() as u64;
        let m = self.m;
        let d = self.dim();
        let n_points = self.num_points();
        let mut numerators = Vec::with_capacity(n_points as usize * d);
        let mut digits = vec![0u8; m];
        for n in 0..n_points {
            let mut r = n;
            for dig in digits.iter_mut() {
                *dig = (r % b) as u8;
                r /= b;
            }
            for c in &self.matrices {
                let y = c.mul_vec(&digits).unwrap();
                numerators.push(digits_to_numerator(&y, b));
            }
        }
        PointSet::from_grid(d, self.base.get(), m as u32, numerators).unwrap()
    }
}

fn check_m(m: usize, min: usize) -> Result<()> {
    if m < min {
        return Err(Error::invalid(format!("m must be at least {min}, got {m}")));
    }
    Ok(())
}

fn check_bits(v: &[u8], len: usize, name: &str) -> Result<()> {
    if v.len() != len {
        return Err(Error::invalid(format!(
            "{name} must have {len} entries, got {}",
            v.len()
        )));
    }
    if v.iter().any(|&x| x > 1) {
        return Err(Error::invalid(format!("{name} must be a bit vector")));
    }
    Ok(())
}

/// `y_1 b^{m-1} + ... + y_m`, i.e. the numerator of `y_1/b + ... + y_m/b^m`.
pub fn digits_to_numerator(y: &[u8], b: u64) -> u64 {
    y.iter().fold(0u64, |acc, &yi| acc * b + yi as u64)
}

/// Inverse of [`digits_to_numerator`]: most significant digit first.
pub fn numerator_to_digits(x: u64, b: u64, m: usize) -> Vec<u8> {
    let mut out = vec![0u8; m];
    let mut r = x;
    for slot in out.iter_mut().rev() {
        *slot = (r % b) as u8;
        r /= b;
    }
    out
}

/// Largest double strictly below one.
pub(crate) const ONE_MINUS: f64 = 1.0 - f64::EPSILON / 2.0;

/// Exact part of a point set on the grid `b^{-m} Z`, optionally with
/// per-point real offsets in `[0, b^{-m})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    base: u32,
    depth: u32,
    numerators: Vec<u64>,
    offsets: Option<Vec<f64>>,
}

impl Grid {
    #[inline]
    pub fn base(&self) -> u32 {
        self.base
    }

    #[inline]
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Row-major `N x d` numerators; the denominator is `b^m`.
    #[inline]
    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    #[inline]
    pub fn offsets(&self) -> Option<&[f64]> {
        self.offsets.as_deref()
    }

    pub fn denominator(&self) -> u64 {
        (self.base as u64).pow(self.depth)
    }
}

/// `N` points in `[0, 1)^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    grid: Option<Grid>,
}

impl PointSet {
    pub fn from_coords(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim * (coords.len() / dim + 1),
                found: coords.len(),
            });
        }
        if let Some(x) = coords.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::invalid(format!("coordinate {x} outside [0, 1)")));
        }
        Ok(PointSet { dim, coords, grid: None })
    }

    pub fn from_grid(dim: usize, base: u32, depth: u32, numerators: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if numerators.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim * (numerators.len() / dim + 1),
                found: numerators.len(),
            });
        }
        let denom = (base as u64)
            .checked_pow(depth)
            .filter(|&q| q <= 1 << 53)
            .ok_or_else(|| Error::invalid("grid denominator exceeds 2^53"))?;
        if let Some(x) = numerators.iter().find(|&&x| x >= denom) {
            return Err(Error::invalid(format!("numerator {x} not below b^m = {denom}")));
        }
        let q = denom as f64;
        let coords = numerators.iter().map(|&x| x as f64 / q).collect();
        Ok(PointSet {
            dim,
            coords,
            grid: Some(Grid {
                base,
                depth,
                numerators,
                offsets: None,
            }),
        })
    }

    /// `n` independent uniform points.
    pub fn random(n: usize, dim: usize, seed: u64) -> Self {
        let mut r = rng(seed, 0);
        let coords = (0..n * dim).map(|_| r.gen::<f64>()).collect();
        PointSet { dim, coords, grid: None }
    }

    pub fn empty(dim: usize) -> Self {
        PointSet {
            dim,
            coords: Vec::new(),
            grid: None,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    /// Exact grid points without real offsets.
    pub fn is_exact(&self) -> bool {
        self.grid.as_ref().is_some_and(|g| g.offsets.is_none())
    }

    /// The grid, if the set is exact.
    pub fn exact_grid(&self) -> Result<&Grid> {
        self.grid
            .as_ref()
            .filter(|g| g.offsets.is_none())
            .ok_or(Error::NotExact)
    }

    /// Number of binary digits of a base-2 exact grid.
    pub fn dyadic_depth(&self) -> Option<u32> {
        self.grid
            .as_ref()
            .filter(|g| g.offsets.is_none() && g.base == 2)
            .map(|g| g.depth)
    }

    /// Same points in a different order; `perm[i]` is the old index of new point `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let d = self.dim;
        let pick = |v: &[f64]| perm.iter().flat_map(|&i| v[i * d..(i + 1) * d].iter().copied()).collect();
        PointSet {
            dim: d,
            coords: pick(&self.coords),
            grid: self.grid.as_ref().map(|g| Grid {
                base: g.base,
                depth: g.depth,
                numerators: perm
                    .iter()
                    .flat_map(|&i| g.numerators[i * d..(i + 1) * d].iter().copied())
                    .collect(),
                offsets: g.offsets.as_ref().map(|o| pick(o)),
            }),
        }
    }
}

/// Shift digits `sigma` (one vector of `m` digits per coordinate) plus
/// optional per-point offsets `delta` in `[0, b^{-m})`.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitalShift {
    base: u32,
    depth: usize,
    sigma: Vec<Vec<u8>>,
    deltas: Option<Vec<f64>>,
    seed: Option<u64>,
}

impl DigitalShift {
    pub fn zero(base: u32, depth: usize, dim: usize) -> Self {
        DigitalShift {
            base,
            depth,
            sigma: vec![vec![0; depth]; dim],
            deltas: None,
            seed: None,
        }
    }

    pub fn new(base: u32, depth: usize, sigma: Vec<Vec<u8>>, deltas: Option<Vec<f64>>) -> Result<Self> {
        if sigma.iter().any(|s| s.len() != depth) {
            return Err(Error::invalid("every shift vector needs exactly m digits"));
        }
        if sigma.iter().flatten().any(|&s| s as u32 >= base) {
            return Err(Error::invalid("shift digit not below the base"));
        }
        if let Some(ds) = &deltas {
            let width = 1.0 / libm::pow(base as f64, depth as f64);
            if ds.len() % sigma.len().max(1) != 0 || ds.iter().any(|&x| !(0.0..width).contains(&x)) {
                return Err(Error::invalid("offsets must lie in [0, b^-m) and cover N x d entries"));
            }
        }
        Ok(DigitalShift {
            base,
            depth,
            sigma,
            deltas,
            seed: None,
        })
    }

    /// Uniform digits for every coordinate; with `n_points = Some(N)` also
    /// uniform offsets for every point and coordinate.
    pub fn random(base: u32, depth: usize, dim: usize, n_points: Option<usize>, seed: u64, stream: u64) -> Self {
        let mut r = rng(seed, stream);
        let sigma = (0..dim)
            .map(|_| (0..depth).map(|_| r.gen_range(0..base) as u8).collect())
            .collect();
        let width = 1.0 / libm::pow(base as f64, depth as f64);
        let deltas = n_points.map(|n| (0..n * dim).map(|_| r.gen::<f64>() * width).collect());
        DigitalShift {
            base,
            depth,
            sigma,
            deltas,
            seed: Some(seed),
        }
    }

    #[inline]
    pub fn sigma(&self) -> &[Vec<u8>] {
        &self.sigma
    }

    #[inline]
    pub fn deltas(&self) -> Option<&[f64]> {
        self.deltas.as_deref()
    }

    #[inline]
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Shift of the two-dimensional families: `sigma` acts on the second
    /// coordinate only, the first coordinate is left unshifted.
    pub fn second_coordinate(m: usize, sigma: &[u8]) -> Result<Self> {
        Self::new(2, m, vec![vec![0; m], sigma.to_vec()], None)
    }

    /// Digitwise complement `sigma_i -> b - 1 - sigma_i` of coordinate `j`
    /// (for `b = 2` and `j = 1` this is `sigma*`).
    pub fn complement(&self, j: usize) -> Self {
        let b = self.base as u8;
        let mut out = self.clone();
        for x in out.sigma[j].iter_mut() {
            *x = b - 1 - *x;
        }
        out
    }
}

/// Adds `sigma` digitwise mod `b` to the first `m` digits of every
/// coordinate, then the offsets when present (result is then non-exact).
pub fn apply_shift(ps: &PointSet, shift: &DigitalShift) -> Result<PointSet> {
    let g = ps.exact_grid()?;
    if g.base != shift.base || g.depth as usize != shift.depth {
        return Err(Error::invalid(format!(
            "shift of base {} depth {} applied to grid of base {} depth {}",
            shift.base, shift.depth, g.base, g.depth
        )));
    }
    if shift.sigma.len() != ps.dim {
        return Err(Error::DimensionMismatch {
            expected: ps.dim,
            found: shift.sigma.len(),
        });
    }
    let b = g.base as u64;
    let m = g.depth as usize;
    let d = ps.dim;
    let numerators: Vec<u64> = g
        .numerators
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let s = &shift.sigma[i % d];
            let mut digits = numerator_to_digits(x, b, m);
            for (z, &si) in digits.iter_mut().zip(s) {
                *z = ((*z as u64 + si as u64) % b) as u8;
            }
            digits_to_numerator(&digits, b)
        })
        .collect();
    let mut out = PointSet::from_grid(d, g.base, g.depth, numerators)?;
    if let Some(ds) = &shift.deltas {
        if ds.len() != out.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: out.coords.len(),
                found: ds.len(),
            });
        }
        for (c, &delta) in out.coords.iter_mut().zip(ds) {
            *c = (*c + delta).min(ONE_MINUS);
        }
        out.grid.as_mut().unwrap().offsets = Some(ds.clone());
    }
    Ok(out)
}

/// `P ∪ {(x, 1 - 2^{-m} - y)}` for an exact base-2 grid set in dimension 2;
/// the reflected copy follows the originals.
pub fn symmetrize(ps: &PointSet) -> Result<PointSet> {
    if ps.dim != 2 {
        return Err(Error::invalid(format!("symmetrize requires d = 2, got d = {}", ps.dim)));
    }
    let g = ps.exact_grid()?;
    if g.base != 2 {
        return Err(Error::invalid("symmetrize requires base 2"));
    }
    let top = g.denominator() - 1;
    let mut numerators = g.numerators.clone();
    numerators.extend(g.numerators.chunks_exact(2).flat_map(|p| [p[0], top - p[1]]));
    PointSet::from_grid(2, 2, g.depth, numerators)
}
