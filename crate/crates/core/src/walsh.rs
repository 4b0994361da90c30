//! Base-`b` Walsh analysis of digital nets.
//!
//! Walsh functions, the weights `ρ_b(k)` of the periodic kernel in the Walsh
//! basis, the Fourier coefficients `β_{h,k}` of a Walsh function, dual nets and
//! their enumeration, and the mean-square periodic L2 discrepancy of a net
//! under a random digital shift of depth `m`.
//!
//! Frequencies are digit vectors with the least significant digit first:
//! `k = κ_0 + κ_1 b + ... + κ_{a-1} b^{a-1}`. A point `x = Σ ξ_i b^{-i}`
//! pairs `κ_{i-1}` with `ξ_i`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::exact::periodic_l2_sq_exact;
use crate::field::{MatrixZb, PrimeBase};
use crate::metrics::periodic_l2;
use crate::nets::{apply_shift, numerator_to_digits, DigitalShift, GeneratorSet, PointSet};
use crate::sum::{tree_reduce, Executor, Neumaier, Sequential};
use crate::{Error, Rational, Result};

/// Default cap on the number of enumerated dual frequencies.
pub const DEFAULT_DUAL_LIMIT: u128 = 1 << 24;

/// Cap on the number of shifts in the exhaustive shift average.
pub const EXHAUSTIVE_SHIFT_LIMIT: u128 = 1 << 20;

const CHUNK: u128 = 1 << 12;

fn unit(num: u64, den: u64) -> Complex64 {
    let t = 2.0 * PI * (num % den) as f64 / den as f64;
    Complex64::new(libm::cos(t), libm::sin(t))
}

fn ipow(b: u64, e: usize) -> u64 {
    (0..e).fold(1u64, |acc, _| acc.saturating_mul(b))
}

fn digit_count(b: u64, mut k: u64) -> usize {
    let mut a = 0;
    while k > 0 {
        k /= b;
        a += 1;
    }
    a
}

/// A frequency vector with every entry below `b^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshFrequency {
    base: u32,
    m: usize,
    k: Vec<u64>,
    digits: Vec<Vec<u8>>,
}

impl WalshFrequency {
    pub fn new(base: u32, m: usize, k: Vec<u64>) -> Result<Self> {
        PrimeBase::new(base)?;
        let q = ipow(base as u64, m);
        if let Some(&bad) = k.iter().find(|&&x| x >= q) {
            return Err(Error::invalid(format!("frequency {bad} is not below {base}^{m}")));
        }
        let digits = k
            .iter()
            .map(|&x| {
                let mut v = numerator_to_digits(x, base as u64, m);
                v.reverse();
                v
            })
            .collect();
        Ok(WalshFrequency { base, m, k, digits })
    }

    fn from_digits(base: u32, m: usize, digits: Vec<Vec<u8>>) -> Self {
        let k = digits
            .iter()
            .map(|v| v.iter().rev().fold(0u64, |acc, &x| acc * base as u64 + x as u64))
            .collect();
        WalshFrequency { base, m, k, digits }
    }

    #[inline]
    pub fn k(&self) -> &[u64] {
        &self.k
    }

    /// Digits of coordinate `j`, least significant first, `m` of them.
    #[inline]
    pub fn digits(&self, j: usize) -> &[u8] {
        &self.digits[j]
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn is_zero(&self) -> bool {
        self.k.iter().all(|&x| x == 0)
    }
}

/// `wal_k(x)` for real `x`; digits are read from `x` directly, with values
/// within `1e-9` of a `b`-adic grid point snapped to it.
pub fn wal_eval(k: &WalshFrequency, x: &[f64]) -> Result<Complex64> {
    if x.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: x.len(),
        });
    }
    let b = k.base as u64;
    let q = ipow(b, k.m) as f64;
    let mut z = Complex64::new(1.0, 0.0);
    for (j, &xj) in x.iter().enumerate() {
        let s = xj * q;
        let r = libm::round(s);
        let num = if (s - r).abs() < 1e-9 * q.max(1.0) { r } else { libm::floor(s) };
        z *= wal_grid_1d(b, k.m, k.digits(j), num as u64);
    }
    Ok(z)
}

fn phase_1d(b: u64, m: usize, kd: &[u8], num: u64) -> u64 {
    // ξ_{i+1} is digit m-1-i of the numerator
    let mut s = 0u64;
    let mut x = num;
    for i in (0..m).rev() {
        s += kd[i] as u64 * (x % b);
        x /= b;
    }
    s % b
}

fn wal_grid_1d(b: u64, m: usize, kd: &[u8], num: u64) -> Complex64 {
    unit(phase_1d(b, m, kd, num), b)
}

/// `wal_k` at a grid point with numerators over `b^m`.
pub fn wal_eval_grid(k: &WalshFrequency, numerators: &[u64]) -> Complex64 {
    let b = k.base as u64;
    let phase: u64 = numerators
        .iter()
        .enumerate()
        .map(|(j, &x)| phase_1d(b, k.m, k.digits(j), x))
        .sum();
    unit(phase % b, b)
}

fn reverse_bits(x: u64, m: usize) -> u64 {
    if m == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - m)
    }
}

/// `Σ_n wal_k(x_n)` over the points of the net, computed point by point.
/// Base 2 uses the real `±1` path.
pub fn char_sum(gens: &GeneratorSet, k: &WalshFrequency) -> Result<Complex64> {
    check_frequency(gens, k)?;
    let ps = gens.generate();
    let g = ps.exact_grid()?;
    let (b, m, d) = (gens.base().get() as u64, gens.m(), gens.dim());
    if b == 2 {
        let mut s: i64 = 0;
        for x in g.numerators().chunks_exact(d) {
            let ones: u32 = x.iter().zip(k.k()).map(|(&xj, &kj)| (kj & reverse_bits(xj, m)).count_ones()).sum();
            s += if ones % 2 == 0 { 1 } else { -1 };
        }
        return Ok(Complex64::new(s as f64, 0.0));
    }
    // tally the phases, then combine the roots of unity once
    let mut tally = vec![0u64; b as usize];
    for x in g.numerators().chunks_exact(d) {
        let p: u64 = x.iter().enumerate().map(|(j, &xj)| phase_1d(b, m, k.digits(j), xj)).sum();
        tally[(p % b) as usize] += 1;
    }
    Ok(tally
        .iter()
        .enumerate()
        .map(|(r, &c)| unit(r as u64, b) * c as f64)
        .sum())
}

fn check_frequency(gens: &GeneratorSet, k: &WalshFrequency) -> Result<()> {
    if k.dim() != gens.dim() {
        return Err(Error::DimensionMismatch {
            expected: gens.dim(),
            found: k.dim(),
        });
    }
    if k.base != gens.base().get() || k.m != gens.m() {
        return Err(Error::invalid("frequency base or depth differs from the net"));
    }
    Ok(())
}

/// `Σ_j C_jᵀ k_j = 0`.
pub fn in_dual(gens: &GeneratorSet, k: &WalshFrequency) -> Result<bool> {
    check_frequency(gens, k)?;
    let bz = gens.base();
    let m = gens.m();
    let mut acc = vec![0u8; m];
    for (j, c) in gens.matrices().iter().enumerate() {
        let v = c.transpose().mul_vec(k.digits(j))?;
        for (a, x) in acc.iter_mut().zip(v) {
            *a = bz.add(*a, x);
        }
    }
    Ok(acc.iter().all(|&x| x == 0))
}

fn sin2(kappa: u64, b: u64) -> f64 {
    let s = libm::sin(kappa as f64 * PI / b as f64);
    s * s
}

/// `ρ_b(k)`: 1 for `k = 0`; otherwise, with `a` digits and leading digit `κ`,
/// `(3/b^{2a})(-1/3 + 1/(2 sin²(κπ/b)))` if `k = κ b^{a-1}` and
/// `(3/b^{2a})(-1/3 + 1/sin²(κπ/b))` if lower digits are present.
pub fn rho_b(b: u32, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let b = b as u64;
    let a = digit_count(b, k);
    let low = ipow(b, a - 1);
    let kappa = k / low;
    let s = sin2(kappa, b);
    let inner = if k % low == 0 { -1.0 / 3.0 + 1.0 / (2.0 * s) } else { -1.0 / 3.0 + 1.0 / s };
    3.0 * inner / libm::pow(b as f64, 2.0 * a as f64)
}

/// `ρ_b(k)` as a fraction; only bases where `sin²(κπ/b)` is rational for
/// every `κ`, that is `b ∈ {2, 3}`.
pub fn rho_b_exact(b: u32, k: u64) -> Result<Rational> {
    let (lead, other) = match b {
        2 => ((1, 2), (2, 1)),
        3 => ((1, 1), (3, 1)),
        _ => return Err(Error::NotExact),
    };
    if k == 0 {
        return Ok(Rational::one());
    }
    let a = digit_count(b as u64, k);
    let low = ipow(b as u64, a - 1);
    let (n, d) = if k % low == 0 { lead } else { other };
    let den = BigInt::from(d) * num_traits::pow(BigInt::from(b), 2 * a);
    Ok(Rational::new(BigInt::from(n), den))
}

/// `Σ_{k < b^m} ρ_b(k)`.
pub fn rho_sum(b: u32, m: usize) -> f64 {
    (0..ipow(b as u64, m)).map(|k| rho_b(b, k)).collect::<Neumaier>().total()
}

pub fn rho_sum_exact(b: u32, m: usize) -> Result<Rational> {
    let mut s = Rational::zero();
    for k in 0..ipow(b as u64, m) {
        s += rho_b_exact(b, k)?;
    }
    Ok(s)
}

/// `β_{h,k} = ∫_0^1 e^{-2πihx} wal_k(x) dx`, integrated exactly over the
/// `b`-adic cells of length `b^{-a}` on which `wal_k` is constant:
/// `Π_{i=1}^{a} Σ_ξ e^{2πiξ(κ_{i-1}/b - h b^{-i})} · ∫_0^{b^{-a}} e^{-2πihu} du`.
pub fn beta(b: u32, h: i64, k: u64) -> Complex64 {
    let b = b as u64;
    let a = digit_count(b, k);
    let mut rest = k;
    let mut z = Complex64::new(1.0, 0.0);
    for i in 1..=a {
        let kappa = rest % b;
        rest /= b;
        let q = ipow(b, i);
        // θ = (κ b^{i-1} - h) / b^i, reduced mod 1
        let r = (kappa as i128 * ipow(b, i - 1) as i128 - h as i128).rem_euclid(q as i128) as u64;
        let s: Complex64 = (0..b).map(|xi| unit((xi as u128 * r as u128 % q as u128) as u64, q)).sum();
        z *= s;
    }
    let width = 1.0 / ipow(b, a) as f64;
    let integral = if h == 0 {
        Complex64::new(width, 0.0)
    } else {
        let q = ipow(b, a) as i128;
        let e = unit(0, 1) - unit((-(h as i128)).rem_euclid(q) as u64, q as u64);
        e / Complex64::new(0.0, 2.0 * PI * h as f64)
    };
    z * integral
}

/// Truncated series `Σ_{|h| <= hmax} |β_{h,k}|² / r(h)²` with
/// `1/r(h)² = 3/(2π²h²)` and `r(0) = 1`.
pub fn rho_series(b: u32, k: u64, hmax: i64) -> f64 {
    let mut acc = Neumaier::new();
    acc.add(beta(b, 0, k).norm_sqr());
    for h in (1..=hmax).rev() {
        let w = 3.0 / (2.0 * PI * PI * (h * h) as f64);
        acc.add(w * beta(b, h, k).norm_sqr());
        acc.add(w * beta(b, -h, k).norm_sqr());
    }
    acc.total()
}

/// `Σ_{κ=1}^{b-1} 1/sin²(κπ/b)`, which equals `(b² - 1)/3`.
pub fn sin2_identity_sum(b: u32) -> f64 {
    (1..b as u64).map(|k| 1.0 / sin2(k, b as u64)).sum()
}

/// A basis of the dual net `{k : Σ_j C_jᵀ k_j = 0}` inside `[0, b^m)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualNetBasis {
    base: u32,
    m: usize,
    d: usize,
    vectors: Vec<Vec<u8>>,
}

impl DualNetBasis {
    /// Each vector holds `d·m` digits, coordinate after coordinate.
    pub fn vectors(&self) -> &[Vec<u8>] {
        &self.vectors
    }

    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    /// `b^{dimension}`, or `None` past `u128`.
    pub fn size(&self) -> Option<u128> {
        (self.base as u128).checked_pow(self.dimension() as u32)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

pub fn dual_net_basis(gens: &GeneratorSet) -> DualNetBasis {
    let bz = gens.base();
    let (m, d) = (gens.m(), gens.dim());
    let mut stacked = MatrixZb::zeros(bz, m, d * m);
    for (j, c) in gens.matrices().iter().enumerate() {
        for r in 0..m {
            for i in 0..m {
                // row r of Cᵀ is column r of C
                stacked.set(r, j * m + i, c.get(i, r));
            }
        }
    }
    DualNetBasis {
        base: bz.get(),
        m,
        d,
        vectors: stacked.kernel_basis(),
    }
}

fn limit_check(basis: &DualNetBasis, limit: u128) -> Result<u128> {
    match basis.size() {
        Some(n) if n <= limit => Ok(n),
        other => Err(Error::LimitExceeded {
            required: other.unwrap_or(u128::MAX),
            limit,
        }),
    }
}

/// Modular Gray-code walk over the span: the vector for counter `c` has
/// coefficients `g_i = (c_i - c_{i+1}) mod b`, and each increment adds the
/// basis vector at the incremented digit.
struct GrayWalk<'a> {
    basis: &'a DualNetBasis,
    counter: Vec<u8>,
    current: Vec<u8>,
    remaining: u128,
}

impl<'a> GrayWalk<'a> {
    fn starting_at(basis: &'a DualNetBasis, start: u128, count: u128) -> Self {
        let b = basis.base as u128;
        let r = basis.dimension();
        let mut counter = vec![0u8; r];
        let mut s = start;
        for c in counter.iter_mut() {
            *c = (s % b) as u8;
            s /= b;
        }
        let mut current = vec![0u8; basis.d * basis.m];
        for i in 0..r {
            let next = if i + 1 < r { counter[i + 1] } else { 0 };
            let g = (counter[i] as u32 + basis.base - next as u32) % basis.base;
            for (x, &v) in current.iter_mut().zip(&basis.vectors[i]) {
                *x = ((*x as u32 + g * v as u32) % basis.base) as u8;
            }
        }
        GrayWalk {
            basis,
            counter,
            current,
            remaining: count,
        }
    }

    fn advance(&mut self) {
        let top = self.basis.base as u8 - 1;
        let Some(p) = self.counter.iter().position(|&c| c != top) else {
            return;
        };
        for c in &mut self.counter[..p] {
            *c = 0;
        }
        self.counter[p] += 1;
        let b = self.basis.base;
        for (x, &v) in self.current.iter_mut().zip(&self.basis.vectors[p]) {
            *x = ((*x as u32 + v as u32) % b) as u8;
        }
    }
}

impl Iterator for GrayWalk<'_> {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.current.clone();
        self.remaining -= 1;
        if self.remaining > 0 {
            self.advance();
        }
        Some(out)
    }
}

fn frequency_of(basis: &DualNetBasis, digits: &[u8]) -> WalshFrequency {
    WalshFrequency::from_digits(basis.base, basis.m, digits.chunks_exact(basis.m).map(|c| c.to_vec()).collect())
}

/// Every dual frequency in `[0, b^m)^d`, zero first.
pub fn dual_enumerate(basis: &DualNetBasis, limit: u128) -> Result<impl Iterator<Item = WalshFrequency> + '_> {
    let n = limit_check(basis, limit)?;
    Ok(GrayWalk::starting_at(basis, 0, n).map(move |v| frequency_of(basis, &v)))
}

fn integer_of(b: u64, digits: &[u8]) -> u64 {
    digits.iter().rev().fold(0, |acc, &x| acc * b + x as u64)
}

/// `Σ_{k ∈ dual, k ≠ 0} Π_j ρ_b(k_j)` over frequencies below `b^m`.
pub fn dual_rho_sum_with<E: Executor + ?Sized>(gens: &GeneratorSet, limit: u128, exec: &E) -> Result<f64> {
    let basis = dual_net_basis(gens);
    let n = limit_check(&basis, limit)?;
    let (b, m) = (basis.base, basis.m);
    let chunks = n.div_ceil(CHUNK);
    let partial = exec.map(chunks as usize, &|c| {
        let start = c as u128 * CHUNK;
        let walk = GrayWalk::starting_at(&basis, start, CHUNK.min(n - start));
        let mut acc = Neumaier::new();
        for v in walk {
            let w: f64 = v.chunks_exact(m).map(|kj| rho_b(b, integer_of(b as u64, kj))).product();
            acc.add(w);
        }
        acc.total()
    });
    // remove the k = 0 term, which contributes exactly 1
    Ok(tree_reduce(&partial) - 1.0)
}

/// Mean-square periodic L2 discrepancy over depth-`m` digital shifts:
/// `(b^{2m}/3^d) Σ_{k ∈ dual*, k < b^m} Π_j ρ_b(k_j)`.
pub fn expected_periodic_l2_sq(gens: &GeneratorSet) -> Result<f64> {
    expected_periodic_l2_sq_with(gens, DEFAULT_DUAL_LIMIT, &Sequential)
}

pub fn expected_periodic_l2_sq_with<E: Executor + ?Sized>(gens: &GeneratorSet, limit: u128, exec: &E) -> Result<f64> {
    let s = dual_rho_sum_with(gens, limit, exec)?;
    let n = gens.num_points() as f64;
    Ok(n * n * s / libm::pow(3.0, gens.dim() as f64))
}

/// Rational form of [`expected_periodic_l2_sq`] for `b ∈ {2, 3}`.
pub fn expected_periodic_l2_sq_exact(gens: &GeneratorSet, limit: u128) -> Result<Rational> {
    let basis = dual_net_basis(gens);
    let b = basis.base;
    if b != 2 && b != 3 {
        return Err(Error::NotExact);
    }
    let mut s = Rational::zero();
    for k in dual_enumerate(&basis, limit)?.skip(1) {
        let mut w = Rational::one();
        for &kj in k.k() {
            w *= rho_b_exact(b, kj)?;
        }
        s += w;
    }
    let n = BigInt::from(gens.num_points());
    Ok(s * Rational::from_integer(&n * &n) / Rational::from_integer(num_traits::pow(BigInt::from(3), gens.dim())))
}

/// The diagonal correction `(N/3^d)((3/2)^d - S_m^d)`, `S_m = Σ_{k<b^m} ρ_b(k)`,
/// that the Walsh-diagonal formula omits when the offsets are drawn too: the
/// `n = p` pairs contribute `(3/2)^d` each, not `S_m^d`.
pub fn diagonal_correction(gens: &GeneratorSet) -> f64 {
    let d = gens.dim() as f64;
    let s = rho_sum(gens.base().get(), gens.m());
    gens.num_points() as f64 * (libm::pow(1.5, d) - libm::pow(s, d)) / libm::pow(3.0, d)
}

/// Expectation over fully randomized shifts (digits and offsets):
/// [`expected_periodic_l2_sq`] plus [`diagonal_correction`].
pub fn expected_periodic_l2_sq_randomized(gens: &GeneratorSet) -> Result<f64> {
    Ok(expected_periodic_l2_sq(gens)? + diagonal_correction(gens))
}

pub fn expected_periodic_l2_sq_randomized_exact(gens: &GeneratorSet, limit: u128) -> Result<Rational> {
    let d = gens.dim();
    let s = rho_sum_exact(gens.base().get(), gens.m())?;
    let three_halves = Rational::new(BigInt::from(3), BigInt::from(2));
    let diag = num_traits::pow(three_halves, d) - num_traits::pow(s, d);
    let n = Rational::from_integer(BigInt::from(gens.num_points()));
    let corr = n * diag / Rational::from_integer(num_traits::pow(BigInt::from(3), d));
    Ok(expected_periodic_l2_sq_exact(gens, limit)? + corr)
}

/// Average of the exact periodic L2² over all `b^{dm}` digit shifts, offsets
/// zero.
pub fn exhaustive_shift_average_exact(gens: &GeneratorSet) -> Result<Rational> {
    let (b, m, d) = (gens.base().get(), gens.m(), gens.dim());
    let total = (b as u128).checked_pow((d * m) as u32).unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_SHIFT_LIMIT {
        return Err(Error::LimitExceeded {
            required: total,
            limit: EXHAUSTIVE_SHIFT_LIMIT,
        });
    }
    let ps = gens.generate();
    let mut digits = vec![0u8; d * m];
    let mut sum = Rational::zero();
    for _ in 0..total {
        let sigma = digits.chunks_exact(m).map(|c| c.to_vec()).collect();
        let shift = DigitalShift::new(b, m, sigma, None)?;
        sum += periodic_l2_sq_exact(&apply_shift(&ps, &shift)?)?;
        for x in digits.iter_mut() {
            *x += 1;
            if (*x as u32) < b {
                break;
            }
            *x = 0;
        }
    }
    Ok(sum / Rational::from_integer(BigInt::from(total)))
}

/// Sample mean of the periodic L2² over random depth-`m` shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftAverage {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sample `i` uses [`DigitalShift::random`] with stream `i`, drawing digits
/// and, when `with_offsets`, offsets.
pub fn shift_average_mc_with<E: Executor + ?Sized>(
    gens: &GeneratorSet,
    samples: usize,
    seed: u64,
    with_offsets: bool,
    exec: &E,
) -> Result<ShiftAverage> {
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let ps: PointSet = gens.generate();
    let (b, m, d) = (gens.base().get(), gens.m(), gens.dim());
    let n = ps.len();
    let values = exec.map(samples, &|i| {
        let shift = DigitalShift::random(b, m, d, with_offsets.then_some(n), seed, i as u64);
        let shifted = apply_shift(&ps, &shift).expect("shift matches the net");
        periodic_l2(&shifted).value_squared.unwrap_or(f64::NAN)
    });
    // Welford in sample order keeps the result independent of the executor
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok(ShiftAverage {
        mean,
        stderr: libm::sqrt(var / samples as f64),
        samples,
        seed,
    })
}

/// Fully randomized shifts (digits and offsets), sequential.
pub fn shift_average_mc(gens: &GeneratorSet, samples: usize, seed: u64) -> Result<ShiftAverage> {
    shift_average_mc_with(gens, samples, seed, true, &Sequential)
}

/// Per-support decomposition `B(u) = Σ_{k ∈ dual, supp k = u} Π_{j∈u} ρ_b(k_j)`,
/// indexed by the bitmask of `u` (entry 0 is the zero frequency).
pub fn support_decomposition(gens: &GeneratorSet, limit: u128) -> Result<Vec<f64>> {
    let d = gens.dim();
    if d > 16 {
        return Err(Error::invalid("support decomposition needs d <= 16"));
    }
    let basis = dual_net_basis(gens);
    let b = basis.base;
    let mut acc: Vec<Neumaier> = (0..1usize << d).map(|_| Neumaier::new()).collect();
    for k in dual_enumerate(&basis, limit)? {
        let mask = k.k().iter().enumerate().fold(0usize, |s, (j, &x)| s | (usize::from(x != 0) << j));
        acc[mask].add(k.k().iter().map(|&x| rho_b(b, x)).product());
    }
    Ok(acc.iter().map(Neumaier::total).collect())
}

/// `b^{2t-2m} (m-t)^{|u|-1} b^{2|u|}`.
pub fn b_bound(b: u32, m: usize, t: usize, u_size: usize) -> f64 {
    let b = b as f64;
    libm::pow(b, 2.0 * t as f64 - 2.0 * m as f64)
        * libm::pow((m - t) as f64, u_size as f64 - 1.0)
        * libm::pow(b, 2.0 * u_size as f64)
}

/// `b^{2t} (m-t)^{d-1} ((1+b²)/3)^d`; for `t = m` and `d >= 2` this is 0.
pub fn thm12_bound(b: u32, m: usize, t: usize, d: usize) -> f64 {
    let b = b as f64;
    let mt = if d == 1 { 1.0 } else { libm::pow((m - t) as f64, d as f64 - 1.0) };
    libm::pow(b, 2.0 * t as f64) * mt * libm::pow((1.0 + b * b) / 3.0, d as f64)
}
