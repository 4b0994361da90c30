//! Dyadic Haar analysis of the anchored discrepancy function
//! `D(y) = A([0, y), P) - N·Π y_j`.
//!
//! Haar functions are `L∞`-normalized: `h_{j,m}` is `+1` on the left half of
//! `I_{j,m} = [m 2^{-j}, (m+1) 2^{-j})`, `-1` on the right half, and `h_{-1,0}`
//! is the indicator of `[0, 1)`. The coefficients are
//! `μ_{j,m} = Σ_n Π_i φ(x_{n,i}; j_i, m_i) - N Π_i ψ(j_i)` with
//! `φ(z) = ∫ 1[x > z] h(x) dx` and `ψ = ∫ x h(x) dx`, and the squared extreme
//! L2 discrepancy equals `Σ_{j ∈ N_0^d} 2^{|j|} Σ_m μ_{j,m}²`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::nets::PointSet;
use crate::{Error, Rational, Result};

/// Index `(j, m)` of a tensor Haar function, `j_i >= -1`, `m_i ∈ D_{j_i}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HaarIndex {
    pub j: Vec<i32>,
    pub m: Vec<u64>,
}

impl HaarIndex {
    pub fn new(j: Vec<i32>, m: Vec<u64>) -> Result<Self> {
        if j.len() != m.len() {
            return Err(Error::DimensionMismatch {
                expected: j.len(),
                found: m.len(),
            });
        }
        for (&ji, &mi) in j.iter().zip(&m) {
            let ok = match ji {
                -1 => mi == 0,
                0..=62 => mi < 1u64 << ji,
                _ => false,
            };
            if !ok {
                return Err(Error::invalid(format!("m = {mi} not in D_j for j = {ji}")));
            }
        }
        Ok(HaarIndex { j, m })
    }

    pub fn dim(&self) -> usize {
        self.j.len()
    }

    /// `Σ_i max(j_i, 0)`.
    pub fn level(&self) -> u32 {
        self.j.iter().map(|&j| j.max(0) as u32).sum()
    }
}

/// One-dimensional Haar value.
pub fn haar_1d(j: i32, m: u64, x: f64) -> i32 {
    if j < 0 {
        return 1;
    }
    let s = libm::ldexp(x, j);
    if s < m as f64 || s >= (m + 1) as f64 {
        return 0;
    }
    if s - (m as f64) < 0.5 {
        1
    } else {
        -1
    }
}

pub fn haar_eval(idx: &HaarIndex, x: &[f64]) -> i32 {
    idx.j
        .iter()
        .zip(&idx.m)
        .zip(x)
        .map(|((&j, &m), &xi)| haar_1d(j, m, xi))
        .product()
}

/// `φ(z; j, m) = ∫_z^1 h_{j,m}(x) dx`: `1 - z` for `j = -1`, otherwise
/// `-(z - L)` on the left half, `-(R - z)` on the right half and `0` outside.
pub fn phi(z: f64, j: i32, m: u64) -> f64 {
    if j < 0 {
        return 1.0 - z;
    }
    let w = libm::ldexp(1.0, -j);
    let l = m as f64 * w;
    let mid = l + w / 2.0;
    let r = l + w;
    if z < l || z >= r {
        0.0
    } else if z < mid {
        -(z - l)
    } else {
        -(r - z)
    }
}

/// `ψ(j) = ∫ x h_{j,m}(x) dx`: `-2^{-2j-2}` for `j >= 0`, `1/2` for `j = -1`.
pub fn psi(j: i32) -> f64 {
    if j < 0 {
        0.5
    } else {
        -libm::ldexp(1.0, -2 * j - 2)
    }
}

pub fn haar_coeff_d(ps: &PointSet, idx: &HaarIndex) -> Result<f64> {
    if idx.dim() != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: ps.dim(),
            found: idx.dim(),
        });
    }
    let mut s = 0.0;
    for z in ps.points() {
        let mut t = 1.0;
        for ((&j, &m), &zi) in idx.j.iter().zip(&idx.m).zip(z) {
            t *= phi(zi, j, m);
            if t == 0.0 {
                break;
            }
        }
        s += t;
    }
    let vol: f64 = idx.j.iter().map(|&j| psi(j)).product();
    Ok(s - ps.len() as f64 * vol)
}

/// Coefficient of `g` for a `2d` index `(j_1..j_d, k_1..k_d)`: zero unless
/// exactly one of `j_i`, `k_i` is `-1` for every `i`, in which case it is
/// `(-1)^{|u|} μ_{j',m'}(D)` with `u = {i : k_i = -1}`.
pub fn haar_coeff_g(ps: &PointSet, j2d: &[i32], m2d: &[u64]) -> Result<f64> {
    let d = ps.dim();
    if j2d.len() != 2 * d || m2d.len() != 2 * d {
        return Err(Error::DimensionMismatch {
            expected: 2 * d,
            found: j2d.len(),
        });
    }
    HaarIndex::new(j2d.to_vec(), m2d.to_vec())?;
    let mut jp = Vec::with_capacity(d);
    let mut mp = Vec::with_capacity(d);
    let mut u = 0;
    for i in 0..d {
        let (ji, ki) = (j2d[i], j2d[i + d]);
        match (ji == -1, ki == -1) {
            (false, true) => {
                jp.push(ji);
                mp.push(m2d[i]);
                u += 1;
            }
            (true, false) => {
                jp.push(ki);
                mp.push(m2d[i + d]);
            }
            _ => return Ok(0.0),
        }
    }
    let mu = haar_coeff_d(ps, &HaarIndex { j: jp, m: mp })?;
    Ok(if u % 2 == 0 { mu } else { -mu })
}

/// `μ` of a box that holds no point: `-N (-1)^d 2^{-2|j| - 2d}` for `j ∈ N_0^d`.
pub fn empty_box_coefficient(n: usize, j: &[u32]) -> f64 {
    let d = j.len() as i32;
    let lvl: i32 = j.iter().map(|&x| x as i32).sum();
    let sign = if d % 2 == 0 { -1.0 } else { 1.0 };
    sign * n as f64 * libm::ldexp(1.0, -2 * lvl - 2 * d)
}

fn group_by_box<'a>(ps: &'a PointSet, j: &[u32]) -> BTreeMap<Vec<u64>, Vec<&'a [f64]>> {
    let mut boxes: BTreeMap<Vec<u64>, Vec<&[f64]>> = BTreeMap::new();
    for z in ps.points() {
        let key = z
            .iter()
            .zip(j)
            .map(|(&c, &ji)| libm::floor(libm::ldexp(c, ji as i32)) as u64)
            .collect();
        boxes.entry(key).or_default().push(z);
    }
    boxes
}

/// `2^{|j|} Σ_m μ_{j,m}²` at one level `j ∈ N_0^d`, visiting only occupied boxes.
pub fn level_energy(ps: &PointSet, j: &[u32]) -> f64 {
    let lvl: u32 = j.iter().sum();
    let empty = empty_box_coefficient(ps.len(), j);
    let boxes = group_by_box(ps, j);
    let mut s = 0.0;
    for (key, members) in &boxes {
        let mut mu = empty;
        for z in members {
            let mut t = 1.0;
            for ((&zi, &ji), &mi) in z.iter().zip(j).zip(key) {
                t *= phi(zi, ji as i32, mi);
            }
            mu += t;
        }
        s += mu * mu;
    }
    let n_empty = libm::ldexp(1.0, lvl as i32) - boxes.len() as f64;
    libm::ldexp(s + n_empty * empty * empty, lvl as i32)
}

/// Calls `f` for every `j ∈ {0, ..., jmax}^d`.
pub(crate) fn for_each_level(d: usize, jmax: u32, f: &mut dyn FnMut(&[u32])) {
    let mut j = vec![0u32; d];
    loop {
        f(&j);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if j[i] < jmax {
                j[i] += 1;
                break;
            }
            j[i] = 0;
            i += 1;
        }
    }
}

/// Haar partial sum of the squared extreme L2 discrepancy.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarL2 {
    /// Largest level included.
    pub max_level: u32,
    /// `Σ_{j ∈ N_0^d, |j|_∞ <= J} 2^{|j|} Σ_m μ²`.
    pub partial: f64,
    /// Exact contribution of all levels with `|j|_∞ > J`, available for
    /// dyadic grid sets of depth `M` once `J >= M - 1`.
    pub tail: Option<f64>,
}

impl HaarL2 {
    pub fn total(&self) -> Option<f64> {
        self.tail.map(|t| self.partial + t)
    }
}

/// Partial sums for `J = 0, ..., jmax`.
pub fn partial_sums(ps: &PointSet, jmax: u32) -> Vec<f64> {
    let mut by_max = vec![0.0; jmax as usize + 1];
    for_each_level(ps.dim(), jmax, &mut |j| {
        let top = *j.iter().max().unwrap_or(&0) as usize;
        by_max[top] += level_energy(ps, j);
    });
    let mut acc = 0.0;
    by_max
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// `N² 2^{-4d} [(4/3)^d - (Σ_{j=0}^{J} 4^{-j})^d]`.
fn grid_tail(n: usize, d: usize, jmax: u32) -> f64 {
    let s: f64 = (0..=jmax).map(|j| libm::ldexp(1.0, -2 * j as i32)).sum();
    let nf = n as f64;
    nf * nf * libm::ldexp(1.0, -4 * d as i32) * (libm::pow(4.0 / 3.0, d as f64) - libm::pow(s, d as f64))
}

pub fn extreme_l2_via_haar(ps: &PointSet, jmax: u32) -> HaarL2 {
    let partial = *partial_sums(ps, jmax).last().unwrap();
    let tail = ps
        .dyadic_depth()
        .filter(|&depth| jmax + 1 >= depth)
        .map(|_| grid_tail(ps.len(), ps.dim(), jmax));
    HaarL2 {
        max_level: jmax,
        partial,
        tail,
    }
}

/// Exact dyadic rational coefficient: numerator over `2^e`.
struct Dyadic {
    num: BigInt,
    exp: u32,
}

fn grid_dyadic(ps: &PointSet) -> Result<(&[u64], u32)> {
    let depth = ps
        .dyadic_depth()
        .ok_or_else(|| Error::invalid("exact Haar coefficients need an exact base-2 grid"))?;
    Ok((ps.exact_grid()?.numerators(), depth))
}

/// `2^{max(M, 2j+2)} φ(X / 2^M; j, m)` as an integer.
fn phi_scaled(x: u64, depth: u32, j: u32, m: u64) -> (i128, u32) {
    let e = depth.max(2 * j + 2);
    let z = (x as i128) << (e - depth);
    let w = 1i128 << (e - j);
    let l = m as i128 * w;
    let mid = l + w / 2;
    let r = l + w;
    let v = if z < l || z >= r {
        0
    } else if z < mid {
        -(z - l)
    } else {
        -(r - z)
    };
    (v, e)
}

fn coeff_exact(n: usize, members: &[&[u64]], key: &[u64], depth: u32, j: &[u32]) -> Dyadic {
    let es: Vec<u32> = j.iter().map(|&ji| depth.max(2 * ji + 2)).collect();
    let exp: u32 = es.iter().sum();
    let mut num = BigInt::zero();
    for z in members {
        let mut t = BigInt::one();
        for i in 0..j.len() {
            let (v, _) = phi_scaled(z[i], depth, j[i], key[i]);
            t *= BigInt::from(v);
        }
        num += t;
    }
    // -N Π ψ with ψ = -2^{-2j-2} = -2^{e - 2j - 2} / 2^e
    let mut vol = BigInt::from(n as u64);
    for (i, &ji) in j.iter().enumerate() {
        vol *= -(BigInt::one() << (es[i] - 2 * ji - 2));
    }
    num -= vol;
    Dyadic { num, exp }
}

/// Exact Haar coefficient for a dyadic grid set and `j ∈ N_0^d`.
pub fn haar_coeff_d_exact(ps: &PointSet, j: &[u32], m: &[u64]) -> Result<Rational> {
    let (xs, depth) = grid_dyadic(ps)?;
    let d = ps.dim();
    let members: Vec<&[u64]> = xs
        .chunks_exact(d)
        .filter(|z| z.iter().zip(j).zip(m).all(|((&x, &ji), &mi)| (x << ji) >> depth == mi))
        .collect();
    let c = coeff_exact(ps.len(), &members, m, depth, j);
    Ok(Rational::new(c.num, BigInt::one() << c.exp))
}

/// Exact `2^{|j|} Σ_m μ_{j,m}²` for a dyadic grid set.
pub fn level_energy_exact(ps: &PointSet, j: &[u32]) -> Result<Rational> {
    let (xs, depth) = grid_dyadic(ps)?;
    let d = ps.dim();
    let lvl: u32 = j.iter().sum();
    let mut boxes: BTreeMap<Vec<u64>, Vec<&[u64]>> = BTreeMap::new();
    for z in xs.chunks_exact(d) {
        let key: Vec<u64> = z.iter().zip(j).map(|(&x, &ji)| (x << ji) >> depth).collect();
        boxes.entry(key).or_default().push(z);
    }
    let empty = coeff_exact(ps.len(), &[], &vec![0; d], depth, j);
    let mut sq = BigInt::zero();
    for (key, members) in &boxes {
        let c = coeff_exact(ps.len(), members, key, depth, j);
        sq += &c.num * &c.num;
    }
    let n_empty = (BigInt::one() << lvl) - BigInt::from(boxes.len());
    sq += n_empty * &empty.num * &empty.num;
    Ok(Rational::new(sq << lvl, BigInt::one() << (2 * empty.exp)))
}

/// Exact grid tail `N² 2^{-4d} [(4/3)^d - (Σ_{j<=J} 4^{-j})^d]`; requires
/// `J >= M - 1` for depth `M`.
pub fn grid_tail_exact(ps: &PointSet, jmax: u32) -> Result<Rational> {
    let (_, depth) = grid_dyadic(ps)?;
    if jmax + 1 < depth {
        return Err(Error::invalid("grid tail needs J >= M - 1"));
    }
    let d = ps.dim();
    let n = BigInt::from(ps.len());
    let mut s = Rational::zero();
    for j in 0..=jmax {
        s += Rational::new(BigInt::one(), BigInt::one() << (2 * j));
    }
    let four_thirds = Rational::new(BigInt::from(4), BigInt::from(3));
    let pow = |x: &Rational| num_traits::pow(x.clone(), d);
    Ok(Rational::from_integer(&n * &n) / Rational::from_integer(BigInt::one() << (4 * d)) * (pow(&four_thirds) - pow(&s)))
}

/// Exact squared extreme L2 discrepancy through the Haar identity.
pub fn extreme_l2_sq_via_haar_exact(ps: &PointSet) -> Result<Rational> {
    let (_, depth) = grid_dyadic(ps)?;
    let jmax = depth.saturating_sub(1);
    let mut total = grid_tail_exact(ps, jmax)?;
    let mut err = None;
    for_each_level(ps.dim(), jmax, &mut |j| match level_energy_exact(ps, j) {
        Ok(e) => total += e,
        Err(e) => err = Some(e),
    });
    err.map_or(Ok(total), Err)
}

/// `||(Σ_{j ∈ [0, J]^d} Σ_m 2^{2|j|} μ² 1_{I_{j,m}})^{1/2}||_{L_p}`.
///
/// The square function is constant on the `2^{Jd}` cells of side `2^{-J}`,
/// so the norm is a finite sum. `budget` caps the number of cell updates.
/// This is a diagnostic equivalent to the extreme L_p discrepancy only up to
/// constants depending on `p` and `d`.
pub fn square_function_lp(ps: &PointSet, p: f64, jmax: u32, budget: u64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must lie in (1, ∞), got {p}")));
    }
    let d = ps.dim();
    let cells_per_axis = 1u64 << jmax;
    let cells = (cells_per_axis as u128).pow(d as u32);
    let work = cells * (jmax as u128 + 1).pow(d as u32);
    if work > budget as u128 {
        return Err(Error::LimitExceeded {
            required: work,
            limit: budget as u128,
        });
    }
    let cells = cells as usize;
    let mut s2 = vec![0.0f64; cells];
    let mut base = 0.0;
    for_each_level(d, jmax, &mut |j| {
        let lvl: u32 = j.iter().sum();
        let w = libm::ldexp(1.0, 2 * lvl as i32);
        let empty = empty_box_coefficient(ps.len(), j);
        base += w * empty * empty;
        for (key, members) in group_by_box(ps, j) {
            let mut mu = empty;
            for z in &members {
                let mut t = 1.0;
                for ((&zi, &ji), &mi) in z.iter().zip(j).zip(&key) {
                    t *= phi(zi, ji as i32, mi);
                }
                mu += t;
            }
            let delta = w * (mu * mu - empty * empty);
            // fine cells inside the box: each axis i spans 2^{J - j_i} cells
            let mut idx = vec![0u64; d];
            loop {
                let mut flat = 0usize;
                for i in 0..d {
                    let c = (key[i] << (jmax - j[i])) + idx[i];
                    flat = flat * cells_per_axis as usize + c as usize;
                }
                s2[flat] += delta;
                let mut i = 0;
                loop {
                    if i == d {
                        break;
                    }
                    idx[i] += 1;
                    if idx[i] < 1 << (jmax - j[i]) {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
        }
    });
    let vol = 1.0 / cells as f64;
    let total: f64 = s2.iter().map(|&v| libm::pow((v + base).max(0.0), p / 2.0)).sum::<f64>() * vol;
    Ok(libm::pow(total, 1.0 / p))
}

/// Exact region sums over `J_1, ..., J_8` for the upper-1-net with `2^m` points.
///
/// Regions (`n = m`): `J_1 = {(j, 0) : j <= n-3}`,
/// `J_2 = {j_2 >= 1, j_1 + j_2 <= n-3}`, `J_3 = {j_2 >= 1, j_1 + j_2 = n-2}`,
/// `J_4 = {(n-2, 0)}`, `J_5 = {j_2 >= 1, j_1 + j_2 = n-1}`, `J_6 = {(n-1, 0)}`,
/// `J_7 = {max(j_1, j_2) >= n}`, `J_8 = {j_1 + j_2 >= n, 1 <= j_1, j_2 <= n-1}`.
pub fn region_sums_upper_one(m: usize) -> Result<[Rational; 8]> {
    if m < 2 {
        return Err(Error::invalid("region sums need m >= 2"));
    }
    let ps = crate::nets::GeneratorSet::upper_one(m)?.generate();
    region_sums(&ps, m as u32)
}

pub(crate) fn region_of(j1: u32, j2: u32, n: u32) -> usize {
    let s = j1 + j2;
    if j1 >= n || j2 >= n {
        6
    } else if j2 == 0 {
        if n >= 3 && j1 <= n - 3 {
            0
        } else if j1 + 2 == n {
            3
        } else {
            5
        }
    } else if s + 3 <= n {
        1
    } else if s + 2 == n {
        2
    } else if s + 1 == n {
        4
    } else {
        7
    }
}

/// Region sums of any two-dimensional dyadic grid set of depth `n`.
pub fn region_sums(ps: &PointSet, n: u32) -> Result<[Rational; 8]> {
    if ps.dim() != 2 || ps.dyadic_depth() != Some(n) {
        return Err(Error::invalid("region sums need a 2-D dyadic grid set of depth n"));
    }
    let mut out: [Rational; 8] = core::array::from_fn(|_| Rational::zero());
    let mut err = None;
    for_each_level(2, n - 1, &mut |j| match level_energy_exact(ps, j) {
        Ok(e) => out[region_of(j[0], j[1], n)] += e,
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    out[6] = grid_tail_exact(ps, n - 1)?;
    Ok(out)
}
