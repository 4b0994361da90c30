//! Star, extreme and periodic L2 discrepancy in exact rational arithmetic for
//! point sets on a `b`-adic grid.
//!
//! Every coordinate is `X / Q` with `Q = b^m`, so each per-coordinate kernel is
//! an integer over a fixed power of `Q`. The pair sums are accumulated as
//! integers (in `i128` when the bound allows, otherwise in big integers) and
//! combined into a reduced fraction at the end.

use alloc::string::ToString;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::metrics::{DiscrepancyReport, Method, Metric};
use crate::nets::PointSet;
use crate::{Error, Rational, Result};

/// Largest point count accepted by the rational evaluators.
pub const EXACT_MAX_POINTS: usize = 4096;

fn grid_of(ps: &PointSet) -> Result<(&[u64], u64)> {
    let g = ps.exact_grid()?;
    if ps.len() > EXACT_MAX_POINTS {
        return Err(Error::LimitExceeded {
            required: ps.len() as u128,
            limit: EXACT_MAX_POINTS as u128,
        });
    }
    Ok((g.numerators(), g.denominator()))
}

fn big(x: i128) -> BigInt {
    BigInt::from(x)
}

fn pow_big(x: i128, e: usize) -> BigInt {
    num_traits::pow(big(x), e)
}

/// `Σ_{n,p} Π_j k(X_nj, X_pj)` with `0 <= k <= kmax`.
fn pair_sum(xs: &[u64], d: usize, kmax: u128, k: impl Fn(u64, u64) -> i128) -> BigInt {
    let n = xs.len() / d.max(1);
    let bits_term = d as f64 * libm::log2(kmax.max(1) as f64 + 1.0);
    let bits_total = bits_term + 2.0 * libm::log2(n.max(1) as f64) + 2.0;
    let row = |a: usize, b: usize| (&xs[a * d..(a + 1) * d], &xs[b * d..(b + 1) * d]);
    if bits_total < 120.0 {
        let mut s: i128 = 0;
        for a in 0..n {
            let mut r: i128 = 0;
            for b in a + 1..n {
                let (x, y) = row(a, b);
                r += x.iter().zip(y).map(|(&u, &v)| k(u, v)).product::<i128>();
            }
            let (x, _) = row(a, a);
            s += 2 * r + x.iter().map(|&u| k(u, u)).product::<i128>();
        }
        big(s)
    } else {
        let mut s = BigInt::zero();
        for a in 0..n {
            for b in 0..n {
                let (x, y) = row(a, b);
                let mut t = BigInt::one();
                for (&u, &v) in x.iter().zip(y) {
                    t *= big(k(u, v));
                }
                s += t;
            }
        }
        s
    }
}

fn single_sum(xs: &[u64], d: usize, k: impl Fn(u64) -> i128) -> BigInt {
    let mut s = BigInt::zero();
    for z in xs.chunks_exact(d) {
        let mut t = BigInt::one();
        for &u in z {
            t *= big(k(u));
        }
        s += t;
    }
    s
}

fn ratio(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

pub fn star_l2_sq_exact(ps: &PointSet) -> Result<Rational> {
    let (xs, q) = grid_of(ps)?;
    let d = ps.dim();
    let qi = q as i128;
    let n = big(ps.len() as i128);
    let pairs = pair_sum(xs, d, q as u128, |u, v| qi - u.max(v) as i128);
    let singles = single_sum(xs, d, |u| qi * qi - (u as i128) * (u as i128));
    Ok(ratio(pairs, pow_big(qi, d)) - ratio(BigInt::from(2) * &n * singles, pow_big(2 * qi * qi, d))
        + ratio(&n * &n, pow_big(3, d)))
}

pub fn extreme_l2_sq_exact(ps: &PointSet) -> Result<Rational> {
    let (xs, q) = grid_of(ps)?;
    let d = ps.dim();
    let qi = q as i128;
    let n = big(ps.len() as i128);
    let pairs = pair_sum(xs, d, (q as u128).pow(2), |u, v| u.min(v) as i128 * (qi - u.max(v) as i128));
    let singles = single_sum(xs, d, |u| u as i128 * (qi - u as i128));
    Ok(ratio(pairs, pow_big(qi * qi, d)) - ratio(BigInt::from(2) * &n * singles, pow_big(2 * qi * qi, d))
        + ratio(&n * &n, pow_big(12, d)))
}

/// Uses `1 + 3·B2(Δ/Q) = (6Δ² - 6ΔQ + 3Q²) / (2Q²)`.
pub fn periodic_l2_sq_exact(ps: &PointSet) -> Result<Rational> {
    let (xs, q) = grid_of(ps)?;
    let d = ps.dim();
    let qi = q as i128;
    let n = big(ps.len() as i128);
    let pairs = pair_sum(xs, d, 3 * (q as u128).pow(2), |u, v| {
        let t = (u as i128 - v as i128).abs();
        6 * t * t - 6 * t * qi + 3 * qi * qi
    });
    Ok(ratio(pairs, pow_big(6 * qi * qi, d)) - ratio(&n * &n, pow_big(3, d)))
}

pub fn l2_sq_exact(ps: &PointSet, metric: Metric) -> Result<Rational> {
    match metric {
        Metric::Star => star_l2_sq_exact(ps),
        Metric::Extreme => extreme_l2_sq_exact(ps),
        Metric::Periodic => periodic_l2_sq_exact(ps),
        Metric::Diaphony => Err(Error::invalid("diaphony is irrational; no exact mode")),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Report with the rational value attached as `exact_squared`.
pub fn exact_report(ps: &PointSet, metric: Metric) -> Result<DiscrepancyReport> {
    let r = l2_sq_exact(ps, metric)?;
    let mut rep = DiscrepancyReport::exact(metric, ps, to_f64(&r));
    rep.method = Method::ExactRational;
    rep.exact_squared = Some(r.to_string());
    Ok(rep)
}
