//! Counting primitives, local discrepancy and the O(N²·d) pair formulas for
//! star, extreme and periodic L2 discrepancy and diaphony.
//!
//! Discrepancies are unnormalized: the local discrepancy is
//! `A(B, P) - N·λ(B)`. Values are computed in double precision with
//! compensated summation; see [`crate::exact`] for rational evaluation.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::nets::PointSet;
use crate::sum::{self, Executor, Neumaier, Sequential};
use crate::{Error, Result};

/// An axis-parallel box `[lower, upper)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Box {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Box {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::invalid("box with lower > upper"));
        }
        Ok(Box { lower, upper })
    }

    /// `[0, upper)`.
    pub fn anchored(upper: Vec<f64>) -> Self {
        Box {
            lower: alloc::vec![0.0; upper.len()],
            upper,
        }
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&c, (&l, &u))| l <= c && c < u)
    }
}

/// Product of wrapped intervals `I(x_j, y_j)`: `[x, y)` if `x <= y`, else
/// `[0, y) ∪ [x, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicBox {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PeriodicBox {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(PeriodicBox { x, y })
    }

    pub fn volume(&self) -> f64 {
        self.x.iter().zip(&self.y).map(|(&x, &y)| wrapped_len(x, y)).product()
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        z.iter()
            .zip(self.x.iter().zip(&self.y))
            .all(|(&c, (&x, &y))| in_wrapped(c, x, y))
    }
}

#[inline]
pub(crate) fn wrapped_len(x: f64, y: f64) -> f64 {
    if x <= y {
        y - x
    } else {
        1.0 - x + y
    }
}

#[inline]
pub(crate) fn in_wrapped(c: f64, x: f64, y: f64) -> bool {
    if x <= y {
        x <= c && c < y
    } else {
        c < y || x <= c
    }
}

fn check_dim(ps: &PointSet, d: usize) -> Result<()> {
    if ps.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: ps.dim(),
            found: d,
        });
    }
    Ok(())
}

pub fn count(ps: &PointSet, b: &Box) -> Result<usize> {
    check_dim(ps, b.lower.len())?;
    Ok(ps.points().filter(|z| b.contains(z)).count())
}

pub fn count_periodic(ps: &PointSet, b: &PeriodicBox) -> Result<usize> {
    check_dim(ps, b.x.len())?;
    Ok(ps.points().filter(|z| b.contains(z)).count())
}

/// `A(B, P) - N·λ(B)`.
pub fn local_discrepancy(ps: &PointSet, b: &Box) -> Result<f64> {
    Ok(count(ps, b)? as f64 - ps.len() as f64 * b.volume())
}

pub fn local_discrepancy_periodic(ps: &PointSet, b: &PeriodicBox) -> Result<f64> {
    Ok(count_periodic(ps, b)? as f64 - ps.len() as f64 * b.volume())
}

/// The anchored discrepancy function `D(y) = A([0, y), P) - N·Π y_j`.
pub fn anchored(ps: &PointSet, y: &[f64]) -> f64 {
    let c = ps
        .points()
        .filter(|z| z.iter().zip(y).all(|(a, b)| a < b))
        .count();
    c as f64 - ps.len() as f64 * y.iter().product::<f64>()
}

/// `g(x, y) = Σ_{u ⊆ [d]} (-1)^{|u|} D(x_u, y_{u^c})`.
///
/// Agrees with the local discrepancy of `[x, y)` whenever `x <= y`.
pub fn g_eval(ps: &PointSet, x: &[f64], y: &[f64]) -> Result<f64> {
    let d = ps.dim();
    check_dim(ps, x.len())?;
    check_dim(ps, y.len())?;
    let mut w = alloc::vec![0.0; d];
    let mut acc = Neumaier::new();
    for u in 0u64..1 << d {
        for j in 0..d {
            w[j] = if u >> j & 1 == 1 { x[j] } else { y[j] };
        }
        let sign = if u.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * anchored(ps, &w));
    }
    Ok(acc.total())
}

/// Same value as [`g_eval`] in O(N·d): inclusion-exclusion factorizes over
/// coordinates.
pub(crate) fn g_fast(ps: &PointSet, x: &[f64], y: &[f64]) -> f64 {
    let mut c = 0i64;
    for z in ps.points() {
        let mut s = 1i64;
        for ((&zj, &xj), &yj) in z.iter().zip(x).zip(y) {
            s *= (zj < yj) as i64 - (zj < xj) as i64;
            if s == 0 {
                break;
            }
        }
        c += s;
    }
    let vol: f64 = x.iter().zip(y).map(|(a, b)| b - a).product();
    c as f64 - ps.len() as f64 * vol
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Star,
    Extreme,
    Periodic,
    Diaphony,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Star => "star",
            Metric::Extreme => "extreme",
            Metric::Periodic => "periodic",
            Metric::Diaphony => "diaphony",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(Metric::Star),
            "extreme" => Ok(Metric::Extreme),
            "periodic" => Ok(Metric::Periodic),
            "diaphony" => Ok(Metric::Diaphony),
            _ => Err(Error::invalid(alloc::format!("unknown metric '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ExactPair,
    ExactRational,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactPair => "exact-pair",
            Method::ExactRational => "exact-rational",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub metric: Metric,
    pub p: f64,
    pub value: f64,
    /// Set by the exact evaluators.
    pub value_squared: Option<f64>,
    pub n: usize,
    pub d: usize,
    pub method: Method,
    pub error_estimate: Option<f64>,
    pub seed: Option<u64>,
    /// False when an estimator ran out of budget before meeting its tolerance.
    pub converged: bool,
    /// Exact rational value of `value_squared`, when computed.
    pub exact_squared: Option<String>,
}

impl DiscrepancyReport {
    pub(crate) fn exact(metric: Metric, ps: &PointSet, value_squared: f64) -> Self {
        DiscrepancyReport {
            metric,
            p: 2.0,
            value: libm::sqrt(value_squared.max(0.0)),
            value_squared: Some(value_squared),
            n: ps.len(),
            d: ps.dim(),
            method: Method::ExactPair,
            error_estimate: None,
            seed: None,
            converged: true,
            exact_squared: None,
        }
    }
}

#[inline]
pub(crate) fn bernoulli2(t: f64) -> f64 {
    t * t - t + 1.0 / 6.0
}

/// Integer power for small exponents.
#[inline]
pub(crate) fn powi(x: f64, e: usize) -> f64 {
    libm::pow(x, e as f64)
}

/// `Σ_{n,p} Π_j (1 - max(x_nj, x_pj)) - 2N Σ_n Π_j (1 - x_nj²)/2 + N²/3^d`.
pub fn star_l2_with<E: Executor + ?Sized>(ps: &PointSet, exec: &E) -> DiscrepancyReport {
    let (n, d, c) = (ps.len(), ps.dim(), ps.coords());
    let pairs = sum::symmetric_pair_sum(exec, n, |a, b| {
        let (x, y) = (&c[a * d..(a + 1) * d], &c[b * d..(b + 1) * d]);
        x.iter().zip(y).map(|(&u, &v)| 1.0 - u.max(v)).product()
    });
    let singles = sum::block_sum(exec, n, |a| {
        c[a * d..(a + 1) * d].iter().map(|&u| (1.0 - u * u) / 2.0).product()
    });
    let nf = n as f64;
    let v2 = sum::compensated([pairs, -2.0 * nf * singles, nf * nf / powi(3.0, d)]);
    DiscrepancyReport::exact(Metric::Star, ps, v2)
}

/// `Σ_{n,p} Π_j min(1 - max) - 2N Σ_n Π_j x(1-x)/2 + N²/12^d`.
pub fn extreme_l2_with<E: Executor + ?Sized>(ps: &PointSet, exec: &E) -> DiscrepancyReport {
    let (n, d, c) = (ps.len(), ps.dim(), ps.coords());
    let pairs = sum::symmetric_pair_sum(exec, n, |a, b| {
        let (x, y) = (&c[a * d..(a + 1) * d], &c[b * d..(b + 1) * d]);
        x.iter().zip(y).map(|(&u, &v)| u.min(v) * (1.0 - u.max(v))).product()
    });
    let singles = sum::block_sum(exec, n, |a| {
        c[a * d..(a + 1) * d].iter().map(|&u| u * (1.0 - u) / 2.0).product()
    });
    let nf = n as f64;
    let v2 = sum::compensated([pairs, -2.0 * nf * singles, nf * nf / powi(12.0, d)]);
    DiscrepancyReport::exact(Metric::Extreme, ps, v2)
}

/// `-N²/3^d + 3^{-d} Σ_{n,p} Π_j (1 + 3·B2(|x_nj - x_pj|))`.
pub fn periodic_l2_with<E: Executor + ?Sized>(ps: &PointSet, exec: &E) -> DiscrepancyReport {
    let (n, d, c) = (ps.len(), ps.dim(), ps.coords());
    let pairs = sum::symmetric_pair_sum(exec, n, |a, b| {
        let (x, y) = (&c[a * d..(a + 1) * d], &c[b * d..(b + 1) * d]);
        x.iter()
            .zip(y)
            .map(|(&u, &v)| 1.0 + 3.0 * bernoulli2((u - v).abs()))
            .product()
    });
    let nf = n as f64;
    let scale = powi(3.0, d);
    let v2 = sum::compensated([pairs / scale, -nf * nf / scale]);
    DiscrepancyReport::exact(Metric::Periodic, ps, v2)
}

/// Diaphony `F_N` with weights `Π max(1, |k_j|)^{-2}`:
/// `F_N² = N^{-2} Σ_{n,p} [Π_j (1 + 2π²·B2(|x_nj - x_pj|)) - 1]`.
pub fn diaphony_with<E: Executor + ?Sized>(ps: &PointSet, exec: &E) -> DiscrepancyReport {
    let (n, d, c) = (ps.len(), ps.dim(), ps.coords());
    let two_pi2 = 2.0 * PI * PI;
    let pairs = sum::symmetric_pair_sum(exec, n, |a, b| {
        let (x, y) = (&c[a * d..(a + 1) * d], &c[b * d..(b + 1) * d]);
        x.iter()
            .zip(y)
            .map(|(&u, &v)| 1.0 + two_pi2 * bernoulli2((u - v).abs()))
            .product::<f64>()
            - 1.0
    });
    let nf = n as f64;
    let v2 = if n == 0 { 0.0 } else { pairs / (nf * nf) };
    DiscrepancyReport::exact(Metric::Diaphony, ps, v2)
}

pub fn star_l2(ps: &PointSet) -> DiscrepancyReport {
    star_l2_with(ps, &Sequential)
}

pub fn extreme_l2(ps: &PointSet) -> DiscrepancyReport {
    extreme_l2_with(ps, &Sequential)
}

pub fn periodic_l2(ps: &PointSet) -> DiscrepancyReport {
    periodic_l2_with(ps, &Sequential)
}

pub fn diaphony(ps: &PointSet) -> DiscrepancyReport {
    diaphony_with(ps, &Sequential)
}

/// Dispatches to the pair formula of `metric`.
pub fn exact_l2_with<E: Executor + ?Sized>(ps: &PointSet, metric: Metric, exec: &E) -> DiscrepancyReport {
    match metric {
        Metric::Star => star_l2_with(ps, exec),
        Metric::Extreme => extreme_l2_with(ps, exec),
        Metric::Periodic => periodic_l2_with(ps, exec),
        Metric::Diaphony => diaphony_with(ps, exec),
    }
}
