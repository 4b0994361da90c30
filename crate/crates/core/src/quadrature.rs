//! Estimators of star, extreme and periodic L_p discrepancy for general `p`.
//!
//! The grid scheme places breakpoints at every point coordinate, so the
//! counting function is constant on each cell. Rectangular cells get tensor
//! Gauss-Legendre rules and the diagonal triangles `x <= y` (or `x > y`) of the
//! two-sided metrics get a Duffy-collapsed rule. Two rules of consecutive
//! orders are compared to produce the error estimate. When the mesh would
//! exceed the budget a coarser uniform mesh is used instead.
//!
//! The Monte-Carlo scheme draws uniform samples from the seeded generator of
//! [`crate::nets::rng`] and reports the delta-method standard error of
//! `mean^{1/p}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::metrics::{self, in_wrapped, wrapped_len, DiscrepancyReport, Method, Metric};
use crate::nets::{self, PointSet};
use crate::sum::Neumaier;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Grid,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    /// Maximum number of integrand evaluations (grid: per rule; MC: samples).
    pub evaluations: u64,
    /// Target relative error; the report is flagged unconverged above it.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            evaluations: 1_000_000,
            tolerance: 1e-3,
            seed: 0,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; q];
    let mut ws = vec![0.0; q];
    for i in 0..q {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (q as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = (1.0 - x) / 2.0;
        ws[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

/// One-dimensional factor of a tensor quadrature node.
struct Nodes {
    words: usize,
    weight: Vec<f64>,
    len: Vec<f64>,
    members: Vec<u64>,
}

impl Nodes {
    fn new(n: usize) -> Self {
        Nodes {
            words: n.div_ceil(64).max(1),
            weight: Vec::new(),
            len: Vec::new(),
            members: Vec::new(),
        }
    }

    fn push(&mut self, w: f64, len: f64, coords: impl Iterator<Item = f64>, inside: impl Fn(f64) -> bool) {
        let start = self.members.len();
        self.members.resize(start + self.words, 0);
        for (i, c) in coords.enumerate() {
            if inside(c) {
                self.members[start + i / 64] |= 1 << (i % 64);
            }
        }
        self.weight.push(w);
        self.len.push(len);
    }

    fn count(&self) -> usize {
        self.weight.len()
    }
}

fn breakpoints(ps: &PointSet, j: usize, cells: Option<usize>) -> Vec<f64> {
    let mut t: Vec<f64> = match cells {
        Some(c) => (0..=c).map(|i| i as f64 / c as f64).collect(),
        None => {
            let mut v: Vec<f64> = ps.points().map(|z| z[j]).collect();
            v.push(0.0);
            v.push(1.0);
            v
        }
    };
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t.dedup();
    t
}

fn build_nodes(ps: &PointSet, metric: Metric, j: usize, t: &[f64], q: usize) -> Nodes {
    let (gx, gw) = gauss_legendre(q);
    let n = ps.len();
    let col = |ps: &PointSet| ps.points().map(move |z| z[j]).collect::<Vec<f64>>();
    let c = col(ps);
    let mut nodes = Nodes::new(n);
    let cells: Vec<(f64, f64)> = t.windows(2).map(|w| (w[0], w[1] - w[0])).collect();
    match metric {
        Metric::Star => {
            for &(a, l) in &cells {
                for (&u, &w) in gx.iter().zip(&gw) {
                    let y = a + l * u;
                    nodes.push(l * w, y, c.iter().copied(), |z| z < y);
                }
            }
        }
        Metric::Extreme | Metric::Periodic => {
            let periodic = metric == Metric::Periodic;
            for (i, &(a, la)) in cells.iter().enumerate() {
                for (k, &(b, lb)) in cells.iter().enumerate() {
                    if i > k && !periodic {
                        continue;
                    }
                    for (&u, &wu) in gx.iter().zip(&gw) {
                        for (&v, &wv) in gx.iter().zip(&gw) {
                            if i != k {
                                let (x, y) = (a + la * u, b + lb * v);
                                let len = if periodic { wrapped_len(x, y) } else { y - x };
                                nodes.push(la * lb * wu * wv, len, c.iter().copied(), |z| in_wrapped(z, x, y));
                            } else {
                                // Duffy: hi = a + l·u, lo = a + l·u·v, Jacobian l²·u.
                                let hi = a + la * u;
                                let lo = a + la * u * v;
                                let w = la * la * u * wu * wv;
                                nodes.push(w, hi - lo, c.iter().copied(), |z| lo <= z && z < hi);
                                if periodic {
                                    nodes.push(w, wrapped_len(hi, lo), c.iter().copied(), |z| in_wrapped(z, hi, lo));
                                }
                            }
                        }
                    }
                }
            }
        }
        Metric::Diaphony => unreachable!(),
    }
    nodes
}

/// `Σ_tuples Π w · |count - N Π len|^p` over the tensor product of `per`.
fn tensor_sum(per: &[Nodes], n: usize, p: f64) -> f64 {
    let d = per.len();
    let words = per[0].words;
    let mut masks = vec![vec![u64::MAX; words]; d + 1];
    let nf = n as f64;
    let mut acc = Neumaier::new();
    fn rec(
        per: &[Nodes],
        level: usize,
        w: f64,
        len: f64,
        masks: &mut [Vec<u64>],
        nf: f64,
        p: f64,
        acc: &mut Neumaier,
    ) {
        let nodes = &per[level];
        let words = nodes.words;
        for i in 0..nodes.count() {
            let (head, tail) = masks.split_at_mut(level + 1);
            let prev = &head[level];
            let cur = &mut tail[0];
            let m = &nodes.members[i * words..(i + 1) * words];
            for k in 0..words {
                cur[k] = prev[k] & m[k];
            }
            let ww = w * nodes.weight[i];
            let ll = len * nodes.len[i];
            if level + 1 == per.len() {
                let cnt: u32 = cur.iter().map(|x| x.count_ones()).sum();
                let dev = (cnt as f64 - nf * ll).abs();
                let f = if p == 2.0 { dev * dev } else if p == 1.0 { dev } else { libm::pow(dev, p) };
                acc.add(ww * f);
            } else {
                rec(per, level + 1, ww, ll, masks, nf, p, acc);
            }
        }
    }
    let _ = d;
    rec(per, 0, 1.0, 1.0, &mut masks, nf, p, &mut acc);
    acc.total()
}

fn grid_estimate(ps: &PointSet, metric: Metric, p: f64, budget: &Budget) -> DiscrepancyReport {
    const Q: usize = 3;
    let d = ps.dim();
    let n = ps.len();
    // Nodes per coordinate for a mesh of c cells and order q.
    let per_coord = |c: usize, q: usize| -> f64 {
        let c = c as f64;
        let q2 = (q * q) as f64;
        match metric {
            Metric::Star => c * q as f64,
            Metric::Extreme => c * (c + 1.0) / 2.0 * q2,
            _ => (c * c + c) * q2,
        }
    };
    let cost = |c: usize| libm::pow(per_coord(c, Q + 1), d as f64);
    let natural = (0..d).map(|j| breakpoints(ps, j, None).len() - 1).max().unwrap_or(1);
    let limit = budget.evaluations as f64;
    let mut cells = None;
    if cost(natural) > limit {
        let mut c = natural;
        while c > 1 && cost(c) > limit {
            c -= 1;
        }
        cells = Some(c.max(1));
    }
    let integral = |q: usize| {
        let per: Vec<Nodes> = (0..d)
            .map(|j| {
                let t = breakpoints(ps, j, cells);
                build_nodes(ps, metric, j, &t, q)
            })
            .collect();
        tensor_sum(&per, n, p)
    };
    let lo = integral(Q).max(0.0);
    let hi = integral(Q + 1).max(0.0);
    let value = libm::pow(hi, 1.0 / p);
    let err = (value - libm::pow(lo, 1.0 / p)).abs();
    DiscrepancyReport {
        metric,
        p,
        value,
        value_squared: None,
        n,
        d,
        method: Method::Quadrature,
        error_estimate: Some(err),
        seed: None,
        converged: err <= budget.tolerance * value.max(f64::MIN_POSITIVE) || err == 0.0,
        exact_squared: None,
    }
}

fn mc_estimate(ps: &PointSet, metric: Metric, p: f64, budget: &Budget) -> DiscrepancyReport {
    let d = ps.dim();
    let n = ps.len();
    let nf = n as f64;
    let mut r = nets::rng(budget.seed, 0);
    let samples = budget.evaluations.max(2);
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    let scale = match metric {
        Metric::Extreme => libm::pow(2.0, -(d as f64)),
        _ => 1.0,
    };
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for s in 0..samples {
        for j in 0..d {
            x[j] = r.gen::<f64>();
            y[j] = r.gen::<f64>();
        }
        let dev = match metric {
            Metric::Star => metrics::anchored(ps, &y),
            Metric::Extreme => metrics::g_fast(ps, &x, &y),
            _ => {
                let c = ps
                    .points()
                    .filter(|z| z.iter().enumerate().all(|(j, &zj)| in_wrapped(zj, x[j], y[j])))
                    .count();
                let vol: f64 = x.iter().zip(&y).map(|(&a, &b)| wrapped_len(a, b)).product();
                c as f64 - nf * vol
            }
        };
        let f = scale * libm::pow(dev.abs(), p);
        let delta = f - mean;
        mean += delta / (s + 1) as f64;
        m2 += delta * (f - mean);
    }
    let var = m2 / (samples - 1) as f64;
    let se_mean = libm::sqrt(var / samples as f64);
    let value = libm::pow(mean.max(0.0), 1.0 / p);
    let err = if mean > 0.0 { value * se_mean / (p * mean) } else { 0.0 };
    DiscrepancyReport {
        metric,
        p,
        value,
        value_squared: None,
        n,
        d,
        method: Method::MonteCarlo,
        error_estimate: Some(err),
        seed: Some(budget.seed),
        converged: err <= budget.tolerance * value || err == 0.0,
        exact_squared: None,
    }
}

fn estimate(ps: &PointSet, metric: Metric, p: f64, scheme: Scheme, budget: &Budget) -> Result<DiscrepancyReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(alloc::format!("p must be a finite number >= 1, got {p}")));
    }
    if budget.evaluations == 0 {
        return Err(Error::invalid("budget must allow at least one evaluation"));
    }
    Ok(match scheme {
        Scheme::Grid => grid_estimate(ps, metric, p, budget),
        Scheme::MonteCarlo => mc_estimate(ps, metric, p, budget),
    })
}

/// `(2^{-d} ∫∫ |g(x, y)|^p dx dy)^{1/p}`, the extreme L_p discrepancy.
pub fn lp_extreme_estimate(ps: &PointSet, p: f64, scheme: Scheme, budget: &Budget) -> Result<DiscrepancyReport> {
    estimate(ps, Metric::Extreme, p, scheme, budget)
}

pub fn lp_star_estimate(ps: &PointSet, p: f64, scheme: Scheme, budget: &Budget) -> Result<DiscrepancyReport> {
    estimate(ps, Metric::Star, p, scheme, budget)
}

/// Integrates over all `(x, y)` in `[0, 1]^{2d}` with wrapped intervals.
pub fn lp_periodic_estimate(ps: &PointSet, p: f64, scheme: Scheme, budget: &Budget) -> Result<DiscrepancyReport> {
    estimate(ps, Metric::Periodic, p, scheme, budget)
}
