//! Reference computations that share no code with the evaluators under test.

use std::f64::consts::PI;

use dnet_core::PointSet;
use num_bigint::BigInt;
use num_rational::BigRational;

/// A value with an absolute error bound.
#[derive(Clone, Copy, Debug)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

impl Approx {
    pub fn holds(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.err + 1e-12 * x.abs().max(1e-300)
    }
}

/// One piece of a per-coordinate decomposition of the integration domain.
/// On the piece the set of counted points is `mask`, and `moments[k]` is the
/// integral of `len^k` with `len` the test-interval length.
#[derive(Clone, Copy, Debug)]
struct Piece {
    mask: u64,
    moments: [f64; 3],
}

fn breakpoints(ps: &PointSet, j: usize) -> Vec<f64> {
    let mut u: Vec<f64> = ps.points().map(|z| z[j]).collect();
    u.push(0.0);
    u.push(1.0);
    u.sort_by(f64::total_cmp);
    u.dedup();
    u
}

/// Points whose coordinate `j` lies in `[lo, hi]`.
fn mask_between(ps: &PointSet, j: usize, lo: f64, hi: f64) -> u64 {
    ps.points()
        .enumerate()
        .filter(|(_, z)| z[j] >= lo && z[j] <= hi)
        .fold(0, |m, (i, _)| m | (1u64 << i))
}

/// `t^{k+2} / ((k+1)(k+2))`, the double antiderivative of `t^k`.
fn f2(t: f64, k: usize) -> f64 {
    t.powi(k as i32 + 2) / ((k + 1) * (k + 2)) as f64
}

/// `∫_p^q ∫_r^s (y - x + c)^k dy dx`.
fn rect_moment(p: f64, q: f64, r: f64, s: f64, c: f64, k: usize) -> f64 {
    f2(s + c - p, k) - f2(s + c - q, k) - f2(r + c - p, k) + f2(r + c - q, k)
}

fn star_pieces(ps: &PointSet, j: usize) -> Vec<Piece> {
    let u = breakpoints(ps, j);
    u.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            // z < y for every y in (lo, hi) exactly when z <= lo
            let mask = mask_between(ps, j, f64::NEG_INFINITY, lo);
            let m = |k: i32| (hi.powi(k + 1) - lo.powi(k + 1)) / (k + 1) as f64;
            Piece {
                mask,
                moments: [m(0), m(1), m(2)],
            }
        })
        .collect()
}

fn extreme_pieces(ps: &PointSet, j: usize) -> Vec<Piece> {
    let u = breakpoints(ps, j);
    let cells: Vec<(f64, f64)> = u.windows(2).map(|w| (w[0], w[1])).collect();
    let mut out = Vec::new();
    for (a, &(p, q)) in cells.iter().enumerate() {
        // x < y inside one cell: no point fits in [x, y)
        let h = q - p;
        out.push(Piece {
            mask: 0,
            moments: [f2(h, 0), f2(h, 1), f2(h, 2)],
        });
        for &(r, s) in &cells[a + 1..] {
            out.push(Piece {
                mask: mask_between(ps, j, q, r),
                moments: [0, 1, 2].map(|k| rect_moment(p, q, r, s, 0.0, k)),
            });
        }
    }
    out
}

/// `∫∫_{p <= y < x <= q} (1 - (x - y))^k`.
fn wrapped_triangle(h: f64, k: usize) -> f64 {
    // t = x - y has density (h - t) on [0, h]; substitute u = 1 - t
    let g = |u: f64| (h - 1.0) * u.powi(k as i32 + 1) / (k + 1) as f64 + u.powi(k as i32 + 2) / (k + 2) as f64;
    g(1.0) - g(1.0 - h)
}

fn periodic_pieces(ps: &PointSet, j: usize) -> Vec<Piece> {
    let u = breakpoints(ps, j);
    let cells: Vec<(f64, f64)> = u.windows(2).map(|w| (w[0], w[1])).collect();
    let all = mask_between(ps, j, f64::NEG_INFINITY, f64::INFINITY);
    let mut out = Vec::new();
    for (a, &(p, q)) in cells.iter().enumerate() {
        let h = q - p;
        out.push(Piece {
            mask: 0,
            moments: [f2(h, 0), f2(h, 1), f2(h, 2)],
        });
        out.push(Piece {
            mask: all,
            moments: [0, 1, 2].map(|k| wrapped_triangle(h, k)),
        });
        for (c, &(r, s)) in cells.iter().enumerate() {
            if c > a {
                out.push(Piece {
                    mask: mask_between(ps, j, q, r),
                    moments: [0, 1, 2].map(|k| rect_moment(p, q, r, s, 0.0, k)),
                });
            } else if c < a {
                // x above y: the interval wraps, [x, 1) ∪ [0, y)
                out.push(Piece {
                    mask: all & !mask_between(ps, j, s, p),
                    moments: [0, 1, 2].map(|k| rect_moment(p, q, r, s, 1.0, k)),
                });
            }
        }
    }
    out
}

fn integrate(ps: &PointSet, pieces: impl Fn(&PointSet, usize) -> Vec<Piece>) -> Approx {
    assert!(ps.len() <= 64, "oracle masks hold at most 64 points");
    let d = ps.dim();
    let n = ps.len() as f64;
    let per: Vec<Vec<Piece>> = (0..d).map(|j| pieces(ps, j)).collect();
    let mut idx = vec![0usize; d];
    let (mut sum, mut abs, mut terms) = (0.0f64, 0.0f64, 0u64);
    loop {
        let mut mask = u64::MAX;
        let mut m = [1.0f64; 3];
        for j in 0..d {
            let pc = &per[j][idx[j]];
            mask &= pc.mask;
            for k in 0..3 {
                m[k] *= pc.moments[k];
            }
        }
        let a = mask.count_ones() as f64;
        let t = a * a * m[0] - 2.0 * a * n * m[1] + n * n * m[2];
        sum += t;
        abs += a * a * m[0].abs() + 2.0 * a * n * m[1].abs() + n * n * m[2].abs();
        terms += 1;
        let mut j = 0;
        loop {
            if j == d {
                return Approx {
                    value: sum,
                    err: (terms as f64 + 16.0) * f64::EPSILON * abs,
                };
            }
            idx[j] += 1;
            if idx[j] < per[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `∫ (A([0,y)) - N vol)^2 dy` by exact integration cell by cell.
pub fn star_l2_sq(ps: &PointSet) -> Approx {
    integrate(ps, star_pieces)
}

/// Same over all boxes `[x, y)`, `x <= y`.
pub fn extreme_l2_sq(ps: &PointSet) -> Approx {
    integrate(ps, extreme_pieces)
}

/// Same over all wrapped boxes.
pub fn periodic_l2_sq(ps: &PointSet) -> Approx {
    integrate(ps, periodic_pieces)
}

/// Frequency sum `Σ_{0 < |k|_∞ <= K} r(k)^{-2} |N^{-1} Σ_n e(k·x_n)|²`.
/// The neglected part is nonnegative and at most `2d(1+π²/3)^{d-1}/K`.
pub fn diaphony_sq(ps: &PointSet, kmax: i64) -> Approx {
    let d = ps.dim();
    let n = ps.len();
    let width = (2 * kmax + 1) as usize;
    // e[j][i][k + K] = e(k x_ij)
    let e: Vec<Vec<Vec<(f64, f64)>>> = (0..d)
        .map(|j| {
            ps.points()
                .map(|z| {
                    (-kmax..=kmax)
                        .map(|k| {
                            let a = 2.0 * PI * k as f64 * z[j];
                            (a.cos(), a.sin())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; d];
    loop {
        let mut w = 1.0;
        let mut zero = true;
        for &i in &idx {
            let k = i as i64 - kmax;
            if k != 0 {
                zero = false;
                w /= (k * k) as f64;
            }
        }
        if !zero {
            let (mut re, mut im) = (0.0, 0.0);
            for p in 0..n {
                let (mut a, mut b) = (1.0, 0.0);
                for j in 0..d {
                    let (c, s) = e[j][p][idx[j]];
                    (a, b) = (a * c - b * s, a * s + b * c);
                }
                re += a;
                im += b;
            }
            total += w * (re * re + im * im) / (n * n) as f64;
        }
        let mut j = 0;
        loop {
            if j == d {
                let tail = 2.0 * d as f64 * (1.0 + PI * PI / 3.0).powi(d as i32 - 1) / kmax as f64;
                return Approx {
                    value: total + tail / 2.0,
                    err: tail / 2.0,
                };
            }
            idx[j] += 1;
            if idx[j] < width {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `ρ_b(k)` from the Fourier series of the periodic kernel:
/// `Σ_{0 < |h| <= H} 3/(2π²h²) |∫ e(hx) conj(wal_k(x)) dx|²`.
pub fn rho_series(b: u32, k: u64, hmax: i64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let bb = b as u64;
    let mut digits = Vec::new();
    let mut r = k;
    while r > 0 {
        digits.push(r % bb);
        r /= bb;
    }
    let a = digits.len();
    let cells = bb.pow(a as u32);
    // conj(wal_k) on cell c: ω^{-Σ κ_i ξ_{i+1}}, ξ the leading digits of c/b^a
    let wal: Vec<(f64, f64)> = (0..cells)
        .map(|c| {
            let mut e = 0;
            for (i, &kap) in digits.iter().enumerate() {
                let xi = (c / bb.pow((a - 1 - i) as u32)) % bb;
                e += kap * xi;
            }
            let ang = -2.0 * PI * (e % bb) as f64 / b as f64;
            (ang.cos(), ang.sin())
        })
        .collect();
    let mut total = 0.0;
    for h in (-hmax..=hmax).filter(|&h| h != 0) {
        let step = 2.0 * PI * h as f64 / cells as f64;
        let (sc, ss) = (step.cos(), step.sin());
        // Σ_c w_c (z^{c+1} - z^c), z = e(h / b^a)
        let (mut zr, mut zi) = (1.0f64, 0.0f64);
        let (mut re, mut im) = (0.0, 0.0);
        for &(wr, wi) in &wal {
            let (nr, ni) = (zr * sc - zi * ss, zr * ss + zi * sc);
            let (dr, di) = (nr - zr, ni - zi);
            re += wr * dr - wi * di;
            im += wr * di + wi * dr;
            (zr, zi) = (nr, ni);
        }
        let two_pi_h = 2.0 * PI * h as f64;
        let beta2 = (re * re + im * im) / (two_pi_h * two_pi_h);
        total += 3.0 / (2.0 * PI * PI * (h * h) as f64) * beta2;
    }
    total
}

pub fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^e` as a rational, any sign of `e`.
pub fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::from(1) << e as usize)
    } else {
        BigRational::new(BigInt::from(1), BigInt::from(1) << (-e) as usize)
    }
}

/// Exact periodic L2² of a grid set with common denominator `q`:
/// `-N²/3^d + 3^{-d} Σ_{n,p} Π_j (1 + 3 B2(|x_nj - x_pj|))`.
pub fn periodic_l2_sq_exact(numerators: &[u64], d: usize, q: u64) -> BigRational {
    let n = numerators.len() / d;
    let q = q as i128;
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for a in 0..n {
        for b in 0..n {
            let mut t = BigRational::from_integer(BigInt::from(1));
            for j in 0..d {
                let u = (numerators[a * d + j] as i128 - numerators[b * d + j] as i128).abs();
                // 1 + 3(t² - t + 1/6) with t = u/q, over 2q²
                t *= rat(6 * u * u - 6 * u * q + 3 * q * q, 2 * q * q);
            }
            acc += t;
        }
    }
    let three_d = BigRational::from_integer(BigInt::from(3).pow(d as u32));
    (acc - rat((n * n) as i128, 1)) / three_d
}
