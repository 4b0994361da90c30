//! Acceptance criteria 1 to 11, one PASS/FAIL line each.
//!
//! Closed forms stated for the net families are written out here exactly as
//! stated, so a wrong statement fails its criterion instead of being patched.
//! Reference values come from the independent computations in `oracle`.

mod oracle;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use dnet::parallel::Rayon;
use dnet::verify::{a_vectors, corpus, expectation_nets, inequalities, second_coordinate_shifts, InequalityOptions};
use dnet_core::exact::extreme_l2_sq_exact;
use dnet_core::formulas::all_bit_vectors;
use dnet_core::haar::{haar_coeff_d, haar_coeff_d_exact, partial_sums, region_sums_upper_one, HaarIndex};
use dnet_core::metrics::{diaphony, extreme_l2, extreme_l2_with, periodic_l2, star_l2};
use dnet_core::nets::{apply_shift, rng, symmetrize};
use dnet_core::walsh::{expected_periodic_l2_sq, expected_periodic_l2_sq_exact, rho_b, DEFAULT_DUAL_LIMIT};
use dnet_core::{DigitalShift, GeneratorSet, PointSet, Rational, Sequential};
use oracle::{pow2, rat};
use rand::Rng;

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        summary: summary.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn sq(ps: &PointSet) -> f64 {
    extreme_l2(ps).value_squared.unwrap()
}

fn to_f64(r: &Rational) -> f64 {
    dnet_core::exact::to_f64(r)
}

/// `m/64 + 1/72 - 1/(9·4^{m+2})`.
fn hammersley_closed(m: usize) -> Rational {
    rat(m as i128, 64) + rat(1, 72) - pow2(-2 * (m as i64 + 2)) / rat(9, 1)
}

/// `P_a` value as stated: `... + (1/192) Σ_{k=1}^{m-2} a_k (2 - 2^{2k-2m+2})`.
fn pa_stated(m: usize, a: &[u8]) -> f64 {
    let mut s = 0.0;
    for k in 1..=m.saturating_sub(2) {
        s += a[k - 1] as f64 * (2.0 - 2f64.powi(2 * k as i32 - 2 * m as i32 + 2));
    }
    to_f64(&hammersley_closed(m)) + s / 192.0
}

fn criterion_1_2() -> (Outcome, Outcome) {
    let t0 = Instant::now();
    let (mut cases, mut mismatches, mut worst, mut spread) = (0, 0, 0.0f64, 0.0f64);
    let mut example = String::new();
    for m in 3..=10 {
        let shifts = second_coordinate_shifts(m, 10, 1);
        for a in a_vectors(m, 6, 20, 1) {
            let ps = GeneratorSet::family_pa(m, &a).unwrap().generate();
            let stated = pa_stated(m, &a);
            let values: Vec<f64> = shifts.iter().map(|s| sq(&apply_shift(&ps, s).unwrap())).collect();
            for &x in &values {
                cases += 1;
                let e = rel(x, stated);
                worst = worst.max(e);
                if e > 1e-9 {
                    mismatches += 1;
                    if example.is_empty() {
                        example = format!("m={m} a={a:?}: pair {x:.12} vs stated {stated:.12}");
                    }
                }
            }
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            spread = spread.max(rel(lo, hi));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let c1 = outcome(
        mismatches == 0 && secs <= 60.0,
        format!("{mismatches}/{cases} cases off the stated formula (max rel {worst:.3e}), {secs:.1} s; first: {example}"),
    );
    let c2 = outcome(spread <= 1e-10, format!("max relative spread across shifts {spread:.3e}"));
    (c1, c2)
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut exact_ok = true;
    for m in 2..=10 {
        let up = GeneratorSet::upper_one(m).unwrap().generate();
        worst = worst.max(rel(sq(&up), to_f64(&hammersley_closed(m))));
        let ham = GeneratorSet::hammersley(m).unwrap().generate();
        exact_ok &= extreme_l2_sq_exact(&up).unwrap() == extreme_l2_sq_exact(&ham).unwrap();
    }
    outcome(
        worst <= 1e-9 && exact_ok,
        format!("max rel {worst:.3e}; exact equality with Hammersley for m=2..10: {exact_ok}"),
    )
}

/// `(m+1)/24 - 2^{-2m-3} Σ_{k=1}^{m-1} a_k 4^k`, the part without the constant.
fn symmetrized_body(m: usize, a: &[u8]) -> Rational {
    let mut s = rat(0, 1);
    for k in 1..m {
        if a[k - 1] == 1 {
            s += pow2(2 * k as i64);
        }
    }
    rat(m as i128 + 1, 24) - s * pow2(-(2 * m as i64 + 3))
}

fn criterion_4() -> Outcome {
    // constant read literally: -5/(9·2^{4^{m+1}}); exponent read as 4^{m+1}: -5/(9·4^{m+1})
    let literal = |m: usize| -rat(5, 9) * pow2(-(1i64 << (2 * (m + 1))));
    let power = |m: usize| -rat(5, 9) * pow2(-2 * (m as i64 + 1));
    let mut consistent = true;
    let (mut lit_hits, mut pow_hits, mut total) = (0, 0, 0);
    let mut worst = 0.0f64;
    for m in 2..=8 {
        let shifts = second_coordinate_shifts(m, 2, 3);
        let mut constant: Option<Rational> = None;
        for a in a_vectors(m, 6, 6, 3) {
            let ps = GeneratorSet::family_pa(m, &a).unwrap().generate();
            for s in &shifts {
                let sym = symmetrize(&apply_shift(&ps, s).unwrap()).unwrap();
                let exact = extreme_l2_sq_exact(&sym).unwrap();
                let c = &exact - symmetrized_body(m, &a);
                consistent &= constant.as_ref().map_or(true, |c0| *c0 == c);
                constant.get_or_insert(c.clone());
                lit_hits += usize::from(c == literal(m));
                pow_hits += usize::from(c == power(m));
                total += 1;
                let resolved = to_f64(&(symmetrized_body(m, &a) + power(m)));
                worst = worst.max(rel(sq(&sym), resolved));
            }
        }
    }
    let reading = if pow_hits == total {
        "-5/(9*4^(m+1))"
    } else if lit_hits == total {
        "-5/(9*2^(4^(m+1)))"
    } else {
        "unresolved"
    };
    outcome(
        consistent && pow_hits == total && worst <= 1e-9,
        format!(
            "constant resolved to {reading} ({pow_hits}/{total} exact, literal reading {lit_hits}/{total}); pair formula max rel {worst:.3e}"
        ),
    )
}

/// The eight region expressions as stated, before the `4^n` normalization.
fn regions_stated(n: usize) -> [Rational; 8] {
    let n = n as i64;
    let f = pow2(2 * n);
    let i = |x: i64| rat(x as i128, 1);
    [
        rat(0, 1),
        rat(1, 3) * pow2(2 * (-2 * n - 5)) * (i(3 * n) * &f - i(5) * pow2(2 * n + 1) + i(64)),
        rat(1, 9) * pow2(2 * (-2 * n - 5)) * (i(21 * n) * &f - i(2) * (i(5) * &f + i(256))),
        rat(1, 3) * pow2(2 * (2 * n - 4)) * (&f + i(32)),
        rat(1, 27) * pow2(-4 * n - 7) * (i(3 * n) * (i(5) * &f + i(32)) - i(7) * &f - i(128)),
        rat(1, 3) * pow2(2 * (-2 * n - 3)) * (&f + i(8)),
        rat(1, 9) * pow2(2 * (-4 * n - 4)) * (i(4) * pow2(2 * n + 1) - i(1)),
        rat(1, 27) * pow2(2 * (-2 * n - 2)) - rat(1, 27) * pow2(2 * (-n - 2)) - rat(1, 9) * i(n) * pow2(2 * (-2 * n - 1))
            + rat(5, 9) * i(n) * pow2(2 * (-n - 3)),
    ]
}

fn criterion_5() -> Outcome {
    let mut totals_ok = true;
    let mut errata = Vec::new();
    for m in 3..=8 {
        let got = region_sums_upper_one(m).unwrap();
        let total: Rational = got.iter().cloned().sum();
        let direct = extreme_l2_sq_exact(&GeneratorSet::upper_one(m).unwrap().generate()).unwrap();
        totals_ok &= total == hammersley_closed(m) && total == direct;
        let scale = pow2(2 * m as i64);
        for (i, stated) in regions_stated(m).iter().enumerate() {
            if got[i] != stated * &scale {
                errata.push(format!("J{}@{m}", i + 1));
            }
        }
    }
    outcome(
        totals_ok,
        format!("totals exact for m=3..8: {totals_ok}; stated region expressions off at {}", errata.join(" ")),
    )
}

fn criterion_6() -> Outcome {
    let mut fails = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            fails.push(name.to_string());
        }
    };
    let mut r = rng(2024, 6);
    for i in 0..50 {
        let n = r.gen_range(1..=32usize);
        let d = r.gen_range(1..=2usize);
        let ps = PointSet::random(n, d, r.gen());
        check(&format!("star#{i}"), oracle::star_l2_sq(&ps).holds(star_l2(&ps).value_squared.unwrap()));
        check(&format!("extreme#{i}"), oracle::extreme_l2_sq(&ps).holds(sq(&ps)));
        check(&format!("periodic#{i}"), oracle::periodic_l2_sq(&ps).holds(periodic_l2(&ps).value_squared.unwrap()));
        let k = if d == 1 { 20_000 } else { 200 };
        check(&format!("diaphony#{i}"), oracle::diaphony_sq(&ps, k).holds(diaphony(&ps).value_squared.unwrap()));
        if d == 1 {
            let f = diaphony(&ps).value;
            let p = periodic_l2(&ps).value;
            check(&format!("d1-proportional#{i}"), rel(p, n as f64 * f / (2f64.sqrt() * PI)) <= 1e-10);
        }
    }
    let set = |d: usize, c: &[f64]| PointSet::from_coords(d, c.to_vec()).unwrap();
    let closed = |name: &str, got: f64, want: f64, check: &mut dyn FnMut(&str, bool)| {
        check(name, (got - want).abs() <= 1e-10 * want.abs().max(1.0));
    };
    let star = |ps: &PointSet| star_l2(ps).value_squared.unwrap();
    let per = |ps: &PointSet| periodic_l2(ps).value_squared.unwrap();
    let dia = |ps: &PointSet| diaphony(ps).value_squared.unwrap();
    closed("star {0}", star(&set(1, &[0.0])), 1.0 / 3.0, &mut check);
    closed("star {1/2}", star(&set(1, &[0.5])), 1.0 / 12.0, &mut check);
    closed("star {(0,0)}", star(&set(2, &[0.0, 0.0])), 11.0 / 18.0, &mut check);
    for z in [0.0, 0.3, 0.77] {
        closed("extreme N=1", sq(&set(1, &[z])), 1.0 / 12.0, &mut check);
        closed("periodic N=1", per(&set(1, &[z])), 1.0 / 6.0, &mut check);
    }
    closed("extreme {1/4,3/4}", sq(&set(1, &[0.25, 0.75])), 1.0 / 12.0, &mut check);
    closed("extreme {0.1,0.2}", sq(&set(1, &[0.1, 0.2])), 73.0 / 300.0, &mut check);
    closed("periodic {0,1/2}", per(&set(1, &[0.0, 0.5])), 1.0 / 6.0, &mut check);
    closed("diaphony d=1", dia(&set(1, &[0.4])), PI * PI / 3.0, &mut check);
    for d in 2..=3 {
        let want = (1.0 + PI * PI / 3.0).powi(d as i32) - 1.0;
        closed("diaphony N=1", dia(&set(d, &vec![0.2; d])), want, &mut check);
    }
    // the closed values also hold for the oracles themselves
    for (name, got, want) in [
        ("oracle star {0}", oracle::star_l2_sq(&set(1, &[0.0])).value, 1.0 / 3.0),
        ("oracle star {(0,0)}", oracle::star_l2_sq(&set(2, &[0.0, 0.0])).value, 11.0 / 18.0),
        ("oracle extreme {0.1,0.2}", oracle::extreme_l2_sq(&set(1, &[0.1, 0.2])).value, 73.0 / 300.0),
        ("oracle periodic {0,1/2}", oracle::periodic_l2_sq(&set(1, &[0.0, 0.5])).value, 1.0 / 6.0),
    ] {
        closed(name, got, want, &mut check);
    }
    outcome(fails.is_empty(), format!("50 random sets and closed cases; failures: {fails:?}"))
}

fn criterion_7() -> Outcome {
    let v = inequalities(&InequalityOptions::default()).unwrap();
    let failed: Vec<&str> = v.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    outcome(failed.is_empty(), format!("200 seeded sets; failing checks: {failed:?}"))
}

/// `ρ_b(k)` as stated in closed form.
fn rho_stated(b: u32, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut a = 0;
    while (b as u64).pow(a) <= k {
        a += 1;
    }
    let low = (b as u64).pow(a - 1);
    let kappa = k / low;
    let s = (kappa as f64 * PI / b as f64).sin().powi(2);
    let inner = if k % low == 0 { -1.0 / 3.0 + 1.0 / (2.0 * s) } else { -1.0 / 3.0 + 1.0 / s };
    3.0 / (b as f64).powi(2 * a as i32) * inner
}

fn criterion_8() -> Outcome {
    let (mut worst_series, mut worst_impl) = (0.0f64, 0.0f64);
    for b in [2, 3, 5] {
        for k in 0..64 {
            let stated = rho_stated(b, k);
            worst_series = worst_series.max((oracle::rho_series(b, k, 10_000) - stated).abs());
            worst_impl = worst_impl.max((rho_b(b, k) - stated).abs());
        }
    }
    let mut worst_sin = 0.0f64;
    for b in [2u32, 3, 5, 7] {
        let s: f64 = (1..b).map(|k| 1.0 / (k as f64 * PI / b as f64).sin().powi(2)).sum();
        worst_sin = worst_sin.max((s - (b * b - 1) as f64 / 3.0).abs());
    }
    outcome(
        worst_series <= 1e-6 && worst_impl <= 1e-12 && worst_sin <= 1e-12,
        format!("series vs closed {worst_series:.2e}; implementation vs closed {worst_impl:.2e}; sin² identity {worst_sin:.2e}"),
    )
}

/// Exhaustive average of periodic L2² over all depth-m digital shifts, no offsets.
fn exhaustive_average(g: &GeneratorSet) -> Rational {
    let (b, m, d) = (g.base().get(), g.m(), g.dim());
    let ps = g.generate();
    let total = (b as u64).pow((d * m) as u32);
    let q = (b as u64).pow(m as u32);
    let mut acc = rat(0, 1);
    for code in 0..total {
        let mut c = code;
        let sigma: Vec<Vec<u8>> = (0..d)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let x = (c % b as u64) as u8;
                        c /= b as u64;
                        x
                    })
                    .collect()
            })
            .collect();
        let shifted = apply_shift(&ps, &DigitalShift::new(b, m, sigma, None).unwrap()).unwrap();
        let num = shifted.grid().unwrap().numerators().to_vec();
        acc += oracle::periodic_l2_sq_exact(&num, d, q);
    }
    acc / rat(total as i128, 1)
}

/// `b^{2t} (m-t)^{d-1} ((1+b²)/3)^d`.
fn bound_stated(b: u32, m: usize, t: usize, d: usize) -> f64 {
    let b = b as f64;
    b.powi(2 * t as i32) * ((m - t) as f64).powi(d as i32 - 1) * ((1.0 + b * b) / 3.0).powi(d as i32)
}

fn criterion_9() -> Outcome {
    let t0 = Instant::now();
    let mut parts = Vec::new();
    let (mut exact_ok, mut mc_ok) = (true, true);
    for ((b, d, m), g) in expectation_nets() {
        let formula = expected_periodic_l2_sq_exact(&g, DEFAULT_DUAL_LIMIT).unwrap();
        let avg = exhaustive_average(&g);
        exact_ok &= formula == avg;
        let n = g.num_points() as usize;
        let ps = g.generate();
        let xs: Vec<f64> = (0..500u64)
            .map(|i| {
                let s = DigitalShift::random(b, m, d, Some(n), 99, i);
                periodic_l2(&apply_shift(&ps, &s).unwrap()).value_squared.unwrap()
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let se = (var / xs.len() as f64).sqrt();
        let f = to_f64(&formula);
        let within = (mean - f).abs() <= 3.0 * se;
        mc_ok &= within;
        parts.push(format!(
            "({b},{d},{m}) formula {formula} exhaustive {avg} mc {mean:.5}±{se:.5}",
        ));
    }
    let mut bound_fail = 0;
    let nets = corpus();
    for g in &nets {
        let e = expected_periodic_l2_sq(g).unwrap();
        if e > bound_stated(g.base().get(), g.m(), g.t(), g.dim()) {
            bound_fail += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        exact_ok && mc_ok && bound_fail == 0 && secs <= 120.0,
        format!(
            "exhaustive exact: {exact_ok}; mc within 3 se: {mc_ok}; bound violations {bound_fail}/{}; {secs:.1} s; {}",
            nets.len(),
            parts.join("; ")
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut nets: Vec<(String, PointSet)> = Vec::new();
    for m in 2..=6 {
        for a in all_bit_vectors(m - 1) {
            let ps = GeneratorSet::family_pa(m, &a).unwrap().generate();
            nets.push((format!("pa m={m} a={a:?}"), ps.clone()));
            if a.iter().all(|&x| x == 0) || m <= 4 {
                nets.push((format!("sym m={m} a={a:?}"), symmetrize(&ps).unwrap()));
            }
            nets.push((format!("pc m={m} c={a:?}"), GeneratorSet::family_pc(m, &a).unwrap().generate()));
        }
        nets.push((format!("upper-one m={m}"), GeneratorSet::upper_one(m).unwrap().generate()));
    }
    let (mut mono, mut bounded, mut worst) = (true, true, 0.0f64);
    for (_, ps) in &nets {
        let depth = ps.dyadic_depth().unwrap();
        let sums = partial_sums(ps, depth + 8);
        let target = sq(ps);
        mono &= sums.windows(2).all(|w| w[1] >= w[0]);
        bounded &= sums.iter().all(|&s| s <= target * (1.0 + 1e-12));
        worst = worst.max((target - sums.last().unwrap()) / target);
    }
    // empty boxes: coefficient -N 2^{-2|j|-4}
    let (mut empty_ok, mut empty_seen) = (true, 0);
    for ps in [
        GeneratorSet::hammersley(4).unwrap().generate(),
        GeneratorSet::family_pa(5, &[1, 0, 1, 1]).unwrap().generate(),
    ] {
        let n = ps.len();
        for j1 in 0..6u32 {
            for j2 in 0..6u32 {
                for m1 in 0..1u64 << j1 {
                    for m2 in 0..1u64 << j2 {
                        let inside = ps.points().any(|z| {
                            (z[0] * (1u64 << j1) as f64).floor() as u64 == m1
                                && (z[1] * (1u64 << j2) as f64).floor() as u64 == m2
                        });
                        if inside {
                            continue;
                        }
                        empty_seen += 1;
                        let want = -rat(n as i128, 1) * pow2(-2 * (j1 + j2) as i64 - 4);
                        let got = haar_coeff_d_exact(&ps, &[j1, j2], &[m1, m2]).unwrap();
                        let idx = HaarIndex::new(vec![j1 as i32, j2 as i32], vec![m1, m2]).unwrap();
                        empty_ok &= got == want && haar_coeff_d(&ps, &idx).unwrap() == to_f64(&want);
                    }
                }
            }
        }
    }
    outcome(
        mono && bounded && worst <= 1e-3 && empty_ok,
        format!(
            "{} nets: monotone {mono}, bounded {bounded}, max rel gap at level m+8 {worst:.2e}; {empty_seen} empty boxes exact: {empty_ok}",
            nets.len()
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut notes = Vec::new();
    let ps14 = GeneratorSet::hammersley(14).unwrap().generate();
    let ratios: Vec<String> = (4..=13)
        .map(|m| format!("{:.3}", sq(&GeneratorSet::hammersley(m).unwrap().generate()) * 64.0 / m as f64))
        .collect();
    notes.push(format!("ratios m=4..13 [{}]", ratios.join(" ")));
    let t0 = Instant::now();
    let one = extreme_l2_with(&ps14, &Sequential).value_squared.unwrap();
    let single = t0.elapsed().as_secs_f64();
    let ratio = one * 64.0 / 14.0;
    let ratio_ok = (0.9..=1.2).contains(&ratio);
    notes.push(format!("ratio at m=14 {ratio:.4}"));
    notes.push(format!("single-thread {single:.2} s"));
    let pool = Rayon::new(4).unwrap();
    let t1 = Instant::now();
    let many = extreme_l2_with(&ps14, &pool).value_squared.unwrap();
    let multi = t1.elapsed().as_secs_f64();
    let speedup = single / multi;
    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    notes.push(format!("4-thread speedup {speedup:.2} on {cores} available core(s)"));
    let agree = rel(one, many) <= 1e-12;
    notes.push(format!("thread results agree: {agree}"));

    // Faure b=3, d=2: the curve steps with period 3 in m, so compare mean
    // increments over two windows of two periods each
    let e: Vec<f64> = (2..=14)
        .map(|m| expected_periodic_l2_sq(&GeneratorSet::faure(3, 2, m).unwrap()).unwrap())
        .collect();
    let early = (e[6] - e[0]) / 6.0;
    let late = (e[12] - e[6]) / 6.0;
    let linear = late <= 1.25 * early;
    notes.push(format!("faure increments {early:.4} then {late:.4}"));
    outcome(ratio_ok && single <= 10.0 && speedup >= 2.0 && agree && linear, notes.join("; "))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let (c1, c2) = criterion_1_2();
    results.push((1, c1));
    results.push((2, c2));
    let rest: [(usize, fn() -> Outcome); 9] = [
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    for (i, f) in rest {
        results.push((i, f()));
    }
    let mut failed = 0;
    for (i, o) in &results {
        println!("criterion {i:>2}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
