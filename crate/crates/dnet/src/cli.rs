//! Argument parsing and dispatch for the `dnet` binary.
//!
//! Exit status: 0 success, 1 a gated verification check failed, 2 invalid
//! input or parameters, 3 a resource limit refused the request.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dnet_core::exact::exact_report;
use dnet_core::haar::{extreme_l2_via_haar, square_function_lp};
use dnet_core::metrics::exact_l2_with;
use dnet_core::nets::{apply_shift, rng, symmetrize};
use dnet_core::quadrature::{lp_extreme_estimate, lp_periodic_estimate, lp_star_estimate, Budget, Scheme};
use dnet_core::walsh::{
    diagonal_correction, expected_periodic_l2_sq_exact, expected_periodic_l2_sq_with, shift_average_mc_with,
    thm12_bound, DEFAULT_DUAL_LIMIT,
};
use dnet_core::{DigitalShift, Error, GeneratorSet, Metric, PointSet};
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::config::{merge_args, parse_config, take_config_flag};
use crate::io::{read_points, write_points, ParseError};
use crate::parallel::{default_threads, Rayon, THREADS_ENV};
use crate::report::{report_json, stamped};
use crate::verify::{self, ScalingOptions, TwoDimOptions, WalshOptions};

#[derive(Parser, Debug)]
#[command(name = "dnet", version, about = "Digital nets, discrepancy evaluation and verification suites")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Point-set constructions.
    Net {
        #[command(subcommand)]
        action: NetAction,
    },
    /// Evaluate a discrepancy of a point-set file; prints a JSON report.
    Eval(EvalArgs),
    /// Run a verification suite; prints a JSON verdict (CSV for `scaling`).
    Verify(VerifyArgs),
    /// Rank every `a` of the P_a family by its closed-form extreme L2
    /// discrepancy. CSV columns: rank,a,formula,printed_formula,pair_formula
    /// (pair_formula filled for the first and last rows).
    Scan(ScanArgs),
    /// Shift expectations.
    Expect {
        #[command(subcommand)]
        what: ExpectWhat,
    },
}

#[derive(Subcommand, Debug)]
pub enum NetAction {
    /// Generate a net and write it in the point-set format.
    Gen(GenArgs),
}

#[derive(Subcommand, Debug)]
pub enum ExpectWhat {
    /// Mean-square periodic L2 discrepancy over random depth-m shifts.
    Periodic(ExpectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Hammersley,
    Pa,
    Pc,
    UpperOne,
    Faure,
    HammersleyPascal,
}

#[derive(Args, Debug, Clone)]
pub struct NetSpec {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub b: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub m: usize,
    /// Bits a_1..a_{m-1} for the pa family, e.g. 10110.
    #[arg(long)]
    pub a: Option<String>,
    /// Bits c_1..c_{m-1} for the pc family.
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub net: NetSpec,
    /// Apply a random digital shift drawn from this seed.
    #[arg(long)]
    pub shift_seed: Option<u64>,
    /// Also draw per-point offsets below b^-m (output is then decimal).
    #[arg(long)]
    pub offsets: bool,
    /// Append the reflection (x, 1 - 2^-m - y); needs b = 2, d = 2.
    #[arg(long)]
    pub symmetrize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalMetric {
    StarL2,
    ExtremeL2,
    PeriodicL2,
    Diaphony,
    StarLp,
    ExtremeLp,
    PeriodicLp,
    /// Truncated Haar expansion of the extreme L2 discrepancy.
    ExtremeHaar,
    /// L_p norm of the dyadic square function.
    SquareFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Grid,
    Mc,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub metric: EvalMetric,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Grid)]
    pub scheme: SchemeArg,
    /// Evaluation budget (accepts 1e6).
    #[arg(long, default_value = "1e6")]
    pub budget: String,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exact rational arithmetic (grid point sets, L2 metrics).
    #[arg(long)]
    pub exact: bool,
    /// Haar truncation level (default m + 8, or 12 off the grid).
    #[arg(long)]
    pub jmax: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "2dnets")]
    TwoDNets,
    #[value(alias = "haar")]
    HaarRegions,
    WalshRho,
    Expectations,
    Inequalities,
    Scaling,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Depths, e.g. 3..8, 3..=8, 4 or 3,5,7.
    #[arg(long)]
    pub m: Option<String>,
    /// Bases for walsh-rho, e.g. 2,3,5.
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub kmax: u64,
    #[arg(long, default_value_t = 10_000)]
    pub hmax: i64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub sets: usize,
    #[arg(long, default_value_t = 20)]
    pub random_a: usize,
    #[arg(long, default_value_t = 10)]
    pub shifts: usize,
    /// Only hammersley is supported by the scaling suite.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Skip the multithreaded timing comparison of the scaling suite.
    #[arg(long)]
    pub no_timing: bool,
    /// Output of the scaling suite (CSV columns:
    /// m,n,extreme_l2_sq,ratio_64_over_m,seconds,ns_per_pair).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = crate::scan::DEFAULT_SCAN_LIMIT)]
    pub limit: usize,
    #[arg(long)]
    pub shift_seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExpectArgs {
    #[command(flatten)]
    pub net: NetSpec,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Draw digits only (offsets zero).
    #[arg(long)]
    pub no_offsets: bool,
    /// Cap on enumerated dual frequencies.
    #[arg(long, default_value_t = DEFAULT_DUAL_LIMIT)]
    pub dual_limit: u128,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn bits(s: &str, name: &str) -> anyhow::Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(anyhow!(Error::invalid(format!("--{name} takes a 0/1 string, got '{s}'")))),
        })
        .collect()
}

fn validation(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Error::invalid(msg.into()))
}

fn is_binary_2d(f: Family) -> bool {
    !matches!(f, Family::Faure | Family::HammersleyPascal)
}

pub fn build_net(spec: &NetSpec) -> anyhow::Result<GeneratorSet> {
    let f = spec.family;
    if matches!(f, Family::Hammersley | Family::Pa | Family::Pc | Family::UpperOne | Family::HammersleyPascal) {
        if spec.b.is_some_and(|b| b != 2) {
            return Err(validation(format!("family {:?} requires b=2", f).to_lowercase()));
        }
        let d_needed = if f == Family::HammersleyPascal { 3 } else { 2 };
        if spec.d.is_some_and(|d| d != d_needed) {
            return Err(validation(format!("family {f:?} requires d={d_needed}").to_lowercase()));
        }
    }
    if spec.a.is_some() && f != Family::Pa {
        return Err(validation("--a applies to the pa family only"));
    }
    if spec.c.is_some() && f != Family::Pc {
        return Err(validation("--c applies to the pc family only"));
    }
    let m = spec.m;
    let g = match f {
        Family::Hammersley => GeneratorSet::hammersley(m)?,
        Family::UpperOne => GeneratorSet::upper_one(m)?,
        Family::HammersleyPascal => GeneratorSet::hammersley_pascal(m)?,
        Family::Pa => {
            let a = spec.a.as_deref().ok_or_else(|| validation("family pa requires --a"))?;
            GeneratorSet::family_pa(m, &bits(a, "a")?)?
        }
        Family::Pc => {
            let c = spec.c.as_deref().ok_or_else(|| validation("family pc requires --c"))?;
            GeneratorSet::family_pc(m, &bits(c, "c")?)?
        }
        Family::Faure => {
            let b = spec.b.ok_or_else(|| validation("family faure requires --b"))?;
            let d = spec.d.ok_or_else(|| validation("family faure requires --d"))?;
            GeneratorSet::faure(b, d, m)?
        }
    };
    Ok(g)
}

/// Seeded shift for `net gen`: second coordinate only for the base-2 planar
/// families, every coordinate otherwise.
pub fn seeded_shift(family: Family, g: &GeneratorSet, seed: u64, offsets: bool) -> anyhow::Result<DigitalShift> {
    let (b, m, d) = (g.base().get(), g.m(), g.dim());
    let n = g.num_points() as usize;
    if !is_binary_2d(family) {
        return Ok(DigitalShift::random(b, m, d, offsets.then_some(n), seed, 0));
    }
    let mut r = rng(seed, 0);
    let second: Vec<u8> = (0..m).map(|_| r.gen_range(0..2u8)).collect();
    let deltas = offsets.then(|| {
        let width = 1.0 / (1u64 << m) as f64;
        (0..n * d).map(|_| r.gen::<f64>() * width).collect()
    });
    Ok(DigitalShift::new(2, m, vec![vec![0; m], second], deltas)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, v: &Value) -> anyhow::Result<()> {
    emit(out, &format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<i32> {
    let g = build_net(&args.net)?;
    if args.symmetrize && (g.dim() != 2 || g.base().get() != 2) {
        return Err(validation(format!(
            "--symmetrize requires d=2 and b=2, got d={} b={}",
            g.dim(),
            g.base().get()
        )));
    }
    if args.offsets && args.shift_seed.is_none() {
        return Err(validation("--offsets needs --shift-seed"));
    }
    let t = g.t();
    if !g.is_net_system(t) {
        bail!("internal: generator set fails its own t-value");
    }
    let mut ps = g.generate();
    if let Some(seed) = args.shift_seed {
        ps = apply_shift(&ps, &seeded_shift(args.net.family, &g, seed, args.offsets)?)?;
    }
    if args.symmetrize {
        ps = symmetrize(&ps)?;
    }
    emit(&args.out, &write_points(&ps))?;
    eprintln!("t={t} (verified) N={} d={} b={} m={}", ps.len(), g.dim(), g.base().get(), g.m());
    Ok(0)
}

fn parse_budget(s: &str) -> anyhow::Result<u64> {
    let v: f64 = s.trim().parse().map_err(|_| validation(format!("--budget '{s}' is not a number")))?;
    if !(v >= 1.0 && v <= u64::MAX as f64) {
        return Err(validation(format!("--budget must be at least 1, got {s}")));
    }
    Ok(v as u64)
}

fn read_input(path: &PathBuf) -> anyhow::Result<PointSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_points(&text).map_err(|e| anyhow!(e).context(format!("parsing {}", path.display())))
}

fn cmd_eval(args: &EvalArgs, threads: usize) -> anyhow::Result<i32> {
    let ps = read_input(&args.input)?;
    let budget = Budget {
        evaluations: parse_budget(&args.budget)?,
        tolerance: args.tolerance,
        seed: args.seed,
    };
    let scheme = match args.scheme {
        SchemeArg::Grid => Scheme::Grid,
        SchemeArg::Mc => Scheme::MonteCarlo,
    };
    let pair = |metric: Metric| -> anyhow::Result<Value> {
        let rep = if args.exact {
            exact_report(&ps, metric)?
        } else {
            exact_l2_with(&ps, metric, &Rayon::new(threads)?)
        };
        Ok(report_json(&rep))
    };
    let est = |f: fn(&PointSet, f64, Scheme, &Budget) -> dnet_core::Result<dnet_core::DiscrepancyReport>| -> anyhow::Result<Value> {
        if args.exact {
            return Err(validation("--exact applies to the L2 metrics only"));
        }
        Ok(report_json(&f(&ps, args.p, scheme, &budget)?))
    };
    let jmax = args.jmax.unwrap_or_else(|| ps.dyadic_depth().map_or(12, |m| m + 8));
    let v = match args.metric {
        EvalMetric::StarL2 => pair(Metric::Star)?,
        EvalMetric::ExtremeL2 => pair(Metric::Extreme)?,
        EvalMetric::PeriodicL2 => pair(Metric::Periodic)?,
        EvalMetric::Diaphony => {
            if args.exact {
                return Err(anyhow!(Error::NotExact).context("diaphony has no exact rational form"));
            }
            pair(Metric::Diaphony)?
        }
        EvalMetric::StarLp => est(lp_star_estimate)?,
        EvalMetric::ExtremeLp => est(lp_extreme_estimate)?,
        EvalMetric::PeriodicLp => est(lp_periodic_estimate)?,
        EvalMetric::ExtremeHaar => {
            let h = extreme_l2_via_haar(&ps, jmax);
            let mut m = Map::new();
            m.insert("metric".into(), json!("extreme-haar"));
            m.insert("max_level".into(), json!(h.max_level));
            m.insert("partial".into(), json!(h.partial));
            m.insert("tail".into(), json!(h.tail));
            m.insert("value_squared".into(), json!(h.total()));
            m.insert("n".into(), json!(ps.len()));
            m.insert("d".into(), json!(ps.dim()));
            stamped(m)
        }
        EvalMetric::SquareFunction => {
            let s = square_function_lp(&ps, args.p, jmax, budget.evaluations)?;
            let mut m = Map::new();
            m.insert("metric".into(), json!("square-function"));
            m.insert("p".into(), json!(args.p));
            m.insert("value".into(), json!(s));
            m.insert("max_level".into(), json!(jmax));
            m.insert("n".into(), json!(ps.len()));
            m.insert("d".into(), json!(ps.dim()));
            stamped(m)
        }
    };
    emit_json(&args.out, &v)?;
    Ok(0)
}

/// `3..8` and `3..=8` (both inclusive), `5`, or `3,5,7`.
pub fn parse_list(s: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || validation(format!("cannot read '{s}' as a range or list"));
    if let Some((a, b)) = s.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn cmd_verify(args: &VerifyArgs, threads: usize) -> anyhow::Result<i32> {
    let exec = Rayon::new(threads)?;
    let ms = args.m.as_deref().map(parse_list).transpose()?;
    let verdict = match args.suite {
        Suite::TwoDNets => {
            let mut opt = TwoDimOptions {
                random_a: args.random_a,
                shifts: args.shifts,
                seed: args.seed,
                ..TwoDimOptions::default()
            };
            if let Some(ms) = ms {
                if ms.iter().any(|&m| m < 2) {
                    return Err(validation("2dnets needs m >= 2"));
                }
                opt.ms = ms;
            }
            verify::two_dim_nets(&opt, &exec)?
        }
        Suite::HaarRegions => verify::haar_regions(&ms.unwrap_or_else(|| (3..=8).collect()))?,
        Suite::WalshRho => {
            let bases = match &args.b {
                Some(s) => parse_list(s)?.into_iter().map(|b| b as u32).collect(),
                None => WalshOptions::default().bases,
            };
            for &b in &bases {
                dnet_core::PrimeBase::new(b)?;
            }
            verify::walsh_rho(&WalshOptions {
                bases,
                kmax: args.kmax,
                hmax: args.hmax,
            })
        }
        Suite::Expectations => verify::expectations(args.samples, args.seed, &exec)?,
        Suite::Inequalities => verify::inequalities(&verify::InequalityOptions {
            sets: args.sets,
            seed: args.seed,
            ..Default::default()
        })?,
        Suite::Scaling => {
            if args.family.is_some_and(|f| f != Family::Hammersley) {
                return Err(validation("the scaling suite supports --family hammersley only"));
            }
            let mut opt = ScalingOptions::default();
            if let Some(ms) = ms {
                opt.ms = ms;
            }
            if args.no_timing {
                opt.parallel_threads = None;
            }
            verify::scaling(&opt)?
        }
    };
    let format = args.format.unwrap_or(if args.suite == Suite::Scaling { Format::Csv } else { Format::Json });
    match (format, verdict.extra.get("csv")) {
        (Format::Csv, Some(Value::String(csv))) => {
            emit(&args.out, csv)?;
            let failed: Vec<&str> = verdict.checks.iter().filter(|c| c.gated && !c.pass).map(|c| c.name.as_str()).collect();
            eprintln!("{}: {}", verdict.suite, if failed.is_empty() { "pass".to_string() } else { format!("FAIL {failed:?}") });
        }
        (Format::Csv, _) => return Err(validation("only the scaling suite has CSV output")),
        _ => emit_json(&args.out, &verdict.to_json())?,
    }
    Ok(if verdict.passed() { 0 } else { 1 })
}

fn cmd_scan(args: &ScanArgs, threads: usize) -> anyhow::Result<i32> {
    let rows = crate::scan::scan(args.m, args.limit, args.shift_seed, &Rayon::new(threads)?)?;
    emit(&args.out, &crate::scan::to_csv(&rows))?;
    Ok(0)
}

fn cmd_expect(args: &ExpectArgs, threads: usize) -> anyhow::Result<i32> {
    let g = build_net(&args.net)?;
    let exec = Rayon::new(threads)?;
    let (b, m, d, t) = (g.base().get(), g.m(), g.dim(), g.t());
    let formula = expected_periodic_l2_sq_with(&g, args.dual_limit, &exec)?;
    let rational = match expected_periodic_l2_sq_exact(&g, args.dual_limit) {
        Ok(r) => Some(r.to_string()),
        Err(Error::NotExact) => None,
        Err(e) => return Err(e.into()),
    };
    let mc = shift_average_mc_with(&g, args.samples, args.seed, !args.no_offsets, &exec)?;
    let correction = if args.no_offsets { None } else { Some(diagonal_correction(&g)) };
    let mut out = Map::new();
    out.insert("exact".into(), json!(formula));
    out.insert("exact_rational".into(), json!(rational));
    out.insert("randomized_expectation".into(), json!(correction.map(|c| formula + c)));
    out.insert("diagonal_correction".into(), json!(correction));
    out.insert("bound".into(), json!(thm12_bound(b, m, t, d)));
    out.insert("mc_mean".into(), json!(mc.mean));
    out.insert("mc_stderr".into(), json!(mc.stderr));
    out.insert("samples".into(), json!(mc.samples));
    out.insert("seed".into(), json!(mc.seed));
    out.insert("offsets".into(), json!(!args.no_offsets));
    for (k, v) in [("b", b as usize), ("m", m), ("d", d), ("t", t)] {
        out.insert(k.into(), json!(v));
    }
    emit_json(&args.out, &stamped(out))?;
    Ok(0)
}

/// Maps an error to the documented exit status.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if let Some(Error::LimitExceeded { .. }) = cause.downcast_ref::<Error>() {
            return 3;
        }
    }
    2
}

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: Vec<String>) -> i32 {
    let mut args = args;
    if let Some(path) = take_config_flag(&mut args) {
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: reading config {path}: {e}");
                return 2;
            }
        };
        match parse_config(&text) {
            Ok(cfg) => args = merge_args(&args, &cfg),
            Err(e) => {
                eprintln!("error: {path}: {e}");
                return 2;
            }
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let threads = cli.threads.filter(|&t| t > 0).unwrap_or_else(default_threads);
    let result = match &cli.command {
        Command::Net { action: NetAction::Gen(a) } => cmd_gen(a),
        Command::Eval(a) => cmd_eval(a, threads),
        Command::Verify(a) => cmd_verify(a, threads),
        Command::Scan(a) => cmd_scan(a, threads),
        Command::Expect { what: ExpectWhat::Periodic(a) } => cmd_expect(a, threads),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            if let Some(pe) = e.downcast_ref::<ParseError>() {
                eprintln!("error: {e:#} (line {})", pe.line);
            } else {
                eprintln!("error: {e:#}");
            }
            exit_code(&e)
        }
    }
}
