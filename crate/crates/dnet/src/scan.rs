//! Exhaustive sweep of the `P_a` family ranked by its closed-form extreme L2
//! discrepancy.

use dnet_core::exact::to_f64;
use dnet_core::formulas::{all_bit_vectors, pa_extreme_sq_corrected, pa_extreme_sq_printed};
use dnet_core::metrics::extreme_l2_with;
use dnet_core::nets::{apply_shift, rng};
use dnet_core::{DigitalShift, Error, Executor, GeneratorSet};
use rand::Rng;

/// Largest `m` the sweep accepts by default (`2^{m-1}` vectors).
pub const DEFAULT_SCAN_LIMIT: usize = 16;

/// CSV columns of [`scan`].
pub const SCAN_COLUMNS: &str = "rank,a,formula,printed_formula,pair_formula";

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub a: Vec<u8>,
    pub formula: f64,
    pub printed: f64,
    /// Pair-formula value, computed for the first and last rows only.
    pub pair: Option<f64>,
}

/// All `a` for depth `m`, sorted by the closed form (ties by `a`). The top
/// and bottom entries are confirmed with the pair formula on the net shifted
/// by a seeded second-coordinate shift (`shift_seed`), or unshifted.
pub fn scan<E: Executor + ?Sized>(m: usize, limit: usize, shift_seed: Option<u64>, exec: &E) -> dnet_core::Result<Vec<ScanRow>> {
    if m < 2 {
        return Err(Error::invalid("scan needs m >= 2"));
    }
    if m > limit {
        return Err(Error::LimitExceeded {
            required: 1u128 << (m - 1),
            limit: 1u128 << (limit - 1),
        });
    }
    let mut rows: Vec<ScanRow> = all_bit_vectors(m - 1)
        .into_iter()
        .map(|a| ScanRow {
            formula: to_f64(&pa_extreme_sq_corrected(m, &a)),
            printed: to_f64(&pa_extreme_sq_printed(m, &a)),
            a,
            pair: None,
        })
        .collect();
    rows.sort_by(|x, y| x.formula.total_cmp(&y.formula).then_with(|| x.a.cmp(&y.a)));
    let sigma: Vec<u8> = match shift_seed {
        Some(s) => {
            let mut r = rng(s, 0);
            (0..m).map(|_| r.gen_range(0..2u8)).collect()
        }
        None => vec![0; m],
    };
    let shift = DigitalShift::second_coordinate(m, &sigma)?;
    let last = rows.len() - 1;
    for i in [0, last] {
        let ps = GeneratorSet::family_pa(m, &rows[i].a)?.generate();
        rows[i].pair = extreme_l2_with(&apply_shift(&ps, &shift)?, exec).value_squared;
    }
    Ok(rows)
}

pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_COLUMNS);
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        let a: String = r.a.iter().map(|&x| char::from(b'0' + x)).collect();
        let pair = r.pair.map_or(String::new(), |p| format!("{p:.17e}"));
        out.push_str(&format!("{},{a},{:.17e},{:.17e},{pair}\n", i + 1, r.formula, r.printed));
    }
    out
}
