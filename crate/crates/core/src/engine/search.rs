use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{domain, Result};
use crate::functions::{Family, FunctionId};
use crate::precision::{BigReal, PrecisionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Grid,
    CoarseToFine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRow {
    pub t: Decimal,
    pub value: Decimal,
    pub tail_bound: Decimal,
}

/// Outcome of a negativity search. An empty `negatives` list is not
/// evidence of nonnegativity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub fid: FunctionId,
    pub t_min: Decimal,
    pub t_max: Decimal,
    pub strategy: Strategy,
    /// Sign-certain samples (`|value| > tail_bound`), ascending by value.
    pub rows: Vec<SearchRow>,
    /// The rows with negative value.
    pub negatives: Vec<SearchRow>,
    /// Samples dropped because their sign was not certain.
    pub uncertain: usize,
    pub evaluations: usize,
}

/// Number of smallest values refined per pass, and number of passes.
pub const REFINE_TOP: usize = 10;
pub const REFINE_PASSES: usize = 3;
/// Points sampled around each refined value.
const REFINE_POINTS: usize = 20;

struct Sample {
    t: BigReal,
    value: BigReal,
    bound: BigReal,
}

fn sample_all(fid: &FunctionId, ts: &[BigReal], cfg: &PrecisionConfig) -> Result<Vec<Sample>> {
    ts.par_iter()
        .map(|t| {
            let (value, bound) = fid.eval_with_bound(t, cfg)?;
            Ok(Sample {
                t: t.clone(),
                value,
                bound,
            })
        })
        .collect()
}

fn linspace(a: &BigReal, b: &BigReal, n: usize, cfg: &PrecisionConfig) -> Vec<BigReal> {
    if n <= 1 || a == b {
        return vec![cfg.coerce(a)];
    }
    let bits = cfg.bits();
    let h = Float::with_val(bits, b - a) / (n as u32 - 1);
    (0..n).map(|i| Float::with_val(bits, &h * i as u32) + a).collect()
}

/// Samples `fid` (the Hardy-Littlewood function or a `g_m` kernel) on
/// `[t_min, t_max]` and reports the sign-certain values.
///
/// With [`Strategy::CoarseToFine`] the neighbourhoods of the
/// [`REFINE_TOP`] smallest sign-certain values are resampled
/// [`REFINE_PASSES`] times, each pass with a tenfold finer spacing.
pub fn search_negative(
    fid: &FunctionId,
    t_min: &BigReal,
    t_max: &BigReal,
    points: usize,
    strategy: Strategy,
    cfg: &PrecisionConfig,
) -> Result<SearchResult> {
    if !matches!(fid.family, Family::HLH | Family::Gm) {
        return Err(domain(format!("search supports H and g-m, not {}", fid.family)));
    }
    if t_max < t_min {
        return Err(domain("search range must satisfy t_min <= t_max"));
    }
    if points == 0 {
        return Err(domain("search needs at least one point"));
    }
    let bits = cfg.bits();
    let mut ts = linspace(t_min, t_max, points, cfg);
    if fid.family == Family::Gm {
        // g_m is defined for t > 0 only
        ts.retain(|t| *t > 0);
        if ts.is_empty() {
            return Err(domain("g-m search range must contain positive t"));
        }
    }
    let mut samples = sample_all(fid, &ts, cfg)?;
    let mut evaluations = samples.len();
    if strategy == Strategy::CoarseToFine && ts.len() > 1 {
        let mut spacing = Float::with_val(bits, t_max - t_min) / (points.max(2) as u32 - 1);
        for _ in 0..REFINE_PASSES {
            let mut certain: Vec<&Sample> = samples.iter().filter(|s| sign_certain(s)).collect();
            certain.sort_by(cmp_samples);
            let mut fresh = Vec::new();
            for s in certain.iter().take(REFINE_TOP) {
                let lo = Float::with_val(bits, &s.t - &spacing).max(t_min);
                let hi = Float::with_val(bits, &s.t + &spacing).min(t_max);
                fresh.extend(linspace(&lo, &hi, REFINE_POINTS, cfg));
            }
            if fid.family == Family::Gm {
                fresh.retain(|t| *t > 0);
            }
            fresh.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            // overlapping windows give points that agree up to rounding
            let close = Float::with_val(bits, &spacing) / 1_000_000u32;
            let mut kept: Vec<BigReal> = Vec::with_capacity(fresh.len());
            for t in fresh {
                let near = |u: &BigReal| Float::with_val(bits, u - &t).abs() <= close;
                if !kept.iter().any(near) && !samples.iter().any(|s| near(&s.t)) {
                    kept.push(t);
                }
            }
            let fresh = kept;
            evaluations += fresh.len();
            samples.extend(sample_all(fid, &fresh, cfg)?);
            spacing /= 10u32;
        }
    }
    let total = samples.len();
    let mut certain: Vec<Sample> = samples.into_iter().filter(sign_certain).collect();
    let uncertain = total - certain.len();
    certain.sort_by(|a, b| cmp_samples(&a, &b));
    let digits = cfg.digits;
    let row = |s: &Sample| SearchRow {
        t: Decimal::from_float(&s.t, digits),
        value: Decimal::from_float(&s.value, digits),
        tail_bound: Decimal::from_float(&s.bound, 6),
    };
    let rows: Vec<SearchRow> = certain.iter().map(row).collect();
    let negatives = certain.iter().filter(|s| s.value < 0).map(row).collect();
    Ok(SearchResult {
        fid: fid.clone(),
        t_min: Decimal::from_float(t_min, digits),
        t_max: Decimal::from_float(t_max, digits),
        strategy,
        rows,
        negatives,
        uncertain,
        evaluations,
    })
}

fn sign_certain(s: &Sample) -> bool {
    Float::with_val(s.value.prec(), s.value.abs_ref()) > s.bound
}

/// Ascending by value, ties by position.
fn cmp_samples(a: &&Sample, b: &&Sample) -> std::cmp::Ordering {
    a.value
        .partial_cmp(&b.value)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then_with(|| a.t.partial_cmp(&b.t).unwrap_or(std::cmp::Ordering::Equal))
}
