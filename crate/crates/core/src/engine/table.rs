use std::collections::HashMap;

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::Result;
use crate::functions::{boosted, f_alpha, FunctionId};
use crate::precision::{alt, binomial, BigReal, PrecisionConfig};

use super::grid::GridSpec;

/// A function whose alternating derivatives `(-1)^n f^(n)` can be tabulated.
pub trait Differentiable: Sync {
    fn label(&self) -> String;

    fn value(&self, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal>;

    /// `(-1)^n f^(n)(x)` for `n = 0..=n_max` in closed form, if available.
    fn closed_form(&self, _x: &BigReal, _n_max: u32, _cfg: &PrecisionConfig) -> Option<Result<Vec<BigReal>>> {
        None
    }

    fn function_id(&self) -> Option<FunctionId> {
        None
    }
}

impl Differentiable for FunctionId {
    fn label(&self) -> String {
        FunctionId::label(self)
    }

    fn value(&self, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
        self.eval(x, cfg)
    }

    fn closed_form(&self, x: &BigReal, n_max: u32, cfg: &PrecisionConfig) -> Option<Result<Vec<BigReal>>> {
        self.closed_form_derivs(x, n_max, cfg)
    }

    fn function_id(&self) -> Option<FunctionId> {
        Some(self.clone())
    }
}

/// `f_alpha(x) = x^(-(theta_1(x) + alpha))` itself, differentiated
/// numerically.
#[derive(Debug, Clone)]
pub struct FAlpha {
    pub alpha: Decimal,
}

impl Differentiable for FAlpha {
    fn label(&self) -> String {
        format!("f-alpha-itself(alpha={})", self.alpha)
    }

    fn value(&self, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
        f_alpha(&self.alpha.to_float(cfg)?, x, cfg)
    }
}

/// Any closure, differentiated numerically.
pub struct FnDifferentiable<F> {
    pub name: String,
    pub f: F,
}

impl<F> Differentiable for FnDifferentiable<F>
where
    F: Fn(&BigReal, &PrecisionConfig) -> Result<BigReal> + Sync,
{
    fn label(&self) -> String {
        self.name.clone()
    }

    fn value(&self, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
        (self.f)(x, cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    FiniteDifference,
}

/// One table cell `(-1)^n f^(n)(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: BigReal,
    /// Nonnegative bound on the error of `value`.
    pub err: BigReal,
    pub method: Method,
    /// Set when the finite-difference fallback could not reach
    /// `err < |value| / 10`; such entries never decide a verdict.
    pub unresolved: bool,
}

impl Entry {
    pub fn lower(&self) -> BigReal {
        Float::with_val(self.value.prec(), &self.value - &self.err)
    }

    pub fn upper(&self) -> BigReal {
        Float::with_val(self.value.prec(), &self.value + &self.err)
    }
}

#[derive(Debug, Clone)]
pub struct DerivativeTable {
    pub label: String,
    pub fid: Option<FunctionId>,
    pub grid: GridSpec,
    pub n_max: u32,
    pub xs: Vec<BigReal>,
    /// `entries[n][i]` holds order `n` at `xs[i]`.
    pub entries: Vec<Vec<Entry>>,
}

impl DerivativeTable {
    pub fn get(&self, n: u32, i: usize) -> &Entry {
        &self.entries[n as usize][i]
    }
}

/// Decimal digits added when estimating the error of a closed form by
/// re-evaluation.
const CHECK_DIGITS: u32 = 12;

/// Precision of the finite-difference fallback before escalation.
pub const FD_DIGITS: u32 = 100;

/// Tabulates `(-1)^n f^(n)` for `n = 0..=n_max` on the grid. Grid points
/// are processed in parallel and assembled in grid order, so the result
/// does not depend on scheduling.
pub fn derivative_table<D: Differentiable + ?Sized>(
    f: &D,
    grid: &GridSpec,
    n_max: u32,
    cfg: &PrecisionConfig,
) -> Result<DerivativeTable> {
    let xs = grid.points(cfg)?;
    let columns: Vec<Vec<Entry>> = xs
        .par_iter()
        .map(|x| derivative_column(f, x, n_max, cfg))
        .collect::<Result<_>>()?;
    let mut entries = vec![Vec::with_capacity(xs.len()); n_max as usize + 1];
    for col in columns {
        for (n, e) in col.into_iter().enumerate() {
            entries[n].push(e);
        }
    }
    Ok(DerivativeTable {
        label: f.label(),
        fid: f.function_id(),
        grid: grid.clone(),
        n_max,
        xs,
        entries,
    })
}

/// All orders at one point.
pub fn derivative_column<D: Differentiable + ?Sized>(
    f: &D,
    x: &BigReal,
    n_max: u32,
    cfg: &PrecisionConfig,
) -> Result<Vec<Entry>> {
    match f.closed_form(x, n_max, cfg) {
        Some(lo) => {
            let lo = lo?;
            let hi_cfg = boosted(cfg, CHECK_DIGITS);
            let hi = f
                .closed_form(&hi_cfg.coerce(x), n_max, &hi_cfg)
                .expect("closed form available at every precision")?;
            let tol = cfg.tol();
            Ok(lo
                .iter()
                .zip(hi)
                .map(|(l, h)| {
                    let bits = cfg.bits();
                    let diff = Float::with_val(bits, l - &h).abs();
                    let value = Float::with_val(bits, &h);
                    let err = diff + Float::with_val(bits, value.abs_ref()) * &tol + cfg.epsilon() * value.clone().abs();
                    Entry {
                        value,
                        err,
                        method: Method::ClosedForm,
                        unresolved: false,
                    }
                })
                .collect())
        }
        None => finite_difference_column(f, x, n_max, cfg),
    }
}

/// Central differences of orders `0..=n_max` with Richardson extrapolation,
/// at `max(100, 2P)` digits and escalated up to 300 digits while any order
/// has `err >= |value| / 10`.
pub fn finite_difference_column<D: Differentiable + ?Sized>(
    f: &D,
    x: &BigReal,
    n_max: u32,
    cfg: &PrecisionConfig,
) -> Result<Vec<Entry>> {
    let mut digits = FD_DIGITS.max(2 * cfg.digits);
    loop {
        let work = cfg.at_digits(digits);
        let col = fd_attempt(f, x, n_max, &work)?;
        let resolved = col
            .iter()
            .all(|(v, e)| Float::with_val(v.prec(), e * 10u32) < Float::with_val(v.prec(), v.abs_ref()));
        if resolved || digits >= crate::precision::MAX_DIGITS {
            let bits = cfg.bits();
            return Ok(col
                .into_iter()
                .enumerate()
                .map(|(n, (v, e))| {
                    let unresolved = n > 0 && Float::with_val(v.prec(), &e * 10u32) >= Float::with_val(v.prec(), v.abs_ref());
                    Entry {
                        value: Float::with_val(bits, &v),
                        err: Float::with_val(bits, &e),
                        method: Method::FiniteDifference,
                        unresolved,
                    }
                })
                .collect());
        }
        digits = (digits * 2).min(crate::precision::MAX_DIGITS);
    }
}

/// One finite-difference pass at the precision of `work`.
///
/// Order `n` uses the centred stencil
/// `h^-n sum_k (-1)^k C(n,k) f(x + (n/2 - k) h)` at `h`, `h/2` and `h/4`
/// with `h = 10^(-P/(2(n+1)))`, capped so the stencil stays inside
/// `(0, 2x)`. Two Richardson steps in `h^2` follow; the error is the last
/// correction plus a rounding bound.
fn fd_attempt<D: Differentiable + ?Sized>(
    f: &D,
    x: &BigReal,
    n_max: u32,
    work: &PrecisionConfig,
) -> Result<Vec<(BigReal, BigReal)>> {
    let bits = work.bits();
    let x = work.coerce(x);
    let f0 = f.value(&x, work)?;
    let mut out = vec![(f0.clone(), Float::with_val(bits, f0.abs_ref()) * work.epsilon())];
    let eps = work.epsilon();
    for n in 1..=n_max {
        let mut h = work.pow10(-((work.digits / (2 * (n + 1))) as i32));
        // keep x - (n/2) h > x / 2 for positive x
        let cap = Float::with_val(bits, x.abs_ref()) / n.max(1);
        if !x.is_zero() && h > cap {
            h = cap;
        }
        let mut cache: HashMap<i64, Float> = HashMap::new();
        let mut levels = Vec::with_capacity(3);
        let mut max_f = Float::with_val(bits, f0.abs_ref());
        for level in 0..3u32 {
            let hl = Float::with_val(bits, &h) >> level;
            let mut acc = Float::new(bits);
            for k in 0..=n {
                // offset (n/2 - k) hl in units of h/8
                let units = (i64::from(n) - 2 * i64::from(k)) << (2 - level);
                let fv = match cache.get(&units) {
                    Some(v) => v.clone(),
                    None => {
                        let pt = Float::with_val(bits, &h * units) / 8u32 + &x;
                        let v = f.value(&pt, work)?;
                        cache.insert(units, v.clone());
                        v
                    }
                };
                if Float::with_val(bits, fv.abs_ref()) > max_f {
                    max_f = Float::with_val(bits, fv.abs_ref());
                }
                let mut term = binomial(n, k, bits) * fv;
                if k % 2 == 1 {
                    term = -term;
                }
                acc += term;
            }
            let hn = Float::with_val(bits, rug::ops::Pow::pow(&hl, n));
            levels.push(acc / hn);
        }
        let r1a = (Float::with_val(bits, &levels[1] * 4u32) - &levels[0]) / 3u32;
        let r1b = (Float::with_val(bits, &levels[2] * 4u32) - &levels[1]) / 3u32;
        let r2 = (Float::with_val(bits, &r1b * 16u32) - &r1a) / 15u32;
        let trunc = Float::with_val(bits, &r2 - &r1b).abs();
        // rounding: 2^n eps max|f| / (h/4)^n, amplified by the Richardson weights
        let h4 = Float::with_val(bits, &h) >> 2u32;
        let round = Float::with_val(bits, 1u32) << n;
        let round = round * &eps * &max_f / Float::with_val(bits, rug::ops::Pow::pow(&h4, n)) * 4u32;
        let value = r2 * alt(n);
        out.push((value, trunc + round));
    }
    Ok(out)
}
