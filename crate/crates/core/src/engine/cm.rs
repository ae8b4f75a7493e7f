use rug::Float;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::Result;
use crate::functions::{Family, FunctionId};
use crate::precision::PrecisionConfig;

use super::grid::GridSpec;
use super::table::{derivative_table, DerivativeTable, Differentiable, FAlpha};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    AllNonnegative,
    ViolationsFound,
    Inconclusive,
}

/// A table cell whose sign is negative or undecided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignEntry {
    pub n: u32,
    pub x: Decimal,
    pub value: Decimal,
    /// `value - err`.
    pub margin: Decimal,
}

/// Verdict on the signs of a table together with its weakest cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmReport {
    pub label: String,
    pub fid: Option<FunctionId>,
    pub grid: GridSpec,
    pub n_max: u32,
    pub verdict: Verdict,
    /// Cells with `value + err < 0`.
    pub violations: Vec<SignEntry>,
    /// Cells with `|value| <= err`, or unresolved finite differences.
    pub inconclusive: Vec<SignEntry>,
    /// Smallest `value - err` over the table and where it occurs.
    pub min_margin: Decimal,
    pub min_margin_at: (u32, Decimal),
    /// Smallest `(value - err) / |value|`.
    pub min_relative_margin: Decimal,
    pub entries: usize,
    /// For logarithmic checks: the sign check of `f_alpha` itself.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_check: Option<CrossCheck>,
}

/// A log-CM verdict of `AllNonnegative` must not coexist with a sign
/// violation of the function itself, since log-CM implies CM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub report: Box<CmReport>,
    pub consistent: bool,
}

/// Classifies every cell of `table`.
pub fn report_from_table(table: &DerivativeTable, cfg: &PrecisionConfig) -> CmReport {
    let digits = cfg.digits;
    let bits = cfg.bits();
    let mut violations = Vec::new();
    let mut inconclusive = Vec::new();
    let mut min_margin: Option<(Float, u32, usize)> = None;
    let mut min_rel: Option<Float> = None;
    for (n, row) in table.entries.iter().enumerate() {
        for (i, e) in row.iter().enumerate() {
            let lower = e.lower();
            let entry = || SignEntry {
                n: n as u32,
                x: Decimal::from_float(&table.xs[i], digits),
                value: Decimal::from_float(&e.value, digits),
                margin: Decimal::from_float(&lower, digits),
            };
            if e.upper() < 0 && !e.unresolved {
                violations.push(entry());
            } else if lower < 0 || e.unresolved {
                inconclusive.push(entry());
            }
            let rel = if e.value.is_zero() {
                Float::with_val(bits, if lower < 0 { -1 } else { 0 })
            } else {
                Float::with_val(bits, &lower / Float::with_val(bits, e.value.abs_ref()))
            };
            if min_rel.as_ref().is_none_or(|m| rel < *m) {
                min_rel = Some(rel);
            }
            if min_margin.as_ref().is_none_or(|(m, _, _)| lower < *m) {
                min_margin = Some((lower, n as u32, i));
            }
        }
    }
    let verdict = if !violations.is_empty() {
        Verdict::ViolationsFound
    } else if !inconclusive.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::AllNonnegative
    };
    let (mm, mn, mi) = min_margin.expect("table has at least one cell");
    CmReport {
        label: table.label.clone(),
        fid: table.fid.clone(),
        grid: table.grid.clone(),
        n_max: table.n_max,
        verdict,
        violations,
        inconclusive,
        min_margin: Decimal::from_float(&mm, digits),
        min_margin_at: (mn, Decimal::from_float(&table.xs[mi], digits)),
        min_relative_margin: Decimal::from_float(&min_rel.expect("nonempty"), 12),
        entries: table.entries.iter().map(Vec::len).sum(),
        cross_check: None,
    }
}

/// Signs of `(-1)^n f^(n)` on the grid for `n = 0..=n_max`.
pub fn check_cm<D: Differentiable + ?Sized>(
    f: &D,
    grid: &GridSpec,
    n_max: u32,
    cfg: &PrecisionConfig,
) -> Result<CmReport> {
    let table = derivative_table(f, grid, n_max, cfg)?;
    Ok(report_from_table(&table, cfg))
}

/// Points and orders used for the cross-check on `f_alpha` itself.
const CROSS_CHECK_POINTS: usize = 8;
const CROSS_CHECK_ORDERS: u32 = 4;

/// Logarithmic complete monotonicity of `f_alpha`: signs of
/// `(-1)^n phi_alpha^(n)` for `n = 0..=n_max`, where
/// `phi_alpha = -(log f_alpha)'`. The function `f_alpha` itself is then
/// checked by finite differences on a coarse grid.
pub fn check_log_cm(alpha: &Decimal, grid: &GridSpec, n_max: u32, cfg: &PrecisionConfig) -> Result<CmReport> {
    let fid = FunctionId::new(Family::FAlphaLog, 0, Some(alpha.clone()), None, 0)?;
    let mut report = check_cm(&fid, grid, n_max, cfg)?;
    let coarse = GridSpec {
        count: CROSS_CHECK_POINTS.min(grid.count),
        ..grid.clone()
    };
    let itself = FAlpha { alpha: alpha.clone() };
    let cm = check_cm(&itself, &coarse, n_max.min(CROSS_CHECK_ORDERS), cfg)?;
    let consistent = !(report.verdict == Verdict::AllNonnegative && cm.verdict == Verdict::ViolationsFound);
    report.cross_check = Some(CrossCheck {
        report: Box::new(cm),
        consistent,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::table::{Entry, Method};
    use crate::precision::BigReal;
    use proptest::prelude::*;

    fn table_from(values: &[(f64, f64)], c: &PrecisionConfig) -> DerivativeTable {
        let grid = GridSpec::linear("1", "2", values.len().max(2)).unwrap();
        let xs: Vec<BigReal> = grid.points(c).unwrap();
        let row: Vec<Entry> = values
            .iter()
            .map(|&(v, e)| Entry {
                value: c.num(v),
                err: c.num(e),
                method: Method::ClosedForm,
                unresolved: false,
            })
            .collect();
        DerivativeTable {
            label: "synthetic".into(),
            fid: None,
            grid,
            n_max: 0,
            xs,
            entries: vec![row],
        }
    }

    proptest! {
        #[test]
        fn verdict_soundness(cells in proptest::collection::vec((-1.0f64..1.0, 0.0f64..0.5), 2..20)) {
            let c = PrecisionConfig::with_digits(30).unwrap();
            let r = report_from_table(&table_from(&cells, &c), &c);
            let any_violation = cells.iter().any(|(v, e)| v + e < 0.0);
            let all_nonneg = cells.iter().all(|(v, e)| v - e >= 0.0);
            match r.verdict {
                Verdict::ViolationsFound => prop_assert!(any_violation),
                Verdict::AllNonnegative => prop_assert!(all_nonneg),
                Verdict::Inconclusive => prop_assert!(!any_violation && !all_nonneg),
            }
            prop_assert_eq!(r.violations.len(), cells.iter().filter(|(v, e)| v + e < 0.0).count());
        }
    }

    #[test]
    fn phi_q_is_completely_monotonic() {
        let c = PrecisionConfig::with_digits(30).unwrap();
        let g = GridSpec::log("0.1", "20", 12).unwrap();
        let r = check_cm(&FunctionId::phi_q("0.5").unwrap(), &g, 8, &c).unwrap();
        assert_eq!(r.verdict, Verdict::AllNonnegative);
        assert!(r.min_margin.to_f64() > 0.0);
    }

    #[test]
    fn scaled_phi_with_too_large_exponent_fails() {
        let c = PrecisionConfig::with_digits(30).unwrap();
        let g = GridSpec::log("0.001", "1", 30).unwrap();
        let r = check_cm(&FunctionId::phi_scaled(1, "2").unwrap(), &g, 3, &c).unwrap();
        assert_eq!(r.verdict, Verdict::ViolationsFound);
        assert!(r.violations.iter().all(|v| v.n <= 3));
    }

    #[test]
    fn log_check_runs_cross_check() {
        let c = PrecisionConfig::with_digits(30).unwrap();
        let g = GridSpec::log("0.1", "10", 10).unwrap();
        let r = check_log_cm(&"1".parse().unwrap(), &g, 3, &c).unwrap();
        assert_eq!(r.verdict, Verdict::AllNonnegative);
        let cc = r.cross_check.unwrap();
        assert!(cc.consistent);
        assert_ne!(cc.report.verdict, Verdict::ViolationsFound);
    }
}
