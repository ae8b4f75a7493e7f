//! The full verification suite behind `verify-paper`.

use std::path::Path;

use rug::Float;

use crate::decimal::Decimal;
use crate::engine::{
    check_cm, check_log_cm, convergence_study, finite_difference_column, search_negative, verify_alzer_inequality,
    verify_derivative_limit_constants, verify_double_inequality, verify_elementary_inequality, verify_k2_sign,
    verify_k3_derivative, verify_kernel_identity, verify_polygamma_bracket, verify_scaled_limits,
    verify_theta1_bounds, verify_theta1_derivative_bound, verify_theta_m_nonnegative, CmReport, FnDifferentiable,
    GridSpec, InequalityReport, Strategy, Verdict,
};
use crate::error::Result;
use crate::functions::{f_m, laplace_g_m, laplace_theta_m, phi, phi_q, phi_scaled, Family, FunctionId};
use crate::precision::{BigReal, PrecisionConfig};
use crate::report::{
    Comparison, Convergence, Expectation, Limits, Outcome, Payload, ReportEnvelope, RunConfig, SummaryRow,
};

/// One suite row and the report behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteItem {
    pub row: SummaryRow,
    pub payload: Payload,
}

/// Sizes of the suite. `quick` shrinks grids, orders and ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub quick: bool,
}

impl Scale {
    fn pick<T>(self, full: T, quick: T) -> T {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

/// Grid used by `--quick` in place of the configured one.
pub fn quick_grid() -> GridSpec {
    GridSpec::log("0.01", "1000", 25).expect("valid grid")
}

/// Working precision for the Laplace integrals and the search.
const COARSE_DIGITS: u32 = 30;
/// Precision of the finite-difference oracle for `f_m`.
const ORACLE_DIGITS: u32 = 100;

type RowFn<'a> = Box<dyn Fn() -> Result<(Outcome, String, Payload)> + 'a>;

/// Runs every row. Errors inside a row mark it inconclusive instead of
/// aborting the suite.
pub fn run_suite(config: &RunConfig, scale: Scale) -> Vec<SuiteItem> {
    let cfg = config.precision;
    let grid = if scale.quick { quick_grid() } else { config.grid.clone() };
    let n_max = scale.pick(config.n_max, config.n_max.min(4));
    let rows: Vec<(&str, Expectation, RowFn)> = vec![
        ("phi-double-inequality", Expectation::Pass, Box::new(|| {
            inequality(verify_double_inequality(&grid, scale.pick(10, 4), &cfg)?)
        })),
        ("phi-scaled-limits", Expectation::Pass, Box::new(|| scaled_limits(scale, &cfg))),
        ("derivative-limit-order-m-plus-1", Expectation::Pass, Box::new(|| derivative_limits(scale, false, &cfg))),
        ("derivative-limit-order-m-plus-2", Expectation::Pass, Box::new(|| derivative_limits(scale, true, &cfg))),
        ("phi-scaled-alpha-m-plus-1-not-cm", Expectation::Violation, Box::new(|| {
            not_cm(&grid, scale.pick(6, 4), scale.pick(5, 3), &cfg)
        })),
        ("theta-m-nonnegative", Expectation::Pass, Box::new(|| {
            let t = GridSpec::linear("0.3", "30", 100)?;
            let ms: Vec<u32> = (1..=scale.pick(6, 3)).collect();
            let t = if scale.quick { GridSpec::linear("1.5", "30", 20)? } else { t };
            inequality(verify_theta_m_nonnegative(&t, &ms, &cfg)?)
        })),
        ("phi-scaled-alpha-m-minus-2-cm", Expectation::Pass, Box::new(|| {
            let ms = 2..=scale.pick(5, 3);
            cm_all(ms.map(|m| FunctionId::phi_scaled(m, &(m as i64 - 2).to_string())), &grid, scale.pick(6, 4), &cfg)
        })),
        ("q-analogue-cm", Expectation::Pass, Box::new(|| q_analogue(&grid, n_max, &cfg))),
        ("f-alpha-log-cm", Expectation::Pass, Box::new(|| {
            let g = GridSpec::log("0.05", "50", scale.pick(200, 25))?;
            let r = check_log_cm(&"-0.25".parse()?, &g, scale.pick(6, 4), &cfg)?;
            let consistent = r.cross_check.as_ref().is_none_or(|c| c.consistent);
            let (o, d) = cm_outcome(&r);
            let o = if consistent { o } else { Outcome::Fail };
            Ok((o, format!("{d}; cross-check {}", if consistent { "consistent" } else { "INCONSISTENT" }), Payload::Cm(r)))
        })),
        ("theta1-bounds", Expectation::Pass, Box::new(|| inequality(verify_theta1_bounds(&grid, &cfg)?))),
        ("theta1-derivative-bound", Expectation::Pass, Box::new(|| {
            let g = GridSpec::log("1.01", "100", scale.pick(200, 25))?;
            inequality(verify_theta1_derivative_bound(&g, 2..=5, &"-0.25".parse()?, &cfg)?)
        })),
        ("alzer-inequality", Expectation::Pass, Box::new(|| inequality(verify_alzer_inequality(&grid, n_max, &cfg)?))),
        ("polygamma-bracket", Expectation::Pass, Box::new(|| {
            inequality(verify_polygamma_bracket(&grid, n_max, &cfg)?)
        })),
        ("k2-kernel-sign", Expectation::Pass, Box::new(|| {
            inequality(verify_k2_sign(&GridSpec::log("0.01", "50", scale.pick(100, 20))?, &cfg)?)
        })),
        ("k3-derivative-identity", Expectation::Pass, Box::new(|| {
            let g = GridSpec::linear("0.1", "20", scale.pick(100, 20))?;
            inequality(verify_k3_derivative(&g, &residual_threshold(&cfg), &cfg)?)
        })),
        ("elementary-trig-inequality", Expectation::Pass, Box::new(|| {
            inequality(verify_elementary_inequality(&GridSpec::linear("0", "100", scale.pick(1000, 100))?, &cfg)?)
        })),
        ("kernel-identity-residual", Expectation::Pass, Box::new(|| {
            let g = GridSpec::log("0.01", "30", scale.pick(40, 10))?;
            let ms: Vec<u32> = (1..=scale.pick(6, 3)).collect();
            inequality(verify_kernel_identity(&g, &ms, &residual_threshold(&cfg), &cfg)?)
        })),
        ("f-m-oracle-equivalence", Expectation::Pass, Box::new(|| f_m_oracle(scale.pick(6, 3), &cfg))),
        ("laplace-consistency", Expectation::Pass, Box::new(|| laplace(scale, &cfg))),
        ("convergence-to-s", Expectation::Pass, Box::new(|| convergence(&cfg))),
        ("hardy-littlewood-search", Expectation::Documented, Box::new(|| {
            hardy_littlewood(scale.pick(10_000, 100), scale.pick(2000, 200), &cfg)
        })),
    ];
    rows.into_iter()
        .enumerate()
        .map(|(i, (name, expectation, run))| {
            let (outcome, detail, payload) = match run() {
                Ok(r) => r,
                Err(e) => (Outcome::Inconclusive, format!("error: {e}"), Payload::Comparisons(vec![])),
            };
            SuiteItem {
                row: SummaryRow {
                    name: name.to_string(),
                    expectation,
                    outcome,
                    detail,
                    file: format!("{:02}-{name}.{}", i + 1, config.format.extension()),
                },
                payload,
            }
        })
        .collect()
}

/// Writes one envelope per row plus `summary.<ext>` into `dir`.
pub fn write_suite(dir: &Path, config: &RunConfig, items: &[SuiteItem]) -> Result<Vec<SummaryRow>> {
    for item in items {
        ReportEnvelope::new(config.clone(), item.payload.clone()).write(&dir.join(&item.row.file), config.format)?;
    }
    let rows: Vec<SummaryRow> = items.iter().map(|i| i.row.clone()).collect();
    let summary = ReportEnvelope::new(config.clone(), Payload::Summary(rows.clone()));
    summary.write(&dir.join(format!("summary.{}", config.format.extension())), config.format)?;
    Ok(rows)
}

/// Fixed-width text table of the summary rows.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:<11}  {:<12}  detail\n", "name", "expected", "outcome");
    for r in rows {
        let expected = match r.expectation {
            Expectation::Pass => "pass",
            Expectation::Violation => "violation",
            Expectation::Documented => "documented",
        };
        let outcome = match r.outcome {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "inconclusive",
        };
        out.push_str(&format!("{:<width$}  {expected:<11}  {outcome:<12}  {}\n", r.name, r.detail));
    }
    out
}

/// Residual threshold for identities evaluated at `P` digits:
/// `10^-(P-15)`, which is `10^-35` at the default precision.
fn residual_threshold(cfg: &PrecisionConfig) -> BigReal {
    cfg.pow10(-(cfg.digits as i32 - 15))
}

fn inequality(r: InequalityReport) -> Result<(Outcome, String, Payload)> {
    let outcome = if r.pass { Outcome::Pass } else { Outcome::Fail };
    let detail = format!("worst relative margin {}", short(&r.worst_margin));
    Ok((outcome, detail, Payload::Inequality(r)))
}

fn short(d: &Decimal) -> String {
    crate::decimal::format_float(&Float::with_val(64, d.to_f64()), 4)
}

fn cm_outcome(r: &CmReport) -> (Outcome, String) {
    let o = match r.verdict {
        Verdict::AllNonnegative => Outcome::Pass,
        Verdict::ViolationsFound => Outcome::Fail,
        Verdict::Inconclusive => Outcome::Inconclusive,
    };
    (o, format!("{}: {:?}, min margin {}", r.label, r.verdict, short(&r.min_margin)))
}

fn cm_all(
    fids: impl Iterator<Item = Result<FunctionId>>,
    grid: &GridSpec,
    n_max: u32,
    cfg: &PrecisionConfig,
) -> Result<(Outcome, String, Payload)> {
    let mut reports = Vec::new();
    for fid in fids {
        reports.push(check_cm(&fid?, grid, n_max, cfg)?);
    }
    Ok(combine(reports.into_iter().map(Payload::Cm).collect(), |p| match p {
        Payload::Cm(r) => cm_outcome(r),
        _ => unreachable!(),
    }))
}

/// Worst outcome over the parts: fail, then inconclusive, then pass.
fn combine(parts: Vec<Payload>, outcome: impl Fn(&Payload) -> (Outcome, String)) -> (Outcome, String, Payload) {
    let rated: Vec<(Outcome, String)> = parts.iter().map(outcome).collect();
    let worst = if rated.iter().any(|r| r.0 == Outcome::Fail) {
        Outcome::Fail
    } else if rated.iter().any(|r| r.0 == Outcome::Inconclusive) {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    let detail = rated.into_iter().map(|r| r.1).collect::<Vec<_>>().join("; ");
    (worst, detail, Payload::Batch(parts))
}

fn scaled_limits(scale: Scale, cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let scaled = (0..=scale.pick(5, 2)).map(|m| verify_scaled_limits(m, cfg)).collect::<Result<Vec<_>>>()?;
    let worst = scaled
        .iter()
        .flat_map(|s| [s.at_zero.relative_error.to_f64(), s.at_infinity.relative_error.to_f64()])
        .fold(0.0, f64::max);
    let outcome = if worst < 1e-3 { Outcome::Pass } else { Outcome::Fail };
    let detail = format!("largest relative error {worst:.3e} (tolerance 1e-3)");
    Ok((outcome, detail, Payload::Limits(Limits { scaled, derivatives: vec![] })))
}

fn derivative_limits(scale: Scale, second: bool, cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let derivatives = (1..=scale.pick(4, 2))
        .map(|m| verify_derivative_limit_constants(m, cfg))
        .collect::<Result<Vec<_>>>()?;
    let rel = |f: &dyn Fn(&crate::engine::DerivativeLimits) -> f64| derivatives.iter().map(f).fold(0.0, f64::max);
    let (worst, detail) = if second {
        let stated = rel(&|d| d.order_m2.relative_error.to_f64());
        let taylor = rel(&|d| d.order_m2_taylor.relative_error.to_f64());
        (
            stated,
            format!(
                "stated constant: largest relative error {stated:.3e}; (m+2)!(m+1)(m+1)!zeta(m+2): {taylor:.3e} (tolerance 1e-2)"
            ),
        )
    } else {
        let w = rel(&|d| d.order_m1.relative_error.to_f64());
        (w, format!("largest relative error {w:.3e} (tolerance 1e-2)"))
    };
    let outcome = if worst < 1e-2 { Outcome::Pass } else { Outcome::Fail };
    Ok((outcome, detail, Payload::Limits(Limits { scaled: vec![], derivatives })))
}

/// `(-1)^m x^(m+1) Phi^(m)(x)` should fail complete monotonicity for every
/// `m`; the row passes only if a violation is found for each one.
fn not_cm(grid: &GridSpec, n_max: u32, m_max: u32, cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let mut reports = Vec::new();
    for m in 0..=m_max {
        reports.push(Payload::Cm(check_cm(&FunctionId::phi_scaled(m, &(m + 1).to_string())?, grid, n_max, cfg)?));
    }
    Ok(combine(reports, |p| match p {
        Payload::Cm(r) => {
            let o = match r.verdict {
                Verdict::ViolationsFound => Outcome::Pass,
                Verdict::AllNonnegative => Outcome::Fail,
                Verdict::Inconclusive => Outcome::Inconclusive,
            };
            let first = r.violations.first().map(|v| format!(" first at n={} x={}", v.n, short(&v.x))).unwrap_or_default();
            (o, format!("{}: {:?}{first}", r.label, r.verdict))
        }
        _ => unreachable!(),
    }))
}

fn compare(name: String, value: &BigReal, reference: &BigReal, tol: f64, digits: u32) -> Comparison {
    let bits = value.prec().max(reference.prec());
    let diff = Float::with_val(bits, value - reference).abs();
    let rel = if reference.is_zero() { diff } else { diff / Float::with_val(bits, reference.abs_ref()) };
    Comparison {
        name,
        value: Decimal::from_float(value, digits),
        reference: Decimal::from_float(reference, digits),
        relative_error: Decimal::from_float(&rel, 6),
        tolerance: Decimal::from_float(&Float::with_val(64, tol), 6),
        pass: rel.to_f64() < tol,
    }
}

fn comparisons(rows: Vec<Comparison>) -> (Outcome, String, Payload) {
    let failed = rows.iter().filter(|r| !r.pass).count();
    let worst = rows.iter().map(|r| r.relative_error.to_f64()).fold(0.0, f64::max);
    let outcome = if failed == 0 { Outcome::Pass } else { Outcome::Fail };
    let detail = format!("{} of {} within tolerance, largest relative error {worst:.3e}", rows.len() - failed, rows.len());
    (outcome, detail, Payload::Comparisons(rows))
}

fn q_analogue(grid: &GridSpec, n_max: u32, cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let mut parts = Vec::new();
    for q in ["0.2", "0.5", "0.9"] {
        parts.push(Payload::Cm(check_cm(&FunctionId::phi_q(q)?, grid, n_max, cfg)?));
    }
    let q = cfg.parse("0.9999")?;
    let two = cfg.num(2);
    let near = compare("Phi_q(2) at q = 0.9999 vs Phi(2)".into(), &phi_q(&q, 0, &two, cfg)?, &phi(&two, cfg)?, 1e-3, cfg.digits);
    parts.push(Payload::Comparisons(vec![near]));
    Ok(combine(parts, |p| match p {
        Payload::Cm(r) => cm_outcome(r),
        Payload::Comparisons(c) => {
            let (o, d, _) = comparisons(c.clone());
            (o, format!("q -> 1: {d}"))
        }
        _ => unreachable!(),
    }))
}

/// `f_m` from its Laguerre form against the `m`-th finite difference of
/// `t^m / (1 - e^-t)` at 100 digits.
fn f_m_oracle(m_max: u32, cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let oracle_cfg = cfg.at_digits(ORACLE_DIGITS.max(cfg.digits));
    let mut rows = Vec::new();
    for m in 0..=m_max {
        let g = FnDifferentiable {
            name: format!("t^{m}/(1-e^-t)"),
            f: move |t: &BigReal, c: &PrecisionConfig| -> Result<BigReal> {
                let bits = c.bits();
                let num = Float::with_val(bits, rug::ops::Pow::pow(t, m));
                let den = -Float::with_val(bits, (-Float::with_val(bits, t)).exp_m1());
                Ok(num / den)
            },
        };
        for t in ["0.5", "1", "2", "5", "10"] {
            let tv = oracle_cfg.parse(t)?;
            let col = finite_difference_column(&g, &tv, m, &oracle_cfg)?;
            let mut fd = col[m as usize].value.clone();
            if m % 2 == 1 {
                fd = -fd;
            }
            let v = f_m(m, &cfg.coerce(&tv), cfg)?.value;
            rows.push(compare(format!("f_{m}({t})"), &v, &fd, 1e-20, cfg.digits));
        }
    }
    Ok(comparisons(rows))
}

fn laplace(scale: Scale, cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let c = cfg.at_digits(COARSE_DIGITS.min(cfg.digits));
    let mut rows = Vec::new();
    for m in 1..=scale.pick(3, 2) {
        for x in ["0.5", "1", "2", "5"] {
            let xv = c.parse(x)?;
            let g = laplace_g_m(m, &xv, &c)?.value;
            let target = phi_scaled(m, &c.num(m), &xv, &c)?;
            rows.push(compare(format!("int g_{m} e^(-xt) at x={x}"), &g, &target, 1e-6, c.digits));
            let th = laplace_theta_m(m, &xv, &c)?.value;
            let alpha = Float::with_val(c.bits(), c.num(m) - 2u32);
            let target = phi_scaled(m, &alpha, &xv, &c)?;
            rows.push(compare(format!("int Theta_{m} e^(-xt) at x={x}"), &th, &target, 1e-6, c.digits));
        }
    }
    Ok(comparisons(rows))
}

fn convergence(cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let ms = [10, 20, 40, 60];
    let mut parts = Vec::new();
    for z in [1u32, 5, 10] {
        let rows = convergence_study(&cfg.num(z), &ms, cfg)?;
        parts.push(Payload::Convergence(Convergence { z: Decimal::from_float(&cfg.num(z), cfg.digits), rows }));
    }
    Ok(combine(parts, |p| match p {
        Payload::Convergence(c) => {
            let first = c.rows[0].error.to_f64();
            let last = c.rows[c.rows.len() - 1].error.to_f64();
            let decreased = c.rows[c.rows.len() - 1].error.to_float(&PrecisionConfig::default()).ok()
                < c.rows[0].error.to_float(&PrecisionConfig::default()).ok();
            let o = if decreased { Outcome::Pass } else { Outcome::Fail };
            (o, format!("z={}: error {first:.3e} at m=10, {last:.3e} at m=60", c.z))
        }
        _ => unreachable!(),
    }))
}

/// Documented only: a finite search cannot reach the asymptotic negativity.
fn hardy_littlewood(t_max: u32, points: usize, cfg: &PrecisionConfig) -> Result<(Outcome, String, Payload)> {
    let c = cfg.at_digits(COARSE_DIGITS.min(cfg.digits));
    let fid = FunctionId::simple(Family::HLH)?;
    let r = search_negative(&fid, &c.zero(), &c.num(t_max), points, Strategy::CoarseToFine, &c)?;
    let min = r
        .rows
        .first()
        .map(|m| format!("smallest value {} at z={}", short(&m.value), short(&m.t)))
        .unwrap_or_default();
    let detail = format!(
        "[0, {t_max}]: {} sign-certain negative samples, {} uncertain; {min}",
        r.negatives.len(),
        r.uncertain
    );
    Ok((Outcome::Pass, detail, Payload::Search(r)))
}
