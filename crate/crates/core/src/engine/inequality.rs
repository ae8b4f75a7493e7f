use rug::Float;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::Result;
use crate::functions::{
    boosted, kernel_identity_residual, kernel_k2, kernel_k2_inner, kernel_k3_claimed_derivative, kernel_k3_derivative,
    elementary_inequality, phi_scaled_derivs, theta1_derivs, theta_m_samples,
};
use crate::precision::{factorial, BigReal, PrecisionConfig};
use crate::special::polygamma_range;

use super::grid::GridSpec;

/// One evaluated instance of `lhs <= rhs` (or `<`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<u32>,
    pub x: Decimal,
    pub lhs: Decimal,
    pub rhs: Decimal,
    /// `(rhs - lhs - err) / scale`.
    pub margin: Decimal,
}

/// A named sub-inequality of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    /// Strict parts need every margin positive, the others nonnegative.
    pub strict: bool,
    pub worst_margin: Decimal,
    pub pass: bool,
    pub checks: usize,
}

/// Worst case of one or more inequalities over a grid.
///
/// Margins are `(rhs - lhs - err) / scale` with a positive scale natural to
/// each inequality, so they are comparable across orders and arguments.
/// `pass` holds iff every part passes: strict parts need positive margins,
/// non-strict parts nonnegative ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub grid: GridSpec,
    pub worst_margin: Decimal,
    pub pass: bool,
    /// The five smallest margins, ascending.
    pub witnesses: Vec<Witness>,
    pub parts: Vec<Part>,
}

/// Raw check: `lhs <= rhs` up to `err`, with margin scale `scale`.
struct Check {
    order: Option<u32>,
    x: BigReal,
    lhs: BigReal,
    rhs: BigReal,
    err: BigReal,
    scale: BigReal,
}

impl Check {
    fn margin(&self) -> Float {
        let bits = self.lhs.prec();
        let raw = Float::with_val(bits, &self.rhs - &self.lhs) - &self.err;
        raw / Float::with_val(bits, self.scale.abs_ref())
    }
}

const WITNESSES: usize = 5;

struct Builder {
    name: String,
    grid: GridSpec,
    digits: u32,
    parts: Vec<(String, bool, Vec<Check>)>,
}

impl Builder {
    fn new(name: &str, grid: &GridSpec, cfg: &PrecisionConfig) -> Self {
        Builder {
            name: name.into(),
            grid: grid.clone(),
            digits: cfg.digits,
            parts: Vec::new(),
        }
    }

    fn part(&mut self, name: &str, checks: Vec<Check>) {
        self.parts.push((name.into(), true, checks));
    }

    fn part_non_strict(&mut self, name: &str, checks: Vec<Check>) {
        self.parts.push((name.into(), false, checks));
    }

    fn finish(self) -> InequalityReport {
        let d = self.digits;
        let mut all: Vec<(Float, &Check)> = Vec::new();
        let mut parts = Vec::new();
        for (name, strict, checks) in &self.parts {
            let mut worst: Option<Float> = None;
            for c in checks {
                let m = c.margin();
                if worst.as_ref().is_none_or(|w| m < *w) {
                    worst = Some(m.clone());
                }
                all.push((m, c));
            }
            let worst = worst.unwrap_or_else(|| Float::with_val(64, 0));
            parts.push(Part {
                name: name.clone(),
                strict: *strict,
                pass: !checks.is_empty() && if *strict { worst > 0 } else { worst >= 0 },
                worst_margin: Decimal::from_float(&worst, 12),
                checks: checks.len(),
            });
        }
        // stable sort keeps grid order among ties
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let witnesses = all
            .iter()
            .take(WITNESSES)
            .map(|(m, c)| Witness {
                order: c.order,
                x: Decimal::from_float(&c.x, d),
                lhs: Decimal::from_float(&c.lhs, d),
                rhs: Decimal::from_float(&c.rhs, d),
                margin: Decimal::from_float(m, 12),
            })
            .collect();
        let worst = all.first().map(|(m, _)| m.clone()).unwrap_or_else(|| Float::with_val(64, 0));
        InequalityReport {
            name: self.name,
            grid: self.grid,
            pass: !all.is_empty() && parts.iter().all(|p| p.pass),
            worst_margin: Decimal::from_float(&worst, 12),
            witnesses,
            parts,
        }
    }
}

/// Evaluates `f` at working precision and with extra digits; returns the
/// refined values with error estimates `|difference| + tol |value|`.
fn dual<F>(cfg: &PrecisionConfig, f: F) -> Result<Vec<(BigReal, BigReal)>>
where
    F: Fn(&PrecisionConfig) -> Result<Vec<BigReal>>,
{
    let lo = f(cfg)?;
    let hi = f(&boosted(cfg, 12))?;
    let bits = cfg.bits();
    let tol = cfg.tol();
    Ok(lo
        .iter()
        .zip(hi)
        .map(|(l, h)| {
            let err = Float::with_val(bits, l - &h).abs() + Float::with_val(bits, h.abs_ref()) * &tol;
            (Float::with_val(bits, &h), err)
        })
        .collect())
}

/// `m!/(2x^(m+1)) < (-1)^m Phi^(m)(x) < m!/x^(m+1)` for `m = 0..=m_max`, and
/// strict decrease of `(-1)^m x^(m+1) Phi^(m)(x)` along the grid.
pub fn verify_double_inequality(grid: &GridSpec, m_max: u32, cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let zero = cfg.zero();
    let rows: Vec<Vec<(BigReal, BigReal)>> = {
        use rayon::prelude::*;
        xs.par_iter()
            .map(|x| dual(cfg, |c| phi_scaled_derivs(0, &c.zero(), &c.coerce(x), m_max, c)))
            .collect::<Result<_>>()?
    };
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut mono = Vec::new();
    for m in 0..=m_max {
        let mf = factorial(m, bits);
        let mut prev: Option<(BigReal, BigReal, BigReal)> = None;
        for (x, row) in xs.iter().zip(&rows) {
            let (v, err) = &row[m as usize];
            let xp = Float::with_val(bits, rug::ops::Pow::pow(x, m + 1));
            let ub = Float::with_val(bits, &mf / &xp);
            let lb = Float::with_val(bits, &ub / 2u32);
            lower.push(Check {
                order: Some(m),
                x: x.clone(),
                lhs: lb,
                rhs: v.clone(),
                err: err.clone(),
                scale: ub.clone(),
            });
            upper.push(Check {
                order: Some(m),
                x: x.clone(),
                lhs: v.clone(),
                rhs: ub.clone(),
                err: err.clone(),
                scale: ub,
            });
            let w = Float::with_val(bits, v * &xp);
            let we = Float::with_val(bits, err * &xp);
            if let Some((pw, pe, _)) = &prev {
                // w(x_i) > w(x_{i+1})
                mono.push(Check {
                    order: Some(m),
                    x: x.clone(),
                    lhs: w.clone(),
                    rhs: pw.clone(),
                    err: Float::with_val(bits, &we + pe),
                    scale: pw.clone(),
                });
            }
            prev = Some((w, we, zero.clone()));
        }
    }
    let mut b = Builder::new("scaled-phi-double-inequality", grid, cfg);
    b.part("lower bound m!/(2x^(m+1))", lower);
    b.part("upper bound m!/x^(m+1)", upper);
    b.part("x^(m+1) (-1)^m Phi^(m)(x) strictly decreasing", mono);
    Ok(b.finish())
}

/// `1/2 <= theta_1(x) <= 1/2 + 1/(12x)`, margins relative to `1/(12x)`.
pub fn verify_theta1_bounds(grid: &GridSpec, cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let half = cfg.ratio(1, 2);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for x in &xs {
        let (v, err) = dual(cfg, |c| theta1_derivs(&c.coerce(x), 0, c))?.remove(0);
        let gap = Float::with_val(bits, Float::with_val(bits, x * 12u32).recip_ref());
        let ub = Float::with_val(bits, &half + &gap);
        lower.push(Check {
            order: None,
            x: x.clone(),
            lhs: half.clone(),
            rhs: v.clone(),
            err: err.clone(),
            scale: gap.clone(),
        });
        upper.push(Check {
            order: None,
            x: x.clone(),
            lhs: v,
            rhs: ub,
            err,
            scale: gap,
        });
    }
    let mut b = Builder::new("theta1-bounds", grid, cfg);
    b.part_non_strict("theta_1(x) >= 1/2", lower);
    b.part_non_strict("theta_1(x) <= 1/2 + 1/(12x)", upper);
    Ok(b.finish())
}

/// `0 < (-1)^n theta_1^(n)(x) <= (n-1)! (alpha + 1/2) / (x^n log x)` for
/// `x > 1` and the given orders.
pub fn verify_theta1_derivative_bound(
    grid: &GridSpec,
    orders: std::ops::RangeInclusive<u32>,
    alpha: &Decimal,
    cfg: &PrecisionConfig,
) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let a = alpha.to_float(cfg)?;
    let n_hi = *orders.end();
    let mut positive = Vec::new();
    let mut bound = Vec::new();
    for x in &xs {
        let d = dual(cfg, |c| theta1_derivs(&c.coerce(x), n_hi, c))?;
        let lx = Float::with_val(bits, x.ln_ref());
        for n in orders.clone() {
            let (v, err) = &d[n as usize];
            let v = Float::with_val(bits, v * crate::precision::alt(n));
            let rhs = factorial(n - 1, bits) * (Float::with_val(bits, &a + 0.5f64))
                / (Float::with_val(bits, rug::ops::Pow::pow(x, n)) * &lx);
            positive.push(Check {
                order: Some(n),
                x: x.clone(),
                lhs: cfg.zero(),
                rhs: v.clone(),
                err: err.clone(),
                scale: v.clone(),
            });
            bound.push(Check {
                order: Some(n),
                x: x.clone(),
                lhs: v.clone(),
                rhs: rhs.clone(),
                err: err.clone(),
                scale: rhs,
            });
        }
    }
    let mut b = Builder::new("theta1-derivative-bound", grid, cfg);
    b.part("(-1)^n theta_1^(n) > 0", positive);
    b.part("(-1)^n theta_1^(n) <= (n-1)!(alpha+1/2)/(x^n log x)", bound);
    Ok(b.finish())
}

/// `(-1)^(n+1) (x psi(x))^(n+1) < (n-1)!/x^n` for `n = 1..=n_max`.
pub fn verify_alzer_inequality(grid: &GridSpec, n_max: u32, cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let mut checks = Vec::new();
    for x in &xs {
        // (x psi)^(k) = x psi^(k) + k psi^(k-1)
        let d = dual(cfg, |c| {
            let xw = c.coerce(x);
            let psi = polygamma_range(0, n_max + 1, &xw, c)?;
            Ok((1..=n_max)
                .map(|n| {
                    let k = n + 1;
                    let v = Float::with_val(c.bits(), &xw * &psi[k as usize]) + Float::with_val(c.bits(), &psi[n as usize] * k);
                    v * crate::precision::alt(k)
                })
                .collect())
        })?;
        for (i, (v, err)) in d.into_iter().enumerate() {
            let n = i as u32 + 1;
            let rhs = factorial(n - 1, bits) / Float::with_val(bits, rug::ops::Pow::pow(x, n));
            checks.push(Check {
                order: Some(n),
                x: x.clone(),
                lhs: v,
                rhs: rhs.clone(),
                err,
                scale: rhs,
            });
        }
    }
    let mut b = Builder::new("x-psi-derivative-bound", grid, cfg);
    b.part("(-1)^(n+1) (x psi)^(n+1) < (n-1)!/x^n", checks);
    Ok(b.finish())
}

/// `(n-1)!/x^n + n!/(2x^(n+1)) <= (-1)^(n+1) psi^(n)(x) <= (n-1)!/x^n + n!/x^(n+1)`.
pub fn verify_polygamma_bracket(grid: &GridSpec, n_max: u32, cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for x in &xs {
        let d = dual(cfg, |c| polygamma_range(1, n_max, &c.coerce(x), c))?;
        for (i, (v, err)) in d.into_iter().enumerate() {
            let n = i as u32 + 1;
            let v = v * crate::precision::alt(n + 1);
            let a = factorial(n - 1, bits) / Float::with_val(bits, rug::ops::Pow::pow(x, n));
            let bterm = factorial(n, bits) / Float::with_val(bits, rug::ops::Pow::pow(x, n + 1));
            let lb = Float::with_val(bits, &bterm / 2u32) + &a;
            let ub = Float::with_val(bits, &bterm + &a);
            lower.push(Check {
                order: Some(n),
                x: x.clone(),
                lhs: lb,
                rhs: v.clone(),
                err: err.clone(),
                scale: bterm.clone(),
            });
            upper.push(Check {
                order: Some(n),
                x: x.clone(),
                lhs: v,
                rhs: ub,
                err,
                scale: bterm,
            });
        }
    }
    let mut b = Builder::new("polygamma-bracket", grid, cfg);
    b.part_non_strict("lower", lower);
    b.part_non_strict("upper", upper);
    Ok(b.finish())
}

/// `|K3'(t) - e^-t (1 + t e^t - e^t)^2/(e^t - 1)^2| <= threshold`.
pub fn verify_k3_derivative(grid: &GridSpec, threshold: &BigReal, cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let mut checks = Vec::new();
    for t in &xs {
        let r = Float::with_val(cfg.bits(), kernel_k3_derivative(t, cfg)? - kernel_k3_claimed_derivative(t, cfg)?).abs();
        checks.push(Check {
            order: None,
            x: t.clone(),
            lhs: r,
            rhs: threshold.clone(),
            err: cfg.zero(),
            scale: threshold.clone(),
        });
    }
    let mut b = Builder::new("k3-derivative-identity", grid, cfg);
    b.part("residual below threshold", checks);
    Ok(b.finish())
}

/// `K2(t) <= 0` and the factor of its second derivative is negative.
/// Margins are relative to `t (e^t - 1)^3 / 4`.
pub fn verify_k2_sign(grid: &GridSpec, cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let mut sign = Vec::new();
    let mut inner = Vec::new();
    for t in &xs {
        let (v, err) = dual(cfg, |c| Ok(vec![kernel_k2(&c.coerce(t), c)?]))?.remove(0);
        let em1 = Float::with_val(bits, t.exp_m1_ref());
        let scale = Float::with_val(bits, rug::ops::Pow::pow(&em1, 3u32)) * t / 4u32;
        sign.push(Check {
            order: None,
            x: t.clone(),
            lhs: v,
            rhs: cfg.zero(),
            err,
            scale,
        });
        let (w, err) = dual(cfg, |c| Ok(vec![kernel_k2_inner(&c.coerce(t), c)?]))?.remove(0);
        let scale = Float::with_val(bits, t.cosh_ref()) * (Float::with_val(bits, t * t) + 1u32);
        inner.push(Check {
            order: None,
            x: t.clone(),
            lhs: w,
            rhs: cfg.zero(),
            err,
            scale,
        });
    }
    let mut b = Builder::new("k2-sign", grid, cfg);
    b.part_non_strict("K2(t) <= 0", sign);
    b.part("second-derivative factor < 0", inner);
    Ok(b.finish())
}

/// Residual of the `phi_n` kernel identity below `threshold` for each `m`.
pub fn verify_kernel_identity(
    grid: &GridSpec,
    ms: &[u32],
    threshold: &BigReal,
    cfg: &PrecisionConfig,
) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let mut checks = Vec::new();
    for &m in ms {
        for t in &xs {
            let r = kernel_identity_residual(m, t, cfg)?.abs();
            checks.push(Check {
                order: Some(m),
                x: t.clone(),
                lhs: r,
                rhs: threshold.clone(),
                err: cfg.zero(),
                scale: threshold.clone(),
            });
        }
    }
    let mut b = Builder::new("phi-n-kernel-identity", grid, cfg);
    b.part("residual below threshold", checks);
    Ok(b.finish())
}

/// `3x^2 - x cos x + sin x >= 0`, margins relative to `3x^2 + 2x`.
pub fn verify_elementary_inequality(grid: &GridSpec, cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let mut checks = Vec::new();
    for x in &xs {
        let v = elementary_inequality(x, cfg);
        let scale = Float::with_val(bits, x.square_ref()) * 3u32 + Float::with_val(bits, x * 2u32);
        let err = Float::with_val(bits, &scale * &cfg.epsilon()) * 8u32;
        checks.push(Check {
            order: None,
            x: x.clone(),
            lhs: cfg.zero(),
            rhs: v,
            err,
            scale: if scale.is_zero() { cfg.one() } else { scale },
        });
    }
    let mut b = Builder::new("elementary-trig-inequality", grid, cfg);
    b.part_non_strict("3x^2 - x cos x + sin x >= 0", checks);
    Ok(b.finish())
}

/// `Theta_m(t) >= -err` on the grid for each `m`; margins relative to
/// `m! t^2 / 4`.
pub fn verify_theta_m_nonnegative(grid: &GridSpec, ms: &[u32], cfg: &PrecisionConfig) -> Result<InequalityReport> {
    let xs = grid.points(cfg)?;
    let bits = cfg.bits();
    let mut checks = Vec::new();
    for &m in ms {
        for s in theta_m_samples(m, &xs, cfg)? {
            let scale = factorial(m, bits) * Float::with_val(bits, s.t.square_ref()) / 4u32;
            checks.push(Check {
                order: Some(m),
                x: s.t,
                lhs: cfg.zero(),
                rhs: s.value,
                // sign check: the quadrature error must not be able to flip the sign
                err: s.tail_bound,
                scale,
            });
        }
    }
    let mut b = Builder::new("theta-m-nonnegative", grid, cfg);
    b.part_non_strict("Theta_m(t) >= 0", checks);
    Ok(b.finish())
}
