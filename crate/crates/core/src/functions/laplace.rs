//! Laplace transforms of the kernels `g_m` and `Theta_m`, and the
//! representation of `f_m` through the kernel `s(xu)`.

use rug::Float;

use crate::error::{domain, Result};
use crate::precision::{factorial, BigReal, PrecisionConfig};
use crate::quadrature::{default_order, GaussLegendre};
use crate::special::s_function;

use super::fm::{f_m, g_m_kernel};

/// A truncated Laplace integral: `value` approximates the integral over
/// `[0, cutoff]`, `quad_err` estimates the quadrature error there and
/// `tail_bound` bounds the integral over `[cutoff, inf)`.
#[derive(Debug, Clone)]
pub struct LaplaceValue {
    pub value: BigReal,
    pub quad_err: BigReal,
    pub tail_bound: BigReal,
    pub cutoff: u32,
}

impl LaplaceValue {
    pub fn total_error(&self) -> BigReal {
        Float::with_val(self.value.prec(), &self.quad_err + &self.tail_bound)
    }
}

fn check(m: u32, x: &BigReal) -> Result<()> {
    if m == 0 {
        return Err(domain("Laplace checks require m >= 1"));
    }
    if !x.is_finite() || *x <= 0 {
        return Err(domain(format!("x must be positive, got {}", x.to_f64())));
    }
    Ok(())
}

/// Smallest even integer cutoff, at least 4, for which `bound` is below
/// `target`.
fn choose_cutoff(target: &Float, mut bound: impl FnMut(u32) -> Float) -> u32 {
    let mut t = 4;
    while bound(t) > *target && t < 100_000 {
        t += 2;
    }
    t
}

/// Target size of the discarded tail, `10^(-P/2) m!`.
fn tail_target(m: u32, cfg: &PrecisionConfig) -> Float {
    cfg.pow10(-(cfg.digits as i32) / 2) * factorial(m, cfg.bits())
}

/// `int_0^inf g_m(t) e^(-xt) dt`, which should equal `(-1)^m x^m Phi^(m)(x)`.
///
/// Beyond the cutoff `T >= 2` the kernel is bounded by
/// `B(t) = m! (1 + c/(1-c) + (m+1) t c/(1-c)^2)`, `c = e^(-t/2)`, which
/// decreases for `t >= 2`, so the tail is at most `B(T) e^(-xT) / x`.
pub fn laplace_g_m(m: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<LaplaceValue> {
    check(m, x)?;
    let bits = cfg.bits();
    let x = Float::with_val(bits, x);
    let mf = factorial(m, bits);
    let tail = |t: u32| -> Float {
        let tt = Float::with_val(bits, t);
        let c = Float::with_val(bits, -Float::with_val(bits, &tt / 2u32)).exp();
        let omc = Float::with_val(bits, 1 - &c);
        let b = Float::with_val(bits, &c / &omc) + 1u32
            + Float::with_val(bits, &c * &tt) * (m + 1) / Float::with_val(bits, omc.square_ref());
        let decay = Float::with_val(bits, -Float::with_val(bits, &x * &tt)).exp();
        b * &mf * decay / &x
    };
    let cutoff = choose_cutoff(&tail_target(m, cfg), tail);
    let tail_bound = tail(cutoff);
    let integrand = |t: &Float| -> Result<Float> {
        let g = g_m_kernel(m, t, cfg)?;
        let decay = Float::with_val(bits, -Float::with_val(bits, &x * t)).exp();
        Ok(g.value * decay)
    };
    let coarse = panel_sum(cutoff, 2, cfg, integrand)?;
    let fine = panel_sum(cutoff, 1, cfg, integrand)?;
    let quad_err = Float::with_val(bits, &fine - &coarse).abs();
    Ok(LaplaceValue {
        value: fine,
        quad_err,
        tail_bound,
        cutoff,
    })
}

fn panel_sum<F>(cutoff: u32, width: u32, cfg: &PrecisionConfig, mut f: F) -> Result<Float>
where
    F: FnMut(&Float) -> Result<Float>,
{
    let bits = cfg.bits();
    let rule = GaussLegendre::get(default_order(cfg), bits);
    let mut acc = Float::new(bits);
    let mut a = 0u32;
    while a < cutoff {
        let b = (a + width).min(cutoff);
        acc += rule.panel(&Float::with_val(bits, a), &Float::with_val(bits, b), &mut f)?;
        a = b;
    }
    Ok(acc)
}

/// `int_0^inf Theta_m(t) e^(-xt) dt`, which should equal
/// `(-1)^m x^(m-2) Phi^(m)(x)`.
///
/// `Theta_m` is carried across panels: on each panel the samples of
/// `u f_m(u)` at the nodes are integrated with the rule's running-integral
/// matrix, giving `Theta_m` at the same nodes. The tail uses
/// `|Theta_m(t)| <= m! (t^2/2 + 2 pi^2/3)`.
pub fn laplace_theta_m(m: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<LaplaceValue> {
    check(m, x)?;
    let bits = cfg.bits();
    let x = Float::with_val(bits, x);
    let mf = factorial(m, bits);
    let pi = cfg.pi();
    let c = Float::with_val(bits, pi.square_ref()) * 2u32 / 3u32;
    let tail = |t: u32| -> Float {
        let tt = Float::with_val(bits, t);
        let x2 = Float::with_val(bits, x.square_ref());
        let x3 = Float::with_val(bits, &x2 * &x);
        // int_T^inf (t^2/2 + c) e^(-xt) dt
        let poly = Float::with_val(bits, tt.square_ref()) / &x / 2u32
            + Float::with_val(bits, &tt / &x2)
            + Float::with_val(bits, x3.recip_ref())
            + Float::with_val(bits, &c / &x);
        let decay = Float::with_val(bits, -Float::with_val(bits, &x * &tt)).exp();
        poly * decay * &mf
    };
    let cutoff = choose_cutoff(&tail_target(m, cfg), tail);
    let tail_bound = tail(cutoff);
    let coarse = theta_laplace_panels(m, &x, cutoff, 2, cfg)?;
    let fine = theta_laplace_panels(m, &x, cutoff, 1, cfg)?;
    let quad_err = Float::with_val(bits, &fine - &coarse).abs();
    Ok(LaplaceValue {
        value: fine,
        quad_err,
        tail_bound,
        cutoff,
    })
}

fn theta_laplace_panels(m: u32, x: &Float, cutoff: u32, width: u32, cfg: &PrecisionConfig) -> Result<Float> {
    let bits = cfg.bits();
    let rule = GaussLegendre::get(default_order(cfg), bits);
    let matrix = rule.integration_matrix();
    let mut theta_start = Float::new(bits);
    let mut acc = Float::new(bits);
    let mut a = 0u32;
    while a < cutoff {
        let b = (a + width).min(cutoff);
        let (fa, fb) = (Float::with_val(bits, a), Float::with_val(bits, b));
        let nodes = rule.mapped_nodes(&fa, &fb);
        let weights = rule.mapped_weights(&fa, &fb);
        let half = Float::with_val(bits, &fb - &fa) / 2u32;
        let samples: Vec<Float> = nodes
            .iter()
            .map(|u| f_m(m, u, cfg).map(|f| f.value * u))
            .collect::<Result<_>>()?;
        for (i, u) in nodes.iter().enumerate() {
            let mut theta = Float::new(bits);
            for (wij, s) in matrix[i].iter().zip(&samples) {
                theta += Float::with_val(bits, wij * s);
            }
            theta = theta * &half + &theta_start;
            let decay = Float::with_val(bits, -Float::with_val(bits, x * u)).exp();
            acc += theta * decay * &weights[i];
        }
        for (s, w) in samples.iter().zip(&weights) {
            theta_start += Float::with_val(bits, s * w);
        }
        a = b;
    }
    Ok(acc)
}

/// `int_0^inf s(xu) x^m e^(-x) dx`, which should equal `f_m(u)`.
///
/// `|s(z)| <= 2 + log(1 + |z|)` gives the tail estimate; returned as
/// `(value, estimated error)`.
pub fn f_m_from_s_kernel(m: u32, u: &BigReal, cfg: &PrecisionConfig) -> Result<(BigReal, BigReal)> {
    if !u.is_finite() || *u <= 0 {
        return Err(domain(format!("u must be positive, got {}", u.to_f64())));
    }
    let bits = cfg.bits();
    let u = Float::with_val(bits, u);
    let envelope = |x: u32| -> Float {
        // int_X^inf x^m e^-x dx <= 2 X^m e^-X once X >= 2m
        let xx = Float::with_val(bits, x);
        let s_bound = Float::with_val(bits, &xx * &u).ln_1p() + 2u32;
        let pw = Float::with_val(bits, rug::ops::Pow::pow(&xx, m));
        s_bound * pw * Float::with_val(bits, -&xx).exp() * 2u32
    };
    let target = tail_target(m, cfg);
    let mut cutoff = choose_cutoff(&target, envelope).max(2 * m + 2);
    cutoff += cutoff % 2;
    let tail = envelope(cutoff);
    let integrand = |x: &Float| -> Result<Float> {
        let z = Float::with_val(bits, x * &u);
        let s = s_function(&z, cfg)?;
        let pw = Float::with_val(bits, rug::ops::Pow::pow(x, m));
        Ok(s.value * pw * Float::with_val(bits, -x).exp())
    };
    let coarse = panel_sum(cutoff, 2, cfg, integrand)?;
    let fine = panel_sum(cutoff, 1, cfg, integrand)?;
    let err = Float::with_val(bits, &fine - &coarse).abs() + tail;
    Ok((fine, err))
}
