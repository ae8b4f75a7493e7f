//! Closed-form kernels and exact derivatives of `phi_n(t) = t^n / (1 - e^-t)`.

use rug::{Float, Integer};

use crate::error::{domain, Result};
use crate::precision::{binomial, BigReal, PrecisionConfig};

fn check_t(t: &BigReal) -> Result<()> {
    if !t.is_finite() || *t < 0 {
        return Err(domain(format!("kernel requires t >= 0, got {}", t.to_f64())));
    }
    Ok(())
}

/// `e^t (2 - t) - t - 2`.
pub fn kernel_k1(t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_t(t)?;
    let bits = cfg.bits();
    let e = Float::with_val(bits, t.exp_ref());
    Ok(e * Float::with_val(bits, 2 - t) - Float::with_val(bits, t + 2u32))
}

/// `(1 + t e^t - e^t)^2 - t (e^t - 1)^3 / 4`.
pub fn kernel_k2(t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_t(t)?;
    let bits = cfg.bits();
    let em1 = Float::with_val(bits, t.exp_m1_ref());
    // 1 + t e^t - e^t = t (e^t - 1) + t - (e^t - 1)
    let a = Float::with_val(bits, t * &em1) + t - &em1;
    let cube = Float::with_val(bits, em1.square_ref()) * &em1;
    Ok(Float::with_val(bits, a.square_ref()) - cube * t / 4u32)
}

/// `1 - e^-t - t^2 / (e^t - 1)`, zero at `t = 0`.
pub fn kernel_k3(t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_t(t)?;
    let bits = cfg.bits();
    if t.is_zero() {
        return Ok(Float::new(bits));
    }
    let neg = Float::with_val(bits, -t);
    let a = -Float::with_val(bits, neg.exp_m1_ref());
    let em1 = Float::with_val(bits, t.exp_m1_ref());
    Ok(a - Float::with_val(bits, t.square_ref()) / em1)
}

/// The claimed derivative of `K3`: `e^-t (1 + t e^t - e^t)^2 / (e^t - 1)^2`.
pub fn kernel_k3_claimed_derivative(t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_t(t)?;
    let bits = cfg.bits();
    let em1 = Float::with_val(bits, t.exp_m1_ref());
    let a = Float::with_val(bits, t * &em1) + t - &em1;
    let ratio = a / em1;
    Ok(Float::with_val(bits, ratio.square_ref()) * Float::with_val(bits, -t).exp())
}

/// Exact derivative of `K3`:
/// `e^-t - 2t/(e^t - 1) + t^2 e^t/(e^t - 1)^2`.
pub fn kernel_k3_derivative(t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_t(t)?;
    let bits = cfg.bits();
    let em1 = Float::with_val(bits, t.exp_m1_ref());
    let e = Float::with_val(bits, &em1 + 1u32);
    let w = Float::with_val(bits, em1.recip_ref());
    let t2 = Float::with_val(bits, t.square_ref());
    Ok(Float::with_val(bits, e.recip_ref()) - Float::with_val(bits, t * &w) * 2u32 + t2 * &e * Float::with_val(bits, w.square_ref()))
}

/// `2 + 6t + 8t^2 - 2(1+t) cosh t - (4 + 7t) sinh t`. The second derivative
/// of `K2` is `e^(2t)/2` times this.
pub fn kernel_k2_inner(t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_t(t)?;
    let bits = cfg.bits();
    let t2 = Float::with_val(bits, t.square_ref());
    let poly = Float::with_val(bits, t * 6u32) + t2 * 8u32 + 2u32;
    let ch = Float::with_val(bits, t.cosh_ref()) * Float::with_val(bits, t + 1u32) * 2u32;
    let sh = Float::with_val(bits, t.sinh_ref()) * (Float::with_val(bits, t * 7u32) + 4u32);
    Ok(poly - ch - sh)
}

/// Integer polynomials `Q_i` with `E^(i)(t) = Q_i(w)` where
/// `E(t) = 1/(1 - e^-t) = 1 + w` and `w = 1/(e^t - 1)`.
fn e_derivative_polys(max: u32) -> Vec<Vec<Integer>> {
    let mut polys = vec![vec![Integer::from(1), Integer::from(1)]];
    for _ in 0..max {
        let p = polys.last().expect("nonempty");
        // Q' (w) * (-w - w^2)
        let mut next = vec![Integer::new(); p.len() + 1];
        for (k, c) in p.iter().enumerate().skip(1) {
            let d = Integer::from(c * k as u32);
            next[k] -= &d;
            next[k + 1] -= &d;
        }
        polys.push(next);
    }
    polys
}

fn eval_poly(p: &[Integer], w: &Float) -> Float {
    let mut acc = Float::new(w.prec());
    for c in p.iter().rev() {
        acc *= w;
        acc += c;
    }
    acc
}

/// `D^k phi_n(t)` for `k = 0..=k_max` by Leibniz on `t^n` and `E(t)`.
pub fn phi_n_derivs(n: u32, t: &BigReal, k_max: u32, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
    if !t.is_finite() || *t <= 0 {
        return Err(domain(format!("phi_n requires t > 0, got {}", t.to_f64())));
    }
    let bits = cfg.bits();
    let t = Float::with_val(bits, t);
    let w = Float::with_val(bits, t.exp_m1_ref()).recip();
    let polys = e_derivative_polys(k_max);
    let e: Vec<Float> = polys.iter().map(|p| eval_poly(p, &w)).collect();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let mut acc = Float::new(bits);
        for j in 0..=k.min(n) {
            // D^j t^n = n!/(n-j)! t^(n-j)
            let fall = Float::with_val(bits, Integer::from(Integer::factorial(n)) / Integer::from(Integer::factorial(n - j)));
            let pw = Float::with_val(bits, rug::ops::Pow::pow(&t, n - j));
            acc += binomial(k, j, bits) * fall * pw * &e[(k - j) as usize];
        }
        out.push(acc);
    }
    Ok(out)
}

/// `LHS - RHS` of
/// `2(m+1) phi'_{m+1} - phi''_{m+2} - m(m+1) phi_m = t^(m+1) e^t/(e^t-1)^3 K1(t)`.
pub fn kernel_identity_residual(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    if m == 0 {
        return Err(domain("kernel identity requires m >= 1"));
    }
    let bits = cfg.bits();
    let a = phi_n_derivs(m + 1, t, 1, cfg)?;
    let b = phi_n_derivs(m + 2, t, 2, cfg)?;
    let c = phi_n_derivs(m, t, 0, cfg)?;
    let lhs = Float::with_val(bits, &a[1] * (2 * (m + 1))) - &b[2] - Float::with_val(bits, &c[0] * (m * (m + 1)));
    let t = Float::with_val(bits, t);
    let em1 = Float::with_val(bits, t.exp_m1_ref());
    let e = Float::with_val(bits, &em1 + 1u32);
    let cube = Float::with_val(bits, em1.square_ref()) * &em1;
    let rhs = Float::with_val(bits, rug::ops::Pow::pow(&t, m + 1)) * e / cube * kernel_k1(&t, cfg)?;
    Ok(lhs - rhs)
}

/// `3x^2 - x cos x + sin x`.
pub fn elementary_inequality(x: &BigReal, cfg: &PrecisionConfig) -> BigReal {
    let bits = cfg.bits();
    let x = Float::with_val(bits, x);
    Float::with_val(bits, x.square_ref()) * 3u32 - Float::with_val(bits, &x * Float::with_val(bits, x.cos_ref()))
        + Float::with_val(bits, x.sin_ref())
}
