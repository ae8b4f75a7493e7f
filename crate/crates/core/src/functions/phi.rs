//! `Phi(x) = x psi'(x) - 1`, its derivatives and power-scaled variants.

use rug::Float;

use crate::error::{domain, Result};
use crate::precision::{alt, binomial, falling, BigReal, PrecisionConfig};
use crate::special::polygamma_range;

use super::boosted;

fn check_x(x: &BigReal, what: &str) -> Result<()> {
    if !x.is_finite() || *x <= 0 {
        return Err(domain(format!("{what} requires x > 0, got {}", x.to_f64())));
    }
    Ok(())
}

/// Extra decimal digits that absorb the cancellation between `x psi^(m+1)`
/// and `m psi^(m)` at large `x`, and between Leibniz terms at small `x`.
fn guard_digits(x: &BigReal, orders: u32) -> u32 {
    let l = x.to_f64().log10().abs();
    (l * f64::from(orders + 2)).ceil() as u32 + 5
}

pub fn phi(x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    phi_derivative(0, x, cfg)
}

/// `Phi^(m)(x) = x psi^(m+1)(x) + m psi^(m)(x)`, minus one when `m = 0`.
pub fn phi_derivative(m: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_x(x, "phi_derivative")?;
    let mut v = signed_phi_derivatives(m, 0, x, &boosted(cfg, guard_digits(x, 0)))?;
    let v = v.pop().expect("one order");
    Ok(Float::with_val(cfg.bits(), v * alt(m)))
}

/// `(-1)^m x^alpha Phi^(m)(x)`.
pub fn phi_scaled(m: u32, alpha: &BigReal, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    let mut v = phi_scaled_derivs(m, alpha, x, 0, cfg)?;
    Ok(v.pop().expect("one order"))
}

/// `(-1)^(m+k) Phi^(m+k)(x)` for `k = 0..=extra`.
fn signed_phi_derivatives(m: u32, extra: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
    let bits = cfg.bits();
    let x = Float::with_val(bits, x);
    // psi^(m), ..., psi^(m+extra+1)
    let psi = polygamma_range(m, m + extra + 1, &x, cfg)?;
    let mut out = Vec::with_capacity(extra as usize + 1);
    for k in 0..=extra {
        let order = m + k;
        let i = k as usize;
        let mut v = Float::with_val(bits, &x * &psi[i + 1]);
        if order == 0 {
            v -= 1u32;
        } else {
            v += Float::with_val(bits, &psi[i] * order);
        }
        out.push(v * alt(order));
    }
    Ok(out)
}

/// `(-1)^i d^i/dx^i [(-1)^m x^alpha Phi^(m)(x)]` for `i = 0..=n_max`, by
/// Leibniz on the product of `x^alpha` and the closed-form derivatives.
pub fn phi_scaled_derivs(
    m: u32,
    alpha: &BigReal,
    x: &BigReal,
    n_max: u32,
    cfg: &PrecisionConfig,
) -> Result<Vec<BigReal>> {
    check_x(x, "phi_scaled")?;
    let work = boosted(cfg, guard_digits(x, n_max));
    let bits = work.bits();
    let x = Float::with_val(bits, x);
    let alpha = Float::with_val(bits, alpha);
    // G_k = (-1)^(m+k) Phi^(m+k), so (-1)^m Phi^(m+k) = (-1)^k G_k
    let g = signed_phi_derivatives(m, n_max, &x, &work)?;
    let ln_x = Float::with_val(bits, x.ln_ref());
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for i in 0..=n_max {
        let mut acc = Float::new(bits);
        for j in 0..=i {
            // d^j x^alpha = falling(alpha, j) x^(alpha - j)
            let fall = falling(&alpha, j);
            if fall.is_zero() {
                continue;
            }
            let pow = (Float::with_val(bits, &alpha - j) * &ln_x).exp();
            let mut term = binomial(i, j, bits) * fall * pow * &g[(i - j) as usize];
            // (-1)^i (-1)^(i-j) = (-1)^j
            if j % 2 == 1 {
                term = -term;
            }
            acc += term;
        }
        out.push(Float::with_val(cfg.bits(), acc));
    }
    Ok(out)
}
