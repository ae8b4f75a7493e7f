use rug::Float;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::functions::phi_scaled_derivs;
use crate::precision::{factorial, BigReal, PrecisionConfig};
use crate::special::zeta;

/// Exponents `j` of the sample points `2^-j` (or `2^j` at infinity).
pub const EXTRAPOLATION_EXPONENTS: std::ops::RangeInclusive<u32> = 5..=20;

/// Neville extrapolation of samples `(h_i, y_i)` to `h = 0`. Returns the
/// estimate and the change contributed by the last sample.
pub fn extrapolate_to_zero(hs: &[BigReal], ys: &[BigReal]) -> Result<(BigReal, BigReal)> {
    if hs.len() != ys.len() || hs.len() < 2 {
        return Err(Error::Extrapolation("need at least two samples".into()));
    }
    let bits = ys[0].prec();
    let mut p: Vec<Float> = ys.to_vec();
    let n = hs.len();
    let mut prev_top = p[0].clone();
    let mut top = p[0].clone();
    for k in 1..n {
        for i in 0..n - k {
            // P_{i..i+k}(0) = (h_{i+k} P_{i..i+k-1} - h_i P_{i+1..i+k}) / (h_{i+k} - h_i)
            let num = Float::with_val(bits, &hs[i + k] * &p[i]) - Float::with_val(bits, &hs[i] * &p[i + 1]);
            p[i] = num / Float::with_val(bits, &hs[i + k] - &hs[i]);
        }
        prev_top = std::mem::replace(&mut top, p[0].clone());
    }
    let err = Float::with_val(bits, &top - &prev_top).abs();
    if !top.is_finite() {
        return Err(Error::Extrapolation("non-finite extrapolant".into()));
    }
    Ok((top, err))
}

/// An extrapolated limit against its expected value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub estimate: Decimal,
    pub err: Decimal,
    pub expected: Decimal,
    pub relative_error: Decimal,
}

fn estimate(value: &BigReal, err: &BigReal, expected: &BigReal, digits: u32) -> LimitEstimate {
    let bits = value.prec();
    let rel = Float::with_val(bits, value - expected).abs() / Float::with_val(bits, expected.abs_ref());
    LimitEstimate {
        estimate: Decimal::from_float(value, digits),
        err: Decimal::from_float(err, 6),
        expected: Decimal::from_float(expected, digits),
        relative_error: Decimal::from_float(&rel, 6),
    }
}

/// Limits of `w(x) = (-1)^m x^(m+1) Phi^(m)(x)` as `x -> 0+` and
/// `x -> inf`, expected to be `m!` and `m!/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledLimits {
    pub m: u32,
    pub at_zero: LimitEstimate,
    pub at_infinity: LimitEstimate,
}

pub fn verify_scaled_limits(m: u32, cfg: &PrecisionConfig) -> Result<ScaledLimits> {
    let bits = cfg.bits();
    let alpha = cfg.num(m + 1);
    let mut h0 = Vec::new();
    let mut y0 = Vec::new();
    let mut hi = Vec::new();
    let mut yi = Vec::new();
    for j in EXTRAPOLATION_EXPONENTS {
        let x = Float::with_val(bits, Float::i_exp(1, -(j as i32)));
        h0.push(x.clone());
        y0.push(phi_scaled_derivs(m, &alpha, &x, 0, cfg)?.remove(0));
        let big = Float::with_val(bits, Float::i_exp(1, j as i32));
        hi.push(x);
        yi.push(phi_scaled_derivs(m, &alpha, &big, 0, cfg)?.remove(0));
    }
    let (z, ze) = extrapolate_to_zero(&h0, &y0)?;
    let (inf, ie) = extrapolate_to_zero(&hi, &yi)?;
    let mf = factorial(m, bits);
    let half = Float::with_val(bits, &mf / 2u32);
    Ok(ScaledLimits {
        m,
        at_zero: estimate(&z, &ze, &mf, cfg.digits),
        at_infinity: estimate(&inf, &ie, &half, cfg.digits),
    })
}

/// Limits as `x -> 0+` of the derivatives of orders `m+1` and `m+2` of
/// `w(x) = (-1)^m x^(m+1) Phi^(m)(x)`.
///
/// `order_m1` is compared with `-m (m+1)! m! zeta(m+1)`. `order_m2` is
/// compared with the stated value `-((m+1)!)^2 (m+1)(zeta(m+2) + zeta(m+1))`,
/// and `order_m2_taylor` with `(m+2)! (m+1) (m+1)! zeta(m+2)`, which follows
/// from `psi^(k)(x) = (-1)^(k+1) k!/x^(k+1) + psi^(k)(x+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeLimits {
    pub m: u32,
    pub order_m1: LimitEstimate,
    pub order_m2: LimitEstimate,
    pub order_m2_taylor: LimitEstimate,
}

pub fn verify_derivative_limit_constants(m: u32, cfg: &PrecisionConfig) -> Result<DerivativeLimits> {
    if m == 0 {
        return Err(crate::error::domain("derivative limit constants require m >= 1"));
    }
    let bits = cfg.bits();
    let alpha = cfg.num(m + 1);
    let mut hs = Vec::new();
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for j in EXTRAPOLATION_EXPONENTS {
        let x = Float::with_val(bits, Float::i_exp(1, -(j as i32)));
        let d = phi_scaled_derivs(m, &alpha, &x, m + 2, cfg)?;
        // entries are (-1)^i D^i w
        d1.push(Float::with_val(bits, &d[m as usize + 1] * crate::precision::alt(m + 1)));
        d2.push(Float::with_val(bits, &d[m as usize + 2] * crate::precision::alt(m + 2)));
        hs.push(x);
    }
    let (v1, e1) = extrapolate_to_zero(&hs, &d1)?;
    let (v2, e2) = extrapolate_to_zero(&hs, &d2)?;
    let z1 = zeta(m + 1, cfg)?;
    let z2 = zeta(m + 2, cfg)?;
    let f = |n: u32| factorial(n, bits);
    let expected1 = -(f(m + 1) * f(m) * &z1) * m;
    let fm1 = f(m + 1);
    let expected2 = -(Float::with_val(bits, fm1.square_ref()) * (m + 1) * (Float::with_val(bits, &z2 + &z1)));
    let taylor2 = f(m + 2) * (m + 1) * f(m + 1) * &z2;
    Ok(DerivativeLimits {
        m,
        order_m1: estimate(&v1, &e1, &expected1, cfg.digits),
        order_m2: estimate(&v2, &e2, &expected2, cfg.digits),
        order_m2_taylor: estimate(&v2, &e2, &taylor2, cfg.digits),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_recovers_polynomial_constant() {
        let c = PrecisionConfig::default();
        let hs: Vec<Float> = (1..6).map(|i| c.ratio(1, 1 << i)).collect();
        let ys: Vec<Float> = hs
            .iter()
            .map(|h| Float::with_val(c.bits(), h * h) * 3u32 - Float::with_val(c.bits(), h * 2u32) + 7u32)
            .collect();
        let (v, _) = extrapolate_to_zero(&hs, &ys).unwrap();
        assert!(Float::with_val(c.bits(), v - 7u32).abs() < c.pow10(-45));
        assert!(extrapolate_to_zero(&hs[..1], &ys[..1]).is_err());
    }

    #[test]
    fn scaled_limits_low_orders() {
        let c = PrecisionConfig::default();
        for m in [0, 1, 3] {
            let l = verify_scaled_limits(m, &c).unwrap();
            assert!(l.at_zero.relative_error.to_f64() < 1e-3, "m={m}");
            assert!(l.at_infinity.relative_error.to_f64() < 1e-3, "m={m}");
        }
    }

    #[test]
    fn first_constant_matches_and_second_follows_taylor() {
        let c = PrecisionConfig::default();
        let l = verify_derivative_limit_constants(1, &c).unwrap();
        assert!((l.order_m1.estimate.to_f64() + std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-6);
        assert!(l.order_m2_taylor.relative_error.to_f64() < 1e-6);
        // 24 zeta(3)
        assert!((l.order_m2.estimate.to_f64() - 28.849365675).abs() < 1e-6);
    }
}
