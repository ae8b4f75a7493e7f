//! q-analogs: `Phi_q(x) = (q^x - 1)/log q * psi'_q(x) - q^x` and its kernel.

use rug::Float;

use crate::error::{domain, precision, Result};
use crate::precision::{BigReal, PrecisionConfig, SeriesValue};
use crate::special::q_trigamma;

fn check_x(x: &BigReal) -> Result<()> {
    if !x.is_finite() || *x <= 0 {
        return Err(domain(format!("x must be positive, got {}", x.to_f64())));
    }
    Ok(())
}

fn check_q(q: &BigReal) -> Result<()> {
    if !q.is_finite() || *q <= 0 || *q >= 1 {
        return Err(domain(format!("q must lie in (0, 1), got {}", q.to_f64())));
    }
    Ok(())
}

/// `(-1)^n Phi_q^(n)(x)` for `0 < q < 1`.
pub fn phi_q(q: &BigReal, n: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    let mut v = phi_q_derivs(q, x, n, n, cfg)?;
    Ok(v.pop().expect("one order"))
}

/// `Phi_{1/q}(x)` for `q > 1`.
pub fn phi_q_inv(q: &BigReal, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    if !q.is_finite() || *q <= 1 {
        return Err(domain(format!("phi_q_inv requires q > 1, got {}", q.to_f64())));
    }
    let inv = Float::with_val(cfg.bits(), q.recip_ref());
    phi_q(&inv, 0, x, cfg)
}

/// `(-1)^k Phi_q^(k)(x)` for `k = lo..=hi`.
///
/// With `L = -log q`, `U(t) = t/(1 - e^-t)` and `U(0) = 1`,
/// `(-1)^k Phi_q^(k)(x) = L^k sum_{j>=1} d_j j^k e^(-jLx)` where
/// `d_j = U(jL) - U((j-1)L)` lies in `(0, L]`. Every term is positive, so the
/// series is truncated relative to its partial sum.
pub fn phi_q_derivs(q: &BigReal, x: &BigReal, lo: u32, hi: u32, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
    Ok(phi_q_series(q, x, lo, hi, cfg)?
        .into_iter()
        .map(|s| s.value)
        .collect())
}

pub fn phi_q_series(q: &BigReal, x: &BigReal, lo: u32, hi: u32, cfg: &PrecisionConfig) -> Result<Vec<SeriesValue>> {
    check_q(q)?;
    check_x(x)?;
    assert!(lo <= hi);
    let bits = cfg.bits();
    let q = Float::with_val(bits, q);
    let l = -Float::with_val(bits, q.ln_ref());
    let y = Float::with_val(bits, -Float::with_val(bits, &l * x)).exp();
    let tol = cfg.tol();
    let width = (hi - lo + 1) as usize;

    let mut sums = vec![Float::new(bits); width];
    let mut u_prev = Float::with_val(bits, 1);
    let mut qj = Float::with_val(bits, 1);
    let mut yj = Float::with_val(bits, 1);
    let mut j: usize = 0;
    let tails = loop {
        j += 1;
        if j > cfg.max_terms {
            return Err(precision(format!("Phi_q series needs more than {} terms", cfg.max_terms)));
        }
        qj *= &q;
        yj *= &y;
        let u = Float::with_val(bits, &l * j as u64) / Float::with_val(bits, 1 - &qj);
        let d = Float::with_val(bits, &u - &u_prev);
        u_prev = u;
        let jf = Float::with_val(bits, j as u64);
        let mut t = Float::with_val(bits, &d * &yj);
        for _ in 0..lo {
            t *= &jf;
        }
        for s in sums.iter_mut() {
            *s += &t;
            t *= &jf;
        }
        // tail sum_{i>j} d_i i^k y^i <= L (j+1)^k y^(j+1) / (1 - ((j+2)/(j+1))^k y)
        if let Some(tails) = tail_bounds(&l, &y, &yj, j, lo, hi) {
            if tails.iter().zip(&sums).all(|(t, s)| *t <= Float::with_val(bits, &tol * s)) {
                break tails;
            }
        }
    };
    let lk = {
        let mut p = Float::with_val(bits, 1);
        for _ in 0..lo {
            p *= &l;
        }
        p
    };
    let mut scale = lk;
    let mut out = Vec::with_capacity(width);
    for (s, t) in sums.into_iter().zip(tails) {
        out.push(SeriesValue {
            value: Float::with_val(bits, &s * &scale),
            tail_bound: t * &scale,
            terms_used: j,
            estimated: false,
        });
        scale *= &l;
    }
    Ok(out)
}

fn tail_bounds(l: &Float, y: &Float, yj: &Float, j: usize, lo: u32, hi: u32) -> Option<Vec<Float>> {
    let bits = l.prec();
    let ratio_base = (j as f64 + 2.0) / (j as f64 + 1.0);
    let yf = y.to_f64();
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    let next_y = Float::with_val(bits, yj * y);
    let j1 = Float::with_val(bits, j as u64 + 1);
    let mut pow = Float::with_val(bits, 1);
    for _ in 0..lo {
        pow *= &j1;
    }
    for k in lo..=hi {
        let rho = ratio_base.powi(k as i32) * yf;
        if rho >= 1.0 {
            return None;
        }
        // round the geometric factor upward
        let geo = 1.0 / (1.0 - rho) * (1.0 + 1e-12);
        out.push(Float::with_val(bits, l * &pow) * &next_y * geo);
        pow *= &j1;
    }
    Some(out)
}

/// `Phi_q(x)` from its defining formula, via the q-trigamma series.
pub fn phi_q_direct(q: &BigReal, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_q(q)?;
    check_x(x)?;
    let bits = cfg.bits();
    let log_q = Float::with_val(bits, q.ln_ref());
    let qx = Float::with_val(bits, &log_q * x).exp();
    let tri = q_trigamma(q, x, cfg)?;
    Ok(Float::with_val(bits, &qx - 1u32) / &log_q * tri - qx)
}

/// `Theta_q(x) = log q * q^x / (q^x - 1)`, the Laplace transform of the
/// discrete measure with mass `-log q` at each `-k log q`.
pub fn theta_q(q: &BigReal, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    check_q(q)?;
    check_x(x)?;
    let bits = cfg.bits();
    let log_q = Float::with_val(bits, q.ln_ref());
    let e = Float::with_val(bits, &log_q * x);
    let qx = Float::with_val(bits, e.exp_ref());
    let qxm1 = Float::with_val(bits, e.exp_m1_ref());
    Ok(log_q * qx / qxm1)
}

/// `(-log q) sum_{k=1}^{terms} q^(kx)` with the remainder as tail bound.
pub fn theta_q_atoms(q: &BigReal, x: &BigReal, terms: usize, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_q(q)?;
    check_x(x)?;
    let bits = cfg.bits();
    let nl = -Float::with_val(bits, q.ln_ref());
    let r = Float::with_val(bits, -Float::with_val(bits, &nl * x)).exp();
    let mut rk = Float::with_val(bits, 1);
    let mut sum = Float::new(bits);
    for _ in 0..terms {
        rk *= &r;
        sum += &rk;
    }
    let tail = Float::with_val(bits, &rk * &r) / Float::with_val(bits, 1 - &r) * &nl;
    Ok(SeriesValue {
        value: sum * &nl,
        tail_bound: tail,
        terms_used: terms,
        estimated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::phi;

    fn c() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn diff(a: &Float, b: &Float) -> f64 {
        Float::with_val(a.prec(), a - b).abs().to_f64()
    }

    #[test]
    fn regrouped_series_matches_definition() {
        let c = c();
        for (q, x) in [(0.5, 1.0), (0.2, 0.3), (0.9, 2.0), (0.99, 0.7)] {
            let (q, x) = (c.num(q), c.num(x));
            let a = phi_q(&q, 0, &x, &c).unwrap();
            let b = phi_q_direct(&q, &x, &c).unwrap();
            assert!(diff(&a, &b) < 1e-40, "{}", diff(&a, &b));
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let c = c();
        let q = c.num(0.5);
        let x = c.num(1.3);
        let h = c.pow10(-12);
        let xp = Float::with_val(c.bits(), &x + &h);
        let xm = Float::with_val(c.bits(), &x - &h);
        let fd = (phi_q(&q, 0, &xp, &c).unwrap() - phi_q(&q, 0, &xm, &c).unwrap()) / (h * 2u32);
        let d1 = phi_q(&q, 1, &x, &c).unwrap();
        assert!(diff(&fd, &(-d1)) < 1e-20);
    }

    #[test]
    fn vanishes_at_infinity() {
        let c = c();
        let v = phi_q(&c.num(0.5), 0, &c.num(200), &c).unwrap();
        assert!(v > 0 && v < c.pow10(-25));
    }

    #[test]
    fn tends_to_phi_as_q_tends_to_one() {
        let c = c();
        let x = c.num(2);
        let a = phi_q(&c.num(0.9999), 0, &x, &c).unwrap();
        assert!(diff(&a, &phi(&x, &c).unwrap()) < 1e-3);
    }

    #[test]
    fn alternating_derivatives_positive() {
        let c = c();
        for q in [0.2, 0.5, 0.9] {
            for x in [0.1, 1.0, 20.0] {
                let v = phi_q_derivs(&c.num(q), &c.num(x), 0, 8, &c).unwrap();
                assert!(v.iter().all(|v| *v > 0), "q={q} x={x}");
            }
        }
    }

    #[test]
    fn inverse_form_uses_reciprocal() {
        let c = c();
        let x = c.num(0.75);
        let a = phi_q_inv(&c.num(4), &x, &c).unwrap();
        let b = phi_q(&c.num(0.25), 0, &x, &c).unwrap();
        assert_eq!(a, b);
        assert!(phi_q_inv(&c.num(0.5), &x, &c).is_err());
        assert!(phi_q(&c.num(1.5), 0, &x, &c).is_err());
    }

    #[test]
    fn theta_q_closed_form_matches_atoms() {
        let c = c();
        let q = c.num(0.5);
        let x = c.one();
        let a = theta_q(&q, &x, &c).unwrap();
        let b = theta_q_atoms(&q, &x, 200, &c).unwrap();
        assert!(diff(&a, &b.value) < 1e-40);
        assert!(a > 0);
        let big = c.num(60);
        let t = theta_q(&q, &big, &c).unwrap();
        let ln_q = Float::with_val(c.bits(), q.ln_ref());
        let lead = -Float::with_val(c.bits(), &ln_q * &big).exp() * &ln_q;
        assert!(diff(&t, &lead) / lead.to_f64() < 1e-17);
    }
}
