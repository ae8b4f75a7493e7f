//! `theta_1(x) = x (log x - psi(x))`, its derivatives, the kernel `h`, and the
//! family `f_alpha(x) = x^(x(psi(x) - log x) - alpha)`.

use rug::ops::Pow;
use rug::Float;

use crate::bernoulli::even_bernoulli_floats;
use crate::error::{domain, Result};
use crate::precision::{alt, binomial, factorial, BigReal, PrecisionConfig};
use crate::special::polygamma_range;

use super::boosted;

fn check_x(x: &BigReal, what: &str) -> Result<()> {
    if !x.is_finite() || *x <= 0 {
        return Err(domain(format!("{what} requires x > 0, got {}", x.to_f64())));
    }
    Ok(())
}

/// `theta_1` and its derivatives lose about `2 log10 x` digits to
/// cancellation for large `x`.
fn guard_digits(x: &BigReal, orders: u32) -> u32 {
    let l = x.to_f64().log10().abs();
    (l * f64::from(orders + 2)).ceil() as u32 + 5
}

pub fn theta1(x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    let mut v = theta1_derivs(x, 0, cfg)?;
    Ok(v.pop().expect("one order"))
}

/// `theta_1^(k)(x)` for `k = 0..=k_max` from
/// `D^k (x log x) - x psi^(k)(x) - k psi^(k-1)(x)`.
pub fn theta1_derivs(x: &BigReal, k_max: u32, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
    check_x(x, "theta1")?;
    let work = boosted(cfg, guard_digits(x, k_max));
    let bits = work.bits();
    let x = Float::with_val(bits, x);
    let psi = polygamma_range(0, k_max, &x, &work)?;
    let ln_x = Float::with_val(bits, x.ln_ref());
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let xlogx = match k {
            0 => Float::with_val(bits, &x * &ln_x),
            1 => Float::with_val(bits, &ln_x + 1u32),
            _ => {
                let mut v = factorial(k - 2, bits) / Float::with_val(bits, x.pow_u_ref(k - 1));
                v *= alt(k);
                v
            }
        };
        let mut v = xlogx - Float::with_val(bits, &x * &psi[k as usize]);
        if k > 0 {
            v -= Float::with_val(bits, &psi[k as usize - 1] * k);
        }
        out.push(Float::with_val(cfg.bits(), v));
    }
    Ok(out)
}

trait PowU {
    fn pow_u_ref(&self, n: u32) -> Float;
}

impl PowU for Float {
    fn pow_u_ref(&self, n: u32) -> Float {
        Float::with_val(self.prec(), self.pow(n))
    }
}

/// `h(t) = 1/t^2 - e^-t/(1 - e^-t)^2`. Below `t = 1` the series
/// `sum_{n even} B_n (n-1) t^(n-2) / n!` avoids the cancellation.
pub fn h_kernel(t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    if !t.is_finite() || *t <= 0 {
        return Err(domain(format!("h_kernel requires t > 0, got {}", t.to_f64())));
    }
    let bits = cfg.bits();
    let t = Float::with_val(bits, t);
    if t < 1 {
        let eps = cfg.epsilon();
        let t2 = Float::with_val(bits, t.square_ref());
        let mut tp = Float::with_val(bits, 1);
        let mut acc = Float::new(bits);
        let mut count = 32usize;
        loop {
            let b = even_bernoulli_floats(count, bits);
            for k in 1..count {
                let n = 2 * k as u32;
                let term = Float::with_val(bits, &b[k] * (n - 1)) / factorial(n, bits) * &tp;
                acc += &term;
                tp *= &t2;
                // |B_n|/n! <= 4/(2 pi)^n and t < 1 make the remainder smaller
                // than the last term
                if Float::with_val(bits, term.abs_ref()) < Float::with_val(bits, &eps * &acc) {
                    return Ok(acc);
                }
            }
            count *= 2;
            acc = Float::new(bits);
            tp = Float::with_val(bits, 1);
        }
    }
    let em1 = Float::with_val(bits, t.exp_m1_ref());
    let e = Float::with_val(bits, &em1 + 1u32);
    Ok(Float::with_val(bits, t.square_ref()).recip() - e / Float::with_val(bits, em1.square_ref()))
}

/// `(-1)^n phi_alpha^(n)(x)` for `n = 0..=n_max`, where
/// `phi_alpha = ((theta_1 + alpha) log x)'` is the negated logarithmic
/// derivative of `f_alpha`.
pub fn f_alpha_log_derivs(alpha: &BigReal, x: &BigReal, n_max: u32, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
    check_x(x, "f_alpha")?;
    let work = boosted(cfg, guard_digits(x, n_max + 1));
    let bits = work.bits();
    let xw = Float::with_val(bits, x);
    let mut th = theta1_derivs(&xw, n_max + 1, &work)?;
    th[0] += Float::with_val(bits, alpha);
    let ln_x = Float::with_val(bits, xw.ln_ref());
    // (log x)^(k) = (-1)^(k-1) (k-1)! / x^k for k >= 1
    let log_deriv = |k: u32| -> Float {
        if k == 0 {
            return ln_x.clone();
        }
        let mut v = factorial(k - 1, bits) / xw.pow_u_ref(k);
        v *= alt(k - 1);
        v
    };
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let mut acc = Float::new(bits);
        for j in 0..=n + 1 {
            acc += binomial(n + 1, j, bits) * &th[j as usize] * log_deriv(n + 1 - j);
        }
        acc *= alt(n);
        out.push(Float::with_val(cfg.bits(), acc));
    }
    Ok(out)
}

pub fn f_alpha_log(alpha: &BigReal, n: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    let mut v = f_alpha_log_derivs(alpha, x, n, cfg)?;
    Ok(v.pop().expect("one order"))
}

/// `f_alpha(x) = x^(-(theta_1(x) + alpha))`.
pub fn f_alpha(alpha: &BigReal, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    let bits = cfg.bits();
    let th = theta1(x, cfg)?;
    let e = -(th + alpha) * Float::with_val(bits, x.ln_ref());
    Ok(e.exp())
}

/// `g_n(x) = (-1)^n theta_1^(n+1)(x) log x + n!/(4 x^(n+1))`.
pub fn g_n_aux(n: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    if n == 0 {
        return Err(domain("g_n requires n >= 1"));
    }
    check_x(x, "g_n")?;
    let work = boosted(cfg, guard_digits(x, n + 1));
    let bits = work.bits();
    let xw = Float::with_val(bits, x);
    let th = theta1_derivs(&xw, n + 1, &work)?;
    let mut v = Float::with_val(bits, &th[n as usize + 1] * Float::with_val(bits, xw.ln_ref()));
    v *= alt(n);
    v += factorial(n, bits) / (xw.pow_u_ref(n + 1) * 4u32);
    Ok(Float::with_val(cfg.bits(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn diff(a: &Float, b: &Float) -> f64 {
        Float::with_val(a.prec(), a - b).abs().to_f64()
    }

    #[test]
    fn theta1_at_one_is_euler_gamma() {
        let c = c();
        let v = theta1(&c.one(), &c).unwrap();
        assert!(diff(&v, &c.euler_gamma()) < 1e-45);
        let f = v.to_f64();
        assert!((0.5..=0.5 + 1.0 / 12.0).contains(&f));
    }

    #[test]
    fn theta1_bounds_on_samples() {
        let c = c();
        for x in [0.05, 0.3, 1.0, 10.0, 1e3, 1e6] {
            let v = theta1(&c.num(x), &c).unwrap().to_f64();
            assert!(v >= 0.5 && v <= 0.5 + 1.0 / (12.0 * x), "x={x} v={v}");
        }
    }

    #[test]
    fn theta1_derivatives_match_difference_quotients() {
        let c = c();
        let x = c.num(2.3);
        let h = c.pow10(-15);
        let d = theta1_derivs(&x, 4, &c).unwrap();
        for k in 0..4usize {
            let xp = Float::with_val(c.bits(), &x + &h);
            let xm = Float::with_val(c.bits(), &x - &h);
            let up = theta1_derivs(&xp, 4, &c).unwrap();
            let dn = theta1_derivs(&xm, 4, &c).unwrap();
            let fd = (Float::with_val(c.bits(), &up[k] - &dn[k])) / (Float::with_val(c.bits(), &h * 2u32));
            assert!(diff(&fd, &d[k + 1]) < 1e-25, "k={k}");
        }
    }

    #[test]
    fn h_kernel_limits_and_monotonicity() {
        let c = c();
        let v = h_kernel(&c.pow10(-3), &c).unwrap().to_f64();
        assert!(v < 1.0 / 12.0 && v > 1.0 / 12.0 - 1e-3);
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 5.0]
            .iter()
            .map(|&t| h_kernel(&c.num(t), &c).unwrap().to_f64())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] > w[1]) && vals[3] > 0.0);
    }

    #[test]
    fn h_kernel_branches_agree() {
        let c = c();
        let bits = c.bits();
        for t in [0.25, 0.999] {
            let t = c.num(t);
            let series = h_kernel(&t, &c).unwrap();
            let em1 = Float::with_val(bits, t.exp_m1_ref());
            let direct = Float::with_val(bits, t.square_ref()).recip()
                - Float::with_val(bits, &em1 + 1u32) / Float::with_val(bits, em1.square_ref());
            assert!(diff(&series, &direct) < 1e-44);
        }
    }

    #[test]
    fn phi_alpha_at_one_is_gamma() {
        let c = c();
        let v = f_alpha_log(&c.zero(), 0, &c.one(), &c).unwrap();
        assert!(diff(&v, &c.euler_gamma()) < 1e-45);
    }

    #[test]
    fn phi_alpha_is_affine_in_alpha() {
        let c = c();
        let x = c.num(3.7);
        let a = f_alpha_log(&c.num(0.3), 0, &x, &c).unwrap();
        let b = f_alpha_log(&c.num(-0.2), 0, &x, &c).unwrap();
        let expect = c.num(0.5) / &x;
        assert!(diff(&Float::with_val(c.bits(), &a - &b), &expect) < 1e-45);
    }

    #[test]
    fn phi_alpha_is_log_derivative_of_f_alpha() {
        let c = c();
        let alpha = c.num(-0.25);
        let x = c.num(1.9);
        let h = c.pow10(-15);
        let xp = Float::with_val(c.bits(), &x + &h);
        let xm = Float::with_val(c.bits(), &x - &h);
        let lp = f_alpha(&alpha, &xp, &c).unwrap().ln();
        let lm = f_alpha(&alpha, &xm, &c).unwrap().ln();
        let fd = -(lp - lm) / (h * 2u32);
        let v = f_alpha_log(&alpha, 0, &x, &c).unwrap();
        assert!(diff(&fd, &v) < 1e-25);
    }

    #[test]
    fn g_n_properties() {
        let c = c();
        for n in 1..=4u32 {
            let v = g_n_aux(n, &c.one(), &c).unwrap();
            let expect = factorial(n, c.bits()) / 4u32;
            assert!(diff(&v, &expect) < 1e-45);
            for x in [1.0, 2.5, 7.0] {
                let a = g_n_aux(n, &c.num(x), &c).unwrap();
                let b = g_n_aux(n, &c.num(x + 1.0), &c).unwrap();
                assert!(b < a, "n={n} x={x}");
            }
        }
        let v = g_n_aux(2, &c.pow10(4), &c).unwrap();
        assert!(v.to_f64().abs() < 1e-6);
        assert!(g_n_aux(0, &c.one(), &c).is_err());
    }
}
