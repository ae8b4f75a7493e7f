//! `f_m(t) = d^m/dt^m [t^m / (1 - e^-t)]`, the kernel `g_m = (t f_m)'` and the
//! running integral `Theta_m(t) = int_0^t u f_m(u) du`.

use rug::Float;

use crate::bernoulli::even_bernoulli_floats;
use crate::error::{domain, precision, Error, Result};
use crate::precision::{factorial, BigReal, PrecisionConfig, SeriesValue};
use crate::quadrature::integrate;
use crate::special::laguerre_pair;

use super::kernels::phi_n_derivs;

/// A kernel value at `t` with a bound on its evaluation error.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSample {
    pub t: BigReal,
    pub value: BigReal,
    pub tail_bound: BigReal,
}

fn check_t(t: &BigReal) -> Result<()> {
    if !t.is_finite() || *t <= 0 {
        return Err(domain(format!("t must be positive, got {}", t.to_f64())));
    }
    Ok(())
}

/// Below this argument the Taylor expansion at 0 replaces the Laguerre series.
const TAYLOR_CUTOFF: f64 = 1.0;

/// `f_m(t)`, from the Laguerre series `m! (1 + sum_k e^-kt L_m(kt))` for
/// `t >= 1` and from the Taylor expansion at the origin below.
pub fn f_m(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_t(t)?;
    if m == 0 {
        let bits = cfg.bits();
        let neg = Float::with_val(bits, -t);
        let v = -Float::with_val(bits, neg.exp_m1_ref()).recip();
        return Ok(SeriesValue::exact(v));
    }
    if t.to_f64() < TAYLOR_CUTOFF {
        f_m_taylor(m, 0, t, cfg)
    } else {
        f_m_laguerre(m, t, cfg)
    }
}

/// `f'_m(t)`.
pub fn f_m_prime(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_t(t)?;
    if t.to_f64() < TAYLOR_CUTOFF {
        if m == 0 {
            let bits = cfg.bits();
            // d/dt 1/(1-e^-t) = -e^t/(e^t-1)^2
            let em1 = Float::with_val(bits, t.exp_m1_ref());
            let v = -Float::with_val(bits, &em1 + 1u32) / Float::with_val(bits, em1.square_ref());
            return Ok(SeriesValue::exact(v));
        }
        f_m_taylor(m, 1, t, cfg)
    } else {
        f_m_prime_laguerre(m, t, cfg)
    }
}

/// Laguerre series for `f_m`, truncated once
/// `m! e^(-(K+1)t/2) / (1 - e^(-t/2))` drops below `series_tol * m!`.
pub fn f_m_laguerre(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_t(t)?;
    let bits = cfg.bits();
    let t = Float::with_val(bits, t);
    let e = Float::with_val(bits, -&t).exp();
    let c = Float::with_val(bits, -Float::with_val(bits, &t / 2u32)).exp();
    let one_minus_c = Float::with_val(bits, 1 - &c);
    let tol = cfg.tol();
    let mut sum = Float::with_val(bits, 1);
    let mut ek = Float::with_val(bits, 1);
    let mut ck = Float::with_val(bits, 1);
    let mut k = 0usize;
    let tail = loop {
        k += 1;
        if k > cfg.max_terms {
            return Err(precision(format!("f_m series needs more than {} terms", cfg.max_terms)));
        }
        ek *= &e;
        ck *= &c;
        let x = Float::with_val(bits, &t * k as u64);
        let (l, _) = laguerre_pair(m, &x);
        sum += l * &ek;
        let bound = Float::with_val(bits, &ck * &c) / &one_minus_c;
        if bound <= tol {
            break bound;
        }
    };
    let mf = factorial(m, bits);
    Ok(SeriesValue {
        value: sum * &mf,
        tail_bound: tail * mf,
        terms_used: k,
        estimated: false,
    })
}

/// Termwise derivative of the Laguerre series,
/// `m! sum_k k e^-kt (L'_m(kt) - L_m(kt))` with `x L'_m = m (L_m - L_{m-1})`.
/// Since `|L'_m(x)| <= m e^(x/2)` the tail is at most
/// `m! (m+1) (K+1) c^(K+1) / (1-c)^2`, `c = e^(-t/2)`.
pub fn f_m_prime_laguerre(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_t(t)?;
    let bits = cfg.bits();
    let t = Float::with_val(bits, t);
    let e = Float::with_val(bits, -&t).exp();
    let c = Float::with_val(bits, -Float::with_val(bits, &t / 2u32)).exp();
    let denom = Float::with_val(bits, Float::with_val(bits, 1 - &c).square_ref());
    let tol = cfg.tol();
    let mut sum = Float::new(bits);
    let mut ek = Float::with_val(bits, 1);
    let mut ck = Float::with_val(bits, 1);
    let mut k = 0usize;
    let tail = loop {
        k += 1;
        if k > cfg.max_terms {
            return Err(precision(format!("f'_m series needs more than {} terms", cfg.max_terms)));
        }
        ek *= &e;
        ck *= &c;
        let x = Float::with_val(bits, &t * k as u64);
        let (l, lm1) = laguerre_pair(m, &x);
        let dl = if m == 0 {
            Float::new(bits)
        } else {
            Float::with_val(bits, &l - &lm1) * m / &x
        };
        sum += (dl - l) * &ek * k as u64;
        let bound = Float::with_val(bits, &ck * &c) * (k as u64 + 1) * (m + 1) / &denom;
        if bound <= tol {
            break bound;
        }
    };
    let mf = factorial(m, bits);
    Ok(SeriesValue {
        value: sum * &mf,
        tail_bound: tail * mf,
        terms_used: k,
        estimated: false,
    })
}

/// Taylor expansion at the origin of `f_m^(d)`, `d <= 1`, valid for
/// `|t| < 2 pi`:
/// `f_m^(d)(t) = sum_{n>d} b_n (n+m-1)!/(n-1-d)! t^(n-1-d)` where
/// `b_n = B_n/n!` with `B_1 = +1/2`.
///
/// `|b_n| <= 4/(2 pi)^n` bounds each term; the remainder is bounded by the
/// next bound times a geometric factor once the ratio of bounds drops below 1.
pub fn f_m_taylor(m: u32, d: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_t(t)?;
    if t.to_f64() >= 6.0 {
        return Err(domain("Taylor expansion of f_m requires t < 6"));
    }
    let bits = cfg.bits();
    let t = Float::with_val(bits, t);
    let tf = t.to_f64();
    let two_pi = cfg.pi() * 2u32;
    let scale_tol = cfg.tol() * factorial(m, bits);
    let mut count = 64usize;
    loop {
        let b = even_bernoulli_floats(count, bits);
        // F(n) = (n+m-1)!/(n-1-d)!, starting at n = d+1
        let mut n = d + 1;
        let mut coef = factorial(m + d, bits);
        let mut tp = Float::with_val(bits, 1);
        let mut sum = Float::new(bits);
        let mut inv_2pi_n = Float::with_val(bits, two_pi.pow_ref_u(n)).recip();
        loop {
            let bn = if n == 1 {
                Some(Float::with_val(bits, 0.5))
            } else if n.is_multiple_of(2) {
                let k = (n / 2) as usize;
                if k >= count {
                    break;
                }
                Some(Float::with_val(bits, &b[k]) / factorial(n, bits))
            } else {
                None
            };
            if let Some(bn) = bn {
                sum += bn * &coef * &tp;
            }
            // advance to n+1
            coef *= n + m;
            coef /= n - d;
            tp *= &t;
            inv_2pi_n /= &two_pi;
            n += 1;
            let rho = f64::from(n + m) / f64::from(n - d) * tf / std::f64::consts::TAU;
            if rho < 0.9 {
                let next = Float::with_val(bits, &coef * &tp) * &inv_2pi_n * 4u32;
                let tail = next / (1.0 - rho);
                if tail <= scale_tol {
                    return Ok(SeriesValue {
                        value: sum,
                        tail_bound: tail,
                        terms_used: n as usize,
                        estimated: false,
                    });
                }
            }
            if n as usize > cfg.max_terms {
                return Err(precision(format!("f_m Taylor series needs more than {} terms", cfg.max_terms)));
            }
        }
        count *= 2;
    }
}

trait PowRefU {
    fn pow_ref_u(&self, n: u32) -> Float;
}

impl PowRefU for Float {
    fn pow_ref_u(&self, n: u32) -> Float {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(n))
    }
}

/// `g_m(t) = f_m(t) + t f'_m(t)`.
pub fn g_m_kernel(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<KernelSample> {
    let f = f_m(m, t, cfg)?;
    let fp = f_m_prime(m, t, cfg)?;
    let bits = cfg.bits();
    let t = Float::with_val(bits, t);
    let value = Float::with_val(bits, &fp.value * &t) + &f.value;
    let tail_bound = Float::with_val(bits, &fp.tail_bound * &t) + &f.tail_bound;
    Ok(KernelSample { t, value, tail_bound })
}

/// `Theta_m(t)` by adaptive quadrature of `u f_m(u)`.
pub fn theta_m(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<KernelSample> {
    let mut v = theta_m_samples(m, std::slice::from_ref(t), cfg)?;
    Ok(v.pop().expect("one sample"))
}

/// `Theta_m` at increasing points `ts`, integrating panel by panel so each
/// sample reuses the previous one.
pub fn theta_m_samples(m: u32, ts: &[BigReal], cfg: &PrecisionConfig) -> Result<Vec<KernelSample>> {
    let bits = cfg.bits();
    for w in ts.windows(2) {
        if w[1] < w[0] {
            return Err(domain("theta_m sample points must be nondecreasing"));
        }
    }
    let scale = factorial(m, bits);
    let mut out = Vec::with_capacity(ts.len());
    let mut prev_t = Float::new(bits);
    let mut acc = Float::new(bits);
    let mut err = Float::new(bits);
    for t in ts {
        check_t(t)?;
        let t = Float::with_val(bits, t);
        let mut max_tail = Float::new(bits);
        // tolerance relative to the natural size m! t^2 / 4 of the increment
        let width = Float::with_val(bits, &t - &prev_t);
        let size = Float::with_val(bits, &t * &width) * &scale / 4u32;
        let tol = cfg.tol() * size;
        let r = integrate(
            |u| {
                let f = f_m(m, u, cfg)?;
                if f.tail_bound > max_tail {
                    max_tail.clone_from(&f.tail_bound);
                }
                Ok(f.value * u)
            },
            &prev_t,
            &t,
            &tol,
            cfg,
        )
        .map_err(|e| match e {
            Error::Quadrature(s) => Error::Quadrature(format!("theta_m: {s}")),
            other => other,
        })?;
        acc += &r.value;
        // |int u tail| <= tail * (t^2 - prev^2)/2
        let span = (Float::with_val(bits, t.square_ref()) - Float::with_val(bits, prev_t.square_ref())) / 2u32;
        err += r.err + max_tail * span;
        out.push(KernelSample {
            t: t.clone(),
            value: acc.clone(),
            tail_bound: err.clone(),
        });
        prev_t = t;
    }
    Ok(out)
}

/// `Theta_m(t) = t D^(m-1) phi_m(t) - D^(m-2) phi_m(t)` for `m >= 2`, with
/// `phi_m(t) = t^m / (1 - e^-t)`.
pub fn theta_m_closed(m: u32, t: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    if m < 2 {
        return Err(domain("closed form of Theta_m requires m >= 2"));
    }
    let d = phi_n_derivs(m, t, m - 1, cfg)?;
    let bits = cfg.bits();
    Ok(Float::with_val(bits, &d[m as usize - 1] * t) - &d[m as usize - 2])
}
