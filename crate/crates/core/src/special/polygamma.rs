use rug::ops::Pow;
use rug::Float;

use crate::bernoulli::even_bernoulli_floats;
use crate::error::{domain, precision, Result};
use crate::precision::{factorial, BigReal, PrecisionConfig};

/// `psi^(n)(x)`; `n = 0` is the digamma function.
pub fn polygamma(n: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    let mut v = polygamma_range(n, n, x, cfg)?;
    Ok(v.pop().expect("one order requested"))
}

pub fn digamma(x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    polygamma(0, x, cfg)
}

/// `psi^(k)(x)` for every `k` in `lo..=hi`, sharing one argument shift.
///
/// The argument is raised with `psi^(k)(x) = psi^(k)(x+1) - (-1)^k k!/x^(k+1)`
/// until it clears `10 + P/2 + hi`, where the Bernoulli asymptotic series is
/// summed to the working epsilon.
pub fn polygamma_range(lo: u32, hi: u32, x: &BigReal, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
    assert!(lo <= hi, "empty order range");
    if !x.is_finite() || *x <= 0 {
        return Err(domain(format!("polygamma requires x > 0, got {}", x.to_f64())));
    }
    let bits = cfg.bits();
    let x = Float::with_val(bits, x);
    let threshold = 10.0 + f64::from(cfg.digits) / 2.0 + f64::from(hi);
    let xf = x.to_f64();
    let shift = if xf < threshold {
        (threshold - xf).ceil() as usize
    } else {
        0
    };
    if shift > cfg.max_terms {
        return Err(precision(format!(
            "argument shift of {shift} steps exceeds max_terms = {}",
            cfg.max_terms
        )));
    }

    let width = (hi - lo + 1) as usize;
    let mut sums = vec![Float::new(bits); width];
    for j in 0..shift {
        let inv = Float::with_val(bits, &x + j as u32).recip();
        let mut p = powu(&inv, lo + 1);
        for s in sums.iter_mut() {
            *s += &p;
            p *= &inv;
        }
    }

    let y = Float::with_val(bits, &x + shift as u32);
    let mut out = Vec::with_capacity(width);
    for (idx, k) in (lo..=hi).enumerate() {
        let asym = asymptotic(k, &y, bits)?;
        let corr = factorial(k, bits) * &sums[idx];
        out.push(if k % 2 == 0 { asym - corr } else { asym + corr });
    }
    Ok(out)
}

fn powu(x: &Float, e: u32) -> Float {
    Float::with_val(x.prec(), x.pow(e))
}

/// Bernoulli asymptotic expansion of `psi^(n)(y)` for large `y`.
fn asymptotic(n: u32, y: &Float, bits: u32) -> Result<Float> {
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32)));
    let inv_y = Float::with_val(bits, y.recip_ref());
    let inv_y2 = Float::with_val(bits, inv_y.square_ref());

    // leading part and the power multiplying the first correction
    let (leading, mut pw) = if n == 0 {
        let lead = Float::with_val(bits, y.ln_ref()) - Float::with_val(bits, &inv_y / 2u32);
        (lead, inv_y2.clone())
    } else {
        let yn = powu(&inv_y, n);
        let mut lead = factorial(n - 1, bits) * &yn;
        lead += factorial(n, bits) * Float::with_val(bits, &yn * &inv_y) / 2u32;
        (lead, yn * &inv_y2)
    };
    let scale = Float::with_val(bits, leading.abs_ref());

    // coef_k = (2k+n-1)!/(2k)!  (for n = 0 this is 1/(2k))
    let mut coef = if n == 0 {
        Float::with_val(bits, 0.5)
    } else {
        factorial(n + 1, bits) / 2u32
    };
    let mut s = Float::new(bits);
    let mut prev = Float::with_val(bits, rug::float::Special::Infinity);
    let mut converged = false;
    let mut bern = even_bernoulli_floats(64, bits);
    for k in 1u32..2000 {
        if k as usize >= bern.len() {
            bern = even_bernoulli_floats(2 * k as usize, bits);
        }
        let mut term = Float::with_val(bits, &bern[k as usize] * &coef);
        term *= &pw;
        let mag = Float::with_val(bits, term.abs_ref());
        s += &term;
        if mag <= Float::with_val(bits, &eps * &scale) {
            converged = true;
            break;
        }
        if mag > prev {
            break;
        }
        prev = mag;
        pw *= &inv_y2;
        if n == 0 {
            // 1/(2k) -> 1/(2k+2)
            coef = Float::with_val(bits, 1) / (2 * (k + 1));
        } else {
            let a = 2 * k + n;
            coef *= a;
            coef *= a + 1;
            coef /= 2 * k + 1;
            coef /= 2 * k + 2;
        }
    }
    if !converged {
        return Err(precision(format!(
            "asymptotic series for psi^({n}) at {} did not reach working precision",
            y.to_f64()
        )));
    }
    Ok(if n == 0 {
        leading - s
    } else if n % 2 == 1 {
        leading + s
    } else {
        -(leading + s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    /// Brute-force oracle: sum_{k>=0} 1/(k+1)^2 with N terms plus the integral tail 1/N.
    fn trigamma_one_oracle(terms: u32) -> (f64, f64) {
        let mut s = 0.0f64;
        // sum smallest terms first to keep f64 error well below the tail bound
        for k in (1..=terms).rev() {
            s += 1.0 / (k as f64 * k as f64);
        }
        let tail = 1.0 / terms as f64;
        (s + tail, tail)
    }

    #[test]
    fn trigamma_at_one_is_pi_squared_over_six() {
        let c = cfg();
        let v = polygamma(1, &c.one(), &c).unwrap();
        let (oracle, tail) = trigamma_one_oracle(1_000_000);
        // the integral tail over-estimates the true remainder by about 1/(2N^2)
        assert!((v.to_f64() - oracle).abs() < tail * 1e-5);
        let exact = c.pi().square() / 6u32;
        assert!(Float::with_val(c.bits(), &v - &exact).abs() < c.pow10(-60));
    }

    #[test]
    fn digamma_at_one_is_minus_euler_gamma() {
        let c = cfg();
        // oracle: H_N - log N with the classical 1/(2N) - 1/(12N^2) correction, N = 10^6
        let n = 1_000_000u32;
        let mut h = 0.0f64;
        for k in (1..=n).rev() {
            h += 1.0 / k as f64;
        }
        let nf = n as f64;
        let gamma_est = h - nf.ln() - 1.0 / (2.0 * nf) + 1.0 / (12.0 * nf * nf);
        let v = digamma(&c.one(), &c).unwrap();
        assert!((v.to_f64() + gamma_est).abs() < 1e-12);
        let exact = -c.euler_gamma();
        assert!(Float::with_val(c.bits(), &v - &exact).abs() < c.pow10(-60));
    }

    #[test]
    fn shift_recurrence_holds() {
        let c = cfg();
        for m in 0..=10u32 {
            for xs in ["0.1", "0.7", "3.25", "41", "100"] {
                let x = c.parse(xs).unwrap();
                let a = polygamma(m, &Float::with_val(c.bits(), &x + 1u32), &c).unwrap();
                let b = polygamma(m, &x, &c).unwrap();
                let mut rhs = factorial(m, c.bits()) / powu(&x, m + 1);
                if m % 2 == 1 {
                    rhs = -rhs;
                }
                let resid = Float::with_val(c.bits(), &a - &b) - &rhs;
                let scale = Float::with_val(c.bits(), rhs.abs_ref()) + 1u32;
                assert!(
                    resid.abs() <= c.tol() * 10u32 * scale,
                    "m={m} x={xs}"
                );
            }
        }
    }

    #[test]
    fn range_matches_individual_orders() {
        let c = cfg();
        let x = c.parse("2.5").unwrap();
        let all = polygamma_range(0, 6, &x, &c).unwrap();
        for (k, v) in all.iter().enumerate() {
            // the shift length depends on the highest order, so agreement is to rounding only
            let single = polygamma(k as u32, &x, &c).unwrap();
            let diff = Float::with_val(c.bits(), v - &single).abs();
            assert!(diff < Float::with_val(c.bits(), single.abs_ref()) * c.pow10(-60));
        }
    }

    #[test]
    fn signs_alternate() {
        let c = cfg();
        for n in 1..12u32 {
            for xs in ["0.01", "1", "500"] {
                let v = polygamma(n, &c.parse(xs).unwrap(), &c).unwrap();
                assert_eq!(v > 0, n % 2 == 1, "n={n} x={xs}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_argument() {
        let c = cfg();
        assert!(matches!(polygamma(1, &c.zero(), &c), Err(crate::Error::Domain(_))));
        assert!(polygamma(0, &c.num(-1.5), &c).is_err());
    }

    #[test]
    fn known_value_tetragamma_one() {
        // psi''(1) = -2 zeta(3)
        let c = cfg();
        let v = polygamma(2, &c.one(), &c).unwrap();
        assert!((v.to_f64() + 2.0 * 1.202_056_903_159_594_2).abs() < 1e-14);
    }
}
