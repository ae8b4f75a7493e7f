use rug::Float;

use crate::error::{domain, precision, Result};
use crate::precision::{BigReal, PrecisionConfig, SeriesValue};

pub(crate) fn check_q_unit(q: &BigReal) -> Result<()> {
    if !q.is_finite() || *q <= 0 || *q >= 1 {
        return Err(domain(format!("q must lie in (0, 1), got {}", q.to_f64())));
    }
    Ok(())
}

/// q-trigamma `psi'_q(x) = (log q)^2 sum_k k q^(kx) / (1 - q^k)` for `0 < q < 1`.
pub fn q_trigamma(q: &BigReal, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
    Ok(q_trigamma_series(q, x, cfg)?.value)
}

/// Series form of [`q_trigamma`] with its tail bound. Every term is positive,
/// so truncation stops once the bound
/// `(K+1) r^(K+1) / ((1-r)^2 (1-q))`, `r = q^x`, falls below
/// `series_tol` times the partial sum.
pub fn q_trigamma_series(q: &BigReal, x: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_q_unit(q)?;
    if !x.is_finite() || *x <= 0 {
        return Err(domain(format!("q_trigamma requires x > 0, got {}", x.to_f64())));
    }
    let bits = cfg.bits();
    let q = Float::with_val(bits, q);
    let log_q = Float::with_val(bits, q.ln_ref());
    let r = Float::with_val(bits, &log_q * x).exp();
    let one_minus_r = Float::with_val(bits, 1 - &r);
    let one_minus_q = Float::with_val(bits, 1 - &q);
    let denom = Float::with_val(bits, one_minus_r.square_ref()) * &one_minus_q;
    let tol = cfg.tol();

    let mut sum = Float::new(bits);
    let mut rk = Float::with_val(bits, 1);
    let mut qk = Float::with_val(bits, 1);
    let mut k: usize = 0;
    let tail = loop {
        k += 1;
        if k > cfg.max_terms {
            return Err(precision(format!(
                "q_trigamma series needs more than {} terms",
                cfg.max_terms
            )));
        }
        rk *= &r;
        qk *= &q;
        let mut term = Float::with_val(bits, &rk * k as u64);
        term /= Float::with_val(bits, 1 - &qk);
        sum += term;
        // bound on sum_{j>k} j r^j / (1 - q^j)
        let next = Float::with_val(bits, &rk * &r) * (k as u64 + 1);
        let bound = next / &denom;
        if bound <= Float::with_val(bits, &tol * &sum) {
            break bound;
        }
    };
    let l2 = Float::with_val(bits, log_q.square_ref());
    Ok(SeriesValue {
        value: Float::with_val(bits, &sum * &l2),
        tail_bound: tail * l2,
        terms_used: k,
        estimated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn approaches_trigamma_as_q_tends_to_one() {
        let c = cfg();
        let x = c.num(2);
        let v = q_trigamma(&c.parse("0.9999").unwrap(), &x, &c).unwrap();
        let lim = crate::special::polygamma(1, &x, &c).unwrap();
        assert!(Float::with_val(c.bits(), &v - &lim).abs() < 1e-3);
    }

    #[test]
    fn vanishes_for_large_x() {
        let c = cfg();
        let v = q_trigamma(&c.num(0.5), &c.num(100), &c).unwrap();
        assert!(v > 0 && v < 1e-25);
        // leading term (log q)^2 q^x / (1 - q)
        let q = c.num(0.5);
        let lead = Float::with_val(c.bits(), q.ln_ref()).square() * Float::with_val(c.bits(), (&q).pow(100u32)) * 2u32;
        let rel = Float::with_val(c.bits(), &v / &lead) - 1u32;
        assert!(rel.abs() < 1e-29);
    }

    #[test]
    fn agrees_with_brute_force_summation() {
        // brute force: each term k q^(kx)/(1-q^k) from its own exponentials
        let c = cfg();
        let q = c.num(0.5);
        let x = c.one();
        let series = q_trigamma(&q, &x, &c).unwrap();
        let bits = c.bits();
        let mut brute = Float::new(bits);
        let lq = Float::with_val(bits, q.ln_ref());
        for k in (1..=1_000u32).rev() {
            // past k ~ 240 the terms drop below 2^-230 relative, so 10^3 terms suffice
            let num = Float::with_val(bits, &lq * k).exp() * k;
            let den = 1 - Float::with_val(bits, &lq * k).exp();
            brute += num / den;
        }
        brute *= Float::with_val(bits, lq.square_ref());
        assert!(Float::with_val(bits, &series - &brute).abs() < c.pow10(-40));
    }

    #[test]
    fn positive_and_strictly_decreasing() {
        let c = cfg();
        let q = c.num(0.3);
        let mut prev = q_trigamma(&q, &c.num(0.05), &c).unwrap();
        for i in 1..30 {
            let x = c.num(0.05 + 0.7 * i as f64);
            let v = q_trigamma(&q, &x, &c).unwrap();
            assert!(v > 0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn domain_checks() {
        let c = cfg();
        assert!(q_trigamma(&c.num(1), &c.one(), &c).is_err());
        assert!(q_trigamma(&c.num(0), &c.one(), &c).is_err());
        assert!(q_trigamma(&c.num(0.5), &c.num(-1), &c).is_err());
    }
}
