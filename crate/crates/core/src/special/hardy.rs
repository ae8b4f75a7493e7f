use rug::ops::Pow;
use rug::Float;

use crate::error::{precision, Result};
use crate::precision::{BigReal, PrecisionConfig, SeriesValue};
use crate::special::polygamma;

/// Smallest number of explicitly summed terms.
const MIN_HEAD: usize = 64;
/// Upper bound on `|z| / K`, the ratio driving the tail expansion.
const TAIL_RATIO: f64 = 6.0;

/// Hardy-Littlewood function `H(z) = sum_k sin(z/k)/k` for real `z`.
///
/// The first `K` terms are summed directly. The remainder is expanded as
/// `sum_j (-1)^j z^(2j+1)/(2j+1)! * zeta(2j+2, K+1)` with the Hurwitz zeta
/// values taken from polygamma at `K + 1`. The reported `tail_bound` is a
/// certified bound on the dropped part of that expansion, using
/// `zeta(s, K+1) <= K^(1-s)/(s-1)`.
pub fn hardy_littlewood_h(z: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    let bits = cfg.bits();
    let z = Float::with_val(bits, z);
    if z.is_zero() {
        return Ok(SeriesValue::exact(Float::new(bits)));
    }
    let az = Float::with_val(bits, z.abs_ref());
    let head = ((az.to_f64() / TAIL_RATIO).ceil() as usize).max(MIN_HEAD);
    if head > cfg.max_terms {
        return Err(precision(format!(
            "H({}) needs {head} explicit terms, max_terms = {}",
            z.to_f64(),
            cfg.max_terms
        )));
    }

    let mut sum = Float::new(bits);
    for k in (1..=head as u32).rev() {
        let arg = Float::with_val(bits, &z / k);
        sum += arg.sin() / k;
    }

    let u = az.to_f64() / head as f64;
    let tol = cfg.tol();
    let kp1 = Float::with_val(bits, head as u32 + 1);
    let z2 = Float::with_val(bits, z.square_ref());
    // zpow = z^(2j+1)/((2j+1)!)^2
    let mut zpow = z.clone();
    let mut tail = Float::new(bits);
    let mut j: u32 = 0;
    let bound = loop {
        let order = 2 * j + 1;
        let psi = polygamma(order, &kp1, cfg)?;
        let term = Float::with_val(bits, &zpow * &psi);
        if j.is_multiple_of(2) {
            tail += term;
        } else {
            tail -= term;
        }
        j += 1;
        let next = 2 * j + 1;
        // bound on the remaining terms: b_j / (1 - u^2/((2j+2)(2j+3)))
        let ratio = u * u / (f64::from(next + 1) * f64::from(next + 2));
        if ratio < 0.5 {
            let b = single_term_bound(&az, head, next, bits);
            let rem = b * 2u32;
            if rem <= tol {
                break rem;
            }
        }
        if j > 2000 {
            return Err(precision("H tail expansion did not converge"));
        }
        zpow *= &z2;
        zpow /= next - 1;
        zpow /= next;
        zpow /= next - 1;
        zpow /= next;
    };
    let rounding = Float::with_val(bits, Float::i_exp(head as i32, -(bits as i32) + 4));
    let tail_bound = bound + rounding;
    Ok(SeriesValue {
        value: sum + tail,
        tail_bound,
        terms_used: head + j as usize,
        estimated: false,
    })
}

/// `|z|^s / (s! * s * K^s)`, bounding one term of order `s` of the tail expansion.
fn single_term_bound(az: &Float, head: usize, s: u32, bits: u32) -> Float {
    let ratio = Float::with_val(bits, az / head as u32);
    let num = Float::with_val(bits, (&ratio).pow(s));
    let den = Float::with_val(bits, Float::factorial(s)) * s;
    num / den
}

/// Plain partial sum of the first `terms` terms with the bound `|z|/terms`
/// on the remainder (from `|sin(z/k)| <= |z|/k`).
pub fn hardy_littlewood_partial(z: &BigReal, terms: usize, cfg: &PrecisionConfig) -> SeriesValue {
    let bits = cfg.bits();
    let z = Float::with_val(bits, z);
    let mut sum = Float::new(bits);
    for k in (1..=terms as u32).rev() {
        let arg = Float::with_val(bits, &z / k);
        sum += arg.sin() / k;
    }
    let tail_bound = Float::with_val(bits, z.abs_ref()) / terms.max(1) as u32;
    SeriesValue {
        value: sum,
        tail_bound,
        terms_used: terms,
        estimated: false,
    }
}

/// `s(z) = 1/2 + H(z / 2 pi) / pi`.
pub fn s_function(z: &BigReal, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    let bits = cfg.bits();
    let pi = cfg.pi();
    let two_pi = Float::with_val(bits, &pi * 2u32);
    let arg = Float::with_val(bits, z / &two_pi);
    let h = hardy_littlewood_h(&arg, cfg)?;
    let value = Float::with_val(bits, &h.value / &pi) + 0.5f64;
    let tail_bound = h.tail_bound / &pi;
    Ok(SeriesValue {
        value,
        tail_bound,
        terms_used: h.terms_used,
        estimated: h.estimated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::with_digits(30).unwrap()
    }

    #[test]
    fn h_of_zero_is_zero() {
        let c = cfg();
        let h = hardy_littlewood_h(&c.zero(), &c).unwrap();
        assert!(h.value.is_zero());
        assert!(h.tail_bound.is_zero());
    }

    #[test]
    fn small_argument_slope_is_zeta_two() {
        // termwise Taylor: H(z)/z = sum 1/k^2 - z^2 sum 1/(6 k^4) + ...
        let c = cfg();
        let z = c.parse("1e-6").unwrap();
        let h = hardy_littlewood_h(&z, &c).unwrap();
        let slope = Float::with_val(c.bits(), &h.value / &z).to_f64();
        assert!((slope - 1.644_934_066_848_226_4).abs() < 1e-11);
    }

    #[test]
    fn odd_symmetry() {
        let c = cfg();
        for zs in ["0.3", "2", "17.5", "400", "2500"] {
            let z = c.parse(zs).unwrap();
            let a = hardy_littlewood_h(&z, &c).unwrap();
            let b = hardy_littlewood_h(&(-z.clone()), &c).unwrap();
            let sum = Float::with_val(c.bits(), &a.value + &b.value);
            assert!(sum.abs() <= a.tail_bound, "z={zs}");
        }
    }

    #[test]
    fn tail_expansion_agrees_with_long_partial_sum() {
        // partial sum with 10^6 terms carries a |z|/N bound
        let c = cfg();
        for zs in ["1", "37.5"] {
            let z = c.parse(zs).unwrap();
            let fast = hardy_littlewood_h(&z, &c).unwrap();
            let slow = hardy_littlewood_partial(&z, 1_000_000, &c);
            let diff = Float::with_val(c.bits(), &fast.value - &slow.value).abs();
            assert!(diff <= slow.tail_bound, "z={zs}");
        }
    }

    #[test]
    fn partial_sum_tail_bound_is_honest() {
        let c = cfg();
        let z = c.parse("3.5").unwrap();
        let coarse = hardy_littlewood_partial(&z, 2_000, &c);
        let fine = hardy_littlewood_partial(&z, 20_000, &c);
        let diff = Float::with_val(c.bits(), &coarse.value - &fine.value).abs();
        assert!(diff < coarse.tail_bound);
    }

    #[test]
    fn s_at_zero_is_half_and_reflects() {
        let c = cfg();
        let s0 = s_function(&c.zero(), &c).unwrap();
        assert_eq!(s0.value, 0.5);
        for zs in ["0.5", "3", "12"] {
            let z = c.parse(zs).unwrap();
            let a = s_function(&z, &c).unwrap();
            let b = s_function(&(-z.clone()), &c).unwrap();
            let total = Float::with_val(c.bits(), &a.value + &b.value) - 1u32;
            assert!(total.abs() < c.pow10(-25));
        }
    }

    #[test]
    fn s_at_one_against_partial_sum() {
        let c = cfg();
        let one = c.one();
        let s1 = s_function(&one, &c).unwrap();
        let arg = Float::with_val(c.bits(), &one / (c.pi() * 2u32));
        let partial = hardy_littlewood_partial(&arg, 1_000_000, &c);
        let oracle = Float::with_val(c.bits(), &partial.value / c.pi()) + 0.5f64;
        let diff = Float::with_val(c.bits(), &s1.value - &oracle).abs();
        assert!(diff < 1e-7);
        assert!((s1.value.to_f64() - 0.583_102_127_261_069_9).abs() < 1e-15);
    }
}
