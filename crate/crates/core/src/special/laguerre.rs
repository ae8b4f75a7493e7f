use rug::{Assign, Float};

use crate::precision::BigReal;

/// Laguerre polynomial `L_m(x)` by the three-term recurrence, at the
/// precision of `x`.
pub fn laguerre(m: u32, x: &BigReal) -> BigReal {
    laguerre_pair(m, x).0
}

/// `(L_m(x), L_{m-1}(x))`, with `L_{-1} = 0`.
pub fn laguerre_pair(m: u32, x: &BigReal) -> (BigReal, BigReal) {
    laguerre_assoc_pair(m, 0, x)
}

/// Associated Laguerre polynomial `L_m^(alpha)(x)`.
pub fn laguerre_assoc(m: u32, alpha: u32, x: &BigReal) -> BigReal {
    laguerre_assoc_pair(m, alpha, x).0
}

/// `L'_m(x) = -L_{m-1}^(1)(x)`.
pub fn laguerre_derivative(m: u32, x: &BigReal) -> BigReal {
    if m == 0 {
        return Float::new(x.prec());
    }
    -laguerre_assoc(m - 1, 1, x)
}

fn laguerre_assoc_pair(m: u32, alpha: u32, x: &BigReal) -> (BigReal, BigReal) {
    let prec = x.prec();
    let mut prev = Float::new(prec);
    let mut cur = Float::with_val(prec, 1);
    let mut t = Float::new(prec);
    for k in 0..m {
        // (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}
        t.assign(&cur * x);
        t = Float::with_val(prec, &cur * (2 * k + 1 + alpha)) - &t;
        t -= Float::with_val(prec, &prev * (k + alpha));
        t /= k + 1;
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut t);
    }
    (cur, prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionConfig;
    use proptest::prelude::*;

    #[test]
    fn low_orders() {
        let c = PrecisionConfig::default();
        for xs in ["-3", "0", "0.5", "7.25"] {
            let x = c.parse(xs).unwrap();
            assert_eq!(laguerre(0, &x), 1);
            assert_eq!(laguerre(1, &x), Float::with_val(c.bits(), 1 - &x));
            // L_2 = (x^2 - 4x + 2)/2
            let l2 = (Float::with_val(c.bits(), x.square_ref()) - Float::with_val(c.bits(), &x * 4u32) + 2u32) / 2u32;
            assert!(Float::with_val(c.bits(), laguerre(2, &x) - l2).abs() < c.pow10(-60));
        }
    }

    #[test]
    fn derivative_at_zero_is_minus_order() {
        let c = PrecisionConfig::default();
        for m in 0..=10u32 {
            assert_eq!(laguerre_derivative(m + 1, &c.zero()), -(m as i64 + 1));
        }
    }

    #[test]
    fn derivative_matches_difference_identity() {
        // x L'_m(x) = m (L_m(x) - L_{m-1}(x))
        let c = PrecisionConfig::default();
        for m in 1..20u32 {
            let x = c.parse("3.7").unwrap();
            let (lm, lm1) = laguerre_pair(m, &x);
            let lhs = Float::with_val(c.bits(), &x * laguerre_derivative(m, &x));
            let rhs = Float::with_val(c.bits(), lm - lm1) * m;
            assert!(Float::with_val(c.bits(), lhs - rhs).abs() < c.pow10(-55));
        }
    }

    #[test]
    fn value_at_zero_is_binomial() {
        let c = PrecisionConfig::default();
        // L_m^(alpha)(0) = C(m+alpha, m)
        assert_eq!(laguerre_assoc(4, 2, &c.zero()), 15);
        assert_eq!(laguerre(30, &c.zero()), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn bounded_by_half_exponential(m in 0u32..=50, x in 0.001f64..100.0) {
            let c = PrecisionConfig::with_digits(30).unwrap();
            let xv = c.num(x);
            let l = laguerre(m, &xv);
            let bound = Float::with_val(c.bits(), &xv / 2u32).exp();
            prop_assert!(l.abs() <= bound);
        }
    }
}
