//! Working-precision plumbing shared by every evaluator.

use std::fmt;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real number carried at the working precision of the current computation.
pub type BigReal = Float;

/// Extra binary digits carried beyond the requested decimal precision.
pub const GUARD_BITS: u32 = 64;

pub const MIN_DIGITS: u32 = 30;
pub const MAX_DIGITS: u32 = 300;
pub const DEFAULT_DIGITS: u32 = 50;
pub const MIN_MAX_TERMS: usize = 100;
pub const DEFAULT_MAX_TERMS: usize = 5_000_000;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision and series truncation policy.
///
/// `series_tol` is the target truncation error of every infinite series. For
/// series whose terms share one sign it is applied relative to the partial
/// sum; otherwise it is an absolute bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub digits: u32,
    pub series_tol: f64,
    pub max_terms: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self::with_digits(DEFAULT_DIGITS).expect("default precision is valid")
    }
}

impl PrecisionConfig {
    /// Configuration with `digits` decimal digits and a series tolerance of
    /// `10^(5 - digits)`.
    pub fn with_digits(digits: u32) -> Result<Self> {
        Self::new(digits, 10f64.powi(5 - digits as i32), DEFAULT_MAX_TERMS)
    }

    pub fn new(digits: u32, series_tol: f64, max_terms: usize) -> Result<Self> {
        let cfg = PrecisionConfig {
            digits,
            series_tol,
            max_terms,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_DIGITS..=MAX_DIGITS).contains(&self.digits) {
            return Err(Error::Config(format!(
                "digits must lie in [{MIN_DIGITS}, {MAX_DIGITS}], got {}",
                self.digits
            )));
        }
        if !(self.series_tol > 0.0 && self.series_tol.is_finite()) {
            return Err(Error::Config(format!(
                "series_tol must be positive, got {}",
                self.series_tol
            )));
        }
        if self.max_terms < MIN_MAX_TERMS {
            return Err(Error::Config(format!(
                "max_terms must be at least {MIN_MAX_TERMS}, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }

    /// Same tolerance policy at a different number of digits.
    pub fn at_digits(&self, digits: u32) -> Self {
        let digits = digits.clamp(MIN_DIGITS, MAX_DIGITS);
        PrecisionConfig {
            digits,
            series_tol: 10f64.powi(5 - digits as i32),
            max_terms: self.max_terms,
        }
    }

    /// Binary precision used for arithmetic.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// Unit roundoff of the working precision, `2^(1 - bits)`.
    pub fn epsilon(&self) -> BigReal {
        let bits = self.bits();
        Float::with_val(bits, Float::i_exp(1, 1 - bits as i32))
    }

    pub fn tol(&self) -> BigReal {
        self.num(self.series_tol)
    }

    pub fn num<T>(&self, v: T) -> BigReal
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }

    pub fn zero(&self) -> BigReal {
        Float::new(self.bits())
    }

    pub fn one(&self) -> BigReal {
        self.num(1)
    }

    /// Rational number `p / q` at working precision.
    pub fn ratio(&self, p: i64, q: i64) -> BigReal {
        let mut r = self.num(p);
        r /= q;
        r
    }

    pub fn pi(&self) -> BigReal {
        self.num(rug::float::Constant::Pi)
    }

    pub fn euler_gamma(&self) -> BigReal {
        self.num(rug::float::Constant::Euler)
    }

    /// `10^e` at working precision.
    pub fn pow10(&self, e: i32) -> BigReal {
        let ten = self.num(10);
        ten.pow(e)
    }

    /// Parses a decimal literal at working precision.
    pub fn parse(&self, s: &str) -> Result<BigReal> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::Parse(format!("`{s}` is not a decimal number: {e}")))?;
        let v = Float::with_val_round(self.bits(), parsed, Round::Nearest).0;
        if !v.is_finite() {
            return Err(Error::Parse(format!("`{s}` is not finite")));
        }
        Ok(v)
    }

    /// Re-rounds `x` to working precision.
    pub fn coerce(&self, x: &BigReal) -> BigReal {
        Float::with_val(self.bits(), x)
    }
}

impl fmt::Display for PrecisionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={} tol={:e} max_terms={}",
            self.digits, self.series_tol, self.max_terms
        )
    }
}

/// Value of a truncated series together with a bound on what was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub value: BigReal,
    /// Bound on the truncation error. Certified unless `estimated` is set.
    pub tail_bound: BigReal,
    pub terms_used: usize,
    pub estimated: bool,
}

impl SeriesValue {
    pub fn exact(value: BigReal) -> Self {
        let tail_bound = Float::new(value.prec());
        SeriesValue {
            value,
            tail_bound,
            terms_used: 0,
            estimated: false,
        }
    }

    /// True when the sign of `value` is not in doubt.
    pub fn sign_certain(&self) -> bool {
        self.value.clone().abs() > self.tail_bound
    }
}

/// Factorial `n!` as a float at precision `bits`.
pub fn factorial(n: u32, bits: u32) -> BigReal {
    Float::with_val(bits, Float::factorial(n))
}

/// Binomial coefficient as `f64`-exact integer when small, else float.
pub fn binomial(n: u32, k: u32, bits: u32) -> BigReal {
    Float::with_val(bits, rug::Integer::from(n).binomial(k))
}

/// Falling factorial `a (a-1) ... (a-j+1)` for real `a`.
pub fn falling(a: &BigReal, j: u32) -> BigReal {
    let mut acc = Float::with_val(a.prec(), 1);
    for i in 0..j {
        acc *= Float::with_val(a.prec(), a - i);
    }
    acc
}

/// `(-1)^n` as a sign multiplier.
pub fn alt(n: u32) -> i32 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_fifty_digits() {
        let cfg = PrecisionConfig::default();
        assert_eq!(cfg.digits, 50);
        assert!(cfg.bits() >= 167 + GUARD_BITS);
        assert!((cfg.series_tol - 1e-45).abs() < 1e-55);
    }

    #[test]
    fn rejects_low_precision_and_tiny_term_budget() {
        assert!(PrecisionConfig::with_digits(29).is_err());
        assert!(PrecisionConfig::new(40, 1e-30, 99).is_err());
        assert!(PrecisionConfig::new(40, 0.0, 1000).is_err());
    }

    #[test]
    fn epsilon_meets_rounding_invariant() {
        // relative rounding error per operation must not exceed 10^(1-P)
        let cfg = PrecisionConfig::default();
        assert!(cfg.epsilon() < cfg.pow10(1 - cfg.digits as i32));
    }

    #[test]
    fn parse_accepts_decimals_and_rejects_garbage() {
        let cfg = PrecisionConfig::default();
        assert_eq!(cfg.parse("-0.25").unwrap(), cfg.ratio(-1, 4));
        assert!(cfg.parse("abc").is_err());
        assert!(cfg.parse("").is_err());
    }

    #[test]
    fn falling_factorial_of_integer() {
        let a = Float::with_val(100, 5);
        assert_eq!(falling(&a, 3), 60);
        assert_eq!(falling(&a, 0), 1);
        assert_eq!(falling(&a, 6), 0);
    }
}
