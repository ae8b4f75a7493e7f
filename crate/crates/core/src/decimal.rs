//! Locale-independent decimal strings carrying full working precision.

use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::precision::{BigReal, PrecisionConfig};

/// A real number stored as its decimal text.
///
/// Serializes as a JSON string so values survive round trips without
/// passing through binary64.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decimal(String);

impl Decimal {
    /// Formats `x` with `digits` significant digits.
    pub fn from_float(x: &BigReal, digits: u32) -> Self {
        Decimal(format_float(x, digits))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Value at the working precision of `cfg`.
    pub fn to_float(&self, cfg: &PrecisionConfig) -> Result<BigReal> {
        cfg.parse(&self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.parse().unwrap_or(f64::NAN)
    }
}

impl FromStr for Decimal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if !is_decimal_literal(t) {
            return Err(Error::Parse(format!("`{s}` is not a decimal number")));
        }
        Ok(Decimal(t.to_string()))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn is_decimal_literal(s: &str) -> bool {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let mantissa = mantissa.strip_prefix(['+', '-']).unwrap_or(mantissa);
    let mut digits = 0;
    let mut dots = 0;
    for c in mantissa.chars() {
        match c {
            '0'..='9' => digits += 1,
            '.' => dots += 1,
            _ => return false,
        }
    }
    if digits == 0 || dots > 1 {
        return false;
    }
    match exponent {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && e.chars().all(|c| c.is_ascii_digit())
        }
    }
}

/// Decimal text of `x` with `digits` significant digits, trailing zeros
/// removed. Positional notation is used for magnitudes in `[1e-6, 1e21)`,
/// scientific otherwise.
pub fn format_float(x: &Float, digits: u32) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.into();
    }
    if x.is_zero() {
        return "0".into();
    }
    let (negative, mut mant, exp) = x.to_sign_string_exp(10, Some(digits.max(1) as usize));
    // value = 0.mant * 10^exp
    let exp = exp.unwrap_or(0);
    while mant.len() > 1 && mant.ends_with('0') {
        mant.pop();
    }
    let sign = if negative { "-" } else { "" };
    let point = exp; // digits before the decimal point
    let body = if (-5..=21).contains(&point) {
        if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), mant)
        } else if point as usize >= mant.len() {
            format!("{}{}", mant, "0".repeat(point as usize - mant.len()))
        } else {
            let (a, b) = mant.split_at(point as usize);
            format!("{a}.{b}")
        }
    } else {
        let (a, b) = mant.split_at(1);
        if b.is_empty() {
            format!("{a}e{}", point - 1)
        } else {
            format!("{a}.{b}e{}", point - 1)
        }
    };
    format!("{sign}{body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_positional_and_scientific() {
        let c = PrecisionConfig::default();
        assert_eq!(format_float(&c.num(0.5), 50), "0.5");
        assert_eq!(format_float(&c.num(-12.25), 50), "-12.25");
        assert_eq!(format_float(&c.num(1000), 50), "1000");
        assert_eq!(format_float(&c.zero(), 50), "0");
        assert_eq!(format_float(&c.pow10(-30), 50), "1e-30");
        assert_eq!(format_float(&c.pow10(-3), 10), "0.001");
        assert!(format_float(&c.pi(), 20).starts_with("3.141592653589793238"));
    }

    #[test]
    fn text_reparses_to_same_value() {
        let c = PrecisionConfig::default();
        let x = c.pi() / 7u32;
        let d = Decimal::from_float(&x, c.digits);
        let y = d.to_float(&c).unwrap();
        let rel = Float::with_val(c.bits(), &x - &y).abs() / &x;
        assert!(rel < c.pow10(-(c.digits as i32) + 1));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1.2.3", "1e", "--1", "nan", "0x10"] {
            assert!(bad.parse::<Decimal>().is_err(), "{bad}");
        }
        for good in ["1", "-0.25", "+3", ".5", "5.", "1e-10", "2E+3"] {
            assert!(good.parse::<Decimal>().is_ok(), "{good}");
        }
    }

    #[test]
    fn json_round_trip() {
        let d: Decimal = "-1.5e-40".parse().unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, "\"-1.5e-40\"");
        let back: Decimal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
