use rug::Float;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{domain, Result};
use crate::functions::f_m;
use crate::precision::{factorial, BigReal, PrecisionConfig};
use crate::special::s_function;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: u32,
    /// `f_m(z/m) / m!`.
    pub scaled: Decimal,
    /// `|f_m(z/m)/m! - s(z)|`.
    pub error: Decimal,
}

/// Distance of `f_m(z/m)/m!` from `s(z)` for each `m`.
pub fn convergence_study(z: &BigReal, m_list: &[u32], cfg: &PrecisionConfig) -> Result<Vec<ConvergenceRow>> {
    if !z.is_finite() || *z <= 0 {
        return Err(domain(format!("convergence study requires z > 0, got {}", z.to_f64())));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) || m_list.contains(&0) {
        return Err(domain("m list must be positive and strictly increasing"));
    }
    let bits = cfg.bits();
    let s = s_function(z, cfg)?.value;
    m_list
        .iter()
        .map(|&m| {
            let t = Float::with_val(bits, z / m);
            let v = f_m(m, &t, cfg)?.value / factorial(m, bits);
            let err = Float::with_val(bits, &v - &s).abs();
            Ok(ConvergenceRow {
                m,
                scaled: Decimal::from_float(&v, cfg.digits),
                error: Decimal::from_float(&err, cfg.digits),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_shrinks() {
        let c = PrecisionConfig::with_digits(30).unwrap();
        let rows = convergence_study(&c.num(5), &[10, 20, 40, 60], &c).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[3].error.to_f64() < rows[0].error.to_f64());
        assert!(convergence_study(&c.zero(), &[10], &c).is_err());
        assert!(convergence_study(&c.one(), &[20, 10], &c).is_err());
    }
}
