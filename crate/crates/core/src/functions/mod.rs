//! The function catalog: `Phi` and its scaled derivatives, `f_m` and its
//! Laplace kernels, `theta_1` and `f_alpha`, and the q-analogs.

mod fm;
mod kernels;
mod laplace;
mod phi;
mod qanalog;
mod theta1;

use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{domain, Result};
use crate::precision::{alt, BigReal, PrecisionConfig};
use crate::special::{hardy_littlewood_h, s_function};

pub use fm::{
    f_m, f_m_laguerre, f_m_prime, f_m_prime_laguerre, f_m_taylor, g_m_kernel, theta_m, theta_m_closed,
    theta_m_samples, KernelSample,
};
pub use kernels::{
    elementary_inequality, kernel_k1, kernel_k2, kernel_k2_inner, kernel_k3, kernel_k3_claimed_derivative,
    kernel_k3_derivative, phi_n_derivs, kernel_identity_residual,
};
pub use laplace::{f_m_from_s_kernel, laplace_g_m, laplace_theta_m, LaplaceValue};
pub use phi::{phi, phi_derivative, phi_scaled, phi_scaled_derivs};
pub use qanalog::{phi_q, phi_q_derivs, phi_q_direct, phi_q_inv, phi_q_series, theta_q, theta_q_atoms};
pub use theta1::{f_alpha, f_alpha_log, f_alpha_log_derivs, g_n_aux, h_kernel, theta1, theta1_derivs};

/// Same policy as `cfg` with `extra` more decimal digits.
pub fn boosted(cfg: &PrecisionConfig, extra: u32) -> PrecisionConfig {
    cfg.at_digits(cfg.digits + extra)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `(-1)^m x^alpha Phi^(m)(x)`.
    PhiScaled,
    /// `(-1)^n Phi_q^(n)(x)`, `0 < q < 1`, with `n = n_aux`.
    PhiQ,
    /// `Phi_{1/q}(x)`, `q > 1`.
    PhiQInv,
    /// `(-1)^n phi_alpha^(n)(x)` with `n = n_aux`.
    FAlphaLog,
    Fm,
    Gm,
    ThetaM,
    Theta1,
    GnAux,
    KernelK1,
    KernelK2,
    KernelK3,
    #[serde(rename = "H")]
    HLH,
    #[serde(rename = "s")]
    SFun,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::PhiScaled,
        Family::PhiQ,
        Family::PhiQInv,
        Family::FAlphaLog,
        Family::Fm,
        Family::Gm,
        Family::ThetaM,
        Family::Theta1,
        Family::GnAux,
        Family::KernelK1,
        Family::KernelK2,
        Family::KernelK3,
        Family::HLH,
        Family::SFun,
    ];

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Family::PhiScaled => "phi-scaled",
            Family::PhiQ => "phi-q",
            Family::PhiQInv => "phi-q-inv",
            Family::FAlphaLog => "f-alpha",
            Family::Fm => "f-m",
            Family::Gm => "g-m",
            Family::ThetaM => "theta-m",
            Family::Theta1 => "theta1",
            Family::GnAux => "g-n",
            Family::KernelK1 => "k1",
            Family::KernelK2 => "k2",
            Family::KernelK3 => "k3",
            Family::HLH => "H",
            Family::SFun => "s",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    fn uses_m(self) -> bool {
        matches!(self, Family::PhiScaled | Family::Fm | Family::Gm | Family::ThetaM)
    }

    fn uses_alpha(self) -> bool {
        matches!(self, Family::PhiScaled | Family::FAlphaLog)
    }

    fn uses_q(self) -> bool {
        matches!(self, Family::PhiQ | Family::PhiQInv)
    }

    fn uses_n(self) -> bool {
        matches!(self, Family::PhiQ | Family::FAlphaLog | Family::GnAux)
    }

    /// Whether zero is an admissible argument.
    pub fn allows_zero(self) -> bool {
        matches!(
            self,
            Family::KernelK1 | Family::KernelK2 | Family::KernelK3 | Family::HLH | Family::SFun
        )
    }

    /// Whether negative arguments are admissible.
    pub fn allows_negative(self) -> bool {
        matches!(self, Family::HLH | Family::SFun)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A catalog entry together with its parameters. Parameters a family does
/// not use are dropped by [`FunctionId::new`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionId {
    pub family: Family,
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<Decimal>,
    pub n_aux: u32,
}

impl FunctionId {
    /// Validated entry; unused parameters are cleared and a missing `alpha`
    /// defaults to 0.
    pub fn new(family: Family, m: u32, alpha: Option<Decimal>, q: Option<Decimal>, n_aux: u32) -> Result<Self> {
        let id = FunctionId {
            family,
            m: if family.uses_m() { m } else { 0 },
            alpha: if family.uses_alpha() {
                Some(alpha.unwrap_or_else(|| "0".parse().expect("literal")))
            } else {
                None
            },
            q: if family.uses_q() { q } else { None },
            n_aux: if family.uses_n() { n_aux } else { 0 },
        };
        id.validate()?;
        Ok(id)
    }

    pub fn phi_scaled(m: u32, alpha: &str) -> Result<Self> {
        Self::new(Family::PhiScaled, m, Some(alpha.parse()?), None, 0)
    }

    pub fn phi_q(q: &str) -> Result<Self> {
        Self::new(Family::PhiQ, 0, None, Some(q.parse()?), 0)
    }

    pub fn f_alpha(alpha: &str) -> Result<Self> {
        Self::new(Family::FAlphaLog, 0, Some(alpha.parse()?), None, 0)
    }

    pub fn simple(family: Family) -> Result<Self> {
        Self::new(family, 0, None, None, 0)
    }

    pub fn with_m(family: Family, m: u32) -> Result<Self> {
        Self::new(family, m, None, None, 0)
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::PhiQ | Family::PhiQInv => {
                let q = self
                    .q
                    .as_ref()
                    .ok_or_else(|| domain(format!("{} requires --q", self.family)))?
                    .to_f64();
                if self.family == Family::PhiQ && !(q > 0.0 && q < 1.0) {
                    return Err(domain(format!("phi-q requires 0 < q < 1, got {q}")));
                }
                if self.family == Family::PhiQInv && !(q > 1.0 && q.is_finite()) {
                    return Err(domain(format!("phi-q-inv requires q > 1, got {q}")));
                }
            }
            Family::Gm | Family::ThetaM if self.m == 0 => {
                return Err(domain(format!("{} requires m >= 1", self.family)));
            }
            Family::GnAux if self.n_aux == 0 => {
                return Err(domain("g-n requires n >= 1"));
            }
            _ => {}
        }
        Ok(())
    }

    fn alpha_value(&self, cfg: &PrecisionConfig) -> Result<BigReal> {
        match &self.alpha {
            Some(a) => a.to_float(cfg),
            None => Ok(cfg.zero()),
        }
    }

    fn q_value(&self, cfg: &PrecisionConfig) -> Result<BigReal> {
        match &self.q {
            Some(q) => q.to_float(cfg),
            None => Err(domain(format!("{} requires --q", self.family))),
        }
    }

    /// Checks that `x` lies in the family's domain.
    pub fn check_arg(&self, x: &BigReal) -> Result<()> {
        if !x.is_finite() {
            return Err(domain("argument must be finite"));
        }
        if *x < 0 && !self.family.allows_negative() {
            return Err(domain(format!("{} requires a nonnegative argument", self.family)));
        }
        if x.is_zero() && !self.family.allows_zero() {
            return Err(domain(format!("{} requires a positive argument", self.family)));
        }
        Ok(())
    }

    /// Value at `x` together with a bound on its truncation error (zero for
    /// closed forms).
    pub fn eval_with_bound(&self, x: &BigReal, cfg: &PrecisionConfig) -> Result<(BigReal, BigReal)> {
        self.check_arg(x)?;
        let exact = |v: BigReal| Ok((v, cfg.zero()));
        match self.family {
            Family::PhiScaled => exact(phi_scaled(self.m, &self.alpha_value(cfg)?, x, cfg)?),
            Family::PhiQ => {
                let mut s = phi_q_series(&self.q_value(cfg)?, x, self.n_aux, self.n_aux, cfg)?;
                let s = s.pop().expect("one order");
                Ok((s.value, s.tail_bound))
            }
            Family::PhiQInv => {
                let inv = Float::with_val(cfg.bits(), self.q_value(cfg)?.recip_ref());
                let mut s = phi_q_series(&inv, x, 0, 0, cfg)?;
                let s = s.pop().expect("one order");
                Ok((s.value, s.tail_bound))
            }
            Family::FAlphaLog => exact(f_alpha_log(&self.alpha_value(cfg)?, self.n_aux, x, cfg)?),
            Family::Fm => {
                let s = f_m(self.m, x, cfg)?;
                Ok((s.value, s.tail_bound))
            }
            Family::Gm => {
                let s = g_m_kernel(self.m, x, cfg)?;
                Ok((s.value, s.tail_bound))
            }
            Family::ThetaM => {
                let s = theta_m(self.m, x, cfg)?;
                Ok((s.value, s.tail_bound))
            }
            Family::Theta1 => exact(theta1(x, cfg)?),
            Family::GnAux => exact(g_n_aux(self.n_aux, x, cfg)?),
            Family::KernelK1 => exact(kernel_k1(x, cfg)?),
            Family::KernelK2 => exact(kernel_k2(x, cfg)?),
            Family::KernelK3 => exact(kernel_k3(x, cfg)?),
            Family::HLH => {
                let s = hardy_littlewood_h(x, cfg)?;
                Ok((s.value, s.tail_bound))
            }
            Family::SFun => {
                let s = s_function(x, cfg)?;
                Ok((s.value, s.tail_bound))
            }
        }
    }

    pub fn eval(&self, x: &BigReal, cfg: &PrecisionConfig) -> Result<BigReal> {
        Ok(self.eval_with_bound(x, cfg)?.0)
    }

    /// Whether [`Self::closed_form_derivs`] is available.
    pub fn has_closed_form_derivs(&self) -> bool {
        matches!(
            self.family,
            Family::PhiScaled | Family::PhiQ | Family::PhiQInv | Family::FAlphaLog | Family::Theta1
        )
    }

    /// `(-1)^n f^(n)(x)` for `n = 0..=n_max` from closed forms, or `None`
    /// when the family has none.
    pub fn closed_form_derivs(&self, x: &BigReal, n_max: u32, cfg: &PrecisionConfig) -> Option<Result<Vec<BigReal>>> {
        if !self.has_closed_form_derivs() {
            return None;
        }
        Some(self.check_arg(x).and_then(|_| self.closed_form_derivs_unchecked(x, n_max, cfg)))
    }

    fn closed_form_derivs_unchecked(&self, x: &BigReal, n_max: u32, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
        match self.family {
            Family::PhiScaled => phi_scaled_derivs(self.m, &self.alpha_value(cfg)?, x, n_max, cfg),
            Family::PhiQ => phi_q_derivs(&self.q_value(cfg)?, x, self.n_aux, self.n_aux + n_max, cfg),
            Family::PhiQInv => {
                let inv = Float::with_val(cfg.bits(), self.q_value(cfg)?.recip_ref());
                phi_q_derivs(&inv, x, 0, n_max, cfg)
            }
            Family::FAlphaLog => {
                let v = f_alpha_log_derivs(&self.alpha_value(cfg)?, x, self.n_aux + n_max, cfg)?;
                Ok(v.into_iter().skip(self.n_aux as usize).collect())
            }
            Family::Theta1 => Ok(theta1_derivs(x, n_max, cfg)?
                .into_iter()
                .enumerate()
                .map(|(k, v)| v * alt(k as u32))
                .collect()),
            _ => unreachable!("checked by has_closed_form_derivs"),
        }
    }

    /// Human-readable label, e.g. `phi-scaled(m=2,alpha=0)`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.family.uses_m() {
            parts.push(format!("m={}", self.m));
        }
        if let Some(a) = &self.alpha {
            parts.push(format!("alpha={a}"));
        }
        if let Some(q) = &self.q {
            parts.push(format!("q={q}"));
        }
        if self.family.uses_n() {
            parts.push(format!("n={}", self.n_aux));
        }
        if parts.is_empty() {
            self.family.name().to_string()
        } else {
            format!("{}({})", self.family.name(), parts.join(","))
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::from_name(f.name()), Some(f));
        }
        assert_eq!(Family::from_name("nope"), None);
    }

    #[test]
    fn unused_parameters_are_dropped() {
        let id = FunctionId::new(Family::Theta1, 3, Some("1".parse().unwrap()), Some("0.5".parse().unwrap()), 2).unwrap();
        assert_eq!(id.m, 0);
        assert!(id.alpha.is_none() && id.q.is_none());
        assert_eq!(id.n_aux, 0);
        assert_eq!(id.label(), "theta1");
    }

    #[test]
    fn parameter_validation() {
        assert!(FunctionId::phi_q("1.5").is_err());
        assert!(FunctionId::new(Family::PhiQInv, 0, None, Some("0.5".parse().unwrap()), 0).is_err());
        assert!(FunctionId::new(Family::PhiQ, 0, None, None, 0).is_err());
        assert!(FunctionId::with_m(Family::Gm, 0).is_err());
        assert!(FunctionId::simple(Family::GnAux).is_err());
        assert!(FunctionId::new(Family::GnAux, 0, None, None, 2).is_ok());
    }

    #[test]
    fn eval_dispatch() {
        let c = PrecisionConfig::default();
        let one = c.one();
        let phi_id = FunctionId::phi_scaled(0, "0").unwrap();
        assert!((phi_id.eval(&one, &c).unwrap().to_f64() - 0.6449340668482264).abs() < 1e-15);
        let t1 = FunctionId::simple(Family::Theta1).unwrap();
        assert!((t1.eval(&one, &c).unwrap().to_f64() - 0.5772156649015329).abs() < 1e-15);
        let s = FunctionId::simple(Family::SFun).unwrap();
        assert_eq!(s.eval(&c.zero(), &c).unwrap().to_f64(), 0.5);
        assert!(phi_id.eval(&c.zero(), &c).is_err());
        assert!(FunctionId::simple(Family::KernelK1).unwrap().eval(&c.num(-1), &c).is_err());
    }

    #[test]
    fn closed_form_orders_line_up() {
        let c = PrecisionConfig::default();
        let x = c.num(1.7);
        let base = FunctionId::new(Family::FAlphaLog, 0, Some("0.1".parse().unwrap()), None, 0).unwrap();
        let shifted = FunctionId::new(Family::FAlphaLog, 0, Some("0.1".parse().unwrap()), None, 2).unwrap();
        let a = base.closed_form_derivs(&x, 4, &c).unwrap().unwrap();
        let b = shifted.closed_form_derivs(&x, 2, &c).unwrap().unwrap();
        assert_eq!(a[2..], b[..]);
        assert_eq!(shifted.eval(&x, &c).unwrap(), b[0]);
        assert!(FunctionId::with_m(Family::Fm, 2).unwrap().closed_form_derivs(&x, 2, &c).is_none());
    }

    #[test]
    fn serde_round_trip() {
        let id = FunctionId::phi_q("0.5").unwrap();
        let s = serde_json::to_string(&id).unwrap();
        let back: FunctionId = serde_json::from_str(&s).unwrap();
        assert_eq!(back, id);
        assert!(s.contains("\"phi-q\""));
    }
}
