use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::precision::{BigReal, PrecisionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Sample points on `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: Decimal,
    pub x_max: Decimal,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    /// 200 logarithmically spaced points on `[1e-2, 1e3]`.
    fn default() -> Self {
        GridSpec::log("0.01", "1000", 200).expect("valid default grid")
    }
}

impl GridSpec {
    pub fn new(x_min: &str, x_max: &str, count: usize, spacing: Spacing) -> Result<Self> {
        let g = GridSpec {
            x_min: x_min.parse()?,
            x_max: x_max.parse()?,
            count,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn log(x_min: &str, x_max: &str, count: usize) -> Result<Self> {
        Self::new(x_min, x_max, count, Spacing::Logarithmic)
    }

    pub fn linear(x_min: &str, x_max: &str, count: usize) -> Result<Self> {
        Self::new(x_min, x_max, count, Spacing::Linear)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.x_min.to_f64(), self.x_max.to_f64());
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if self.spacing == Spacing::Logarithmic && a <= 0.0 {
            return Err(Error::Config(format!("logarithmic grid needs x_min > 0, got {a}")));
        }
        if b <= a {
            return Err(Error::Config(format!("grid needs x_max > x_min, got [{a}, {b}]")));
        }
        if self.count < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {}", self.count)));
        }
        Ok(())
    }

    /// Strictly increasing points; the endpoints are exactly the parsed
    /// bounds.
    pub fn points(&self, cfg: &PrecisionConfig) -> Result<Vec<BigReal>> {
        self.validate()?;
        let a = self.x_min.to_float(cfg)?;
        let b = self.x_max.to_float(cfg)?;
        let steps = (self.count - 1) as u32;
        let mut out = Vec::with_capacity(self.count);
        match self.spacing {
            Spacing::Linear => {
                let h = (cfg.coerce(&b) - &a) / steps;
                for i in 0..steps {
                    out.push(cfg.coerce(&h) * i + &a);
                }
            }
            Spacing::Logarithmic => {
                let la = cfg.coerce(&a).ln();
                let lb = cfg.coerce(&b).ln();
                let h = (lb - &la) / steps;
                for i in 0..steps {
                    out.push((cfg.coerce(&h) * i + &la).exp());
                }
            }
        }
        out[0] = a;
        out.push(b);
        Ok(out)
    }
}
