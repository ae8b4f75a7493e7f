//! Gauss-Legendre quadrature at working precision, with adaptive bisection.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::precision::{BigReal, PrecisionConfig};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

type RuleCache = Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>>;
static RULES: OnceLock<RuleCache> = OnceLock::new();

impl GaussLegendre {
    /// Rule with `order` points at `bits` binary digits; cached.
    pub fn get(order: usize, bits: u32) -> Arc<GaussLegendre> {
        let cache = RULES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(
            map.entry((order, bits))
                .or_insert_with(|| Arc::new(Self::compute(order, bits))),
        )
    }

    fn compute(order: usize, bits: u32) -> GaussLegendre {
        assert!(order >= 2);
        let n = order as u32;
        let work = bits + 32;
        let eps = Float::with_val(work, Float::i_exp(1, -(bits as i32) - 8));
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 0..order.div_ceil(2) {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut x = Float::with_val(work, guess);
            let mut deriv = Float::new(work);
            for _ in 0..100 {
                let (p, pm1) = legendre_pair(n, &x);
                // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
                let x2m1 = Float::with_val(work, x.square_ref()) - 1u32;
                deriv = (Float::with_val(work, &x * &p) - pm1) * n / x2m1;
                let dx = Float::with_val(work, &p / &deriv);
                x -= &dx;
                if dx.abs() < eps {
                    break;
                }
            }
            let (p, pm1) = legendre_pair(n, &x);
            let x2m1 = Float::with_val(work, x.square_ref()) - 1u32;
            deriv.assign((Float::with_val(work, &x * &p) - pm1) * n / x2m1);
            let one_minus = 1 - Float::with_val(work, x.square_ref());
            let w = Float::with_val(work, 2u32) / (one_minus * Float::with_val(work, deriv.square_ref()));
            nodes.push(Float::with_val(bits, &x));
            weights.push(Float::with_val(bits, &w));
        }
        // mirror the positive half
        let half = nodes.len();
        let mut all_nodes = Vec::with_capacity(order);
        let mut all_weights = Vec::with_capacity(order);
        for i in 0..half {
            all_nodes.push(nodes[i].clone());
            all_weights.push(weights[i].clone());
        }
        let skip_middle = order % 2 == 1;
        for i in (0..half).rev() {
            if skip_middle && i == half - 1 {
                continue;
            }
            all_nodes.push(-nodes[i].clone());
            all_weights.push(weights[i].clone());
        }
        GaussLegendre {
            nodes: all_nodes,
            weights: all_weights,
        }
    }

    /// Matrix `W` with `W[i][j] = int_{-1}^{x_i} l_j(s) ds`, where `l_j` is
    /// the Lagrange basis on the nodes. Applied to samples of `f` at the
    /// nodes it yields the running integral of the interpolant.
    pub fn integration_matrix(&self) -> Vec<Vec<Float>> {
        let n = self.nodes.len();
        let bits = self.nodes[0].prec();
        let minus_one = Float::with_val(bits, -1);
        let mut w = vec![vec![Float::new(bits); n]; n];
        for (i, row) in w.iter_mut().enumerate() {
            let pts = self.mapped_nodes(&minus_one, &self.nodes[i]);
            let wts = self.mapped_weights(&minus_one, &self.nodes[i]);
            for (j, cell) in row.iter_mut().enumerate() {
                for (s, ws) in pts.iter().zip(&wts) {
                    let mut l = Float::with_val(bits, 1);
                    for (k, xk) in self.nodes.iter().enumerate() {
                        if k != j {
                            l *= Float::with_val(bits, s - xk) / Float::with_val(bits, &self.nodes[j] - xk);
                        }
                    }
                    *cell += l * ws;
                }
            }
        }
        w
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Points `a + (b-a)(1+x_i)/2` of this rule mapped onto `[a, b]`.
    pub fn mapped_nodes(&self, a: &Float, b: &Float) -> Vec<Float> {
        let bits = a.prec().max(b.prec());
        let half = Float::with_val(bits, b - a) / 2u32;
        let mid = Float::with_val(bits, a + b) / 2u32;
        self.nodes
            .iter()
            .map(|x| Float::with_val(bits, &half * x) + &mid)
            .collect()
    }

    /// Weights scaled to `[a, b]`, aligned with [`Self::mapped_nodes`].
    pub fn mapped_weights(&self, a: &Float, b: &Float) -> Vec<Float> {
        let bits = a.prec().max(b.prec());
        let half = Float::with_val(bits, b - a) / 2u32;
        self.weights.iter().map(|w| Float::with_val(bits, &half * w)).collect()
    }

    /// One panel `int_a^b f`.
    pub fn panel<F>(&self, a: &Float, b: &Float, f: &mut F) -> Result<Float>
    where
        F: FnMut(&Float) -> Result<Float>,
    {
        let bits = a.prec().max(b.prec());
        let mut acc = Float::new(bits);
        for (x, w) in self.mapped_nodes(a, b).iter().zip(self.mapped_weights(a, b)) {
            acc += f(x)? * w;
        }
        Ok(acc)
    }
}

fn legendre_pair(n: u32, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut prev = Float::with_val(prec, 1);
    let mut cur = x.clone();
    if n == 0 {
        return (prev, Float::new(prec));
    }
    for k in 1..n {
        let next = (Float::with_val(prec, &cur * x) * (2 * k + 1) - Float::with_val(prec, &prev * k)) / (k + 1);
        prev = std::mem::replace(&mut cur, next);
    }
    (cur, prev)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: BigReal,
    /// Sum of the panel-wise differences between one rule and its bisection.
    pub err: BigReal,
    pub panels: usize,
}

/// Gauss-Legendre order used at a given precision.
pub fn default_order(cfg: &PrecisionConfig) -> usize {
    (cfg.digits / 3 + 10) as usize
}

const MAX_PANELS: usize = 20_000;

/// Adaptive `int_a^b f` to absolute accuracy `abs_tol`.
///
/// Each panel is integrated once whole and once as two halves; the halves
/// are accepted when the two estimates differ by less than the panel's share
/// of the tolerance.
pub fn integrate<F>(mut f: F, a: &BigReal, b: &BigReal, abs_tol: &BigReal, cfg: &PrecisionConfig) -> Result<QuadResult>
where
    F: FnMut(&Float) -> Result<Float>,
{
    let bits = cfg.bits();
    let rule = GaussLegendre::get(default_order(cfg), bits);
    let a = Float::with_val(bits, a);
    let b = Float::with_val(bits, b);
    if a == b {
        return Ok(QuadResult {
            value: Float::new(bits),
            err: Float::new(bits),
            panels: 0,
        });
    }
    let width = Float::with_val(bits, &b - &a).abs();
    let mut value = Float::new(bits);
    let mut err = Float::new(bits);
    let mut panels = 0usize;
    let whole = rule.panel(&a, &b, &mut f)?;
    // explicit stack keeps the accumulation order deterministic
    let mut stack = vec![(a, b, whole)];
    while let Some((lo, hi, est)) = stack.pop() {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let left = rule.panel(&lo, &mid, &mut f)?;
        let right = rule.panel(&mid, &hi, &mut f)?;
        let refined = Float::with_val(bits, &left + &right);
        let diff = Float::with_val(bits, &refined - &est).abs();
        let share = Float::with_val(bits, &hi - &lo).abs() / &width * abs_tol;
        if diff <= share {
            value += refined;
            err += diff;
            panels += 1;
        } else {
            if panels + stack.len() > MAX_PANELS {
                return Err(Error::Quadrature(format!(
                    "more than {MAX_PANELS} panels needed on [{}, {}]",
                    lo.to_f64(),
                    hi.to_f64()
                )));
            }
            stack.push((mid.clone(), hi, right));
            stack.push((lo, mid, left));
        }
    }
    Ok(QuadResult { value, err, panels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let c = PrecisionConfig::default();
        let rule = GaussLegendre::get(10, c.bits());
        let mut f = |x: &Float| Ok(Float::with_val(c.bits(), x.square_ref()).square() * x + 3u32);
        let a = c.num(-1);
        let b = c.num(2);
        // int_{-1}^{2} x^5 + 3 dx = (64 - 1)/6 + 9
        let v = rule.panel(&a, &b, &mut f).unwrap();
        let exact = c.ratio(63, 6) + 9u32;
        assert!(Float::with_val(c.bits(), v - exact).abs() < c.pow10(-60));
    }

    #[test]
    fn weights_sum_to_two() {
        let c = PrecisionConfig::default();
        for order in [5, 26, 43] {
            let rule = GaussLegendre::get(order, c.bits());
            assert_eq!(rule.order(), order);
            let s = rule.weights.iter().fold(c.zero(), |acc, w| acc + w);
            assert!(Float::with_val(c.bits(), s - 2u32).abs() < c.pow10(-60));
        }
    }

    #[test]
    fn integration_matrix_gives_running_integral() {
        let c = PrecisionConfig::with_digits(30).unwrap();
        let rule = GaussLegendre::get(12, c.bits());
        let w = rule.integration_matrix();
        // int_{-1}^{x} 3 s^2 ds = x^3 + 1
        for (i, x) in rule.nodes.iter().enumerate() {
            let mut v = c.zero();
            for (j, s) in rule.nodes.iter().enumerate() {
                v += Float::with_val(c.bits(), s.square_ref()) * 3u32 * &w[i][j];
            }
            let exact = Float::with_val(c.bits(), x * x) * x + 1u32;
            assert!(Float::with_val(c.bits(), v - exact).abs() < c.pow10(-30));
        }
    }

    #[test]
    fn adaptive_exponential_integral() {
        let c = PrecisionConfig::default();
        let bits = c.bits();
        let r = integrate(
            |t| Ok(Float::with_val(bits, -t).exp()),
            &c.zero(),
            &c.num(30),
            &c.tol(),
            &c,
        )
        .unwrap();
        let exact = 1 - Float::with_val(bits, -30).exp();
        assert!(Float::with_val(bits, &r.value - &exact).abs() < c.tol());
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let c = PrecisionConfig::with_digits(30).unwrap();
        let bits = c.bits();
        // int_0^1 1/(1e-4 + x^2) dx = 100 atan(100)
        let eps = c.pow10(-4);
        let r = integrate(
            |x| Ok((Float::with_val(bits, x.square_ref()) + &eps).recip()),
            &c.zero(),
            &c.one(),
            &c.tol(),
            &c,
        )
        .unwrap();
        let exact = Float::with_val(bits, 100).atan() * 100u32;
        assert!(Float::with_val(bits, &r.value - &exact).abs() < c.pow10(-20));
        assert!(r.panels > 1);
    }
}
