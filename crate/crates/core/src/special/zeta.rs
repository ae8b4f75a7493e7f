use rug::ops::Pow;
use rug::Float;

use crate::bernoulli::even_bernoulli_floats;
use crate::error::{domain, precision, Result};
use crate::precision::{BigReal, PrecisionConfig};

/// Riemann zeta at an integer `s >= 2`.
///
/// Direct summation of the first `N - 1` terms; the remainder `zeta(s, N)` is
/// taken from its Euler-Maclaurin expansion, summed until the next correction
/// drops below working epsilon.
pub fn zeta(s: u32, cfg: &PrecisionConfig) -> Result<BigReal> {
    if s < 2 {
        return Err(domain(format!("zeta requires an integer s >= 2, got {s}")));
    }
    let bits = cfg.bits();
    let n = cfg.digits / 2 + 10;
    let mut head = Float::new(bits);
    for k in (1..n).rev() {
        head += Float::with_val(bits, k).pow(s as i32).recip();
    }
    let nf = Float::with_val(bits, n);
    let inv_n = Float::with_val(bits, nf.recip_ref());
    let inv_n2 = Float::with_val(bits, inv_n.square_ref());
    let n_pow_s = Float::with_val(bits, (&inv_n).pow(s));
    // N^(1-s)/(s-1) + N^(-s)/2
    let mut tail = Float::with_val(bits, &n_pow_s * &nf) / (s - 1);
    tail += Float::with_val(bits, &n_pow_s / 2u32);

    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32)));
    let threshold = Float::with_val(bits, &eps * &head);
    // B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1)
    let mut fac = Float::with_val(bits, s) / 2u32; // s/2!
    let mut pw = n_pow_s * &inv_n;
    let bern = even_bernoulli_floats(200, bits);
    let mut converged = false;
    for j in 1..bern.len() {
        let term = Float::with_val(bits, &bern[j] * &fac) * &pw;
        let small = Float::with_val(bits, term.abs_ref()) <= threshold;
        tail += term;
        if small {
            converged = true;
            break;
        }
        let j = j as u32;
        fac *= s + 2 * j - 1;
        fac *= s + 2 * j;
        fac /= 2 * j + 1;
        fac /= 2 * j + 2;
        pw *= &inv_n2;
    }
    if !converged {
        return Err(precision(format!("zeta({s}) tail expansion did not converge")));
    }
    Ok(head + tail)
}
