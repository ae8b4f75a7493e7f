//! Exact Bernoulli numbers, cached process-wide.
//!
//! Uses the convention `B_1 = -1/2`, generated by `sum_{k<=n} C(n+1, k) B_k = 0`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::{Float, Integer, Rational};

static CACHE: RwLock<Vec<Rational>> = RwLock::new(Vec::new());

type FloatTable = RwLock<HashMap<u32, Arc<Vec<Float>>>>;
static EVEN_FLOATS: OnceLock<FloatTable> = OnceLock::new();

/// Exact `B_n`.
pub fn bernoulli(n: usize) -> Rational {
    {
        let cache = CACHE.read().unwrap_or_else(|e| e.into_inner());
        if let Some(b) = cache.get(n) {
            return b.clone();
        }
    }
    let mut cache = CACHE.write().unwrap_or_else(|e| e.into_inner());
    // another thread may have extended the table while we waited
    while cache.len() <= n {
        let m = cache.len();
        let next = if m == 0 {
            Rational::from(1)
        } else {
            let mut acc = Rational::new();
            let mut binom = Integer::from(1);
            for (k, bk) in cache.iter().enumerate().take(m) {
                acc += Rational::from(&binom * bk.numer()) / bk.denom();
                binom *= m + 1 - k;
                binom /= k as u32 + 1;
            }
            -acc / Integer::from(m + 1)
        };
        cache.push(next);
    }
    cache[n].clone()
}

/// `B_n` rounded to `bits` binary digits.
pub fn bernoulli_float(n: usize, bits: u32) -> Float {
    Float::with_val(bits, &bernoulli(n))
}

/// `B_0, B_2, ..., B_{2(count-1)}` rounded to `bits`, shared between callers.
pub fn even_bernoulli_floats(count: usize, bits: u32) -> Arc<Vec<Float>> {
    let table = EVEN_FLOATS.get_or_init(|| RwLock::new(HashMap::new()));
    {
        let map = table.read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = map.get(&bits) {
            if v.len() >= count {
                return Arc::clone(v);
            }
        }
    }
    let mut map = table.write().unwrap_or_else(|e| e.into_inner());
    if let Some(v) = map.get(&bits) {
        if v.len() >= count {
            return Arc::clone(v);
        }
    }
    // grow geometrically so repeated small extensions stay cheap
    let target = count.max(64).next_power_of_two();
    let v: Vec<Float> = (0..target).map(|k| bernoulli_float(2 * k, bits)).collect();
    let v = Arc::new(v);
    map.insert(bits, Arc::clone(&v));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        assert_eq!(bernoulli(0), 1);
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(3), 0);
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(20), Rational::from((-174611, 330)));
    }

    #[test]
    fn odd_indices_vanish() {
        for n in (3..60).step_by(2) {
            assert_eq!(bernoulli(n), 0, "B_{n}");
        }
    }

    #[test]
    fn concurrent_initialisation_is_consistent() {
        let handles: Vec<_> = (0..8)
            .map(|i| std::thread::spawn(move || bernoulli(40 + 5 * i)))
            .collect();
        let got: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (i, b) in got.iter().enumerate() {
            assert_eq!(*b, bernoulli(40 + 5 * i));
        }
        assert_eq!(bernoulli(40), Rational::from((Integer::from(-261082718496449122051i128), 13530)));
    }
}
