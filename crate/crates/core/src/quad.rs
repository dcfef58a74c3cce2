//! Gauss–Legendre rules at arbitrary precision, cached per (order, precision).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use crate::mp;

/// Nodes and weights on [-1, 1].
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

type RuleCache = Mutex<HashMap<(usize, u32), Arc<GaussRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `order`-point Gauss–Legendre rule at `prec` bits.
pub fn gauss_legendre(order: usize, prec: u32) -> Arc<GaussRule> {
    if let Some(r) = cache().lock().unwrap().get(&(order, prec)) {
        return r.clone();
    }
    let rule = Arc::new(build(order, prec));
    cache().lock().unwrap().insert((order, prec), rule.clone());
    rule
}

/// Legendre `P_n(x)` and `P_{n-1}(x)` by the three-term recurrence.
fn legendre_pair(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = mp::fl(prec, 1.0);
    let mut p1 = x.clone();
    for k in 1..n {
        let a = Float::with_val(prec, x * &p1) * (2 * k + 1) as u32;
        let b = Float::with_val(prec, &p0 * k as u32);
        let p2 = (a - b) / (k + 1) as u32;
        p0 = std::mem::replace(&mut p1, p2);
    }
    (p1, p0)
}

fn build(n: usize, prec: u32) -> GaussRule {
    assert!(n >= 1);
    let wp = prec + 32;
    let eps = Float::with_val(wp, 1u32) >> (prec + 8);
    let mut nodes = vec![mp::fl(prec, 0.0); n];
    let mut weights = vec![mp::fl(prec, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = mp::fl(wp, guess);
        for _ in 0..200 {
            let (p, pm1) = legendre_pair(n, &x);
            let x2m1 = Float::with_val(wp, x.square_ref()) - 1u32;
            let dp = (Float::with_val(wp, &x * &p) - &pm1) * n as u32 / &x2m1;
            let dx = Float::with_val(wp, &p / &dp);
            x -= &dx;
            if dx.abs() < eps {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, &x);
        let x2m1 = Float::with_val(wp, x.square_ref()) - 1u32;
        let dp = (Float::with_val(wp, &x * &p) - &pm1) * n as u32 / &x2m1;
        let w = Float::with_val(wp, 2u32) / (Float::with_val(wp, 1u32) - Float::with_val(wp, x.square_ref())) / dp.square();
        nodes[i] = Float::with_val(prec, -&x);
        nodes[n - 1 - i] = Float::with_val(prec, &x);
        weights[i] = Float::with_val(prec, &w);
        weights[n - 1 - i] = Float::with_val(prec, &w);
    }
    if n % 2 == 1 {
        nodes[n / 2] = mp::fl(prec, 0.0);
    }
    GaussRule { nodes, weights }
}

/// Gauss–Legendre rule in f64 with the same node ordering.
pub fn gauss_legendre_f64(order: usize) -> (Vec<f64>, Vec<f64>) {
    let r = gauss_legendre(order, 64);
    (r.nodes.iter().map(|x| x.to_f64()).collect(), r.weights.iter().map(|x| x.to_f64()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn integrates_polynomials_exactly() {
        let prec = 256;
        let r = gauss_legendre(32, prec);
        for deg in [0u32, 2, 10, 62] {
            let mut s = mp::fl(prec, 0.0);
            for (x, w) in r.nodes.iter().zip(&r.weights) {
                s += Float::with_val(prec, x.pow(deg)) * w;
            }
            let exact = Float::with_val(prec, 2u32) / (deg + 1);
            let err = (s - exact).abs().to_f64();
            assert!(err < 1e-70, "deg {deg}: {err:e}");
        }
    }

    #[test]
    fn odd_order_and_cache() {
        let r = gauss_legendre(5, 128);
        let total: f64 = r.weights.iter().map(|w| w.to_f64()).sum();
        assert!((total - 2.0).abs() < 1e-15);
        assert!(Arc::ptr_eq(&r, &gauss_legendre(5, 128)));
    }
}
