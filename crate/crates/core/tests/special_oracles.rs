//! Special functions checked against independent oracles.

use orthoavg::mp;
use orthoavg::special::{
    abs2_barnes_g, constants, log_abs2_barnes_g, log_barnes_g, log_barnes_g_mp, log_gamma, log_gamma_mp,
};
use proptest::prelude::*;
use rug::float::Constant;
use rug::Float;

/// Exact rational Bernoulli numbers B_2..B_20.
const BERNOULLI: [(f64, f64); 10] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
];

fn bern(prec: u32, j: usize) -> Float {
    let (p, q) = BERNOULLI[j - 1];
    Float::with_val(prec, p) / q
}

/// log A from its defining limit with Euler–Maclaurin corrections.
fn log_glaisher_oracle(prec: u32, big_n: u32) -> Float {
    let mut s = Float::with_val(prec, 0);
    for k in 2..=big_n {
        let kf = Float::with_val(prec, k);
        s += Float::with_val(prec, kf.ln_ref()) * k;
    }
    let n = Float::with_val(prec, big_n);
    let ln_n = Float::with_val(prec, n.ln_ref());
    let n2 = Float::with_val(prec, &n * &n);
    let coef = Float::with_val(prec, &n2 / 2u32) + Float::with_val(prec, &n / 2u32) + Float::with_val(prec, 1u32) / 12u32;
    s -= coef * &ln_n;
    s += Float::with_val(prec, &n2 / 4u32);
    for j in 2..=10usize {
        // (2j-3)!/(2j)! = 1/((2j-2)(2j-1)(2j))
        let jj = j as u32;
        let fact_ratio = Float::with_val(prec, 1u32) / ((2 * jj - 2) * (2 * jj - 1) * (2 * jj));
        let npow = Float::with_val(prec, n.pow_ref_i(2 - 2 * j as i32));
        s += bern(prec, j) * fact_ratio * npow;
    }
    s
}

trait PowI {
    fn pow_ref_i(&self, e: i32) -> Float;
}

impl PowI for Float {
    fn pow_ref_i(&self, e: i32) -> Float {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(e))
    }
}

#[test]
fn zeta_prime_matches_glaisher_limit() {
    let c = constants(256);
    let oracle = Float::with_val(256, 1u32) / 12u32 - log_glaisher_oracle(256, 2000);
    let d = Float::with_val(256, &c.zeta_prime_m1 - &oracle).abs().to_f64();
    assert!(d < 1e-30, "difference {d:e}");
    let again = Float::with_val(512, 1u32) / 12u32 - log_glaisher_oracle(512, 2000);
    let drift = Float::with_val(512, &again - &oracle).abs().to_f64();
    assert!(drift < 1e-25, "oracle drift under doubling {drift:e}");
    assert!(c.zeta_prime_m1 > -0.166 && c.zeta_prime_m1 < -0.165);
    let twelve = Float::with_val(256, Float::with_val(256, 1u32) / 12u32 - &c.zeta_prime_m1) * 12u32;
    let rhs = Float::with_val(256, &c.log_glaisher * 12u32);
    assert!(Float::with_val(256, twelve - rhs).abs() < 1e-70);
}

#[test]
fn log_gamma_shift_stirling_oracle() {
    // lnΓ(7.25) = lnΓ(7.25 + 40) − Σ ln(7.25 + i), with an independent short Stirling series at 47.25.
    let prec = 256;
    let x = Float::with_val(prec, 7.25);
    let big = Float::with_val(prec, &x + 40u32);
    let ln2pi = Float::with_val(prec, Float::with_val(prec, Constant::Pi) * 2u32).ln();
    let mut st = Float::with_val(prec, &big - 0.5) * Float::with_val(prec, big.ln_ref()) - &big + ln2pi / 2u32;
    for j in 1..=10usize {
        let jj = j as u32;
        let denom = Float::with_val(prec, big.pow_ref_i(2 * j as i32 - 1)) * (2 * jj * (2 * jj - 1));
        st += bern(prec, j) / denom;
    }
    for i in 0..40u32 {
        st -= Float::with_val(prec, &x + i).ln();
    }
    let ours = log_gamma_mp(&x).unwrap();
    assert!(Float::with_val(prec, ours - st).abs() < 1e-25);
    assert!((log_gamma(7.25).unwrap() - 7.0521854507385394).abs() < 1e-14);
}

#[test]
fn barnes_g_alexeiewsky_integral() {
    // log G(1+z) = z(1−z)/2 + (z/2) ln 2π + z lnΓ(z) − ∫_0^z lnΓ, with lnΓ(t) = lnΓ(1+t) − ln t.
    let prec = 256;
    let z = 4.5f64;
    let zf = Float::with_val(prec, z);
    let rule = orthoavg::quad::gauss_legendre(48, prec);
    let pieces = 9u32;
    let mut integral = Float::with_val(prec, 0);
    for p in 0..pieces {
        let a = Float::with_val(prec, &zf * p) / pieces;
        let b = Float::with_val(prec, &zf * (p + 1)) / pieces;
        let half = Float::with_val(prec, &b - &a) / 2u32;
        let mid = Float::with_val(prec, &a + &b) / 2u32;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = Float::with_val(prec, &half * x) + &mid;
            let one_plus = Float::with_val(prec, &t + 1u32);
            integral += Float::with_val(prec, one_plus.ln_gamma()) * w * &half;
        }
    }
    integral += Float::with_val(prec, &zf - Float::with_val(prec, &zf * Float::with_val(prec, zf.ln_ref())));
    let ln2pi = Float::with_val(prec, Float::with_val(prec, Constant::Pi) * 2u32).ln();
    let oracle = Float::with_val(prec, &zf * (1.0 - z)) / 2u32 + Float::with_val(prec, &zf * ln2pi) / 2u32
        + Float::with_val(prec, &zf * Float::with_val(prec, zf.ln_gamma_ref()))
        - integral;
    let ours = log_barnes_g_mp(&Float::with_val(prec, 5.5)).unwrap();
    let d = Float::with_val(prec, &ours - &oracle).abs().to_f64();
    assert!(d < 1e-20, "G(5.5) mismatch {d:e}");
}

#[test]
fn barnes_abs2_weierstrass_product() {
    // log|G(1+iy)|² = y²(1+γ) + Σ_k [k ln(1 + y²/k²) − y²/k], tail ≈ −y⁴/2 Σ_{k>K} k⁻³ + y⁶/3 Σ_{k>K} k⁻⁵.
    for &y in &[0.5f64, 1.3] {
        let prec = 192;
        let yf = Float::with_val(prec, y);
        let y2 = Float::with_val(prec, yf.square_ref());
        let mut s = Float::with_val(prec, Constant::Euler) + 1u32;
        s *= &y2;
        let big_k = 4000u32;
        for k in 1..=big_k {
            let u = Float::with_val(prec, &y2 / (k * k)) + 1u32;
            s += u.ln() * k;
            s -= Float::with_val(prec, &y2 / k);
        }
        let kf = big_k as f64;
        let tail3 = 1.0 / (2.0 * kf * kf) - 1.0 / (2.0 * kf.powi(3)) + 1.0 / (4.0 * kf.powi(4));
        let tail5 = 1.0 / (4.0 * kf.powi(4));
        let oracle = s.to_f64() - y.powi(4) / 2.0 * tail3 + y.powi(6) / 3.0 * tail5;
        let ours = log_abs2_barnes_g(0.0, y).unwrap();
        assert!((ours - oracle).abs() < 1e-12, "y={y}: {ours} vs {oracle}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn barnes_recursion(x in 0.1f64..20.0) {
        let prec = 192;
        let xf = mp::fl(prec, x);
        let up = log_barnes_g_mp(&Float::with_val(prec, &xf + 1u32)).unwrap();
        let here = log_barnes_g_mp(&xf).unwrap();
        let lg = log_gamma_mp(&xf).unwrap();
        let d = Float::with_val(prec, up - here - lg).abs().to_f64();
        prop_assert!(d < 1e-20, "x={} residual {:e}", x, d);
    }

    #[test]
    fn barnes_conjugation(alpha in 0.0f64..3.0, y in -10.0f64..10.0) {
        let a = abs2_barnes_g(alpha, y).unwrap();
        let b = abs2_barnes_g(alpha, -y).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.abs());
    }
}

#[test]
fn barnes_f64_wrapper() {
    assert!((log_barnes_g(4.0).unwrap() - 2f64.ln()).abs() < 1e-15);
}
