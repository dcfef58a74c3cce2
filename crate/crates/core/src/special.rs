//! log Γ, Barnes G (real and on a vertical strip), ζ′(−1) and Laurent functionals of V.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{self, MpComplex};
use crate::symbols::LaurentPotential;

/// Precision used by the f64 convenience wrappers.
const F64_WRAPPER_PREC: u32 = 192;
/// Barnes G asymptotic expansion is used once |z| reaches this modulus.
const BARNES_SWITCHOVER: u32 = 20;
/// Number of Bernoulli terms in the Barnes G expansion.
const BARNES_TERMS: usize = 12;

type BernoulliCache = Mutex<HashMap<u32, Arc<Vec<Float>>>>;

/// `B_2, B_4, .., B_{2K}` at `prec` bits via `B_{2k} = (-1)^{k+1} 2 (2k)! ζ(2k) / (2π)^{2k}`.
pub fn bernoulli_even(count: usize, prec: u32) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<BernoulliCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&prec) {
        if b.len() >= count {
            return b.clone();
        }
    }
    let wp = prec + 32;
    let two_pi_sq = Float::with_val(wp, mp::pi(wp) * 2u32).square();
    let mut fact = mp::fl(wp, 1.0);
    let mut pow = mp::fl(wp, 1.0);
    let mut out = Vec::with_capacity(count);
    for k in 1..=count as u32 {
        fact *= (2 * k - 1) * (2 * k);
        pow *= &two_pi_sq;
        let z = Float::with_val(wp, Float::zeta_u(2 * k));
        let mut b = Float::with_val(wp, &fact * &z) * 2u32 / &pow;
        if k % 2 == 0 {
            b = -b;
        }
        out.push(Float::with_val(prec, b));
    }
    let out = Arc::new(out);
    cache.lock().unwrap().insert(prec, out.clone());
    out
}

fn stirling_threshold(prec: u32) -> f64 {
    (0.12 * prec as f64).max(15.0)
}

/// Stirling series for lnΓ(z) at large |z|; terms added until they stop decreasing.
fn stirling_log_gamma(z: &MpComplex) -> MpComplex {
    let prec = z.prec();
    let ln2pi_half = Float::with_val(prec, mp::pi(prec) * 2u32).ln() / 2u32;
    let lnz = z.ln();
    let mut s = z.add_real(&mp::fl(prec, -0.5)).mul(&lnz).sub(z).add_real(&ln2pi_half);
    let zinv = z.recip();
    let zinv2 = zinv.mul(&zinv);
    let mut zpow = zinv.clone();
    let bern = bernoulli_even(4 * prec as usize / 8 + 40, prec);
    let eps = Float::with_val(prec, 1u32) >> (prec + 8);
    let mut last = Float::with_val(prec, f64::INFINITY);
    for (i, b) in bern.iter().enumerate() {
        let k = (i + 1) as u32;
        let c = Float::with_val(prec, b / (2 * k * (2 * k - 1)));
        let term = zpow.scale(&c);
        let size = term.abs();
        if size > last {
            break;
        }
        s = s.add(&term);
        if size < eps {
            break;
        }
        last = size;
        zpow = zpow.mul(&zinv2);
    }
    s
}

/// lnΓ(z) for Re z > 0 with the branch continuous from the positive axis.
pub fn log_gamma_complex(z: &MpComplex) -> Result<MpComplex> {
    if z.re <= 0 {
        return Err(Error::InvalidParameter("log Gamma needs Re z > 0".into()));
    }
    let prec = z.prec();
    let wp = prec + 16;
    let mut w = MpComplex::new(Float::with_val(wp, &z.re), Float::with_val(wp, &z.im));
    let thr = stirling_threshold(prec);
    let mut shift = MpComplex::from_f64(wp, 0.0, 0.0);
    while w.abs() < thr {
        shift = shift.add(&w.ln());
        w = w.add_real(&mp::fl(wp, 1.0));
    }
    let r = stirling_log_gamma(&w).sub(&shift);
    Ok(MpComplex::new(Float::with_val(prec, r.re), Float::with_val(prec, r.im)))
}

pub fn log_gamma_mp(x: &Float) -> Result<Float> {
    if *x <= 0 {
        return Err(Error::InvalidParameter("log Gamma needs x > 0".into()));
    }
    let z = MpComplex::new(x.clone(), Float::new(x.prec()));
    Ok(log_gamma_complex(&z)?.re)
}

pub fn log_gamma(x: f64) -> Result<f64> {
    Ok(log_gamma_mp(&mp::fl(F64_WRAPPER_PREC, x))?.to_f64())
}

/// log G(1+z) by the large-|z| expansion; assumes |z| ≥ the switchover.
fn barnes_asymptotic(z: &MpComplex) -> MpComplex {
    let prec = z.prec();
    let c = constants(prec);
    let lnz = z.ln();
    let z2 = z.mul(z);
    let half = mp::fl(prec, 0.5);
    let twelfth = Float::with_val(prec, 1u32) / 12u32;
    let a = z2.scale(&half).add_real(&Float::with_val(prec, -&twelfth)).mul(&lnz);
    let b = z2.scale(&mp::fl(prec, -0.75));
    let ln2pi = Float::with_val(prec, mp::pi(prec) * 2u32).ln();
    let d = z.scale(&Float::with_val(prec, &ln2pi / 2u32));
    let mut s = a.add(&b).add(&d).add_real(&c.zeta_prime_m1);
    let bern = bernoulli_even(BARNES_TERMS + 1, prec);
    let zinv2 = z2.recip();
    let mut zpow = zinv2.clone();
    for k in 1..=BARNES_TERMS as u32 {
        let coef = Float::with_val(prec, &bern[k as usize] / (4 * k * (k + 1)));
        s = s.add(&zpow.scale(&coef));
        zpow = zpow.mul(&zinv2);
    }
    s
}

/// log G(1+z) for Re(1+z) > 0, on the strip of modest imaginary part.
pub fn log_barnes_g1_complex(z: &MpComplex) -> Result<MpComplex> {
    let prec = z.prec();
    let one_plus = z.add_real(&mp::fl(prec, 1.0));
    if one_plus.re <= 0 {
        return Err(Error::InvalidParameter("Barnes G needs Re(1+z) > 0".into()));
    }
    let wp = prec + 16;
    let zw = MpComplex::new(Float::with_val(wp, &z.re), Float::with_val(wp, &z.im));
    let mut s: u32 = 0;
    let mut w = zw.clone();
    while w.abs() < BARNES_SWITCHOVER {
        w = w.add_real(&mp::fl(wp, 1.0));
        s += 1;
    }
    let mut r = barnes_asymptotic(&w);
    if s > 0 {
        let base = zw.add_real(&mp::fl(wp, 1.0));
        let lg = log_gamma_complex(&base)?;
        r = r.sub(&lg.scale(&mp::fl(wp, s as f64)));
        for j in 0..s.saturating_sub(1) {
            let l = base.add_real(&mp::fl(wp, j as f64)).ln();
            r = r.sub(&l.scale(&mp::fl(wp, (s - 1 - j) as f64)));
        }
    }
    Ok(MpComplex::new(Float::with_val(prec, r.re), Float::with_val(prec, r.im)))
}

pub fn log_barnes_g_mp(x: &Float) -> Result<Float> {
    if *x <= 0 {
        return Err(Error::InvalidParameter("log Barnes G needs x > 0".into()));
    }
    let prec = x.prec();
    let z = MpComplex::new(Float::with_val(prec, x - 1u32), Float::new(prec));
    Ok(log_barnes_g1_complex(&z)?.re)
}

/// log G(x) for x > 0.
pub fn log_barnes_g(x: f64) -> Result<f64> {
    Ok(log_barnes_g_mp(&mp::fl(F64_WRAPPER_PREC, x))?.to_f64())
}

/// `log |G(1+α+iy)|²`.
pub fn log_abs2_barnes_g_mp(alpha: &Float, y: &Float) -> Result<Float> {
    let r = log_barnes_g1_complex(&MpComplex::new(alpha.clone(), y.clone()))?;
    Ok(r.re * 2u32)
}

/// `|G(1+α+iy)|²`.
pub fn abs2_barnes_g(alpha: f64, y: f64) -> Result<f64> {
    let p = F64_WRAPPER_PREC;
    Ok(log_abs2_barnes_g_mp(&mp::fl(p, alpha), &mp::fl(p, y))?.to_f64().exp())
}

/// `log |G(1+α+iy)|²` as f64.
pub fn log_abs2_barnes_g(alpha: f64, y: f64) -> Result<f64> {
    let p = F64_WRAPPER_PREC;
    Ok(log_abs2_barnes_g_mp(&mp::fl(p, alpha), &mp::fl(p, y))?.to_f64())
}

/// ζ′(−1) and log A (Glaisher), related by `ζ′(−1) = 1/12 − log A`.
#[derive(Clone, Debug)]
pub struct SpecialConstants {
    pub zeta_prime_m1: Float,
    pub log_glaisher: Float,
}

type ConstCache = Mutex<HashMap<u32, Arc<SpecialConstants>>>;

/// Cached constants at `prec` bits.
pub fn constants(prec: u32) -> Arc<SpecialConstants> {
    static CACHE: OnceLock<ConstCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&prec) {
        return c.clone();
    }
    let c = Arc::new(compute_constants(prec));
    cache.lock().unwrap().insert(prec, c.clone());
    c
}

/// `ζ′(2) = −Σ log k / k²` by Euler–Maclaurin summation.
fn zeta_prime_2(prec: u32) -> Float {
    let wp = prec + 32;
    let big_n = 40 + prec / 8;
    let mut s = mp::fl(wp, 0.0);
    for k in 2..big_n {
        s += Float::with_val(wp, k).ln() / Float::with_val(wp, k * k);
    }
    let nf = mp::fl(wp, big_n as f64);
    let ln_n = Float::with_val(wp, nf.ln_ref());
    s += Float::with_val(wp, &ln_n / &nf.clone().square()) / 2u32;
    s += Float::with_val(wp, &ln_n + 1u32) / &nf;
    let bern = bernoulli_even(200, wp);
    let eps = Float::with_val(wp, 1u32) >> (wp + 4);
    let mut harmonic = mp::fl(wp, 0.0);
    let mut npow = Float::with_val(wp, &nf * &nf) * &nf;
    let nsq = Float::with_val(wp, &nf * &nf);
    let mut last = Float::with_val(wp, f64::INFINITY);
    for (i, b) in bern.iter().enumerate() {
        let j = (i + 1) as u32;
        harmonic += Float::with_val(wp, 1u32) / (2 * j - 1);
        harmonic += Float::with_val(wp, 1u32) / (2 * j);
        let term = Float::with_val(wp, b / &npow) * (Float::with_val(wp, &ln_n - &harmonic) + 1u32);
        let size = Float::with_val(wp, term.abs_ref());
        if size > last {
            break;
        }
        s += &term;
        if size < eps {
            break;
        }
        last = size;
        npow *= &nsq;
    }
    Float::with_val(prec, -s)
}

fn compute_constants(prec: u32) -> SpecialConstants {
    let wp = prec + 32;
    let zp2 = zeta_prime_2(wp);
    let gamma = Float::with_val(wp, Constant::Euler);
    let ln2pi = Float::with_val(wp, mp::pi(wp) * 2u32).ln();
    let pi2 = Float::with_val(wp, mp::pi(wp).square());
    let log_a = (gamma + ln2pi) / 12u32 - zp2 / (pi2 * 2u32);
    let zeta = Float::with_val(wp, 1u32) / 12u32 - &log_a;
    SpecialConstants { zeta_prime_m1: Float::with_val(prec, zeta), log_glaisher: Float::with_val(prec, log_a) }
}

/// ζ′(−1) as f64.
pub fn zeta_prime_m1() -> f64 {
    constants(F64_WRAPPER_PREC).zeta_prime_m1.to_f64()
}

/// Functionals of V used by the asymptotic constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentFunctionals {
    pub v0: f64,
    /// `Σ_{k≥1} k V_k²`
    pub sum_k_vk2: f64,
    pub v_plus1: f64,
    pub v_minus1: f64,
    /// For each requested angle t: `(V(e^{it}), Σ_{k≥1} V_k sin(kt))`.
    pub at_points: Vec<(f64, f64)>,
}

pub fn laurent_functionals(v: &LaurentPotential, points: &[f64]) -> LaurentFunctionals {
    let sum_k_vk2 = v.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c * c).sum();
    LaurentFunctionals {
        v0: v.coeff(0),
        sum_k_vk2,
        v_plus1: v.eval(0.0),
        v_minus1: v.eval(std::f64::consts::PI),
        at_points: points.iter().map(|&t| (v.eval(t), v.sin_sum(t))).collect(),
    }
}
