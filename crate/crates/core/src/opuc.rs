//! Szegő recursion for real moment sequences: Verblunsky coefficients,
//! norms, boundary values `Φ_k(±1)` and the Toeplitz log-determinant.

use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::linalg::LogValue;
use crate::moments::MomentSequence;
use crate::mp;

/// Output of the recursion to depth `N`.
#[derive(Clone, Debug)]
pub struct OpucState {
    /// `α_0 .. α_{N-1}`
    pub verblunsky: Vec<Float>,
    /// `log(D_{k+1}/D_k)` for k = 0..N-1
    pub log_norm_ratios: Vec<Float>,
    /// `Φ_k(1)` for k = 0..=N
    pub phi_plus1: Vec<Float>,
    /// `Φ_k(-1)` for k = 0..=N
    pub phi_minus1: Vec<Float>,
}

impl OpucState {
    pub fn depth(&self) -> usize {
        self.verblunsky.len()
    }

    pub fn phi(&self, k: usize, point: i32) -> &Float {
        if point > 0 {
            &self.phi_plus1[k]
        } else {
            &self.phi_minus1[k]
        }
    }
}

/// Levinson–Szegő recursion `Φ_{k+1} = zΦ_k − α_k Φ_k*` up to degree `N`.
pub fn szego_recursion(ms: &MomentSequence, big_n: usize, prec: u32) -> Result<OpucState> {
    ms.require(big_n)?;
    let g0 = Float::with_val(prec, ms.get(0));
    if g0 <= 0 {
        return Err(Error::Positivity("g_0 must be positive".into()));
    }
    let threshold = 10f64.powf(-(prec as f64) / 8.0);
    let mut coeffs: Vec<Float> = vec![mp::fl(prec, 1.0)];
    let mut norm = g0;
    let mut verblunsky = Vec::with_capacity(big_n);
    let mut log_norm_ratios = Vec::with_capacity(big_n);
    let mut phi_plus1 = vec![mp::fl(prec, 1.0)];
    let mut phi_minus1 = vec![mp::fl(prec, 1.0)];
    let mut tmp = Float::new(prec);
    for k in 0..big_n {
        log_norm_ratios.push(Float::with_val(prec, norm.ln_ref()));
        let mut num = Float::new(prec);
        for (i, a) in coeffs.iter().enumerate() {
            tmp.assign(a * ms.get(i as i64 + 1));
            num += &tmp;
        }
        let alpha = num / &norm;
        let gap = Float::with_val(prec, 1u32) - Float::with_val(prec, alpha.abs_ref());
        if gap < threshold {
            return Err(Error::PrecisionExhausted { step: k, gap: gap.to_f64() });
        }
        let mut next = vec![Float::new(prec); k + 2];
        for i in 0..=k + 1 {
            if i >= 1 {
                next[i].assign(&coeffs[i - 1]);
            }
            if i <= k {
                tmp.assign(&alpha * &coeffs[k - i]);
                next[i] -= &tmp;
            }
        }
        let p1 = Float::with_val(prec, &phi_plus1[k] * (Float::with_val(prec, 1u32) - &alpha));
        let star_m1 = if k % 2 == 0 { phi_minus1[k].clone() } else { Float::with_val(prec, -&phi_minus1[k]) };
        let m1 = Float::with_val(prec, -&phi_minus1[k]) - Float::with_val(prec, &alpha * &star_m1);
        phi_plus1.push(p1);
        phi_minus1.push(m1);
        norm *= Float::with_val(prec, 1u32) - Float::with_val(prec, alpha.square_ref());
        verblunsky.push(alpha);
        coeffs = next;
    }
    Ok(OpucState { verblunsky, log_norm_ratios, phi_plus1, phi_minus1 })
}

/// `log det T_N = Σ_{k<N} log(D_{k+1}/D_k)`.
pub fn toeplitz_logdet_szego(state: &OpucState, big_n: usize) -> Result<LogValue> {
    if big_n > state.depth() {
        return Err(Error::InvalidParameter(format!("recursion depth {} < {big_n}", state.depth())));
    }
    let prec = state.log_norm_ratios.first().map(|x| x.prec()).unwrap_or(mp::DEFAULT_PRECISION);
    let mut s = mp::fl(prec, 0.0);
    for l in &state.log_norm_ratios[..big_n] {
        s += l;
    }
    Ok(LogValue::from_log(s, 1))
}
