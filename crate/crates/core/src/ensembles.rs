//! Exact finite-n averages over the orthogonal ensembles by two independent routes,
//! the determinant identity suite, gap generating functions and occupancy laws.

use std::f64::consts::PI;
use std::fmt;

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lu_solve, th_det, toeplitz_det, LogValue, THKind};
use crate::moments::{compute_moments, moments_of_scaled, MomentSequence};
use crate::mp;
use crate::opuc::{szego_recursion, toeplitz_logdet_szego, OpucState};
use crate::symbols::{EnsembleLabel, GapSymbol, LaurentPotential};

/// Which algorithm produced an exact average.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    /// Toeplitz+Hankel determinant.
    TH,
    /// Toeplitz determinant and `Φ_{2n}(±1)`.
    OPUC,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::TH => "TH",
            Route::OPUC => "OPUC",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactAverage {
    pub log_value: LogValue,
    pub label: EnsembleLabel,
    pub n: usize,
    pub route: Route,
}

/// Default quadrature tolerance for internally computed moments.
pub fn default_tol(prec: u32) -> f64 {
    2f64.powi(-(prec as i32 / 2)).max(1e-150)
}

fn th_kind(label: EnsembleLabel) -> THKind {
    match label {
        EnsembleLabel::ZeroPlus => THKind::PlusK,
        EnsembleLabel::TwoMinus => THKind::MinusK2,
        EnsembleLabel::OnePlus => THKind::MinusK1,
        EnsembleLabel::OneMinus => THKind::PlusK1,
    }
}

/// Largest moment index used by the determinant route for this label.
pub fn moments_needed(label: EnsembleLabel, n: usize) -> usize {
    th_kind(label).max_index(n)
}

/// Toeplitz+Hankel route.
pub fn exact_average_th(ms: &MomentSequence, n: usize, label: EnsembleLabel, prec: u32) -> Result<ExactAverage> {
    let mut lv = if n == 0 { LogValue::one(prec) } else { th_det(ms, n, th_kind(label), prec)? };
    if label == EnsembleLabel::ZeroPlus && n > 0 {
        lv.log_abs -= Float::with_val(prec, 2u32).ln();
    }
    Ok(ExactAverage { log_value: lv, label, n, route: Route::TH })
}

/// Route through the Toeplitz determinant and orthogonal polynomials at ±1.
pub fn exact_average_opuc(ms: &MomentSequence, n: usize, label: EnsembleLabel, state: &OpucState, prec: u32) -> Result<ExactAverage> {
    if n == 0 {
        return Ok(ExactAverage { log_value: LogValue::one(prec), label, n, route: Route::OPUC });
    }
    if state.depth() < 2 * n {
        return Err(Error::InvalidParameter(format!("recursion depth {} < {}", state.depth(), 2 * n)));
    }
    let _ = ms;
    let d = toeplitz_logdet_szego(state, 2 * n)?;
    let lv = |x: &Float| LogValue::from_float(x);
    let radicand = match label {
        EnsembleLabel::ZeroPlus => {
            let prod = lv(state.phi(2 * n - 1, 1)).mul(&lv(state.phi(2 * n - 1, -1)));
            let neg = LogValue::from_log(prod.log_abs, -prod.sign);
            d.div(&neg)?
        }
        EnsembleLabel::TwoMinus => lv(state.phi(2 * n, 1)).mul(&lv(state.phi(2 * n, -1))).mul(&d),
        EnsembleLabel::OnePlus => lv(state.phi(2 * n, 1)).div(&lv(state.phi(2 * n, -1)))?.mul(&d),
        EnsembleLabel::OneMinus => lv(state.phi(2 * n, -1)).div(&lv(state.phi(2 * n, 1)))?.mul(&d),
    };
    if radicand.sign != 1 {
        return Err(Error::Positivity(format!("radicand for {label} at n={n} has sign {}", radicand.sign)));
    }
    Ok(ExactAverage { log_value: radicand.sqrt()?, label, n, route: Route::OPUC })
}

/// Both routes from one moment sequence.
pub fn exact_average_both(ms: &MomentSequence, n: usize, label: EnsembleLabel, prec: u32) -> Result<(ExactAverage, ExactAverage)> {
    let th = exact_average_th(ms, n, label, prec)?;
    let depth = (2 * n).max(1);
    let state = szego_recursion(ms, depth, prec)?;
    let op = exact_average_opuc(ms, n, label, &state, prec)?;
    Ok((th, op))
}

/// Residual of one identity, as `|lhs/rhs − 1|`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub residuals: Vec<IdentityResidual>,
    pub max_residual: f64,
}

/// All determinant identities at size n: Toeplitz factorizations, the ±1 identities
/// for Φ_{2n} and Φ_{2n+1}, the squared forms, and route equality for each label.
pub fn check_identities(ms: &MomentSequence, n: usize, prec: u32) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("identities need n >= 1".into()));
    }
    ms.require(2 * n + 2)?;
    let state = szego_recursion(ms, 2 * n + 2, prec)?;
    let lu_t = |size: usize| toeplitz_det(ms, size, prec);
    let th = |size: usize, kind| th_det(ms, size, kind, prec);
    let phi = |k: usize, z: i32| LogValue::from_float(state.phi(k, z));
    let half = LogValue::from_log(Float::with_val(prec, 2u32).ln() * -1i32, 1);
    let mut out = Vec::new();
    let mut push = |name: &str, a: &LogValue, b: &LogValue| {
        out.push(IdentityResidual { name: name.to_string(), residual: a.rel_diff(b) });
    };

    let d2n = lu_t(2 * n)?;
    let d2n1 = lu_t(2 * n + 1)?;
    let mk1 = th(n, THKind::MinusK1)?;
    let pk1 = th(n, THKind::PlusK1)?;
    let mk2 = th(n, THKind::MinusK2)?;
    let pk = th(n, THKind::PlusK)?;
    let pk_next = th(n + 1, THKind::PlusK)?;
    let mk1_next = th(n + 1, THKind::MinusK1)?;
    let pk1_next = th(n + 1, THKind::PlusK1)?;

    push("toeplitz_vs_szego_2n", &d2n, &toeplitz_logdet_szego(&state, 2 * n)?);
    push("factorization_even", &d2n, &mk1.mul(&pk1));
    push("factorization_odd", &d2n1, &half.mul(&pk_next).mul(&mk2));
    push("phi_2n_plus", &phi(2 * n, 1).mul(&d2n), &mk2.mul(&mk1));
    push("phi_2n_minus", &phi(2 * n, -1).mul(&d2n), &mk2.mul(&pk1));
    push("phi_2n1_plus", &phi(2 * n + 1, 1).mul(&d2n1), &mk1_next.mul(&mk2));
    let minus_rhs = pk1_next.mul(&mk2);
    push("phi_2n1_minus", &phi(2 * n + 1, -1).mul(&d2n1), &LogValue::from_log(minus_rhs.log_abs, -minus_rhs.sign));

    let half_pk = half.mul(&pk);
    let neg_phi = phi(2 * n - 1, 1).mul(&phi(2 * n - 1, -1));
    let neg_phi = LogValue::from_log(neg_phi.log_abs, -neg_phi.sign);
    push("squared_0plus", &half_pk.mul(&half_pk), &d2n.div(&neg_phi)?);
    push("squared_2minus", &mk2.mul(&mk2), &phi(2 * n, 1).mul(&phi(2 * n, -1)).mul(&d2n));
    let ratio = phi(2 * n, -1).div(&phi(2 * n, 1))?;
    push("squared_plus_k1", &pk1.mul(&pk1), &ratio.mul(&d2n));
    push("squared_minus_k1", &mk1.mul(&mk1), &d2n.div(&ratio)?);

    for label in EnsembleLabel::ALL {
        let a = exact_average_th(ms, n, label, prec)?;
        let b = exact_average_opuc(ms, n, label, &state, prec)?;
        push(&format!("routes_{}", label.code()), &a.log_value, &b.log_value);
    }
    let max_residual = out.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(IdentityReport { n, residuals: out, max_residual })
}

/// How the thinned generating function is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapRoute {
    /// Moments of the gap symbol itself.
    Direct,
    /// Moments of the Fisher–Hartwig representation, rescaled (needs s > 0).
    FisherHartwig,
}

/// `E_n^{(j,±)}(t0; s)` for the symbol `e^V` times `s` on the arc |θ| < t0.
pub fn gap_generating(label: EnsembleLabel, n: usize, t0: f64, s: f64, v: &LaurentPotential, prec: u32) -> Result<ExactAverage> {
    gap_generating_with(label, n, t0, s, v, prec, GapRoute::Direct)
}

pub fn gap_generating_with(
    label: EnsembleLabel,
    n: usize,
    t0: f64,
    s: f64,
    v: &LaurentPotential,
    prec: u32,
    route: GapRoute,
) -> Result<ExactAverage> {
    if !(t0 > 0.0 && t0 < PI) {
        return Err(Error::InvalidParameter("t0 must lie in (0, pi)".into()));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter("s must lie in [0, 1]".into()));
    }
    if n == 0 {
        return Ok(ExactAverage { log_value: LogValue::one(prec), label, n, route: Route::TH });
    }
    let reflected = GapSymbol::new(v.reflected(), PI - t0, s)?;
    let target = label.reflected();
    let ms = gap_moments(&reflected, moments_needed(target, n), prec, route)?;
    let mut avg = exact_average_th(&ms, n, target, prec)?;
    avg.label = label;
    Ok(avg)
}

/// Moments of a gap symbol by the requested route.
pub fn gap_moments(sym: &GapSymbol, m_max: usize, prec: u32, route: GapRoute) -> Result<MomentSequence> {
    let tol = default_tol(prec);
    match route {
        GapRoute::Direct => compute_moments(sym, m_max, tol, prec),
        GapRoute::FisherHartwig => {
            let (_, fh) = sym.fh_of_gap()?;
            let ls = Float::with_val(prec, sym.s).ln();
            let scale = (ls * (1.0 - sym.t0 / PI)).exp();
            let ms = compute_moments(&fh, m_max, tol, prec)?;
            moments_of_scaled(&ms, &scale)
        }
    }
}

fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (1.0 + ((2 * i + 1) as f64 * PI / (2 * count) as f64).cos()) / 2.0)
        .collect()
}

/// `P(exactly m free angles in (0, t0))`, m = 0..=n, from the generating function at n+1 nodes.
pub fn occupancy_distribution(label: EnsembleLabel, n: usize, t0: f64, prec: u32) -> Result<Vec<f64>> {
    let nodes = chebyshev_nodes(n + 1);
    let values: Vec<Float> = nodes
        .iter()
        .map(|&s| gap_generating(label, n, t0, s, &LaurentPotential::zero(), prec).map(|e| e.log_value.value()))
        .collect::<Result<_>>()?;
    let matrix: Vec<Vec<Float>> = nodes
        .iter()
        .map(|&s| {
            let sf = mp::fl(prec, s);
            let mut row = Vec::with_capacity(n + 1);
            let mut p = mp::fl(prec, 1.0);
            for _ in 0..=n {
                row.push(p.clone());
                p *= &sf;
            }
            row
        })
        .collect();
    let coeffs = lu_solve(&matrix, &values, prec)?;
    let mut probs = Vec::with_capacity(n + 1);
    for c in coeffs {
        let v = c.to_f64();
        if v < -1e-12 {
            return Err(Error::IllConditioned(format!("negative probability {v:e}; raise the precision")));
        }
        probs.push(v.max(0.0));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::IllConditioned(format!("probabilities sum to {total}; raise the precision")));
    }
    Ok(probs)
}

fn gen_value(label: EnsembleLabel, n: usize, t0: f64, s: f64, prec: u32) -> Result<Float> {
    Ok(gap_generating(label, n, t0, s, &LaurentPotential::zero(), prec)?.log_value.value())
}

/// Circular β-ensemble generating function `E^{[β]}_N(t0; s)`: β = 1 and 4 through the
/// orthogonal-ensemble interrelations, β = 2 as the Toeplitz determinant of the arc symbol.
pub fn cbe_generating(beta: u32, big_n: usize, t0: f64, s: f64, prec: u32) -> Result<Float> {
    if !(t0 > 0.0 && t0 < PI) || !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter("need t0 in (0, pi) and s in [0, 1]".into()));
    }
    match beta {
        1 => {
            let n = big_n / 2;
            let s2 = s * s;
            let sf = mp::fl(prec, s);
            let (a, b) = if big_n % 2 == 1 {
                (gen_value(EnsembleLabel::TwoMinus, n, t0, s2, prec)?, gen_value(EnsembleLabel::ZeroPlus, n + 1, t0, s2, prec)?)
            } else {
                (gen_value(EnsembleLabel::OnePlus, n, t0, s2, prec)?, gen_value(EnsembleLabel::OneMinus, n, t0, s2, prec)?)
            };
            Ok((a * &sf + b) / (sf + 1u32))
        }
        2 => {
            if big_n == 0 {
                return Ok(mp::fl(prec, 1.0));
            }
            let sym = GapSymbol::new(LaurentPotential::zero(), PI - t0, s)?;
            let ms = gap_moments(&sym, big_n - 1, prec, GapRoute::Direct)?;
            Ok(toeplitz_det(&ms, big_n, prec)?.value())
        }
        4 => {
            let a = gen_value(EnsembleLabel::OnePlus, big_n, t0, s, prec)?;
            let b = gen_value(EnsembleLabel::OneMinus, big_n, t0, s, prec)?;
            Ok((a + b) / 2u32)
        }
        _ => Err(Error::InvalidParameter(format!("beta must be 1, 2 or 4, got {beta}"))),
    }
}
