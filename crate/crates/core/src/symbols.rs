//! Symbols on the unit circle: analytic potentials, Fisher–Hartwig symbols,
//! gap symbols and the ensemble labels.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp;

/// Real Laurent potential `V(e^{it}) = V_0 + 2 sum_k V_k cos(kt)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LaurentPotential {
    pub coeffs: Vec<f64>,
}

impl LaurentPotential {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("potential coefficients must be finite".into()));
        }
        Ok(LaurentPotential { coeffs })
    }

    pub fn zero() -> Self {
        LaurentPotential { coeffs: Vec::new() }
    }

    /// `V_k`, zero beyond the stored range.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.coeff(0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            v += 2.0 * c * (k as f64 * t).cos();
        }
        v
    }

    /// `sum_{k>=1} V_k sin(kt)`.
    pub fn sin_sum(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * (k as f64 * t).sin())
            .sum()
    }

    /// Evaluation at the precision of `t` using the Chebyshev recurrence for cos(kt).
    pub fn eval_mp(&self, t: &Float) -> Float {
        let prec = t.prec();
        let mut v = mp::fl(prec, self.coeff(0));
        if self.coeffs.len() <= 1 {
            return v;
        }
        let c1 = Float::with_val(prec, t.cos_ref());
        let two_c1 = Float::with_val(prec, &c1 * 2u32);
        let mut prev = mp::fl(prec, 1.0);
        let mut cur = c1;
        for (k, &vk) in self.coeffs.iter().enumerate().skip(1) {
            if k > 1 {
                let next = Float::with_val(prec, &two_c1 * &cur) - &prev;
                prev = std::mem::replace(&mut cur, next);
            }
            if vk != 0.0 {
                v += Float::with_val(prec, &cur * (2.0 * vk));
            }
        }
        v
    }

    /// Potential with coefficients `(-1)^k V_k`, i.e. `t -> pi - t`.
    pub fn reflected(&self) -> Self {
        LaurentPotential {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        LaurentPotential { coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }
}

/// One Fisher–Hartwig singularity at `e^{±it}` with root exponent `alpha` and jump `β = i·beta_im`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FHSingularity {
    pub t: f64,
    pub alpha: f64,
    pub beta_im: f64,
}

/// Symbol of Fisher–Hartwig type with singularities at 1, -1 and symmetric pairs `e^{±it_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FHSymbol {
    pub potential: LaurentPotential,
    pub alpha0: f64,
    pub alpha_end: f64,
    pub singularities: Vec<FHSingularity>,
}

impl FHSymbol {
    pub fn new(
        potential: LaurentPotential,
        alpha0: f64,
        alpha_end: f64,
        singularities: Vec<FHSingularity>,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(alpha0 >= 0.0 && alpha0.is_finite() && alpha_end >= 0.0 && alpha_end.is_finite()) {
            return bad("alpha0 and alpha_end must be finite and >= 0");
        }
        for (i, s) in singularities.iter().enumerate() {
            if !(s.t > 0.0 && s.t < PI) {
                return bad("singularity angles must lie in (0, pi)");
            }
            if !(s.alpha >= 0.0 && s.alpha.is_finite() && s.beta_im.is_finite()) {
                return bad("singularity alpha must be >= 0 and beta_im finite");
            }
            if i > 0 && singularities[i - 1].t >= s.t {
                return bad("singularity angles must be strictly increasing");
            }
        }
        Ok(FHSymbol { potential, alpha0, alpha_end, singularities })
    }

    /// The symbol `g ≡ 1`.
    pub fn identity() -> Self {
        FHSymbol {
            potential: LaurentPotential::zero(),
            alpha0: 0.0,
            alpha_end: 0.0,
            singularities: Vec::new(),
        }
    }

    /// Symbol `e^V` with no singularities.
    pub fn smooth(potential: LaurentPotential) -> Self {
        FHSymbol { potential, ..FHSymbol::identity() }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let mut lg = self.potential.eval(t);
        if self.alpha0 > 0.0 {
            let s = (t / 2.0).sin().abs();
            if s == 0.0 {
                return Ok(0.0);
            }
            lg += 2.0 * self.alpha0 * (2.0 * s).ln();
        }
        if self.alpha_end > 0.0 {
            let c = (t / 2.0).cos().abs();
            if c == 0.0 {
                return Ok(0.0);
            }
            lg += 2.0 * self.alpha_end * (2.0 * c).ln();
        }
        for s in &self.singularities {
            let on_point = t == s.t || t == -s.t;
            if s.alpha > 0.0 {
                let d1 = ((t - s.t) / 2.0).sin().abs();
                let d2 = ((t + s.t) / 2.0).sin().abs();
                if on_point || d1 == 0.0 || d2 == 0.0 {
                    return Ok(0.0);
                }
                lg += 2.0 * s.alpha * ((2.0 * d1).ln() + (2.0 * d2).ln());
            }
            if s.beta_im != 0.0 {
                if on_point {
                    return Err(Error::OnJump(t));
                }
                let a1 = principal_arg(t - PI - s.t);
                let a2 = principal_arg(-t - PI - s.t);
                lg -= s.beta_im * (a1 + a2);
            }
        }
        Ok(lg.exp())
    }

    /// Evaluation at the precision of `t`.
    pub fn eval_mp(&self, t: &Float) -> Result<Float> {
        let prec = t.prec();
        let mut lg = self.potential.eval_mp(t);
        let half = Float::with_val(prec, t / 2u32);
        if self.alpha0 > 0.0 {
            let s = Float::with_val(prec, half.sin_ref()).abs();
            if s.is_zero() {
                return Ok(mp::fl(prec, 0.0));
            }
            lg += Float::with_val(prec, s * 2u32).ln() * (2.0 * self.alpha0);
        }
        if self.alpha_end > 0.0 {
            let c = Float::with_val(prec, half.cos_ref()).abs();
            if c.is_zero() {
                return Ok(mp::fl(prec, 0.0));
            }
            lg += Float::with_val(prec, c * 2u32).ln() * (2.0 * self.alpha_end);
        }
        let p = mp::pi(prec);
        for s in &self.singularities {
            let tj = mp::fl(prec, s.t);
            let on_point = *t == tj || *t == Float::with_val(prec, -&tj);
            if s.alpha > 0.0 {
                if on_point {
                    return Ok(mp::fl(prec, 0.0));
                }
                let d1 = Float::with_val(prec, (Float::with_val(prec, t - &tj) / 2u32).sin()).abs();
                let d2 = Float::with_val(prec, (Float::with_val(prec, t + &tj) / 2u32).sin()).abs();
                if d1.is_zero() || d2.is_zero() {
                    return Ok(mp::fl(prec, 0.0));
                }
                let l = Float::with_val(prec, d1 * 2u32).ln() + Float::with_val(prec, d2 * 2u32).ln();
                lg += l * (2.0 * s.alpha);
            }
            if s.beta_im != 0.0 {
                if on_point {
                    return Err(Error::OnJump(s.t));
                }
                let mut a1 = Float::with_val(prec, t - &p) - &tj;
                let mut a2 = Float::with_val(prec, -t) - &p - &tj;
                mp::wrap_angle(&mut a1);
                mp::wrap_angle(&mut a2);
                lg -= (a1 + a2) * s.beta_im;
            }
        }
        Ok(lg.exp())
    }
}

fn principal_arg(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Symbol `e^V` on the arc `|t| <= t0` and `s e^V` on its complement.
#[derive(Clone, Debug, PartialEq)]
pub struct GapSymbol {
    pub potential: LaurentPotential,
    pub t0: f64,
    pub s: f64,
}

impl GapSymbol {
    pub fn new(potential: LaurentPotential, t0: f64, s: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 < PI) {
            return Err(Error::InvalidParameter("t0 must lie in (0, pi)".into()));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter("s must lie in [0, 1]".into()));
        }
        Ok(GapSymbol { potential, t0, s })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let v = self.potential.eval(t).exp();
        if t.abs() <= self.t0 {
            v
        } else {
            self.s * v
        }
    }

    pub fn eval_mp(&self, t: &Float) -> Float {
        let prec = t.prec();
        let v = self.potential.eval_mp(t).exp();
        if Float::with_val(prec, t.abs_ref()) <= self.t0 {
            v
        } else {
            v * self.s
        }
    }

    /// Representation `g = scale · g_FH` with one pure jump at `t0`; requires `s > 0`.
    pub fn fh_of_gap(&self) -> Result<(f64, FHSymbol)> {
        if self.s <= 0.0 {
            return Err(Error::InvalidParameter("s = 0 has no Fisher–Hartwig representation".into()));
        }
        let ls = self.s.ln();
        let scale = (ls * (1.0 - self.t0 / PI)).exp();
        let sing = FHSingularity { t: self.t0, alpha: 0.0, beta_im: ls / (2.0 * PI) };
        let fh = FHSymbol::new(self.potential.clone(), 0.0, 0.0, vec![sing])?;
        Ok((scale, fh))
    }
}

/// Quadrature-facing view of a symbol on `[0, pi]`.
pub trait Symbol: Sync {
    fn eval_at(&self, t: &Float) -> Result<Float>;
    /// Interior break angles in (0, pi), ascending, flagged true when the symbol has a root singularity there.
    fn breakpoints(&self) -> Vec<(f64, bool)>;
    /// Root singularities at the endpoints 0 and pi.
    fn endpoint_singular(&self) -> (bool, bool);
}

impl Symbol for FHSymbol {
    fn eval_at(&self, t: &Float) -> Result<Float> {
        self.eval_mp(t)
    }

    fn breakpoints(&self) -> Vec<(f64, bool)> {
        self.singularities
            .iter()
            .filter(|s| s.alpha > 0.0 || s.beta_im != 0.0)
            .map(|s| (s.t, s.alpha > 0.0))
            .collect()
    }

    fn endpoint_singular(&self) -> (bool, bool) {
        (self.alpha0 > 0.0, self.alpha_end > 0.0)
    }
}

impl Symbol for GapSymbol {
    fn eval_at(&self, t: &Float) -> Result<Float> {
        Ok(self.eval_mp(t))
    }

    fn breakpoints(&self) -> Vec<(f64, bool)> {
        if self.s == 1.0 {
            Vec::new()
        } else {
            vec![(self.t0, false)]
        }
    }

    fn endpoint_singular(&self) -> (bool, bool) {
        (false, false)
    }
}

/// Either symbol family, as read from JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySymbol {
    FisherHartwig(FHSymbol),
    Gap(GapSymbol),
}

impl Symbol for AnySymbol {
    fn eval_at(&self, t: &Float) -> Result<Float> {
        match self {
            AnySymbol::FisherHartwig(s) => s.eval_at(t),
            AnySymbol::Gap(s) => s.eval_at(t),
        }
    }

    fn breakpoints(&self) -> Vec<(f64, bool)> {
        match self {
            AnySymbol::FisherHartwig(s) => s.breakpoints(),
            AnySymbol::Gap(s) => s.breakpoints(),
        }
    }

    fn endpoint_singular(&self) -> (bool, bool) {
        match self {
            AnySymbol::FisherHartwig(s) => s.endpoint_singular(),
            AnySymbol::Gap(s) => s.endpoint_singular(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SymbolJson {
    FisherHartwig {
        #[serde(rename = "V", default)]
        v: Vec<f64>,
        #[serde(default)]
        alpha0: f64,
        #[serde(default)]
        alpha_end: f64,
        #[serde(default)]
        singularities: Vec<FHSingularity>,
    },
    Gap {
        #[serde(rename = "V", default)]
        v: Vec<f64>,
        t0: f64,
        s: f64,
    },
}

impl AnySymbol {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SymbolJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match raw {
            SymbolJson::FisherHartwig { v, alpha0, alpha_end, singularities } => Ok(AnySymbol::FisherHartwig(
                FHSymbol::new(LaurentPotential::new(v)?, alpha0, alpha_end, singularities)?,
            )),
            SymbolJson::Gap { v, t0, s } => Ok(AnySymbol::Gap(GapSymbol::new(LaurentPotential::new(v)?, t0, s)?)),
        }
    }

    pub fn to_json(&self) -> String {
        let raw = match self {
            AnySymbol::FisherHartwig(f) => SymbolJson::FisherHartwig {
                v: f.potential.coeffs.clone(),
                alpha0: f.alpha0,
                alpha_end: f.alpha_end,
                singularities: f.singularities.clone(),
            },
            AnySymbol::Gap(g) => SymbolJson::Gap { v: g.potential.coeffs.clone(), t0: g.t0, s: g.s },
        };
        serde_json::to_string(&raw).expect("symbol serializes")
    }
}

/// The pair `(j, ±)` selecting among O⁺_{2n}, O⁻_{2n+2}, O^±_{2n+1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnsembleLabel {
    /// (0,+): O⁺_{2n}
    ZeroPlus,
    /// (2,−): O⁻_{2n+2}
    TwoMinus,
    /// (1,+): O⁺_{2n+1}
    OnePlus,
    /// (1,−): O⁻_{2n+1}
    OneMinus,
}

impl EnsembleLabel {
    pub const ALL: [EnsembleLabel; 4] =
        [EnsembleLabel::ZeroPlus, EnsembleLabel::TwoMinus, EnsembleLabel::OnePlus, EnsembleLabel::OneMinus];

    pub fn new(j: u32, sign: i32) -> Result<Self> {
        match (j, sign) {
            (0, 1) => Ok(EnsembleLabel::ZeroPlus),
            (2, -1) => Ok(EnsembleLabel::TwoMinus),
            (1, 1) => Ok(EnsembleLabel::OnePlus),
            (1, -1) => Ok(EnsembleLabel::OneMinus),
            _ => Err(Error::InvalidParameter(format!("no ensemble label ({j},{sign})"))),
        }
    }

    pub fn j(self) -> u32 {
        match self {
            EnsembleLabel::ZeroPlus => 0,
            EnsembleLabel::TwoMinus => 2,
            EnsembleLabel::OnePlus | EnsembleLabel::OneMinus => 1,
        }
    }

    /// Determinant sign of the ensemble.
    pub fn sign(self) -> i32 {
        match self {
            EnsembleLabel::ZeroPlus | EnsembleLabel::OnePlus => 1,
            EnsembleLabel::TwoMinus | EnsembleLabel::OneMinus => -1,
        }
    }

    /// Matrix size `N = 2n + j`.
    pub fn matrix_size(self, n: usize) -> usize {
        2 * n + self.j() as usize
    }

    /// Label obtained under `θ -> π - θ`.
    pub fn reflected(self) -> Self {
        match self {
            EnsembleLabel::OnePlus => EnsembleLabel::OneMinus,
            EnsembleLabel::OneMinus => EnsembleLabel::OnePlus,
            other => other,
        }
    }

    /// Short code such as `0+`.
    pub fn code(self) -> &'static str {
        match self {
            EnsembleLabel::ZeroPlus => "0+",
            EnsembleLabel::TwoMinus => "2-",
            EnsembleLabel::OnePlus => "1+",
            EnsembleLabel::OneMinus => "1-",
        }
    }
}

impl Serialize for EnsembleLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl fmt::Display for EnsembleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for EnsembleLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0+" | "(0,+)" => Ok(EnsembleLabel::ZeroPlus),
            "2-" | "(2,-)" => Ok(EnsembleLabel::TwoMinus),
            "1+" | "(1,+)" => Ok(EnsembleLabel::OnePlus),
            "1-" | "(1,-)" => Ok(EnsembleLabel::OneMinus),
            other => Err(Error::Parse(format!("unknown label {other:?}; expected 0+, 2-, 1+ or 1-"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_jump(t1: f64, b: f64) -> FHSymbol {
        FHSymbol::new(
            LaurentPotential::zero(),
            0.0,
            0.0,
            vec![FHSingularity { t: t1, alpha: 0.0, beta_im: b }],
        )
        .unwrap()
    }

    #[test]
    fn piecewise_constant_jump_values() {
        let (t1, b) = (1.1, 0.37);
        let g = one_jump(t1, b);
        let outside = (2.0 * b * t1).exp();
        let inside = outside * (-2.0 * PI * b).exp();
        for t in [1.5, 2.0, 3.1, -1.3, -3.0, PI] {
            assert!((g.eval(t).unwrap() / outside - 1.0).abs() < 1e-14, "t={t}");
        }
        for t in [0.0, 0.5, -0.9, 1.0] {
            assert!((g.eval(t).unwrap() / inside - 1.0).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn mp_agrees_with_f64() {
        let g = FHSymbol::new(
            LaurentPotential::new(vec![0.1, 0.2, -0.05]).unwrap(),
            0.5,
            0.25,
            vec![
                FHSingularity { t: 0.7, alpha: 0.3, beta_im: 0.4 },
                FHSingularity { t: 2.0, alpha: 0.0, beta_im: -0.6 },
            ],
        )
        .unwrap();
        for i in 0..50 {
            let t = -3.1 + 0.1234 * i as f64;
            let a = g.eval(t).unwrap();
            let b = g.eval_mp(&mp::fl(128, t)).unwrap().to_f64();
            assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300), "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn identity_and_constant() {
        assert_eq!(FHSymbol::identity().eval(0.3).unwrap(), 1.0);
        let c = FHSymbol::smooth(LaurentPotential::new(vec![0.3]).unwrap());
        assert!((c.eval(2.2).unwrap() - 0.3f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn singular_points() {
        let g = FHSymbol::new(
            LaurentPotential::zero(),
            0.5,
            0.0,
            vec![FHSingularity { t: 1.0, alpha: 0.25, beta_im: 0.0 }],
        )
        .unwrap();
        assert_eq!(g.eval(1.0).unwrap(), 0.0);
        assert_eq!(g.eval(0.0).unwrap(), 0.0);
        assert!(matches!(one_jump(1.0, 0.5).eval(1.0), Err(Error::OnJump(_))));
        assert!(matches!(one_jump(1.0, 0.5).eval_mp(&mp::fl(64, -1.0)), Err(Error::OnJump(_))));
    }

    #[test]
    fn gap_values() {
        let g = GapSymbol::new(LaurentPotential::zero(), PI / 2.0, 0.0).unwrap();
        assert_eq!(g.eval(0.1), 1.0);
        assert_eq!(g.eval(3.0), 0.0);
        let g = GapSymbol::new(LaurentPotential::zero(), PI / 2.0, 0.25).unwrap();
        assert_eq!(g.eval(3.0), 0.25);
    }

    #[test]
    fn fh_of_gap_examples() {
        let g = GapSymbol::new(LaurentPotential::zero(), PI / 2.0, 1.0).unwrap();
        let (scale, fh) = g.fh_of_gap().unwrap();
        assert_eq!(scale, 1.0);
        assert_eq!(fh.singularities[0].beta_im, 0.0);
        assert_eq!(fh.eval(0.4).unwrap(), 1.0);

        let g = GapSymbol::new(LaurentPotential::zero(), PI / 2.0, (-2.0 * PI).exp()).unwrap();
        let (scale, fh) = g.fh_of_gap().unwrap();
        assert!((scale - (-PI).exp()).abs() < 1e-15);
        for t in [0.1, 3.0] {
            assert!((scale * fh.eval(t).unwrap() / g.eval(t) - 1.0).abs() < 1e-14);
        }
        assert!(GapSymbol::new(LaurentPotential::zero(), 1.0, 0.0).unwrap().fh_of_gap().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"type":"fisher_hartwig","V":[0.1,0.2],"alpha0":0.5,"alpha_end":0,
            "singularities":[{"t":1.0,"alpha":0.25,"beta_im":0.5}]}"#;
        let s = AnySymbol::from_json(text).unwrap();
        assert_eq!(AnySymbol::from_json(&s.to_json()).unwrap(), s);
        let gap = AnySymbol::from_json(r#"{"type":"gap","V":[],"t0":1.2,"s":0.0}"#).unwrap();
        assert!(matches!(gap, AnySymbol::Gap(_)));
        assert!(AnySymbol::from_json(r#"{"type":"gap","t0":4.0,"s":0.0}"#).is_err());
        assert!(AnySymbol::from_json(r#"{"type":"bogus"}"#).is_err());
    }

    #[test]
    fn labels() {
        for l in EnsembleLabel::ALL {
            assert_eq!(l.code().parse::<EnsembleLabel>().unwrap(), l);
            assert_eq!(EnsembleLabel::new(l.j(), l.sign()).unwrap(), l);
            assert_eq!(l.reflected().reflected(), l);
        }
        assert!(EnsembleLabel::new(0, -1).is_err());
        assert_eq!(EnsembleLabel::TwoMinus.matrix_size(3), 8);
    }
}
