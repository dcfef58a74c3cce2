//! Fourier coefficients of even symbols by graded composite Gauss–Legendre quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::mp;
use crate::quad::{gauss_legendre, GaussRule};
use crate::symbols::Symbol;

/// Nodes per panel.
const PANEL_ORDER: usize = 32;
/// Extra bits carried while accumulating panel sums.
const GUARD_BITS: u32 = 24;
/// Maximum grading depth toward a root singularity.
const MAX_GRADING_DEPTH: u32 = 60;

/// Fourier coefficients `g_0..g_M` of an even symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    pub g: Vec<Float>,
    /// Estimated absolute error per coefficient.
    pub err_bound: f64,
}

impl MomentSequence {
    pub fn new(g: Vec<Float>, err_bound: f64) -> Self {
        MomentSequence { g, err_bound }
    }

    /// Exact moments given as f64 values, stored at `prec` bits.
    pub fn from_f64(values: &[f64], prec: u32) -> Self {
        MomentSequence { g: values.iter().map(|&v| mp::fl(prec, v)).collect(), err_bound: 0.0 }
    }

    /// Largest available index `M`.
    pub fn max_index(&self) -> usize {
        self.g.len().saturating_sub(1)
    }

    pub fn prec(&self) -> u32 {
        self.g.first().map(|x| x.prec()).unwrap_or(mp::DEFAULT_PRECISION)
    }

    /// `g_m` for any integer m, using `g_{-m} = g_m`.
    pub fn get(&self, m: i64) -> &Float {
        &self.g[m.unsigned_abs() as usize]
    }

    pub fn require(&self, needed: usize) -> Result<()> {
        if self.g.len() <= needed {
            return Err(Error::InsufficientMoments { needed, available: self.max_index() });
        }
        Ok(())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.g.iter().map(|x| x.to_f64()).collect()
    }

    /// Cache file: header `m, g_m, err` and one row per coefficient.
    pub fn write_cache<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "m, g_m, err")?;
        for (m, g) in self.g.iter().enumerate() {
            writeln!(w, "{}, {}, {:e}", m, mp::to_decimal(g), self.err_bound)?;
        }
        Ok(())
    }

    pub fn read_cache<R: BufRead>(r: R, prec: u32) -> Result<Self> {
        let mut g = Vec::new();
        let mut err_bound = 0.0f64;
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if i == 0 {
                if line.replace(' ', "") != "m,g_m,err" {
                    return Err(Error::Parse(format!("bad moment cache header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 columns", i + 1)));
            }
            let m: usize = cols[0].parse().map_err(|_| Error::Parse(format!("line {}: bad index", i + 1)))?;
            if m != g.len() {
                return Err(Error::Parse(format!("line {}: index {m} out of order", i + 1)));
            }
            let v = mp::parse(prec, cols[1]).ok_or_else(|| Error::Parse(format!("line {}: bad value", i + 1)))?;
            let e: f64 = cols[2].parse().map_err(|_| Error::Parse(format!("line {}: bad error", i + 1)))?;
            err_bound = err_bound.max(e);
            g.push(v);
        }
        Ok(MomentSequence { g, err_bound })
    }
}

/// Every coefficient multiplied by `c > 0`.
pub fn moments_of_scaled(ms: &MomentSequence, c: &Float) -> Result<MomentSequence> {
    if *c <= 0 {
        return Err(Error::InvalidParameter("scale must be positive".into()));
    }
    let g = ms.g.iter().map(|x| Float::with_val(x.prec(), x * c)).collect();
    Ok(MomentSequence { g, err_bound: ms.err_bound * c.to_f64() })
}

struct Panel {
    a: Float,
    b: Float,
    left: Vec<Float>,
    right: Vec<Float>,
    err: f64,
}

#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

/// `(1/pi) ∫_a^b g(t) cos(mt) dt` for m = 0..=M.
fn panel_sums<S: Symbol + ?Sized>(sym: &S, a: &Float, b: &Float, m_max: usize, rule: &GaussRule) -> Result<Vec<Float>> {
    let wp = a.prec();
    let half = Float::with_val(wp, b - a) / 2u32;
    let mid = Float::with_val(wp, a + b) / 2u32;
    let mut acc = vec![Float::new(wp); m_max + 1];
    let mut t = Float::new(wp);
    let mut gw = Float::new(wp);
    let mut c_prev = Float::new(wp);
    let mut c_cur = Float::new(wp);
    let mut two_c1 = Float::new(wp);
    let mut tmp = Float::new(wp);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        t.assign(&half * x);
        t += &mid;
        let g = sym.eval_at(&t)?;
        if g.is_zero() {
            continue;
        }
        gw.assign(&g * w);
        acc[0] += &gw;
        if m_max == 0 {
            continue;
        }
        c_prev.assign(1u32);
        c_cur.assign(t.cos_ref());
        two_c1.assign(&c_cur * 2u32);
        for slot in acc.iter_mut().skip(1) {
            tmp.assign(&gw * &c_cur);
            *slot += &tmp;
            tmp.assign(&two_c1 * &c_cur);
            tmp -= &c_prev;
            std::mem::swap(&mut c_prev, &mut c_cur);
            std::mem::swap(&mut c_cur, &mut tmp);
        }
    }
    let scale = half / mp::pi(wp);
    for v in acc.iter_mut() {
        *v *= &scale;
    }
    Ok(acc)
}

fn make_panel<S: Symbol + ?Sized>(sym: &S, a: Float, b: Float, whole: Option<Vec<Float>>, m_max: usize, rule: &GaussRule) -> Result<Panel> {
    let wp = a.prec();
    let mid = Float::with_val(wp, &a + &b) / 2u32;
    let whole = match whole {
        Some(w) => w,
        None => panel_sums(sym, &a, &b, m_max, rule)?,
    };
    let left = panel_sums(sym, &a, &mid, m_max, rule)?;
    let right = panel_sums(sym, &mid, &b, m_max, rule)?;
    let mut err = 0.0f64;
    let mut d = Float::new(wp);
    for ((w, l), r) in whole.iter().zip(&left).zip(&right) {
        d.assign(w - l);
        d -= r;
        err = err.max(d.to_f64().abs());
    }
    Ok(Panel { a, b, left, right, err })
}

/// Initial panel boundaries: split at breakpoints, grade toward root singularities, cap lengths.
fn initial_mesh<S: Symbol + ?Sized>(sym: &S, m_max: usize, tol: f64, wp: u32) -> Vec<Float> {
    let (sing0, sing_pi) = sym.endpoint_singular();
    let mut breaks: Vec<(Float, bool)> = vec![(mp::fl(wp, 0.0), sing0)];
    for (t, alg) in sym.breakpoints() {
        breaks.push((mp::fl(wp, t), alg));
    }
    breaks.push((mp::pi(wp), sing_pi));
    let depth = ((1.0 / tol).log2().ceil().max(1.0) as u32).min(MAX_GRADING_DEPTH);

    let mut pts: Vec<Float> = vec![breaks[0].0.clone()];
    for w in breaks.windows(2) {
        let (a, la) = (&w[0].0, w[0].1);
        let (b, lb) = (&w[1].0, w[1].1);
        let mid = Float::with_val(wp, a + b) / 2u32;
        let mut local: Vec<Float> = Vec::new();
        if la {
            let len = if lb { Float::with_val(wp, &mid - a) } else { Float::with_val(wp, b - a) };
            for k in (1..=depth).rev() {
                local.push(Float::with_val(wp, &len >> k) + a);
            }
        }
        if la && lb {
            local.push(mid.clone());
        }
        if lb {
            let len = if la { Float::with_val(wp, b - &mid) } else { Float::with_val(wp, b - a) };
            for k in 1..=depth {
                local.push(Float::with_val(wp, b - Float::with_val(wp, &len >> k)));
            }
        }
        local.push(b.clone());
        pts.extend(local);
    }

    let hmax = mp::pi(wp) / (4 * m_max.max(1)) as u32;
    let mut mesh = vec![pts[0].clone()];
    for w in pts.windows(2) {
        let len = Float::with_val(wp, &w[1] - &w[0]);
        let pieces = Float::with_val(wp, &len / &hmax).ceil().to_f64().max(1.0) as u32;
        for i in 1..pieces {
            mesh.push(Float::with_val(wp, &len * i) / pieces + &w[0]);
        }
        mesh.push(w[1].clone());
    }
    mesh
}

/// Coefficients `g_m = (1/pi) ∫_0^pi g(t) cos(mt) dt`, m = 0..=M, to absolute tolerance `tol`.
pub fn compute_moments<S: Symbol + ?Sized>(sym: &S, m_max: usize, tol: f64, prec: u32) -> Result<MomentSequence> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if prec < 53 {
        return Err(Error::InvalidParameter("precision must be at least 53 bits".into()));
    }
    let wp = prec + GUARD_BITS;
    let rule = gauss_legendre(PANEL_ORDER, wp);
    let mesh = initial_mesh(sym, m_max, tol, wp);
    let mut panels: Vec<Option<Panel>> = mesh
        .par_windows(2)
        .map(|w| make_panel(sym, w[0].clone(), w[1].clone(), None, m_max, &rule).map(Some))
        .collect::<Result<_>>()?;
    let budget = (4 * panels.len()).max(4000);

    let mut heap: BinaryHeap<Key> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| Key(p.as_ref().unwrap().err, i))
        .collect();
    let mut total: f64 = heap.iter().map(|k| k.0).sum();
    let mut live = panels.len();
    while total > tol {
        if live >= budget {
            return Err(Error::Quadrature { requested: tol, achieved: total });
        }
        let Key(_, idx) = heap.pop().expect("nonempty panel heap");
        let p = panels[idx].take().unwrap();
        let mid = Float::with_val(wp, &p.a + &p.b) / 2u32;
        let (l, r) = rayon::join(
            || make_panel(sym, p.a.clone(), mid.clone(), Some(p.left), m_max, &rule),
            || make_panel(sym, mid.clone(), p.b.clone(), Some(p.right), m_max, &rule),
        );
        let (l, r) = (l?, r?);
        total += l.err + r.err - p.err;
        heap.push(Key(l.err, panels.len()));
        panels.push(Some(l));
        heap.push(Key(r.err, panels.len()));
        panels.push(Some(r));
        live += 1;
        if live % 64 == 0 {
            total = heap.iter().map(|k| k.0).sum();
        }
    }
    total = heap.iter().map(|k| k.0).sum();

    let mut g = vec![Float::new(wp); m_max + 1];
    for p in panels.iter().flatten() {
        for (m, slot) in g.iter_mut().enumerate() {
            *slot += &p.left[m];
            *slot += &p.right[m];
        }
    }
    let rounding = mp::ulp_scale(prec) * 4.0 * g[0].to_f64().abs().max(1.0);
    let g = g.into_iter().map(|x| Float::with_val(prec, x)).collect();
    Ok(MomentSequence { g, err_bound: total + rounding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{FHSingularity, FHSymbol, GapSymbol, LaurentPotential};
    use std::f64::consts::PI;

    #[test]
    fn identity_symbol() {
        let ms = compute_moments(&FHSymbol::identity(), 6, 1e-30, 128).unwrap();
        assert!((ms.g[0].to_f64() - 1.0).abs() < 1e-15);
        for m in 1..=6 {
            assert!(ms.g[m].to_f64().abs() < 1e-15);
        }
    }

    #[test]
    fn gap_closed_form() {
        for &(t0, s) in &[(PI / 2.0, 0.0), (1.0, 0.25), (2.7, 0.6)] {
            let sym = GapSymbol::new(LaurentPotential::zero(), t0, s).unwrap();
            let ms = compute_moments(&sym, 12, 1e-40, 256).unwrap();
            let prec = 256;
            let p = mp::pi(prec);
            let t0f = mp::fl(prec, t0);
            let g0 = (Float::with_val(prec, &t0f + Float::with_val(prec, &p - &t0f) * s)) / &p;
            assert!((Float::with_val(prec, &ms.g[0] - &g0)).abs() < 1e-38);
            for m in 1..=12u32 {
                let exact = Float::with_val(prec, &t0f * m).sin() * (1.0 - s) / Float::with_val(prec, &p * m);
                let d = Float::with_val(prec, &ms.g[m as usize] - exact).abs();
                assert!(d < 1e-38, "m={m}: {d}");
            }
        }
    }

    #[test]
    fn root_singularity_converges() {
        let sym = FHSymbol::new(
            LaurentPotential::zero(),
            0.5,
            0.0,
            vec![FHSingularity { t: PI / 2.0, alpha: 0.25, beta_im: 0.0 }],
        )
        .unwrap();
        let a = compute_moments(&sym, 8, 1e-25, 192).unwrap();
        let b = compute_moments(&sym, 8, 1e-35, 256).unwrap();
        assert!(a.err_bound < 1e-24);
        for m in 0..=8 {
            let d = Float::with_val(256, &a.g[m] - &b.g[m]).abs().to_f64();
            assert!(d < 1e-24, "m={m}: {d:e}");
        }
    }

    #[test]
    fn budget_exhaustion_reports_bound() {
        let sym = GapSymbol::new(LaurentPotential::zero(), 1.0, 0.5).unwrap();
        match compute_moments(&sym, 4, 1e-60, 64) {
            Err(Error::Quadrature { achieved, .. }) => assert!(achieved > 1e-60),
            other => panic!("expected quadrature failure, got {other:?}"),
        }
    }

    #[test]
    fn scaling_and_cache_roundtrip() {
        let sym = GapSymbol::new(LaurentPotential::new(vec![0.1, 0.2]).unwrap(), 1.3, 0.4).unwrap();
        let ms = compute_moments(&sym, 5, 1e-30, 160).unwrap();
        let same = moments_of_scaled(&ms, &mp::fl(160, 1.0)).unwrap();
        assert_eq!(same.g, ms.g);
        let twice = moments_of_scaled(&ms, &mp::fl(160, 2.0)).unwrap();
        assert_eq!(twice.g[3], Float::with_val(160, &ms.g[3] * 2u32));
        assert!(moments_of_scaled(&ms, &mp::fl(160, 0.0)).is_err());

        let mut buf = Vec::new();
        ms.write_cache(&mut buf).unwrap();
        let back = MomentSequence::read_cache(&buf[..], 160).unwrap();
        assert_eq!(back.g, ms.g);
        let mut buf2 = Vec::new();
        back.write_cache(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }
}
