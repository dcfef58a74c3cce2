//! Monte Carlo sampling of Haar orthogonal matrices and eigenangle statistics.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbols::EnsembleLabel;

/// Distance from ±1 within which an eigenvalue is treated as a fixed eigenvalue.
pub const FIXED_EIGENVALUE_TOL: f64 = 1e-8;

/// Independent generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-distributed element of O(N): QR of a Gaussian matrix with the columns of Q
/// multiplied by the signs of diag(R).
pub fn sample_haar_orthogonal<R: Rng + ?Sized>(big_n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    if big_n == 0 {
        return Err(Error::InvalidParameter("matrix size must be at least 1".into()));
    }
    let z = DMatrix::<f64>::from_fn(big_n, big_n, |_, _| rng.sample(StandardNormal));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenangleSample {
    pub label: EnsembleLabel,
    pub n: usize,
    /// The free eigenangles in (0, π), ascending.
    pub angles: Vec<f64>,
}

/// Number of eigenvalues at +1 and at −1 forced by the label.
fn fixed_eigenvalues(label: EnsembleLabel) -> (usize, usize) {
    match label {
        EnsembleLabel::ZeroPlus => (0, 0),
        EnsembleLabel::TwoMinus => (1, 1),
        EnsembleLabel::OnePlus => (1, 0),
        EnsembleLabel::OneMinus => (0, 1),
    }
}

/// Free eigenangles of an orthogonal matrix after removing the fixed eigenvalues the label prescribes.
pub fn free_angles(q: &DMatrix<f64>, label: EnsembleLabel, n: usize) -> Result<Vec<f64>> {
    let mut eig: Vec<(f64, f64)> = q.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    let (plus, minus) = fixed_eigenvalues(label);
    for (target, count) in [(1.0, plus), (-1.0, minus)] {
        for _ in 0..count {
            let (idx, dist) = eig
                .iter()
                .enumerate()
                .map(|(i, &(re, im))| (i, (re - target).hypot(im)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::Sampling("no eigenvalues left to strip".into()))?;
            if dist > FIXED_EIGENVALUE_TOL {
                return Err(Error::Sampling(format!(
                    "label {label}: expected an eigenvalue at {target:+}, nearest is {dist:e} away"
                )));
            }
            eig.swap_remove(idx);
        }
    }
    let mut angles: Vec<f64> = eig.iter().filter(|&&(_, im)| im > 0.0).map(|&(re, im)| im.atan2(re)).collect();
    if angles.len() != n || eig.len() != 2 * n {
        return Err(Error::Sampling(format!(
            "label {label}: found {} free angles among {} eigenvalues, expected {n}",
            angles.len(),
            eig.len()
        )));
    }
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// One draw of the free eigenangles of the ensemble `label` with `n` free angles.
/// Haar O(2n+j) matrices are drawn until the determinant has the label's sign.
pub fn sample_ensemble<R: Rng + ?Sized>(label: EnsembleLabel, n: usize, rng: &mut R) -> Result<EigenangleSample> {
    let big_n = label.matrix_size(n);
    let want = label.sign() as f64;
    let q = loop {
        let q = sample_haar_orthogonal(big_n, rng)?;
        if q.determinant() * want > 0.0 {
            break q;
        }
    };
    let angles = free_angles(&q, label, n)?;
    Ok(EigenangleSample { label, n, angles })
}

/// Counting statistics of one sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountingStats {
    /// max_k |θ_k − πk/n|
    pub max_angle_dev: f64,
    /// max_{k=1..n} |N(0, πk/n) − (k−1)|
    pub max_count_dev: f64,
    /// sup_t |N(0,t) − nt/π|
    pub sup_count_dev: f64,
}

impl CountingStats {
    pub fn from_angles(angles: &[f64]) -> Self {
        let n = angles.len();
        let nf = n as f64;
        let mut max_angle_dev = 0.0f64;
        for (k, &th) in angles.iter().enumerate() {
            max_angle_dev = max_angle_dev.max((th - PI * (k + 1) as f64 / nf).abs());
        }
        let mut max_count_dev = 0.0f64;
        for k in 1..=n {
            let t = PI * k as f64 / nf;
            let count = angles.partition_point(|&th| th < t);
            max_count_dev = max_count_dev.max((count as f64 - (k as f64 - 1.0)).abs());
        }
        let mut sup_count_dev = 0.0f64;
        for k in 0..=n {
            let lo = if k == 0 { 0.0 } else { angles[k - 1] };
            let hi = if k == n { PI } else { angles[k] };
            let above = k as f64 - nf * lo / PI;
            let below = nf * hi / PI - k as f64;
            sup_count_dev = sup_count_dev.max(above).max(below);
        }
        CountingStats { max_angle_dev, max_count_dev, sup_count_dev }
    }

    /// Both almost-sure inequalities bounding the deviations by the discretised count deviation.
    pub fn pathwise_bounds_hold(&self, n: usize) -> bool {
        let slack = 1e-12;
        self.sup_count_dev <= 2.0 + self.max_count_dev + slack
            && self.max_angle_dev <= PI / n as f64 * (1.0 + self.max_count_dev) + slack
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityReport {
    pub label: EnsembleLabel,
    pub n: usize,
    pub samples: usize,
    pub eps: f64,
    pub seed: u64,
    /// Fraction of samples with max_angle_dev < (1+eps) log n / n.
    pub angle_fraction: f64,
    /// Fraction of samples with sup_count_dev < (1/π + eps) log n.
    pub count_fraction: f64,
    /// Number of samples on which both pathwise inequalities were verified.
    pub pathwise_checked: usize,
}

fn draw_many<T: Send>(
    label: EnsembleLabel,
    n: usize,
    samples: usize,
    seed: u64,
    f: impl Fn(&EigenangleSample) -> T + Sync,
) -> Result<Vec<T>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            sample_ensemble(label, n, &mut rng).map(|s| f(&s))
        })
        .collect()
}

/// Rigidity fractions over `samples` draws; fails if any sample violates the pathwise inequalities.
pub fn rigidity_experiment(label: EnsembleLabel, n: usize, samples: usize, eps: f64, seed: u64) -> Result<RigidityReport> {
    if samples == 0 || n < 2 {
        return Err(Error::InvalidParameter("need samples >= 1 and n >= 2".into()));
    }
    let stats = draw_many(label, n, samples, seed, |s| CountingStats::from_angles(&s.angles))?;
    if let Some(bad) = stats.iter().position(|st| !st.pathwise_bounds_hold(n)) {
        return Err(Error::Sampling(format!("pathwise counting inequality violated on sample {bad}: {:?}", stats[bad])));
    }
    let ln = (n as f64).ln();
    let angle_bound = (1.0 + eps) * ln / n as f64;
    let count_bound = (1.0 / PI + eps) * ln;
    let frac = |pred: &dyn Fn(&CountingStats) -> bool| stats.iter().filter(|s| pred(s)).count() as f64 / samples as f64;
    Ok(RigidityReport {
        label,
        n,
        samples,
        eps,
        seed,
        angle_fraction: frac(&|s| s.max_angle_dev < angle_bound),
        count_fraction: frac(&|s| s.sup_count_dev < count_bound),
        pathwise_checked: stats.len(),
    })
}

/// Fraction of samples with no free angle in (0, t0), with its binomial standard error.
pub fn empirical_gap(label: EnsembleLabel, n: usize, t0: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let hist = occupancy_histogram(label, n, t0, samples, seed)?;
    let p = hist[0] as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

/// Counts of samples having exactly m free angles in (0, t0), for m = 0..=n.
pub fn occupancy_histogram(label: EnsembleLabel, n: usize, t0: f64, samples: usize, seed: u64) -> Result<Vec<u64>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let counts = draw_many(label, n, samples, seed, |s| s.angles.partition_point(|&th| th < t0))?;
    let mut hist = vec![0u64; n + 1];
    for c in counts {
        hist[c] += 1;
    }
    Ok(hist)
}

/// Per-sample summary row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSummary {
    pub label: EnsembleLabel,
    pub n: usize,
    pub seed: u64,
    pub index: usize,
    pub max_angle_dev: f64,
    pub sup_count_dev: f64,
    /// 1 when no free angle lies in (0, t0).
    pub gap_indicator: u8,
}

pub fn sample_summaries(label: EnsembleLabel, n: usize, t0: f64, samples: usize, seed: u64) -> Result<Vec<SampleSummary>> {
    let rows = draw_many(label, n, samples, seed, |s| {
        let st = CountingStats::from_angles(&s.angles);
        (st, u8::from(s.angles.first().is_none_or(|&a| a >= t0)))
    })?;
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(index, (st, gap))| SampleSummary {
            label,
            n,
            seed,
            index,
            max_angle_dev: st.max_angle_dev,
            sup_count_dev: st.sup_count_dev,
            gap_indicator: gap,
        })
        .collect())
}
