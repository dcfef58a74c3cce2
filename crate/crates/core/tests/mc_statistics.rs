//! Statistical checks of the Haar sampler against exact laws and exact determinant values.
//! Every test uses a fixed seed; thresholds are p > 0.001 for distribution tests,
//! 4σ (σ from the exact probability) for histogram bins, and an exact two-sided binomial
//! test at level 0.0027 (the 3σ level) for gap probabilities, many of which are rare events.

use std::f64::consts::PI;

use orthoavg::ensembles::{gap_generating, occupancy_distribution};
use orthoavg::mc::{empirical_gap, occupancy_histogram, rigidity_experiment, sample_ensemble, sample_haar_orthogonal, sample_rng};
use orthoavg::symbols::{EnsembleLabel, LaurentPotential};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete, DiscreteCDF};

/// Asymptotic Kolmogorov distribution tail with the Stephens small-sample correction.
fn ks_p_value(d: f64, m: usize) -> f64 {
    let sm = (m as f64).sqrt();
    let lam = d * (sm + 0.12 + 0.11 / sm);
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-2.0 * (k * k) as f64 * lam * lam).exp();
        p += if k % 2 == 1 { term } else { -term };
    }
    p.clamp(0.0, 1.0)
}

/// Two-sided exact binomial p-value of observing `k` successes in `m` trials.
fn binomial_p_value(k: u64, m: u64, p: f64) -> f64 {
    let b = Binomial::new(p.clamp(0.0, 1.0), m).unwrap();
    let lower = b.cdf(k);
    let upper = 1.0 - b.cdf(k) + b.pmf(k);
    (2.0 * lower.min(upper)).min(1.0)
}

/// CDF of the single free angle (n = 1), integrated by hand from the joint density.
fn one_angle_cdf(label: EnsembleLabel, x: f64) -> f64 {
    match label {
        EnsembleLabel::ZeroPlus => x / PI,
        EnsembleLabel::TwoMinus => (x - x.sin() * x.cos()) / PI,
        EnsembleLabel::OnePlus => (x - x.sin()) / PI,
        EnsembleLabel::OneMinus => (x + x.sin()) / PI,
    }
}

#[test]
fn one_by_one_haar_is_fair_sign() {
    let draws = 10_000;
    let mut plus = 0usize;
    for i in 0..draws {
        let q = sample_haar_orthogonal(1, &mut sample_rng(5, i as u64)).unwrap();
        assert!((q[(0, 0)].abs() - 1.0).abs() < 1e-15);
        if q[(0, 0)] > 0.0 {
            plus += 1;
        }
    }
    let e = draws as f64 / 2.0;
    let chi2 = ((plus as f64 - e).powi(2) + ((draws - plus) as f64 - e).powi(2)) / e;
    let p = 1.0 - ChiSquared::new(1.0).unwrap().cdf(chi2);
    assert!(p > 0.001, "chi2 = {chi2}, p = {p}");
}

#[test]
fn single_angle_law() {
    let m = 10_000;
    for (li, label) in EnsembleLabel::ALL.into_iter().enumerate() {
        let mut xs: Vec<f64> = (0..m)
            .map(|i| sample_ensemble(label, 1, &mut sample_rng(17 + li as u64, i as u64)).unwrap().angles[0])
            .collect();
        xs.sort_by(f64::total_cmp);
        let mut d = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let f = one_angle_cdf(label, x);
            d = d.max((f - i as f64 / m as f64).abs()).max(((i + 1) as f64 / m as f64 - f).abs());
        }
        let p = ks_p_value(d, m);
        assert!(p > 0.001, "{label}: D = {d}, p = {p}");
    }
}

#[test]
fn gap_probabilities_match_exact_values() {
    let samples = 2000;
    let z = LaurentPotential::zero();
    for (li, label) in EnsembleLabel::ALL.into_iter().enumerate() {
        for n in [3usize, 12, 30] {
            for t0 in [PI / 8.0, PI / 4.0, PI / 2.0] {
                let exact = gap_generating(label, n, t0, 0.0, &z, 192).unwrap().log_value.value_f64();
                let seed = 1000 + 100 * li as u64 + n as u64;
                let (est, _) = empirical_gap(label, n, t0, samples, seed).unwrap();
                let k = (est * samples as f64).round() as u64;
                let p = binomial_p_value(k, samples as u64, exact);
                assert!(p >= 0.0027, "{label} n={n} t0={t0}: {est} vs {exact} (p {p})");
            }
        }
    }
}

#[test]
fn occupancy_histogram_matches_exact_distribution() {
    let samples = 100_000;
    let n = 4;
    for label in [EnsembleLabel::ZeroPlus, EnsembleLabel::OneMinus] {
        let exact = occupancy_distribution(label, n, PI / 2.0, 256).unwrap();
        let hist = occupancy_histogram(label, n, PI / 2.0, samples, 77).unwrap();
        for (m, (&p, &c)) in exact.iter().zip(&hist).enumerate() {
            let est = c as f64 / samples as f64;
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            assert!((est - p).abs() <= 4.0 * sigma + 1e-15, "{label} m={m}: {est} vs {p}");
        }
    }
}

#[test]
fn rigidity_fraction_trend() {
    let samples = 200;
    let a = rigidity_experiment(EnsembleLabel::ZeroPlus, 50, samples, 1.0, 8).unwrap();
    let b = rigidity_experiment(EnsembleLabel::ZeroPlus, 200, samples, 1.0, 9).unwrap();
    assert_eq!(a.pathwise_checked, samples);
    assert_eq!(b.pathwise_checked, samples);
    for (fa, fb) in [(a.angle_fraction, b.angle_fraction), (a.count_fraction, b.count_fraction)] {
        let noise = 2.0 * ((fa * (1.0 - fa) + fb * (1.0 - fb)) / samples as f64).sqrt();
        assert!(fb >= fa - noise - 1e-12, "{a:?} {b:?}");
    }
}
