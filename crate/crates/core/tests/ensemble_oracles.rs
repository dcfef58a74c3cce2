//! Exact ensemble averages checked against direct integration of the joint density
//! and against structural properties.

use std::f64::consts::PI;

use orthoavg::ensembles::{check_identities, exact_average_both, exact_average_th, gap_generating, moments_needed};
use orthoavg::moments::{compute_moments, moments_of_scaled};
use orthoavg::mp;
use orthoavg::symbols::{EnsembleLabel, FHSingularity, FHSymbol, GapSymbol, LaurentPotential};
use proptest::prelude::*;

/// Gauss–Legendre nodes and weights on [a, b] by Newton iteration on P_n.
fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((b - a) / 2.0 * x + (a + b) / 2.0, (b - a) / 2.0 * w));
    }
    out
}

fn density(label: EnsembleLabel, th: &[f64]) -> f64 {
    let n = th.len();
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
    }
    let mut p = match label {
        EnsembleLabel::ZeroPlus => 2.0,
        _ => 1.0,
    } / (fact * (2.0 * PI).powi(n as i32));
    for j in 0..n {
        p *= match label {
            EnsembleLabel::ZeroPlus => 1.0,
            EnsembleLabel::TwoMinus => (2.0 * th[j].sin()).powi(2),
            EnsembleLabel::OnePlus => 2.0 * (1.0 - th[j].cos()),
            EnsembleLabel::OneMinus => 2.0 * (1.0 + th[j].cos()),
        };
        for k in j + 1..n {
            p *= (2.0 * th[k].cos() - 2.0 * th[j].cos()).powi(2);
        }
    }
    p
}

/// ∫∫ density · g(θ1) g(θ2) over the given intervals in each coordinate.
fn two_dim_average(label: EnsembleLabel, pieces: &[(f64, f64)], g: impl Fn(f64) -> f64) -> f64 {
    let rule: Vec<(f64, f64)> = pieces.iter().flat_map(|&(a, b)| gauss_legendre(40, a, b)).collect();
    let mut s = 0.0;
    for &(x, wx) in &rule {
        for &(y, wy) in &rule {
            s += wx * wy * density(label, &[x, y]) * g(x) * g(y);
        }
    }
    s
}

#[test]
fn density_is_normalized() {
    for label in EnsembleLabel::ALL {
        let z = two_dim_average(label, &[(0.0, PI)], |_| 1.0);
        assert!((z - 1.0).abs() < 1e-13, "{label}: {z}");
    }
}

#[test]
fn gap_symbol_matches_joint_density_quadrature() {
    let prec = 256;
    let sym = GapSymbol::new(LaurentPotential::zero(), PI / 2.0, 0.25).unwrap();
    let ms = compute_moments(&sym, 6, 1e-40, prec).unwrap();
    for label in EnsembleLabel::ALL {
        let exact = exact_average_th(&ms, 2, label, prec).unwrap().log_value.value_f64();
        let oracle = two_dim_average(label, &[(0.0, PI / 2.0), (PI / 2.0, PI)], |t| sym.eval(t));
        assert!((exact - oracle).abs() < 1e-8 * oracle, "{label}: {exact} vs {oracle}");
    }
}

#[test]
fn gap_probability_matches_restricted_density() {
    for label in EnsembleLabel::ALL {
        let exact = gap_generating(label, 2, PI / 2.0, 0.0, &LaurentPotential::zero(), 256)
            .unwrap()
            .log_value
            .value_f64();
        let oracle = two_dim_average(label, &[(PI / 2.0, PI)], |_| 1.0);
        assert!((exact - oracle).abs() < 1e-10 * oracle, "{label}: {exact} vs {oracle}");
    }
}

#[test]
fn smooth_symbol_three_dims() {
    let v = LaurentPotential::new(vec![0.1, 0.3, -0.2]).unwrap();
    let sym = FHSymbol::smooth(v.clone());
    let ms = compute_moments(&sym, 8, 1e-40, 192).unwrap();
    let rule = gauss_legendre(48, 0.0, PI);
    for label in EnsembleLabel::ALL {
        let exact = exact_average_th(&ms, 3, label, 192).unwrap().log_value.value_f64();
        let mut oracle = 0.0;
        for &(x, wx) in &rule {
            for &(y, wy) in &rule {
                for &(z, wz) in &rule {
                    oracle += wx * wy * wz * density(label, &[x, y, z]) * (v.eval(x) + v.eval(y) + v.eval(z)).exp();
                }
            }
        }
        assert!((exact - oracle).abs() < 1e-11 * oracle, "{label}: {exact} vs {oracle}");
    }
}

#[test]
fn fisher_hartwig_routes_agree_at_n12() {
    let prec = 256;
    let sym = FHSymbol::new(
        LaurentPotential::new(vec![0.0, 0.2]).unwrap(),
        0.0,
        0.0,
        vec![FHSingularity { t: 1.0, alpha: 0.5, beta_im: 0.3 }, FHSingularity { t: 2.2, alpha: 0.25, beta_im: 0.0 }],
    )
    .unwrap();
    let ms = compute_moments(&sym, 26, 1e-45, prec).unwrap();
    for label in EnsembleLabel::ALL {
        let (a, b) = exact_average_both(&ms, 12, label, prec).unwrap();
        assert_eq!(a.log_value.sign, 1);
        assert!(a.log_value.rel_diff(&b.log_value) < 1e-10, "{label}");
    }
    let rep = check_identities(&ms, 12, prec).unwrap();
    assert!(rep.max_residual < 1e-9, "{rep:?}");
}

#[test]
fn identities_for_thinned_gap_symbol() {
    let prec = 256;
    let sym = GapSymbol::new(LaurentPotential::new(vec![0.0, 0.1]).unwrap(), 1.3, 0.1).unwrap();
    let ms = compute_moments(&sym, 22, 1e-45, prec).unwrap();
    for n in [1, 4, 10] {
        let rep = check_identities(&ms, n, prec).unwrap();
        assert!(rep.max_residual < 1e-9, "n={n}: {rep:?}");
    }
}

fn potential() -> impl Strategy<Value = LaurentPotential> {
    prop::collection::vec(-0.4f64..0.4, 1..5).prop_map(|c| LaurentPotential::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn identity_suite_random_smooth(v in potential(), n in 1usize..=12) {
        let ms = compute_moments(&FHSymbol::smooth(v), 2 * n + 2, 1e-50, 256).unwrap();
        let rep = check_identities(&ms, n, 256).unwrap();
        prop_assert!(rep.max_residual < 1e-9, "{:?}", rep);
    }

    #[test]
    fn routes_agree_random_smooth(v in potential(), n in 1usize..=16) {
        let ms = compute_moments(&FHSymbol::smooth(v), 2 * n + 2, 1e-50, 256).unwrap();
        for label in EnsembleLabel::ALL {
            let (a, b) = exact_average_both(&ms, n, label, 256).unwrap();
            prop_assert_eq!(a.log_value.sign, 1);
            prop_assert!(a.log_value.rel_diff(&b.log_value) < 1e-9);
        }
    }

    #[test]
    fn scaling_law(v in potential(), n in 1usize..=8, c in 0.2f64..5.0) {
        let prec = 192;
        let ms = compute_moments(&FHSymbol::smooth(v), 2 * n + 2, 1e-40, prec).unwrap();
        let scaled = moments_of_scaled(&ms, &mp::fl(prec, c)).unwrap();
        for label in EnsembleLabel::ALL {
            let a = exact_average_th(&ms, n, label, prec).unwrap().log_value.log_f64();
            let b = exact_average_th(&scaled, n, label, prec).unwrap().log_value.log_f64();
            prop_assert!((b - a - n as f64 * c.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_in_s_and_bounded(t0 in 0.2f64..2.9, s1 in 0.0f64..1.0, s2 in 0.0f64..1.0, n in 1usize..=6, li in 0usize..4) {
        let label = EnsembleLabel::ALL[li];
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let z = LaurentPotential::zero();
        let a = gap_generating(label, n, t0, lo, &z, 192).unwrap().log_value.value_f64();
        let b = gap_generating(label, n, t0, hi, &z, 192).unwrap().log_value.value_f64();
        prop_assert!(a <= b * (1.0 + 1e-20) + 1e-30);
        prop_assert!(a >= 0.0 && b <= 1.0 + 1e-25);
        prop_assert!(moments_needed(label, n) <= 2 * n + 1);
    }
}
