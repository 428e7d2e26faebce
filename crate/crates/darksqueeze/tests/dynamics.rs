use std::f64::consts::{FRAC_PI_2, PI};

use darksqueeze::dynamics::*;
use darksqueeze::numerics::linspace;
use darksqueeze::soliton::DarkSolitonParams;
use proptest::prelude::*;

/// Smallest eigenvalue of the evolved covariance matrix, i.e. the minimum
/// quadrature variance over all angles.
fn min_eigen(c0: f64, s: f64) -> f64 {
    let st = ZeroModeGaussianState::vacuum().evolve(c0, s).unwrap();
    let tr = st.cov_qq + st.cov_pp;
    let det = st.uncertainty_product();
    // stable form of (tr − √(tr² − 4det))/2
    2.0 * det / (tr + (tr * tr - 4.0 * det).sqrt())
}

#[test]
fn closed_form_and_covariance_path_agree_on_a_dense_grid() {
    let ss = linspace(0.0, 1.0, 100);
    let ts = linspace(0.0, 2.0 * PI, 100);
    for c0 in [1.0, 0.75, 0.25] {
        for &s in &ss {
            for &t in &ts {
                let d = (quadrature_variance(c0, t, s) - quadrature_variance_cov(c0, t, s)).abs();
                assert!(d < 1e-12, "c0 {c0} s {s} theta {t}: {d:e}");
            }
        }
    }
}

#[test]
fn vacuum_and_pure_momentum_quadrature_stay_at_one_half() {
    for s in linspace(0.0, 1.0, 11) {
        assert_eq!(quadrature_variance(1.0, FRAC_PI_2, s), 0.5);
    }
    for t in linspace(0.0, 2.0 * PI, 17) {
        assert!((quadrature_variance(1.0, t, 0.0) - 0.5).abs() < 1e-16);
    }
}

#[test]
fn minimum_matches_covariance_eigenvalue_and_respects_heisenberg() {
    for s in linspace(0.01, 3.0, 60) {
        let opt = optimum_angle(1.0, s);
        assert!((opt.variance - min_eigen(1.0, s)).abs() < 1e-14, "s {s}");
        let st = ZeroModeGaussianState::vacuum().evolve(1.0, s).unwrap();
        assert!((st.uncertainty_product() - 0.25).abs() < 1e-13);
        // R_min·R_max = 1 for a pure Gaussian state
        let max = st.cov_qq + st.cov_pp - opt.variance;
        assert!((4.0 * opt.variance * max - 1.0).abs() < 1e-12);
        assert!(quadrature_variance(1.0, opt.theta, s) >= opt.variance - 1e-15);
    }
}

#[test]
fn angle_search_agrees_with_closed_form() {
    for s in [0.3, 0.6, 0.9] {
        let a = optimum_angle_search(1.0, s, 1e-12);
        let b = optimum_angle(1.0, s);
        assert!((a.theta - b.theta).abs() < 1e-8, "s {s}: {} vs {}", a.theta, b.theta);
    }
}

#[test]
fn optimum_angle_sweeps_down_from_three_quarter_pi() {
    let ss = linspace(1e-3, 20.0, 400);
    let th: Vec<f64> = ss.iter().map(|&s| optimum_angle(1.0, s).theta).collect();
    assert!((th[0] - 0.75 * PI).abs() < 1e-3);
    assert!(th.windows(2).all(|w| w[1] < w[0]));
    assert!(th.iter().all(|&t| t > FRAC_PI_2));
    assert!(th.last().unwrap() - FRAC_PI_2 < 0.05);
    assert_eq!(optimum_angle(1.0, 0.0).theta, FRAC_PI_2);
}

#[test]
fn four_fifths_pi_quadrature_squeezes_then_antisqueezes() {
    // R(θ) < 1 iff c₀s·cosθ(c₀s·cosθ + 2 sinθ) < 0, so at θ = 4π/5 the crossing
    // sits at c₀s = −2 tanθ ≈ 1.453, not at the edge of the plotted range.
    let t = 0.8 * PI;
    let crossing = -2.0 * t.tan();
    let r = |s: f64| squeezing_ratio(1.0, t, s).ratio;
    assert!(r(0.5) < 1.0 && r(1.0) < 1.0);
    assert!(r(crossing * 1.01) > 1.0 && r(crossing * 0.99) < 1.0);
    let (mut lo, mut hi) = (1.0, 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if r(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - crossing).abs() < 1e-12);
}

#[test]
fn monte_carlo_matches_closed_form() {
    let c0 = 1.0;
    for (i, (s, t)) in [(0.6, 0.4 * PI), (0.3, 0.2 * PI), (0.9, 0.6 * PI)].into_iter().enumerate() {
        let mc = monte_carlo_variance(c0, t, s, 1_000_000, 99 + i as u64);
        let z = (mc.variance - quadrature_variance(c0, t, s)) / mc.variance_std_error;
        assert!(z.abs() < 3.0, "s {s} theta {t}: z = {z}");
    }
}

#[test]
fn monte_carlo_is_reproducible_and_seed_dependent() {
    let a = monte_carlo_variance(1.0, 0.3, 0.5, 10_000, 1);
    let b = monte_carlo_variance(1.0, 0.3, 0.5, 10_000, 1);
    let c = monte_carlo_variance(1.0, 0.3, 0.5, 10_000, 2);
    assert_eq!(a, b);
    assert_ne!(a.variance, c.variance);
}

#[test]
fn minimum_ratio_orders_with_blackness_and_nonlinearity() {
    let ss = linspace(0.0, 1.0, 101);
    let by_theta = min_squeeze_curves(&ss, &blackness_cases());
    let by_g = min_squeeze_curves(&ss, &nonlinearity_cases());
    for i in 1..ss.len() {
        // blacker solitons squeeze more; ϑ = π/2 carries no squeezing at all
        for w in by_theta.windows(2) {
            assert!(w[0].r_min[i] < w[1].r_min[i]);
        }
        assert!((by_theta[3].r_min[i] - 1.0).abs() < 1e-12);
        // g = 0 is identically one, larger g squeezes more
        assert_eq!(by_g[0].r_min[i], 1.0);
        for w in by_g.windows(2) {
            assert!(w[1].r_min[i] < w[0].r_min[i]);
        }
    }
    for c in by_g.iter().skip(1) {
        assert!(c.r_min.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn continuous_mode_phases_compose() {
    for (gamma, k) in [(0.0, 1.0), (0.5, -2.0), (1.7, 0.3)] {
        let a = continuous_mode_phase(gamma, k, 1.0, 0.3);
        let b = continuous_mode_phase(gamma, k, 1.0, 0.5);
        let ab = continuous_mode_phase(gamma, k, 1.0, 0.8);
        assert!((a * b - ab).norm() < 1e-14);
        assert!((ab.norm() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn renormalized_profile_fills_the_dip_and_matches_sampling() {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let st = ZeroModeGaussianState::vacuum().evolve(p.prefactor(), 0.9).unwrap();
    let tau = linspace(-3.0, 3.0, 31);
    let prof = renormalized_profile(&p, &st, 0.9, &tau).unwrap();
    assert!(prof[15] > 0.0, "dip must be partly filled");
    let far = renormalized_profile(&p, &st, 0.9, &[20.0]).unwrap()[0];
    assert!((far - p.background_intensity()).abs() < 1e-12);
    let (mean, se) = monte_carlo_profile(&p, &st, 0.9, &tau, 100_000, 5).unwrap();
    for j in 0..tau.len() {
        let z = (mean[j] - prof[j]) / se[j].max(1e-300);
        assert!(z.abs() < 4.0, "tau {}: z = {z}", tau[j]);
    }
}

proptest! {
    #[test]
    fn evolution_composes_and_stays_physical(c0 in 0.0f64..3.0, s1 in 0.0f64..2.0, s2 in 0.0f64..2.0, t in 0.0f64..6.3) {
        let v = ZeroModeGaussianState::vacuum();
        let two = v.evolve(c0, s1).unwrap().evolve(c0, s2).unwrap();
        let one = v.evolve(c0, s1 + s2).unwrap();
        prop_assert!((two.cov_qq - one.cov_qq).abs() < 1e-12 * (1.0 + one.cov_qq));
        prop_assert!((two.cov_qp - one.cov_qp).abs() < 1e-12 * (1.0 + one.cov_qq));
        prop_assert!(two.validate().is_ok());
        prop_assert!(quadrature_variance(c0, t, s1) >= optimum_angle(c0, s1).variance - 1e-14);
    }
}
