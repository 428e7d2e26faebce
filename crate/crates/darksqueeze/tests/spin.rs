use std::f64::consts::PI;

use darksqueeze::dynamics::ZeroModeGaussianState;
use darksqueeze::medium::AtomicSystemParams;
use darksqueeze::numerics::{linspace, sech};
use darksqueeze::soliton::DarkSolitonParams;
use darksqueeze::spin::*;
use darksqueeze::Error;
use num_complex::Complex64;

fn paper_model() -> SpinModel {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    SpinModel::new(&AtomicSystemParams::paper(), p, SpinOptions::default()).unwrap()
}

/// Var ŝ_θ straight from the linearized field at σ, no moment matrix.
fn direct_variance(c21: Complex64, p: &DarkSolitonParams, x: f64, st: &ZeroModeGaussianState, theta: f64) -> f64 {
    let (sn, cs) = p.theta.sin_cos();
    let rot = Complex64::from_polar(1.0, p.theta0 + theta);
    let alpha = p.a * cs * sech(x).powi(2);
    let beta = Complex64::new(0.0, x) * Complex64::new(cs * x.tanh(), sn);
    let (kq, kp) = ((c21 * alpha * rot).re, (c21 * beta * rot).re);
    kq * kq * st.cov_qq + 2.0 * kq * kp * st.cov_qp + kp * kp * st.cov_pp
}

fn direct_xi2(model: &SpinModel, s: f64) -> f64 {
    let p = model.soliton;
    let x = model.options.sample_sigma;
    let angles = linspace(0.0, PI, 200_001);
    let min_over = |st: &ZeroModeGaussianState| {
        angles.iter().map(|&t| direct_variance(model.coherence21, &p, x, st, t)).fold(f64::INFINITY, f64::min)
    };
    min_over(&model.state(s)) / min_over(&ZeroModeGaussianState::vacuum())
}

#[test]
fn paper_point_starts_at_one_and_squeezes_monotonically() {
    let m = paper_model();
    let curve = spin_curve(&m, &linspace(0.0, 1.0, 101)).unwrap();
    assert_eq!(curve[0].xi2, 1.0);
    assert!(curve[1..].iter().all(|c| c.xi2 < 1.0));
    assert!(curve.windows(2).all(|w| w[1].xi2 <= w[0].xi2));
    assert!((curve[100].xi2 - 0.720).abs() < 1e-3, "{}", curve[100].xi2);
}

#[test]
fn moment_matrix_agrees_with_direct_angle_scan() {
    let m = paper_model();
    for s in [0.25, 0.5, 1.0] {
        let a = min_spin_squeezing(&m, s).unwrap().xi2;
        let b = direct_xi2(&m, s);
        assert!((a - b).abs() < 1e-8, "s {s}: {a} vs {b}");
        let c = min_spin_squeezing_search(&m, s, 1e-12).unwrap().xi2;
        assert!((a - c).abs() < 1e-12);
    }
}

#[test]
fn monte_carlo_matches_moment_matrix() {
    let m = paper_model();
    let (s, t) = (0.5, PI / 4.0);
    let mc = monte_carlo_spin_variance(&m, s, t, 100_000, 11);
    let exact = spin_quadrature_stats(&m, s, t).variance;
    let z = (mc.variance - exact) / mc.variance_std_error;
    assert!(z.abs() < 3.0, "z = {z}");
}

#[test]
fn variance_is_linear_in_the_covariance_and_xi2_ignores_coherence_scale() {
    let m = paper_model();
    let st = m.state(0.7);
    let doubled = ZeroModeGaussianState { cov_qq: 2.0 * st.cov_qq, cov_qp: 2.0 * st.cov_qp, cov_pp: 2.0 * st.cov_pp, ..st };
    for t in [0.0, 0.9, 2.2] {
        let a = spin_stats_for_state(&m, &st, t).variance;
        let b = spin_stats_for_state(&m, &doubled, t).variance;
        assert!((b - 2.0 * a).abs() <= 1e-14 * b.abs());
    }
    let scaled = SpinModel::with_coherence(m.coherence21 * Complex64::from_polar(0.3, 1.1), m.soliton, m.options).unwrap();
    let (x, y) = (min_spin_squeezing(&m, 0.7).unwrap().xi2, min_spin_squeezing(&scaled, 0.7).unwrap().xi2);
    assert!((x - y).abs() < 1e-12);
}

#[test]
fn no_nonlinearity_means_no_squeezing() {
    let p = DarkSolitonParams::new(1.0, 0.0, 0.0, 0.0, 0.0);
    let m = SpinModel::with_coherence(Complex64::new(-0.4, 0.0), p, SpinOptions::default()).unwrap();
    for s in linspace(0.0, 1.0, 11) {
        assert_eq!(min_spin_squeezing(&m, s).unwrap().xi2, 1.0);
    }
}

#[test]
fn grey_solitons_can_antisqueeze_the_spin() {
    // The determinant of BᵀΣB is conserved but its trace need not shrink.
    let p = DarkSolitonParams::new(1.0, 1.0, PI / 3.0, 0.0, 0.0);
    let m = SpinModel::with_coherence(Complex64::new(-0.4, 0.0), p, SpinOptions::default()).unwrap();
    assert!(min_spin_squeezing(&m, 1.0).unwrap().xi2 > 1.0);
    let det = |s: f64| {
        let mm = m.moment_matrix(&m.state(s));
        mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0]
    };
    assert!((det(1.0) - det(0.0)).abs() < 1e-12 * det(0.0).abs());
}

#[test]
fn coherence_bound_is_enforced() {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let e = SpinModel::with_coherence(Complex64::new(0.9, 0.0), p, SpinOptions::default()).unwrap_err();
    assert!(matches!(e, Error::CoherenceBound(_)));
    assert!(paper_model().coherence21.norm() <= 0.5);
}

#[test]
fn windowed_sampling_still_starts_at_one() {
    let opts = SpinOptions { sample_sigma: 1.0, window_half_width: 0.5, window_points: 11 };
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let m = SpinModel::new(&AtomicSystemParams::paper(), p, opts).unwrap();
    let c = spin_curve(&m, &[0.0, 0.5]).unwrap();
    assert_eq!(c[0].xi2, 1.0);
    assert!(c[1].xi2 < 1.0);
}
