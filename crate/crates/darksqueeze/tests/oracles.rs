use std::f64::consts::PI;

use darksqueeze::bdg::Pair;
use darksqueeze::oracles::*;
use darksqueeze::soliton::DarkSolitonParams;
use num_complex::Complex64;

fn sup(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn strang_splitting_converges_at_second_order() {
    let p = DarkSolitonParams::new(1.0, 1.0, PI / 6.0, 0.0, 0.0);
    let run = |steps: usize| {
        let cfg = PropagationConfig { domain: 40.0, points: 512, ds: 0.2 / steps as f64, steps, record_every: steps };
        let h = propagate_nls(&cfg, &p, true).unwrap();
        h.fields.unwrap().pop().unwrap()
    };
    let (a, b, c) = (run(50), run(100), run(200));
    let ratio = sup(&a, &b) / sup(&b, &c);
    assert!((ratio - 4.0).abs() < 0.4, "self-convergence ratio {ratio}");
}

#[test]
fn grey_dip_moves_at_the_predicted_velocity() {
    let p = DarkSolitonParams::new(1.0, 1.0, PI / 6.0, 0.0, 0.0);
    let cfg = PropagationConfig { steps: 5_000, ds: 2e-4, ..Default::default() };
    let h = propagate_nls(&cfg, &p, false).unwrap();
    let v = h.velocity();
    assert!((v - p.velocity()).abs() / p.velocity() < 1e-2, "{v}");
    assert!(h.max_edge_deviation() < 1e-8);
    assert!(h.warnings.is_empty(), "{:?}", h.warnings);
}

#[test]
fn black_soliton_is_stationary() {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let cfg = PropagationConfig { steps: 5_000, ds: 2e-4, ..Default::default() };
    let h = propagate_nls(&cfg, &p, false).unwrap();
    assert!(h.max_profile_change() < 1e-6, "{}", h.max_profile_change());
    assert!(h.power_drift() < 1e-8);
}

#[test]
fn linearization_reproduces_zero_mode_drift() {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let cfg = PropagationConfig { steps: 2_000, ds: 2.5e-4, ..Default::default() };
    let (fit, _) = zero_mode_drift(&cfg, &p, 1e-4).unwrap();
    assert!(fit.relative_error() < 2e-2, "{fit:?}");
}

#[test]
fn linearization_rotates_continuous_modes() {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let cfg = PropagationConfig { steps: 2_000, ds: 2.5e-4, ..Default::default() };
    let fit = continuous_phase(&cfg, &p, 2.0, 1e-4).unwrap();
    assert!(fit.slope.relative_error() < 1e-2, "{:?}", fit.slope);
    assert!(fit.modulus_deviation < 1e-3);
}

#[test]
fn zero_seed_and_grey_background_are_handled() {
    let cfg = PropagationConfig { ds: 1e-3, steps: 10, record_every: 5, ..Default::default() };
    let black = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let h = linearized_evolution(&cfg, &black, &Pair::zeros(cfg.points)).unwrap();
    assert_eq!(h.s, vec![0.0, 5e-3, 1e-2]);
    assert!(h.states.iter().all(|w| w.u.iter().chain(&w.v).all(|z| *z == Complex64::new(0.0, 0.0))));
    let grey = DarkSolitonParams::new(1.0, 1.0, 0.3, 0.0, 0.0);
    assert!(linearized_evolution(&cfg, &grey, &Pair::zeros(cfg.points)).is_err());
}

#[test]
fn oversized_steps_are_refused() {
    let p = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
    let cfg = PropagationConfig { ds: 0.2, steps: 1, ..Default::default() };
    assert!(propagate_nls(&cfg, &p, false).is_err());
    let bad = PropagationConfig { points: 1000, ..Default::default() };
    assert!(bad.validate().is_err());
}
