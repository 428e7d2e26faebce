use std::f64::consts::PI;

use darksqueeze::medium::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn paper() -> MediumCoefficients {
    medium_coefficients(&AtomicSystemParams::paper()).unwrap()
}

#[test]
fn paper_dispersion_and_kerr_values() {
    let m = paper();
    assert!(rel(m.k1.re, 3.08e-7) < 0.02, "K1 {}", m.k1.re);
    assert!(rel(m.k2.re, 3.19e-15) < 0.02, "K2 {}", m.k2.re);
    assert!(rel(m.w.re, 8.20e-17) < 0.02, "W {}", m.w.re);
    assert!(rel(m.ldisp, 0.95) < 0.02, "Ldisp {}", m.ldisp);
    assert!(rel(m.chi3.re, 1.20e-10) < 0.15, "chi3 {}", m.chi3.re);
    let v = soliton_velocity(&m, 1.0, PI / 2.0);
    assert!(rel(v.fraction_of_c, 1.08e-4) < 0.02, "Vsol/c {}", v.fraction_of_c);
}

#[test]
fn nu_and_w_pull_ground_dephasing_in_opposite_directions() {
    // W wants γ21 ≈ 0, ν ≈ 1.69e-2 wants γ21 of a few kHz; no value gives both.
    let at = |khz: f64| {
        let p = AtomicSystemParams { dephasing21: 2.0 * PI * khz * 1e3, ..AtomicSystemParams::paper() };
        medium_coefficients(&p).unwrap()
    };
    let mut both = false;
    for i in 0..=100 {
        let m = at(0.1 * i as f64);
        both |= rel(m.w.re, 8.20e-17) < 0.02 && rel(m.nu, 1.69e-2) < 0.05;
    }
    assert!(!both);
    let m0 = at(0.0);
    assert!(rel(m0.nu, 7.97e-3) < 1e-3, "nu {}", m0.nu);
}

#[test]
fn derivatives_match_finite_differences() {
    let p = AtomicSystemParams::paper();
    let (k0, k1, k2) = dispersion_coefficients(&p).unwrap();
    let k = |w: f64| dispersion_relation(&p, w).unwrap();
    let h = 2.0 * PI * 2e3;
    let fd1 = (k(-2.0 * h) - 8.0 * k(-h) + 8.0 * k(h) - k(2.0 * h)) / (12.0 * h);
    let fd2 = (-k(-2.0 * h) + 16.0 * k(-h) - 30.0 * k(0.0) + 16.0 * k(h) - k(2.0 * h)) / (12.0 * h * h);
    assert!((k(0.0) - k0).norm() / k0.norm() < 1e-14);
    assert!((fd1 - k1).norm() / k1.norm() < 1e-8, "{fd1} vs {k1}");
    assert!((fd2 - k2).norm() / k2.norm() < 1e-5, "{fd2} vs {k2}");
}

type Q = BigRational;

fn q(x: f64) -> Q {
    Q::from_float(x).unwrap()
}

#[derive(Clone)]
struct Cq(Q, Q);

impl Cq {
    fn add(&self, o: &Cq) -> Cq {
        Cq(&self.0 + &o.0, &self.1 + &o.1)
    }
    fn mul(&self, o: &Cq) -> Cq {
        Cq(&self.0 * &o.0 - &self.1 * &o.1, &self.0 * &o.1 + &self.1 * &o.0)
    }
    fn div(&self, o: &Cq) -> Cq {
        let n = &o.0 * &o.0 + &o.1 * &o.1;
        let c = Cq(o.0.clone(), -o.1.clone());
        let m = self.mul(&c);
        Cq(m.0 / &n, m.1 / &n)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.0.to_f64().unwrap(), self.1.to_f64().unwrap())
    }
}

#[test]
fn dispersion_relation_matches_exact_rational_evaluation() {
    let p = AtomicSystemParams::paper();
    let d = complex_detunings(&p);
    for omega in [2.0 * PI * 1e5, -2.0 * PI * 1e5] {
        let w = Cq(q(omega), Q::zero());
        let a = Cq(q(d.d21.re), q(d.d21.im)).add(&w);
        let b = Cq(q(d.d31.re), q(d.d31.im)).add(&w);
        let oc2 = Cq(q(p.omega_c) * q(p.omega_c), Q::zero());
        let ab = a.mul(&b);
        let den = Cq(&oc2.0 - &ab.0, &oc2.1 - &ab.1);
        let kappa = Cq(q(p.coupling_density), Q::zero());
        let exact = Cq(q(omega) / q(C_CM), Q::zero()).add(&kappa.mul(&a).div(&den));
        // sanity on the rational arithmetic itself
        assert!(exact.0.denom() > &BigInt::from(0));
        let got = dispersion_relation(&p, omega).unwrap();
        let want = exact.to_c64();
        assert!((got - want).norm() / want.norm() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn zero_damping_detuning_is_real_and_rates_follow_definitions() {
    let p = AtomicSystemParams::paper();
    let d = complex_detunings(&p);
    assert_eq!(d.d21.im, 0.0);
    assert!(rel(d.d31.im, 2.0 * PI * 3e6) < 1e-14);
    assert!(rel(d.d32.im, 2.0 * PI * 3e6) < 1e-14);
    assert_eq!(d.d32.re, p.delta3 - p.delta2);
}

#[test]
fn photon_number_for_unit_nonlinearity_by_bisection() {
    let p = AtomicSystemParams::paper();
    let g_of = |n0: f64| medium_coefficients(&AtomicSystemParams { mean_photon_number: n0, ..p }).unwrap().g;
    let (mut lo, mut hi) = (1.0f64, 1e12f64);
    assert!(g_of(lo) < 1.0 && g_of(hi) > 1.0);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if g_of(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n0 = photon_number_for_g(&p, 1.0).unwrap();
    assert!(rel(n0, lo) < 1e-10, "{n0} vs {lo}");
    assert!(n0 > 100.0);
    assert!((paper().g - 1.0).abs() < 1e-12);
}

#[test]
fn scale_lengths_are_consistent() {
    let m = paper();
    assert!(rel(m.g / m.nu, m.labs / m.lnln) < 1e-12);
    assert!(rel(m.nu, m.ldisp * m.k0.im) < 1e-12);
    assert!(rel(m.vg, 1.0 / m.k1.re) < 1e-15);
}

#[test]
fn kinematic_velocity_decreases_with_greyness_while_printed_one_grows() {
    let m = paper();
    let a = soliton_velocity(&m, 1.0, 0.2);
    let b = soliton_velocity(&m, 1.0, 1.2);
    assert!(b.v_sol > a.v_sol);
    assert!(b.v_kinematic < a.v_kinematic);
    assert_eq!(soliton_velocity(&m, 1.0, 0.0).v_sol, m.vg);
}

#[test]
fn region_map_places_operating_point_in_dark_region() {
    let p = AtomicSystemParams::paper();
    let th = RegionThresholds::default();
    assert_eq!(classify_point(&p, p.delta3, p.delta2, &th).region, Region::DarkSoliton);
    let grid = RegionGrid {
        delta3: Axis { min: -2.0 * PI * 150e6, max: 2.0 * PI * 150e6, count: 40 },
        delta2: Axis { min: -2.0 * PI * 4.95e6, max: 2.0 * PI * 5e6, count: 200 },
    };
    let map = region_classify(&p, &grid, &th);
    let zero_row = map.delta2.iter().position(|&d| d == 0.0).expect("Δ2 = 0 row");
    for i3 in 0..map.delta3.len() {
        let r = map.at(zero_row, i3).region;
        assert!(r != Region::DarkSoliton && r != Region::BrightSoliton);
    }
    assert!(map.count(Region::DarkSoliton) > 0);
    assert!(map.count(Region::BrightSoliton) > 0);
}

#[test]
fn region_boundary_sits_on_kerr_dispersion_sign_change() {
    // Every DS point next to a BS point must straddle a sign flip of Re W / Re K2.
    let p = AtomicSystemParams::paper();
    let map = region_classify(&p, &RegionGrid::default(), &RegionThresholds::default());
    let (n2, n3) = (map.delta2.len(), map.delta3.len());
    let soliton = |r: Region| r == Region::DarkSoliton || r == Region::BrightSoliton;
    let mut flips = 0;
    for i2 in 0..n2 {
        for i3 in 0..n3 {
            let a = map.at(i2, i3);
            for (j2, j3) in [(i2 + 1, i3), (i2, i3 + 1)] {
                if j2 >= n2 || j3 >= n3 {
                    continue;
                }
                let b = map.at(j2, j3);
                if soliton(a.region) && soliton(b.region) && a.region != b.region {
                    assert!(a.sign_ratio * b.sign_ratio < 0.0);
                    flips += 1;
                }
            }
        }
    }
    assert!(flips > 0, "no DS/BS interface on the default grid");
}
