//! Fourier integrals of the kink profiles and pairings of non-decaying modes.
//!
//! `∫e^{ikx} tanh x dx` exists only as a distribution. Subtracting `sgn x`
//! leaves an exponentially decaying integrand; `sgn` itself transforms to
//! `2i/k` in the principal-value sense.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::modes::BdGMode;
use crate::error::{Error, Result};
use crate::numerics::{csch, integrate, sech, UniformGrid};

/// Truncation of the half-line integrals; tanh x − 1 ≈ −2e^{−2x} is 1e-35 there.
const HALF_LINE: f64 = 40.0;
const PANELS: usize = 160;
const ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralPair {
    pub numeric: Complex64,
    pub closed: Complex64,
}

impl IntegralPair {
    pub fn abs_error(&self) -> f64 {
        (self.numeric - self.closed).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierIntegrals {
    pub k: f64,
    pub tanh: IntegralPair,
    pub sech2: IntegralPair,
    pub tanh_sech2: IntegralPair,
}

pub fn tanh_transform_closed(k: f64) -> Complex64 {
    Complex64::new(0.0, PI * csch(0.5 * PI * k))
}

pub fn sech2_transform_closed(k: f64) -> Complex64 {
    if k == 0.0 {
        Complex64::new(2.0, 0.0)
    } else {
        Complex64::new(PI * k * csch(0.5 * PI * k), 0.0)
    }
}

pub fn tanh_sech2_transform_closed(k: f64) -> Complex64 {
    if k == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, 0.5 * PI * k * k * csch(0.5 * PI * k))
    }
}

/// ∫e^{ikx} f dx for odd f: 2i∫₀^∞ sin(kx) f dx.
fn odd_transform(k: f64, f: impl Fn(f64) -> f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * integrate(0.0, HALF_LINE, PANELS, ORDER, |x| (k * x).sin() * f(x)))
}

/// ∫e^{ikx} f dx for even f: 2∫₀^∞ cos(kx) f dx.
fn even_transform(k: f64, f: impl Fn(f64) -> f64) -> Complex64 {
    Complex64::new(2.0 * integrate(0.0, HALF_LINE, PANELS, ORDER, |x| (k * x).cos() * f(x)), 0.0)
}

/// Numerical `∫e^{ikx}tanh x dx` = F[tanh − sgn] + 2i/k.
pub fn tanh_transform_numeric(k: f64, k_floor: f64) -> Result<Complex64> {
    if !(k.abs() > k_floor) {
        return Err(Error::BelowKFloor { k: k.abs(), floor: k_floor });
    }
    // for x > 0, tanh x − 1 = −2/(e^{2x} + 1), evaluated without cancellation
    let rest = odd_transform(k, |x| -2.0 / ((2.0 * x).exp() + 1.0));
    Ok(rest + Complex64::new(0.0, 2.0 / k))
}

pub fn analytic_fourier_integrals(k: f64, k_floor: f64) -> Result<FourierIntegrals> {
    let tanh = IntegralPair { numeric: tanh_transform_numeric(k, k_floor)?, closed: tanh_transform_closed(k) };
    let sech2 = IntegralPair {
        numeric: even_transform(k, |x| sech(x).powi(2)),
        closed: sech2_transform_closed(k),
    };
    let tanh_sech2 = IntegralPair {
        numeric: odd_transform(k, |x| x.tanh() * sech(x).powi(2)),
        closed: tanh_sech2_transform_closed(k),
    };
    Ok(FourierIntegrals { k, tanh, sech2, tanh_sech2 })
}

/// Sample point used for the asymptotic limits of mode envelopes.
const FAR: f64 = 200.0;

/// `∫e^{iqx}G(x)dx` for G with finite limits G(±∞), q ≠ 0: the asymptotes
/// `c₀ + c₁ tanh x` are removed before the grid sum and restored analytically
/// (the constant contributes only at q = 0).
pub fn regularized_transform(
    q: f64,
    grid: &UniformGrid,
    g: impl Fn(f64) -> Complex64,
    k_floor: f64,
) -> Result<Complex64> {
    let (gp, gm) = (g(FAR), g(-FAR));
    let c0 = 0.5 * (gp + gm);
    let c1 = 0.5 * (gp - gm);
    if q.abs() <= k_floor {
        if c0.norm() > 1e-300 || c1.norm() > 1e-300 {
            return Err(Error::BelowKFloor { k: q.abs(), floor: k_floor });
        }
        let dx = grid.dx();
        return Ok(grid.points().into_iter().map(|x| g(x)).sum::<Complex64>() * dx);
    }
    let dx = grid.dx();
    let body: Complex64 = grid
        .points()
        .into_iter()
        .map(|x| (g(x) - c0 - c1 * x.tanh()) * Complex64::from_polar(1.0, q * x))
        .sum::<Complex64>()
        * dx;
    Ok(body + c1 * tanh_transform_closed(q))
}

/// `⟨σ₃a|b⟩` for closed-form modes, valid for non-decaying envelopes.
pub fn mode_pairing(a: &BdGMode, b: &BdGMode, grid: &UniformGrid, k_floor: f64) -> Result<Complex64> {
    let q = b.carrier() - a.carrier();
    regularized_transform(
        q,
        grid,
        |x| {
            let (au, av) = a.envelope(x);
            let (bu, bv) = b.envelope(x);
            au.conj() * bu - av.conj() * bv
        },
        k_floor,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech2_at_one() {
        let f = analytic_fourier_integrals(1.0, 1e-3).unwrap();
        assert!((f.sech2.closed.re - 1.365139).abs() < 1e-5);
        assert!(f.sech2.abs_error() < 1e-10);
    }

    #[test]
    fn tanh_small_k_limit() {
        let v = tanh_transform_numeric(1e-2, 1e-3).unwrap() * 1e-2;
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 0.02);
    }

    #[test]
    fn regularized_transform_of_tanh() {
        let grid = UniformGrid::symmetric(40.0, 4096);
        let v = regularized_transform(0.7, &grid, |x| Complex64::new(x.tanh(), 0.0), 1e-3).unwrap();
        assert!((v - tanh_transform_closed(0.7)).norm() < 1e-12);
    }
}
