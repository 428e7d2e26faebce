//! Grey/dark soliton of the defocusing NLS
//! `i∂ₛU + ∂²_τU − 2g|U|²U + μU = 0`:
//! `U₀ = 𝓐√g (cosϑ tanhσ + i sinϑ) e^{iθ₀}`, `σ = 𝓐g cosϑ (τ − τ₀ − 2𝓐g sinϑ s)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::sech;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkSolitonParams {
    pub a: f64,
    pub g: f64,
    /// Blackness angle ϑ in [0, π/2].
    pub theta: f64,
    pub theta0: f64,
    pub tau0: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub s: f64,
    pub tau: f64,
    pub value: Complex64,
    pub intensity: f64,
    pub phase: f64,
}

impl DarkSolitonParams {
    /// Parameters with the consistent chemical potential μ = 2𝓐²g².
    pub fn new(a: f64, g: f64, theta: f64, theta0: f64, tau0: f64) -> Self {
        Self { a, g, theta, theta0, tau0, mu: 2.0 * a * a * g * g }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::Invalid { field: "A", reason: format!("must be > 0, got {}", self.a) });
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::Invalid { field: "g", reason: format!("must be >= 0, got {}", self.g) });
        }
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(Error::Invalid {
                field: "theta",
                reason: format!("blackness angle must lie in [0, pi/2], got {}", self.theta),
            });
        }
        for (field, v) in [("theta0", self.theta0), ("tau0", self.tau0), ("mu", self.mu)] {
            if !v.is_finite() {
                return Err(Error::Invalid { field, reason: "must be finite".into() });
            }
        }
        Ok(())
    }

    /// γ = tanϑ, shared with the BdG problem.
    pub fn gamma(&self) -> f64 {
        self.theta.tan()
    }

    /// 𝓐²g²cos²ϑ, the rate multiplying the BdG operator.
    pub fn prefactor(&self) -> f64 {
        (self.a * self.g * self.theta.cos()).powi(2)
    }

    pub fn background_intensity(&self) -> f64 {
        self.a * self.a * self.g
    }

    pub fn blackness(&self) -> f64 {
        self.background_intensity() * self.theta.cos().powi(2)
    }

    /// Dip velocity dτ/ds.
    pub fn velocity(&self) -> f64 {
        2.0 * self.a * self.g * self.theta.sin()
    }

    pub fn sigma(&self, s: f64, tau: f64) -> f64 {
        self.a * self.g * self.theta.cos() * (tau - self.tau0 - self.velocity() * s)
    }

    fn amplitude(&self) -> f64 {
        self.a * self.g.sqrt()
    }

    fn carrier(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta0)
    }

    pub fn field(&self, s: f64, tau: f64) -> Complex64 {
        let sg = self.sigma(s, tau);
        let (st, ct) = self.theta.sin_cos();
        Complex64::new(ct * sg.tanh(), st) * self.amplitude() * self.carrier()
    }

    pub fn intensity(&self, s: f64, tau: f64) -> f64 {
        self.field(s, tau).norm_sqr()
    }

    /// Φ = arctan(cosϑ tanhσ / sinϑ); at ϑ = 0 the step (π/2)·sign(tanhσ),
    /// with 0 returned exactly at σ = 0.
    pub fn phase(&self, s: f64, tau: f64) -> f64 {
        let t = self.sigma(s, tau).tanh();
        let (st, ct) = self.theta.sin_cos();
        if self.theta == 0.0 {
            if t == 0.0 {
                0.0
            } else {
                FRAC_PI_2 * t.signum()
            }
        } else {
            (ct * t / st).atan()
        }
    }

    /// Phase jump between τ = −∞ and τ = +∞.
    pub fn phase_jump(&self) -> f64 {
        std::f64::consts::PI - 2.0 * self.theta
    }

    pub fn sample(&self, s: f64, tau: f64) -> FieldSample {
        let value = self.field(s, tau);
        FieldSample { s, tau, value, intensity: value.norm_sqr(), phase: self.phase(s, tau) }
    }

    /// Analytic ∂ₛU, ∂_τU and ∂²_τU.
    pub fn derivatives(&self, s: f64, tau: f64) -> (Complex64, Complex64, Complex64) {
        let sg = self.sigma(s, tau);
        let ct = self.theta.cos();
        let k = self.a * self.g * ct;
        let pref = self.amplitude() * ct * self.carrier();
        let d_sigma = pref * sech(sg).powi(2);
        let d2_sigma = pref * (-2.0 * sech(sg).powi(2) * sg.tanh());
        (d_sigma * (-k * self.velocity()), d_sigma * k, d2_sigma * k * k)
    }

    /// NLS residual at one point from the analytic derivatives.
    pub fn residual_at(&self, s: f64, tau: f64) -> Complex64 {
        let u = self.field(s, tau);
        let (us, _, utt) = self.derivatives(s, tau);
        Complex64::i() * us + utt - 2.0 * self.g * u.norm_sqr() * u + self.mu * u
    }
}

/// Max |residual| of the NLS over the tensor grid `s_values × tau_values`.
pub fn nls_residual(p: &DarkSolitonParams, s_values: &[f64], tau_values: &[f64]) -> f64 {
    s_values
        .iter()
        .flat_map(|&s| tau_values.iter().map(move |&t| p.residual_at(s, t).norm()))
        .fold(0.0, f64::max)
}

/// Same residual with fourth-order central differences of step `h` in both s and τ.
pub fn nls_residual_fd(p: &DarkSolitonParams, s_values: &[f64], tau_values: &[f64], h: f64) -> f64 {
    let d1 = |f: &dyn Fn(f64) -> Complex64, x: f64| {
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    };
    let d2 = |f: &dyn Fn(f64) -> Complex64, x: f64| {
        (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
    };
    let mut worst: f64 = 0.0;
    for &s in s_values {
        for &t in tau_values {
            let u = p.field(s, t);
            let us = d1(&|x| p.field(x, t), s);
            let utt = d2(&|x| p.field(s, x), t);
            let r = Complex64::i() * us + utt - 2.0 * p.g * u.norm_sqr() * u + p.mu * u;
            worst = worst.max(r.norm());
        }
    }
    worst
}

/// Default figure grid: τ ∈ [−10, 10]/(𝓐g cosϑ), shifted by τ₀.
pub fn default_tau_grid(p: &DarkSolitonParams, count: usize) -> Vec<f64> {
    let width = p.a * p.g * p.theta.cos();
    let half = if width > 0.0 { 10.0 / width } else { 10.0 };
    crate::numerics::linspace(p.tau0 - half, p.tau0 + half, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mu_is_consistent() {
        let p = DarkSolitonParams::new(1.3, 0.7, 0.4, 0.1, 0.0);
        assert!((p.mu - 2.0 * 1.3f64.powi(2) * 0.49).abs() < 1e-15);
    }

    #[test]
    fn dip_minimum_and_background() {
        let p = DarkSolitonParams::new(1.0, 1.0, PI / 6.0, 0.0, 0.0);
        assert!((p.intensity(0.0, 0.0) - 0.25).abs() < 1e-15);
        assert!((p.intensity(0.0, 50.0) - 1.0).abs() < 1e-14);
        let black = DarkSolitonParams::new(1.0, 1.0, 0.0, 0.0, 0.0);
        assert!((black.field(0.0, 40.0).re - 1.0).abs() < 1e-14);
        assert!((black.field(0.0, -40.0).re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn validation_names_theta() {
        let p = DarkSolitonParams::new(1.0, 1.0, 2.0, 0.0, 0.0);
        assert!(matches!(p.validate(), Err(Error::Invalid { field: "theta", .. })));
    }

    #[test]
    fn phase_limits() {
        let p = DarkSolitonParams::new(1.0, 1.0, PI / 2.0, 0.0, 0.0);
        assert!(p.phase(0.0, 3.0).abs() < 1e-15);
        let p = DarkSolitonParams::new(1.0, 1.0, PI / 6.0, 0.0, 0.0);
        let jump = p.phase(0.0, 40.0) - p.phase(0.0, -40.0);
        assert!((jump - 2.0 * PI / 3.0).abs() < 1e-12);
    }
}
