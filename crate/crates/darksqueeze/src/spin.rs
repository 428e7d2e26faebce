//! Atomic spin squeezing induced by the soliton's zero-mode fluctuations.
//!
//! Model choices (all reported in output metadata):
//!
//! * Atoms stay mostly in |1⟩. The coherence follows the probe linearly,
//!   `σ₂₁ = c₂₁U` with `c₂₁ = a₂₁⁽¹⁾·√(n₀|g_p|²)`, and
//!   `⟨ŝ_z⟩ = ½(1 − 2|c₂₁U₀|²)`. The linearization needs `|c₂₁U₀| ≤ 1/2`.
//! * Fluctuations enter through the renormalized field,
//!   `δU = αQ₁ + βP₁` with `α = 𝓐cosϑ sech²σ e^{iθ₀}` and
//!   `β = iσ(cosϑ tanhσ + i sinϑ)e^{iθ₀}`.
//! * `ŝ_θ = Re[σ₂₁e^{iθ}]`, sampled at σ = `sample_sigma` (optionally averaged
//!   over a window of points before taking moments).
//! * The coherent-spin floor is identified with the vacuum minimum
//!   `min_θ Var ŝ_θ(0)`, so ξ²(0) = 1 by construction.
//!
//! With `y = Bᵀ(Q, P)ᵀ`, `B = [[Re z₁, −Im z₁], [Re z₂, −Im z₂]]`,
//! `z₁ = c₂₁α`, `z₂ = c₂₁β`, the fluctuation of ŝ_θ is `(cosθ, sinθ)·y`, so
//! `Var ŝ_θ = nᵀMn` with `M = BᵀΣB` and `ξ²(s) = λ_min(M(s))/λ_min(M(0))`.
//! Since B is fixed, ξ² does not depend on |c₂₁| or its phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{McEstimate, ZeroModeGaussianState};
use crate::error::{Error, Result};
use crate::medium::{kerr_chain, AtomicSystemParams};
use crate::numerics::{golden_section, linspace, sech};
use crate::soliton::DarkSolitonParams;

const MC_CHUNKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct SpinOptions {
    /// Dip-frame point where the coherence is sampled.
    pub sample_sigma: f64,
    /// Half-width of the σ window averaged around `sample_sigma` (0 = single point).
    pub window_half_width: f64,
    pub window_points: usize,
}

impl Default for SpinOptions {
    fn default() -> Self {
        Self { sample_sigma: 1.0, window_half_width: 0.0, window_points: 1 }
    }
}

impl SpinOptions {
    pub fn points(&self) -> Vec<f64> {
        if self.window_half_width == 0.0 || self.window_points <= 1 {
            vec![self.sample_sigma]
        } else {
            linspace(
                self.sample_sigma - self.window_half_width,
                self.sample_sigma + self.window_half_width,
                self.window_points,
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpinModel {
    pub coherence21: Complex64,
    pub population_z: f64,
    pub soliton: DarkSolitonParams,
    pub options: SpinOptions,
    /// Rows (Re z, −Im z) for Q and for P, window-averaged.
    pub b: [[f64; 2]; 2],
}

pub type Mat2 = [[f64; 2]; 2];

fn covariance(st: &ZeroModeGaussianState) -> Mat2 {
    [[st.cov_qq, st.cov_qp], [st.cov_qp, st.cov_pp]]
}

/// BᵀΣB.
fn congruence(b: &Mat2, sigma: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[i][j] += b[k][i] * sigma[k][l] * b[l][j];
                }
            }
        }
    }
    out
}

fn lambda_min(m: &Mat2) -> f64 {
    let tr = m[0][0] + m[1][1];
    let diff = m[0][0] - m[1][1];
    0.5 * (tr - (diff * diff + 4.0 * m[0][1] * m[1][0]).sqrt())
}

/// Angle of the eigenvector of λ_min, reduced to [0, π).
fn lambda_min_angle(m: &Mat2) -> f64 {
    // for symmetric M the quadratic form is a + b cos2θ + c sin2θ
    let b = 0.5 * (m[0][0] - m[1][1]);
    let c = m[0][1];
    (0.5 * (PI + c.atan2(b))).rem_euclid(PI)
}

impl SpinModel {
    pub fn new(atomic: &AtomicSystemParams, soliton: DarkSolitonParams, options: SpinOptions) -> Result<Self> {
        soliton.validate()?;
        let chain = kerr_chain(atomic)?;
        let c21 = chain.a21_1 * atomic.nonlinear_drive().sqrt();
        Self::with_coherence(c21, soliton, options)
    }

    pub fn with_coherence(c21: Complex64, soliton: DarkSolitonParams, options: SpinOptions) -> Result<Self> {
        soliton.validate()?;
        if options.window_points == 0 || !(options.window_half_width >= 0.0) {
            return Err(Error::Invalid { field: "spin.windowPoints", reason: "window needs at least one point".into() });
        }
        // |U₀| peaks at the background amplitude 𝓐√g
        let peak = c21.norm() * soliton.a * soliton.g.sqrt();
        if peak > 0.5 {
            return Err(Error::CoherenceBound(peak));
        }
        let points = options.points();
        let n = points.len() as f64;
        let (sn, cs) = soliton.theta.sin_cos();
        let carrier = Complex64::from_polar(1.0, soliton.theta0);
        let mut b = [[0.0; 2]; 2];
        let mut u0_abs2 = 0.0;
        for &x in &points {
            let alpha = carrier * soliton.a * cs * sech(x).powi(2);
            let beta = Complex64::new(0.0, x) * Complex64::new(cs * x.tanh(), sn) * carrier;
            for (row, z) in [c21 * alpha, c21 * beta].into_iter().enumerate() {
                b[row][0] += z.re / n;
                b[row][1] -= z.im / n;
            }
            let u0 = soliton.a * soliton.g.sqrt() * Complex64::new(cs * x.tanh(), sn);
            u0_abs2 += (c21 * u0).norm_sqr() / n;
        }
        Ok(Self { coherence21: c21, population_z: 0.5 * (1.0 - 2.0 * u0_abs2), soliton, options, b })
    }

    /// `c₀ = 𝓐²g²cos²ϑ`.
    pub fn c0(&self) -> f64 {
        self.soliton.prefactor()
    }

    pub fn state(&self, s: f64) -> ZeroModeGaussianState {
        ZeroModeGaussianState::vacuum().evolve(self.c0(), s).expect("vacuum is valid")
    }

    pub fn moment_matrix(&self, st: &ZeroModeGaussianState) -> Mat2 {
        congruence(&self.b, &covariance(st))
    }

    /// Coherent-spin floor: vacuum minimum of Var ŝ_θ.
    pub fn floor(&self) -> Result<f64> {
        let f = lambda_min(&self.moment_matrix(&ZeroModeGaussianState::vacuum()));
        let scale = self.b.iter().flatten().map(|v| v * v).sum::<f64>();
        if !(f > 1e-14 * scale) {
            return Err(Error::NearZero { quantity: "spin floor", value: f });
        }
        Ok(f)
    }

    /// Mean of ŝ_θ from the classical field.
    pub fn mean(&self, theta: f64) -> f64 {
        let p = &self.soliton;
        let (sn, cs) = p.theta.sin_cos();
        let points = self.options.points();
        let n = points.len() as f64;
        let carrier = Complex64::from_polar(1.0, p.theta0 + theta);
        points
            .iter()
            .map(|&x| (self.coherence21 * p.a * p.g.sqrt() * Complex64::new(cs * x.tanh(), sn) * carrier).re / n)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinStats {
    pub mean: f64,
    pub variance: f64,
}

pub fn spin_quadrature_stats(model: &SpinModel, s: f64, theta: f64) -> SpinStats {
    spin_stats_for_state(model, &model.state(s), theta)
}

pub fn spin_stats_for_state(model: &SpinModel, st: &ZeroModeGaussianState, theta: f64) -> SpinStats {
    let m = model.moment_matrix(st);
    let (sn, cs) = theta.sin_cos();
    let variance = cs * cs * m[0][0] + 2.0 * sn * cs * m[0][1] + sn * sn * m[1][1];
    SpinStats { mean: model.mean(theta), variance }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinSqueezing {
    pub s: f64,
    pub xi2: f64,
    pub theta: f64,
}

impl SpinSqueezing {
    pub fn db(&self) -> f64 {
        10.0 * self.xi2.log10()
    }
}

/// ξ²(s) from the smallest eigenvalue of the 2×2 moment matrix.
pub fn min_spin_squeezing(model: &SpinModel, s: f64) -> Result<SpinSqueezing> {
    let floor = model.floor()?;
    let m = model.moment_matrix(&model.state(s));
    Ok(SpinSqueezing { s, xi2: lambda_min(&m) / floor, theta: lambda_min_angle(&m) })
}

/// Golden-section minimization of Var ŝ_θ over θ, bracketed by a coarse scan.
pub fn min_spin_squeezing_search(model: &SpinModel, s: f64, tol: f64) -> Result<SpinSqueezing> {
    let floor = model.floor()?;
    let st = model.state(s);
    let f = |t: f64| spin_stats_for_state(model, &st, t).variance;
    let n = 64;
    let h = PI / n as f64;
    let best = (0..n).min_by(|&i, &j| f(i as f64 * h).total_cmp(&f(j as f64 * h))).unwrap_or(0);
    let centre = best as f64 * h;
    let theta = golden_section(f, centre - h, centre + h, tol).rem_euclid(PI);
    Ok(SpinSqueezing { s, xi2: f(theta) / floor, theta })
}

pub fn spin_curve(model: &SpinModel, s_values: &[f64]) -> Result<Vec<SpinSqueezing>> {
    s_values.par_iter().map(|&s| min_spin_squeezing(model, s)).collect()
}

/// Variance of ŝ_θ − ⟨ŝ_θ⟩ by sampling vacuum (Q, P), applying the shear and
/// the linear coherence map.
pub fn monte_carlo_spin_variance(model: &SpinModel, s: f64, theta: f64, samples: usize, seed: u64) -> McEstimate {
    let a = model.c0() * s;
    let (sn, cs) = theta.sin_cos();
    let b = model.b;
    let sd = 0.5f64.sqrt();
    let sizes: Vec<usize> = (0..MC_CHUNKS).map(|c| samples / MC_CHUNKS + usize::from(c < samples % MC_CHUNKS)).collect();
    let sums: Vec<[f64; 4]> = sizes
        .into_par_iter()
        .enumerate()
        .map(|(c, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut m = [0.0; 4];
            for _ in 0..n {
                let q0: f64 = sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                let p: f64 = sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                let q = q0 + a * p;
                let y0 = b[0][0] * q + b[1][0] * p;
                let y1 = b[0][1] * q + b[1][1] * p;
                let x = cs * y0 + sn * y1;
                let x2 = x * x;
                m[0] += x;
                m[1] += x2;
                m[2] += x2 * x;
                m[3] += x2 * x2;
            }
            m
        })
        .collect();
    let n = samples as f64;
    let mut m = [0.0; 4];
    for c in &sums {
        for i in 0..4 {
            m[i] += c[i];
        }
    }
    let [m1, m2, m3, m4] = m.map(|v| v / n);
    let var = m2 - m1 * m1;
    let mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
    McEstimate {
        samples,
        mean: m1,
        variance: var * n / (n - 1.0),
        variance_std_error: ((mu4 - var * var) / n).max(0.0).sqrt(),
    }
}
