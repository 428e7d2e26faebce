//! Quantum dynamics of the zero-mode quadratures.
//!
//! The diagonal Hamiltonian `c₀[P²/2 + ∫dk E_k a_k†a_k]` with
//! `c₀ = 𝓐²g²cos²ϑ` gives `Q(s) = Q(0) + c₀sP(0)`, `P(s) = P(0)` and
//! `a_k(s) = a_k(0)e^{−ic₀E_ks}`. Starting from vacuum,
//!
//! ```text
//! ⟨X_θ²(s)⟩ = ½(c₀s cosθ + sinθ)² + ½cos²θ,     X_θ = Q cosθ + P sinθ
//! ```
//!
//! Squeezing ratios are reported as `10·log₁₀R` with R the variance ratio.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bdg::completeness::KGrid;
use crate::bdg::modes::{dee, mode_eigenvalue, nu};
use crate::error::{Error, Result};
use crate::numerics::{composite_rule, golden_section, linspace};
use crate::soliton::DarkSolitonParams;

/// Fixed number of Monte-Carlo chunks; each chunk owns its own random stream.
const MC_CHUNKS: usize = 64;

/// Gaussian state of (Q₁, P₁).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroModeGaussianState {
    pub mean_q: f64,
    pub mean_p: f64,
    pub cov_qq: f64,
    pub cov_qp: f64,
    pub cov_pp: f64,
    pub s: f64,
}

impl ZeroModeGaussianState {
    pub fn vacuum() -> Self {
        Self { mean_q: 0.0, mean_p: 0.0, cov_qq: 0.5, cov_qp: 0.0, cov_pp: 0.5, s: 0.0 }
    }

    /// `covQQ·covPP − covQP²`, at least 1/4 for a physical state.
    pub fn uncertainty_product(&self) -> f64 {
        self.cov_qq * self.cov_pp - self.cov_qp * self.cov_qp
    }

    pub fn validate(&self) -> Result<()> {
        let u = self.uncertainty_product();
        if !(u >= 0.25 - 1e-12) || self.cov_qq < 0.0 || self.cov_pp < 0.0 {
            return Err(Error::Invalid { field: "state", reason: format!("uncertainty product {u} < 1/4") });
        }
        Ok(())
    }

    /// Applies the shear `Q → Q + c₀·ds·P` over a further distance `ds`.
    pub fn evolve(&self, c0: f64, ds: f64) -> Result<Self> {
        self.validate()?;
        let a = c0 * ds;
        Ok(Self {
            mean_q: self.mean_q + a * self.mean_p,
            mean_p: self.mean_p,
            cov_qq: self.cov_qq + 2.0 * a * self.cov_qp + a * a * self.cov_pp,
            cov_qp: self.cov_qp + a * self.cov_pp,
            cov_pp: self.cov_pp,
            s: self.s + ds,
        })
    }

    /// `⟨X_θ²⟩ − ⟨X_θ⟩²` by contracting the covariance with (cosθ, sinθ).
    pub fn quadrature_variance(&self, theta: f64) -> f64 {
        let (sn, cs) = theta.sin_cos();
        cs * cs * self.cov_qq + 2.0 * sn * cs * self.cov_qp + sn * sn * self.cov_pp
    }
}

/// Evolves vacuum to s.
pub fn evolve_zero_mode(state: &ZeroModeGaussianState, c0: f64, s: f64) -> Result<ZeroModeGaussianState> {
    state.evolve(c0, s - state.s)
}

/// Closed-form vacuum variance of `X_θ` at s.
pub fn quadrature_variance(c0: f64, theta: f64, s: f64) -> f64 {
    let (sn, cs) = theta.sin_cos();
    let a = c0 * s;
    0.5 * (a * cs + sn).powi(2) + 0.5 * cs * cs
}

/// Same variance through the evolved covariance matrix.
pub fn quadrature_variance_cov(c0: f64, theta: f64, s: f64) -> f64 {
    let st = ZeroModeGaussianState::vacuum().evolve(c0, s).expect("vacuum is valid");
    st.quadrature_variance(theta)
}

pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingRatio {
    pub ratio: f64,
    pub db: f64,
}

pub fn squeezing_ratio(c0: f64, theta: f64, s: f64) -> SqueezingRatio {
    let ratio = quadrature_variance(c0, theta, s) / quadrature_variance(c0, theta, 0.0);
    SqueezingRatio { ratio, db: to_db(ratio) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumAngle {
    pub theta: f64,
    pub variance: f64,
}

impl OptimumAngle {
    pub fn ratio(&self) -> f64 {
        2.0 * self.variance
    }
}

/// Closed-form minimizer over θ ∈ [0, π).
///
/// With a = c₀s the variance is `½[1 + a²/2 + (a²/2)cos2θ + a sin2θ]`, so the
/// minimum sits at `2θ = π + atan2(a, a²/2)` with value
/// `½[1 + a²/2 − |a|√(1 + a²/4)]`. For a = 0 the objective is flat and π/2 is
/// returned.
pub fn optimum_angle(c0: f64, s: f64) -> OptimumAngle {
    let a = c0 * s;
    if a == 0.0 {
        return OptimumAngle { theta: FRAC_PI_2, variance: 0.5 };
    }
    let delta = a.atan2(0.5 * a * a);
    let theta = (FRAC_PI_2 + 0.5 * delta).rem_euclid(PI);
    let variance = 0.5 * (1.0 + 0.5 * a * a - a.abs() * (1.0 + 0.25 * a * a).sqrt());
    OptimumAngle { theta, variance }
}

/// Independent minimizer: a coarse scan brackets the minimum, golden-section
/// search refines it, then a second pass zeroes the slope.
pub fn optimum_angle_search(c0: f64, s: f64, tol: f64) -> OptimumAngle {
    if c0 * s == 0.0 {
        return OptimumAngle { theta: FRAC_PI_2, variance: 0.5 };
    }
    let n = 64;
    let h = PI / n as f64;
    let f = |t: f64| quadrature_variance(c0, t, s);
    let best = (0..n).min_by(|&i, &j| f(i as f64 * h).total_cmp(&f(j as f64 * h))).unwrap_or(0);
    let centre = best as f64 * h;
    let rough = golden_section(f, centre - h, centre + h, tol);
    // f is flat at the minimum, so its location is only good to ~sqrt(eps);
    // |f'| has a V-shaped zero and pins it down to rounding.
    let a = c0 * s;
    let slope = |t: f64| (a * (2.0 * t).cos() - 0.5 * a * a * (2.0 * t).sin()).abs();
    let w = (1e3 * tol).max(1e-6).min(h);
    let fine = (tol * 1e-3).max(8.0 * f64::EPSILON * rough.abs());
    let theta = golden_section(slope, rough - w, rough + w, fine).rem_euclid(PI);
    OptimumAngle { theta, variance: f(theta) }
}

/// Minimum squeezing ratio `min_θ R` in linear units.
pub fn min_ratio(c0: f64, s: f64) -> f64 {
    optimum_angle(c0, s).ratio()
}

/// Variance and ratio on an (s, θ) grid, with θ_opt and R_min per s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SqueezeGrid {
    pub s_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    /// Row i holds s_values[i].
    pub variance: Vec<Vec<f64>>,
    pub ratio_db: Vec<Vec<f64>>,
    pub theta_opt: Vec<f64>,
    pub r_min_db: Vec<f64>,
}

pub fn squeeze_grid(c0: f64, s_values: &[f64], theta_values: &[f64]) -> SqueezeGrid {
    let rows: Vec<(Vec<f64>, Vec<f64>, f64, f64)> = s_values
        .par_iter()
        .map(|&s| {
            let st = ZeroModeGaussianState::vacuum().evolve(c0, s).expect("vacuum is valid");
            let var: Vec<f64> = theta_values.iter().map(|&t| st.quadrature_variance(t)).collect();
            let db = var.iter().map(|v| to_db(2.0 * v)).collect();
            let opt = optimum_angle(c0, s);
            (var, db, opt.theta, to_db(opt.ratio()))
        })
        .collect();
    let mut g = SqueezeGrid {
        s_values: s_values.to_vec(),
        theta_values: theta_values.to_vec(),
        variance: Vec::with_capacity(rows.len()),
        ratio_db: Vec::with_capacity(rows.len()),
        theta_opt: Vec::with_capacity(rows.len()),
        r_min_db: Vec::with_capacity(rows.len()),
    };
    for (v, d, t, r) in rows {
        g.variance.push(v);
        g.ratio_db.push(d);
        g.theta_opt.push(t);
        g.r_min_db.push(r);
    }
    g
}

/// Soliton parameters entering c₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeCase {
    #[serde(rename = "A")]
    pub a: f64,
    pub g: f64,
    /// Blackness angle ϑ.
    pub theta: f64,
}

impl SqueezeCase {
    pub fn c0(&self) -> f64 {
        (self.a * self.g * self.theta.cos()).powi(2)
    }

    pub fn label(&self) -> String {
        format!("A={},g={},vartheta={:.6}", self.a, self.g, self.theta)
    }
}

/// ϑ ∈ {0, π/6, π/3, π/2} at 𝓐 = g = 1.
pub fn blackness_cases() -> Vec<SqueezeCase> {
    [0.0, PI / 6.0, PI / 3.0, FRAC_PI_2].iter().map(|&theta| SqueezeCase { a: 1.0, g: 1.0, theta }).collect()
}

/// g ∈ {0, 0.6, 1, 1.2} at 𝓐 = 1, ϑ = 0.
pub fn nonlinearity_cases() -> Vec<SqueezeCase> {
    [0.0, 0.6, 1.0, 1.2].iter().map(|&g| SqueezeCase { a: 1.0, g, theta: 0.0 }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MinSqueezeCurve {
    pub case: SqueezeCase,
    pub r_min: Vec<f64>,
    pub r_min_db: Vec<f64>,
}

pub fn min_squeeze_curves(s_values: &[f64], cases: &[SqueezeCase]) -> Vec<MinSqueezeCurve> {
    cases
        .iter()
        .map(|&case| {
            let r_min: Vec<f64> = s_values.iter().map(|&s| min_ratio(case.c0(), s)).collect();
            let r_min_db = r_min.iter().map(|&r| to_db(r)).collect();
            MinSqueezeCurve { case, r_min, r_min_db }
        })
        .collect()
}

/// `e^{−ic₀E_ks}` with E_k the eigenvalue of the continuous mode k.
pub fn continuous_mode_phase(gamma: f64, k: f64, c0: f64, s: f64) -> Complex64 {
    Complex64::from_polar(1.0, -c0 * mode_eigenvalue(gamma, k) * s)
}

/// Vacuum density `⟨w†w⟩(σ)` contributed by the continuum, `∫dk|v_k(σ)|²`
/// over |k| ≥ k_floor, next to the zero-mode value `|v₁(σ)|²`. The k-integral
/// diverges logarithmically at k = 0, so the value depends on the floor.
/// Diagnostic only; the squeezing results neglect the continuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContinuumDiagnostic {
    pub sigma: f64,
    pub continuum: f64,
    pub zero_mode: f64,
}

pub fn continuum_diagnostic(gamma: f64, sigma: f64, kg: &KGrid) -> Result<ContinuumDiagnostic> {
    kg.validate()?;
    let t = sigma.tanh();
    let mut continuum = 0.0;
    for (k, w) in kg.positive_nodes() {
        for kk in [k, -k] {
            let d = dee(gamma, kk);
            let norm2 = 2.0 * PI * kk.abs() * nu(gamma, kk) * d * d;
            continuum += w * Complex64::new(t, 0.5 * (d - kk)).norm_sqr().powi(2) / norm2;
        }
    }
    let s2 = 1.0 / sigma.cosh().powi(2);
    let odd = gamma * (t + sigma * s2);
    let zero_mode = ((2.0 * s2 - 1.0).powi(2) + odd * odd) / 16.0;
    Ok(ContinuumDiagnostic { sigma, continuum, zero_mode })
}

/// Mean intensity `⟨|U|²⟩` of the renormalized field, averaging the dip
/// position over the Gaussian marginal of Q₁.
///
/// `⟨|U|²⟩ = 𝓐²g[cos²ϑ⟨tanh²(σ + Q₁/√g)⟩ + sin²ϑ]`; the P₁ phase drops out.
pub fn renormalized_profile(
    p: &DarkSolitonParams,
    state: &ZeroModeGaussianState,
    s: f64,
    tau: &[f64],
) -> Result<Vec<f64>> {
    p.validate()?;
    state.validate()?;
    let bg = p.background_intensity();
    if p.g == 0.0 {
        return Ok(vec![bg; tau.len()]);
    }
    let (sn, cs) = p.theta.sin_cos();
    let scale = p.g.sqrt();
    let mean = state.mean_q / scale;
    let sd = state.cov_qq.max(0.0).sqrt() / scale;
    let nodes: Vec<(f64, f64)> = if sd == 0.0 {
        vec![(0.0, 1.0)]
    } else {
        // N(0,1) weights on ±8 standard deviations, renormalized
        let raw = composite_rule(&linspace(-8.0, 8.0, 33), 16);
        let z: f64 = raw.iter().map(|(x, w)| w * (-0.5 * x * x).exp()).sum();
        raw.into_iter().map(|(x, w)| (x, w * (-0.5 * x * x).exp() / z)).collect()
    };
    Ok(tau
        .iter()
        .map(|&t| {
            let sigma = p.sigma(s, t) + mean;
            let avg: f64 = nodes.iter().map(|&(x, w)| w * (sigma + sd * x).tanh().powi(2)).sum();
            bg * (cs * cs * avg + sn * sn)
        })
        .collect())
}

/// Sample mean, variance and the standard error of the variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct McEstimate {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub variance_std_error: f64,
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_sizes(samples: usize) -> Vec<usize> {
    (0..MC_CHUNKS).map(|c| samples / MC_CHUNKS + usize::from(c < samples % MC_CHUNKS)).collect()
}

/// Vacuum (Q, P) samples pushed through the shear map; variance of `X_θ`.
pub fn monte_carlo_variance(c0: f64, theta: f64, s: f64, samples: usize, seed: u64) -> McEstimate {
    let (sn, cs) = theta.sin_cos();
    let a = c0 * s;
    let sd = 0.5f64.sqrt();
    // per chunk: Σx, Σx², Σx³, Σx⁴ (raw moments, combined afterwards)
    let sums: Vec<[f64; 4]> = chunk_sizes(samples)
        .into_par_iter()
        .enumerate()
        .map(|(c, n)| {
            let mut rng = chunk_rng(seed, c);
            let mut m = [0.0; 4];
            for _ in 0..n {
                let q0: f64 = sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                let p0: f64 = sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                let x = (q0 + a * p0) * cs + p0 * sn;
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
    let variance = var * n / (n - 1.0);
    McEstimate { samples, mean: m1, variance, variance_std_error: ((mu4 - var * var) / n).max(0.0).sqrt() }
}

/// Monte-Carlo average of `|U₀(σ + Q/√g)|²` over Q ~ N(meanQ, covQQ):
/// per-point mean and standard error.
pub fn monte_carlo_profile(
    p: &DarkSolitonParams,
    state: &ZeroModeGaussianState,
    s: f64,
    tau: &[f64],
    samples: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    p.validate()?;
    state.validate()?;
    if p.g == 0.0 {
        return Err(Error::NearZero { quantity: "g", value: 0.0 });
    }
    let sigma: Vec<f64> = tau.iter().map(|&t| p.sigma(s, t)).collect();
    let bg = p.background_intensity();
    let (sn, cs) = p.theta.sin_cos();
    let scale = p.g.sqrt();
    let sd = state.cov_qq.sqrt();
    let len = tau.len();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = chunk_sizes(samples)
        .into_par_iter()
        .enumerate()
        .map(|(c, n)| {
            let mut rng = chunk_rng(seed, c);
            let (mut s1, mut s2) = (vec![0.0; len], vec![0.0; len]);
            for _ in 0..n {
                let z: f64 = StandardNormal.sample(&mut rng);
                let shift = (state.mean_q + sd * z) / scale;
                for j in 0..len {
                    let v = bg * (cs * cs * (sigma[j] + shift).tanh().powi(2) + sn * sn);
                    s1[j] += v;
                    s2[j] += v * v;
                }
            }
            (s1, s2)
        })
        .collect();
    let n = samples as f64;
    let (mut s1, mut s2) = (vec![0.0; len], vec![0.0; len]);
    for (a, b) in &partials {
        for j in 0..len {
            s1[j] += a[j];
            s2[j] += b[j];
        }
    }
    let mean: Vec<f64> = s1.iter().map(|v| v / n).collect();
    let se = s2
        .iter()
        .zip(&mean)
        .map(|(v, m)| ((v / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt())
        .collect();
    Ok((mean, se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_variance_is_half() {
        for t in [0.0, 0.4, 2.0] {
            assert_eq!(quadrature_variance(1.0, t, 0.0), 0.5 * (t.sin().powi(2) + t.cos().powi(2)));
        }
    }

    #[test]
    fn closed_form_minimum_matches_scan() {
        for s in [0.3, 0.6, 0.9, 4.0] {
            let a = optimum_angle(1.0, s);
            let scan = (0..20000)
                .map(|i| quadrature_variance(1.0, PI * i as f64 / 20000.0, s))
                .fold(f64::INFINITY, f64::min);
            assert!((a.variance - scan).abs() < 1e-8);
        }
    }

    #[test]
    fn mc_chunks_cover_all_samples() {
        assert_eq!(chunk_sizes(1000).iter().sum::<usize>(), 1000);
    }
}
