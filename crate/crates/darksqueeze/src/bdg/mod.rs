//! Non-Hermitian Bogoliubov-de Gennes problem of the dark soliton.
//!
//! Fluctuations `W = (w, w†)ᵀ` obey `i∂ₛW = 𝓐²g²cos²ϑ 𝓛W` with
//!
//! ```text
//! 𝓛 = | 𝓜 + 2iγ∂σ      2𝓝        |     𝓜 = −∂²σ + 4tanh²σ − 2 + 2γ²
//!     | −2𝓝*       −𝓜 + 2iγ∂σ    |     𝓝 = (tanhσ + iγ)²
//! ```
//!
//! and γ = tanϑ. The operator is pseudo-Hermitian, `𝓛† = σ₃𝓛σ₃`, so left
//! eigenvectors are σ₃ images of right ones and the natural pairing is
//! `⟨Φ|Ψ⟩ = ∫(u_Φ* u_Ψ − v_Φ* v_Ψ)dσ` with `Φ = σ₃·(right vector)`.

pub mod certify;
pub mod completeness;
pub mod dense;
pub mod fourier;
pub mod modes;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{periodic_sum, Spectral, UniformGrid};

pub use modes::{
    continuous_mode, eigenvalue_branch, eigenvalue_plus, mode_eigenvalue, zero_mode, Branch, BdGMode, DualPair,
    ModeKind,
};

/// Spectral tail fraction above which `apply_l` refuses the input.
pub const RESOLUTION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdGContext {
    pub gamma: f64,
    /// 𝓐²g²cos²ϑ.
    pub prefactor: f64,
    pub grid: UniformGrid,
}

impl BdGContext {
    pub fn new(gamma: f64, prefactor: f64, grid: UniformGrid) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::Invalid { field: "gamma", reason: format!("must be finite and >= 0, got {gamma}") });
        }
        grid.validate_spectral()?;
        Ok(Self { gamma, prefactor, grid })
    }

    /// Context of a soliton with blackness ϑ.
    pub fn from_soliton(p: &crate::soliton::DarkSolitonParams, grid: UniformGrid) -> Result<Self> {
        Self::new(p.gamma(), p.prefactor(), grid)
    }
}

/// Two-component function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl Pair {
    pub fn zeros(n: usize) -> Self {
        Self { u: vec![Complex64::new(0.0, 0.0); n], v: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_fn(points: &[f64], f: impl Fn(f64) -> (Complex64, Complex64)) -> Self {
        let (u, v) = points.iter().map(|&x| f(x)).unzip();
        Self { u, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// σ₃ image `(u, −v)`.
    pub fn sigma3(&self) -> Self {
        Self { u: self.u.clone(), v: self.v.iter().map(|z| -z).collect() }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { u: self.u.iter().map(|z| z * a).collect(), v: self.v.iter().map(|z| z * a).collect() }
    }

    pub fn window(&self, w: &[f64]) -> Self {
        Self {
            u: self.u.iter().zip(w).map(|(z, &c)| z * c).collect(),
            v: self.v.iter().zip(w).map(|(z, &c)| z * c).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Pair, a: Complex64) {
        for (x, y) in self.u.iter_mut().zip(&other.u) {
            *x += a * y;
        }
        for (x, y) in self.v.iter_mut().zip(&other.v) {
            *x += a * y;
        }
    }

    /// Max pointwise |difference| over entries where `mask` is true.
    pub fn max_diff(&self, other: &Pair, mask: &[bool]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.len() {
            if mask[i] {
                m = m.max((self.u[i] - other.u[i]).norm()).max((self.v[i] - other.v[i]).norm());
            }
        }
        m
    }

    pub fn max_abs(&self, mask: &[bool]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.len() {
            if mask[i] {
                m = m.max(self.u[i].norm()).max(self.v[i].norm());
            }
        }
        m
    }
}

/// Discretized 𝓛 bound to a grid; spectral derivatives via FFT.
pub struct Operator {
    ctx: BdGContext,
    spectral: Spectral,
    tanh: Vec<f64>,
}

impl Operator {
    pub fn new(ctx: BdGContext) -> Self {
        let spectral = Spectral::new(&ctx.grid);
        let tanh = ctx.grid.points().into_iter().map(f64::tanh).collect();
        Self { ctx, spectral, tanh }
    }

    pub fn context(&self) -> &BdGContext {
        &self.ctx
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// Applies 𝓛 (or 𝓛† when `adjoint`), rejecting under-resolved input.
    pub fn apply(&self, f: &Pair, adjoint: bool) -> Result<Pair> {
        for comp in [&f.u, &f.v] {
            let tail = self.spectral.tail_fraction(comp);
            if tail > RESOLUTION_LIMIT {
                return Err(Error::Resolution { tail, limit: RESOLUTION_LIMIT });
            }
        }
        Ok(self.apply_unchecked(f, adjoint))
    }

    pub fn apply_unchecked(&self, f: &Pair, adjoint: bool) -> Pair {
        let g = self.ctx.gamma;
        let i2g = Complex64::new(0.0, 2.0 * g);
        let (du, d2u) = (self.spectral.derivative(&f.u, 1), self.spectral.derivative(&f.u, 2));
        let (dv, d2v) = (self.spectral.derivative(&f.v, 1), self.spectral.derivative(&f.v, 2));
        let mut out = Pair::zeros(f.len());
        for j in 0..f.len() {
            let t = self.tanh[j];
            let pot = 4.0 * t * t - 2.0 + 2.0 * g * g;
            let n = Complex64::new(t, g).powu(2);
            let mu = -d2u[j] + pot * f.u[j];
            let mv = -d2v[j] + pot * f.v[j];
            // 𝓛† only flips the signs of the off-diagonal blocks
            let s = if adjoint { -1.0 } else { 1.0 };
            out.u[j] = mu + i2g * du[j] + s * 2.0 * n * f.v[j];
            out.v[j] = -s * 2.0 * n.conj() * f.u[j] - mv + i2g * dv[j];
        }
        out
    }
}

/// One-shot application of 𝓛 or 𝓛†.
pub fn apply_l(ctx: &BdGContext, f: &Pair, adjoint: bool) -> Result<Pair> {
    Operator::new(*ctx).apply(f, adjoint)
}

/// `⟨σ₃a|b⟩ = ∫(a_u* b_u − a_v* b_v)dσ` on a periodic grid, for decaying integrands.
pub fn pairing(a: &Pair, b: &Pair, dx: f64) -> Complex64 {
    periodic_sum(
        a.u.iter().zip(&b.u).zip(a.v.iter().zip(&b.v)).map(|((au, bu), (av, bv))| au.conj() * bu - av.conj() * bv),
        dx,
    )
}

/// Plain `∫(a_u* b_u + a_v* b_v)dσ`.
pub fn euclidean(a: &Pair, b: &Pair, dx: f64) -> Complex64 {
    periodic_sum(
        a.u.iter().zip(&b.u).zip(a.v.iter().zip(&b.v)).map(|((au, bu), (av, bv))| au.conj() * bu + av.conj() * bv),
        dx,
    )
}
