//! Closed-form eigenmodes of 𝓛.
//!
//! Continuous modes, with `ν(k) = √(k² + 4(1+γ²))` and `𝓓(k) = −2γ + sgn(k)ν(k)`:
//!
//! ```text
//! u_k = e^{ikσ} (tanhσ − i(𝓓+k)/2)² / (√(2π|k|ν) 𝓓)
//! v_k = e^{ikσ} (tanhσ + i(𝓓−k)/2)² / (√(2π|k|ν) 𝓓)
//! 𝓛(u_k, v_k) = k𝓓(k) (u_k, v_k)
//! ```
//!
//! Note the assignment of the two squared brackets: the opposite assignment
//! does not solve the eigenproblem. The eigenvalue `k𝓓(k) = −2γk + |k|ν`
//! agrees with `|k|(−2γ + ν)` for k > 0 only. Each mode has a conjugate
//! partner `(v_k*, u_k*)` with eigenvalue `−k𝓓(k)` and negative σ₃-norm.
//!
//! The zero eigenvalue is defective. `Ψ_ψ = (sech²σ, sech²σ)` spans the
//! kernel, and `Ψ_φ = (φ, −φ*)` with `φ = [1 + iγ(tanhσ + σ sech²σ)]/2`
//! completes the Jordan chain `𝓛Ψ_φ = −Ψ_ψ`. The printed zero mode
//! `(u₁, v₁) ∝ Ψ_ψ + Ψ_φ` is therefore a generalized eigenvector.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BdGContext, Pair};
use crate::error::{Error, Result};
use crate::numerics::sech;

/// Default exclusion half-width around k = 0.
pub const DEFAULT_K_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

pub fn nu(gamma: f64, k: f64) -> f64 {
    (k * k + 4.0 * (1.0 + gamma * gamma)).sqrt()
}

/// 𝓓(k) = −2γ + sgn(k)ν(k).
pub fn dee(gamma: f64, k: f64) -> f64 {
    -2.0 * gamma + k.signum() * nu(gamma, k)
}

/// `|k|(−2γ ± ν(k))`, the branch formula. The minus branch is unbounded below.
pub fn eigenvalue_branch(gamma: f64, k: f64, branch: Branch) -> f64 {
    let s = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    k.abs() * (-2.0 * gamma + s * nu(gamma, k))
}

pub fn eigenvalue_plus(gamma: f64, k: f64) -> f64 {
    eigenvalue_branch(gamma, k, Branch::Plus)
}

/// Eigenvalue carried by the continuous mode of wavenumber k: `−2γk + |k|ν(k)`.
pub fn mode_eigenvalue(gamma: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * dee(gamma, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeKind {
    /// Positive-norm scattering mode.
    Continuous { k: f64 },
    /// Conjugate partner `(v_k*, u_k*)`.
    Partner { k: f64 },
    /// Printed zero mode `(Ψ_ψ + Ψ_φ)/√2` with scale `zero_scale`.
    Zero,
    /// Kernel vector Ψ_ψ.
    Translation,
    /// Jordan partner Ψ_φ.
    Conjugate,
}

/// A mode with closed-form evaluators. Every mode is `e^{iqσ}` times an
/// envelope with finite limits at ±∞, where q is [`BdGMode::carrier`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdGMode {
    pub kind: ModeKind,
    pub eigenvalue: f64,
    pub gamma: f64,
    /// Extra factor on the printed zero-mode constants (1/√2 normalizes).
    pub zero_scale: f64,
}

impl BdGMode {
    pub fn carrier(&self) -> f64 {
        match self.kind {
            ModeKind::Continuous { k } => k,
            ModeKind::Partner { k } => -k,
            _ => 0.0,
        }
    }

    /// (u, v) without the carrier `e^{iqσ}`.
    pub fn envelope(&self, x: f64) -> (Complex64, Complex64) {
        let g = self.gamma;
        match self.kind {
            ModeKind::Continuous { k } => continuous_envelope(g, k, x),
            ModeKind::Partner { k } => {
                let (u, v) = continuous_envelope(g, k, x);
                (v.conj(), u.conj())
            }
            ModeKind::Translation => {
                let p = Complex64::new(sech(x).powi(2), 0.0);
                (p, p)
            }
            ModeKind::Conjugate => {
                let f = phi(g, x);
                (f, -f.conj())
            }
            ModeKind::Zero => {
                let s2 = sech(x).powi(2);
                let odd = Complex64::new(0.0, g * (x.tanh() + x * s2));
                let c = self.zero_scale / (2.0 * SQRT_2);
                ((2.0 * s2 + odd + 1.0) * c, (2.0 * s2 + odd - 1.0) * c)
            }
        }
    }

    pub fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let (u, v) = self.envelope(x);
        let q = self.carrier();
        if q == 0.0 {
            (u, v)
        } else {
            let e = Complex64::from_polar(1.0, q * x);
            (u * e, v * e)
        }
    }

    pub fn u(&self, x: f64) -> Complex64 {
        self.eval(x).0
    }

    pub fn v(&self, x: f64) -> Complex64 {
        self.eval(x).1
    }

    pub fn sample(&self, points: &[f64]) -> Pair {
        Pair::from_fn(points, |x| self.eval(x))
    }

    pub fn dual(self) -> DualPair {
        DualPair { right: self }
    }
}

/// Right vector and its σ₃ left partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualPair {
    pub right: BdGMode,
}

impl DualPair {
    pub fn left(&self, x: f64) -> (Complex64, Complex64) {
        let (u, v) = self.right.eval(x);
        (u, -v)
    }

    pub fn sample_right(&self, points: &[f64]) -> Pair {
        self.right.sample(points)
    }

    pub fn sample_left(&self, points: &[f64]) -> Pair {
        Pair::from_fn(points, |x| self.left(x))
    }
}

fn continuous_envelope(g: f64, k: f64, x: f64) -> (Complex64, Complex64) {
    let n = nu(g, k);
    let d = dee(g, k);
    let norm = (2.0 * PI * k.abs() * n).sqrt() * d;
    let t = x.tanh();
    let u = Complex64::new(t, -0.5 * (d + k)).powu(2) / norm;
    let v = Complex64::new(t, 0.5 * (d - k)).powu(2) / norm;
    (u, v)
}

/// φ₁ with the printed constants: `[1 + iγ(tanhσ + σ sech²σ)]/2`.
pub fn phi(gamma: f64, x: f64) -> Complex64 {
    Complex64::new(0.5, 0.5 * gamma * (x.tanh() + x * sech(x).powi(2)))
}

/// ψ₁ with the printed constants: `sech²σ`.
pub fn psi(x: f64) -> f64 {
    sech(x).powi(2)
}

pub fn continuous_mode_with_floor(ctx: &BdGContext, k: f64, k_floor: f64) -> Result<DualPair> {
    if !(k.abs() > k_floor) {
        return Err(Error::BelowKFloor { k: k.abs(), floor: k_floor });
    }
    Ok(BdGMode {
        kind: ModeKind::Continuous { k },
        eigenvalue: mode_eigenvalue(ctx.gamma, k),
        gamma: ctx.gamma,
        zero_scale: 1.0,
    }
    .dual())
}

pub fn continuous_mode(ctx: &BdGContext, k: f64) -> Result<DualPair> {
    continuous_mode_with_floor(ctx, k, DEFAULT_K_FLOOR)
}

pub fn partner_mode(ctx: &BdGContext, k: f64) -> Result<DualPair> {
    let m = continuous_mode(ctx, k)?.right;
    Ok(BdGMode { kind: ModeKind::Partner { k }, eigenvalue: -m.eigenvalue, ..m }.dual())
}

/// Normalized zero mode: printed constants times 1/√2, so ⟨Φ₁|Ψ₁⟩ = 1.
pub fn zero_mode(ctx: &BdGContext) -> DualPair {
    zero_mode_scaled(ctx, 1.0 / SQRT_2)
}

/// Zero mode with the printed 1/(2√2) prefactor, ⟨Φ₁|Ψ₁⟩ = 2.
pub fn zero_mode_raw(ctx: &BdGContext) -> DualPair {
    zero_mode_scaled(ctx, 1.0)
}

fn zero_mode_scaled(ctx: &BdGContext, scale: f64) -> DualPair {
    BdGMode { kind: ModeKind::Zero, eigenvalue: 0.0, gamma: ctx.gamma, zero_scale: scale }.dual()
}

pub fn translation_mode(ctx: &BdGContext) -> DualPair {
    BdGMode { kind: ModeKind::Translation, eigenvalue: 0.0, gamma: ctx.gamma, zero_scale: 1.0 }.dual()
}

pub fn conjugate_mode(ctx: &BdGContext) -> DualPair {
    BdGMode { kind: ModeKind::Conjugate, eigenvalue: 0.0, gamma: ctx.gamma, zero_scale: 1.0 }.dual()
}
