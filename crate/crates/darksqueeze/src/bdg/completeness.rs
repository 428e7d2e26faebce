//! Resolution of the identity and delta-normalization of the continuum.
//!
//! For decaying two-component f,
//!
//! ```text
//! f = ∫dk [Ψ_k⟨σ₃Ψ_k|f⟩ − Ψ̄_k⟨σ₃Ψ̄_k|f⟩]
//!   + Ψ_ψ⟨σ₃Ψ_φ|f⟩/⟨σ₃Ψ_φ|Ψ_ψ⟩ + Ψ_φ⟨σ₃Ψ_ψ|f⟩/⟨σ₃Ψ_ψ|Ψ_φ⟩
//! ```
//!
//! where Ψ̄_k = (v_k*, u_k*) has σ₃-norm −δ(k−k'). The discrete part is the
//! projector onto the Jordan block at zero.
//!
//! The k-integrand is bounded at k = 0 (the 1/|k| factors of the two families
//! cancel) but has different one-sided limits. The excluded gap
//! (−k_floor, k_floor) is filled with `k_floor·[I(k_floor) + I(−k_floor)]`,
//! which leaves an O(k_floor²) error; there is no residue to add.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modes::{conjugate_mode, dee, nu, translation_mode};
use super::{pairing, BdGContext, Pair};
use crate::error::{Error, Result};
use crate::numerics::{composite_rule, linspace, UniformGrid};

/// Number of fixed work chunks; fixing it keeps floating-point sums
/// independent of the thread count.
const CHUNKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct KGrid {
    pub cutoff: f64,
    pub panels: usize,
    pub order: usize,
    pub floor: f64,
}

impl Default for KGrid {
    fn default() -> Self {
        Self { cutoff: 30.0, panels: 120, order: 16, floor: 1e-3 }
    }
}

impl KGrid {
    pub fn refined(&self) -> Self {
        Self { panels: self.panels * 5 / 2, floor: self.floor * 0.5, ..*self }
    }

    /// Positive nodes: log-spaced panels on [floor, 1], uniform on [1, cutoff].
    pub fn positive_nodes(&self) -> Vec<(f64, f64)> {
        let n_log = (self.panels / 3).max(1);
        let n_lin = self.panels.saturating_sub(n_log).max(1);
        let (a, b) = (self.floor.ln(), 0.0f64);
        let mut edges: Vec<f64> = linspace(a, b, n_log + 1).into_iter().map(f64::exp).collect();
        edges.extend(linspace(1.0, self.cutoff, n_lin + 1).into_iter().skip(1));
        composite_rule(&edges, self.order)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.floor > 0.0 && self.floor < 1.0 && self.cutoff > 1.0 && self.panels >= 3 && self.order >= 2) {
            return Err(Error::Grid(format!("invalid k grid {self:?}")));
        }
        Ok(())
    }
}

struct Envelopes {
    points: Vec<f64>,
    tanh: Vec<f64>,
    dx: f64,
}

impl Envelopes {
    fn new(grid: &UniformGrid) -> Self {
        let points = grid.points();
        let tanh = points.iter().map(|x| x.tanh()).collect();
        Self { points, tanh, dx: grid.dx() }
    }

    /// Adds `weight·[Ψ_k⟨σ₃Ψ_k|f⟩ − Ψ̄_k⟨σ₃Ψ̄_k|f⟩]` into `acc`.
    fn accumulate(&self, gamma: f64, k: f64, weight: f64, f: &Pair, acc: &mut Pair) {
        let n = nu(gamma, k);
        let d = dee(gamma, k);
        let norm = (2.0 * std::f64::consts::PI * k.abs() * n).sqrt() * d;
        let (a, b) = (-0.5 * (d + k), 0.5 * (d - k));
        let len = self.points.len();
        let mut us = Vec::with_capacity(len);
        let mut vs = Vec::with_capacity(len);
        let (mut c, mut cb) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for j in 0..len {
            let t = self.tanh[j];
            let e = Complex64::from_polar(1.0 / norm, k * self.points[j]);
            let u = Complex64::new(t, a).powu(2) * e;
            let v = Complex64::new(t, b).powu(2) * e;
            c += u.conj() * f.u[j] - v.conj() * f.v[j];
            cb += v * f.u[j] - u * f.v[j];
            us.push(u);
            vs.push(v);
        }
        c *= self.dx * weight;
        cb *= self.dx * weight;
        for j in 0..len {
            acc.u[j] += c * us[j] - cb * vs[j].conj();
            acc.v[j] += c * vs[j] - cb * us[j].conj();
        }
    }
}

/// Projection of f onto the Jordan block at zero.
pub fn discrete_part(ctx: &BdGContext, f: &Pair) -> Pair {
    let x = ctx.grid.points();
    let dx = ctx.grid.dx();
    let psi = translation_mode(ctx).sample_right(&x);
    let phi = conjugate_mode(ctx).sample_right(&x);
    let a = pairing(&phi, f, dx) / pairing(&phi, &psi, dx);
    let b = pairing(&psi, f, dx) / pairing(&psi, &phi, dx);
    let mut out = Pair::zeros(x.len());
    out.add_scaled(&psi, a);
    out.add_scaled(&phi, b);
    out
}

/// Continuum part of the resolution of the identity, including the gap term.
pub fn continuous_part(ctx: &BdGContext, f: &Pair, kg: &KGrid) -> Pair {
    let env = Envelopes::new(&ctx.grid);
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    for (k, w) in kg.positive_nodes() {
        nodes.push((k, w));
        nodes.push((-k, w));
    }
    nodes.push((kg.floor, kg.floor));
    nodes.push((-kg.floor, kg.floor));

    let chunk = nodes.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Pair> = nodes
        .par_chunks(chunk)
        .map(|block| {
            let mut acc = Pair::zeros(env.points.len());
            for &(k, w) in block {
                env.accumulate(ctx.gamma, k, w, f, &mut acc);
            }
            acc
        })
        .collect();
    let mut out = Pair::zeros(env.points.len());
    for p in &partials {
        out.add_scaled(p, Complex64::new(1.0, 0.0));
    }
    out
}

pub fn reconstruct(ctx: &BdGContext, f: &Pair, kg: &KGrid) -> Pair {
    let mut out = discrete_part(ctx, f);
    out.add_scaled(&continuous_part(ctx, f, kg), Complex64::new(1.0, 0.0));
    out
}

/// Relative sup-norm reconstruction error of each test function.
pub fn completeness_check(ctx: &BdGContext, tests: &[Pair], kg: &KGrid) -> Result<Vec<f64>> {
    kg.validate()?;
    let mask = vec![true; ctx.grid.count];
    Ok(tests
        .iter()
        .map(|f| {
            let rec = reconstruct(ctx, f, kg);
            rec.max_diff(f, &mask) / f.max_abs(&mask)
        })
        .collect())
}

/// Compact k-window: a Gaussian multiplied by a C^∞ bump of half-width
/// `cutoff·width`, so two windows can have disjoint supports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KWindow {
    pub center: f64,
    pub width: f64,
    pub cutoff: f64,
}

impl KWindow {
    pub fn gaussian(center: f64, width: f64) -> Self {
        Self { center, width, cutoff: 3.3 }
    }

    pub fn support(&self) -> (f64, f64) {
        let r = self.cutoff * self.width;
        (self.center - r, self.center + r)
    }

    pub fn value(&self, k: f64) -> f64 {
        let x = (k - self.center) / self.width;
        let y = x / self.cutoff;
        if y.abs() >= 1.0 {
            0.0
        } else {
            (-0.5 * x * x).exp() * (1.0 - 1.0 / (1.0 - y * y)).exp()
        }
    }

    fn nodes(&self, panels: usize, order: usize) -> Vec<(f64, f64)> {
        let (a, b) = self.support();
        composite_rule(&linspace(a, b, panels + 1), order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketResult {
    /// ∬dk dk' f*(k')h(k)⟨Φ_k'|Ψ_k⟩.
    pub value: Complex64,
    /// ∫dk f*(k)h(k).
    pub expected: f64,
}

impl WavepacketResult {
    pub fn relative_error(&self) -> f64 {
        (self.value - self.expected).norm() / self.expected.abs().max(f64::MIN_POSITIVE)
    }
}

/// σ-space packet `∫dk h(k)Ψ_k(σ)`.
pub fn packet(gamma: f64, window: &KWindow, grid: &UniformGrid) -> Pair {
    let env = Envelopes::new(grid);
    let mut out = Pair::zeros(env.points.len());
    for (k, w) in window.nodes(24, 16) {
        let n = nu(gamma, k);
        let d = dee(gamma, k);
        let norm = (2.0 * std::f64::consts::PI * k.abs() * n).sqrt() * d;
        let (a, b) = (-0.5 * (d + k), 0.5 * (d - k));
        let h = w * window.value(k);
        for j in 0..env.points.len() {
            let t = env.tanh[j];
            let e = Complex64::from_polar(h / norm, k * env.points[j]);
            out.u[j] += Complex64::new(t, a).powu(2) * e;
            out.v[j] += Complex64::new(t, b).powu(2) * e;
        }
    }
    out
}

/// Delta-normalization test: compares the σ₃-pairing of two packets with the
/// direct overlap of their windows. The σ-integral and k-integrals commute, so
/// this is the nested k-integral evaluated in σ space.
pub fn wavepacket_orthonormality(
    gamma: f64,
    f: &KWindow,
    h: &KWindow,
    grid: &UniformGrid,
    k_floor: f64,
) -> Result<WavepacketResult> {
    for w in [f, h] {
        let (a, _) = w.support();
        if a <= k_floor {
            return Err(Error::BelowKFloor { k: a.max(0.0), floor: k_floor });
        }
    }
    let pf = packet(gamma, f, grid);
    let ph = packet(gamma, h, grid);
    let value = pairing(&pf, &ph, grid.dx());
    let (fa, fb) = f.support();
    let (ha, hb) = h.support();
    let (a, b) = (fa.max(ha), fb.min(hb));
    let expected = if b > a {
        composite_rule(&linspace(a, b, 25), 16).into_iter().map(|(k, w)| w * f.value(k) * h.value(k)).sum()
    } else {
        0.0
    };
    Ok(WavepacketResult { value, expected })
}
