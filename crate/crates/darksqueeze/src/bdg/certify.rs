//! Numerical certification of the closed-form spectral data.
//!
//! Every check yields a [`CheckRecord`]. Records without a threshold are
//! informational and never fail the run.
//!
//! Two records are expected to fail. The printed zero mode `(u₁, v₁)` is a
//! generalized eigenvector, `𝓛(u₁, v₁) = −Ψ_ψ/2` after normalization, so its
//! eigen-residual is O(1); the kernel vector and the Jordan chain are checked
//! separately. The defective zero eigenvalue also splits into a ±ε pair in the
//! dense discretization, so two eigenvalues lie near zero while only one
//! eigenvector exists.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::completeness::{completeness_check, wavepacket_orthonormality, KGrid, KWindow};
use super::dense::{count_zero_modes, DenseSpec, ZeroModeCount};
use super::fourier::{analytic_fourier_integrals, mode_pairing};
use super::modes::{
    conjugate_mode, continuous_mode, eigenvalue_plus, mode_eigenvalue, translation_mode, zero_mode, zero_mode_raw,
    DEFAULT_K_FLOOR,
};
use super::{euclidean, BdGContext, Operator, Pair};
use crate::error::Result;
use crate::numerics::{edge_window, interior_mask, UniformGrid};

pub const RESIDUAL_TOL: f64 = 1e-6;
pub const HERMITICITY_TOL: f64 = 1e-8;
pub const NORMALIZATION_TOL: f64 = 1e-8;
pub const CROSS_PAIRING_TOL: f64 = 1e-6;
pub const WAVEPACKET_TOL: f64 = 1e-3;
pub const DISJOINT_TOL: f64 = 1e-6;
pub const FOURIER_TOL: f64 = 1e-8;
pub const COMPLETENESS_TOL: f64 = 5e-2;
pub const COMPLETENESS_SECH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub value: f64,
    pub threshold: Option<f64>,
    pub pass: Option<bool>,
}

impl CheckRecord {
    pub fn below(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, threshold: Some(threshold), pass: Some(value < threshold) }
    }

    pub fn info(check: impl Into<String>, value: f64) -> Self {
        Self { check: check.into(), value, threshold: None, pass: None }
    }

    /// Pass when `value` equals `target` exactly (used for counts).
    pub fn equals(check: impl Into<String>, value: f64, target: f64) -> Self {
        Self { check: check.into(), value, threshold: Some(target), pass: Some(value == target) }
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct CertifyConfig {
    pub grid: UniformGrid,
    pub k_grid: KGrid,
    pub dense: DenseSpec,
    pub seed: u64,
    pub random_tests: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            grid: UniformGrid::symmetric(40.0, 4096),
            k_grid: KGrid::default(),
            dense: DenseSpec::default(),
            seed: 20240521,
            random_tests: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub records: Vec<CheckRecord>,
    pub zero_mode_counts: Vec<ZeroModeCount>,
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        !self.records.iter().any(CheckRecord::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.failed())
    }

    pub fn get(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }
}

pub const RESIDUAL_KS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

pub fn residual_gammas() -> [f64; 3] {
    [0.0, (PI / 6.0).tan(), (PI / 3.0).tan()]
}

pub fn zero_mode_gammas() -> [f64; 4] {
    [0.0, 0.5, 1.0, (PI / 3.0).tan()]
}

fn fmt_g(g: f64) -> String {
    format!("{g:.4}")
}

/// Relative sup residual of `𝓛f − λf − rhs` on the interior 80% of the grid,
/// with f tapered over the outer 10% at each end.
pub fn windowed_residual(op: &Operator, f: &Pair, lambda: f64, rhs: Option<&Pair>) -> Result<f64> {
    let grid = op.context().grid;
    let w = edge_window(&grid, 0.1);
    let mask = interior_mask(&grid, 0.8);
    let fw = f.window(&w);
    let mut r = op.apply(&fw, false)?;
    r.add_scaled(&fw, Complex64::new(-lambda, 0.0));
    if let Some(h) = rhs {
        r.add_scaled(&h.window(&w), Complex64::new(-1.0, 0.0));
    }
    Ok(r.max_abs(&mask) / fw.max_abs(&mask))
}

/// Residual of the continuous mode of wavenumber k.
pub fn continuous_residual(ctx: &BdGContext, k: f64) -> Result<f64> {
    let m = continuous_mode(ctx, k)?;
    let x = ctx.grid.points();
    windowed_residual(&Operator::new(*ctx), &m.sample_right(&x), m.right.eigenvalue, None)
}

/// Residuals of `𝓛Ψ_ψ = 0`, `𝓛Ψ_φ = −Ψ_ψ`, and of the printed pair as an eigenvector.
pub fn zero_mode_residuals(ctx: &BdGContext) -> Result<(f64, f64, f64)> {
    let op = Operator::new(*ctx);
    let x = ctx.grid.points();
    let psi = translation_mode(ctx).sample_right(&x);
    let phi = conjugate_mode(ctx).sample_right(&x);
    let minus_psi = psi.scale(Complex64::new(-1.0, 0.0));
    let kernel = windowed_residual(&op, &psi, 0.0, None)?;
    let jordan = windowed_residual(&op, &phi, 0.0, Some(&minus_psi))?;
    let printed = windowed_residual(&op, &zero_mode(ctx).sample_right(&x), 0.0, None)?;
    Ok((kernel, jordan, printed))
}

/// Smooth decaying random pair: a few Gaussian wave packets.
fn random_pair(rng: &mut ChaCha8Rng, x: &[f64]) -> Pair {
    let mut comps = Vec::new();
    for _ in 0..2 {
        let bumps: Vec<(f64, f64, f64, Complex64)> = (0..3)
            .map(|_| {
                let c = rng.random_range(-10.0..10.0);
                let s = rng.random_range(0.5..3.0);
                let p = rng.random_range(-3.0..3.0);
                let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (c, s, p, a)
            })
            .collect();
        comps.push(
            x.iter()
                .map(|&xi| {
                    bumps
                        .iter()
                        .map(|&(c, s, p, a)| {
                            let d = (xi - c) / s;
                            a * Complex64::from_polar((-0.5 * d * d).exp(), p * xi)
                        })
                        .sum()
                })
                .collect::<Vec<Complex64>>(),
        );
    }
    let v = comps.pop().unwrap_or_default();
    let u = comps.pop().unwrap_or_default();
    Pair { u, v }
}

/// Worst pointwise `|𝓛†f − σ₃𝓛σ₃f|` and worst bilinear defect
/// `|⟨f, 𝓛h⟩ − ⟨𝓛†f, h⟩|`, both relative, over random smooth pairs.
pub fn pseudo_hermiticity(ctx: &BdGContext, count: usize, seed: u64) -> Result<(f64, f64)> {
    let op = Operator::new(*ctx);
    let x = ctx.grid.points();
    let dx = ctx.grid.dx();
    let all = vec![true; x.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pointwise, mut bilinear) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let f = random_pair(&mut rng, &x);
        let h = random_pair(&mut rng, &x);
        let adj = op.apply(&f, true)?;
        let conj = op.apply(&f.sigma3(), false)?.sigma3();
        pointwise = pointwise.max(adj.max_diff(&conj, &all) / adj.max_abs(&all));
        let lh = op.apply(&h, false)?;
        let lhs = euclidean(&f, &lh, dx);
        let rhs = euclidean(&adj, &h, dx);
        let scale = (euclidean(&f, &f, dx).re * euclidean(&lh, &lh, dx).re).sqrt();
        bilinear = bilinear.max((lhs - rhs).norm() / scale);
    }
    Ok((pointwise, bilinear))
}

/// Zero-mode block of the quadratic Hamiltonian `½∫W†σ₃𝓛W` for
/// `W = Ψ_ψQ + iΨ_φP`: the QQ and QP couplings and the P² coefficient with the
/// printed and with the 1/√2-rescaled ψ₁, φ₁. A free particle `P²/2` needs the
/// rescaled pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeHamiltonian {
    pub qq: Complex64,
    pub qp: Complex64,
    pub pp_printed: f64,
    pub pp_normalized: f64,
}

pub fn zero_mode_hamiltonian(ctx: &BdGContext) -> Result<ZeroModeHamiltonian> {
    let op = Operator::new(*ctx);
    let grid = ctx.grid;
    let x = grid.points();
    let w = edge_window(&grid, 0.1);
    let mask = interior_mask(&grid, 0.8);
    let psi = translation_mode(ctx).sample_right(&x).window(&w);
    let phi = conjugate_mode(ctx).sample_right(&x).window(&w);
    let lpsi = op.apply(&psi, false)?;
    let lphi = op.apply(&phi, false)?;
    // the integrands decay like sech²σ, so the tapered edges carry nothing
    let inner = |a: &Pair, b: &Pair| -> Complex64 {
        (0..x.len())
            .filter(|&j| mask[j])
            .map(|j| a.u[j].conj() * b.u[j] - a.v[j].conj() * b.v[j])
            .sum::<Complex64>()
            * grid.dx()
    };
    let qq = 0.5 * inner(&psi, &lpsi);
    let qp = inner(&psi, &lphi) * Complex64::new(0.0, 0.5);
    let pp = -0.5 * inner(&phi, &lphi).re;
    Ok(ZeroModeHamiltonian { qq, qp, pp_printed: pp, pp_normalized: 0.5 * pp })
}

/// Smallest `E⁽⁺⁾(k)` over 0 < |k| ≤ 30 and the largest `|E⁽⁺⁾(k) − E⁽⁺⁾(−k)|`.
pub fn eigenvalue_positivity(gamma: f64) -> (f64, f64) {
    let ks = crate::numerics::linspace(1e-3, 30.0, 3000);
    let min = ks
        .iter()
        .flat_map(|&k| [mode_eigenvalue(gamma, k), mode_eigenvalue(gamma, -k), eigenvalue_plus(gamma, k)])
        .fold(f64::INFINITY, f64::min);
    let odd = ks
        .iter()
        .map(|&k| (eigenvalue_plus(gamma, k) - eigenvalue_plus(gamma, -k)).abs())
        .fold(0.0, f64::max);
    (min, odd)
}

pub fn completeness_tests(grid: &UniformGrid) -> [(f64, Pair); 2] {
    let x = grid.points();
    let f1 = Pair::from_fn(&x, |s| (Complex64::new(1.0 / s.cosh(), 0.0), Complex64::new(0.0, 0.0)));
    let f2 = Pair::from_fn(&x, |s| {
        (Complex64::new((-0.25 * s * s).exp(), 0.0), Complex64::new(0.0, (-0.5 * s * s).exp()))
    });
    [(0.0, f1), ((PI / 6.0).tan(), f2)]
}

pub fn certify(cfg: &CertifyConfig) -> Result<CertifyReport> {
    cfg.grid.validate_spectral()?;
    cfg.k_grid.validate()?;
    let mut records = Vec::new();
    let ctx_of = |g: f64| BdGContext::new(g, 1.0, cfg.grid);

    for g in residual_gammas() {
        let ctx = ctx_of(g)?;
        for k in RESIDUAL_KS {
            let r = continuous_residual(&ctx, k)?;
            records.push(CheckRecord::below(format!("residual.continuous[k={k},gamma={}]", fmt_g(g)), r, RESIDUAL_TOL));
        }
    }

    for g in zero_mode_gammas() {
        let ctx = ctx_of(g)?;
        let (kernel, jordan, printed) = zero_mode_residuals(&ctx)?;
        let tag = fmt_g(g);
        records.push(CheckRecord::below(format!("residual.kernel[gamma={tag}]"), kernel, RESIDUAL_TOL));
        records.push(CheckRecord::below(format!("residual.jordan[gamma={tag}]"), jordan, RESIDUAL_TOL));
        records.push(CheckRecord::below(format!("residual.printed_zero_mode[gamma={tag}]"), printed, RESIDUAL_TOL));
    }

    for g in [0.0, 0.5, 1.0] {
        let ctx = ctx_of(g)?;
        let h = zero_mode_hamiltonian(&ctx)?;
        let tag = fmt_g(g);
        records.push(CheckRecord::below(format!("hamiltonian.qq[gamma={tag}]"), h.qq.norm(), HERMITICITY_TOL));
        records.push(CheckRecord::below(format!("hamiltonian.qp[gamma={tag}]"), h.qp.norm(), HERMITICITY_TOL));
        records.push(CheckRecord::info(format!("hamiltonian.pp_printed[gamma={tag}]"), h.pp_printed));
        records.push(CheckRecord::below(format!("hamiltonian.pp_normalized[gamma={tag}]"), (h.pp_normalized - 0.5).abs(), NORMALIZATION_TOL));
    }

    for g in residual_gammas() {
        let (min, odd) = eigenvalue_positivity(g);
        records.push(CheckRecord::equals(format!("eigenvalue.positive[gamma={}]", fmt_g(g)), (min > 0.0) as u8 as f64, 1.0));
        records.push(CheckRecord::below(format!("eigenvalue.even[gamma={}]", fmt_g(g)), odd, HERMITICITY_TOL));
    }

    for g in [0.0, 1.0] {
        let ctx = ctx_of(g)?;
        let (pw, bl) = pseudo_hermiticity(&ctx, cfg.random_tests, cfg.seed)?;
        records.push(CheckRecord::below(format!("pseudo_hermiticity.pointwise[gamma={}]", fmt_g(g)), pw, HERMITICITY_TOL));
        records.push(CheckRecord::below(format!("pseudo_hermiticity.bilinear[gamma={}]", fmt_g(g)), bl, HERMITICITY_TOL));
    }

    for g in [0.0, 0.5, 1.0] {
        let ctx = ctx_of(g)?;
        let tag = fmt_g(g);
        let z = zero_mode(&ctx).right;
        let n = mode_pairing(&z, &z, &cfg.grid, DEFAULT_K_FLOOR)?;
        records.push(CheckRecord::below(format!("normalization.zero_mode[gamma={tag}]"), (n - 1.0).norm(), NORMALIZATION_TOL));
        let zr = zero_mode_raw(&ctx).right;
        let raw = mode_pairing(&zr, &zr, &cfg.grid, DEFAULT_K_FLOOR)?;
        records.push(CheckRecord::info(format!("normalization.zero_mode_raw[gamma={tag}]"), raw.re));
        for k in [0.5, 1.0, 2.0] {
            let m = continuous_mode(&ctx, k)?.right;
            let a = mode_pairing(&z, &m, &cfg.grid, DEFAULT_K_FLOOR)?.norm();
            let b = mode_pairing(&m, &z, &cfg.grid, DEFAULT_K_FLOOR)?.norm();
            records.push(CheckRecord::below(format!("cross_pairing[k={k},gamma={tag}]"), a.max(b), CROSS_PAIRING_TOL));
        }
    }

    for g in [0.0, 1.0] {
        let tag = fmt_g(g);
        let a = KWindow::gaussian(1.5, 0.3);
        let b = KWindow::gaussian(3.5, 0.3);
        let same = wavepacket_orthonormality(g, &a, &a, &cfg.grid, DEFAULT_K_FLOOR)?;
        records.push(CheckRecord::below(format!("wavepacket.same[gamma={tag}]"), same.relative_error(), WAVEPACKET_TOL));
        let apart = wavepacket_orthonormality(g, &a, &b, &cfg.grid, DEFAULT_K_FLOOR)?;
        records.push(CheckRecord::below(format!("wavepacket.disjoint[gamma={tag}]"), apart.value.norm(), DISJOINT_TOL));
    }

    for k in [0.5, 1.0, 2.0] {
        let f = analytic_fourier_integrals(k, DEFAULT_K_FLOOR)?;
        records.push(CheckRecord::below(format!("fourier.tanh[k={k}]"), f.tanh.abs_error(), FOURIER_TOL));
        records.push(CheckRecord::below(format!("fourier.sech2[k={k}]"), f.sech2.abs_error(), FOURIER_TOL));
        records.push(CheckRecord::below(format!("fourier.tanh_sech2[k={k}]"), f.tanh_sech2.abs_error(), FOURIER_TOL));
    }

    let refined = cfg.k_grid.refined();
    for (i, (g, f)) in completeness_tests(&cfg.grid).into_iter().enumerate() {
        let ctx = ctx_of(g)?;
        let coarse = completeness_check(&ctx, std::slice::from_ref(&f), &cfg.k_grid)?[0];
        let fine = completeness_check(&ctx, std::slice::from_ref(&f), &refined)?[0];
        let tol = if i == 0 { COMPLETENESS_SECH_TOL } else { COMPLETENESS_TOL };
        records.push(CheckRecord::below(format!("completeness[f{},gamma={}]", i + 1, fmt_g(g)), coarse, tol));
        records.push(CheckRecord::below(format!("completeness.refined[f{},gamma={}]", i + 1, fmt_g(g)), fine, coarse));
    }

    let mut counts = Vec::new();
    for g in [0.0, 0.5, 1.0] {
        let c = count_zero_modes(g, &cfg.dense)?;
        records.push(CheckRecord::equals(format!("zero_modes.geometric[gamma={}]", fmt_g(g)), c.geometric as f64, 1.0));
        records.push(CheckRecord::equals(format!("zero_modes.near_zero_eigenvalues[gamma={}]", fmt_g(g)), c.algebraic as f64, 1.0));
        counts.push(c);
    }

    Ok(CertifyReport { records, zero_mode_counts: counts })
}
