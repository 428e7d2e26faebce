//! EIT medium: linear dispersion, Kerr coefficient, scale lengths and the
//! soliton-existence region map of a lifetime-broadened Λ system.
//!
//! Level 1 is the ground state (Δ₁ = 0), level 2 the metastable state and
//! level 3 the excited state. Spontaneous decay goes 3 → 1 (Γ₁₃) and 3 → 2
//! (Γ₂₃), so Γ₁ = Γ₂ = 0, Γ₃ = Γ₁₃ + Γ₂₃ and
//! γ_αβ = (Γ_α + Γ_β)/2 + γ_αβ^dep.
//!
//! Dispersion coefficients are the plain Taylor coefficients
//! `K_j = ∂ʲK/∂ωʲ` at ω = 0, with `V_g = 1/Re K₁`.
//!
//! The Kerr coefficient is `W = (|g_p|²N/c) a₃₁⁽³⁾`. This follows from the
//! dipole form `W = 𝓝ₐ|p₃₁|²ω_p a₃₁⁽³⁾/(2cε₀ħ)` together with
//! `|g_p|² = |p₃₁|²ω_p/(2ε₀ħV)` and `N = 𝓝ₐV`: the quantization volume cancels
//! and `|g_p|²N/c = 𝓝ₐ|p₃₁|²ω_p/(2ε₀ħc)`, which is exactly the prefactor.
//!
//! `χ⁽³⁾ = 2c|p₃₁|²W/(ħ²ω_p)` needs the dipole moment, which is inferred from
//! the total excited-state decay rate Γ₃ through `Γ = ω³|p|²/(3πε₀ħc³)`.
//! The same dipole reproduces the coupling density 2.4×10¹⁰ cm⁻¹s⁻¹ at
//! 𝓝ₐ = 8.8×10¹¹ cm⁻³, which is a useful consistency check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{nonzero, Error, Result};
use crate::numerics::linspace;

/// Speed of light in cm/s.
pub const C_CM: f64 = 2.997_924_58e10;
/// Speed of light in m/s.
pub const C_SI: f64 = 2.997_924_58e8;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const EPS0: f64 = 8.854_187_8128e-12;

const TWO_PI: f64 = 2.0 * PI;
/// Relative floor below which a denominator counts as zero.
pub const DEFAULT_POLE_FLOOR: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct AtomicSystemParams {
    #[serde(rename = "Gamma13")]
    pub gamma13: f64,
    #[serde(rename = "Gamma23")]
    pub gamma23: f64,
    pub dephasing21: f64,
    pub dephasing31: f64,
    pub dephasing32: f64,
    #[serde(rename = "Delta2")]
    pub delta2: f64,
    #[serde(rename = "Delta3")]
    pub delta3: f64,
    #[serde(rename = "OmegaC")]
    pub omega_c: f64,
    /// |g_p|²N/c in cm⁻¹s⁻¹.
    pub coupling_density: f64,
    /// 𝓝ₐ in cm⁻³.
    pub atomic_density: f64,
    pub pulse_duration: f64,
    pub mean_photon_number: f64,
    /// Probe wavelength in m, used only for χ⁽³⁾.
    pub probe_wavelength: f64,
    /// Quantization volume in cm³; only splits n₀|g_p|² into its factors.
    pub quantization_volume: f64,
}

impl Default for AtomicSystemParams {
    fn default() -> Self {
        Self::paper()
    }
}

impl AtomicSystemParams {
    /// Cold ⁸⁷Rb D2 operating point with n₀ chosen so that g = 1.
    pub fn paper() -> Self {
        let mut p = Self {
            gamma13: TWO_PI * 3e6,
            gamma23: TWO_PI * 3e6,
            dephasing21: 0.0,
            dephasing31: 0.0,
            dephasing32: 0.0,
            delta2: -TWO_PI * 1.6e6,
            delta3: TWO_PI * 64e6,
            omega_c: TWO_PI * 42e6,
            coupling_density: 2.4e10,
            atomic_density: 8.8e11,
            pulse_duration: 5.5e-8,
            mean_photon_number: 1.0,
            probe_wavelength: 780.24e-9,
            quantization_volume: 1e-4,
        };
        p.mean_photon_number = photon_number_for_g(&p, 1.0).expect("paper parameters are valid");
        p
    }

    /// Validates ranges; returns warnings that do not reject the parameters.
    pub fn validate(&self) -> Result<Vec<String>> {
        let positive = [
            ("Gamma13", self.gamma13),
            ("Gamma23", self.gamma23),
            ("couplingDensity", self.coupling_density),
            ("atomicDensity", self.atomic_density),
            ("pulseDuration", self.pulse_duration),
            ("probeWavelength", self.probe_wavelength),
            ("quantizationVolume", self.quantization_volume),
        ];
        for (field, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid { field, reason: format!("must be finite and > 0, got {v}") });
            }
        }
        let non_negative = [
            ("dephasing21", self.dephasing21),
            ("dephasing31", self.dephasing31),
            ("dephasing32", self.dephasing32),
        ];
        for (field, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Invalid { field, reason: format!("must be finite and >= 0, got {v}") });
            }
        }
        for (field, v) in [("Delta2", self.delta2), ("Delta3", self.delta3), ("OmegaC", self.omega_c)] {
            if !v.is_finite() {
                return Err(Error::Invalid { field, reason: "must be finite".into() });
            }
        }
        if !(self.mean_photon_number >= 1.0) {
            return Err(Error::Invalid {
                field: "meanPhotonNumber",
                reason: format!("must be >= 1, got {}", self.mean_photon_number),
            });
        }
        let mut warnings = Vec::new();
        if !self.eit_regime() {
            let (g21, g31, _) = self.coherence_decay_rates();
            warnings.push(format!(
                "outside the EIT regime: |OmegaC|^2 = {:e} <= gamma21*gamma31 = {:e}",
                self.omega_c * self.omega_c,
                g21 * g31
            ));
        }
        Ok(warnings)
    }

    /// (γ₂₁, γ₃₁, γ₃₂).
    pub fn coherence_decay_rates(&self) -> (f64, f64, f64) {
        let (g1, g2, g3) = (0.0, 0.0, self.gamma13 + self.gamma23);
        (
            0.5 * (g2 + g1) + self.dephasing21,
            0.5 * (g3 + g1) + self.dephasing31,
            0.5 * (g3 + g2) + self.dephasing32,
        )
    }

    pub fn eit_regime(&self) -> bool {
        let (g21, g31, _) = self.coherence_decay_rates();
        self.omega_c * self.omega_c > g21 * g31
    }

    /// |g_p|² in s⁻² from the coupling density and the quantization volume.
    pub fn coupling_squared(&self) -> f64 {
        self.coupling_density * C_CM / (self.atomic_density * self.quantization_volume)
    }

    /// n₀|g_p|², the only combination entering the nonlinear length.
    pub fn nonlinear_drive(&self) -> f64 {
        self.mean_photon_number * self.coupling_squared()
    }

    /// Angular probe frequency in rad/s.
    pub fn probe_frequency(&self) -> f64 {
        TWO_PI * C_SI / self.probe_wavelength
    }

    /// |p₃₁|² in C²m² from Γ₃ = ω³|p|²/(3πε₀ħc³).
    pub fn dipole_squared(&self) -> f64 {
        let w = self.probe_frequency();
        let gamma3 = self.gamma13 + self.gamma23;
        gamma3 * 3.0 * PI * EPS0 * HBAR * C_SI.powi(3) / w.powi(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDetunings {
    pub d21: Complex64,
    pub d31: Complex64,
    pub d32: Complex64,
}

pub fn complex_detunings(p: &AtomicSystemParams) -> ComplexDetunings {
    let (g21, g31, g32) = p.coherence_decay_rates();
    ComplexDetunings {
        d21: c(p.delta2, g21),
        d31: c(p.delta3, g31),
        d32: c(p.delta3 - p.delta2, g32),
    }
}

fn resonant_denominator(p: &AtomicSystemParams, d: &ComplexDetunings, omega: f64, floor: f64) -> Result<Complex64> {
    let a = d.d21 + omega;
    let b = d.d31 + omega;
    let den = p.omega_c * p.omega_c - a * b;
    let scale = p.omega_c * p.omega_c + a.norm() * b.norm();
    if den.norm() <= floor * scale {
        return Err(Error::Pole { omega, modulus: den.norm() });
    }
    Ok(den)
}

/// K(ω) in cm⁻¹ with the default pole floor.
pub fn dispersion_relation(p: &AtomicSystemParams, omega: f64) -> Result<Complex64> {
    dispersion_relation_with_floor(p, omega, DEFAULT_POLE_FLOOR)
}

/// K(ω) = ω/c + κ(ω + d₂₁)/D(ω); `floor` is relative to |Ω_c|² + |ω+d₂₁||ω+d₃₁|.
pub fn dispersion_relation_with_floor(p: &AtomicSystemParams, omega: f64, floor: f64) -> Result<Complex64> {
    let d = complex_detunings(p);
    let den = resonant_denominator(p, &d, omega, floor)?;
    Ok(omega / C_CM + p.coupling_density * (d.d21 + omega) / den)
}

/// (K₀, K₁, K₂) from the closed-form derivatives of the rational K(ω).
pub fn dispersion_coefficients(p: &AtomicSystemParams) -> Result<(Complex64, Complex64, Complex64)> {
    let d = complex_detunings(p);
    let den = resonant_denominator(p, &d, 0.0, DEFAULT_POLE_FLOOR)?;
    // R = N/D with N = ω + d21, D = |Ωc|² − (ω+d21)(ω+d31)
    let n = d.d21;
    let dp = -(d.d21 + d.d31);
    let dpp = c(-2.0, 0.0);
    let r0 = n / den;
    let r1 = 1.0 / den - n * dp / (den * den);
    let r2 = -2.0 * dp / (den * den) - n * dpp / (den * den) + 2.0 * n * dp * dp / (den * den * den);
    let kappa = p.coupling_density;
    Ok((kappa * r0, 1.0 / C_CM + kappa * r1, kappa * r2))
}

/// Steady-state iteration coefficients up to third order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrChain {
    pub a21_1: Complex64,
    pub a31_1: Complex64,
    /// Computed for completeness; it never enters a₃₁⁽³⁾.
    pub a11_2: Complex64,
    pub a22_2: Complex64,
    pub a33_2: Complex64,
    pub a32_2: Complex64,
    pub a31_3: Complex64,
    pub dc: f64,
}

pub fn kerr_chain(p: &AtomicSystemParams) -> Result<KerrChain> {
    let d = complex_detunings(p);
    let (_, _, g32) = p.coherence_decay_rates();
    let oc = c(p.omega_c, 0.0);
    let oc2 = oc.norm_sqr();

    let den = oc2 - d.d21 * d.d31;
    nonzero("|OmegaC|^2 - d21*d31", den.norm(), DEFAULT_POLE_FLOOR * (oc2 + (d.d21 * d.d31).norm()))?;
    nonzero("d32", d.d32.norm(), 0.0)?;
    nonzero("Gamma13", p.gamma13, 0.0)?;
    let dc = 2.0 * g32 * oc2 / d.d32.norm_sqr();
    nonzero("Dc = 2 gamma32 |OmegaC|^2/|d32|^2", dc, 0.0)?;

    let a21_1 = -oc.conj() / den;
    let a31_1 = d.d21 / den;

    let x = 2.0 * a31_1.conj().im;
    let y = 2.0 * (oc.conj() / d.d32 * a21_1.conj()).im;
    let (g13, g23) = (p.gamma13, p.gamma23);
    let a11_2 = (g23 + 2.0 * dc) / (g13 * dc) * x - y / dc;
    let a22_2 = y / dc - (g23 + dc) / (g13 * dc) * x;
    let a33_2 = -x / g13;
    let a32_2 = -(a21_1.conj() + oc * (a22_2 - a33_2)) / d.d32;
    let a31_3 = (oc * a32_2.conj() - d.d21 * (a22_2 + 2.0 * a33_2)) / den;

    Ok(KerrChain {
        a21_1,
        a31_1,
        a11_2: c(a11_2, 0.0),
        a22_2: c(a22_2, 0.0),
        a33_2: c(a33_2, 0.0),
        a32_2,
        a31_3,
        dc,
    })
}

/// (W in cm⁻¹s², χ⁽³⁾ in m²V⁻²).
pub fn kerr_coefficient(p: &AtomicSystemParams) -> Result<(Complex64, Complex64)> {
    let chain = kerr_chain(p)?;
    let w = p.coupling_density * chain.a31_3;
    // cm⁻¹s² → m⁻¹s²
    let w_si = w * 100.0;
    let chi3 = 2.0 * C_SI * p.dipole_squared() * w_si / (HBAR * HBAR * p.probe_frequency());
    Ok((w, chi3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleLengths {
    pub ldisp: f64,
    pub lnln: f64,
    pub labs: f64,
    pub g: f64,
    pub nu: f64,
}

pub fn scale_lengths(p: &AtomicSystemParams, k0: Complex64, k2: Complex64, w: Complex64) -> Result<ScaleLengths> {
    nonzero("K2", k2.norm(), 0.0)?;
    nonzero("W", w.norm(), 0.0)?;
    let drive = p.nonlinear_drive();
    nonzero("n0 |g_p|^2", drive, 0.0)?;
    if !(k0.im > 0.0) {
        return Err(Error::GainMedium(k0.im));
    }
    let ldisp = p.pulse_duration.powi(2) / k2.norm();
    let lnln = 1.0 / (drive * w.norm());
    let labs = 1.0 / k0.im;
    Ok(ScaleLengths { ldisp, lnln, labs, g: ldisp / lnln, nu: ldisp / labs })
}

/// Mean photon number that makes the dimensionless nonlinearity equal `g`.
pub fn photon_number_for_g(p: &AtomicSystemParams, g: f64) -> Result<f64> {
    let (_, _, k2) = dispersion_coefficients(p)?;
    let (w, _) = kerr_coefficient(p)?;
    nonzero("K2", k2.norm(), 0.0)?;
    nonzero("W", w.norm(), 0.0)?;
    let ldisp = p.pulse_duration.powi(2) / k2.norm();
    Ok(g / (ldisp * p.coupling_squared() * w.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumCoefficients {
    pub k0: Complex64,
    pub k1: Complex64,
    pub k2: Complex64,
    pub w: Complex64,
    pub chi3: Complex64,
    pub ldisp: f64,
    pub lnln: f64,
    pub labs: f64,
    pub g: f64,
    pub nu: f64,
    pub vg: f64,
    pub pulse_duration: f64,
}

pub fn medium_coefficients(p: &AtomicSystemParams) -> Result<MediumCoefficients> {
    let (k0, k1, k2) = dispersion_coefficients(p)?;
    let (w, chi3) = kerr_coefficient(p)?;
    let s = scale_lengths(p, k0, k2, w)?;
    nonzero("Re K1", k1.re, 0.0)?;
    Ok(MediumCoefficients {
        k0,
        k1,
        k2,
        w,
        chi3,
        ldisp: s.ldisp,
        lnln: s.lnln,
        labs: s.labs,
        g: s.g,
        nu: s.nu,
        vg: 1.0 / k1.re,
        pulse_duration: p.pulse_duration,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonVelocity {
    /// V_g + 𝓐g t₀ sinϑ / L_disp in cm/s, the printed estimate.
    pub v_sol: f64,
    pub fraction_of_c: f64,
    /// 1/(1/V_g + 𝓐g t₀ sinϑ / L_disp) in cm/s, the kinematic velocity implied
    /// by s = z/(2L_disp) and τ = (t − z/V_g)/t₀.
    pub v_kinematic: f64,
}

pub fn soliton_velocity(coeffs: &MediumCoefficients, amplitude: f64, theta: f64) -> SolitonVelocity {
    let shift = amplitude * coeffs.g * coeffs.pulse_duration * theta.sin() / coeffs.ldisp;
    let v_sol = coeffs.vg + shift;
    SolitonVelocity {
        v_sol,
        fraction_of_c: v_sol / C_CM,
        v_kinematic: 1.0 / (1.0 / coeffs.vg + shift),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "DS")]
    DarkSoliton,
    #[serde(rename = "BS")]
    BrightSoliton,
    #[serde(rename = "damping")]
    Damping,
    #[serde(rename = "none")]
    NoNonlinearity,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::DarkSoliton => "DS",
            Region::BrightSoliton => "BS",
            Region::Damping => "damping",
            Region::NoNonlinearity => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct RegionThresholds {
    pub nu_max: f64,
    pub eta: f64,
}

impl Default for RegionThresholds {
    fn default() -> Self {
        Self { nu_max: 0.1, eta: 10.0 }
    }
}

/// Axis specification `(min, max, count)` with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Nodes; values within 10⁻⁹ of the span from zero are snapped to 0.
    pub fn nodes(&self) -> Vec<f64> {
        let span = (self.max - self.min).abs();
        linspace(self.min, self.max, self.count)
            .into_iter()
            .map(|x| if x.abs() < 1e-9 * span { 0.0 } else { x })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct RegionGrid {
    pub delta3: Axis,
    pub delta2: Axis,
}

impl Default for RegionGrid {
    fn default() -> Self {
        let h = TWO_PI * 0.05e6;
        Self {
            delta3: Axis { min: -TWO_PI * 150e6, max: TWO_PI * 150e6, count: 200 },
            delta2: Axis { min: -99.0 * h, max: 100.0 * h, count: 200 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub delta3: f64,
    pub delta2: f64,
    pub region: Region,
    pub nu: f64,
    pub lnln_over_ldisp: f64,
    /// Re W / Re K₂.
    pub sign_ratio: f64,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub delta3: Vec<f64>,
    pub delta2: Vec<f64>,
    /// Row-major in Δ₂: index `i2 * delta3.len() + i3`.
    pub points: Vec<RegionPoint>,
}

impl RegionMap {
    pub fn at(&self, i2: usize, i3: usize) -> &RegionPoint {
        &self.points[i2 * self.delta3.len() + i3]
    }

    pub fn count(&self, region: Region) -> usize {
        self.points.iter().filter(|p| p.region == region).count()
    }
}

/// Classifies one (Δ₃, Δ₂) point with n₀|g_p|² held at the value of `base`.
pub fn classify_point(base: &AtomicSystemParams, delta3: f64, delta2: f64, th: &RegionThresholds) -> RegionPoint {
    let p = AtomicSystemParams { delta2, delta3, ..*base };
    let failed = |msg: String| RegionPoint {
        delta3,
        delta2,
        region: Region::Damping,
        nu: f64::NAN,
        lnln_over_ldisp: f64::NAN,
        sign_ratio: f64::NAN,
        diagnostic: Some(msg),
    };
    let (k0, _, k2) = match dispersion_coefficients(&p) {
        Ok(v) => v,
        Err(e) => return failed(e.to_string()),
    };
    let (w, _) = match kerr_coefficient(&p) {
        Ok(v) => v,
        Err(e) => return failed(e.to_string()),
    };
    let s = match scale_lengths(&p, k0, k2, w) {
        Ok(v) => v,
        Err(e) => return failed(e.to_string()),
    };
    let sign_ratio = w.re / k2.re;
    let lnln_over_ldisp = s.lnln / s.ldisp;
    let region = if !(s.nu <= th.nu_max) {
        Region::Damping
    } else if lnln_over_ldisp > th.eta {
        Region::NoNonlinearity
    } else if sign_ratio > 0.0 {
        Region::DarkSoliton
    } else {
        Region::BrightSoliton
    };
    RegionPoint { delta3, delta2, region, nu: s.nu, lnln_over_ldisp, sign_ratio, diagnostic: None }
}

/// Region map over the (Δ₃, Δ₂) grid. Points are independent and evaluated in
/// parallel; the result does not depend on scheduling.
pub fn region_classify(base: &AtomicSystemParams, grid: &RegionGrid, th: &RegionThresholds) -> RegionMap {
    let d3 = grid.delta3.nodes();
    let d2 = grid.delta2.nodes();
    let n3 = d3.len();
    let points = (0..d2.len() * n3)
        .into_par_iter()
        .map(|idx| classify_point(base, d3[idx % n3], d2[idx / n3], th))
        .collect();
    RegionMap { delta3: d3, delta2: d2, points }
}
