//! Run configuration: one JSON file, unknown keys rejected, every omitted
//! field filled from the defaults below.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use darksqueeze::bdg::completeness::KGrid;
use darksqueeze::bdg::dense::DenseSpec;
use darksqueeze::medium::{medium_coefficients, AtomicSystemParams, Axis, RegionGrid, RegionThresholds};
use darksqueeze::numerics::UniformGrid;
use darksqueeze::oracles::PropagationConfig;
use darksqueeze::soliton::DarkSolitonParams;
use darksqueeze::spin::SpinOptions;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct RunConfig {
    pub atomic: AtomicSystemParams,
    pub soliton: SolitonSpec,
    pub grids: Grids,
    pub thresholds: Thresholds,
    pub certify: CertifySection,
    pub oracle: OracleSection,
    pub spin: SpinOptions,
    pub monte_carlo: MonteCarloSection,
    pub seed: u64,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            atomic: AtomicSystemParams::paper(),
            soliton: SolitonSpec::default(),
            grids: Grids::default(),
            thresholds: Thresholds::default(),
            certify: CertifySection::default(),
            oracle: OracleSection::default(),
            spin: SpinOptions::default(),
            monte_carlo: MonteCarloSection::default(),
            seed: 20240521,
            output: OutputSection::default(),
        }
    }
}

/// Either the literal string `"derive-from-medium"` or explicit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SolitonSpec {
    Derived(DeriveFlag),
    Explicit(SolitonInput),
}

impl Default for SolitonSpec {
    fn default() -> Self {
        SolitonSpec::Derived(DeriveFlag::DeriveFromMedium)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeriveFlag {
    #[serde(rename = "derive-from-medium")]
    DeriveFromMedium,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolitonInput {
    #[serde(rename = "A")]
    pub a: f64,
    pub g: f64,
    /// Blackness angle ϑ.
    pub theta: f64,
    pub theta0: f64,
    pub tau0: f64,
}

impl Default for SolitonInput {
    fn default() -> Self {
        Self { a: 1.0, g: 1.0, theta: 0.0, theta0: 0.0, tau0: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct Grids {
    /// τ samples per soliton profile.
    pub soliton_points: usize,
    pub soliton_thetas: Vec<f64>,
    /// σ grid for the mode profiles.
    pub modes: UniformGrid,
    pub modes_k: f64,
    pub modes_theta: f64,
    pub k_axis: Axis,
    pub s: Axis,
    pub theta: Axis,
    pub region_map: RegionGrid,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            soliton_points: 2048,
            soliton_thetas: vec![0.0, PI / 6.0, PI / 3.0],
            modes: UniformGrid::symmetric(10.0, 512),
            modes_k: 1.0,
            modes_theta: PI / 6.0,
            k_axis: Axis { min: -5.0, max: 5.0, count: 201 },
            s: Axis { min: 0.0, max: 1.0, count: 101 },
            theta: Axis { min: 0.0, max: 2.0 * PI, count: 201 },
            region_map: RegionGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct Thresholds {
    pub region: RegionThresholds,
    /// Relative error of the NLS dip velocity.
    pub velocity: f64,
    /// Sup-norm change of the black-soliton intensity.
    pub stationarity: f64,
    /// Relative error of the zero-mode drift slope.
    pub drift: f64,
    /// Relative error of the continuous-mode phase slope.
    pub phase: f64,
    /// Monte-Carlo agreement in standard errors.
    pub monte_carlo_sigmas: f64,
    /// Closed form vs covariance path.
    pub two_path: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            region: RegionThresholds::default(),
            velocity: 1e-2,
            stationarity: 1e-6,
            drift: 2e-2,
            phase: 1e-2,
            monte_carlo_sigmas: 3.0,
            two_path: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct CertifySection {
    pub grid: UniformGrid,
    pub k_grid: KGrid,
    pub dense: DenseSpec,
    pub random_tests: usize,
}

impl Default for CertifySection {
    fn default() -> Self {
        let d = darksqueeze::bdg::certify::CertifyConfig::default();
        Self { grid: d.grid, k_grid: d.k_grid, dense: d.dense, random_tests: d.random_tests }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct OracleSection {
    pub nls: PropagationConfig,
    pub linear: PropagationConfig,
    /// Grey soliton used for the velocity check.
    pub velocity_theta: f64,
    pub drift_amplitude: f64,
    pub phase_k: f64,
    pub phase_amplitude: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            nls: PropagationConfig::default(),
            linear: PropagationConfig { steps: 5000, ..PropagationConfig::default() },
            velocity_theta: PI / 6.0,
            drift_amplitude: 1e-4,
            phase_k: 2.0,
            phase_amplitude: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct MonteCarloSection {
    pub samples: usize,
    /// (s, θ) points of the quadrature check.
    pub points: Vec<(f64, f64)>,
    pub profile_samples: usize,
    pub profile_s: f64,
    pub spin_samples: usize,
    pub spin_point: (f64, f64),
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            points: vec![(0.6, 2.0 * PI / 5.0), (0.3, PI / 5.0), (0.9, 3.0 * PI / 5.0), (0.5, 4.0 * PI / 5.0), (1.0, 0.1)],
            profile_samples: 100_000,
            profile_s: 0.9,
            spin_samples: 100_000,
            spin_point: (0.5, PI / 4.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), format: Format::Csv }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::validation("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::validation(schema_field(&e.to_string()), e.to_string()))
    }

    /// Resolves the soliton and checks every section.
    pub fn validate(&self) -> Result<DarkSolitonParams, Failure> {
        self.atomic.validate().map_err(|e| Failure::from_lib("atomic", e))?;
        let p = self.soliton()?;
        p.validate().map_err(|e| Failure::from_lib("soliton", e))?;
        for (name, v) in self.grids.soliton_thetas.iter().enumerate() {
            if !(0.0..=PI / 2.0).contains(v) {
                return Err(Failure::validation("grids.solitonThetas", format!("entry {name} = {v} outside [0, pi/2]")));
            }
        }
        if !(0.0..=PI / 2.0).contains(&self.grids.modes_theta) {
            return Err(Failure::validation("grids.modesTheta", "outside [0, pi/2]"));
        }
        self.grids.modes.validate_spectral().map_err(|e| Failure::from_lib("grids.modes", e))?;
        self.certify.grid.validate_spectral().map_err(|e| Failure::from_lib("certify.grid", e))?;
        self.certify.k_grid.validate().map_err(|e| Failure::from_lib("certify.kGrid", e))?;
        self.oracle.nls.validate().map_err(|e| Failure::from_lib("oracle.nls", e))?;
        self.oracle.linear.validate().map_err(|e| Failure::from_lib("oracle.linear", e))?;
        for (field, axis) in [("grids.s", &self.grids.s), ("grids.theta", &self.grids.theta), ("grids.kAxis", &self.grids.k_axis)]
        {
            if axis.count < 2 || !(axis.max > axis.min) {
                return Err(Failure::validation(field, "needs max > min and at least two points"));
            }
        }
        if self.grids.s.min < 0.0 {
            return Err(Failure::validation("grids.s", "s must be >= 0"));
        }
        if self.monte_carlo.samples < 2 || self.monte_carlo.profile_samples < 2 || self.monte_carlo.spin_samples < 2 {
            return Err(Failure::validation("monteCarlo", "sample counts must be >= 2"));
        }
        Ok(p)
    }

    pub fn soliton(&self) -> Result<DarkSolitonParams, Failure> {
        match &self.soliton {
            SolitonSpec::Explicit(s) => Ok(DarkSolitonParams::new(s.a, s.g, s.theta, s.theta0, s.tau0)),
            SolitonSpec::Derived(_) => {
                let m = medium_coefficients(&self.atomic).map_err(|e| Failure::from_lib("atomic", e))?;
                Ok(DarkSolitonParams::new(1.0, m.g, 0.0, 0.0, 0.0))
            }
        }
    }
}

/// Best-effort extraction of the offending key from a serde_json message.
fn schema_field(msg: &str) -> String {
    if let Some(rest) = msg.strip_prefix("unknown field `") {
        if let Some(end) = rest.find('`') {
            return rest[..end].to_string();
        }
    }
    if msg.contains("SolitonSpec") {
        return "soliton".into();
    }
    "config".into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c = RunConfig::parse("{}").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = RunConfig::parse(r#"{"sede": 3}"#).unwrap_err();
        assert_eq!(e.field, "sede");
    }

    #[test]
    fn explicit_soliton_parses() {
        let c = RunConfig::parse(r#"{"soliton": {"A": 1.0, "g": 0.6, "theta": 0.3}}"#).unwrap();
        let p = c.soliton().unwrap();
        assert_eq!((p.a, p.g, p.theta), (1.0, 0.6, 0.3));
    }

    #[test]
    fn blackness_out_of_range_names_the_field() {
        let c = RunConfig::parse(r#"{"soliton": {"theta": 2.0}}"#).unwrap();
        let e = c.validate().unwrap_err();
        assert_eq!(e.field, "soliton.theta");
    }
}
