use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::report::Format;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    NodalCounts,
    LocalFaberKrahn,
    SharpnessSphere,
    TorusExample,
    PropertySuites,
    All,
}

impl SuiteName {
    pub const SUITES: [SuiteName; 5] = [
        SuiteName::NodalCounts,
        SuiteName::LocalFaberKrahn,
        SuiteName::SharpnessSphere,
        SuiteName::TorusExample,
        SuiteName::PropertySuites,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::NodalCounts => "nodal-counts",
            SuiteName::LocalFaberKrahn => "local-faber-krahn",
            SuiteName::SharpnessSphere => "sharpness-sphere",
            SuiteName::TorusExample => "torus-example",
            SuiteName::PropertySuites => "property-suites",
            SuiteName::All => "all",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::SUITES
            .into_iter()
            .chain([SuiteName::All])
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

/// Where the balls of a scan are centered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", deny_unknown_fields)]
pub enum Placement {
    /// Uniformly random centers drawn from the experiment seed.
    Random { count: usize },
    /// Explicit centers in domain coordinates.
    Fixed { centers: Vec<Vec<f64>> },
    /// A single ball at the north pole (spheres) or the origin corner.
    PoleCentered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Sphere,
    Torus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub family: Family,
    pub n: u32,
    pub ks: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NodalCountsConfig {
    pub sphere_ks: Vec<u32>,
    pub start_resolution: usize,
    pub max_resolution: usize,
    /// Consecutive agreeing refinements required to call a count stable.
    pub agreements: usize,
    /// Contact radius for pole touching, in grid pitches.
    pub contact_pitches: f64,
    pub torus_ks: Vec<u32>,
    pub torus_resolution: usize,
    pub torus3_ks: Vec<u32>,
    pub torus3_resolution: usize,
    /// Upper bound on `k²` times the largest 3-D cross-section area.
    pub torus3_section_ceiling: f64,
}

impl Default for NodalCountsConfig {
    fn default() -> Self {
        NodalCountsConfig {
            sphere_ks: vec![4, 8, 16, 32],
            start_resolution: 64,
            max_resolution: 2048,
            agreements: 2,
            contact_pitches: 2.0,
            torus_ks: (4..=32).collect(),
            torus_resolution: 512,
            torus3_ks: vec![4, 8],
            torus3_resolution: 128,
            torus3_section_ceiling: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayerScanConfig {
    pub enabled: bool,
    /// Ball radius on the torus (above the wavelength scale).
    pub radius: f64,
    /// Split parameter: layers have width `sqrt(eps0/λ)`.
    pub eps0: f64,
    pub ks: Vec<u32>,
    pub resolution: usize,
}

impl Default for LayerScanConfig {
    fn default() -> Self {
        LayerScanConfig {
            enabled: true,
            radius: 0.25,
            eps0: 0.25,
            ks: vec![8, 16],
            resolution: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalFaberKrahnConfig {
    pub families: Vec<FamilyConfig>,
    pub placement: Placement,
    /// Adds a pole-centered ball to every sphere case.
    pub include_pole_ball: bool,
    /// Ball radius is `radius_factor / sqrt(λ)`; must be below 1.
    pub radius_factor: f64,
    pub patch_resolution: usize,
    /// Lower bound asserted on `(|Ω|/|B|)(√λ log λ)^{n−1}`.
    pub floor: f64,
    /// Upper bound asserted on `(|A∩B|/|B|)(√λ)^{n−1}` for pole balls.
    pub pole_ceiling: f64,
    pub layer_scan: LayerScanConfig,
}

impl Default for LocalFaberKrahnConfig {
    fn default() -> Self {
        LocalFaberKrahnConfig {
            families: vec![
                FamilyConfig {
                    family: Family::Torus,
                    n: 2,
                    ks: vec![4, 8, 16, 32],
                },
                FamilyConfig {
                    family: Family::Sphere,
                    n: 2,
                    ks: vec![4, 8, 16, 32],
                },
            ],
            placement: Placement::Random { count: 50 },
            include_pole_ball: true,
            radius_factor: 0.5,
            patch_resolution: 128,
            floor: 1.0,
            pole_ceiling: 2.0,
            layer_scan: LayerScanConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessConfig {
    pub ks: Vec<u32>,
    /// Pole ball radius is `radius_factor / k`; must be below 1.
    pub radius_factor: f64,
    pub patch_resolution: usize,
    /// Upper bound asserted on `(|A∩B|/|B|) k^{n−1}`.
    pub ceiling: f64,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        SharpnessConfig {
            ks: vec![8, 16, 32],
            radius_factor: 0.5,
            patch_resolution: 256,
            ceiling: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusExampleConfig {
    pub ks2: Vec<u32>,
    pub ks3: Vec<u32>,
    pub radius: f64,
    pub resolution2: usize,
    pub resolution3: usize,
    /// Upper bounds on `(|A∩B|/|B|)(√λ)^{n−1}` for n = 2 and n = 3.
    pub ceiling2: f64,
    pub ceiling3: f64,
}

impl Default for TorusExampleConfig {
    fn default() -> Self {
        TorusExampleConfig {
            ks2: (4..=32).collect(),
            ks3: vec![4, 8],
            radius: 0.25,
            resolution2: 512,
            resolution3: 128,
            ceiling2: 12.0,
            ceiling3: 250.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropertyConfig {
    pub max_degree: u32,
    /// Resolution of the unit-disk grid used by the ensembles.
    pub resolution: usize,
    /// Resolution of the sector-family grid.
    pub sector_resolution: usize,
    /// Resolution of each per-radius patch in maximum-function profiles.
    pub profile_resolution: usize,
    pub convexity_draws: usize,
    pub profile_radii: usize,
    pub profile_min_radius: f64,
    pub subharmonic_min_radius: f64,
    pub subharmonic_sector_ks: Vec<u32>,
    pub subharmonic_draws: usize,
    pub sector_ks: Vec<u32>,
    pub rapid_r0: f64,
    pub narrow_eta: f64,
    pub propagation_ks: Vec<u32>,
    pub propagation_radius: f64,
    pub ensemble_draws: usize,
    /// Tolerated relative change of the ensemble max of `C_est` under 2×
    /// refinement.
    pub refinement_tolerance: f64,
    pub closed_form_tolerance: f64,
    pub volume_floor: f64,
    pub calibration_draws: usize,
    pub slope_margin: f64,
    pub intercept_margin: f64,
    pub df_ks: Vec<u32>,
    pub df_radius: f64,
    pub df_balls: usize,
    pub df_resolution: usize,
    /// Upper bound on `β_{1/2} / (log 2 · √λ)` over the sub-ball family.
    pub df_ceiling: f64,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        PropertyConfig {
            max_degree: 10,
            resolution: 512,
            sector_resolution: 1024,
            profile_resolution: 256,
            convexity_draws: 100,
            profile_radii: 20,
            profile_min_radius: 0.05,
            subharmonic_min_radius: 0.1,
            subharmonic_sector_ks: (2..=11).collect(),
            subharmonic_draws: 10,
            sector_ks: (5..=40).collect(),
            rapid_r0: 0.5,
            narrow_eta: 0.2,
            propagation_ks: (3..=20).collect(),
            propagation_radius: 0.25,
            ensemble_draws: 200,
            refinement_tolerance: 0.05,
            closed_form_tolerance: 0.02,
            volume_floor: 0.15,
            calibration_draws: 100,
            slope_margin: 0.05,
            intercept_margin: 0.25,
            df_ks: vec![4, 8, 16, 32],
            df_radius: 0.5,
            df_balls: 20,
            df_resolution: 128,
            df_ceiling: 1.0,
        }
    }
}

/// A full experiment description. Every field has a default, so `{}` runs
/// the defaults of the chosen suite; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: SuiteName,
    pub seed: u64,
    /// Overrides the primary resolution of each suite; its other
    /// resolutions scale by the same factor.
    pub resolution: Option<usize>,
    pub out_dir: PathBuf,
    pub format: Format,
    pub nodal_counts: NodalCountsConfig,
    pub local_faber_krahn: LocalFaberKrahnConfig,
    pub sharpness_sphere: SharpnessConfig,
    pub torus_example: TorusExampleConfig,
    pub property_suites: PropertyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: SuiteName::All,
            seed: 20_240_601,
            resolution: None,
            out_dir: PathBuf::from("reports"),
            format: Format::Csv,
            nodal_counts: NodalCountsConfig::default(),
            local_faber_krahn: LocalFaberKrahnConfig::default(),
            sharpness_sphere: SharpnessConfig::default(),
            torus_example: TorusExampleConfig::default(),
            property_suites: PropertyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Scales a suite resolution by `resolution / primary` when an override
    /// is set.
    pub(crate) fn scaled(&self, primary: usize, value: usize) -> usize {
        match self.resolution {
            Some(r) => ((value as f64 * r as f64 / primary as f64).round() as usize).max(16),
            None => value,
        }
    }
}
