//! Experiment runner: named verification suites that compose fields, grids,
//! nodal decompositions and growth checks into auditable reports.

mod config;
mod report;
mod suites;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{
    ExperimentConfig, Family, FamilyConfig, LayerScanConfig, LocalFaberKrahnConfig,
    NodalCountsConfig, Placement, PropertyConfig, SharpnessConfig, SuiteName, TorusExampleConfig,
};
pub use report::{
    emit_report, parse_float, recheck_csv, Aggregate, Comparator, Extremes, Fitted, Format,
    Provenance, Record, Rule, SuiteReport, Value, Verdict,
};
pub use suites::{
    run_local_faber_krahn, run_nodal_counts, run_property_suites, run_sharpness_sphere,
    run_torus_example,
};

use crate::error::Result;

/// Runs one named suite, or every suite for `SuiteName::All`.
pub fn run_suite(config: &ExperimentConfig, name: SuiteName) -> Result<Vec<SuiteReport>> {
    match name {
        SuiteName::NodalCounts => Ok(vec![run_nodal_counts(config)?]),
        SuiteName::LocalFaberKrahn => Ok(vec![run_local_faber_krahn(config)?]),
        SuiteName::SharpnessSphere => Ok(vec![run_sharpness_sphere(config)?]),
        SuiteName::TorusExample => Ok(vec![run_torus_example(config)?]),
        SuiteName::PropertySuites => Ok(vec![run_property_suites(config)?]),
        SuiteName::All => SuiteName::SUITES
            .iter()
            .map(|&s| run_suite(config, s).map(|mut v| v.remove(0)))
            .collect(),
    }
}

/// Deterministic generator for one stream of a suite, derived from the
/// experiment seed, a tag and an index.
pub fn stream_rng(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes().chain(index.to_le_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

pub(crate) fn provenance(config: &ExperimentConfig, resolutions: Vec<usize>) -> Provenance {
    Provenance {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        resolutions,
        refinement_history: Vec::new(),
        notes: vec![String::from(
            "Legendre normalization: P^n_k(1) = 1; all reported ratios are normalization free",
        )],
    }
}
