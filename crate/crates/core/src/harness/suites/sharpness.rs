use rayon::prelude::*;

use super::super::report::{Aggregate, Comparator, Record, Rule, SuiteReport};
use super::super::{provenance, ExperimentConfig};
use super::{ball_grid, resolved_exact};
use crate::domain::Domain;
use crate::eigen::sphere_harmonic_y;
use crate::error::{Error, Result};
use crate::grid::MetricBall;
use crate::nodal::local_components;

/// Pole-centered balls of radius below `1/k` on `Y²_k`: the thinnest
/// component meeting the half ball occupies a fraction of order `1/k`.
pub fn run_sharpness_sphere(config: &ExperimentConfig) -> Result<SuiteReport> {
    let c = &config.sharpness_sphere;
    if !(c.radius_factor > 0.0 && c.radius_factor < 1.0) {
        return Err(Error::Config(format!(
            "radius_factor {} must lie in (0, 1): the ball radius must stay below 1/k",
            c.radius_factor
        )));
    }
    let res = config.scaled(c.patch_resolution, c.patch_resolution);
    let rows: Vec<Record> = c
        .ks
        .par_iter()
        .map(|&k| case(k, c.radius_factor, res))
        .collect::<Result<_>>()?;
    let mut report = SuiteReport::new("sharpness-sphere", provenance(config, vec![res]));
    report.records = rows;
    let rules = vec![
        Rule::new(
            "bounded_scaled_fraction",
            "sharpness",
            "invariant",
            Aggregate::Max,
            Comparator::Le,
            c.ceiling,
        ),
        Rule::all_true("sector_count", "sharpness", "count_ok"),
    ];
    Ok(report.finish(rules, &[("sharpness", "invariant")]))
}

fn case(k: u32, radius_factor: f64, res: usize) -> Result<Record> {
    let n = 2;
    let field = sphere_harmonic_y(n, k)?;
    let radius = radius_factor / f64::from(k);
    let ball = MetricBall::new(Domain::sphere(n)?, &[1.0, 0.0, 0.0], radius)?;
    let grid = ball_grid(&ball, res)?;
    let table = local_components(&field, &grid, &ball, &resolved_exact())?;
    let measure = table.region_measure;
    let min_ratio = table
        .meeting_half_ball()
        .map(|c| c.volume / measure)
        .fold(f64::INFINITY, f64::min);
    let expected = 2 * (k / 2) as usize;
    Ok(Record::new("sharpness")
        .with("n", n)
        .with("k", k)
        .with("radius", radius)
        .with("resolution", res)
        .with("components", table.len())
        .with("meeting_half_ball", table.meeting_half_ball().count())
        .with("expected_min_components", expected)
        .with("count_ok", table.len() >= expected)
        .with("min_ratio", min_ratio)
        .with("invariant", min_ratio * f64::from(k).powi(n as i32 - 1)))
}
