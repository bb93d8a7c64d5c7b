use rayon::prelude::*;

use super::super::report::{Aggregate, Comparator, Record, Rule, SuiteReport};
use super::super::{provenance, ExperimentConfig};
use super::{ball_grid, nearest_cell, resolved_exact};
use crate::eigen::torus_eigenfunction;
use crate::error::{Error, Result};
use crate::grid::MetricBall;
use crate::nodal::local_components;

/// The nodal domain through the center of a fixed-radius torus ball: thin in
/// the ball yet not contained in it.
pub fn run_torus_example(config: &ExperimentConfig) -> Result<SuiteReport> {
    let c = &config.torus_example;
    if !(c.radius > 0.0 && c.radius <= 0.25) {
        return Err(Error::Config(format!(
            "radius {} must lie in (0, 1/4] to embed a ball in the unit torus",
            c.radius
        )));
    }
    let res2 = config.scaled(c.resolution2, c.resolution2);
    let res3 = config.scaled(c.resolution2, c.resolution3);
    let cases: Vec<(u32, u32, usize)> = c
        .ks2
        .iter()
        .map(|&k| (2, k, res2))
        .chain(c.ks3.iter().map(|&k| (3, k, res3)))
        .collect();
    let rows: Vec<Record> = cases
        .par_iter()
        .map(|&(n, k, res)| case(n, k, c.radius, res))
        .collect::<Result<_>>()?;
    let mut report = SuiteReport::new("torus-example", provenance(config, vec![res2, res3]));
    report.provenance.notes.push(format!(
        "unit-scale ball realized with radius {}, the largest embedded radius being 1/2",
        c.radius
    ));
    report.records = rows;
    let mut rules = Vec::new();
    for (n, ceiling, check) in [(2, c.ceiling2, "torus2"), (3, c.ceiling3, "torus3")] {
        if report.records.iter().any(|r| r.check() == check) {
            rules.push(Rule::new(
                &format!("bounded_product_n{n}"),
                check,
                "product",
                Aggregate::Max,
                Comparator::Le,
                ceiling,
            ));
            rules.push(Rule::all_true(&format!("not_contained_n{n}"), check, "not_contained"));
            rules.push(Rule::all_true(&format!("meets_half_ball_n{n}"), check, "meets_half_ball"));
        }
    }
    Ok(report.finish(rules, &[("torus2", "product"), ("torus3", "product")]))
}

fn case(n: u32, k: u32, radius: f64, res: usize) -> Result<Record> {
    let field = torus_eigenfunction(n, k)?;
    let lambda = field.eigenvalue();
    let q = 0.25 / f64::from(k);
    let center: Vec<f64> = if n == 2 { vec![q, 0.5] } else { vec![q, q, 0.5] };
    let ball = MetricBall::new(field.domain(), &center, radius)?;
    let grid = ball_grid(&ball, res)?;
    let table = local_components(&field, &grid, &ball, &resolved_exact())?;
    let cell = nearest_cell(&grid, &center);
    let comp = table
        .label(cell)
        .map(|p| &table.components[p])
        .ok_or_else(|| Error::EmptyRegion(String::from("center cell is unlabeled")))?;
    let ratio = comp.volume / table.region_measure;
    Ok(Record::new(if n == 2 { "torus2" } else { "torus3" })
        .with("n", n)
        .with("k", k)
        .with("lambda", lambda)
        .with("radius", radius)
        .with("resolution", res)
        .with("ratio", ratio)
        .with("product", ratio * lambda.sqrt().powi(n as i32 - 1))
        .with("not_contained", comp.touches_ball_boundary)
        .with("meets_half_ball", comp.meets_half_ball))
}
