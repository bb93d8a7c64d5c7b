use rayon::prelude::*;

use super::super::report::{Aggregate, Comparator, Record, Rule, SuiteReport};
use super::super::{provenance, ExperimentConfig};
use crate::domain::Domain;
use crate::eigen::{sphere_harmonic_y, torus_eigenfunction};
use crate::error::Result;
use crate::grid::build_grid;
use crate::nodal::{
    components_touching_point, cross_section_bound, label_components, LabelOptions, ZeroTol,
};

const NORTH: [f64; 3] = [1.0, 0.0, 0.0];

/// Component counts of `Y²_k` on the sphere (with pole contacts) under
/// refinement, and strip counts and cross sections of torus products.
pub fn run_nodal_counts(config: &ExperimentConfig) -> Result<SuiteReport> {
    let c = &config.nodal_counts;
    let primary = c.torus_resolution;
    let start = config.scaled(primary, c.start_resolution);
    let torus_res = config.scaled(primary, c.torus_resolution);
    let torus3_res = config.scaled(primary, c.torus3_resolution);

    let sphere: Vec<(Record, String)> = c
        .sphere_ks
        .par_iter()
        .map(|&k| sphere_case(k, start, c.max_resolution, c.agreements, c.contact_pitches))
        .collect::<Result<_>>()?;
    let torus2: Vec<Record> = c
        .torus_ks
        .par_iter()
        .map(|&k| torus_case(2, k, torus_res))
        .collect::<Result<_>>()?;
    let torus3: Vec<Record> = c
        .torus3_ks
        .par_iter()
        .map(|&k| torus_case(3, k, torus3_res))
        .collect::<Result<_>>()?;

    let mut prov = provenance(config, vec![start, torus_res, torus3_res]);
    let mut report = SuiteReport::new("nodal-counts", prov.clone());
    for (record, history) in sphere {
        report.records.push(record);
        prov.refinement_history.push(history);
    }
    report.provenance = prov;
    report.records.extend(torus2);
    report.records.extend(torus3);
    let rules = vec![
        Rule::all_true("sphere_component_count_exact", "sphere_counts", "components_match"),
        Rule::all_true("sphere_pole_count_exact", "sphere_counts", "pole_match"),
        Rule::all_true("sphere_counts_stabilized", "sphere_counts", "stabilized"),
        Rule::all_true("torus_component_count_exact", "torus_counts", "components_match"),
        Rule::all_true("torus_cross_section_within_pitch", "torus_counts", "cross_section_ok"),
        Rule::all_true("torus3_component_count_exact", "torus3_counts", "components_match"),
        Rule::new(
            "torus3_cross_section_scaling",
            "torus3_counts",
            "k_pow_section",
            Aggregate::Max,
            Comparator::Le,
            c.torus3_section_ceiling,
        ),
    ];
    Ok(report.finish(
        rules,
        &[
            ("sphere_counts", "count_over_k2"),
            ("sphere_counts", "pole_over_k"),
            ("torus_counts", "k_pow_section"),
            ("torus3_counts", "k_pow_section"),
        ],
    ))
}

fn sphere_case(
    k: u32,
    start: usize,
    max: usize,
    agreements: usize,
    contact_pitches: f64,
) -> Result<(Record, String)> {
    let field = sphere_harmonic_y(2, k)?;
    let j = k / 2;
    let expected = (2 * j * (k - j + 1)) as usize;
    let expected_pole = (2 * j) as usize;
    let opts = LabelOptions::default().with_zero_tol(ZeroTol::Absolute(0.0));
    let mut history: Vec<(usize, usize, usize)> = Vec::new();
    let mut res = start;
    let stabilized = loop {
        let grid = build_grid(Domain::sphere(2)?, res)?;
        let table = label_components(&field, &grid, &opts)?;
        let pole =
            components_touching_point(&table, &grid, &NORTH, contact_pitches * grid.pitch())?;
        history.push((res, table.len(), pole.len()));
        let tail = &history[history.len().saturating_sub(agreements + 1)..];
        if tail.len() == agreements + 1 && tail.iter().all(|h| (h.1, h.2) == (tail[0].1, tail[0].2))
        {
            break true;
        }
        if res * 2 > max {
            break false;
        }
        res *= 2;
    };
    let &(res, components, pole) = history.last().expect("at least one refinement");
    let trail = history
        .iter()
        .map(|h| format!("{}:{}/{}", h.0, h.1, h.2))
        .collect::<Vec<_>>()
        .join(";");
    let k2 = f64::from(k * k);
    let record = Record::new("sphere_counts")
        .with("k", k)
        .with("j", j)
        .with("resolution", res)
        .with("components", components)
        .with("expected_components", expected)
        .with("components_match", components == expected)
        .with("pole_touching", pole)
        .with("expected_pole", expected_pole)
        .with("pole_match", pole == expected_pole)
        .with("stabilized", stabilized)
        .with("count_over_k2", components as f64 / k2)
        .with("pole_over_k", pole as f64 / f64::from(k))
        .with("history", trail.clone());
    Ok((record, format!("Y2_{k} {trail}")))
}

fn torus_case(n: u32, k: u32, res: usize) -> Result<Record> {
    let field = torus_eigenfunction(n, k)?;
    let grid = build_grid(Domain::torus(n)?, res)?;
    let table = label_components(&field, &grid, &LabelOptions::default())?;
    let axis = n as usize - 1;
    let sections = cross_section_bound(&table, &grid, axis)?;
    let expected = (2 * k as usize).pow(n - 1);
    let width = 0.5 / f64::from(k);
    let check = if n == 2 { "torus_counts" } else { "torus3_counts" };
    let mut r = Record::new(check)
        .with("n", n)
        .with("k", k)
        .with("resolution", res)
        .with("components", table.len())
        .with("expected_components", expected)
        .with("components_match", table.len() == expected)
        .with("axis", axis)
        .with("max_cross_section", sections.max)
        .with("k_pow_section", sections.max * f64::from(k).powi(n as i32 - 1));
    if n == 2 {
        r.push("expected_cross_section", width);
        r.push("pitch", grid.pitch());
        r.push(
            "cross_section_ok",
            (sections.max - width).abs() <= grid.pitch() + 1e-12,
        );
    }
    Ok(r)
}
