use std::f64::consts::{LN_2, PI, TAU};

use rand::Rng;
use rayon::prelude::*;

use super::super::report::{Aggregate, Comparator, Fitted, Record, Rule, SuiteReport};
use super::super::{provenance, stream_rng, ExperimentConfig, PropertyConfig};
use super::resolved_exact;
use crate::domain::Domain;
use crate::eigen::{random_harmonic_polynomial, random_sphere_point, re_z_power, sphere_harmonic_y, Field};
use crate::error::{Error, Result};
use crate::grid::{build_grid, build_patch, cells_in_ball, MetricBall, SampleGrid};
use crate::growth::{
    dim2_volume_bound_check, eremenko_check, growth_exponent, log_spaced, max_function_profile,
    propagation_check, rapid_growth_ratio, Eremenko, LinearBound, SubharmonicRestriction,
};
use crate::nodal::{local_components, ComponentTable};

struct Grids {
    unit: MetricBall,
    coarse: SampleGrid,
    fine: SampleGrid,
    sector: SampleGrid,
    profile_res: usize,
    df_res: usize,
}

/// Ensemble checks on harmonic polynomials in the unit disk (three circles,
/// rapid growth, propagation of smallness, volume products, subharmonic
/// comparison) and the growth bound for sphere harmonics.
pub fn run_property_suites(config: &ExperimentConfig) -> Result<SuiteReport> {
    let p = &config.property_suites;
    if p.calibration_draws >= p.ensemble_draws {
        return Err(Error::Config(String::from(
            "calibration_draws must leave held-out draws in the ensemble",
        )));
    }
    let disk = Domain::ball(2)?;
    let primary = p.resolution;
    let coarse_res = config.scaled(primary, p.resolution);
    let g = Grids {
        unit: MetricBall::new(disk, &[0.0, 0.0], 1.0)?,
        coarse: build_grid(disk, coarse_res)?,
        fine: build_grid(disk, 2 * coarse_res)?,
        sector: build_grid(disk, config.scaled(primary, p.sector_resolution))?,
        profile_res: config.scaled(primary, p.profile_resolution),
        df_res: config.scaled(primary, p.df_resolution),
    };
    let mut report = SuiteReport::new(
        "property-suites",
        provenance(
            config,
            vec![
                g.coarse.resolution(),
                g.fine.resolution(),
                g.sector.resolution(),
                g.profile_res,
                g.df_res,
            ],
        ),
    );
    report.provenance.notes.push(String::from(
        "growth over sub-balls is sampled on a finite random family of balls",
    ));

    report.records.extend(convexity_rows(config, p, &g)?);
    report.records.extend(sector_rows(p, &g)?);
    report.records.extend(propagation_rows(p, &g)?);
    let (rows, fit) = ensemble_rows(config, p, &g)?;
    report.records.extend(rows);
    report.fitted.push(Fitted {
        name: String::from("eremenko_c1"),
        value: fit.c1,
        source: format!(
            "upper envelope of draws 0..{} plus slope margin {}",
            p.calibration_draws, p.slope_margin
        ),
    });
    report.fitted.push(Fitted {
        name: String::from("eremenko_c2"),
        value: fit.c2,
        source: format!(
            "upper envelope of draws 0..{} plus intercept margin {}",
            p.calibration_draws, p.intercept_margin
        ),
    });
    report.records.extend(df_rows(config, p, &g)?);

    let tol = p.closed_form_tolerance;
    let rules = vec![
        Rule::all_true("three_circles_harmonic", "convexity_harmonic", "ok"),
        Rule::all_true("three_circles_subharmonic", "convexity_subharmonic", "ok"),
        Rule::all_true("max_function_convex_harmonic", "convexity_harmonic", "m_ok"),
        Rule::all_true("max_function_convex_subharmonic", "convexity_subharmonic", "m_ok"),
        Rule::new("rapid_growth_sector_closed_form", "sector", "rapid_rel_err", Aggregate::Max, Comparator::Le, tol),
        Rule::all_true("rapid_growth_positive_when_narrow", "ensemble_component", "rapid_ok"),
        Rule::new("propagation_closed_form", "propagation_closed_form", "rel_err", Aggregate::Max, Comparator::Le, tol),
        Rule::new("propagation_finite", "propagation_ensemble", "c_est", Aggregate::Max, Comparator::Lt, 1e300),
        Rule::new(
            "propagation_refinement_stable",
            "propagation_refinement",
            "rel_change",
            Aggregate::Max,
            Comparator::Le,
            p.refinement_tolerance,
        ),
        Rule::new("volume_product_sector_closed_form", "sector", "dim2_rel_err", Aggregate::Max, Comparator::Le, tol),
        Rule::new("volume_product_floor_sector", "sector", "dim2_product", Aggregate::Min, Comparator::Ge, p.volume_floor),
        Rule::new(
            "volume_product_floor_ensemble",
            "ensemble_component",
            "dim2_product",
            Aggregate::Min,
            Comparator::Ge,
            p.volume_floor,
        ),
        Rule::new("eremenko_sector_ratio", "sector", "eremenko_rel_err", Aggregate::Max, Comparator::Le, tol),
        Rule::new("eremenko_held_out", "eremenko_eval", "residual", Aggregate::Max, Comparator::Le, 0.0),
        Rule::new("growth_bound_sphere", "df_growth", "max_ratio", Aggregate::Max, Comparator::Le, p.df_ceiling),
    ];
    Ok(report.finish(
        rules,
        &[
            ("sector", "rapid_product"),
            ("ensemble_component", "exponent_est"),
            ("ensemble_component", "dim2_product"),
            ("propagation_ensemble", "c_est"),
            ("eremenko_eval", "residual"),
            ("df_growth", "max_ratio"),
        ],
    ))
}

fn position_at(grid: &SampleGrid, table: &ComponentTable, x: &[f64]) -> Result<usize> {
    grid.locate(x)
        .and_then(|c| table.label(c))
        .ok_or_else(|| Error::EmptyRegion(format!("no component at {x:?}")))
}

fn convexity_rows(config: &ExperimentConfig, p: &PropertyConfig, g: &Grids) -> Result<Vec<Record>> {
    let radii = log_spaced(p.profile_min_radius, 1.0, p.profile_radii);
    let sub_radii = log_spaced(p.subharmonic_min_radius, 1.0, p.profile_radii);
    let harmonic: Vec<Record> = (0..p.convexity_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(config.seed, "convexity", i as u64);
            let f = random_harmonic_polynomial(&mut rng, p.max_degree);
            let rep = max_function_profile(&f, &g.unit, &radii, g.profile_res)?;
            Ok(Record::new("convexity_harmonic")
                .with("draw", i)
                .with("degree", f.degree())
                .with("max_defect", rep.convexity.max_defect)
                .with("max_excess", rep.convexity.max_excess)
                .with("violations", rep.convexity.violations)
                .with("ok", rep.convexity.violations == 0)
                .with("max_m_defect", rep.max_convexity.max_defect)
                .with("max_m_excess", rep.max_convexity.max_excess)
                .with("m_ok", rep.max_convexity.violations == 0))
        })
        .collect::<Result<_>>()?;

    let sources: Vec<(String, Field, [f64; 2])> = p
        .subharmonic_sector_ks
        .iter()
        .map(|&k| (format!("sector_k{k}"), re_z_power(k), [0.7, 0.0]))
        .chain((0..p.subharmonic_draws).map(|i| {
            let mut rng = stream_rng(config.seed, "subharmonic", i as u64);
            let f = random_harmonic_polynomial(&mut rng, p.max_degree);
            (format!("random_{i}"), f, [0.0, 0.0])
        }))
        .collect();
    let sub: Vec<Record> = sources
        .par_iter()
        .map(|(name, f, seed_point)| {
            let table = local_components(f, &g.coarse, &g.unit, &resolved_exact())?;
            let pos = position_at(&g.coarse, &table, seed_point)?;
            let h = SubharmonicRestriction::new(f, &g.coarse, &table, pos)?;
            let rep = max_function_profile(&h, &g.unit, &sub_radii, g.profile_res)?;
            Ok(Record::new("convexity_subharmonic")
                .with("source", name.as_str())
                .with("degree", f.degree())
                .with("max_defect", rep.convexity.max_defect)
                .with("max_excess", rep.convexity.max_excess)
                .with("violations", rep.convexity.violations)
                .with("ok", rep.convexity.violations == 0)
                .with("max_m_defect", rep.max_convexity.max_defect)
                .with("max_m_excess", rep.max_convexity.max_excess)
                .with("m_ok", rep.max_convexity.violations == 0))
        })
        .collect::<Result<_>>()?;
    Ok(harmonic.into_iter().chain(sub).collect())
}

fn rel_err(x: f64, exact: f64) -> f64 {
    (x / exact - 1.0).abs()
}

fn sector_rows(p: &PropertyConfig, g: &Grids) -> Result<Vec<Record>> {
    let closed = LN_2 / 2.0;
    let eremenko_ratio = (4.0f64 / 3.0).ln() / LN_2;
    p.sector_ks
        .par_iter()
        .map(|&k| {
            let f = re_z_power(k);
            let table = local_components(&f, &g.sector, &g.unit, &resolved_exact())?;
            let pos = position_at(&g.sector, &table, &[0.7, 0.0])?;
            let rg = rapid_growth_ratio(&f, &g.sector, &table, pos, &g.unit, p.rapid_r0)?;
            let vb = dim2_volume_bound_check(&f, &g.sector, &table, pos, &g.unit)?;
            let er = eremenko_check(&f, &g.sector, &table, pos, &g.unit)?;
            let product = rg.log_ratio * rg.volume_fraction;
            let ratio = er.beta_h / er.beta_phi;
            Ok(Record::new("sector")
                .with("k", k)
                .with("eta", rg.eta)
                .with("log_ratio", rg.log_ratio)
                .with("volume_fraction", rg.volume_fraction)
                .with("rapid_product", product)
                .with("rapid_rel_err", rel_err(product, closed))
                .with("exponent_est", rg.exponent_est)
                .with("beta_half", vb.beta_half)
                .with("dim2_product", vb.product)
                .with("dim2_rel_err", rel_err(vb.product, closed))
                .with("eremenko_ratio", ratio)
                .with("eremenko_rel_err", rel_err(ratio, eremenko_ratio)))
        })
        .collect()
}

fn propagation_rows(p: &PropertyConfig, g: &Grids) -> Result<Vec<Record>> {
    let inner = g.unit.scaled(p.propagation_radius)?;
    let subset = cells_in_ball(&g.coarse, &inner).cells;
    p.propagation_ks
        .par_iter()
        .map(|&k| {
            let pr = propagation_check(&re_z_power(k), &g.coarse, &g.unit, &subset, p.propagation_radius)?;
            Ok(Record::new("propagation_closed_form")
                .with("k", k)
                .with("c_est", pr.c_est)
                .with("beta_r", pr.beta_r)
                .with("measure_ratio", pr.ball_measure / pr.subset_measure)
                .with("rel_err", rel_err(pr.c_est, 0.5)))
        })
        .collect()
}

/// Cells of `B_R` whose polar angle lies in an arc.
fn arc_sector(grid: &SampleGrid, radius: f64, start: f64, width: f64) -> Vec<usize> {
    (0..grid.len())
        .filter(|&c| {
            let x = grid.point(c);
            let r = x[0].hypot(x[1]);
            let a = (x[1].atan2(x[0]) - start).rem_euclid(TAU);
            r < radius && a < width
        })
        .collect()
}

struct Draw {
    components: Vec<Record>,
    eremenko: (Eremenko, usize, u32),
    propagation: Record,
}

fn ensemble_rows(config: &ExperimentConfig, p: &PropertyConfig, g: &Grids) -> Result<(Vec<Record>, LinearBound)> {
    let draws: Vec<Draw> = (0..p.ensemble_draws)
        .into_par_iter()
        .map(|i| ensemble_draw(config, p, g, i))
        .collect::<Result<_>>()?;
    let calibration: Vec<(f64, f64)> = draws[..p.calibration_draws]
        .iter()
        .map(|d| (d.eremenko.0.beta_phi, d.eremenko.0.beta_h))
        .collect();
    let fit = LinearBound::fit(&calibration, p.slope_margin, p.intercept_margin)?;

    let mut rows = Vec::new();
    let (mut max_coarse, mut max_fine) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (i, d) in draws.into_iter().enumerate() {
        rows.extend(d.components);
        let (e, position, degree) = d.eremenko;
        let check = if i < p.calibration_draws { "eremenko_calibration" } else { "eremenko_eval" };
        rows.push(
            Record::new(check)
                .with("draw", i)
                .with("degree", degree)
                .with("component", position)
                .with("beta_phi", e.beta_phi)
                .with("beta_h", e.beta_h)
                .with("residual", fit.residual(&e)),
        );
        if let Some(crate::harness::Value::Float(x)) = d.propagation.get("c_est") {
            max_coarse = max_coarse.max(*x);
        }
        if let Some(crate::harness::Value::Float(x)) = d.propagation.get("c_est_fine") {
            max_fine = max_fine.max(*x);
        }
        rows.push(d.propagation);
    }
    rows.push(
        Record::new("propagation_refinement")
            .with("resolution", g.coarse.resolution())
            .with("max_c_est", max_coarse)
            .with("max_c_est_fine", max_fine)
            .with("rel_change", rel_err(max_fine, max_coarse)),
    );
    Ok((rows, fit))
}

fn ensemble_draw(config: &ExperimentConfig, p: &PropertyConfig, g: &Grids, i: usize) -> Result<Draw> {
    let mut rng = stream_rng(config.seed, "ensemble", i as u64);
    let f = random_harmonic_polynomial(&mut rng, p.max_degree);
    let table = local_components(&f, &g.coarse, &g.unit, &resolved_exact())?;
    let mut components = Vec::new();
    for (pos, comp) in table.components.iter().enumerate() {
        if !comp.meets_half_ball {
            continue;
        }
        let vb = dim2_volume_bound_check(&f, &g.coarse, &table, pos, &g.unit)?;
        let mut r = Record::new("ensemble_component")
            .with("draw", i)
            .with("degree", f.degree())
            .with("component", comp.id)
            .with("sign", i64::from(comp.sign))
            .with("volume_fraction", vb.volume_fraction)
            .with("beta_half", vb.beta_half)
            .with("dim2_product", vb.product);
        match rapid_growth_ratio(&f, &g.coarse, &table, pos, &g.unit, p.rapid_r0) {
            Ok(rg) => {
                let narrow = rg.eta <= p.narrow_eta;
                r.push("eta", rg.eta);
                r.push("log_ratio", rg.log_ratio);
                r.push("exponent_est", rg.exponent_est);
                r.push("narrow", narrow);
                r.push("rapid_ok", !narrow || rg.exponent_est > 0.0);
            }
            Err(Error::EmptyRegion(_)) => r.push("rapid_ok", true),
            Err(e) => return Err(e),
        }
        components.push(r);
    }

    let origin = position_at(&g.coarse, &table, &[0.0, 0.0])?;
    let er = eremenko_check(&f, &g.coarse, &table, origin, &g.unit)?;

    let start = rng.gen::<f64>() * TAU;
    let width = PI + rng.gen::<f64>() * PI;
    let radius = p.propagation_radius;
    let coarse = propagation_check(&f, &g.coarse, &g.unit, &arc_sector(&g.coarse, radius, start, width), radius)?;
    let fine = propagation_check(&f, &g.fine, &g.unit, &arc_sector(&g.fine, radius, start, width), radius)?;
    let propagation = Record::new("propagation_ensemble")
        .with("draw", i)
        .with("degree", f.degree())
        .with("arc_width", width)
        .with("subset_fraction", coarse.subset_measure / cells_in_ball(&g.coarse, &g.unit.scaled(radius)?).measure)
        .with("c_est", coarse.c_est)
        .with("c_est_fine", fine.c_est);
    Ok(Draw {
        components,
        eremenko: (er, table.components[origin].id, f.degree()),
        propagation,
    })
}

fn df_rows(config: &ExperimentConfig, p: &PropertyConfig, g: &Grids) -> Result<Vec<Record>> {
    let sphere = Domain::sphere(2)?;
    p.df_ks
        .par_iter()
        .map(|&k| {
            let f = sphere_harmonic_y(2, k)?;
            let mut rng = stream_rng(config.seed, "df-growth", u64::from(k));
            let mut balls = vec![MetricBall::new(sphere, &[1.0, 0.0, 0.0], p.df_radius)?];
            for _ in 0..p.df_balls {
                let c = random_sphere_point(&mut rng, 2);
                let r = p.df_radius * (0.25 + 0.75 * rng.gen::<f64>());
                balls.push(MetricBall::new(sphere, &c[..3], r)?);
            }
            let sqrt_lambda = f.eigenvalue().sqrt();
            let mut max_ratio = f64::NEG_INFINITY;
            let mut max_beta = f64::NEG_INFINITY;
            for b in &balls {
                let grid = build_patch(b, g.df_res)?;
                let beta = growth_exponent(&f, &grid, b, 0.5)?.beta;
                max_beta = max_beta.max(beta);
                max_ratio = max_ratio.max(beta / (LN_2 * sqrt_lambda));
            }
            Ok(Record::new("df_growth")
                .with("k", k)
                .with("lambda", f.eigenvalue())
                .with("balls", balls.len())
                .with("max_beta", max_beta)
                .with("max_ratio", max_ratio))
        })
        .collect()
}
