use std::f64::consts::LN_2;

use super::*;
use crate::domain::Domain;
use crate::eigen::{harmonic_polynomial_2d, re_z_power};
use crate::grid::{build_grid, MetricBall};
use crate::nodal::{local_components, LabelOptions, ZeroTol};

fn unit(domain: Domain) -> MetricBall {
    MetricBall::new(domain, &[0.0, 0.0], 1.0).unwrap()
}

fn opts() -> LabelOptions {
    LabelOptions::default()
        .with_zero_tol(ZeroTol::Absolute(0.0))
        .resolved()
}

#[test]
fn homogeneous_sup() {
    let grid = build_grid(Domain::ball(2).unwrap(), 256).unwrap();
    let f = harmonic_polynomial_2d(&[0.0; 6], &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    for s in [0.3, 0.6, 1.0] {
        let b = MetricBall::new(grid.domain(), &[0.0, 0.0], s).unwrap();
        let e = sup_on_region(&f, &grid, Region::Ball(&b)).unwrap();
        let exact = f64::powi(s, 5);
        assert!(e.value <= exact && e.refined <= exact * (1.0 + 1e-12));
        assert!(e.upper >= exact, "{e:?} vs {exact}");
        assert!((e.refined / exact - 1.0).abs() < 1e-3);
    }
}

#[test]
fn single_cell_region() {
    let grid = build_grid(Domain::ball(2).unwrap(), 64).unwrap();
    let f = re_z_power(3);
    let c = 1234;
    let e = sup_on_region(&f, &grid, Region::Cells { cells: &[c], clip: None }).unwrap();
    assert_eq!(e.value, f.evaluate(&grid.point(c)[..2]).abs());
    assert_eq!(e.cell, c);
}

#[test]
fn exponent_of_powers() {
    let grid = build_grid(Domain::ball(2).unwrap(), 256).unwrap();
    for k in [2, 5, 9] {
        let g = growth_exponent(&re_z_power(k), &grid, &unit(grid.domain()), 0.5).unwrap();
        assert!((g.beta / (f64::from(k) * LN_2) - 1.0).abs() < 1e-3);
        assert_eq!(g.prime(), g.beta.max(3.0));
    }
    let g = growth_exponent(&re_z_power(4), &grid, &unit(grid.domain()), 0.999).unwrap();
    assert!(g.beta.abs() < 0.01);
    assert!(growth_exponent(&re_z_power(4), &grid, &unit(grid.domain()), 1.0).is_err());
}

#[test]
fn convexity_forms_differ() {
    let exact = |m: f64| SupEstimate {
        value: m,
        refined: m,
        upper: m,
        cell: 0,
    };
    let radii = [1.0, 1f64.exp(), 2f64.exp()];
    // M linear in log r: convex itself, log M strictly concave
    let sups = [exact(1.0), exact(2.0), exact(3.0)];
    let m = max_convexity_defect(&radii, &sups).unwrap();
    assert!(m.max_defect.abs() < 1e-12 && m.violations == 0, "{m:?}");
    let l = convexity_defect(&radii, &sups).unwrap();
    assert!((l.max_defect - (2f64.ln() - 3f64.ln() / 2.0)).abs() < 1e-12);
    assert_eq!(l.violations, 1);
    // a loose upper bound on an outer sup absorbs the defect
    let loose = [exact(1.0), exact(2.0), SupEstimate { upper: 5.0, ..exact(3.0) }];
    assert_eq!(convexity_defect(&radii, &loose).unwrap().violations, 0);
    assert!(convexity_defect(&radii[..2], &sups[..2]).is_err());
}

#[test]
fn log_linear_profile() {
    let b = unit(Domain::ball(2).unwrap());
    let radii = log_spaced(0.05, 1.0, 20);
    let rep = max_function_profile(&re_z_power(7), &b, &radii, 128).unwrap();
    assert!(rep.convexity.max_defect.abs() < 1e-6, "{:?}", rep.convexity);
    assert_eq!(rep.convexity.violations, 0);
    assert_eq!(*rep.beta.last().unwrap(), 0.0);
    assert!(rep.beta_prime.iter().all(|&b| b >= 3.0));
    assert!(rep.monotonicity_excess <= 0.0);
    let too_few = max_function_profile(&re_z_power(7), &b, &radii[..2], 64);
    assert!(too_few.is_err());
}

#[test]
fn propagation_closed_form() {
    let grid = build_grid(Domain::ball(2).unwrap(), 256).unwrap();
    let ball = unit(grid.domain());
    let inner = ball.scaled(0.25).unwrap();
    let e = crate::grid::cells_in_ball(&grid, &inner).cells;
    let p = propagation_check(&re_z_power(6), &grid, &ball, &e, 0.25).unwrap();
    assert!((p.c_est - 0.5).abs() < 0.01, "{p:?}");
    let scaled = |x: &[f64]| 7.0 * re_z_power(6).evaluate(x);
    let q = propagation_check(&scaled, &grid, &ball, &e, 0.25).unwrap();
    assert!((q.c_est - p.c_est).abs() < 1e-12);
    assert!(p.flag.is_none());
}

fn sector(k: u32, res: usize) -> (crate::grid::SampleGrid, crate::nodal::ComponentTable, usize) {
    let grid = build_grid(Domain::ball(2).unwrap(), res).unwrap();
    let f = re_z_power(k);
    let t = local_components(&f, &grid, &unit(grid.domain()), &opts()).unwrap();
    let c = grid.locate(&[0.7, 0.0]).unwrap();
    let pos = t.label(c).unwrap();
    (grid, t, pos)
}

#[test]
fn sector_rapid_growth() {
    for k in [5, 12] {
        let (grid, t, pos) = sector(k, 512);
        let b = unit(grid.domain());
        let rg = rapid_growth_ratio(&re_z_power(k), &grid, &t, pos, &b, 0.5).unwrap();
        let product = rg.log_ratio * rg.volume_fraction;
        assert!((product / (LN_2 / 2.0) - 1.0).abs() < 0.02, "k={k} {rg:?}");
        assert!(rg.exponent_est > 0.0);
        let vb = dim2_volume_bound_check(&re_z_power(k), &grid, &t, pos, &b).unwrap();
        assert!((vb.product / (LN_2 / 2.0) - 1.0).abs() < 0.02, "{vb:?}");
        let er = eremenko_check(&re_z_power(k), &grid, &t, pos, &b).unwrap();
        assert!((er.beta_h / er.beta_phi - (4.0f64 / 3.0).ln() / LN_2).abs() < 0.01, "{er:?}");
    }
}

#[test]
fn subharmonic_restriction_vanishes_off_component() {
    let (grid, t, pos) = sector(6, 128);
    let f = re_z_power(6);
    let h = SubharmonicRestriction::new(&f, &grid, &t, pos).unwrap();
    use crate::eigen::ScalarFn;
    assert!(h.eval(&[0.7, 0.0]) > 0.0);
    assert_eq!(h.eval(&[-0.7, 0.0]), 0.0);
    assert_eq!(h.eval(&[0.0, 0.7]), 0.0);
    let b = unit(grid.domain());
    let rep = max_function_profile(&h, &b, &log_spaced(0.1, 1.0, 10), 128).unwrap();
    assert_eq!(rep.convexity.violations, 0, "{:?}", rep.convexity);
}

#[test]
fn envelope_fit() {
    let pts = [(1.0, 0.5), (2.0, 1.4), (3.0, 1.1), (4.0, 2.0)];
    let fit = LinearBound::fit(&pts, 0.0, 0.0).unwrap();
    let e = |x: f64, y: f64| Eremenko { beta_h: y, beta_phi: x };
    assert!(pts.iter().all(|&(x, y)| fit.residual(&e(x, y)) <= 1e-12));
    assert!((fit.c1 - 0.3).abs() < 1e-12 && (fit.c2 - 0.8).abs() < 1e-12);
    let wide = LinearBound::fit(&pts, 0.1, 0.5).unwrap();
    assert!(wide.c1 > fit.c1 && wide.c2 > fit.c2);
}
