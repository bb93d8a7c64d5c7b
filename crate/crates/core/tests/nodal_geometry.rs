use std::f64::consts::PI;

use nodal_core::eigen::{re_z_power, sphere_harmonic_y, torus_eigenfunction, zonal_harmonic};
use nodal_core::grid::{build_grid, build_polar_patch, MetricBall};
use nodal_core::nodal::{
    components_touching_point, cross_section_bound, label_components, local_components, LabelOptions, ZeroTol,
};
use nodal_core::Domain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact() -> LabelOptions {
    LabelOptions::default().with_zero_tol(ZeroTol::Absolute(0.0))
}

/// Area of `{x₁ < u}` inside a disk of radius `r` centered at `x₁ = 0`.
fn disk_below(u: f64, r: f64) -> f64 {
    let u = u.clamp(-r, r);
    u * (r * r - u * u).sqrt() + r * r * (u / r).asin() + PI * r * r / 2.0
}

/// Area of the strip `a < x₁ < b` inside that disk.
fn strip_in_disk(a: f64, b: f64, r: f64) -> f64 {
    disk_below(b, r) - disk_below(a, r)
}

#[test]
fn torus_components_match_strip_disk_areas() {
    let torus = Domain::torus(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in [3u32, 5, 8] {
        let f = torus_eigenfunction(2, k).unwrap();
        let w = 0.5 / f64::from(k);
        for _ in 0..4 {
            let c = [rng.gen::<f64>(), rng.gen::<f64>()];
            let r = rng.gen_range(0.3..1.5) * w;
            let ball = MetricBall::new(torus, &c, r).unwrap();
            let grid = build_polar_patch(&ball, 256).unwrap();
            let table = local_components(&f, &grid, &ball, &exact().resolved()).unwrap();
            for (pos, comp) in table.components.iter().enumerate() {
                let x = grid.point(table.cells_of(pos)[0])[0];
                let rel = (x - c[0] + 0.5).rem_euclid(1.0) - 0.5;
                let strip = ((c[0] + rel) / w).floor();
                let area = strip_in_disk(strip * w - c[0], (strip + 1.0) * w - c[0], r);
                assert!(
                    (comp.volume - area).abs() < 0.01 * PI * r * r,
                    "k {k}: {} vs {}",
                    comp.volume,
                    area
                );
            }
        }
    }
}

#[test]
fn centered_strip_product_approaches_two_over_radius() {
    let torus = Domain::torus(2).unwrap();
    let r = 0.25;
    for k in [4u32, 16] {
        let f = torus_eigenfunction(2, k).unwrap();
        let w = 0.5 / f64::from(k);
        let ball = MetricBall::new(torus, &[w / 2.0, 0.5], r).unwrap();
        let grid = build_polar_patch(&ball, 512).unwrap();
        let table = local_components(&f, &grid, &ball, &exact().resolved()).unwrap();
        let pos = table.label(0).unwrap();
        let ratio = table.components[pos].volume / table.region_measure;
        let oracle = strip_in_disk(-w / 2.0, w / 2.0, r) / (PI * r * r);
        assert!((ratio / oracle - 1.0).abs() < 0.01, "k {k}: {ratio} vs {oracle}");
        let product = oracle * f.eigenvalue().sqrt();
        assert!((product - 2.0 / r).abs() < 2.0 / r * (1.0 / f64::from(k)), "k {k}: {product}");
    }
}

#[test]
fn torus_strip_counts_and_cross_sections() {
    for k in [3u32, 7] {
        let f = torus_eigenfunction(2, k).unwrap();
        let grid = build_grid(f.domain(), 280).unwrap();
        let table = label_components(&f, &grid, &LabelOptions::default()).unwrap();
        assert_eq!(table.len(), 2 * k as usize);
        let cs = cross_section_bound(&table, &grid, 1).unwrap();
        assert!((cs.max - 0.5 / f64::from(k)).abs() <= grid.pitch());
    }
    let f = torus_eigenfunction(3, 3).unwrap();
    let grid = build_grid(f.domain(), 48).unwrap();
    let table = label_components(&f, &grid, &LabelOptions::default()).unwrap();
    assert_eq!(table.len(), 36);
}

#[test]
fn zonal_harmonic_has_k_plus_one_bands() {
    let pole = [0.0, 0.6, 0.8];
    for k in [3u32, 6] {
        let f = zonal_harmonic(2, k, &pole).unwrap();
        let grid = build_grid(f.domain(), 256).unwrap();
        let table = label_components(&f, &grid, &exact()).unwrap();
        assert_eq!(table.len(), k as usize + 1, "k {k}");
        let near = components_touching_point(&table, &grid, &pole, 3.0 * grid.pitch()).unwrap();
        assert_eq!(near.len(), 1);
    }
}

#[test]
fn sphere_counts_follow_product_formula() {
    for k in [4u32, 6, 10] {
        let f = sphere_harmonic_y(2, k).unwrap();
        let grid = build_grid(f.domain(), 256).unwrap();
        let table = label_components(&f, &grid, &exact()).unwrap();
        let j = k / 2;
        assert_eq!(table.len(), (2 * j * (k - j + 1)) as usize, "k {k}");
        let pole = components_touching_point(&table, &grid, &[1.0, 0.0, 0.0], 2.0 * grid.pitch()).unwrap();
        assert_eq!(pole.len(), 2 * j as usize, "k {k}");
    }
}

#[test]
fn disk_sectors_have_equal_area() {
    let disk = Domain::ball(2).unwrap();
    let unit = MetricBall::new(disk, &[0.0, 0.0], 1.0).unwrap();
    for k in [3u32, 9] {
        let grid = build_polar_patch(&unit, 256).unwrap();
        let table = local_components(&re_z_power(k), &grid, &unit, &exact()).unwrap();
        assert_eq!(table.len(), 2 * k as usize);
        for c in &table.components {
            assert!((c.volume / table.region_measure - 0.5 / f64::from(k)).abs() < 2e-3);
            assert!(c.touches_ball_boundary && c.meets_half_ball);
        }
    }
}
