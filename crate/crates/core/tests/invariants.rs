use nodal_core::eigen::{random_harmonic_polynomial, random_sphere_point, Field};
use nodal_core::format::fmt_f64;
use nodal_core::grid::{build_grid, cells_in_ball, MetricBall, SampleGrid};
use nodal_core::growth::{
    dim2_volume_bound_check, eremenko_check, growth_exponent, propagation_check, rapid_growth_ratio,
};
use nodal_core::nodal::{local_components, ComponentTable, LabelOptions, ZeroTol};
use nodal_core::Domain;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn disk() -> &'static (SampleGrid, MetricBall) {
    static G: OnceLock<(SampleGrid, MetricBall)> = OnceLock::new();
    G.get_or_init(|| {
        let d = Domain::ball(2).unwrap();
        (build_grid(d, 128).unwrap(), MetricBall::new(d, &[0.0, 0.0], 1.0).unwrap())
    })
}

fn poly(seed: u64) -> Field {
    random_harmonic_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), 10)
}

fn labels<F: Fn(&[f64]) -> f64 + Sync>(f: &F) -> ComponentTable {
    let (grid, unit) = disk();
    let opts = LabelOptions::default().with_zero_tol(ZeroTol::Absolute(0.0)).resolved();
    local_components(f, grid, unit, &opts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn outputs_are_exactly_scale_invariant(seed in 0u64..1_000_000, e in -20i32..20) {
        let (grid, unit) = disk();
        let f = poly(seed);
        let c = 2f64.powi(e);
        let g = move |x: &[f64]| c * f.evaluate(x);
        let f = poly(seed);
        let h = |x: &[f64]| f.evaluate(x);
        let (tf, tg) = (labels(&h), labels(&g));
        prop_assert_eq!(tf.labels(), tg.labels());
        prop_assert_eq!(growth_exponent(&h, grid, unit, 0.5).unwrap().beta, growth_exponent(&g, grid, unit, 0.5).unwrap().beta);
        let subset = cells_in_ball(grid, &unit.scaled(0.25).unwrap()).cells;
        prop_assert_eq!(
            propagation_check(&h, grid, unit, &subset, 0.25).unwrap().c_est,
            propagation_check(&g, grid, unit, &subset, 0.25).unwrap().c_est
        );
        for (pos, comp) in tf.components.iter().enumerate().filter(|(_, c)| c.meets_half_ball) {
            let a = dim2_volume_bound_check(&h, grid, &tf, pos, unit).unwrap();
            let b = dim2_volume_bound_check(&g, grid, &tg, pos, unit).unwrap();
            prop_assert_eq!(a.product, b.product);
            if let (Ok(a), Ok(b)) = (rapid_growth_ratio(&h, grid, &tf, pos, unit, 0.5), rapid_growth_ratio(&g, grid, &tg, pos, unit, 0.5)) {
                prop_assert_eq!((a.eta, a.log_ratio, a.exponent_est), (b.eta, b.log_ratio, b.exponent_est));
            }
            if comp.sign > 0 {
                if let (Ok(a), Ok(b)) = (eremenko_check(&h, grid, &tf, pos, unit), eremenko_check(&g, grid, &tg, pos, unit)) {
                    prop_assert_eq!((a.beta_h, a.beta_phi), (b.beta_h, b.beta_phi));
                }
            }
        }
    }

    #[test]
    fn negation_swaps_signs_and_keeps_volumes(seed in 0u64..1_000_000) {
        let f = poly(seed);
        let h = |x: &[f64]| f.evaluate(x);
        let n = |x: &[f64]| -f.evaluate(x);
        let (a, b) = (labels(&h), labels(&n));
        prop_assert_eq!(a.len(), b.len());
        for (ca, cb) in a.components.iter().zip(&b.components) {
            prop_assert_eq!(ca.id, cb.id);
            prop_assert_eq!(ca.sign, -cb.sign);
            prop_assert_eq!(ca.volume, cb.volume);
        }
    }

    #[test]
    fn measure_is_conserved(seed in 0u64..1_000_000) {
        let f = poly(seed);
        let t = labels(&|x: &[f64]| f.evaluate(x));
        let total: f64 = t.components.iter().map(|c| c.volume).sum::<f64>() + t.unlabeled_measure;
        prop_assert!((total - t.region_measure).abs() <= 1e-9 * t.region_measure);
        let cells: usize = t.components.iter().map(|c| c.cell_count).sum();
        prop_assert!(cells <= t.region_cells);
    }

    #[test]
    fn growth_exponent_is_monotone(seed in 0u64..1_000_000, r1 in 0.1f64..0.9, r2 in 0.1f64..0.9) {
        let (grid, unit) = disk();
        let f = poly(seed);
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let a = growth_exponent(&f, grid, unit, lo).unwrap();
        let b = growth_exponent(&f, grid, unit, hi).unwrap();
        let slack = (b.inner.upper / b.inner.refined).ln();
        prop_assert!(a.beta >= b.beta - slack);
        prop_assert!(b.beta >= 0.0 && a.prime() >= 3.0);
    }

    #[test]
    fn metric_axioms(seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s2 = Domain::sphere(2).unwrap();
        let p: Vec<_> = (0..3).map(|_| random_sphere_point(&mut rng, 2)).collect();
        let d = |a: usize, b: usize| s2.distance(&p[a][..3], &p[b][..3]);
        prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-15);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
        prop_assert!(d(0, 1) <= std::f64::consts::PI + 1e-12);
        let t2 = Domain::torus(2).unwrap();
        let q: Vec<[f64; 2]> = p.iter().map(|x| [x[0].abs(), x[1].abs()]).collect();
        let e = |a: usize, b: usize| t2.distance(&q[a], &q[b]);
        prop_assert!(e(0, 2) <= e(0, 1) + e(1, 2) + 1e-12);
        prop_assert!(e(0, 1) <= 0.5f64.sqrt() + 1e-12);
    }

    #[test]
    fn float_format_round_trips(x in proptest::num::f64::ANY) {
        let s = fmt_f64(x);
        let back: f64 = match s.as_str() {
            "inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            _ => s.parse().unwrap(),
        };
        if x.is_nan() {
            prop_assert_eq!(s, "NaN");
        } else {
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
