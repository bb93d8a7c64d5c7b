mod common;

use common::{chebyshev, int, rational, rodrigues_p3, rodrigues_p5, to_f64};
use nodal_core::eigen::{assoc_legendre_e, count_sign_changes, legendre_derivative, legendre_p};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn dim3_matches_rodrigues_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for k in 0..=8 {
        let exact = rodrigues_p3(k);
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let want = to_f64(&exact.eval(&rational(t)));
            worst = worst.max(relative(legendre_p(3, k, t).unwrap(), want));
        }
    }
    assert!(worst <= 1e-10, "worst relative error {worst:e}");
}

#[test]
fn dim5_matches_rodrigues() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..=8 {
        let exact = rodrigues_p5(k);
        assert_eq!(exact.eval(&int(1)), int(1), "k = {k}");
        for _ in 0..200 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let want = to_f64(&exact.eval(&rational(t)));
            let got = legendre_p(5, k, t).unwrap();
            assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()), "k {k} t {t}: {got} vs {want}");
        }
    }
}

#[test]
fn dim2_is_chebyshev() {
    for k in 0..=12 {
        let exact = chebyshev(k);
        for i in 0..=40 {
            let t = -1.0 + i as f64 / 20.0;
            let want = to_f64(&exact.eval(&rational(t)));
            assert!((legendre_p(2, k, t).unwrap() - want).abs() < 1e-12);
            assert!((want - (k as f64 * t.acos()).cos()).abs() < 1e-12);
        }
    }
}

#[test]
fn derivatives_match_exact_differentiation() {
    for k in 1..=8 {
        let exact = rodrigues_p3(k);
        for j in 0..=k {
            let dj = exact.nth_derivative(j);
            for t in [-0.83, -0.2, 0.05, 0.61, 0.97] {
                let want = to_f64(&dj.eval(&rational(t)));
                let got = legendre_derivative(3, k, j, t).unwrap();
                assert!((got - want).abs() <= 1e-11 * (1.0 + want.abs()), "k {k} j {j} t {t}");
                let e = assoc_legendre_e(3, k, j, t).unwrap();
                let s = (1.0 - t * t).sqrt().powi(j as i32);
                assert!((e - want * s).abs() <= 1e-11 * (1.0 + (want * s).abs()));
            }
        }
    }
}

/// Exact number of distinct roots of `(d/dt)^j P^d_k` on (-1, 1).
fn exact_zero_count(dim: u32, k: u32, j: u32) -> usize {
    let p = if dim == 2 { chebyshev(k) } else { rodrigues_p3(k) };
    let dj = p.nth_derivative(j);
    if dj.degree() == 0 {
        return 0;
    }
    dj.distinct_roots_in(&int(-1), &int(1))
}

#[test]
fn associated_functions_have_k_minus_j_zeros() {
    for n in [1u32, 2] {
        let dim = n + 1;
        for k in 0..=20 {
            for j in 0..=k {
                let oracle = exact_zero_count(dim, k, j);
                assert_eq!(oracle, (k - j) as usize, "oracle dim {dim} k {k} j {j}");
                let sampled = count_sign_changes(200_000, |t| assoc_legendre_e(dim, k, j, t).unwrap());
                assert_eq!(sampled, oracle, "dim {dim} k {k} j {j}");
            }
        }
    }
}

#[test]
fn arguments_are_validated() {
    assert!(legendre_p(1, 3, 0.2).is_err());
    assert!(legendre_p(3, 3, 1.5).is_err());
    assert!(assoc_legendre_e(3, 2, 3, 0.0).is_err());
    assert!(legendre_p(3, 3, f64::NAN).is_err());
}
