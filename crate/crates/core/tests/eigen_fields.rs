use nodal_core::eigen::{
    harmonic_polynomial_2d, random_harmonic_polynomial, sphere_harmonic_h, sphere_harmonic_y,
    torus_eigenfunction, zonal_harmonic, Field, FieldSpec,
};
use nodal_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Euclidean Laplacian of the degree-0 homogeneous extension `x ↦ f(x/|x|)`,
/// which equals the spherical Laplacian on the unit sphere.
fn sphere_laplacian(f: &Field, x: &[f64], h: f64) -> f64 {
    let m = x.len();
    let ext = |y: &[f64]| {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: Vec<f64> = y.iter().map(|v| v / r).collect();
        f.evaluate(&u)
    };
    let c = ext(x);
    (0..m)
        .map(|a| {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[a] += h;
            q[a] -= h;
            (ext(&p) - 2.0 * c + ext(&q)) / (h * h)
        })
        .sum()
}

fn random_unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 0.2 && r < 1.0 {
            return v.iter().map(|a| a / r).collect();
        }
    }
}

#[test]
fn sphere_harmonics_are_eigenfunctions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut fields = Vec::new();
    for k in [2, 3, 5, 8, 12] {
        fields.push(sphere_harmonic_y(2, k).unwrap());
        fields.push(sphere_harmonic_h(2, k, (k / 3).max(1)).unwrap());
    }
    for k in [4, 6, 9] {
        fields.push(sphere_harmonic_y(3, k).unwrap());
    }
    fields.push(zonal_harmonic(2, 7, &[0.0, 0.6, 0.8]).unwrap());
    for f in &fields {
        let m = f.domain().ambient_dim();
        let lambda = f.eigenvalue();
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let x = random_unit(&mut rng, m);
            let v = f.evaluate(&x);
            scale = scale.max(v.abs());
            worst = worst.max((sphere_laplacian(f, &x, 1e-4) + lambda * v).abs());
        }
        assert!(worst <= 1e-4 * lambda * scale, "{}: residual {worst:e}", f.spec().id());
    }
}

#[test]
fn torus_eigenfunction_residual() {
    for (n, k) in [(2, 3), (2, 7), (3, 4)] {
        let f = torus_eigenfunction(n, k).unwrap();
        let lambda = f.eigenvalue();
        let h = 1e-4;
        for i in 0..50 {
            let x: Vec<f64> = (0..n).map(|a| ((i * 7 + a as usize * 13) % 50) as f64 / 50.0 + 0.003).collect();
            let lap: f64 = (0..n as usize)
                .map(|a| {
                    let (mut p, mut q) = (x.clone(), x.clone());
                    p[a] += h;
                    q[a] -= h;
                    (f.evaluate(&p) - 2.0 * f.evaluate(&x) + f.evaluate(&q)) / (h * h)
                })
                .sum();
            assert!((lap + lambda * f.evaluate(&x)).abs() < 1e-4 * lambda, "n {n} k {k}");
        }
        assert!((lambda - 4.0 * f64::from(n - 1) * f64::from(k * k) * std::f64::consts::PI.powi(2)).abs() < 1e-9);
    }
}

#[test]
fn harmonic_polynomials_are_harmonic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let f = random_harmonic_polynomial(&mut rng, 10);
        let h = 1e-4;
        for _ in 0..20 {
            let x = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
            let five = f.evaluate(&[x[0] + h, x[1]])
                + f.evaluate(&[x[0] - h, x[1]])
                + f.evaluate(&[x[0], x[1] + h])
                + f.evaluate(&[x[0], x[1] - h])
                - 4.0 * f.evaluate(&x);
            let scale: f64 = [-1.0, 1.0].iter().map(|s| f.evaluate(&[s * 0.9, 0.0]).abs()).sum::<f64>() + 1.0;
            assert!((five / (h * h)).abs() < 1e-3 * scale);
        }
    }
}

#[test]
fn polynomial_coefficients_follow_fourier_convention() {
    let f = harmonic_polynomial_2d(&[0.0, 0.0, 1.0], &[0.0, 0.0, 0.5]).unwrap();
    let (r, t) = (0.7f64, 0.9f64);
    let want = r * r * ((2.0 * t).cos() + 0.5 * (2.0 * t).sin());
    assert!((f.evaluate(&[r * t.cos(), r * t.sin()]) - want).abs() < 1e-14);
}

#[test]
fn degenerate_levels_are_rejected() {
    for (n, k) in [(2, 1), (3, 2), (3, 3)] {
        assert!(matches!(sphere_harmonic_y(n, k), Err(Error::ZeroField(_))), "n {n} k {k}");
    }
    assert!(sphere_harmonic_y(4, 4).is_err());
    assert!(torus_eigenfunction(1, 3).is_err());
    assert!(torus_eigenfunction(4, 3).is_err());
}

#[test]
fn spec_round_trips_through_json() {
    let f = sphere_harmonic_y(2, 8).unwrap();
    let text = serde_json::to_string(f.spec()).unwrap();
    let spec: FieldSpec = serde_json::from_str(&text).unwrap();
    let g = Field::from_spec(&spec).unwrap();
    let x = [0.3, -0.4, (1.0f64 - 0.25).sqrt()];
    assert_eq!(f.evaluate(&x), g.evaluate(&x));
    assert!(serde_json::from_str::<FieldSpec>(r#"{"domain":"sphere","kind":"sphere_harmonic","n":2,"k":3,"bogus":1}"#).is_err());
}
