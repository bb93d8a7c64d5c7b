use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use super::legendre::{assoc_with_sine, legendre_p};
use crate::domain::{coords_from, Coords, Domain, DomainKind};
use crate::error::{Error, Result};

/// Anything that can be evaluated pointwise on a domain. Points use the
/// domain's coordinates (embedding coordinates on spheres).
pub trait ScalarFn: Sync {
    fn eval(&self, x: &[f64]) -> f64;

    /// Label used in report rows.
    fn id(&self) -> String {
        String::from("field")
    }
}

impl<F> ScalarFn for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    SphereHarmonic,
    TorusProduct,
    HarmonicPoly2d,
    Zonal,
}

/// Fourier coefficients of `Σ r^m (a_m cos mθ + b_m sin mθ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

/// Serializable description of a closed-form field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub domain: DomainKind,
    pub kind: FieldKind,
    pub n: u32,
    pub k: u32,
    /// Sector index of an intermediate level `H^n_{k,j}`; absent means `⌊k/2⌋`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<Vec<f64>>,
}

impl FieldSpec {
    pub fn domain(&self) -> Result<Domain> {
        Domain::new(self.domain, self.n)
    }

    /// Short identifier used in report rows.
    pub fn id(&self) -> String {
        match self.kind {
            FieldKind::SphereHarmonic => match self.j {
                Some(j) => format!("H{}_{}_{}", self.n, self.k, j),
                None => format!("Y{}_{}", self.n, self.k),
            },
            FieldKind::TorusProduct => format!("T{}_{}", self.n, self.k),
            FieldKind::HarmonicPoly2d => format!("poly_deg{}", self.k),
            FieldKind::Zonal => format!("Z{}_{}", self.n, self.k),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    /// `(k, j)` per inductive level from Sⁿ down to S², then the circle degree.
    Sphere { levels: Vec<(u32, u32)>, base: u32 },
    Torus { n: usize, k: u32 },
    /// Complex coefficients `c_m = a_m - i b_m`, so the field is `Re Σ c_m z^m`.
    Poly { coeffs: Vec<(f64, f64)> },
    Zonal { dim: u32, k: u32, pole: Coords, m: usize },
}

/// An exactly evaluable field with its eigenvalue metadata.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    domain: Domain,
    eigenvalue: f64,
    repr: Repr,
}

impl Field {
    pub fn from_spec(spec: &FieldSpec) -> Result<Field> {
        let field = match spec.kind {
            FieldKind::SphereHarmonic => {
                if spec.domain != DomainKind::Sphere {
                    return Err(Error::Invalid("sphere_harmonic lives on a sphere".into()));
                }
                match spec.j {
                    Some(j) => sphere_harmonic_h(spec.n, spec.k, j),
                    None => sphere_harmonic_y(spec.n, spec.k),
                }
            }
            FieldKind::TorusProduct => {
                if spec.domain != DomainKind::Torus {
                    return Err(Error::Invalid("torus_product lives on a torus".into()));
                }
                torus_eigenfunction(spec.n, spec.k)
            }
            FieldKind::HarmonicPoly2d => {
                if spec.domain != DomainKind::Ball || spec.n != 2 {
                    return Err(Error::Invalid("harmonic_poly2d lives on ball(2)".into()));
                }
                let c = spec
                    .coefficients
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("harmonic_poly2d needs coefficients".into()))?;
                let f = harmonic_polynomial_2d(&c.cos, &c.sin)?;
                if f.spec.k != spec.k {
                    return Err(Error::Invalid(format!(
                        "declared degree {} but highest nonzero coefficient is {}",
                        spec.k, f.spec.k
                    )));
                }
                Ok(f)
            }
            FieldKind::Zonal => {
                if spec.domain != DomainKind::Sphere {
                    return Err(Error::Invalid("zonal lives on a sphere".into()));
                }
                let pole = spec
                    .pole
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("zonal harmonic needs a pole".into()))?;
                zonal_harmonic(spec.n, spec.k, pole)
            }
        }?;
        Ok(field)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn degree(&self) -> u32 {
        self.spec.k
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match &self.repr {
            Repr::Sphere { levels, base } => eval_sphere(levels, *base, x),
            Repr::Torus { n, k } => {
                let w = 2.0 * PI * *k as f64;
                x[..n - 1].iter().map(|xi| (w * xi).sin()).product()
            }
            Repr::Poly { coeffs } => {
                let (zr, zi) = (x[0], x[1]);
                let (mut ar, mut ai) = (0.0, 0.0);
                for &(cr, ci) in coeffs.iter().rev() {
                    let re = ar * zr - ai * zi + cr;
                    ai = ar * zi + ai * zr + ci;
                    ar = re;
                }
                ar
            }
            Repr::Zonal { dim, k, pole, m } => {
                let t: f64 = pole[..*m].iter().zip(&x[..*m]).map(|(p, q)| p * q).sum();
                legendre_p(*dim, *k, t.clamp(-1.0, 1.0)).unwrap_or(f64::NAN)
            }
        }
    }

    fn finish(spec: FieldSpec, eigenvalue: f64, repr: Repr) -> Result<Field> {
        let domain = spec.domain()?;
        let field = Field {
            spec,
            domain,
            eigenvalue,
            repr,
        };
        field.check_nonzero()?;
        Ok(field)
    }

    fn check_nonzero(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f1e1d);
        let m = self.domain.ambient_dim();
        for _ in 0..256 {
            let p = probe_point(&self.domain, &mut rng);
            if self.evaluate(&p[..m]) != 0.0 {
                return Ok(());
            }
        }
        Err(Error::ZeroField(self.spec.id()))
    }
}

impl ScalarFn for Field {
    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }

    fn id(&self) -> String {
        self.spec.id()
    }
}

fn probe_point(domain: &Domain, rng: &mut ChaCha8Rng) -> Coords {
    let m = domain.ambient_dim();
    let mut p = [0.0; 4];
    match domain.kind {
        DomainKind::Sphere => {
            let mut norm = 0.0;
            while norm < 1e-3 {
                for v in p.iter_mut().take(m) {
                    *v = StandardNormal.sample(rng);
                }
                norm = p[..m].iter().map(|v| v * v).sum::<f64>().sqrt();
            }
            p[..m].iter_mut().for_each(|v| *v /= norm);
        }
        DomainKind::Torus => p[..m].iter_mut().for_each(|v| *v = rng.gen::<f64>()),
        DomainKind::Ball => loop {
            p[..m].iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
            if p[..m].iter().map(|v| v * v).sum::<f64>() < 1.0 {
                break;
            }
        },
    }
    p
}

fn eval_sphere(levels: &[(u32, u32)], base: u32, x: &[f64]) -> f64 {
    let Some((&(k, j), rest_levels)) = levels.split_first() else {
        return (base as f64 * x[1].atan2(x[0])).sin();
    };
    let dim = x.len() as u32;
    let rho = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    if rho == 0.0 {
        // E vanishes at the poles for j >= 1; for j = 0 the inner factor
        // is the zero harmonic Y_0.
        return 0.0;
    }
    let e = assoc_with_sine(dim, k, j, x[0], rho);
    if e == 0.0 {
        return 0.0;
    }
    let mut rest = [0.0; 4];
    for (r, v) in rest.iter_mut().zip(&x[1..]) {
        *r = v / rho;
    }
    e * eval_sphere(rest_levels, base, &rest[..x.len() - 1])
}

fn sphere_levels(n: u32, k: u32, top_j: u32) -> (Vec<(u32, u32)>, u32) {
    let mut levels = Vec::new();
    let (mut dim, mut k, mut j) = (n, k, top_j);
    while dim >= 2 {
        levels.push((k, j));
        k = j;
        j = k / 2;
        dim -= 1;
    }
    (levels, k)
}

fn check_sphere_dim(n: u32, k: u32) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::Invalid(format!("sphere harmonic needs n, k >= 1 (n={n}, k={k})")));
    }
    if n > 3 {
        return Err(Error::Unsupported(format!("sphere dimension {n} > 3")));
    }
    Ok(())
}

/// The inductively constructed spherical harmonic `Yⁿ_k` of degree k on Sⁿ:
/// `Y¹_k(φ) = sin kφ` and `Yⁿ_k = E^{n+1}_{k,⌊k/2⌋}(cos θ₁) · Y^{n-1}_{⌊k/2⌋}`.
///
/// When some level reaches sector index 0 the construction degenerates to the
/// zero function (`sin 0φ`), which is rejected; e.g. `Y²_1`, `Y³_2`, `Y³_3`.
pub fn sphere_harmonic_y(n: u32, k: u32) -> Result<Field> {
    check_sphere_dim(n, k)?;
    build_sphere_harmonic(n, k, None)
}

/// Intermediate level `Hⁿ_{k,j} = E^{n+1}_{k,j}(cos θ₁) · Y^{n-1}_j`.
pub fn sphere_harmonic_h(n: u32, k: u32, j: u32) -> Result<Field> {
    check_sphere_dim(n, k)?;
    if n < 2 {
        return Err(Error::Invalid("H^n_{k,j} needs n >= 2".into()));
    }
    if j > k {
        return Err(Error::Range(format!("sector index {j} > degree {k}")));
    }
    build_sphere_harmonic(n, k, Some(j))
}

fn build_sphere_harmonic(n: u32, k: u32, j: Option<u32>) -> Result<Field> {
    let (levels, base) = sphere_levels(n, k, j.unwrap_or(k / 2));
    let spec = FieldSpec {
        domain: DomainKind::Sphere,
        kind: FieldKind::SphereHarmonic,
        n,
        k,
        j,
        coefficients: None,
        pole: None,
    };
    let lambda = k as f64 * (k as f64 + n as f64 - 1.0);
    Field::finish(spec, lambda, Repr::Sphere { levels, base })
}

/// `φ_k(x) = Π_{j=1}^{n-1} sin 2πk x_j` on the flat torus Tⁿ (the last coordinate
/// is free), eigenvalue `4(n-1)k²π²`.
pub fn torus_eigenfunction(n: u32, k: u32) -> Result<Field> {
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!("torus eigenfunction on T^{n}")));
    }
    if k == 0 {
        return Err(Error::Invalid("torus eigenfunction needs k >= 1".into()));
    }
    let spec = FieldSpec {
        domain: DomainKind::Torus,
        kind: FieldKind::TorusProduct,
        n,
        k,
        j: None,
        coefficients: None,
        pole: None,
    };
    let lambda = 4.0 * (n as f64 - 1.0) * (k as f64 * PI).powi(2);
    Field::finish(
        spec,
        lambda,
        Repr::Torus {
            n: n as usize,
            k,
        },
    )
}

/// Harmonic polynomial `Σ_m r^m (a_m cos mθ + b_m sin mθ)` on the unit disk.
pub fn harmonic_polynomial_2d(cos_coeffs: &[f64], sin_coeffs: &[f64]) -> Result<Field> {
    if cos_coeffs.iter().chain(sin_coeffs).any(|c| !c.is_finite()) {
        return Err(Error::Invalid("non-finite coefficient".into()));
    }
    let len = cos_coeffs.len().max(sin_coeffs.len());
    let coeff = |v: &[f64], m: usize| v.get(m).copied().unwrap_or(0.0);
    let coeffs: Vec<(f64, f64)> = (0..len)
        .map(|m| {
            let b = if m == 0 { 0.0 } else { coeff(sin_coeffs, m) };
            (coeff(cos_coeffs, m), -b)
        })
        .collect();
    let degree = coeffs
        .iter()
        .rposition(|&(a, b)| a != 0.0 || b != 0.0)
        .ok_or_else(|| Error::ZeroField("harmonic polynomial with zero coefficients".into()))?;
    let coeffs = coeffs[..=degree].to_vec();
    let spec = FieldSpec {
        domain: DomainKind::Ball,
        kind: FieldKind::HarmonicPoly2d,
        n: 2,
        k: degree as u32,
        j: None,
        coefficients: Some(Coefficients {
            cos: coeffs.iter().map(|c| c.0).collect(),
            sin: coeffs.iter().map(|c| 0.0 - c.1).collect(),
        }),
        pole: None,
    };
    Field::finish(spec, 0.0, Repr::Poly { coeffs })
}

/// `Re z^k = r^k cos kθ`.
pub fn re_z_power(k: u32) -> Field {
    let mut a = vec![0.0; k as usize + 1];
    a[k as usize] = 1.0;
    harmonic_polynomial_2d(&a, &[]).expect("Re z^k is nonzero")
}

/// Random harmonic polynomial with degree uniform in `1..=max_degree` and
/// standard normal coefficients.
pub fn random_harmonic_polynomial<R: Rng>(rng: &mut R, max_degree: u32) -> Field {
    let degree = rng.gen_range(1..=max_degree.max(1)) as usize;
    let mut a: Vec<f64> = (0..=degree).map(|_| StandardNormal.sample(rng)).collect();
    let mut b: Vec<f64> = (0..=degree).map(|_| StandardNormal.sample(rng)).collect();
    b[0] = 0.0;
    if a[degree] == 0.0 && b[degree] == 0.0 {
        a[degree] = 1.0;
    }
    // keep the top degree when both normals land tiny
    if a[degree].abs() + b[degree].abs() < 1e-3 {
        b[degree] = 1.0;
    }
    harmonic_polynomial_2d(&a, &b).expect("nonzero top coefficient")
}

/// Zonal harmonic `x ↦ P^{n+1}_k(⟨p, x⟩)` with pole `p ∈ Sⁿ`.
pub fn zonal_harmonic(n: u32, k: u32, pole: &[f64]) -> Result<Field> {
    let domain = Domain::sphere(n)?;
    let m = domain.ambient_dim();
    if pole.len() != m {
        return Err(Error::Invalid(format!("pole must have {m} coordinates")));
    }
    let norm = pole.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-9) {
        return Err(Error::Invalid(format!("pole norm {norm} is not 1")));
    }
    let spec = FieldSpec {
        domain: DomainKind::Sphere,
        kind: FieldKind::Zonal,
        n,
        k,
        j: None,
        coefficients: None,
        pole: Some(pole.to_vec()),
    };
    let lambda = k as f64 * (k as f64 + n as f64 - 1.0);
    Field::finish(
        spec,
        lambda,
        Repr::Zonal {
            dim: n + 1,
            k,
            pole: coords_from(pole),
            m,
        },
    )
}

/// Uniform random point on Sⁿ (n ≤ 3), used for ball placement.
pub fn random_sphere_point<R: Rng>(rng: &mut R, n: u32) -> Coords {
    let mut p = [0.0; 4];
    match n {
        2 => {
            let v: [f64; 3] = UnitSphere.sample(rng);
            p[..3].copy_from_slice(&v);
        }
        _ => {
            let m = n as usize + 1;
            let mut norm = 0.0;
            while norm < 1e-6 {
                for v in p.iter_mut().take(m) {
                    *v = StandardNormal.sample(rng);
                }
                norm = p[..m].iter().map(|v| v * v).sum::<f64>().sqrt();
            }
            p[..m].iter_mut().for_each(|v| *v /= norm);
        }
    }
    p
}
