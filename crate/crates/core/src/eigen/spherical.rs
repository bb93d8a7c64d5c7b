use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Hyperspherical coordinates `(θ₁, …, θ_{n-1}, φ)` on Sⁿ, `0 < θ_l < π`.
///
/// The embedding is
/// `x₁ = cos θ₁`, `x_l = sin θ₁ ⋯ sin θ_{l-1} cos θ_l` (l < n),
/// `x_n = sin θ₁ ⋯ sin θ_{n-1} cos φ`, `x_{n+1} = sin θ₁ ⋯ sin θ_{n-1} sin φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalPoint {
    thetas: Vec<f64>,
    phi: f64,
}

impl SphericalPoint {
    pub fn new(thetas: Vec<f64>, phi: f64) -> Result<Self> {
        if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && **t < PI)) {
            return Err(Error::Domain(format!("polar angle {t} outside (0, π)")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("azimuth {phi} is not finite")));
        }
        Ok(SphericalPoint {
            thetas,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    /// Sphere dimension n.
    pub fn dim(&self) -> usize {
        self.thetas.len() + 1
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn embedding(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim() + 1);
        let mut sines = 1.0;
        for &t in &self.thetas {
            x.push(sines * t.cos());
            sines *= t.sin();
        }
        x.push(sines * self.phi.cos());
        x.push(sines * self.phi.sin());
        x
    }

    /// Inverse of [`embedding`](Self::embedding). Fails on the coordinate
    /// singularities (some `θ_l ∈ {0, π}`).
    pub fn from_embedding(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::Domain("embedding needs at least 2 coordinates".into()));
        }
        let n = x.len() - 1;
        let mut thetas = Vec::with_capacity(n - 1);
        for l in 0..n - 1 {
            let tail = x[l + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if tail == 0.0 {
                return Err(Error::Domain(format!("{x:?} lies on a coordinate pole")));
            }
            thetas.push(tail.atan2(x[l]));
        }
        let phi = x[n].atan2(x[n - 1]);
        Self::new(thetas, phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_has_unit_norm() {
        let p = SphericalPoint::new(vec![0.3, 2.9], 5.5).unwrap();
        let x = p.embedding();
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        let back = SphericalPoint::from_embedding(&x).unwrap();
        assert!((back.thetas()[0] - 0.3).abs() < 1e-12);
        assert!((back.thetas()[1] - 2.9).abs() < 1e-12);
        assert!((back.phi() - 5.5).abs() < 1e-12);
    }

    #[test]
    fn two_sphere_formula() {
        let (t, f) = (0.7f64, 1.9f64);
        let x = SphericalPoint::new(vec![t], f).unwrap().embedding();
        assert_eq!(x, vec![t.cos(), t.sin() * f.cos(), t.sin() * f.sin()]);
    }

    #[test]
    fn rejects_poles() {
        assert!(SphericalPoint::new(vec![0.0], 1.0).is_err());
        assert!(SphericalPoint::new(vec![PI], 1.0).is_err());
        assert!(SphericalPoint::from_embedding(&[1.0, 0.0, 0.0]).is_err());
    }
}
