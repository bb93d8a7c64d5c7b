use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient dimension of any supported domain (the 3-sphere in R⁴).
pub const MAX_AMBIENT: usize = 4;

/// Fixed-capacity coordinate buffer; only the first `ambient_dim` entries are used.
pub type Coords = [f64; MAX_AMBIENT];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Sphere,
    Torus,
    Ball,
}

/// A supported domain: the round sphere Sⁿ ⊂ Rⁿ⁺¹, the flat torus Rⁿ/Zⁿ with
/// coordinates in [0,1)ⁿ, or the closed unit ball of Rⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    #[serde(rename = "domain")]
    pub kind: DomainKind,
    pub n: u32,
}

impl Domain {
    pub fn new(kind: DomainKind, n: u32) -> Result<Self> {
        let ok = match kind {
            DomainKind::Sphere | DomainKind::Torus => (1..=3).contains(&n),
            DomainKind::Ball => (2..=3).contains(&n),
        };
        if ok {
            Ok(Domain { kind, n })
        } else {
            Err(Error::Unsupported(format!("{kind:?}({n})")))
        }
    }

    pub fn sphere(n: u32) -> Result<Self> {
        Self::new(DomainKind::Sphere, n)
    }

    pub fn torus(n: u32) -> Result<Self> {
        Self::new(DomainKind::Torus, n)
    }

    pub fn ball(n: u32) -> Result<Self> {
        Self::new(DomainKind::Ball, n)
    }

    /// Number of coordinates of a point (embedding dimension for spheres).
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            DomainKind::Sphere => self.n as usize + 1,
            DomainKind::Torus | DomainKind::Ball => self.n as usize,
        }
    }

    /// Total Riemannian measure.
    pub fn measure(&self) -> f64 {
        match self.kind {
            DomainKind::Sphere => match self.n {
                1 => 2.0 * PI,
                2 => 4.0 * PI,
                _ => 2.0 * PI * PI,
            },
            DomainKind::Torus => 1.0,
            DomainKind::Ball => unit_ball_volume(self.n),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Sphere => PI,
            DomainKind::Torus => (self.n as f64).sqrt() / 2.0,
            DomainKind::Ball => 2.0,
        }
    }

    /// Geodesic distance: great-circle angle on spheres, shortest periodic
    /// displacement on tori, Euclidean distance in balls.
    pub fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        let m = self.ambient_dim();
        match self.kind {
            DomainKind::Sphere => {
                let chord = p[..m]
                    .iter()
                    .zip(&q[..m])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                2.0 * (chord / 2.0).min(1.0).asin()
            }
            DomainKind::Torus => p[..m]
                .iter()
                .zip(&q[..m])
                .map(|(a, b)| {
                    let d = (a - b).rem_euclid(1.0);
                    let d = d.min(1.0 - d);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            DomainKind::Ball => p[..m]
                .iter()
                .zip(&q[..m])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Checks that `p` is a point of the domain (unit norm on spheres,
    /// inside the closed ball, any coordinates on the torus).
    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        let m = self.ambient_dim();
        if p.len() < m || p[..m].iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("point {p:?} is not on {self}")));
        }
        let norm = p[..m].iter().map(|x| x * x).sum::<f64>().sqrt();
        let ok = match self.kind {
            DomainKind::Sphere => (norm - 1.0).abs() < 1e-9,
            DomainKind::Torus => true,
            DomainKind::Ball => norm <= 1.0 + 1e-12,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {p:?} is not on {self}")))
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            DomainKind::Sphere => "sphere",
            DomainKind::Torus => "torus",
            DomainKind::Ball => "ball",
        };
        write!(f, "{name}({})", self.n)
    }
}

/// Volume ωₙ of the unit ball in Rⁿ, n ≤ 3.
pub fn unit_ball_volume(n: u32) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => panic!("unit_ball_volume: unsupported dimension {n}"),
    }
}

pub(crate) fn coords_from(p: &[f64]) -> Coords {
    let mut c = [0.0; MAX_AMBIENT];
    c[..p.len()].copy_from_slice(p);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let s2 = Domain::sphere(2).unwrap();
        let d = s2.distance(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        assert!((d - PI / 2.0).abs() < 1e-15);
        let t2 = Domain::torus(2).unwrap();
        assert!((t2.distance(&[0.1, 0.0], &[0.9, 0.0]) - 0.2).abs() < 1e-12);
        for dom in [s2, t2, Domain::ball(3).unwrap()] {
            assert_eq!(dom.distance(&[0.0, 0.6, 0.8], &[0.0, 0.6, 0.8]), 0.0);
        }
        let antipodal = s2.distance(&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]);
        assert!((antipodal - PI).abs() < 1e-15);
    }

    #[test]
    fn unsupported_dimensions() {
        assert!(Domain::sphere(4).is_err());
        assert!(Domain::ball(1).is_err());
        assert!(Domain::torus(0).is_err());
    }

    #[test]
    fn serde_shape() {
        let d = Domain::torus(2).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"domain":"torus","n":2}"#);
    }
}
