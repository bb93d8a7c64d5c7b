use rayon::prelude::*;

use super::sample::SampleGrid;
use crate::domain::{coords_from, Coords, Domain, DomainKind};
use crate::error::{Error, Result};

/// Open geodesic ball `{x : dist(center, x) < radius}` in a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricBall {
    domain: Domain,
    center: Coords,
    radius: f64,
}

impl MetricBall {
    pub fn new(domain: Domain, center: &[f64], radius: f64) -> Result<Self> {
        domain.check_point(center)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Invalid(format!("ball radius {radius} must be positive")));
        }
        let mut center = coords_from(&center[..domain.ambient_dim()]);
        if domain.kind == DomainKind::Torus {
            center.iter_mut().for_each(|c| *c = c.rem_euclid(1.0));
        }
        Ok(MetricBall {
            domain,
            center,
            radius,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn center(&self) -> &Coords {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Concentric ball `rB`.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Invalid(format!("scale {r} outside (0, 1]")));
        }
        Ok(MetricBall {
            radius: self.radius * r,
            ..self.clone()
        })
    }

    pub fn distance_to_center(&self, x: &[f64]) -> f64 {
        self.domain.distance(&self.center, x)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance_to_center(x) < self.radius
    }

    /// The point itself when inside, otherwise the point of the closed ball
    /// on the geodesic from the center towards it.
    pub fn clamp(&self, x: &[f64]) -> Coords {
        let m = self.domain.ambient_dim();
        let mut out = coords_from(&x[..m]);
        if self.contains(x) {
            return out;
        }
        let r = self.radius * (1.0 - 1e-12);
        let c = &self.center;
        match self.domain.kind {
            DomainKind::Ball | DomainKind::Torus => {
                let periodic = self.domain.kind == DomainKind::Torus;
                let mut d = [0.0; 4];
                for i in 0..m {
                    d[i] = x[i] - c[i];
                    if periodic {
                        d[i] -= d[i].round();
                    }
                }
                let len = d.iter().map(|a| a * a).sum::<f64>().sqrt();
                for i in 0..m {
                    out[i] = c[i] + d[i] * r / len;
                    if periodic {
                        out[i] = out[i].rem_euclid(1.0);
                    }
                }
            }
            DomainKind::Sphere => {
                let dot: f64 = (0..m).map(|i| x[i] * c[i]).sum();
                let mut u = [0.0; 4];
                for i in 0..m {
                    u[i] = x[i] - dot * c[i];
                }
                let len = u.iter().map(|a| a * a).sum::<f64>().sqrt();
                if len == 0.0 {
                    return *c;
                }
                for i in 0..m {
                    out[i] = r.cos() * c[i] + r.sin() * u[i] / len;
                }
            }
        }
        out
    }
}

/// Grid cells whose centers lie in a ball.
#[derive(Clone, Debug)]
pub struct BallCells {
    pub cells: Vec<usize>,
    pub measure: f64,
    /// Measure of the cells within half a cell diagonal of the sphere
    /// `∂B`; bounds the discretization error of `measure`.
    pub error_bound: f64,
    /// Set when no cell center falls inside (radius below the grid pitch).
    pub empty: bool,
}

pub fn cells_in_ball(grid: &SampleGrid, ball: &MetricBall) -> BallCells {
    let m = grid.domain().ambient_dim();
    let half_diag = 0.5 * grid.pitch() * (grid.ndim() as f64).sqrt();
    let hits: Vec<(usize, bool, bool)> = (0..grid.len())
        .into_par_iter()
        .filter_map(|c| {
            let d = ball.distance_to_center(&grid.point(c)[..m]);
            let near = (d - ball.radius).abs() <= half_diag;
            let inside = d < ball.radius;
            (inside || near).then_some((c, inside, near))
        })
        .collect();
    let mut cells = Vec::new();
    let (mut measure, mut error_bound) = (0.0, 0.0);
    for (c, inside, near) in hits {
        let w = grid.cell_measure(c);
        if inside {
            cells.push(c);
            measure += w;
        }
        if near {
            error_bound += w;
        }
    }
    BallCells {
        empty: cells.is_empty(),
        cells,
        measure,
        error_bound,
    }
}

/// One annulus `{inner <= dist < outer}` of a layer decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shell {
    pub inner: f64,
    pub outer: f64,
}

impl Shell {
    pub fn mid_radius(&self) -> f64 {
        0.5 * (self.inner + self.outer)
    }
}

/// Decomposition of `B \ ½B` into annuli of a fixed width.
#[derive(Clone, Debug)]
pub struct Layers {
    pub ball: MetricBall,
    pub width: f64,
    pub shells: Vec<Shell>,
    /// Set when the requested width did not fit (single layer fallback).
    pub degenerate: bool,
}

/// Splits `B \ ½B` into `⌊(R/2)/width⌋` shells of the given width; the last
/// shell absorbs the remainder. A width of at least `R/2` yields one shell
/// and sets `degenerate`.
pub fn spherical_layers(ball: &MetricBall, width: f64) -> Result<Layers> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::Invalid(format!("layer width {width} must be positive")));
    }
    let half = 0.5 * ball.radius();
    let degenerate = width >= half;
    let count = if degenerate {
        1
    } else {
        ((half / width) * (1.0 + 1e-12)).floor().max(1.0) as usize
    };
    let shells = (0..count)
        .map(|i| Shell {
            inner: half + i as f64 * width,
            outer: if i + 1 == count {
                ball.radius()
            } else {
                half + (i + 1) as f64 * width
            },
        })
        .collect();
    Ok(Layers {
        ball: ball.clone(),
        width,
        shells,
        degenerate,
    })
}

impl Layers {
    pub fn count(&self) -> usize {
        self.shells.len()
    }

    /// Places one ball of radius `width/2` per shell at the center returned
    /// by `place` (e.g. where a target component meets the shell).
    pub fn place_balls<F>(&self, mut place: F) -> Result<Vec<Option<MetricBall>>>
    where
        F: FnMut(usize, &Shell) -> Option<Coords>,
    {
        self.shells
            .iter()
            .enumerate()
            .map(|(i, shell)| match place(i, shell) {
                Some(c) => MetricBall::new(self.ball.domain(), &c, 0.5 * self.width).map(Some),
                None => Ok(None),
            })
            .collect()
    }
}
