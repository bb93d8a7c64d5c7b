use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::MetricBall;
use crate::domain::{Coords, Domain, DomainKind};
use crate::error::{Error, Result};

const INACTIVE: u32 = u32::MAX;
pub const MIN_RESOLUTION: usize = 16;

/// Default resolution for 2-D domains and 3-D domains.
pub fn default_resolution(domain: &Domain) -> usize {
    if domain.n >= 3 {
        128
    } else {
        512
    }
}

/// Grid entry of an experiment config: `{domain, n, resolution}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(flatten)]
    pub domain: Domain,
    pub resolution: usize,
}

#[derive(Clone, Debug)]
enum Layout {
    /// Equal-angle hyperspherical grid; θ axes have `res` cells on (0, π),
    /// the azimuth has `2 res` cells on [0, 2π).
    LatLong { res: usize },
    /// Uniform periodic lattice on [0,1)ⁿ.
    Periodic { res: usize },
    /// Cartesian lattice on [-1,1]ⁿ clipped to the open unit ball.
    Cartesian { h: f64 },
    /// Cartesian lattice on the tangent cube [-R,R]ⁿ at `center`, clipped to the
    /// tangent ball of radius R and mapped into the domain (exponential map on
    /// spheres, translation elsewhere).
    Patch {
        center: Coords,
        frame: [Coords; 3],
        radius: f64,
        h: f64,
    },
    /// Geodesic polar coordinates `(r, φ)` about `center` in a 2-D ball,
    /// `r` in rings of width `h`, `φ` periodic; mapped like `Patch`.
    Polar {
        center: Coords,
        frame: [Coords; 3],
        radius: f64,
        h: f64,
        sectors: usize,
    },
}

/// A structured sampling of a domain. Cells are lattice boxes (possibly
/// clipped); each carries its center point, a positive measure, and
/// face-adjacency with periodic wrap where the domain is periodic.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    domain: Domain,
    layout: Layout,
    ndim: usize,
    shape: [usize; 3],
    strides: [usize; 3],
    wrap: [bool; 3],
    /// cell -> lattice index, present when the lattice is clipped
    cells: Option<Vec<u32>>,
    /// lattice -> cell index, present when the lattice is clipped
    lookup: Option<Vec<u32>>,
    axis_weights: Vec<Vec<f64>>,
    resolution: usize,
    /// Cell centers, cached for every layout but the whole-sphere grid.
    points: Option<Vec<Coords>>,
}

/// Discretizes a whole domain.
///
/// Spheres use the lat-long grid with exact band measures, tori a uniform
/// periodic lattice with cell measure `res⁻ⁿ`, balls a Cartesian lattice of
/// pitch `2/res` whose cells are kept when their center lies inside.
pub fn build_grid(domain: Domain, resolution: usize) -> Result<SampleGrid> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Invalid(format!(
            "resolution {resolution} below minimum {MIN_RESOLUTION}"
        )));
    }
    let n = domain.n as usize;
    match domain.kind {
        DomainKind::Sphere => {
            let mut shape = [1; 3];
            let mut wrap = [false; 3];
            let mut weights = Vec::new();
            let dtheta = PI / resolution as f64;
            for (axis, extent) in shape.iter_mut().enumerate().take(n - 1) {
                *extent = resolution;
                let power = n - 1 - axis;
                weights.push(
                    (0..resolution)
                        .map(|i| {
                            let a = i as f64 * dtheta;
                            sine_power_integral(power, a, a + dtheta)
                        })
                        .collect(),
                );
            }
            shape[n - 1] = 2 * resolution;
            wrap[n - 1] = true;
            weights.push(vec![dtheta; 2 * resolution]);
            Ok(SampleGrid::new(
                domain,
                Layout::LatLong { res: resolution },
                n,
                shape,
                wrap,
                weights,
                resolution,
                |_| true,
            ))
        }
        DomainKind::Torus => {
            let mut shape = [1; 3];
            let mut wrap = [false; 3];
            for axis in 0..n {
                shape[axis] = resolution;
                wrap[axis] = true;
            }
            Ok(SampleGrid::new(
                domain,
                Layout::Periodic { res: resolution },
                n,
                shape,
                wrap,
                vec![],
                resolution,
                |_| true,
            ))
        }
        DomainKind::Ball => {
            let h = 2.0 / resolution as f64;
            let mut shape = [1; 3];
            shape[..n].iter_mut().for_each(|s| *s = resolution);
            let layout = Layout::Cartesian { h };
            let probe = SampleGrid::raw(domain, layout.clone(), n, shape, [false; 3], resolution);
            Ok(SampleGrid::new(
                domain,
                layout,
                n,
                shape,
                [false; 3],
                vec![],
                resolution,
                |p| {
                    let x = probe.point_at(&p);
                    x[..n].iter().map(|v| v * v).sum::<f64>() < 1.0
                },
            ))
        }
    }
}

/// Discretizes the metric ball `ball` alone with `resolution` cells across
/// its diameter. Cells are kept when the geodesic distance of their center
/// to the ball center is below the radius. Used for balls far smaller than
/// the domain, where a global grid would be too coarse.
pub fn build_patch(ball: &MetricBall, resolution: usize) -> Result<SampleGrid> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Invalid(format!(
            "resolution {resolution} below minimum {MIN_RESOLUTION}"
        )));
    }
    let domain = ball.domain();
    let n = domain.n as usize;
    let radius = ball.radius();
    if domain.kind == DomainKind::Sphere && radius >= PI {
        return Err(Error::Invalid("patch radius must be below π on a sphere".into()));
    }
    let h = 2.0 * radius / resolution as f64;
    let frame = tangent_frame(&domain, ball.center());
    let layout = Layout::Patch {
        center: *ball.center(),
        frame,
        radius,
        h,
    };
    let mut shape = [1; 3];
    shape[..n].iter_mut().for_each(|s| *s = resolution);
    let probe = SampleGrid::raw(domain, layout.clone(), n, shape, [false; 3], resolution);
    Ok(SampleGrid::new(
        domain,
        layout,
        n,
        shape,
        [false; 3],
        vec![],
        resolution,
        |p| {
            let v = probe.tangent(&p);
            let inside = v.iter().map(|x| x * x).sum::<f64>().sqrt() < radius;
            match domain.kind {
                DomainKind::Ball => {
                    let x = probe.point_at(&p);
                    inside && x[..n].iter().map(|v| v * v).sum::<f64>() < 1.0
                }
                _ => inside,
            }
        },
    ))
}

/// Polar discretization of a 2-D metric ball: `resolution / 2` rings of
/// width `2R / resolution` and about `π·resolution` angular sectors (a
/// multiple of four), so outer cells are nearly square. Cell measures are
/// exact annular sectors. Nodal lines through the center are resolved at
/// every scale, which a Cartesian patch cannot do near high-order zeros.
pub fn build_polar_patch(ball: &MetricBall, resolution: usize) -> Result<SampleGrid> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Invalid(format!(
            "resolution {resolution} below minimum {MIN_RESOLUTION}"
        )));
    }
    let domain = ball.domain();
    if domain.n != 2 {
        return Err(Error::Unsupported(format!("polar patches are 2-D, got n = {}", domain.n)));
    }
    let radius = ball.radius();
    if domain.kind == DomainKind::Sphere && radius >= PI {
        return Err(Error::Invalid("patch radius must be below π on a sphere".into()));
    }
    let rings = resolution / 2;
    let h = radius / rings as f64;
    let sectors = 4 * ((PI * resolution as f64 / 4.0).round() as usize).max(1);
    let layout = Layout::Polar {
        center: *ball.center(),
        frame: tangent_frame(&domain, ball.center()),
        radius,
        h,
        sectors,
    };
    let dphi = TAU / sectors as f64;
    let weights = vec![
        (0..rings)
            .map(|i| {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                match domain.kind {
                    DomainKind::Sphere => a.cos() - b.cos(),
                    _ => (b * b - a * a) / 2.0,
                }
            })
            .collect(),
        vec![dphi; sectors],
    ];
    let shape = [rings, sectors, 1];
    match domain.kind {
        DomainKind::Ball => {
            let probe = SampleGrid::raw(domain, layout.clone(), 2, shape, [false, true, false], resolution);
            Ok(SampleGrid::new(domain, layout, 2, shape, [false, true, false], weights, resolution, |p| {
                let x = probe.point_at(&p);
                x[0] * x[0] + x[1] * x[1] < 1.0
            }))
        }
        _ => Ok(SampleGrid::new(
            domain,
            layout,
            2,
            shape,
            [false, true, false],
            weights,
            resolution,
            |_| true,
        )),
    }
}

fn sine_power_integral(power: usize, a: f64, b: f64) -> f64 {
    match power {
        0 => b - a,
        1 => a.cos() - b.cos(),
        2 => (b - a) / 2.0 - ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0,
        _ => unreachable!("sphere dimension capped at 3"),
    }
}

fn tangent_frame(domain: &Domain, center: &Coords) -> [Coords; 3] {
    let n = domain.n as usize;
    let mut frame = [[0.0; 4]; 3];
    if domain.kind != DomainKind::Sphere {
        for (a, e) in frame.iter_mut().enumerate().take(n) {
            e[a] = 1.0;
        }
        return frame;
    }
    let m = n + 1;
    let mut basis: Vec<Coords> = Vec::with_capacity(m);
    basis.push(*center);
    // Gram-Schmidt over standard vectors, most orthogonal to the center first
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| center[a].abs().total_cmp(&center[b].abs()));
    for &axis in &order {
        if basis.len() == m {
            break;
        }
        let mut v = [0.0; 4];
        v[axis] = 1.0;
        for b in &basis {
            let dot: f64 = (0..m).map(|i| v[i] * b[i]).sum();
            (0..m).for_each(|i| v[i] -= dot * b[i]);
        }
        let norm = (0..m).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        if norm > 1e-8 {
            (0..m).for_each(|i| v[i] /= norm);
            basis.push(v);
        }
    }
    frame[..n].copy_from_slice(&basis[1..=n]);
    frame
}

impl SampleGrid {
    fn raw(
        domain: Domain,
        layout: Layout,
        ndim: usize,
        shape: [usize; 3],
        wrap: [bool; 3],
        resolution: usize,
    ) -> SampleGrid {
        let strides = [shape[1] * shape[2], shape[2], 1];
        SampleGrid {
            domain,
            layout,
            ndim,
            shape,
            strides,
            wrap,
            cells: None,
            lookup: None,
            axis_weights: vec![],
            resolution,
            points: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn new(
        domain: Domain,
        layout: Layout,
        ndim: usize,
        shape: [usize; 3],
        wrap: [bool; 3],
        axis_weights: Vec<Vec<f64>>,
        resolution: usize,
        keep: impl Fn([f64; 3]) -> bool + Sync,
    ) -> SampleGrid {
        let mut grid = SampleGrid::raw(domain, layout, ndim, shape, wrap, resolution);
        grid.axis_weights = axis_weights;
        let total = shape.iter().product::<usize>();
        let flags: Vec<bool> = (0..total)
            .into_par_iter()
            .map(|l| keep(grid.lattice_center(l)))
            .collect();
        if flags.iter().all(|&f| f) {
            grid.cache_points();
            return grid;
        }
        let mut cells = Vec::new();
        let mut lookup = vec![INACTIVE; total];
        for (l, &keep) in flags.iter().enumerate() {
            if keep {
                lookup[l] = cells.len() as u32;
                cells.push(l as u32);
            }
        }
        grid.cells = Some(cells);
        grid.lookup = Some(lookup);
        grid.cache_points();
        grid
    }

    fn cache_points(&mut self) {
        if matches!(self.layout, Layout::LatLong { .. }) {
            return;
        }
        let points = (0..self.len())
            .into_par_iter()
            .map(|c| self.point_at(&self.center_params(c)))
            .collect();
        self.points = Some(points);
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Resolution parameter the grid was built with.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Number of lattice axes (the intrinsic dimension).
    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.ndim]
    }

    pub fn len(&self) -> usize {
        match &self.cells {
            Some(c) => c.len(),
            None => self.shape.iter().product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nominal geodesic spacing between neighboring cell centers.
    pub fn pitch(&self) -> f64 {
        match &self.layout {
            Layout::LatLong { res } => PI / *res as f64,
            Layout::Periodic { res } => 1.0 / *res as f64,
            Layout::Cartesian { h } | Layout::Patch { h, .. } | Layout::Polar { h, .. } => *h,
        }
    }

    /// Center and radius of the patch, when this grid covers a single ball.
    pub fn patch_ball(&self) -> Option<(Coords, f64)> {
        match &self.layout {
            Layout::Patch { center, radius, .. } | Layout::Polar { center, radius, .. } => {
                Some((*center, *radius))
            }
            _ => None,
        }
    }

    pub fn lattice_index(&self, cell: usize) -> usize {
        match &self.cells {
            Some(c) => c[cell] as usize,
            None => cell,
        }
    }

    /// Cell owning a lattice index, if that lattice box is active.
    pub fn cell_of_lattice(&self, lattice: usize) -> Option<usize> {
        match &self.lookup {
            Some(l) => match l[lattice] {
                INACTIVE => None,
                c => Some(c as usize),
            },
            None => Some(lattice),
        }
    }

    pub fn multi_index(&self, cell: usize) -> [usize; 3] {
        self.lattice_multi(self.lattice_index(cell))
    }

    fn lattice_multi(&self, l: usize) -> [usize; 3] {
        [
            l / self.strides[0],
            (l / self.strides[1]) % self.shape[1],
            l % self.shape[2],
        ]
    }

    fn lattice_center(&self, l: usize) -> [f64; 3] {
        let m = self.lattice_multi(l);
        [m[0] as f64 + 0.5, m[1] as f64 + 0.5, m[2] as f64 + 0.5]
    }

    /// Continuous lattice coordinates of a cell center (`index + 0.5` per axis).
    pub fn center_params(&self, cell: usize) -> [f64; 3] {
        self.lattice_center(self.lattice_index(cell))
    }

    /// Maps continuous lattice coordinates to a domain point. Coordinates
    /// outside the active cells are allowed (used by local refinement).
    pub fn point_at(&self, p: &[f64; 3]) -> Coords {
        let n = self.ndim;
        let u = &p[..n];
        let mut x = [0.0; 4];
        match &self.layout {
            Layout::LatLong { res } => {
                let step = PI / *res as f64;
                let mut sines = 1.0;
                for (l, &ul) in u[..n - 1].iter().enumerate() {
                    let t = ul * step;
                    x[l] = sines * t.cos();
                    sines *= t.sin();
                }
                let phi = u[n - 1] * step;
                x[n - 1] = sines * phi.cos();
                x[n] = sines * phi.sin();
            }
            Layout::Periodic { res } => {
                for (xi, &ui) in x.iter_mut().zip(u) {
                    *xi = (ui / *res as f64).rem_euclid(1.0);
                }
            }
            Layout::Cartesian { h } => {
                for (xi, &ui) in x.iter_mut().zip(u) {
                    *xi = -1.0 + ui * h;
                }
            }
            Layout::Patch { center, .. } | Layout::Polar { center, .. } => {
                let v = self.tangent(p);
                match self.domain.kind {
                    DomainKind::Sphere => {
                        let s = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                        let m = n + 1;
                        let (cs, sinc) = if s == 0.0 { (1.0, 1.0) } else { (s.cos(), s.sin() / s) };
                        let frame = self.frame();
                        for i in 0..m {
                            let mut t = 0.0;
                            for (a, va) in v.iter().enumerate().take(n) {
                                t += va * frame[a][i];
                            }
                            x[i] = cs * center[i] + sinc * t;
                        }
                    }
                    DomainKind::Torus => {
                        for i in 0..n {
                            x[i] = (center[i] + v[i]).rem_euclid(1.0);
                        }
                    }
                    DomainKind::Ball => {
                        for i in 0..n {
                            x[i] = center[i] + v[i];
                        }
                    }
                }
            }
        }
        x
    }

    fn frame(&self) -> &[Coords; 3] {
        match &self.layout {
            Layout::Patch { frame, .. } | Layout::Polar { frame, .. } => frame,
            _ => unreachable!(),
        }
    }

    /// Tangent-space coordinates of lattice parameters on a patch grid.
    fn tangent(&self, p: &[f64; 3]) -> [f64; 3] {
        let n = self.ndim;
        let mut v = [0.0; 3];
        match &self.layout {
            Layout::Patch { radius, h, .. } => {
                for (vi, &ui) in v.iter_mut().zip(&p[..n]) {
                    *vi = -radius + ui * h;
                }
            }
            Layout::Polar { h, sectors, .. } => {
                let r = p[0] * h;
                let phi = p[1] * TAU / *sectors as f64;
                v[0] = r * phi.cos();
                v[1] = r * phi.sin();
            }
            _ => {}
        }
        v
    }

    pub fn point(&self, cell: usize) -> Coords {
        match &self.points {
            Some(p) => p[cell],
            None => self.point_at(&self.center_params(cell)),
        }
    }

    pub fn cell_measure(&self, cell: usize) -> f64 {
        let n = self.ndim;
        match &self.layout {
            Layout::LatLong { .. } | Layout::Polar { .. } => {
                let m = self.multi_index(cell);
                (0..n).map(|a| self.axis_weights[a][m[a]]).product()
            }
            Layout::Periodic { res } => (*res as f64).powi(-(n as i32)),
            Layout::Cartesian { h } => h.powi(n as i32),
            Layout::Patch { h, .. } => {
                let base = h.powi(n as i32);
                if self.domain.kind == DomainKind::Sphere {
                    let v = self.tangent(&self.center_params(cell));
                    let s = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    let jac = if s == 0.0 { 1.0 } else { s.sin() / s };
                    base * jac.powi(n as i32 - 1)
                } else {
                    base
                }
            }
        }
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.len()).map(|c| self.cell_measure(c)).sum()
    }

    /// Face neighbors of a cell, with periodic wrap on periodic axes.
    pub fn neighbors(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let l = self.lattice_index(cell);
        let m = self.lattice_multi(l);
        let n = self.ndim;
        (0..n)
            .flat_map(move |axis| [(axis, false), (axis, true)])
            .filter_map(move |(axis, up)| {
                let extent = self.shape[axis];
                let i = m[axis];
                let j = if up {
                    if i + 1 < extent {
                        i + 1
                    } else if self.wrap[axis] && extent > 1 {
                        0
                    } else {
                        return None;
                    }
                } else if i > 0 {
                    i - 1
                } else if self.wrap[axis] && extent > 1 {
                    extent - 1
                } else {
                    return None;
                };
                let nl = l - i * self.strides[axis] + j * self.strides[axis];
                self.cell_of_lattice(nl)
            })
    }

    /// True when some face neighbor of the lattice box is missing (clipped
    /// away or beyond a non-periodic lattice edge). The innermost ring of a
    /// polar patch surrounds the center and is not a boundary.
    pub fn on_boundary(&self, cell: usize) -> bool {
        let missing = 2 * self.ndim - self.neighbors(cell).count();
        match self.layout {
            Layout::Polar { .. } if self.multi_index(cell)[0] == 0 => missing > 1,
            _ => missing > 0,
        }
    }

    /// Cell whose lattice box contains a point, on whole-torus and
    /// whole-ball grids. Other layouts return `None`.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let n = self.ndim;
        let mut l = 0;
        for a in 0..n {
            let i = match self.layout {
                Layout::Periodic { res } => {
                    ((x[a].rem_euclid(1.0) * res as f64).floor() as usize).min(res - 1)
                }
                Layout::Cartesian { h } => {
                    let u = ((x[a] + 1.0) / h).floor();
                    if u < 0.0 || u >= self.shape[a] as f64 {
                        return None;
                    }
                    u as usize
                }
                _ => return None,
            };
            l += i * self.strides[a];
        }
        self.cell_of_lattice(l)
    }

    /// True for cells on a genuine edge of the discretized region: the clipped
    /// boundary of a ball or patch lattice. Lat-long pole rows and periodic
    /// lattices have no edge.
    pub fn on_edge(&self, cell: usize) -> bool {
        match self.layout {
            Layout::LatLong { .. } | Layout::Periodic { .. } => false,
            Layout::Cartesian { .. } | Layout::Patch { .. } | Layout::Polar { .. } => {
                self.on_boundary(cell)
            }
        }
    }

    /// Evaluates a function at every cell center, in cell order.
    pub fn sample<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        let m = self.domain.ambient_dim();
        (0..self.len())
            .into_par_iter()
            .map(|c| f(&self.point(c)[..m]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_lattice() {
        let g = build_grid(Domain::torus(2).unwrap(), 100).unwrap();
        assert_eq!(g.len(), 10_000);
        assert!((0..g.len()).all(|c| (g.cell_measure(c) - 1e-4).abs() < 1e-18));
        assert_eq!(g.neighbors(0).count(), 4);
    }

    #[test]
    fn sphere_area_is_exact() {
        let g = build_grid(Domain::sphere(2).unwrap(), 64).unwrap();
        assert!((g.total_measure() / (4.0 * PI) - 1.0).abs() < 1e-12);
        let g3 = build_grid(Domain::sphere(3).unwrap(), 16).unwrap();
        assert!((g3.total_measure() / (2.0 * PI * PI) - 1.0).abs() < 1e-12);
        let g1 = build_grid(Domain::sphere(1).unwrap(), 16).unwrap();
        assert!((g1.total_measure() / (2.0 * PI) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_points_on_sphere() {
        let g = build_grid(Domain::sphere(2).unwrap(), 32).unwrap();
        for c in (0..g.len()).step_by(97) {
            let p = g.point(c);
            let norm: f64 = p[..3].iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_area_converges() {
        for res in [64, 256, 1024] {
            let g = build_grid(Domain::ball(2).unwrap(), res).unwrap();
            let err = (g.total_measure() - PI).abs();
            assert!(err < 8.0 / res as f64, "res {res}: err {err}");
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        for g in [
            build_grid(Domain::sphere(2).unwrap(), 16).unwrap(),
            build_grid(Domain::ball(2).unwrap(), 20).unwrap(),
            build_grid(Domain::torus(3).unwrap(), 16).unwrap(),
        ] {
            for c in 0..g.len() {
                for nb in g.neighbors(c) {
                    assert!(g.neighbors(nb).any(|b| b == c));
                }
                if !g.on_boundary(c) {
                    assert!(g.neighbors(c).count() >= g.ndim());
                }
            }
            if g.domain().kind != DomainKind::Ball {
                assert!((0..g.len()).all(|c| g.neighbors(c).count() >= g.ndim()));
            }
        }
    }

    #[test]
    fn polar_patch_measures_are_exact() {
        let sphere = Domain::sphere(2).unwrap();
        let cap = MetricBall::new(sphere, &[0.0, 0.6, 0.8], 0.3).unwrap();
        let g = build_polar_patch(&cap, 64).unwrap();
        let exact = TAU * (1.0 - 0.3f64.cos());
        assert!((g.total_measure() / exact - 1.0).abs() < 1e-12);
        for c in (0..g.len()).step_by(37) {
            let d = sphere.distance(&g.point(c), cap.center());
            let ring = g.multi_index(c)[0] as f64;
            assert!((d - (ring + 0.5) * g.pitch()).abs() < 1e-12);
        }
        let torus = Domain::torus(2).unwrap();
        let disk = MetricBall::new(torus, &[0.9, 0.1], 0.2).unwrap();
        let g = build_polar_patch(&disk, 32).unwrap();
        assert!((g.total_measure() / (PI * 0.04) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_patch_edges_and_adjacency() {
        let ball = MetricBall::new(Domain::torus(2).unwrap(), &[0.5, 0.5], 0.1).unwrap();
        let g = build_polar_patch(&ball, 32).unwrap();
        let rings = g.shape()[0];
        for c in 0..g.len() {
            assert_eq!(g.on_edge(c), g.multi_index(c)[0] == rings - 1);
            for nb in g.neighbors(c) {
                assert!(g.neighbors(nb).any(|b| b == c));
            }
        }
        assert!(build_polar_patch(&MetricBall::new(Domain::torus(3).unwrap(), &[0.5; 3], 0.1).unwrap(), 32).is_err());
    }

    #[test]
    fn low_resolution_rejected() {
        assert!(build_grid(Domain::torus(2).unwrap(), 8).is_err());
    }
}
