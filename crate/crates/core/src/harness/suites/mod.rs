mod counts;
mod faber_krahn;
mod properties;
mod sharpness;
mod torus;

pub use counts::run_nodal_counts;
pub use faber_krahn::run_local_faber_krahn;
pub use properties::run_property_suites;
pub use sharpness::run_sharpness_sphere;
pub use torus::run_torus_example;

use crate::error::Result;
use crate::grid::{build_patch, build_polar_patch, MetricBall, SampleGrid};
use crate::nodal::{LabelOptions, ZeroTol};

/// Labeling used on patches and wherever sub-cell crossings can occur.
pub(crate) fn resolved_exact() -> LabelOptions {
    LabelOptions::default()
        .with_zero_tol(ZeroTol::Absolute(0.0))
        .resolved()
}

/// Cell whose center is closest to a point.
pub(crate) fn nearest_cell(grid: &SampleGrid, x: &[f64]) -> usize {
    let d = grid.domain();
    let m = d.ambient_dim();
    (0..grid.len())
        .map(|c| (d.distance(x, &grid.point(c)[..m]), c))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|p| p.1)
        .expect("non-empty grid")
}

/// Grid for labeling inside one ball: polar in 2-D, Cartesian otherwise.
pub(crate) fn ball_grid(ball: &MetricBall, resolution: usize) -> Result<SampleGrid> {
    if ball.domain().n == 2 {
        build_polar_patch(ball, resolution)
    } else {
        build_patch(ball, resolution)
    }
}
