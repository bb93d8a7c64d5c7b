//! Domain discretization: whole-domain grids, single-ball patches, metric
//! balls and the layer decomposition of a ball.

mod ball;
mod sample;

pub use ball::{cells_in_ball, spherical_layers, BallCells, Layers, MetricBall, Shell};
pub use sample::{build_grid, build_patch, build_polar_patch, default_resolution, GridSpec, SampleGrid, MIN_RESOLUTION};
