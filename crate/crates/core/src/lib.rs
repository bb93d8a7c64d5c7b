//! Exact Laplace eigenfunctions on spheres and tori, harmonic polynomials in
//! the disk, nodal-domain decomposition on sampling grids, and growth-exponent
//! measurements (three-circles convexity, rapid growth in narrow domains,
//! propagation of smallness).

pub mod domain;
pub mod eigen;
pub mod error;
pub mod format;
pub mod grid;
pub mod growth;
pub mod harness;
pub mod nodal;

pub use domain::{Coords, Domain, DomainKind};
pub use error::{Error, Result};
