//! Closed-form eigenfunctions: the inductive spherical harmonics, zonal
//! harmonics, torus products of sines, and harmonic polynomials in the disk.

mod field;
pub mod legendre;
mod spherical;

pub use field::{
    harmonic_polynomial_2d, random_harmonic_polynomial, random_sphere_point, re_z_power,
    sphere_harmonic_h, sphere_harmonic_y, torus_eigenfunction, zonal_harmonic, Coefficients, Field,
    FieldKind, FieldSpec, ScalarFn,
};
pub use legendre::{assoc_legendre_e, count_sign_changes, legendre_derivative, legendre_p};
pub use spherical::SphericalPoint;
