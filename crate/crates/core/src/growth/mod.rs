//! Sup estimates, growth exponents, maximum-function profiles and the
//! quantitative checks built on them: propagation of smallness, rapid growth
//! in narrow components, and the 2-D subharmonic comparisons.

mod checks;
mod profile;
mod sup;

pub use checks::{
    component_measure_in, dim2_volume_bound_check, eremenko_check, propagation_check,
    rapid_growth_ratio, Eremenko, LinearBound, Propagation, PropagationFlag, RapidGrowth,
    SubharmonicRestriction, VolumeBound,
};
pub use profile::{
    beta_prime, convexity_defect, growth_exponent, max_convexity_defect, log_ratio, log_spaced, max_function_profile,
    profile_on_grid, Convexity, GrowthExponent, GrowthReport,
};
pub use sup::{sup_on_region, Region, SupEstimate};

#[cfg(test)]
mod tests;
