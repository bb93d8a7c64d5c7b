use serde::Serialize;

use super::sup::{sup_on_region, Region, SupEstimate};
use crate::eigen::ScalarFn;
use crate::error::{Error, Result};
use crate::grid::{build_patch, MetricBall, SampleGrid};

/// `β_r(φ; B) = log(sup_B |φ| / sup_{rB} |φ|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthExponent {
    pub r: f64,
    /// Infinite when the field vanishes on `rB`.
    pub beta: f64,
    pub outer: SupEstimate,
    pub inner: SupEstimate,
}

impl GrowthExponent {
    pub fn is_infinite(&self) -> bool {
        self.beta.is_infinite()
    }

    pub fn prime(&self) -> f64 {
        beta_prime(self.beta)
    }
}

/// `β' = max(β, 3)`.
pub fn beta_prime(beta: f64) -> f64 {
    beta.max(3.0)
}

pub fn log_ratio(outer: f64, inner: f64) -> f64 {
    if inner > 0.0 {
        (outer / inner).ln()
    } else {
        f64::INFINITY
    }
}

pub fn growth_exponent<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    ball: &MetricBall,
    r: f64,
) -> Result<GrowthExponent> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Invalid(format!("growth ratio r = {r} outside (0, 1)")));
    }
    let outer = sup_on_region(field, grid, Region::Ball(ball))?;
    let inner = sup_on_region(field, grid, Region::Ball(&ball.scaled(r)?))?;
    Ok(GrowthExponent {
        r,
        beta: log_ratio(outer.refined, inner.refined),
        outer,
        inner,
    })
}

/// Midpoint-convexity check of a function of `M` against `log r` over
/// consecutive radius triples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Convexity {
    /// Largest `g(M(r_b)) − (w_a g(M(r_a)) + w_c g(M(r_c)))`; convex means ≤ 0.
    pub max_defect: f64,
    /// Largest defect minus its sampling allowance; a violation when > 0.
    pub max_excess: f64,
    pub violations: usize,
}

/// Convexity of `log M` in `log r` (three-circles form).
pub fn convexity_defect(radii: &[f64], sups: &[SupEstimate]) -> Result<Convexity> {
    midpoint_convexity(radii, sups, f64::ln)
}

/// Convexity of `M` itself in `log r`, which holds for every subharmonic
/// function.
pub fn max_convexity_defect(radii: &[f64], sups: &[SupEstimate]) -> Result<Convexity> {
    midpoint_convexity(radii, sups, |m| m)
}

fn midpoint_convexity(radii: &[f64], sups: &[SupEstimate], g: impl Fn(f64) -> f64) -> Result<Convexity> {
    if radii.len() < 3 || radii.len() != sups.len() {
        return Err(Error::Invalid(String::from(
            "convexity needs at least three radii with one sup each",
        )));
    }
    let mut out = Convexity {
        max_defect: f64::NEG_INFINITY,
        max_excess: f64::NEG_INFINITY,
        violations: 0,
    };
    for i in 0..radii.len() - 2 {
        let (a, b, c) = (radii[i].ln(), radii[i + 1].ln(), radii[i + 2].ln());
        let wa = (c - b) / (c - a);
        let wc = 1.0 - wa;
        let (ma, mb, mc) = (&sups[i], &sups[i + 1], &sups[i + 2]);
        let defect = g(mb.refined) - (wa * g(ma.refined) + wc * g(mc.refined));
        // refined ≤ M ≤ upper, so only the outer points can hide convexity
        let allowance = wa * (g(ma.upper) - g(ma.refined))
            + wc * (g(mc.upper) - g(mc.refined))
            + 1e-12 * g(mb.refined).abs().max(1.0);
        let excess = defect - allowance;
        out.max_defect = out.max_defect.max(defect);
        out.max_excess = out.max_excess.max(excess);
        if excess > 0.0 {
            out.violations += 1;
        }
    }
    Ok(out)
}

/// Maximum-function profile `M(r) = sup_{rB} |f|` with growth exponents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub center: Vec<f64>,
    pub radius: f64,
    pub radii: Vec<f64>,
    pub sups: Vec<SupEstimate>,
    /// `log(M(1)/M(r_i))`, relative to the largest radius.
    pub beta: Vec<f64>,
    pub beta_prime: Vec<f64>,
    /// Largest `log(M(r_i)/M(r_{i+1}))` beyond sampling allowance; positive
    /// values mean `M` decreased.
    pub monotonicity_excess: f64,
    /// `log M` against `log r`.
    pub convexity: Convexity,
    /// `M` against `log r`.
    pub max_convexity: Convexity,
}

/// Profile on a family of concentric balls, each sampled by its own patch
/// grid at the given resolution so that every radius is resolved alike.
pub fn max_function_profile<F: ScalarFn + ?Sized>(
    field: &F,
    ball: &MetricBall,
    radii: &[f64],
    resolution: usize,
) -> Result<GrowthReport> {
    if radii.len() < 3 {
        return Err(Error::Invalid(String::from("profile needs at least three radii")));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] <= 0.0 || radii[radii.len() - 1] > 1.0 {
        return Err(Error::Invalid(String::from(
            "radii must increase strictly within (0, 1]",
        )));
    }
    let sups = radii
        .iter()
        .map(|&r| {
            let b = ball.scaled(r)?;
            let grid = build_patch(&b, resolution)?;
            sup_on_region(field, &grid, Region::Ball(&b))
        })
        .collect::<Result<Vec<_>>>()?;
    report_from(ball, radii, sups)
}

/// Profile read from a single fixed grid.
pub fn profile_on_grid<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    ball: &MetricBall,
    radii: &[f64],
) -> Result<GrowthReport> {
    let sups = radii
        .iter()
        .map(|&r| sup_on_region(field, grid, Region::Ball(&ball.scaled(r)?)))
        .collect::<Result<Vec<_>>>()?;
    report_from(ball, radii, sups)
}

pub(crate) fn report_from(
    ball: &MetricBall,
    radii: &[f64],
    sups: Vec<SupEstimate>,
) -> Result<GrowthReport> {
    let convexity = convexity_defect(radii, &sups)?;
    let max_convexity = max_convexity_defect(radii, &sups)?;
    let top = sups[sups.len() - 1].refined;
    let beta: Vec<f64> = sups.iter().map(|s| log_ratio(top, s.refined)).collect();
    let monotonicity_excess = sups
        .windows(2)
        .map(|w| (w[0].refined / w[1].upper).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let m = ball.domain().ambient_dim();
    Ok(GrowthReport {
        center: ball.center()[..m].to_vec(),
        radius: ball.radius(),
        radii: radii.to_vec(),
        beta_prime: beta.iter().map(|&b| beta_prime(b)).collect(),
        beta,
        sups,
        monotonicity_excess,
        convexity,
        max_convexity,
    })
}

/// `n` radii spaced evenly in `log r` over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
