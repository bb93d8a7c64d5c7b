use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{beta_prime, growth_exponent, log_ratio, GrowthExponent};
use super::sup::{sup_on_region, Region, SupEstimate};
use crate::eigen::ScalarFn;
use crate::error::{Error, Result};
use crate::grid::{cells_in_ball, MetricBall, SampleGrid};
use crate::nodal::ComponentTable;

/// `h = φ` on a sign component `Ω` (taken with the component's sign), `0`
/// elsewhere. Points are assigned to `Ω` through the labeling grid.
pub struct SubharmonicRestriction<'a, F: ScalarFn + ?Sized> {
    field: &'a F,
    grid: &'a SampleGrid,
    table: &'a ComponentTable,
    position: u32,
    sign: f64,
}

impl<'a, F: ScalarFn + ?Sized> SubharmonicRestriction<'a, F> {
    pub fn new(
        field: &'a F,
        grid: &'a SampleGrid,
        table: &'a ComponentTable,
        position: usize,
    ) -> Result<Self> {
        let comp = table
            .components
            .get(position)
            .ok_or_else(|| Error::Range(format!("component position {position}")))?;
        let m = grid.domain().ambient_dim();
        if grid.locate(&grid.point(0)[..m]).is_none() {
            return Err(Error::Unsupported(String::from(
                "subharmonic restriction needs a whole-ball or whole-torus grid",
            )));
        }
        Ok(SubharmonicRestriction {
            field,
            grid,
            table,
            position: position as u32,
            sign: f64::from(comp.sign),
        })
    }
}

impl<F: ScalarFn + ?Sized> ScalarFn for SubharmonicRestriction<'_, F> {
    fn eval(&self, x: &[f64]) -> f64 {
        match self.grid.locate(x) {
            Some(c) if self.table.labels()[c] == self.position => {
                (self.sign * self.field.eval(x)).max(0.0)
            }
            _ => 0.0,
        }
    }

    fn id(&self) -> String {
        format!("h[{}]", self.field.id())
    }
}

/// Measure of the component cells whose centers lie in `ball`.
pub fn component_measure_in(
    grid: &SampleGrid,
    table: &ComponentTable,
    position: usize,
    ball: Option<&MetricBall>,
) -> f64 {
    let m = grid.domain().ambient_dim();
    table
        .cells_of(position)
        .into_iter()
        .filter(|&c| ball.is_none_or(|b| b.contains(&grid.point(c)[..m])))
        .map(|c| grid.cell_measure(c))
        .sum()
}

fn component_sign(table: &ComponentTable, position: usize) -> Result<i8> {
    table
        .components
        .get(position)
        .map(|c| c.sign)
        .ok_or_else(|| Error::Range(format!("component position {position}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationFlag {
    /// `sup_E |φ| = 0`.
    VanishesOnSubset,
    /// `β_R = 0`.
    NoGrowth,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Propagation {
    pub c_est: f64,
    pub sup_ball: SupEstimate,
    pub sup_subset: SupEstimate,
    pub beta_r: f64,
    pub ball_measure: f64,
    pub subset_measure: f64,
    pub flag: Option<PropagationFlag>,
}

/// Smallest `C` with `sup_B |φ| ≤ sup_E |φ| · (|B|/|E|)^{C β_R / log(1/R)}`,
/// where `R` is the radius of `rB ⊇ E` relative to `B`.
pub fn propagation_check<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    ball: &MetricBall,
    subset: &[usize],
    r: f64,
) -> Result<Propagation> {
    if subset.is_empty() {
        return Err(Error::EmptyRegion(String::from("propagation subset")));
    }
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::Invalid(format!("propagation radius {r} outside (0, 1/2]")));
    }
    let inner = ball.scaled(r)?;
    let m = grid.domain().ambient_dim();
    if let Some(&c) = subset.iter().find(|&&c| !inner.contains(&grid.point(c)[..m])) {
        return Err(Error::Invalid(format!("subset cell {c} lies outside B_R")));
    }
    let whole = cells_in_ball(grid, &inner);
    // A subset equal to the whole of B_R is sampled as the ball itself.
    let region = if whole.cells.len() == subset.len() {
        Region::Ball(&inner)
    } else {
        Region::Cells {
            cells: subset,
            clip: Some(&inner),
        }
    };
    let sup_subset = sup_on_region(field, grid, region)?;
    let GrowthExponent {
        beta: beta_r, outer, ..
    } = growth_exponent(field, grid, ball, r)?;
    let ball_measure = cells_in_ball(grid, ball).measure;
    let subset_measure: f64 = subset.iter().map(|&c| grid.cell_measure(c)).sum();
    let flag = if sup_subset.refined == 0.0 {
        Some(PropagationFlag::VanishesOnSubset)
    } else if beta_r <= 0.0 {
        Some(PropagationFlag::NoGrowth)
    } else {
        None
    };
    let c_est = log_ratio(outer.refined, sup_subset.refined) * (1.0 / r).ln()
        / (beta_r * (ball_measure / subset_measure).ln());
    Ok(Propagation {
        c_est,
        sup_ball: outer,
        sup_subset,
        beta_r,
        ball_measure,
        subset_measure,
        flag,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RapidGrowth {
    /// `max_r (|Ω ∩ B_r| / |B_r|)^{1/(n−1)}` over radii in `[r₀, 1]`.
    pub eta: f64,
    /// `log(sup_Ω φ / sup_{Ω ∩ B_{r₀}} φ)`.
    pub log_ratio: f64,
    /// `log_ratio · eta / log(1/r₀)`.
    pub exponent_est: f64,
    /// `|Ω| / |B|`.
    pub volume_fraction: f64,
}

const ETA_RADII: usize = 16;

/// Rapid-growth quantities of a sign component `Ω` of a labeling on the
/// ball `ball` (the unit ball of the rescaled picture).
pub fn rapid_growth_ratio<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    table: &ComponentTable,
    position: usize,
    ball: &MetricBall,
    r0: f64,
) -> Result<RapidGrowth> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::Invalid(format!("r0 = {r0} outside (0, 1)")));
    }
    component_sign(table, position)?;
    let n = grid.ndim() as i32;
    let inner = ball.scaled(r0)?;
    let sup_inner = sup_on_region(
        field,
        grid,
        Region::Component {
            table,
            position,
            clip: Some(&inner),
        },
    )
    .map_err(|_| Error::EmptyRegion(format!("component misses B_{r0}")))?;
    let sup_all = sup_on_region(
        field,
        grid,
        Region::Component {
            table,
            position,
            clip: Some(ball),
        },
    )?;
    let radii: Vec<f64> = (0..ETA_RADII)
        .map(|i| r0 + (1.0 - r0) * i as f64 / (ETA_RADII - 1) as f64)
        .map(|r| r * ball.radius())
        .collect();
    let m = grid.domain().ambient_dim();
    let dist: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|c| ball.distance_to_center(&grid.point(c)[..m]))
        .collect();
    let (mut ball_measure, mut comp_measure) = (vec![0.0; ETA_RADII], vec![0.0; ETA_RADII]);
    let p = position as u32;
    for (c, &d) in dist.iter().enumerate() {
        let w = grid.cell_measure(c);
        let inside = table.labels()[c] == p;
        for (i, &r) in radii.iter().enumerate() {
            if d < r {
                ball_measure[i] += w;
                if inside {
                    comp_measure[i] += w;
                }
            }
        }
    }
    let eta = comp_measure
        .iter()
        .zip(&ball_measure)
        .map(|(a, b)| (a / b).powf(1.0 / f64::from(n - 1)))
        .fold(0.0, f64::max);
    let volume_fraction = comp_measure[ETA_RADII - 1] / ball_measure[ETA_RADII - 1];
    let lr = log_ratio(sup_all.refined, sup_inner.refined);
    Ok(RapidGrowth {
        eta,
        log_ratio: lr,
        exponent_est: lr * eta / (1.0 / r0).ln(),
        volume_fraction,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eremenko {
    /// `β_{3/4}(h; B)` for the restriction `h` of the field to `Ω`.
    pub beta_h: f64,
    /// `β_{1/2}(φ; B)`.
    pub beta_phi: f64,
}

/// Growth of the subharmonic restriction against growth of the field.
pub fn eremenko_check<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    table: &ComponentTable,
    position: usize,
    ball: &MetricBall,
) -> Result<Eremenko> {
    if grid.ndim() != 2 {
        return Err(Error::Unsupported(String::from("the subharmonic comparison is 2-D")));
    }
    component_sign(table, position)?;
    let three_quarters = ball.scaled(0.75)?;
    let h_inner = sup_on_region(
        field,
        grid,
        Region::Component {
            table,
            position,
            clip: Some(&three_quarters),
        },
    )
    .map_err(|_| Error::EmptyRegion(String::from("component misses B_{3/4}")))?;
    let h_outer = sup_on_region(
        field,
        grid,
        Region::Component {
            table,
            position,
            clip: Some(ball),
        },
    )?;
    let beta_phi = growth_exponent(field, grid, ball, 0.5)?.beta;
    Ok(Eremenko {
        beta_h: log_ratio(h_outer.refined, h_inner.refined),
        beta_phi,
    })
}

/// Frozen linear bound `β_h ≤ c1 β_φ + c2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearBound {
    pub c1: f64,
    pub c2: f64,
}

impl LinearBound {
    pub fn residual(&self, e: &Eremenko) -> f64 {
        e.beta_h - (self.c1 * e.beta_phi + self.c2)
    }

    /// Tightest line with nonnegative slope lying on or above every point
    /// (least total gap), then widened by a relative slope margin and an
    /// additive intercept margin.
    pub fn fit(points: &[(f64, f64)], slope_margin: f64, intercept_margin: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid(String::from("empty calibration set")));
        }
        let above = |c1: f64, c2: f64| points.iter().all(|&(x, y)| c1 * x + c2 >= y - 1e-12);
        let gap = |c1: f64, c2: f64| points.iter().map(|&(x, y)| c1 * x + c2 - y).sum::<f64>();
        let ymax = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let mut best = (0.0, ymax);
        let mut best_gap = gap(best.0, best.1);
        for (i, &(x1, y1)) in points.iter().enumerate() {
            for &(x2, y2) in &points[i + 1..] {
                if (x2 - x1).abs() < 1e-12 {
                    continue;
                }
                let c1 = (y2 - y1) / (x2 - x1);
                let c2 = y1 - c1 * x1;
                if c1 >= 0.0 && above(c1, c2) {
                    let g = gap(c1, c2);
                    if g < best_gap {
                        best = (c1, c2);
                        best_gap = g;
                    }
                }
            }
        }
        Ok(LinearBound {
            c1: best.0 * (1.0 + slope_margin),
            c2: best.1 + intercept_margin,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeBound {
    pub volume_fraction: f64,
    pub beta_half: f64,
    pub beta_prime_half: f64,
    /// `(|Ω|/|B|) · β'_{1/2}(φ; B)`.
    pub product: f64,
}

/// The 2-D volume product of a component meeting `½B`.
pub fn dim2_volume_bound_check<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    table: &ComponentTable,
    position: usize,
    ball: &MetricBall,
) -> Result<VolumeBound> {
    if grid.ndim() != 2 {
        return Err(Error::Unsupported(String::from("the volume product check is 2-D")));
    }
    component_sign(table, position)?;
    let half = ball.scaled(0.5)?;
    if component_measure_in(grid, table, position, Some(&half)) == 0.0 {
        return Err(Error::EmptyRegion(String::from("component misses the half ball")));
    }
    let volume_fraction =
        component_measure_in(grid, table, position, Some(ball)) / cells_in_ball(grid, ball).measure;
    let beta_half = growth_exponent(field, grid, ball, 0.5)?.beta;
    let beta_prime_half = beta_prime(beta_half);
    Ok(VolumeBound {
        volume_fraction,
        beta_half,
        beta_prime_half,
        product: volume_fraction * beta_prime_half,
    })
}
