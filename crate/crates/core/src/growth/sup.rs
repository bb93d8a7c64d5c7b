use rayon::prelude::*;
use serde::Serialize;

use crate::domain::DomainKind;
use crate::eigen::ScalarFn;
use crate::error::{Error, Result};
use crate::grid::{cells_in_ball, MetricBall, SampleGrid};
use crate::nodal::ComponentTable;

/// Cells considered in a sup; sub-cell samples taken during refinement are
/// kept inside `clip` and, where the grid can locate points, inside the
/// region itself.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    All,
    Ball(&'a MetricBall),
    /// A component of a table built on the same grid, optionally cut by a
    /// ball. Values are taken with the component's sign (negative parts
    /// count as zero).
    Component {
        table: &'a ComponentTable,
        position: usize,
        clip: Option<&'a MetricBall>,
    },
    Cells {
        cells: &'a [usize],
        clip: Option<&'a MetricBall>,
    },
}

/// Grid maximum of `|φ|` (or of the signed part on a component) with a
/// refined estimate and a heuristic upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupEstimate {
    /// Max over region cell centers.
    pub value: f64,
    /// Max after sampling a quarter-cell sub-lattice around the largest
    /// local maxima among the cells.
    pub refined: f64,
    /// `refined` plus the largest sub-lattice step variation times `√n/2`.
    pub upper: f64,
    /// Cell attaining `value`.
    pub cell: usize,
}

const REFINE_TOP: usize = 32;
const SUBSTEPS: i32 = 4;
const CANDIDATES: usize = 4096;

enum Membership<'a> {
    Any,
    Label(&'a ComponentTable, u32),
    Mask(Vec<bool>),
}

pub fn sup_on_region<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    region: Region<'_>,
) -> Result<SupEstimate> {
    let domain = grid.domain();
    let m = domain.ambient_dim();
    let unit = (domain.kind == DomainKind::Ball && grid.patch_ball().is_none())
        .then(|| MetricBall::new(domain, &[0.0; 3][..m], 1.0))
        .transpose()?;
    let (cells, clip, sign, membership): (Vec<usize>, Option<&MetricBall>, Option<i8>, Membership) =
        match region {
            Region::All => ((0..grid.len()).collect(), unit.as_ref(), None, Membership::Any),
            Region::Ball(b) => (cells_in_ball(grid, b).cells, Some(b), None, Membership::Any),
            Region::Component {
                table,
                position,
                clip,
            } => {
                let sign = table
                    .components
                    .get(position)
                    .ok_or_else(|| Error::Range(format!("component position {position}")))?
                    .sign;
                let cells = table
                    .cells_of(position)
                    .into_iter()
                    .filter(|&c| clip.is_none_or(|b| b.contains(&grid.point(c)[..m])))
                    .collect();
                let clip = clip.or(table.ball.as_ref()).or(unit.as_ref());
                (cells, clip, Some(sign), Membership::Label(table, position as u32))
            }
            Region::Cells { cells, clip } => {
                let mut mask = vec![false; grid.len()];
                cells.iter().for_each(|&c| mask[c] = true);
                let mut cells = cells.to_vec();
                cells.sort_unstable();
                cells.dedup();
                (cells, clip.or(unit.as_ref()), None, Membership::Mask(mask))
            }
        };
    if cells.is_empty() {
        return Err(Error::EmptyRegion(String::from("sup over an empty region")));
    }
    let g = |x: &[f64]| {
        let v = field.eval(&x[..m]);
        match sign {
            Some(s) => (f64::from(s) * v).max(0.0),
            None => v.abs(),
        }
    };
    let values: Vec<f64> = cells.par_iter().map(|&c| g(&grid.point(c))).collect();
    // Local maxima among the largest cells, so that separate peaks are all
    // refined.
    let mut order: Vec<usize> = (0..cells.len()).collect();
    if order.len() > CANDIDATES {
        order.select_nth_unstable_by(CANDIDATES, |&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        order.truncate(CANDIDATES);
    }
    debug_assert!(cells.windows(2).all(|w| w[0] < w[1]));
    let value_of = |c: usize| cells.binary_search(&c).ok().map(|i| values[i]);
    order.retain(|&i| grid.neighbors(cells[i]).all(|nb| value_of(nb).is_none_or(|v| v <= values[i])));
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let best = order[0];
    let (value, cell) = (values[best], cells[best]);

    // Membership is only checked where the grid can locate points.
    let can_locate = grid.locate(&grid.point(0)[..m]).is_some();
    let admissible = |x: &[f64]| match &membership {
        Membership::Any => true,
        Membership::Label(t, p) => grid.locate(x).map_or(!can_locate, |c| t.labels()[c] == *p),
        Membership::Mask(mask) => grid.locate(x).map_or(!can_locate, |c| mask[c]),
    };
    let n = grid.ndim();
    let side = (2 * SUBSTEPS + 1) as usize;
    let total = side.pow(n as u32);
    let refinements: Vec<(f64, f64)> = order
        .iter()
        .take(REFINE_TOP)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| {
            let p = grid.center_params(cells[i]);
            let mut samples = vec![f64::NAN; total];
            for (s, slot) in samples.iter_mut().enumerate() {
                let mut q = p;
                let mut rest = s;
                for qa in q.iter_mut().take(n) {
                    let o = (rest % side) as i32 - SUBSTEPS;
                    rest /= side;
                    *qa += f64::from(o) / f64::from(SUBSTEPS);
                }
                let mut x = grid.point_at(&q);
                if let Some(b) = clip {
                    x = b.clamp(&x[..m]);
                }
                if admissible(&x[..m]) {
                    *slot = g(&x);
                }
            }
            let top = samples.iter().copied().filter(|v| !v.is_nan()).fold(0.0, f64::max);
            let mut step = 0.0f64;
            for s in 0..total {
                let mut stride = 1;
                for _ in 0..n {
                    if (s / stride) % side + 1 < side {
                        let (a, b) = (samples[s], samples[s + stride]);
                        if !a.is_nan() && !b.is_nan() {
                            step = step.max((a - b).abs());
                        }
                    }
                    stride *= side;
                }
            }
            (top, step)
        })
        .collect();
    let refined = refinements.iter().fold(value, |a, r| a.max(r.0));
    let step = refinements.iter().fold(0.0f64, |a, r| a.max(r.1));
    Ok(SupEstimate {
        value,
        refined,
        upper: refined + step * (n as f64).sqrt() / 2.0,
        cell,
    })
}
