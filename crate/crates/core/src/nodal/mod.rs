//! Sign labeling and connected-component decomposition of fields sampled on
//! grids, restricted to balls where requested, with contact and cross-section
//! queries on the resulting components.

mod label;
mod union_find;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use label::{label_components, label_in_cells, local_components};

use crate::domain::DomainKind;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::grid::{MetricBall, SampleGrid};

/// Threshold for the zero class of a sign labeling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum ZeroTol {
    /// Multiple of the sup of `|field|` over the labeled cells.
    Relative(f64),
    Absolute(f64),
}

impl Default for ZeroTol {
    fn default() -> Self {
        ZeroTol::Relative(1e-12)
    }
}

/// How same-sign cells are joined into components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    /// Union of face-adjacent same-sign cells.
    #[default]
    Plain,
    /// Face adjacency restricted to cells whose sign is stable across the
    /// whole cell (first-order estimate); the remaining cells are attached to
    /// an adjacent component afterwards and never bridge two components.
    /// Prevents merges through multiple crossings of nodal lines that are
    /// finer than the lattice.
    Resolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelOptions {
    pub zero_tol: ZeroTol,
    pub connectivity: Connectivity,
    /// Margin factor of the sign-stability test in resolved mode.
    pub safety: f64,
}

impl Default for LabelOptions {
    fn default() -> Self {
        LabelOptions {
            zero_tol: ZeroTol::default(),
            connectivity: Connectivity::Plain,
            safety: 2.0,
        }
    }
}

impl LabelOptions {
    pub fn with_zero_tol(mut self, zero_tol: ZeroTol) -> Self {
        self.zero_tol = zero_tol;
        self
    }

    pub fn resolved(mut self) -> Self {
        self.connectivity = Connectivity::Resolved;
        self
    }
}

/// Per-cell sign in {−1, 0, +1} under an absolute threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct SignLabeling {
    pub signs: Vec<i8>,
    pub zero_tol: f64,
}

impl SignLabeling {
    pub fn from_values(values: &[f64], tol: f64) -> Self {
        let signs = values
            .iter()
            .map(|&v| {
                if v > tol {
                    1
                } else if v < -tol {
                    -1
                } else {
                    0
                }
            })
            .collect();
        SignLabeling {
            signs,
            zero_tol: tol,
        }
    }
}

/// Absolute tolerance for a set of sampled values.
pub fn resolve_tolerance(tol: ZeroTol, values: impl Iterator<Item = f64>) -> f64 {
    match tol {
        ZeroTol::Absolute(t) => t,
        ZeroTol::Relative(r) => r * values.fold(0.0f64, |m, v| m.max(v.abs())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    /// Smallest cell index in the component.
    pub id: usize,
    pub sign: i8,
    pub volume: f64,
    pub cell_count: usize,
    /// Some cell center lies in the concentric half ball.
    pub meets_half_ball: bool,
    /// Some cell borders a cell outside the ball.
    pub touches_ball_boundary: bool,
    /// The component is a whole nodal domain lying inside the ball.
    pub contained_in_ball: bool,
    /// Some cell lies within half a cell diagonal of the boundary of a ball
    /// domain.
    pub touches_domain_boundary: bool,
    /// Smallest distance from a cell center to the ball center.
    pub min_center_distance: f64,
}

pub const UNLABELED: u32 = u32::MAX;

/// Result of a nodal decomposition on one grid.
#[derive(Clone, Debug)]
pub struct ComponentTable {
    pub field_id: String,
    /// Cell to component position (`UNLABELED` for zero-class cells and
    /// cells outside the scanned region).
    labels: Vec<u32>,
    pub components: Vec<Component>,
    pub zero_tol: f64,
    pub region_cells: usize,
    pub region_measure: f64,
    /// Zero-class cells plus, in resolved mode, nonzero cells not attached
    /// to any sign-stable component.
    pub unlabeled_measure: f64,
    /// The second part of `unlabeled_measure`.
    pub unresolved_measure: f64,
    pub pitch: f64,
    pub ball: Option<MetricBall>,
}

impl ComponentTable {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Position in `components` of the component owning a cell.
    pub fn label(&self, cell: usize) -> Option<usize> {
        match self.labels[cell] {
            UNLABELED => None,
            l => Some(l as usize),
        }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn component_by_id(&self, id: usize) -> Option<&Component> {
        self.components
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.components[i])
    }

    /// Cells of the component at a position, in increasing order.
    pub fn cells_of(&self, position: usize) -> Vec<usize> {
        let p = position as u32;
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(c, &l)| (l == p).then_some(c))
            .collect()
    }

    pub fn count_by_sign(&self, sign: i8) -> usize {
        self.components.iter().filter(|c| c.sign == sign).count()
    }

    /// Components meeting the half ball (all components when no ball is set).
    pub fn meeting_half_ball(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.meets_half_ball)
    }

    /// Writes one CSV row per component.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "field_id,component_id,sign,volume,cell_count,meets_half_ball,\
             touches_ball_boundary,contained_in_ball,touches_domain_boundary"
        )?;
        for c in &self.components {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                self.field_id,
                c.id,
                c.sign,
                fmt_f64(c.volume),
                c.cell_count,
                c.meets_half_ball,
                c.touches_ball_boundary,
                c.contained_in_ball,
                c.touches_domain_boundary
            )?;
        }
        Ok(())
    }
}

/// Ids of components owning a cell within `contact_radius` of `point`.
///
/// The radius must be at least two grid pitches.
pub fn components_touching_point(
    table: &ComponentTable,
    grid: &SampleGrid,
    point: &[f64],
    contact_radius: f64,
) -> Result<Vec<usize>> {
    if contact_radius < 2.0 * grid.pitch() * (1.0 - 1e-12) {
        return Err(Error::Invalid(format!(
            "contact radius {contact_radius} below two grid pitches ({})",
            2.0 * grid.pitch()
        )));
    }
    let domain = grid.domain();
    let m = domain.ambient_dim();
    let mut positions: Vec<usize> = (0..grid.len())
        .filter_map(|c| {
            let l = table.label(c)?;
            (domain.distance(point, &grid.point(c)[..m]) < contact_radius).then_some(l)
        })
        .collect();
    positions.sort_unstable();
    positions.dedup();
    Ok(positions.into_iter().map(|p| table.components[p].id).collect())
}

/// Largest slice measures of components in hyperplanes normal to a lattice
/// axis of a whole-torus grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSections {
    pub axis: usize,
    /// Per component (same order as the table), the largest slice measure.
    pub per_component: Vec<f64>,
    pub max: f64,
}

pub fn cross_section_bound(
    table: &ComponentTable,
    grid: &SampleGrid,
    axis: usize,
) -> Result<CrossSections> {
    let domain = grid.domain();
    if domain.kind != DomainKind::Torus || grid.patch_ball().is_some() {
        return Err(Error::Unsupported(format!(
            "cross sections need a whole-torus grid, got {domain}"
        )));
    }
    let n = grid.ndim();
    if axis >= n {
        return Err(Error::Range(format!("axis {axis} on a {n}-dimensional grid")));
    }
    let res = grid.shape()[axis];
    let mut counts = vec![0u64; table.len() * res];
    for c in 0..grid.len() {
        if let Some(l) = table.label(c) {
            counts[l * res + grid.multi_index(c)[axis]] += 1;
        }
    }
    let slice_cell = (grid.resolution() as f64).powi(1 - n as i32);
    let per_component: Vec<f64> = counts
        .chunks(res)
        .map(|row| *row.iter().max().unwrap_or(&0) as f64 * slice_cell)
        .collect();
    let max = per_component.iter().copied().fold(0.0, f64::max);
    Ok(CrossSections {
        axis,
        per_component,
        max,
    })
}
