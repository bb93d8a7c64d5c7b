use rayon::prelude::*;

use super::union_find::UnionFind;
use super::{
    resolve_tolerance, Component, ComponentTable, Connectivity, LabelOptions, SignLabeling,
    UNLABELED,
};
use crate::domain::DomainKind;
use crate::eigen::ScalarFn;
use crate::error::{Error, Result};
use crate::grid::{cells_in_ball, MetricBall, SampleGrid};

/// Nodal decomposition of a field over a whole grid.
pub fn label_components<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    opts: &LabelOptions,
) -> Result<ComponentTable> {
    label_in_cells(field, grid, None, None, opts)
}

/// Decomposition of `{φ ≠ 0} ∩ B`, with ball contact flags.
pub fn local_components<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    ball: &MetricBall,
    opts: &LabelOptions,
) -> Result<ComponentTable> {
    let hit = cells_in_ball(grid, ball);
    if hit.empty {
        return Err(Error::EmptyRegion(format!(
            "ball of radius {} contains no cell centers",
            ball.radius()
        )));
    }
    label_in_cells(field, grid, Some(&hit.cells), Some(ball), opts)
}

/// Decomposition restricted to a set of cells (all cells when `None`).
/// Ball flags are computed when `ball` is given.
pub fn label_in_cells<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    cells: Option<&[usize]>,
    ball: Option<&MetricBall>,
    opts: &LabelOptions,
) -> Result<ComponentTable> {
    let n = grid.len();
    let m = grid.domain().ambient_dim();
    let region: Vec<usize> = match cells {
        Some(c) => {
            let mut c = c.to_vec();
            c.sort_unstable();
            c.dedup();
            c
        }
        None => (0..n).collect(),
    };
    if region.is_empty() {
        return Err(Error::EmptyRegion(String::from("no cells to label")));
    }
    let mut in_region = vec![false; n];
    region.iter().for_each(|&c| in_region[c] = true);

    let values: Vec<f64> = region
        .par_iter()
        .map(|&c| field.eval(&grid.point(c)[..m]))
        .collect();
    let tol = resolve_tolerance(opts.zero_tol, values.iter().copied());
    let local = SignLabeling::from_values(&values, tol);
    let mut sign = vec![0i8; n];
    for (&c, &s) in region.iter().zip(&local.signs) {
        sign[c] = s;
    }
    if local.signs.iter().all(|&s| s == 0) {
        return Err(Error::AllZero(tol));
    }

    let key = match opts.connectivity {
        Connectivity::Plain => plain_keys(grid, &region, &sign),
        Connectivity::Resolved => {
            let core = stable_cells(field, grid, &region, &values, &sign, opts.safety);
            resolved_keys(grid, &region, &sign, &core)
        }
    };

    // Positions in order of first (smallest) cell.
    let mut position = vec![UNLABELED; n];
    let mut labels = vec![UNLABELED; n];
    let mut components: Vec<Component> = Vec::new();
    let half = ball.map(|b| 0.5 * b.radius());
    let is_ball_domain = grid.domain().kind == DomainKind::Ball;
    let edge_margin = 0.5 * grid.pitch() * (grid.ndim() as f64).sqrt();
    let (mut region_measure, mut unlabeled_measure, mut unresolved_measure) = (0.0, 0.0, 0.0);
    for &c in &region {
        let w = grid.cell_measure(c);
        region_measure += w;
        if sign[c] == 0 || key[c] == UNLABELED {
            unlabeled_measure += w;
            if sign[c] != 0 {
                unresolved_measure += w;
            }
            continue;
        }
        let k = key[c] as usize;
        if position[k] == UNLABELED {
            position[k] = components.len() as u32;
            components.push(Component {
                id: c,
                sign: sign[c],
                volume: 0.0,
                cell_count: 0,
                meets_half_ball: ball.is_none(),
                touches_ball_boundary: false,
                contained_in_ball: true,
                touches_domain_boundary: false,
                min_center_distance: if ball.is_some() { f64::INFINITY } else { 0.0 },
            });
        }
        let p = position[k];
        labels[c] = p;
        let comp = &mut components[p as usize];
        comp.volume += w;
        comp.cell_count += 1;
        let x = grid.point(c);
        if let (Some(b), Some(half)) = (ball, half) {
            let d = b.distance_to_center(&x[..m]);
            comp.min_center_distance = comp.min_center_distance.min(d);
            comp.meets_half_ball |= d < half;
            if !comp.touches_ball_boundary
                && (grid.on_edge(c) || grid.neighbors(c).any(|nb| !in_region[nb]))
            {
                comp.touches_ball_boundary = true;
                comp.contained_in_ball = false;
            }
        }
        if is_ball_domain && !comp.touches_domain_boundary {
            let r = x[..m].iter().map(|a| a * a).sum::<f64>().sqrt();
            comp.touches_domain_boundary = r + edge_margin >= 1.0;
        }
    }

    Ok(ComponentTable {
        field_id: field.id(),
        labels,
        components,
        zero_tol: tol,
        region_cells: region.len(),
        region_measure,
        unlabeled_measure,
        unresolved_measure,
        pitch: grid.pitch(),
        ball: ball.cloned(),
    })
}

/// Union-find over face-adjacent same-sign cells; returns each cell's root.
fn plain_keys(grid: &SampleGrid, region: &[usize], sign: &[i8]) -> Vec<u32> {
    let mut uf = UnionFind::new(grid.len());
    for &c in region {
        let s = sign[c];
        if s == 0 {
            continue;
        }
        for nb in grid.neighbors(c) {
            if nb > c && sign[nb] == s {
                uf.union(c, nb);
            }
        }
    }
    roots(&mut uf, region, sign)
}

fn roots(uf: &mut UnionFind, region: &[usize], sign: &[i8]) -> Vec<u32> {
    let mut key = vec![UNLABELED; sign.len()];
    for &c in region {
        if sign[c] != 0 {
            key[c] = uf.find(c) as u32;
        }
    }
    key
}

/// Cells whose value exceeds `safety` times the first-order variation of the
/// field across the cell, estimated from central differences at quarter-cell
/// offsets along each lattice axis.
fn stable_cells<F: ScalarFn + ?Sized>(
    field: &F,
    grid: &SampleGrid,
    region: &[usize],
    values: &[f64],
    sign: &[i8],
    safety: f64,
) -> Vec<bool> {
    let n = grid.ndim();
    let m = grid.domain().ambient_dim();
    let flags: Vec<bool> = region
        .par_iter()
        .zip(values)
        .map(|(&c, &v)| {
            if sign[c] == 0 {
                return false;
            }
            let p = grid.center_params(c);
            let mut variation = 0.0;
            for a in 0..n {
                let (mut lo, mut hi) = (p, p);
                lo[a] -= 0.25;
                hi[a] += 0.25;
                let d = field.eval(&grid.point_at(&hi)[..m]) - field.eval(&grid.point_at(&lo)[..m]);
                variation += d.abs();
            }
            v.abs() > safety * variation
        })
        .collect();
    let mut core = vec![false; grid.len()];
    for (&c, f) in region.iter().zip(flags) {
        core[c] = f;
    }
    core
}

/// Joins stable cells by same-sign adjacency, then attaches the remaining
/// nonzero cells layer by layer to an adjacent component of the same sign
/// (smallest root on ties). Cells never reached have no resolvable sign at
/// grid scale and stay unlabeled.
fn resolved_keys(grid: &SampleGrid, region: &[usize], sign: &[i8], core: &[bool]) -> Vec<u32> {
    let n = grid.len();
    let mut uf = UnionFind::new(n);
    for &c in region {
        if !core[c] {
            continue;
        }
        for nb in grid.neighbors(c) {
            if nb > c && core[nb] && sign[nb] == sign[c] {
                uf.union(c, nb);
            }
        }
    }
    let mut key = vec![UNLABELED; n];
    let mut frontier: Vec<usize> = Vec::new();
    for &c in region {
        if core[c] {
            key[c] = uf.find(c) as u32;
            frontier.push(c);
        }
    }
    while !frontier.is_empty() {
        let mut candidates: Vec<usize> = frontier
            .iter()
            .flat_map(|&c| {
                let key = &key;
                grid.neighbors(c)
                    .filter(move |&nb| sign[nb] != 0 && sign[nb] == sign[c] && key[nb] == UNLABELED)
            })
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let assigned: Vec<u32> = candidates
            .iter()
            .map(|&c| {
                grid.neighbors(c)
                    .filter(|&nb| sign[nb] == sign[c] && key[nb] != UNLABELED)
                    .map(|nb| key[nb])
                    .min()
                    .expect("candidate has an assigned neighbor")
            })
            .collect();
        for (&c, k) in candidates.iter().zip(assigned) {
            key[c] = k;
        }
        frontier = candidates;
    }
    key
}
