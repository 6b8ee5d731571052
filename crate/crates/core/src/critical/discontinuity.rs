//! Grid-sampled discontinuity sets of reduced size functions and the
//! pseudodistance `d_D` built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::extended::ExtendedReal;
use crate::foliation::{reduce_measuring, AdmissiblePair};
use crate::size_pair::SizeGraph;
use crate::sublevel::{cornerpoints, evaluate_from_series, FormalSeries};

/// An `n_grid × n_grid` lattice over `s_range × t_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_grid: usize,
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
}

impl Grid {
    pub fn new(n_grid: usize, s_range: (f64, f64), t_range: (f64, f64)) -> Result<Self> {
        let grid = Self {
            n_grid,
            s_range,
            t_range,
        };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.n_grid < 2 {
            return Err(Error::precondition(format!("n_grid must be at least 2, got {}", self.n_grid)));
        }
        for (name, (lo, hi)) in [("s", self.s_range), ("t", self.t_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::precondition(format!("invalid {name} range {lo}:{hi}")));
            }
        }
        if self.s(0) >= self.t(self.n_grid - 1) {
            return Err(Error::precondition("empty admissible grid: no lattice point with s < t"));
        }
        Ok(())
    }

    pub fn s(&self, i: usize) -> f64 {
        lerp(self.s_range, i, self.n_grid)
    }

    pub fn t(&self, j: usize) -> f64 {
        lerp(self.t_range, j, self.n_grid)
    }
}

fn lerp((lo, hi): (f64, f64), i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Midpoints of lattice edges across which `ℓ` changes, in `(s, t)` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscontinuityCloud {
    pub points: Vec<(f64, f64)>,
    pub grid: Grid,
}

impl DiscontinuityCloud {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evaluates the series on the admissible part of the lattice, row by row
/// (`values[j][i]` at `(s_i, t_j)`).
pub fn lattice_values(series: &FormalSeries, grid: &Grid, exec: Execution) -> Result<Vec<Vec<Option<usize>>>> {
    grid.validate()?;
    let rows = exec.map_range(grid.n_grid, |j| {
        let t = grid.t(j);
        (0..grid.n_grid)
            .map(|i| {
                let s = grid.s(i);
                if s < t {
                    evaluate_from_series(series, s, t).ok()
                } else {
                    None
                }
            })
            .collect()
    });
    Ok(rows)
}

/// Discontinuity cloud of a size function given by its cornerpoints.
pub fn cloud_from_series(series: &FormalSeries, grid: &Grid, exec: Execution) -> Result<DiscontinuityCloud> {
    let values = lattice_values(series, grid, exec)?;
    let n = grid.n_grid;
    let mut points = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let Some(here) = values[j][i] else { continue };
            if i + 1 < n {
                if let Some(right) = values[j][i + 1] {
                    if right != here {
                        points.push(((grid.s(i) + grid.s(i + 1)) / 2.0, grid.t(j)));
                    }
                }
            }
            if j + 1 < n {
                if let Some(up) = values[j + 1][i] {
                    if up != here {
                        points.push((grid.s(i), (grid.t(j) + grid.t(j + 1)) / 2.0));
                    }
                }
            }
        }
    }
    Ok(DiscontinuityCloud { points, grid: *grid })
}

/// Discontinuity cloud of `ℓ_(M, F_(l,b))`.
pub fn discontinuity_cloud(
    g: &SizeGraph,
    p: &AdmissiblePair,
    s_range: (f64, f64),
    t_range: (f64, f64),
    n_grid: usize,
) -> Result<DiscontinuityCloud> {
    let grid = Grid::new(n_grid, s_range, t_range)?;
    discontinuity_cloud_with(g, p, &grid, Execution::default())
}

pub fn discontinuity_cloud_with(
    g: &SizeGraph,
    p: &AdmissiblePair,
    grid: &Grid,
    exec: Execution,
) -> Result<DiscontinuityCloud> {
    let f = reduce_measuring(g, p)?;
    cloud_from_series(&cornerpoints(g, &f), grid, exec)
}

/// Symmetric Hausdorff distance between two finite planar point sets.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)], exec: Execution) -> ExtendedReal {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return ExtendedReal::Finite(0.0),
        (true, false) | (false, true) => return ExtendedReal::Infinity,
        _ => {}
    }
    ExtendedReal::Finite(directed(a, b, exec).max(directed(b, a, exec)))
}

fn directed(a: &[(f64, f64)], b: &[(f64, f64)], exec: Execution) -> f64 {
    exec.map(a, |&(x, y)| {
        b.iter()
            .map(|&(u, v)| (x - u).hypot(y - v))
            .fold(f64::INFINITY, f64::min)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Lattice options for [`hausdorff_dd`]; missing ranges default to the value
/// span of both reduced functions padded by 10% on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdGrid {
    pub n_grid: usize,
    pub s_range: Option<(f64, f64)>,
    pub t_range: Option<(f64, f64)>,
}

impl Default for DdGrid {
    fn default() -> Self {
        Self {
            n_grid: 200,
            s_range: None,
            t_range: None,
        }
    }
}

/// `d_D`: the largest, over the given half-planes, Hausdorff distance between
/// the two discontinuity clouds computed on a shared lattice.
pub fn hausdorff_dd(
    g1: &SizeGraph,
    g2: &SizeGraph,
    pairs: &[AdmissiblePair],
    grid: &DdGrid,
    exec: Execution,
) -> Result<ExtendedReal> {
    if g1.k() != g2.k() {
        return Err(Error::DimensionMismatch {
            expected: g1.k(),
            found: g2.k(),
        });
    }
    if pairs.is_empty() {
        return Err(Error::precondition("d_D needs at least one admissible pair"));
    }
    let per_pair = exec.map(pairs, |p| -> Result<ExtendedReal> {
        let f1 = reduce_measuring(g1, p)?;
        let f2 = reduce_measuring(g2, p)?;
        let lo = [f1.min(), f2.min()].into_iter().flatten().fold(f64::INFINITY, f64::min);
        let hi = [f1.max(), f2.max()].into_iter().flatten().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
        let pad = if hi > lo { 0.1 * (hi - lo) } else { 0.5 };
        let span = (lo - pad, hi + pad);
        let lattice = Grid::new(grid.n_grid, grid.s_range.unwrap_or(span), grid.t_range.unwrap_or(span))?;
        let c1 = cloud_from_series(&cornerpoints(g1, &f1), &lattice, Execution::Sequential)?;
        let c2 = cloud_from_series(&cornerpoints(g2, &f2), &lattice, Execution::Sequential)?;
        Ok(hausdorff(&c1.points, &c2.points, Execution::Sequential))
    });
    let mut worst = ExtendedReal::Finite(0.0);
    for d in per_pair {
        worst = worst.max(d?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sublevel::ScalarField;

    fn w_path() -> SizeGraph {
        SizeGraph::scalar(&[0.0, 2.0, 1.0, 2.0, 0.0], &[[0, 1], [1, 2], [2, 3], [3, 4]]).unwrap()
    }

    #[test]
    fn w_path_cloud_on_jump_lines() {
        let g = w_path();
        let cloud = discontinuity_cloud(&g, &AdmissiblePair::identity(), (-0.5, 2.5), (-0.5, 2.5), 61).unwrap();
        assert!(!cloud.is_empty());
        let h = 3.0 / 60.0;
        for &(s, t) in &cloud.points {
            let near_s = [0.0, 1.0].iter().any(|&c| (s - c).abs() <= h);
            let near_t = (t - 2.0).abs() <= h;
            assert!(near_s || near_t, "({s}, {t})");
        }
        assert!(cloud.points.iter().any(|&(s, _)| (s - 1.0).abs() <= h));
        assert!(cloud.points.iter().any(|&(_, t)| (t - 2.0).abs() <= h));
    }

    #[test]
    fn constant_region_has_empty_cloud() {
        let g = w_path();
        let cloud = discontinuity_cloud(&g, &AdmissiblePair::identity(), (0.1, 0.9), (2.1, 2.9), 20).unwrap();
        assert!(cloud.is_empty());
    }

    #[test]
    fn flagged_edges_change_value() {
        let g = w_path();
        let f = ScalarField::from_scalar_graph(&g).unwrap();
        let series = cornerpoints(&g, &f);
        let grid = Grid::new(37, (-0.5, 2.5), (-0.5, 3.5)).unwrap();
        let cloud = cloud_from_series(&series, &grid, Execution::Sequential).unwrap();
        assert!(!cloud.is_empty());
        let n = grid.n_grid;
        let index_of = |x: f64, r: (f64, f64)| (x - r.0) / (r.1 - r.0) * (n - 1) as f64;
        let eval = |s: f64, t: f64| evaluate_from_series(&series, s, t).unwrap();
        for &(s, t) in &cloud.points {
            let (si, ti) = (index_of(s, grid.s_range), index_of(t, grid.t_range));
            let (a, b) = if (si - si.round()).abs() < 1e-9 {
                let j = (ti - 0.5).round() as usize;
                (eval(s, grid.t(j)), eval(s, grid.t(j + 1)))
            } else {
                let i = (si - 0.5).round() as usize;
                (eval(grid.s(i), t), eval(grid.s(i + 1), t))
            };
            assert_ne!(a, b, "({s}, {t})");
        }
    }

    #[test]
    fn bad_grids_rejected() {
        let g = w_path();
        let id = AdmissiblePair::identity();
        assert!(discontinuity_cloud(&g, &id, (0.0, 1.0), (0.0, 1.0), 1).is_err());
        assert!(discontinuity_cloud(&g, &id, (2.0, 3.0), (0.0, 1.0), 5).is_err());
        assert!(discontinuity_cloud(&g, &id, (1.0, 0.0), (0.0, 1.0), 5).is_err());
    }

    #[test]
    fn hausdorff_conventions() {
        let a = [(0.0, 0.0), (1.0, 0.0)];
        let b = [(0.0, 0.5)];
        assert_eq!(hausdorff(&a, &b, Execution::Sequential), ExtendedReal::Finite(1.25f64.sqrt()));
        assert_eq!(hausdorff(&a, &[], Execution::Sequential), ExtendedReal::Infinity);
        assert_eq!(hausdorff(&[], &[], Execution::Sequential), ExtendedReal::Finite(0.0));
    }

    #[test]
    fn dd_of_identical_graphs_is_zero() {
        let g = w_path();
        let pairs = [AdmissiblePair::identity()];
        let d = hausdorff_dd(&g, &g, &pairs, &DdGrid { n_grid: 40, ..DdGrid::default() }, Execution::Parallel).unwrap();
        assert_eq!(d, ExtendedReal::Finite(0.0));
    }
}
