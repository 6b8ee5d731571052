//! Checks that every finite cornerpoint coordinate of a reduced size function
//! sits at a pseudocritical or special value.

use std::collections::BTreeMap;

use serde::Serialize;

use super::gradient::MeshGeometry;
use super::pseudocritical::{
    lb_pseudocritical_with, pseudocritical_projection_with, ProjectionIndex, Tolerances,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::foliation::{reduce_measuring, AdmissiblePair};
use crate::size_pair::SizeGraph;
use crate::sublevel::{cornerpoints, FormalSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Abscissa (birth) of a cornerpoint.
    Birth,
    /// Ordinate (death) of a proper cornerpoint.
    Death,
}

/// Explanation of one cornerpoint coordinate `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateCheck {
    pub pair: usize,
    pub cornerpoint: usize,
    pub axis: Axis,
    pub value: f64,
    /// Distance from `v` to the nearest pseudocritical or special `F`-value.
    pub distance: f64,
    /// Vertex realizing `distance`.
    pub nearest_vertex: Option<usize>,
    /// First projection `ρ` (smallest first) with a pseudocritical or special
    /// vertex `Q` such that `|v·l_i + b_i − φ_i(Q)| ≤ tau_match` for all `i ∈ ρ`.
    pub projection: Option<ProjectionIndex>,
    pub projection_vertex: Option<usize>,
    /// Largest componentwise gap for the best projection candidate found.
    pub projection_error: f64,
    pub explained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairLocalization {
    pub l: Vec<f64>,
    pub b: Vec<f64>,
    pub cornerpoints: FormalSeries,
    pub pseudocritical_count: usize,
    pub coordinates: Vec<CoordinateCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub tolerances: Tolerances,
    pub pairs: Vec<PairLocalization>,
    pub special: BTreeMap<usize, Vec<usize>>,
    pub unexplained: Vec<CoordinateCheck>,
}

impl LocalizationReport {
    pub fn all_explained(&self) -> bool {
        self.unexplained.is_empty()
    }

    pub fn coordinate_count(&self) -> usize {
        self.pairs.iter().map(|p| p.coordinates.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Candidate vertices for one projection: its pseudocritical vertices plus the
/// special vertices of its components.
struct ProjectionCandidates {
    rho: ProjectionIndex,
    vertices: Vec<usize>,
}

/// Runs the localization check on every pair.
pub fn check_discontinuity_localization(
    g: &SizeGraph,
    pairs: &[AdmissiblePair],
    tol: &Tolerances,
    exec: Execution,
) -> Result<LocalizationReport> {
    tol.validate()?;
    let geom = MeshGeometry::new(g)?;
    let projections = ProjectionIndex::all(g.k())?;
    let special: BTreeMap<usize, Vec<usize>> =
        (0..g.k()).map(|j| (j, geom.special_points(j, tol.tau_s))).collect();
    let mut special_union: Vec<usize> = special.values().flatten().copied().collect();
    special_union.sort_unstable();
    special_union.dedup();

    let candidates = projections
        .iter()
        .map(|rho| {
            let report = pseudocritical_projection_with(&geom, g, rho, tol, exec)?;
            let mut vertices = report.flagged_vertices();
            for &j in rho.indices() {
                vertices.extend_from_slice(&special[&j]);
            }
            vertices.sort_unstable();
            vertices.dedup();
            Ok(ProjectionCandidates {
                rho: rho.clone(),
                vertices,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let per_pair = exec.map_range(pairs.len(), |index| {
        localize_pair(g, &geom, &pairs[index], index, tol, &special_union, &candidates)
    });
    let pairs = per_pair.into_iter().collect::<Result<Vec<_>>>()?;
    let unexplained = pairs
        .iter()
        .flat_map(|p| p.coordinates.iter().filter(|c| !c.explained).cloned())
        .collect();
    Ok(LocalizationReport {
        tolerances: *tol,
        pairs,
        special,
        unexplained,
    })
}

fn localize_pair(
    g: &SizeGraph,
    geom: &MeshGeometry,
    p: &AdmissiblePair,
    index: usize,
    tol: &Tolerances,
    special_union: &[usize],
    candidates: &[ProjectionCandidates],
) -> Result<PairLocalization> {
    let f = reduce_measuring(g, p)?;
    let series = cornerpoints(g, &f);
    let lb = lb_pseudocritical_with(geom, g, p, tol, Execution::Sequential)?;

    // (value, vertex) sorted by value
    let mut values: Vec<(f64, usize)> = lb
        .pseudocritical
        .iter()
        .map(|w| (f.values()[w.vertex], w.vertex))
        .chain(special_union.iter().map(|&v| (f.values()[v], v)))
        .collect();
    values.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut coordinates = Vec::new();
    for (ci, cp) in series.points().iter().enumerate() {
        let mut coords = vec![(Axis::Birth, cp.x)];
        if let Some(y) = cp.y.finite() {
            coords.push((Axis::Death, y));
        }
        for (axis, v) in coords {
            let (distance, nearest_vertex) = nearest_value(&values, v);
            let (projection, projection_vertex, projection_error) =
                explain_by_projection(g, p, v, tol.tau_match, candidates);
            coordinates.push(CoordinateCheck {
                pair: index,
                cornerpoint: ci,
                axis,
                value: v,
                distance,
                nearest_vertex,
                explained: distance <= tol.tau_match && projection.is_some(),
                projection,
                projection_vertex,
                projection_error,
            });
        }
    }
    Ok(PairLocalization {
        l: p.l().to_vec(),
        b: p.b().to_vec(),
        cornerpoints: series,
        pseudocritical_count: lb.pseudocritical.len(),
        coordinates,
    })
}

fn nearest_value(sorted: &[(f64, usize)], v: f64) -> (f64, Option<usize>) {
    let at = sorted.partition_point(|e| e.0 < v);
    [at.checked_sub(1), Some(at)]
        .into_iter()
        .flatten()
        .filter_map(|i| sorted.get(i))
        .map(|&(w, vertex)| ((w - v).abs(), Some(vertex)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap_or((f64::INFINITY, None))
}

/// Searches the projections (smallest first) for a vertex whose projected
/// measuring values match the plane point `x⃗ = v·l⃗ + b⃗` on `ρ`.
fn explain_by_projection(
    g: &SizeGraph,
    p: &AdmissiblePair,
    v: f64,
    tau_match: f64,
    candidates: &[ProjectionCandidates],
) -> (Option<ProjectionIndex>, Option<usize>, f64) {
    let x: Vec<f64> = p.l().iter().zip(p.b()).map(|(l, b)| v * l + b).collect();
    let mut best = (None, None, f64::INFINITY);
    for cand in candidates {
        for &q in &cand.vertices {
            let err = cand
                .rho
                .indices()
                .iter()
                .map(|&i| (x[i] - g.value(q, i)).abs())
                .fold(0.0, f64::max);
            if err < best.2 {
                best = (None, Some(q), err);
            }
            if err <= tau_match {
                return (Some(cand.rho.clone()), Some(q), err);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{flat_grid, icosphere, mesh_size_graph, Measure};
    use crate::size_pair::mesh_pair_from_parts;

    #[test]
    fn sphere_abs_xz_central_plane() {
        let g = mesh_size_graph(&icosphere(3), Measure::AbsXZ).unwrap();
        let h = 0.5f64.sqrt();
        let pair = AdmissiblePair::new(vec![h, h], vec![0.0, 0.0]).unwrap();
        let report = check_discontinuity_localization(&g, &[pair], &Tolerances::default(), Execution::Parallel).unwrap();
        assert!(report.coordinate_count() > 0);
        assert!(report.all_explained(), "{:#?}", report.unexplained);
    }

    #[test]
    fn constant_field_single_cornerline() {
        let mesh = flat_grid(4, 4, (0.0, 1.0), (0.0, 1.0));
        let n = mesh.positions.len();
        let g = mesh_pair_from_parts(mesh, vec![vec![0.7]; n]).unwrap();
        let report =
            check_discontinuity_localization(&g, &[AdmissiblePair::identity()], &Tolerances::default(), Execution::Sequential)
                .unwrap();
        let pair = &report.pairs[0];
        assert_eq!(pair.cornerpoints.points().len(), 1);
        assert!(pair.cornerpoints.points()[0].is_cornerline());
        assert_eq!(pair.pseudocritical_count, g.n_vertices());
        assert!(report.all_explained());
    }

    #[test]
    fn k1_coordinates_are_flagged_values() {
        // two bumps: minima at the corners, a saddle in between
        let mesh = flat_grid(21, 11, (-2.0, 2.0), (-1.0, 1.0));
        let rows = mesh
            .positions
            .iter()
            .map(|p| vec![(p[0] * p[0] - 1.0).powi(2) + p[1] * p[1]])
            .collect();
        let g = mesh_pair_from_parts(mesh, rows).unwrap();
        let tol = Tolerances::default();
        let report =
            check_discontinuity_localization(&g, &[AdmissiblePair::identity()], &tol, Execution::Sequential).unwrap();
        let lb = lb_pseudocritical_with(&MeshGeometry::new(&g).unwrap(), &g, &AdmissiblePair::identity(), &tol, Execution::Sequential)
            .unwrap()
            .pseudocritical_values();
        for c in &report.pairs[0].coordinates {
            assert!(lb.contains(&c.value), "{} not a flagged value", c.value);
        }
        assert!(report.all_explained());
    }

    #[test]
    fn zero_tolerance_leaves_coordinates_unexplained() {
        let g = mesh_size_graph(&icosphere(2), Measure::AbsXZ).unwrap();
        let pair = AdmissiblePair::new(vec![0.6, 0.8], vec![0.05, -0.05]).unwrap();
        let tol = Tolerances {
            tau_match: 0.0,
            ..Tolerances::default()
        };
        let report = check_discontinuity_localization(&g, &[pair], &tol, Execution::Sequential).unwrap();
        assert!(!report.all_explained());
    }
}
