//! `(l⃗,b⃗)`-pseudocritical and projected (Fritz John) pseudocritical vertices.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::gradient::MeshGeometry;
use super::hull::convex_hull_contains_zero;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::foliation::{normalized_components, AdmissiblePair};
use crate::size_pair::SizeGraph;

/// Largest arity for which all `2^k − 1` projections are enumerated.
pub const MAX_PROJECTION_ARITY: usize = 8;

/// Thresholds used by the pseudocritical and localization tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Active-set slack, relative to `1 + |F(Q)|`.
    pub tau_i: f64,
    /// Hull residual slack, relative to `1 + max candidate gradient norm`.
    pub tau_0: f64,
    /// Gradient-disagreement threshold for special points.
    pub tau_s: f64,
    /// Distance allowed between a cornerpoint coordinate and its explanation.
    pub tau_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_i: 1e-6,
            tau_0: 1e-6,
            tau_s: 0.25,
            tau_match: 0.05,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_i", self.tau_i),
            ("tau_0", self.tau_0),
            ("tau_s", self.tau_s),
            ("tau_match", self.tau_match),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(Error::precondition(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// A projection `ρ(x⃗) = (x_{i₁}, …, x_{i_h})` with `i₁ < … < i_h` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ProjectionIndex(Vec<usize>);

impl ProjectionIndex {
    pub fn new(indices: Vec<usize>, k: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::precondition("projection index set is empty"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition("projection indices must be strictly increasing"));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= k) {
            return Err(Error::precondition(format!("projection index {i} out of range for k = {k}")));
        }
        Ok(Self(indices))
    }

    pub fn full(k: usize) -> Self {
        Self((0..k).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// All non-empty projections, smallest first.
    pub fn all(k: usize) -> Result<Vec<Self>> {
        if k == 0 || k > MAX_PROJECTION_ARITY {
            return Err(Error::precondition(format!(
                "projection search supports 1 ≤ k ≤ {MAX_PROJECTION_ARITY}, got {k}"
            )));
        }
        let mut out: Vec<Self> = (1u32..(1 << k))
            .map(|mask| Self((0..k).filter(|i| mask & (1 << i) != 0).collect()))
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }
}

/// Image of a flagged vertex: `F(Q)` for half-plane tests, `ρ∘φ⃗(Q)` for projections.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum WitnessValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudocriticalWitness {
    pub vertex: usize,
    /// Component indices whose gradients entered the hull test.
    #[serde(rename = "I")]
    pub active: Vec<usize>,
    /// Convex coefficients aligned with `active`.
    pub lambda: Vec<f64>,
    pub residual: f64,
    pub value: WitnessValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudocriticalReport {
    pub pseudocritical: Vec<PseudocriticalWitness>,
    /// Special vertices keyed by component index.
    pub special: BTreeMap<usize, Vec<usize>>,
}

impl PseudocriticalReport {
    pub fn flagged_vertices(&self) -> Vec<usize> {
        self.pseudocritical.iter().map(|w| w.vertex).collect()
    }

    /// `F(Q)` over flagged vertices of a half-plane report.
    pub fn pseudocritical_values(&self) -> Vec<f64> {
        self.pseudocritical
            .iter()
            .filter_map(|w| match w.value {
                WitnessValue::Scalar(v) => Some(v),
                WitnessValue::Vector(_) => None,
            })
            .collect()
    }

    /// `ρ∘φ⃗(Q)` over flagged vertices of a projection report.
    pub fn projected_values(&self) -> Vec<Vec<f64>> {
        self.pseudocritical
            .iter()
            .filter_map(|w| match &w.value {
                WitnessValue::Vector(v) => Some(v.clone()),
                WitnessValue::Scalar(_) => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_pair(g: &SizeGraph, p: &AdmissiblePair) -> Result<()> {
    if p.k() != g.k() {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: p.k(),
        });
    }
    Ok(())
}

/// Hull test over tagged candidate gradients; `None` when not flagged.
fn hull_witness(
    candidates: &[(usize, Vector3<f64>)],
    components: &[usize],
    tau_0: f64,
) -> Option<(Vec<f64>, f64)> {
    if candidates.is_empty() {
        return None;
    }
    let vectors: Vec<Vector3<f64>> = candidates.iter().map(|c| c.1).collect();
    let max_norm = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let test = convex_hull_contains_zero(&vectors, tau_0 * (1.0 + max_norm));
    if !test.flag {
        return None;
    }
    let mut lambda = vec![0.0; components.len()];
    for ((j, _), w) in candidates.iter().zip(&test.lambdas) {
        let slot = components.iter().position(|c| c == j).expect("tagged component");
        lambda[slot] += w;
    }
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|w| *w /= total);
    Some((lambda, test.residual))
}

fn special_map(geom: &MeshGeometry, k: usize, tau_s: f64) -> BTreeMap<usize, Vec<usize>> {
    (0..k).map(|j| (j, geom.special_points(j, tau_s))).collect()
}

/// Indices within `tau_i·(1 + |F|)` of the maximum of the normalized components.
fn active_indices(phi: &[f64], tau_i: f64) -> (f64, Vec<usize>) {
    let f = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = tau_i * (1.0 + f.abs());
    let active = (0..phi.len()).filter(|&i| f - phi[i] <= slack).collect();
    (f, active)
}

/// `(l⃗,b⃗)`-pseudocritical vertices of `φ⃗`.
///
/// The active set at `Q` is the tolerance set of `Q` joined with the
/// tolerance sets of its graph neighbours, so that a crease of `F` running
/// through the star (but not through `Q` itself) still contributes both
/// gradients.
pub fn lb_pseudocritical(g: &SizeGraph, p: &AdmissiblePair, tol: &Tolerances) -> Result<PseudocriticalReport> {
    let geom = MeshGeometry::new(g)?;
    lb_pseudocritical_with(&geom, g, p, tol, Execution::default())
}

pub fn lb_pseudocritical_with(
    geom: &MeshGeometry,
    g: &SizeGraph,
    p: &AdmissiblePair,
    tol: &Tolerances,
    exec: Execution,
) -> Result<PseudocriticalReport> {
    check_pair(g, p)?;
    tol.validate()?;
    let per_vertex: Vec<(f64, Vec<usize>)> = exec.map_range(g.n_vertices(), |v| {
        active_indices(&normalized_components(g, p, v), tol.tau_i)
    });
    let witnesses = exec.map_range(g.n_vertices(), |v| {
        let mut active = per_vertex[v].1.clone();
        for &u in g.neighbors(v) {
            active.extend_from_slice(&per_vertex[u].1);
        }
        active.sort_unstable();
        active.dedup();
        let candidates = geom.star_gradients(v, &active);
        hull_witness(&candidates, &active, tol.tau_0).map(|(lambda, residual)| PseudocriticalWitness {
            vertex: v,
            active,
            lambda,
            residual,
            value: WitnessValue::Scalar(per_vertex[v].0),
        })
    });
    Ok(PseudocriticalReport {
        pseudocritical: witnesses.into_iter().flatten().collect(),
        special: special_map(geom, g.k(), tol.tau_s),
    })
}

/// Vertices where some convex combination of the gradients of `φ_i`, `i ∈ ρ`,
/// vanishes over the star.
pub fn pseudocritical_projection(
    g: &SizeGraph,
    rho: &ProjectionIndex,
    tol: &Tolerances,
) -> Result<PseudocriticalReport> {
    let geom = MeshGeometry::new(g)?;
    pseudocritical_projection_with(&geom, g, rho, tol, Execution::default())
}

pub fn pseudocritical_projection_with(
    geom: &MeshGeometry,
    g: &SizeGraph,
    rho: &ProjectionIndex,
    tol: &Tolerances,
    exec: Execution,
) -> Result<PseudocriticalReport> {
    ProjectionIndex::new(rho.indices().to_vec(), g.k())?;
    tol.validate()?;
    let comps = rho.indices();
    let witnesses = exec.map_range(g.n_vertices(), |v| {
        let candidates = geom.star_gradients(v, comps);
        hull_witness(&candidates, comps, tol.tau_0).map(|(lambda, residual)| PseudocriticalWitness {
            vertex: v,
            active: comps.to_vec(),
            lambda,
            residual,
            value: WitnessValue::Vector(comps.iter().map(|&j| g.value(v, j)).collect()),
        })
    });
    Ok(PseudocriticalReport {
        pseudocritical: witnesses.into_iter().flatten().collect(),
        special: special_map(geom, g.k(), tol.tau_s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{flat_grid, icosphere, mesh_size_graph, Measure};
    use crate::size_pair::{mesh_pair_from_parts, OffMesh};

    fn flat(values: impl Fn([f64; 3]) -> Vec<f64>) -> SizeGraph {
        let mesh = flat_grid(7, 7, (-1.0, 1.0), (-1.0, 1.0));
        let rows = mesh.positions.iter().map(|&p| values(p)).collect();
        mesh_pair_from_parts(mesh, rows).unwrap()
    }

    #[test]
    fn projections_enumerated() {
        let all = ProjectionIndex::all(3).unwrap();
        assert_eq!(all.len(), 7);
        assert_eq!(all[0].indices(), &[0]);
        assert_eq!(all[6].indices(), &[0, 1, 2]);
        assert!(ProjectionIndex::all(9).is_err());
        assert!(ProjectionIndex::new(vec![1, 0], 2).is_err());
        assert!(ProjectionIndex::new(vec![2], 2).is_err());
        assert!(ProjectionIndex::new(vec![], 2).is_err());
    }

    #[test]
    fn antiparallel_pair_flagged_with_half_weights() {
        // φ⃗ = (x, −x) with equal weights: F = √2·|x|, components tie on x = 0
        let g = flat(|p| vec![p[0], -p[0]]);
        let pair = AdmissiblePair::new(vec![0.5f64.sqrt(), 0.5f64.sqrt()], vec![0.0, 0.0]).unwrap();
        let report = lb_pseudocritical(&g, &pair, &Tolerances::default()).unwrap();
        let pos = g.positions().unwrap();
        let mid: Vec<_> = report
            .pseudocritical
            .iter()
            .filter(|w| pos[w.vertex][0].abs() < 1e-12)
            .collect();
        assert!(!mid.is_empty());
        for w in mid {
            assert_eq!(w.active, vec![0, 1]);
            assert!((w.lambda[0] - 0.5).abs() < 1e-9 && (w.lambda[1] - 0.5).abs() < 1e-9);
            assert!(w.residual < 1e-12);
        }
    }

    #[test]
    fn linear_component_never_flagged() {
        let g = flat(|p| vec![p[0] + 0.5 * p[1]]);
        let r = pseudocritical_projection(&g, &ProjectionIndex::full(1), &Tolerances::default()).unwrap();
        assert!(r.pseudocritical.is_empty());
    }

    #[test]
    fn constant_component_flags_everything() {
        let g = flat(|_| vec![2.0]);
        let r = pseudocritical_projection(&g, &ProjectionIndex::full(1), &Tolerances::default()).unwrap();
        assert_eq!(r.pseudocritical.len(), g.n_vertices());
        assert_eq!(r.projected_values(), vec![vec![2.0]; g.n_vertices()]);
    }

    #[test]
    fn k1_flags_near_critical_vertex() {
        // bowl x² + y² has its only critical point at the origin
        let g = flat(|p| vec![p[0] * p[0] + p[1] * p[1]]);
        let r = lb_pseudocritical(&g, &AdmissiblePair::identity(), &Tolerances::default()).unwrap();
        let pos = g.positions().unwrap();
        let flagged = r.flagged_vertices();
        assert!(flagged.iter().any(|&v| pos[v][0].abs() < 1e-12 && pos[v][1].abs() < 1e-12));
        for (w, v) in r.pseudocritical.iter().zip(&flagged) {
            assert_eq!(w.lambda, vec![1.0]);
            let value = match w.value {
                WitnessValue::Scalar(x) => x,
                _ => unreachable!(),
            };
            assert_eq!(value, g.value(*v, 0));
        }
    }

    #[test]
    fn half_plane_flags_subset_of_full_projection() {
        let mesh: OffMesh = icosphere(3);
        let g = mesh_size_graph(&mesh, Measure::XZ).unwrap();
        let tol = Tolerances::default();
        let pair = AdmissiblePair::new(vec![0.6, 0.8], vec![0.1, -0.1]).unwrap();
        let lb = lb_pseudocritical(&g, &pair, &tol).unwrap().flagged_vertices();
        let full = pseudocritical_projection(&g, &ProjectionIndex::full(2), &tol)
            .unwrap()
            .flagged_vertices();
        assert!(!lb.is_empty());
        assert!(lb.iter().all(|v| full.contains(v)));
    }

    #[test]
    fn witnesses_are_convex() {
        let mesh = icosphere(2);
        let g = mesh_size_graph(&mesh, Measure::XZ).unwrap();
        let r = pseudocritical_projection(&g, &ProjectionIndex::full(2), &Tolerances::default()).unwrap();
        for w in &r.pseudocritical {
            assert!(w.lambda.iter().all(|&l| (0.0..=1.0).contains(&l)));
            assert!((w.lambda.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn report_json_shape() {
        let g = flat(|_| vec![1.0]);
        let r = pseudocritical_projection(&g, &ProjectionIndex::full(1), &Tolerances::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let w = &v["pseudocritical"][0];
        for key in ["vertex", "I", "lambda", "residual", "value"] {
            assert!(w.get(key).is_some(), "missing {key}");
        }
        assert!(v["special"].get("0").is_some());
    }
}
