//! Per-triangle gradients of PL measuring functions and the vertex stars
//! they are tested over.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::size_pair::SizeGraph;

const MIN_AREA: f64 = 1e-12;

/// Gradient of one measuring component, constant on each triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    vectors: Vec<Vector3<f64>>,
}

impl GradientField {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, triangle: usize) -> Vector3<f64> {
        self.vectors[triangle]
    }

    pub fn vectors(&self) -> &[Vector3<f64>] {
        &self.vectors
    }
}

fn point(p: [f64; 3]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

type Geometry<'a> = (&'a [[f64; 3]], &'a [[usize; 3]]);

fn geometry(g: &SizeGraph) -> Result<Geometry<'_>> {
    match (g.positions(), g.triangles()) {
        (Some(p), Some(t)) => Ok((p, t)),
        _ => Err(Error::Geometry("geometry required: the graph has no vertex positions or no triangles".into())),
    }
}

/// Unnormalized triangle normal; its length is twice the area.
fn raw_normal(pos: &[[f64; 3]], t: [usize; 3]) -> Vector3<f64> {
    let p0 = point(pos[t[0]]);
    (point(pos[t[1]]) - p0).cross(&(point(pos[t[2]]) - p0))
}

/// Gradient of component `j` on every triangle.
///
/// On triangle `(p0,p1,p2)` it is the in-plane vector `∇` with
/// `∇·(p_a − p0) = φ_j(p_a) − φ_j(p0)` for `a = 1, 2`.
pub fn triangle_gradients(g: &SizeGraph, j: usize) -> Result<GradientField> {
    if j >= g.k() {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: j + 1,
        });
    }
    let (pos, tris) = geometry(g)?;
    let mut vectors = Vec::with_capacity(tris.len());
    for (ti, &t) in tris.iter().enumerate() {
        let p0 = point(pos[t[0]]);
        let e1 = point(pos[t[1]]) - p0;
        let e2 = point(pos[t[2]]) - p0;
        let area = e1.cross(&e2).norm() / 2.0;
        if !(area > MIN_AREA) {
            return Err(Error::Geometry(format!(
                "degenerate triangle {ti} (area {area:e})"
            )));
        }
        let d1 = g.value(t[1], j) - g.value(t[0], j);
        let d2 = g.value(t[2], j) - g.value(t[0], j);
        let (g11, g12, g22) = (e1.dot(&e1), e1.dot(&e2), e2.dot(&e2));
        let det = g11 * g22 - g12 * g12;
        let a = (g22 * d1 - g12 * d2) / det;
        let b = (g11 * d2 - g12 * d1) / det;
        vectors.push(e1 * a + e2 * b);
    }
    Ok(GradientField { vectors })
}

/// Stars, vertex normals and all component gradients of a mesh, computed once.
#[derive(Debug, Clone)]
pub struct MeshGeometry {
    stars: Vec<Vec<usize>>,
    normals: Vec<Vector3<f64>>,
    gradients: Vec<GradientField>,
}

impl MeshGeometry {
    pub fn new(g: &SizeGraph) -> Result<Self> {
        let (pos, tris) = geometry(g)?;
        let gradients = (0..g.k())
            .map(|j| triangle_gradients(g, j))
            .collect::<Result<Vec<_>>>()?;
        let mut stars = vec![Vec::new(); g.n_vertices()];
        for (ti, t) in tris.iter().enumerate() {
            for &v in t {
                stars[v].push(ti);
            }
        }
        let normals = stars
            .iter()
            .map(|star| {
                let Some(&first) = star.first() else {
                    return Vector3::zeros();
                };
                let reference = raw_normal(pos, tris[first]);
                let sum = star.iter().fold(Vector3::zeros(), |acc, &ti| {
                    let n = raw_normal(pos, tris[ti]);
                    if n.dot(&reference) < 0.0 {
                        acc - n
                    } else {
                        acc + n
                    }
                });
                let sum = if sum.norm() > 0.0 { sum } else { reference };
                sum / sum.norm()
            })
            .collect();
        Ok(Self {
            stars,
            normals,
            gradients,
        })
    }

    pub fn star(&self, v: usize) -> &[usize] {
        &self.stars[v]
    }

    pub fn gradients(&self, j: usize) -> &GradientField {
        &self.gradients[j]
    }

    /// Gradients of the given components over the star of `v`, projected onto
    /// the tangent plane at `v`. Entries are tagged with their component.
    pub fn star_gradients(&self, v: usize, components: &[usize]) -> Vec<(usize, Vector3<f64>)> {
        let n = self.normals[v];
        let mut out = Vec::with_capacity(components.len() * self.stars[v].len());
        for &j in components {
            for &t in &self.stars[v] {
                let grad = self.gradients[j].get(t);
                out.push((j, grad - n * grad.dot(&n)));
            }
        }
        out
    }

    /// Vertices where the star gradients of component `j` disagree pairwise by
    /// more than `tau_s·(1 + largest star gradient norm)`.
    pub fn special_points(&self, j: usize, tau_s: f64) -> Vec<usize> {
        if !tau_s.is_finite() {
            return Vec::new();
        }
        let field = &self.gradients[j];
        (0..self.stars.len())
            .filter(|&v| {
                let grads: Vec<_> = self.stars[v].iter().map(|&t| field.get(t)).collect();
                let max_norm = grads.iter().map(|g| g.norm()).fold(0.0, f64::max);
                let threshold = tau_s * (1.0 + max_norm);
                grads
                    .iter()
                    .enumerate()
                    .any(|(a, ga)| grads[a + 1..].iter().any(|gb| (ga - gb).norm() > threshold))
            })
            .collect()
    }
}

/// Vertices where `φ_j` fails to be C¹ in the PL sense (see
/// [`MeshGeometry::special_points`]).
pub fn special_points(g: &SizeGraph, j: usize, tau_s: f64) -> Result<Vec<usize>> {
    if j >= g.k() {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: j + 1,
        });
    }
    Ok(MeshGeometry::new(g)?.special_points(j, tau_s))
}
