//! Triangle-mesh generators for the standard test shapes.

use std::collections::HashMap;

use crate::size_pair::OffMesh;

/// Regular icosahedron inscribed in the unit sphere (12 vertices, 20 faces).
pub fn icosahedron() -> OffMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let triangles = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    OffMesh {
        positions: raw.iter().map(|&p| normalize(p)).collect(),
        triangles,
    }
}

/// Unit icosphere after `subdivisions` rounds of 4-to-1 splitting:
/// `10·4^n + 2` vertices (12, 42, 162, 642, 2562, ...).
pub fn icosphere(subdivisions: u32) -> OffMesh {
    let mut mesh = icosahedron();
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangles = Vec::with_capacity(mesh.triangles.len() * 4);
        for &[a, b, c] in &mesh.triangles {
            let mut mid = |u: usize, v: usize| {
                let key = (u.min(v), u.max(v));
                *midpoint.entry(key).or_insert_with(|| {
                    let (p, q) = (mesh.positions[u], mesh.positions[v]);
                    mesh.positions
                        .push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    mesh.positions.len() - 1
                })
            };
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            triangles.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        mesh.triangles = triangles;
    }
    mesh
}

/// Surface of the cube `[-1,1]³` with every face split into an `n × n` grid of
/// squares, each cut into two triangles: `6n² + 2` vertices.
pub fn cube_surface(n: usize) -> OffMesh {
    assert!(n >= 1, "cube needs at least one cell per edge");
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut positions = Vec::new();
    let mut triangles = Vec::new();
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / n as f64;

    let mut vertex = |lattice: [usize; 3]| -> usize {
        *index.entry(lattice).or_insert_with(|| {
            positions.push([coord(lattice[0]), coord(lattice[1]), coord(lattice[2])]);
            positions.len() - 1
        })
    };

    // Each face: fixed axis at 0 or n, the other two axes sweep the grid.
    for axis in 0..3 {
        let (u_axis, v_axis) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [0, n] {
            for i in 0..n {
                for j in 0..n {
                    let at = |di: usize, dj: usize| {
                        let mut l = [0; 3];
                        l[axis] = side;
                        l[u_axis] = i + di;
                        l[v_axis] = j + dj;
                        l
                    };
                    let q = [
                        vertex(at(0, 0)),
                        vertex(at(1, 0)),
                        vertex(at(1, 1)),
                        vertex(at(0, 1)),
                    ];
                    triangles.push([q[0], q[1], q[2]]);
                    triangles.push([q[0], q[2], q[3]]);
                }
            }
        }
    }
    OffMesh {
        positions,
        triangles,
    }
}

/// Flat triangulated grid in the plane `z = 0`, `nx × ny` vertices spanning
/// `[x0, x1] × [y0, y1]`.
pub fn flat_grid(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> OffMesh {
    assert!(nx >= 2 && ny >= 2);
    let mut positions = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            positions.push([
                x.0 + (x.1 - x.0) * i as f64 / (nx - 1) as f64,
                y.0 + (y.1 - y.0) * j as f64 / (ny - 1) as f64,
                0.0,
            ]);
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    OffMesh {
        positions,
        triangles,
    }
}

/// Measuring functions obtained by restricting a map `R³ → R^k` to mesh vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// `(|x|, |z|)`
    AbsXZ,
    /// `(x, z)`
    XZ,
    /// `x`
    X,
}

impl Measure {
    pub fn k(self) -> usize {
        match self {
            Measure::AbsXZ | Measure::XZ => 2,
            Measure::X => 1,
        }
    }

    pub fn eval(self, p: [f64; 3]) -> Vec<f64> {
        match self {
            Measure::AbsXZ => vec![p[0].abs(), p[2].abs()],
            Measure::XZ => vec![p[0], p[2]],
            Measure::X => vec![p[0]],
        }
    }

    pub fn rows(self, mesh: &OffMesh) -> Vec<Vec<f64>> {
        mesh.positions.iter().map(|&p| self.eval(p)).collect()
    }
}

/// Size graph of a mesh with values of `measure` at its vertices.
pub fn mesh_size_graph(mesh: &OffMesh, measure: Measure) -> crate::Result<crate::SizeGraph> {
    crate::size_pair::mesh_pair_from_parts(mesh.clone(), measure.rows(mesh))
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        for (level, nv) in [(0, 12), (1, 42), (3, 642), (4, 2562)] {
            let m = icosphere(level);
            assert_eq!(m.positions.len(), nv);
            assert_eq!(m.triangles.len(), 20 * 4usize.pow(level));
            assert_eq!(m.edges().len(), 3 * m.triangles.len() / 2);
            for p in &m.positions {
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                assert!((r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_counts() {
        let m = cube_surface(20);
        assert_eq!(m.positions.len(), 6 * 400 + 2);
        assert_eq!(m.triangles.len(), 6 * 400 * 2);
        assert_eq!(m.edges().len(), 3 * m.triangles.len() / 2);
    }

    #[test]
    fn flat_grid_counts() {
        let m = flat_grid(4, 3, (0.0, 1.0), (0.0, 1.0));
        assert_eq!(m.positions.len(), 12);
        assert_eq!(m.triangles.len(), 12);
    }
}
