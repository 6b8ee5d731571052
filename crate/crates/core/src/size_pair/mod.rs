//! Discretized size pairs: a finite graph whose vertices carry `k` measuring
//! values, optionally with triangles and vertex positions for gradient work.

mod io;

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{load_mesh_pair, mesh_pair_from_parts, load_size_graph, read_off, read_values_csv, save_size_graph, write_off, OffMesh};

/// One vertex record of the size-graph JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<[f64; 3]>,
}

/// Unvalidated contents of a size-graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub k: usize,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangles: Option<Vec<[usize; 3]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub code: String,
    pub location: String,
    pub message: String,
}

impl Issue {
    fn new(code: &str, location: String, message: impl Into<String>) -> Self {
        Issue {
            code: code.to_string(),
            location,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
    pub connected_component_count: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has_error(&self, needle: &str) -> bool {
        self.errors
            .iter()
            .any(|e| e.code == needle || e.message.contains(needle))
    }
}

/// Exhaustive invariant check of a size-graph document. Never fails: every
/// problem is recorded in the report.
pub fn validate(doc: &GraphDocument) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let n = doc.vertices.len();

    if doc.k == 0 {
        errors.push(Issue::new("bad-arity", "k".into(), "k must be at least 1"));
    }
    if n == 0 {
        warnings.push(Issue::new("empty", "vertices".into(), "graph has no vertices"));
    }

    let with_pos = doc.vertices.iter().filter(|v| v.pos.is_some()).count();
    if with_pos != 0 && with_pos != n {
        errors.push(Issue::new(
            "partial-positions",
            "vertices".into(),
            format!("{with_pos} of {n} vertices carry positions; need all or none"),
        ));
    }

    for (i, v) in doc.vertices.iter().enumerate() {
        if v.id != i {
            errors.push(Issue::new(
                "id-mismatch",
                format!("vertices[{i}].id"),
                format!("vertex id {} does not match its position {i}", v.id),
            ));
        }
        if v.values.len() != doc.k {
            errors.push(Issue::new(
                "arity-mismatch",
                format!("vertices[{i}].values"),
                format!("expected {} values, found {}", doc.k, v.values.len()),
            ));
        }
        for (j, x) in v.values.iter().enumerate() {
            if !x.is_finite() {
                errors.push(Issue::new(
                    "non-finite-value",
                    format!("vertices[{i}].values[{j}]"),
                    "measuring value is not finite",
                ));
            }
        }
        if let Some(p) = v.pos {
            if p.iter().any(|c| !c.is_finite()) {
                errors.push(Issue::new(
                    "non-finite-position",
                    format!("vertices[{i}].pos"),
                    "position is not finite",
                ));
            }
        }
    }

    let mut edge_set = HashSet::new();
    let mut valid_edges = Vec::with_capacity(doc.edges.len());
    for (e, &[a, b]) in doc.edges.iter().enumerate() {
        let loc = format!("edges[{e}]");
        if a >= n || b >= n {
            errors.push(Issue::new(
                "index-out-of-range",
                loc,
                format!("index out of range: [{a},{b}] with {n} vertices"),
            ));
            continue;
        }
        if a == b {
            errors.push(Issue::new("self-loop", loc, format!("self-loop at vertex {a}")));
            continue;
        }
        if !edge_set.insert((a.min(b), a.max(b))) {
            errors.push(Issue::new("duplicate-edge", loc, format!("duplicate edge [{a},{b}]")));
            continue;
        }
        valid_edges.push([a, b]);
    }

    if let Some(tris) = &doc.triangles {
        let mut tri_set = HashSet::new();
        for (t, tri) in tris.iter().enumerate() {
            let loc = format!("triangles[{t}]");
            if tri.iter().any(|&v| v >= n) {
                errors.push(Issue::new(
                    "index-out-of-range",
                    loc,
                    format!("index out of range: {tri:?} with {n} vertices"),
                ));
                continue;
            }
            let mut key = *tri;
            key.sort_unstable();
            if key[0] == key[1] || key[1] == key[2] {
                errors.push(Issue::new(
                    "self-loop",
                    loc,
                    format!("triangle {tri:?} repeats a vertex"),
                ));
                continue;
            }
            if !tri_set.insert(key) {
                errors.push(Issue::new(
                    "duplicate-triangle",
                    loc,
                    format!("duplicate triangle {tri:?}"),
                ));
                continue;
            }
            for (a, b) in [(key[0], key[1]), (key[0], key[2]), (key[1], key[2])] {
                if !edge_set.contains(&(a, b)) {
                    errors.push(Issue::new(
                        "missing-triangle-edge",
                        loc.clone(),
                        format!("edge [{a},{b}] of triangle {tri:?} is not in the edge list"),
                    ));
                }
            }
        }
        if with_pos == 0 && !tris.is_empty() {
            warnings.push(Issue::new(
                "no-positions",
                "vertices".into(),
                "triangles present without vertex positions; gradients unavailable",
            ));
        }
    }

    let adjacency = adjacency_lists(n, &valid_edges);
    ValidationReport {
        errors,
        warnings,
        connected_component_count: count_components(&adjacency),
    }
}

fn adjacency_lists(n: usize, edges: &[[usize; 2]]) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); n];
    for &[a, b] in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    adjacency
}

fn count_components(adjacency: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..adjacency.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &u in &adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    count
}

/// A validated, immutable size pair `(M, φ⃗)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeGraph {
    k: usize,
    values: Vec<f64>,
    edges: Vec<[usize; 2]>,
    triangles: Option<Vec<[usize; 3]>>,
    positions: Option<Vec<[f64; 3]>>,
    adjacency: Vec<Vec<usize>>,
    components: usize,
}

impl SizeGraph {
    /// Builds a graph from per-vertex value rows, validating every invariant.
    pub fn new(
        k: usize,
        values: Vec<Vec<f64>>,
        edges: Vec<[usize; 2]>,
        triangles: Option<Vec<[usize; 3]>>,
        positions: Option<Vec<[f64; 3]>>,
    ) -> Result<Self> {
        if let Some(p) = &positions {
            if p.len() != values.len() {
                return Err(Error::Invalid {
                    code: "partial-positions".into(),
                    location: "positions".into(),
                    message: format!("{} positions for {} vertices", p.len(), values.len()),
                });
            }
        }
        let vertices = values
            .into_iter()
            .enumerate()
            .map(|(id, values)| VertexRecord {
                id,
                values,
                pos: positions.as_ref().map(|p| p[id]),
            })
            .collect();
        Self::from_document(GraphDocument {
            k,
            vertices,
            edges,
            triangles,
        })
    }

    /// Convenience constructor for a scalar (`k = 1`) graph.
    pub fn scalar(values: &[f64], edges: &[[usize; 2]]) -> Result<Self> {
        Self::new(
            1,
            values.iter().map(|&v| vec![v]).collect(),
            edges.to_vec(),
            None,
            None,
        )
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self> {
        let report = validate(&doc);
        if let Some(first) = report.errors.into_iter().next() {
            return Err(Error::Invalid {
                code: first.code,
                location: first.location,
                message: first.message,
            });
        }
        let n = doc.vertices.len();
        let positions = if n > 0 && doc.vertices[0].pos.is_some() {
            Some(doc.vertices.iter().map(|v| v.pos.unwrap_or_default()).collect())
        } else {
            None
        };
        let values = doc.vertices.into_iter().flat_map(|v| v.values).collect();
        let adjacency = adjacency_lists(n, &doc.edges);
        Ok(SizeGraph {
            k: doc.k,
            values,
            edges: doc.edges,
            triangles: doc.triangles,
            positions,
            adjacency,
            components: report.connected_component_count,
        })
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            k: self.k,
            vertices: (0..self.n_vertices())
                .map(|id| VertexRecord {
                    id,
                    values: self.values_of(id).to_vec(),
                    pos: self.positions.as_ref().map(|p| p[id]),
                })
                .collect(),
            edges: self.edges.clone(),
            triangles: self.triangles.clone(),
        }
    }

    /// Re-runs the full validation; always error-free for a constructed graph.
    pub fn report(&self) -> ValidationReport {
        validate(&self.to_document())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn values_of(&self, v: usize) -> &[f64] {
        &self.values[v * self.k..(v + 1) * self.k]
    }

    pub fn value(&self, v: usize, component: usize) -> f64 {
        self.values[v * self.k + component]
    }

    /// The `j`-th measuring component as a scalar field.
    pub fn component(&self, j: usize) -> Vec<f64> {
        (0..self.n_vertices()).map(|v| self.value(v, j)).collect()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> Option<&[[usize; 3]]> {
        self.triangles.as_deref()
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// `max_P ‖φ⃗(P)‖∞`.
    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same graph with replaced measuring values (`k` may change).
    pub fn with_values(&self, k: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            k,
            rows,
            self.edges.clone(),
            self.triangles.clone(),
            self.positions.clone(),
        )
    }
}
