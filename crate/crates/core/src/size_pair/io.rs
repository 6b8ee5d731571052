use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::{GraphDocument, SizeGraph};
use crate::error::{Error, Result};

/// Reads a size-graph JSON file.
pub fn load_size_graph(path: impl AsRef<Path>) -> Result<SizeGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: GraphDocument = serde_json::from_str(&text).map_err(|e| {
        Error::parse(
            format!("{}:{}:{}", path.display(), e.line(), e.column()),
            e.to_string(),
        )
    })?;
    SizeGraph::from_document(doc)
}

pub fn save_size_graph(g: &SizeGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&g.to_document()).expect("graph serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A triangle mesh read from ASCII OFF.
#[derive(Debug, Clone, PartialEq)]
pub struct OffMesh {
    pub positions: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl OffMesh {
    /// Unique undirected edges of the triangles, in order of first appearance.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen = HashSet::new();
        let mut edges = Vec::with_capacity(self.triangles.len() * 3 / 2);
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                if seen.insert(key) {
                    edges.push([key.0, key.1]);
                }
            }
        }
        edges
    }
}

/// Parses ASCII OFF. Only triangular faces are accepted.
pub fn read_off(path: impl AsRef<Path>) -> Result<OffMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_off(&text).map_err(|e| match e {
        Error::Parse { location, message } => {
            Error::parse(format!("{}:{location}", path.display()), message)
        }
        other => other,
    })
}

fn parse_off(text: &str) -> Result<OffMesh> {
    // Logical lines with comments stripped, keeping 1-based line numbers.
    let mut lines = text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    });

    let (mut lineno, mut line) = lines
        .next()
        .ok_or_else(|| Error::parse("1", "empty OFF file"))?;
    let mut header_rest = None;
    if let Some(rest) = line.strip_prefix("OFF") {
        let rest = rest.trim();
        if rest.is_empty() {
            (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(lineno.to_string(), "missing counts line"))?;
        } else {
            header_rest = Some(rest);
        }
    } else {
        return Err(Error::parse(lineno.to_string(), "missing OFF header"));
    }
    let counts: Vec<usize> = header_rest
        .unwrap_or(line)
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(lineno.to_string(), format!("bad counts: {e}")))?;
    if counts.len() < 2 {
        return Err(Error::parse(lineno.to_string(), "counts line needs vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut positions = Vec::with_capacity(nv);
    for v in 0..nv {
        let (ln, body) = lines
            .next()
            .ok_or_else(|| Error::parse("EOF", format!("expected {nv} vertices, found {v}")))?;
        let coords: Vec<f64> = body
            .split_whitespace()
            .take(3)
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(ln.to_string(), format!("bad vertex: {e}")))?;
        if coords.len() != 3 {
            return Err(Error::parse(ln.to_string(), "vertex needs three coordinates"));
        }
        positions.push([coords[0], coords[1], coords[2]]);
    }

    let mut triangles = Vec::with_capacity(nf);
    for f in 0..nf {
        let (ln, body) = lines
            .next()
            .ok_or_else(|| Error::parse("EOF", format!("expected {nf} faces, found {f}")))?;
        let idx: Vec<usize> = body
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(ln.to_string(), format!("bad face: {e}")))?;
        if idx.first() != Some(&3) || idx.len() < 4 {
            return Err(Error::parse(
                ln.to_string(),
                format!("non-triangle face with {} vertices", idx.first().copied().unwrap_or(0)),
            ));
        }
        triangles.push([idx[1], idx[2], idx[3]]);
    }
    Ok(OffMesh {
        positions,
        triangles,
    })
}

pub fn write_off(mesh: &OffMesh, path: impl AsRef<Path>) -> Result<()> {
    use std::fmt::Write;
    let path = path.as_ref();
    let mut out = String::new();
    let _ = writeln!(out, "OFF");
    let _ = writeln!(out, "{} {} 0", mesh.positions.len(), mesh.triangles.len());
    for p in &mesh.positions {
        let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a headerless CSV of measuring values, one row per vertex.
pub fn read_values_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::parse(path.display().to_string(), format!("{other:?}")),
        })?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| Error::parse(format!("{}:{}", path.display(), i + 1), e.to_string()))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(format!("{}:{}", path.display(), i + 1), e.to_string()))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Builds a size graph from an OFF triangle mesh and a per-vertex CSV.
pub fn load_mesh_pair(mesh_path: impl AsRef<Path>, values_path: impl AsRef<Path>) -> Result<SizeGraph> {
    let mesh = read_off(mesh_path)?;
    let rows = read_values_csv(values_path)?;
    mesh_pair_from_parts(mesh, rows)
}

pub fn mesh_pair_from_parts(mesh: OffMesh, rows: Vec<Vec<f64>>) -> Result<SizeGraph> {
    if rows.len() != mesh.positions.len() {
        return Err(Error::Invalid {
            code: "row-count".into(),
            location: "values".into(),
            message: format!(
                "value row count mismatch: {} rows for {} mesh vertices",
                rows.len(),
                mesh.positions.len()
            ),
        });
    }
    let k = rows.first().map_or(1, Vec::len);
    let edges = mesh.edges();
    SizeGraph::new(k, rows, edges, Some(mesh.triangles), Some(mesh.positions))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn off_with_comments_and_inline_counts() {
        let text = "OFF # header\n# comment\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let mesh = parse_off(text).unwrap();
        assert_eq!(mesh.positions.len(), 3);
        assert_eq!(mesh.triangles, vec![[0, 1, 2]]);
        assert_eq!(mesh.edges().len(), 3);
    }

    #[test]
    fn quad_face_rejected() {
        let text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let err = parse_off(text).unwrap_err();
        assert!(err.to_string().contains("non-triangle"));
    }

    #[test]
    fn truncated_off_rejected() {
        assert!(parse_off("OFF\n3 1 0\n0 0 0\n").is_err());
        assert!(parse_off("").is_err());
        assert!(parse_off("PLY\n").is_err());
    }
}
