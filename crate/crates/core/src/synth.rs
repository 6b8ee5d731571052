//! Seeded random size graphs and series for property suites and benchmarks.

use rand::Rng;

use crate::error::Result;
use crate::extended::ExtendedReal;
use crate::size_pair::SizeGraph;
use crate::sublevel::{Cornerpoint, FormalSeries};

/// Shape of a random graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSpec {
    pub n_vertices: usize,
    /// Expected number of extra edges per vertex on top of a random forest.
    pub extra_edges_per_vertex: f64,
    /// Probability that a vertex starts a new tree instead of attaching to an
    /// earlier one; controls the number of components.
    pub restart_probability: f64,
    pub k: usize,
    /// Values are drawn from `[-range, range]`.
    pub range: f64,
    /// When set, values are rounded to this many levels, producing ties.
    pub levels: Option<u32>,
}

impl GraphSpec {
    pub fn new(n_vertices: usize, k: usize) -> Self {
        Self {
            n_vertices,
            extra_edges_per_vertex: 0.6,
            restart_probability: 0.05,
            k,
            range: 1.0,
            levels: None,
        }
    }
}

fn draw_value<R: Rng>(rng: &mut R, spec: &GraphSpec) -> f64 {
    let v = rng.gen_range(-spec.range..=spec.range);
    match spec.levels {
        Some(levels) if levels > 1 => {
            let step = 2.0 * spec.range / (levels - 1) as f64;
            -spec.range + ((v + spec.range) / step).round() * step
        }
        _ => v,
    }
}

/// Random edge set: a random forest plus extra random edges, without loops
/// or duplicates.
pub fn random_edges<R: Rng>(rng: &mut R, spec: &GraphSpec) -> Vec<[usize; 2]> {
    let n = spec.n_vertices;
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        if !rng.gen_bool(spec.restart_probability.clamp(0.0, 1.0)) {
            let u = rng.gen_range(0..v);
            edges.insert([u, v]);
        }
    }
    if n >= 2 {
        let extra = (spec.extra_edges_per_vertex * n as f64).round() as usize;
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.insert([a.min(b), a.max(b)]);
            }
        }
    }
    edges.into_iter().collect()
}

/// Random graph with `k`-dimensional values.
pub fn random_graph<R: Rng>(rng: &mut R, spec: &GraphSpec) -> Result<SizeGraph> {
    let edges = random_edges(rng, spec);
    let rows = (0..spec.n_vertices)
        .map(|_| (0..spec.k).map(|_| draw_value(rng, spec)).collect())
        .collect();
    SizeGraph::new(spec.k, rows, edges, None, None)
}

/// Random scalar field on `g` drawn like the values of `spec`.
pub fn random_values<R: Rng>(rng: &mut R, n: usize, spec: &GraphSpec) -> Vec<f64> {
    (0..n).map(|_| draw_value(rng, spec)).collect()
}

/// Random series with up to `max_proper` proper points and up to
/// `max_lines` cornerlines, coordinates in `[0, 4]`, multiplicities in 1..=2.
pub fn random_series<R: Rng>(rng: &mut R, max_proper: usize, max_lines: usize) -> FormalSeries {
    let mut points = Vec::new();
    let mut budget = rng.gen_range(0..=max_proper);
    while budget > 0 {
        let x: f64 = rng.gen_range(0.0..3.0);
        let y = x + rng.gen_range(0.05..2.0);
        let mult = rng.gen_range(1..=budget.min(2));
        budget -= mult;
        points.push(Cornerpoint {
            x,
            y: ExtendedReal::Finite(y),
            mult,
        });
    }
    for _ in 0..rng.gen_range(0..=max_lines) {
        points.push(Cornerpoint {
            x: rng.gen_range(0.0..3.0),
            y: ExtendedReal::Infinity,
            mult: 1,
        });
    }
    FormalSeries::new(points).expect("valid random series")
}
