//! Naive reference implementations shared by the integration suites.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sizefn::synth::{random_graph, GraphSpec};
use sizefn::SizeGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Component labels of the subgraph induced by `keep`, by repeated min-label
/// propagation until nothing changes.
pub fn naive_labels(n: usize, edges: &[[usize; 2]], keep: impl Fn(usize) -> bool) -> Vec<Option<usize>> {
    let mut label: Vec<Option<usize>> = (0..n).map(|v| keep(v).then_some(v)).collect();
    loop {
        let mut changed = false;
        for &[a, b] in edges {
            if let (Some(la), Some(lb)) = (label[a], label[b]) {
                if la != lb {
                    let m = la.min(lb);
                    label[a] = Some(m);
                    label[b] = Some(m);
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

/// Number of components of `{φ ⪯ y}` containing a vertex of `{φ ⪯ x}`.
pub fn naive_size(g: &SizeGraph, x: &[f64], y: &[f64]) -> usize {
    let below = |v: usize, t: &[f64]| g.values_of(v).iter().zip(t).all(|(a, b)| a <= b);
    let labels = naive_labels(g.n_vertices(), g.edges(), |v| below(v, y));
    let mut hit: Vec<usize> = (0..g.n_vertices())
        .filter(|&v| below(v, x))
        .filter_map(|v| labels[v])
        .collect();
    hit.sort_unstable();
    hit.dedup();
    hit.len()
}

/// Scalar graph with the given vertex values and the edges of `g`.
pub fn scalar_on(g: &SizeGraph, values: &[f64]) -> SizeGraph {
    SizeGraph::scalar(values, g.edges()).unwrap()
}

pub fn graph(seed: u64, n: usize, k: usize, levels: Option<u32>) -> SizeGraph {
    let spec = GraphSpec {
        levels,
        ..GraphSpec::new(n, k)
    };
    random_graph(&mut rng(seed), &spec).unwrap()
}

/// Sorted distinct values of component `j`.
pub fn distinct_values(g: &SizeGraph, j: usize) -> Vec<f64> {
    let mut v = g.component(j);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}
