//! One-dimensional size functions: direct evaluation by sublevel traversal,
//! cornerpoint extraction by elder-rule union-find, and the multiplicity
//! oracles that define cornerpoints independently of the extractor.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{ExtendedReal, Finite, Infinity};
use crate::size_pair::SizeGraph;

/// One real value per vertex of a size graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    /// Checks finiteness and that there is one value per vertex of `g`.
    pub fn on(g: &SizeGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.n_vertices() {
            return Err(Error::DimensionMismatch {
                expected: g.n_vertices(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::precondition(format!("field value {i} is not finite")));
        }
        Ok(ScalarField(values))
    }

    /// The measuring function of a `k = 1` graph.
    pub fn from_scalar_graph(g: &SizeGraph) -> Result<Self> {
        if g.k() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: g.k(),
            });
        }
        Ok(ScalarField(g.component(0)))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        ScalarField(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.0.iter().copied().reduce(f64::min)
    }

    pub fn max(&self) -> Option<f64> {
        self.0.iter().copied().reduce(f64::max)
    }

    /// `max_P |f(P) − g(P)|`.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// A quarter of the smallest positive gap between distinct values; the
    /// default ε for the multiplicity oracles. At half the gap, adjacent
    /// values would give `x+ε = y−ε`. `0.5` when the field is constant.
    pub fn default_eps(&self) -> f64 {
        let mut sorted = self.0.clone();
        sorted.sort_by(f64::total_cmp);
        sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&d| d > 0.0)
            .reduce(f64::min)
            .map_or(0.5, |gap| gap / 4.0)
    }
}

/// A proper cornerpoint `(x, y)` or, when `y = ∞`, a cornerline `x = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cornerpoint {
    pub x: f64,
    pub y: ExtendedReal,
    pub mult: usize,
}

impl Cornerpoint {
    pub fn is_cornerline(&self) -> bool {
        !self.y.is_finite()
    }

    /// `(y − x)/2`: the cost of sending the point to the diagonal.
    pub fn persistence_half(&self) -> ExtendedReal {
        self.y.minus(Finite(self.x)).half()
    }
}

/// Multiset of cornerpoints and cornerlines describing a 1D size function.
///
/// Entries are kept sorted by `(x, y)` with distinct coordinates; repeated
/// points are stored once with summed multiplicity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FormalSeries {
    #[serde(rename = "cornerpoints")]
    points: Vec<Cornerpoint>,
}

impl FormalSeries {
    /// Builds a series, merging equal coordinates. Rejects `x ≥ y`,
    /// non-finite abscissas and zero multiplicities.
    pub fn new(points: impl IntoIterator<Item = Cornerpoint>) -> Result<Self> {
        let mut merged: BTreeMap<(OrdF64, OrdF64), usize> = BTreeMap::new();
        for p in points {
            if !p.x.is_finite() || p.mult == 0 || Finite(p.x) >= p.y {
                return Err(Error::precondition(format!(
                    "invalid cornerpoint ({}, {}) × {}",
                    p.x, p.y, p.mult
                )));
            }
            *merged
                .entry((OrdF64(p.x), OrdF64(p.y.to_f64())))
                .or_default() += p.mult;
        }
        Ok(FormalSeries {
            points: merged
                .into_iter()
                .map(|((x, y), mult)| Cornerpoint {
                    x: x.0,
                    y: ExtendedReal::from(y.0),
                    mult,
                })
                .collect(),
        })
    }

    pub fn empty() -> Self {
        FormalSeries::default()
    }

    pub fn points(&self) -> &[Cornerpoint] {
        &self.points
    }

    pub fn proper(&self) -> impl Iterator<Item = &Cornerpoint> {
        self.points.iter().filter(|p| !p.is_cornerline())
    }

    pub fn cornerlines(&self) -> impl Iterator<Item = &Cornerpoint> {
        self.points.iter().filter(|p| p.is_cornerline())
    }

    pub fn cornerline_multiplicity(&self) -> usize {
        self.cornerlines().map(|p| p.mult).sum()
    }

    pub fn proper_multiplicity(&self) -> usize {
        self.proper().map(|p| p.mult).sum()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.mult).sum()
    }

    /// Multiplicity stored at `(x, y)`, zero when absent.
    pub fn multiplicity_at(&self, x: f64, y: ExtendedReal) -> usize {
        self.points
            .iter()
            .find(|p| p.x == x && p.y == y)
            .map_or(0, |p| p.mult)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FormalSeries =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("{}:{}", e.line(), e.column()), e.to_string()))?;
        FormalSeries::new(raw.points)
    }
}

/// Total order on finite floats and `+∞`, for map keys.
#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Number of connected components of the subgraph induced by `upper` that
/// contain at least one vertex satisfying `lower`.
pub(crate) fn count_meeting_components(
    g: &SizeGraph,
    upper: impl Fn(usize) -> bool,
    lower: impl Fn(usize) -> bool,
) -> usize {
    let n = g.n_vertices();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..n {
        if seen[start] || !lower(start) || !upper(start) {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if !seen[u] && upper(u) {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    count
}

/// `ℓ(x, y)`: components of the `f ≤ y` sublevel subgraph that meet `f ≤ x`.
pub fn size_function_1d(g: &SizeGraph, f: &ScalarField, x: f64, y: f64) -> Result<usize> {
    if !(x < y) {
        return Err(Error::precondition(format!("size function needs x < y, got ({x}, {y})")));
    }
    assert_eq!(f.len(), g.n_vertices(), "field does not match graph");
    let v = f.values();
    Ok(count_meeting_components(g, |i| v[i] <= y, |i| v[i] <= x))
}

struct ElderForest {
    parent: Vec<usize>,
    /// Oldest vertex of the component, valid at roots.
    elder: Vec<usize>,
}

impl ElderForest {
    fn new(n: usize) -> Self {
        ElderForest {
            parent: (0..n).collect(),
            elder: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }
}

/// Cornerpoints of `ℓ_(g,f)` by the elder rule.
///
/// Vertices enter in order of `(f, index)`; an edge enters with its later
/// endpoint. When two components meet at level `d`, the younger one (larger
/// birth, ties broken towards the larger elder index) dies and contributes
/// `(birth, d)` unless `birth == d`. Each surviving component contributes a
/// cornerline at its minimum.
pub fn cornerpoints(g: &SizeGraph, f: &ScalarField) -> FormalSeries {
    assert_eq!(f.len(), g.n_vertices(), "field does not match graph");
    let v = f.values();
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let mut forest = ElderForest::new(n);
    let mut points = Vec::new();
    for &i in &order {
        for &u in g.neighbors(i) {
            if rank[u] > rank[i] {
                continue;
            }
            let (ri, ru) = (forest.find(i), forest.find(u));
            if ri == ru {
                continue;
            }
            let (ei, eu) = (forest.elder[ri], forest.elder[ru]);
            // Elder has smaller (value, index), which is smaller rank.
            let (survivor, dying) = if rank[ei] < rank[eu] { (ri, ru) } else { (ru, ri) };
            let birth = v[forest.elder[dying]];
            if birth < v[i] {
                points.push(Cornerpoint {
                    x: birth,
                    y: Finite(v[i]),
                    mult: 1,
                });
            }
            forest.parent[dying] = survivor;
        }
    }
    for i in 0..n {
        if forest.find(i) == i {
            points.push(Cornerpoint {
                x: v[forest.elder[i]],
                y: Infinity,
                mult: 1,
            });
        }
    }
    FormalSeries::new(points).expect("elder-rule pairs satisfy x < y")
}

/// `Σ mult` over entries with `x ≤ x̄` and `y > ȳ`.
pub fn evaluate_from_series(s: &FormalSeries, x_bar: f64, y_bar: f64) -> Result<usize> {
    if !(x_bar < y_bar) {
        return Err(Error::precondition(format!(
            "series evaluation needs x < y, got ({x_bar}, {y_bar})"
        )));
    }
    Ok(s
        .points()
        .iter()
        .filter(|p| p.x <= x_bar && p.y > Finite(y_bar))
        .map(|p| p.mult)
        .sum())
}

/// Minimum over `eps_list` of
/// `ℓ(x+ε, y−ε) − ℓ(x−ε, y−ε) − ℓ(x+ε, y+ε) + ℓ(x−ε, y+ε)`.
///
/// Signed so a broken size function shows up as a negative count.
pub fn multiplicity_proper(
    g: &SizeGraph,
    f: &ScalarField,
    p: (f64, f64),
    eps_list: &[f64],
) -> Result<i64> {
    let (x, y) = p;
    if eps_list.is_empty() {
        return Err(Error::precondition("empty eps list"));
    }
    if !(x < y) {
        return Err(Error::precondition(format!("point ({x}, {y}) is not above the diagonal")));
    }
    let mut best = i64::MAX;
    for &eps in eps_list {
        if !(eps > 0.0 && x + eps < y - eps) {
            return Err(Error::precondition(format!("ε = {eps} violates x+ε < y−ε at ({x}, {y})")));
        }
        let l = |a: f64, b: f64| size_function_1d(g, f, a, b).map(|c| c as i64);
        let m = l(x + eps, y - eps)? - l(x - eps, y - eps)? - l(x + eps, y + eps)? + l(x - eps, y + eps)?;
        best = best.min(m);
    }
    Ok(best)
}

/// Minimum over `eps_list` of `ℓ(a+ε, 1/ε) − ℓ(a−ε, 1/ε)`.
pub fn multiplicity_infinity(g: &SizeGraph, f: &ScalarField, a: f64, eps_list: &[f64]) -> Result<i64> {
    if eps_list.is_empty() {
        return Err(Error::precondition("empty eps list"));
    }
    let top = f.max().unwrap_or(f64::NEG_INFINITY);
    let mut best = i64::MAX;
    for &eps in eps_list {
        let far = 1.0 / eps;
        if !(eps > 0.0 && a + eps < far && far > top) {
            return Err(Error::precondition(format!(
                "ε = {eps} needs a+ε < 1/ε and 1/ε above max f = {top}"
            )));
        }
        let m = size_function_1d(g, f, a + eps, far)? as i64 - size_function_1d(g, f, a - eps, far)? as i64;
        best = best.min(m);
    }
    Ok(best)
}
