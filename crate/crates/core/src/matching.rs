//! The pseudometric `δ` on the extended half-plane and the matching distance
//! between formal series.
//!
//! Proper cornerpoints are matched bottleneck-style, with the diagonal
//! available at infinite multiplicity. Cornerlines can only be matched to
//! cornerlines at finite cost, so they are handled separately by sorted pairing.

use std::collections::VecDeque;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extended::{ExtendedReal, Finite, Infinity};
use crate::sublevel::FormalSeries;

/// Expanded point-count guard for [`matching_distance`].
pub const MAX_EXPANDED: usize = 10_000;
/// Proper-point guard for [`matching_distance_bruteforce`].
pub const MAX_BRUTEFORCE: usize = 6;

/// `δ((x,y),(x′,y′)) = min{max{|x−x′|, |y−y′|}, max{(y−x)/2, (y′−x′)/2}}`.
pub fn delta(p: (f64, ExtendedReal), q: (f64, ExtendedReal)) -> ExtendedReal {
    let (x, y) = (Finite(p.0), p.1);
    let (xq, yq) = (Finite(q.0), q.1);
    let moving = x.minus(xq).abs().max(y.minus(yq).abs());
    let to_diagonal = y.minus(x).half().max(yq.minus(xq).half());
    moving.min(to_diagonal)
}

/// Where a point of the first series goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partner {
    Entry(usize),
    Diagonal,
}

/// One matched pair, by entry index into the two series. `None` on the left
/// means a point of the second series sent to the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchedPair {
    pub left: Option<usize>,
    pub right: Partner,
}

impl Serialize for MatchedPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        match self.left {
            Some(i) => seq.serialize_element(&i)?,
            None => seq.serialize_element("diag")?,
        }
        match self.right {
            Partner::Entry(j) => seq.serialize_element(&j)?,
            Partner::Diagonal => seq.serialize_element("diag")?,
        }
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    pub d_match: ExtendedReal,
    pub matching: Vec<MatchedPair>,
}

#[derive(Debug, Clone, Copy)]
struct Expanded {
    x: f64,
    y: ExtendedReal,
    entry: usize,
}

impl Expanded {
    fn point(&self) -> (f64, ExtendedReal) {
        (self.x, self.y)
    }

    fn half_persistence(&self) -> ExtendedReal {
        self.y.minus(Finite(self.x)).half()
    }
}

fn expand(s: &FormalSeries) -> (Vec<Expanded>, Vec<Expanded>) {
    let mut proper = Vec::new();
    let mut lines = Vec::new();
    for (entry, p) in s.points().iter().enumerate() {
        let target = if p.is_cornerline() { &mut lines } else { &mut proper };
        target.extend(std::iter::repeat_n(Expanded { x: p.x, y: p.y, entry }, p.mult));
    }
    lines.sort_by(|a, b| a.x.total_cmp(&b.x));
    (proper, lines)
}

/// Sorted pairing of cornerlines: bottleneck-optimal on a line.
fn match_lines(a: &[Expanded], b: &[Expanded]) -> (ExtendedReal, Vec<MatchedPair>) {
    if a.len() != b.len() {
        return (Infinity, Vec::new());
    }
    let mut cost = Finite(0.0);
    let mut pairs = Vec::with_capacity(a.len());
    for (p, q) in a.iter().zip(b) {
        cost = cost.max(delta(p.point(), q.point()));
        pairs.push(MatchedPair {
            left: Some(p.entry),
            right: Partner::Entry(q.entry),
        });
    }
    (cost, pairs)
}

/// Bottleneck matching distance between two formal series.
pub fn matching_distance(s1: &FormalSeries, s2: &FormalSeries) -> Result<MatchResult> {
    let (a, la) = expand(s1);
    let (b, lb) = expand(s2);
    let total = a.len() + b.len() + la.len() + lb.len();
    if total > MAX_EXPANDED {
        return Err(Error::SizeGuard(format!(
            "{total} expanded cornerpoints exceed the limit of {MAX_EXPANDED}"
        )));
    }

    let (line_cost, mut pairs) = match_lines(&la, &lb);

    let mut candidates = vec![0.0];
    candidates.extend(a.iter().map(|p| p.half_persistence().to_f64()));
    candidates.extend(b.iter().map(|q| q.half_persistence().to_f64()));
    for p in &a {
        for q in &b {
            candidates.push(delta(p.point(), q.point()).to_f64());
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // The largest candidate is always feasible: everything goes to the diagonal.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    let mut best = feasible_matching(&a, &b, candidates[hi]).expect("all-diagonal matching exists");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match feasible_matching(&a, &b, candidates[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let proper_cost = Finite(candidates[lo]);

    for (i, right) in best.iter().enumerate() {
        let left = if i < a.len() { Some(a[i].entry) } else { None };
        let partner = match *right {
            Slot::Point(j) => Partner::Entry(b[j].entry),
            Slot::Diagonal => Partner::Diagonal,
        };
        if left.is_some() || partner != Partner::Diagonal {
            pairs.push(MatchedPair { left, right: partner });
        }
    }

    Ok(MatchResult {
        d_match: proper_cost.max(line_cost),
        matching: pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Point(usize),
    Diagonal,
}

/// Perfect matching of the diagonal-augmented bipartite graph at threshold
/// `r`, or `None`. Left vertices are `a` then one diagonal slot per point of
/// `b`; the result gives, per left vertex, the matched right point or the
/// diagonal.
fn feasible_matching(a: &[Expanded], b: &[Expanded], r: f64) -> Option<Vec<Slot>> {
    let (n, m) = (a.len(), b.len());
    let r = Finite(r);
    // Right vertices: b (0..m) then a diagonal slot per point of a (m..m+n).
    let mut adjacency = vec![Vec::new(); n + m];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            if delta(p.point(), q.point()) <= r {
                adjacency[i].push(j);
            }
        }
        if p.half_persistence() <= r {
            adjacency[i].push(m + i);
        }
    }
    for (j, q) in b.iter().enumerate() {
        if q.half_persistence() <= r {
            adjacency[n + j].push(j);
        }
        adjacency[n + j].extend(m..m + n);
    }
    let matched = hopcroft_karp(&adjacency, n + m);
    if matched.iter().any(Option::is_none) {
        return None;
    }
    Some(
        matched
            .into_iter()
            .map(|right| match right {
                Some(j) if j < m => Slot::Point(j),
                _ => Slot::Diagonal,
            })
            .collect(),
    )
}

/// Maximum bipartite matching; returns the partner of each left vertex.
fn hopcroft_karp(adjacency: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let n_left = adjacency.len();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];

    loop {
        // Layered BFS from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        // Iterative DFS along the layers.
        let mut next_edge = vec![0usize; n_left];
        for root in 0..n_left {
            if match_left[root] != FREE {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&u) = stack.last() {
                if next_edge[u] == adjacency[u].len() {
                    dist[u] = usize::MAX;
                    stack.pop();
                    continue;
                }
                let v = adjacency[u][next_edge[u]];
                next_edge[u] += 1;
                let w = match_right[v];
                if w == FREE {
                    // Augment along the stack.
                    let mut right = v;
                    while let Some(left) = stack.pop() {
                        let prev = match_left[left];
                        match_left[left] = right;
                        match_right[right] = left;
                        right = prev;
                    }
                    break;
                } else if dist[w] == dist[u] + 1 {
                    stack.push(w);
                }
            }
        }
    }
    match_left
        .into_iter()
        .map(|v| (v != FREE).then_some(v))
        .collect()
}

/// Exhaustive matching distance for small series: every partial injection of
/// the proper points of `s1` into those of `s2`, everything else sent to the
/// diagonal, plus sorted cornerline pairing.
pub fn matching_distance_bruteforce(s1: &FormalSeries, s2: &FormalSeries) -> Result<ExtendedReal> {
    let (a, la) = expand(s1);
    let (b, lb) = expand(s2);
    if a.len() > MAX_BRUTEFORCE || b.len() > MAX_BRUTEFORCE {
        return Err(Error::SizeGuard(format!(
            "brute force supports at most {MAX_BRUTEFORCE} proper points per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (line_cost, _) = match_lines(&la, &lb);

    fn search(i: usize, a: &[Expanded], b: &[Expanded], used: &mut Vec<bool>, cost: ExtendedReal, best: &mut ExtendedReal) {
        if cost >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .fold(cost, |c, (q, _)| c.max(q.half_persistence()));
            *best = best.min(rest);
            return;
        }
        search(i + 1, a, b, used, cost.max(a[i].half_persistence()), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                search(i + 1, a, b, used, cost.max(delta(a[i].point(), b[j].point())), best);
                used[j] = false;
            }
        }
    }

    let mut best = Infinity;
    search(0, &a, &b, &mut vec![false; b.len()], Finite(0.0), &mut best);
    Ok(best.max(line_cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sublevel::Cornerpoint;
    use std::f64::consts::SQRT_2;

    fn series(points: &[(f64, f64, usize)]) -> FormalSeries {
        FormalSeries::new(points.iter().map(|&(x, y, mult)| Cornerpoint {
            x,
            y: ExtendedReal::from(y),
            mult,
        }))
        .unwrap()
    }

    #[test]
    fn delta_examples() {
        let p = (0.3, Finite(1.1));
        assert_eq!(delta(p, p), Finite(0.0));
        let d = delta((0.0, Finite(SQRT_2)), (0.0, Finite(1.0)));
        assert!((d.to_f64() - (SQRT_2 - 1.0)).abs() < 1e-15);
        assert_eq!(delta((1.0, Infinity), (1.5, Infinity)), Finite(0.5));
        assert_eq!(delta((1.0, Finite(2.0)), (1.5, Infinity)), Infinity);
        assert_eq!(delta((1.0, Infinity), (1.0, Infinity)), Finite(0.0));
    }

    #[test]
    fn delta_is_symmetric_with_diagonal_points() {
        let p = (0.0, Finite(2.0));
        let d = (5.0, Finite(5.0));
        assert_eq!(delta(p, d), Finite(1.0));
        assert_eq!(delta(d, p), Finite(1.0));
    }

    #[test]
    fn distance_examples() {
        let s = series(&[(0.0, 2.0, 1), (0.5, 1.0, 2), (0.0, f64::INFINITY, 1)]);
        assert_eq!(matching_distance(&s, &s).unwrap().d_match, Finite(0.0));

        let single = series(&[(0.0, 2.0, 1)]);
        assert_eq!(matching_distance(&single, &FormalSeries::empty()).unwrap().d_match, Finite(1.0));
        assert_eq!(matching_distance_bruteforce(&single, &FormalSeries::empty()).unwrap(), Finite(1.0));

        let shifted = series(&[(0.5, 2.5, 1)]);
        assert_eq!(matching_distance(&single, &shifted).unwrap().d_match, Finite(0.5));
        assert_eq!(matching_distance_bruteforce(&single, &shifted).unwrap(), Finite(0.5));

        let e = FormalSeries::empty();
        assert_eq!(matching_distance_bruteforce(&e, &e).unwrap(), Finite(0.0));
        assert_eq!(matching_distance(&e, &e).unwrap().d_match, Finite(0.0));

        let l1 = series(&[(0.0, f64::INFINITY, 1)]);
        let l2 = series(&[(0.3, f64::INFINITY, 1)]);
        assert_eq!(matching_distance(&l1, &l2).unwrap().d_match, Finite(0.3));
        assert_eq!(matching_distance_bruteforce(&l1, &l2).unwrap(), Finite(0.3));
    }

    #[test]
    fn unequal_cornerline_counts_are_infinitely_far() {
        let one = series(&[(0.0, f64::INFINITY, 1)]);
        let two = series(&[(0.0, f64::INFINITY, 2)]);
        assert_eq!(matching_distance(&one, &two).unwrap().d_match, Infinity);
        assert_eq!(matching_distance_bruteforce(&one, &two).unwrap(), Infinity);
    }

    #[test]
    fn witness_json() {
        let s1 = series(&[(0.0, 2.0, 1), (0.0, f64::INFINITY, 1)]);
        let s2 = series(&[(0.0, 1.0, 1), (0.2, f64::INFINITY, 1)]);
        let r = matching_distance(&s1, &s2).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        // (0,2) to (0,1) and to the diagonal both cost 1; the lines cost 0.2
        assert_eq!(json["d_match"], serde_json::json!(1.0));
        assert!(json["matching"].as_array().unwrap().len() >= 2);
    }

    #[test]
    fn bruteforce_guard() {
        let big = series(&[(0.0, 1.0, 7)]);
        assert!(matching_distance_bruteforce(&big, &FormalSeries::empty()).is_err());
    }
}
