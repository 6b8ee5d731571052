//! The half-plane foliation of `Δ⁺ = {x⃗ ≺ y⃗}`: admissible pairs, the reduced
//! measuring function `F = max_i (φ_i − b_i)/l_i`, and the power-mean
//! approximations `F_p`.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::size_pair::SizeGraph;
use crate::sublevel::{count_meeting_components, ScalarField};

const NORM_TOL: f64 = 1e-12;

/// `(l⃗, b⃗)` with `l⃗` a positive Euclidean unit vector and `Σ b_i = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct AdmissiblePair {
    l: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPair {
    l: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<RawPair> for AdmissiblePair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        AdmissiblePair::new(raw.l, raw.b)
    }
}

impl AdmissiblePair {
    /// Checks the admissibility invariants without normalizing.
    pub fn new(l: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if l.is_empty() || l.len() != b.len() {
            return Err(Error::precondition(format!(
                "l and b must be non-empty and equally long ({} vs {})",
                l.len(),
                b.len()
            )));
        }
        if l.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::precondition("admissible pair has a non-finite entry"));
        }
        if let Some(i) = l.iter().position(|&li| li <= 0.0) {
            return Err(Error::precondition(format!("non-positive component l[{i}] = {}", l[i])));
        }
        let norm = l.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::precondition(format!("l is not a unit vector (‖l‖₂ = {norm})")));
        }
        let sum: f64 = b.iter().sum();
        let scale = b.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        if sum.abs() > NORM_TOL * scale {
            return Err(Error::precondition(format!("Σb = {sum} is not zero")));
        }
        Ok(AdmissiblePair { l, b })
    }

    /// The only admissible pair for `k = 1`.
    pub fn identity() -> Self {
        AdmissiblePair {
            l: vec![1.0],
            b: vec![0.0],
        }
    }

    pub fn k(&self) -> usize {
        self.l.len()
    }

    pub fn l(&self) -> &[f64] {
        &self.l
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn min_l(&self) -> f64 {
        self.l.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `‖(l, b) − (l′, b′)‖∞`.
    pub fn sup_distance(&self, other: &AdmissiblePair) -> f64 {
        self.l
            .iter()
            .zip(&other.l)
            .chain(self.b.iter().zip(&other.b))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Normalizes `l_raw` to unit Euclidean length and removes the mean of `b_raw`.
pub fn make_admissible(l_raw: &[f64], b_raw: &[f64]) -> Result<AdmissiblePair> {
    if l_raw.len() != b_raw.len() || l_raw.is_empty() {
        return Err(Error::precondition("l and b must be non-empty and equally long"));
    }
    if let Some(i) = l_raw.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::precondition(format!("non-positive component l[{i}] = {}", l_raw[i])));
    }
    let norm = l_raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let l = l_raw.iter().map(|v| v / norm).collect();
    AdmissiblePair::new(l, demean(b_raw))
}

fn demean(b: &[f64]) -> Vec<f64> {
    let mean = b.iter().sum::<f64>() / b.len() as f64;
    b.iter().map(|v| v - mean).collect()
}

fn check_dim(g: &SizeGraph, p: &AdmissiblePair) -> Result<()> {
    if g.k() != p.k() {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: p.k(),
        });
    }
    Ok(())
}

/// `Φ_i(P) = (φ_i(P) − b_i)/l_i` for one vertex.
pub fn normalized_components(g: &SizeGraph, p: &AdmissiblePair, v: usize) -> Vec<f64> {
    g.values_of(v)
        .iter()
        .zip(p.l.iter().zip(&p.b))
        .map(|(phi, (l, b))| (phi - b) / l)
        .collect()
}

/// `F(P) = max_i (φ_i(P) − b_i)/l_i`.
pub fn reduce_measuring(g: &SizeGraph, p: &AdmissiblePair) -> Result<ScalarField> {
    check_dim(g, p)?;
    let values = (0..g.n_vertices())
        .map(|v| {
            g.values_of(v)
                .iter()
                .zip(p.l.iter().zip(&p.b))
                .map(|(phi, (l, b))| (phi - b) / l)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(ScalarField::from_vec_unchecked(values))
}

/// `ℓ(x⃗, y⃗)` computed directly from componentwise sublevel sets.
pub fn size_function_multi(g: &SizeGraph, x: &[f64], y: &[f64]) -> Result<usize> {
    if x.len() != g.k() || y.len() != g.k() {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: x.len().max(y.len()),
        });
    }
    if !x.iter().zip(y).all(|(a, b)| a < b) {
        return Err(Error::precondition("multidimensional size function needs x ≺ y"));
    }
    let below = |v: usize, level: &[f64]| g.values_of(v).iter().zip(level).all(|(phi, t)| phi <= t);
    Ok(count_meeting_components(g, |v| below(v, y), |v| below(v, x)))
}

/// A point `(s, t)`, `s < t`, of the half-plane `π_(l,b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub pair: AdmissiblePair,
    pub s: f64,
    pub t: f64,
}

impl PlanePoint {
    pub fn new(pair: AdmissiblePair, s: f64, t: f64) -> Result<Self> {
        if !(s < t) {
            return Err(Error::precondition(format!("plane point needs s < t, got ({s}, {t})")));
        }
        Ok(PlanePoint { pair, s, t })
    }
}

/// `(x⃗, y⃗) = (s·l⃗ + b⃗, t·l⃗ + b⃗)`.
pub fn plane_point(pp: &PlanePoint) -> (Vec<f64>, Vec<f64>) {
    let at = |u: f64| -> Vec<f64> {
        pp.pair
            .l
            .iter()
            .zip(&pp.pair.b)
            .map(|(l, b)| u * l + b)
            .collect()
    };
    (at(pp.s), at(pp.t))
}

/// The unique half-plane through `(x⃗, y⃗)` and the coordinates on it.
pub fn locate_half_plane(x: &[f64], y: &[f64]) -> Result<PlanePoint> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::precondition("x and y must be non-empty and equally long"));
    }
    if !x.iter().zip(y).all(|(a, b)| a < b) {
        return Err(Error::precondition("locate_half_plane needs x ≺ y"));
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - a).collect();
    let len = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
    let l: Vec<f64> = diff.iter().map(|d| d / len).collect();
    let s = x.iter().sum::<f64>() / l.iter().sum::<f64>();
    let b: Vec<f64> = x.iter().zip(&l).map(|(xi, li)| xi - s * li).collect();
    let pair = AdmissiblePair::new(l, demean(&b))?;
    PlanePoint::new(pair, s, s + len)
}

/// Smallest admissible shift: `1 + |min_{P,i} Φ_i(P)|`.
pub fn default_fp_shift(g: &SizeGraph, p: &AdmissiblePair) -> Result<f64> {
    check_dim(g, p)?;
    let min = (0..g.n_vertices())
        .flat_map(|v| normalized_components(g, p, v))
        .fold(f64::INFINITY, f64::min);
    Ok(if min.is_finite() { 1.0 + min.abs() } else { 1.0 })
}

/// `F_p(Q) = (Σ_i (Φ_i(Q) + c)^p)^{1/p} − c`.
///
/// Evaluated as `m·(Σ ((Φ_i + c)/m)^p)^{1/p} − c` with `m = max_i (Φ_i + c)`
/// so large exponents do not overflow.
pub fn approx_fp(g: &SizeGraph, p: &AdmissiblePair, exponent: u32, c: f64) -> Result<ScalarField> {
    check_dim(g, p)?;
    if exponent == 0 {
        return Err(Error::precondition("power-mean exponent must be at least 1"));
    }
    let mut out = Vec::with_capacity(g.n_vertices());
    for v in 0..g.n_vertices() {
        let shifted: Vec<f64> = normalized_components(g, p, v).iter().map(|phi| phi + c).collect();
        if let Some(bad) = shifted.iter().find(|&&u| !(u > 0.0)) {
            return Err(Error::precondition(format!(
                "shift c = {c} leaves a non-positive base {bad} at vertex {v}"
            )));
        }
        let m = shifted.iter().copied().fold(0.0, f64::max);
        let pe = exponent as f64;
        let sum: f64 = shifted.iter().map(|u| (u / m).powf(pe)).sum();
        out.push(m * sum.powf(1.0 / pe) - c);
    }
    Ok(ScalarField::from_vec_unchecked(out))
}

/// Per-vertex `max_i{Φ_i + c}·(k^{1/p} − 1)`.
pub fn fp_error_bound(g: &SizeGraph, p: &AdmissiblePair, exponent: u32, c: f64) -> Result<Vec<f64>> {
    check_dim(g, p)?;
    let factor = (g.k() as f64).powf(1.0 / exponent as f64) - 1.0;
    Ok((0..g.n_vertices())
        .map(|v| {
            normalized_components(g, p, v)
                .iter()
                .map(|phi| phi + c)
                .fold(f64::NEG_INFINITY, f64::max)
                * factor
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStrategy {
    Grid,
    Random,
}

impl FromStr for SampleStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(SampleStrategy::Grid),
            "random" => Ok(SampleStrategy::Random),
            other => Err(Error::precondition(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Deterministic samples of admissible pairs.
///
/// `grid` (k = 2 only) takes cell midpoints of an `⌈√n⌉ × ⌈n/⌈√n⌉⌉` lattice
/// over `θ ∈ (0, π/2)` and `a ∈ [−A, A]`, with `l = (cos θ, sin θ)` and
/// `b = (a, −a)`, keeping the first `n` in θ-major order. `random` draws
/// `l_raw ∈ (0.05, 1]^k` and `b_raw ∈ [−A, A]^k` from a ChaCha stream seeded by
/// `seed`. For `k = 1` the single admissible pair is returned once.
pub fn sample_admissible(
    k: usize,
    n: usize,
    strategy: SampleStrategy,
    seed: u64,
    offset_range: f64,
) -> Result<Vec<AdmissiblePair>> {
    if k == 0 || n == 0 {
        return Err(Error::precondition("sampling needs k ≥ 1 and n ≥ 1"));
    }
    if !(offset_range >= 0.0 && offset_range.is_finite()) {
        return Err(Error::precondition("offset range must be finite and non-negative"));
    }
    if k == 1 {
        return Ok(vec![AdmissiblePair::identity()]);
    }
    match strategy {
        SampleStrategy::Grid => {
            if k != 2 {
                return Err(Error::precondition(format!("grid sampling is defined for k = 2 only, got k = {k}")));
            }
            let n_theta = (n as f64).sqrt().ceil() as usize;
            let n_a = n.div_ceil(n_theta);
            let mut out = Vec::with_capacity(n);
            'outer: for i in 0..n_theta {
                let theta = (i as f64 + 0.5) * std::f64::consts::FRAC_PI_2 / n_theta as f64;
                for j in 0..n_a {
                    if out.len() == n {
                        break 'outer;
                    }
                    let a = -offset_range + (j as f64 + 0.5) * 2.0 * offset_range / n_a as f64;
                    out.push(AdmissiblePair::new(vec![theta.cos(), theta.sin()], vec![a, -a])?);
                }
            }
            Ok(out)
        }
        SampleStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let l: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..=1.0)).collect();
                    let b: Vec<f64> = (0..k)
                        .map(|_| {
                            if offset_range > 0.0 {
                                rng.gen_range(-offset_range..=offset_range)
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    make_admissible(&l, &b)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn make_admissible_examples() {
        let p = make_admissible(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(p.l()[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.l()[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(p.b(), &[0.0, 0.0]);

        let p = make_admissible(&[3.0, 4.0], &[1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(p.l()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(p.l()[1], 0.8, epsilon = 1e-15);
        assert_eq!(p.b(), &[-1.0, 1.0]);

        let err = make_admissible(&[2.0, 0.0, 0.0], &[0.0; 3]).unwrap_err();
        assert!(err.to_string().contains("non-positive component"));
        assert!(make_admissible(&[0.0, 0.0], &[0.0; 2]).is_err());
    }

    #[test]
    fn reduce_examples() {
        let g = SizeGraph::new(2, vec![vec![3.0, 1.0]], vec![], None, None).unwrap();
        let p = make_admissible(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let f = reduce_measuring(&g, &p).unwrap();
        assert_abs_diff_eq!(f.values()[0], 3.0 * SQRT_2, epsilon = 1e-12);

        let g1 = SizeGraph::scalar(&[0.25, -1.0], &[[0, 1]]).unwrap();
        let f1 = reduce_measuring(&g1, &AdmissiblePair::identity()).unwrap();
        assert_eq!(f1.values(), &[0.25, -1.0]);

        assert!(reduce_measuring(&g1, &p).is_err());
    }

    #[test]
    fn plane_point_examples() {
        let p = make_admissible(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let (x, y) = plane_point(&PlanePoint::new(p, 1.0, 2.0).unwrap());
        assert_abs_diff_eq!(x[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(y[1], SQRT_2, epsilon = 1e-15);
        assert!(PlanePoint::new(AdmissiblePair::identity(), 1.0, 1.0).is_err());

        let (x, y) = plane_point(&PlanePoint::new(AdmissiblePair::identity(), -0.5, 3.0).unwrap());
        assert_eq!((x, y), (vec![-0.5], vec![3.0]));
    }

    #[test]
    fn locate_examples() {
        let pp = locate_half_plane(&[1.0, 0.0], &[2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(pp.pair.l()[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.s, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.t, 3.0 * FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.pair.b()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.pair.b()[1], -0.5, epsilon = 1e-15);

        let (s, t) = (0.3, 1.7);
        let pp = locate_half_plane(&[s / SQRT_2, s / SQRT_2], &[t / SQRT_2, t / SQRT_2]).unwrap();
        assert_abs_diff_eq!(pp.pair.b()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.s, s, epsilon = 1e-12);
        assert_abs_diff_eq!(pp.t, t, epsilon = 1e-12);

        let pp = locate_half_plane(&[0.4], &[2.0]).unwrap();
        assert_eq!(pp.pair, AdmissiblePair::identity());
        assert_eq!((pp.s, pp.t), (0.4, 2.0));

        assert!(locate_half_plane(&[0.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn fp_examples() {
        let p = make_admissible(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        // Φ = φ/l; pick φ so that Φ = (1, 1) and (1, 0).
        let g = SizeGraph::new(
            2,
            vec![vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![FRAC_1_SQRT_2, 0.0]],
            vec![[0, 1]],
            None,
            None,
        )
        .unwrap();
        let f1 = approx_fp(&g, &p, 1, 1.0).unwrap();
        assert_abs_diff_eq!(f1.values()[0], 3.0, epsilon = 1e-12);
        let bound = fp_error_bound(&g, &p, 1, 1.0).unwrap();
        assert_abs_diff_eq!(bound[0], 2.0, epsilon = 1e-12);

        let f2 = approx_fp(&g, &p, 2, 1.0).unwrap();
        assert_abs_diff_eq!(f2.values()[1], 5f64.sqrt() - 1.0, epsilon = 1e-12);
        let bound = fp_error_bound(&g, &p, 2, 1.0).unwrap();
        assert_abs_diff_eq!(bound[1], 2.0 * (SQRT_2 - 1.0), epsilon = 1e-12);

        assert!(approx_fp(&g, &p, 2, -0.5).is_err());

        let g1 = SizeGraph::scalar(&[0.3, -2.0], &[[0, 1]]).unwrap();
        let id = AdmissiblePair::identity();
        for e in [1, 2, 7, 64] {
            let fp = approx_fp(&g1, &id, e, 3.0).unwrap();
            assert_abs_diff_eq!(fp.values()[0], 0.3, epsilon = 1e-12);
            assert_abs_diff_eq!(fp.values()[1], -2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampling_examples() {
        let one = sample_admissible(2, 1, SampleStrategy::Grid, 0, 1.0).unwrap();
        assert_abs_diff_eq!(one[0].l()[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(one[0].l()[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(one[0].b(), &[0.0, -0.0]);

        assert_eq!(sample_admissible(1, 9, SampleStrategy::Random, 3, 1.0).unwrap(), vec![AdmissiblePair::identity()]);
        assert_eq!(sample_admissible(2, 20, SampleStrategy::Grid, 0, 1.0).unwrap().len(), 20);
        assert_eq!(sample_admissible(2, 7, SampleStrategy::Grid, 0, 1.0).unwrap().len(), 7);
        assert!(sample_admissible(3, 4, SampleStrategy::Grid, 0, 1.0).is_err());

        let a = sample_admissible(3, 10, SampleStrategy::Random, 42, 2.0).unwrap();
        let b = sample_admissible(3, 10, SampleStrategy::Random, 42, 2.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pair_json() {
        let p: AdmissiblePair = serde_json::from_str(r#"{"l":[0.6,0.8],"b":[-1,1]}"#).unwrap();
        assert_eq!(p.l(), &[0.6, 0.8]);
        assert!(serde_json::from_str::<AdmissiblePair>(r#"{"l":[1,1],"b":[0,0]}"#).is_err());
    }
}
