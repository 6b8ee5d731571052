//! Minimum-norm point of the convex hull of a few vectors (Wolfe's algorithm).
//!
//! The Fritz John condition "the convex hull of the gradients contains the
//! null vector" holds exactly when this minimum norm is zero.

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Serialize;

const MAX_ITERATIONS: usize = 10_000;
const OPTIMALITY_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullTest {
    pub flag: bool,
    /// Convex coefficients, one per input vector.
    pub lambdas: Vec<f64>,
    /// `‖Σ λ_i v_i‖` at the minimizer.
    pub residual: f64,
}

/// Decides whether `0 ∈ conv(vectors)` up to `tau_0` on the residual norm.
pub fn convex_hull_contains_zero(vectors: &[Vector3<f64>], tau_0: f64) -> HullTest {
    assert!(!vectors.is_empty(), "hull test needs at least one vector");
    let (lambdas, residual) = min_norm_point(vectors);
    HullTest {
        flag: residual <= tau_0,
        lambdas,
        residual,
    }
}

/// Returns barycentric weights of the minimum-norm point and its norm.
pub fn min_norm_point(points: &[Vector3<f64>]) -> (Vec<f64>, f64) {
    let n = points.len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max);
    if scale == 0.0 {
        return (vec![1.0 / n as f64; n], 0.0);
    }

    let start = (0..n)
        .min_by(|&a, &b| points[a].norm_squared().total_cmp(&points[b].norm_squared()))
        .unwrap();
    let mut corral = vec![start];
    let mut weights = vec![1.0];
    let mut x = points[start];

    for _ in 0..MAX_ITERATIONS {
        if x.norm_squared() == 0.0 {
            break;
        }
        let j = (0..n)
            .min_by(|&a, &b| x.dot(&points[a]).total_cmp(&x.dot(&points[b])))
            .unwrap();
        if x.norm_squared() - x.dot(&points[j]) <= OPTIMALITY_TOL * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        weights.push(0.0);

        // Minor cycles: move towards the affine minimizer of the corral,
        // dropping points whose weight would turn non-positive.
        loop {
            let alpha = affine_minimizer(points, &corral);
            if alpha.iter().all(|&a| a > WEIGHT_TOL) {
                weights = alpha;
                break;
            }
            let mut theta = 1.0;
            let mut leaving = None;
            for (i, (&w, &a)) in weights.iter().zip(&alpha).enumerate() {
                if a <= WEIGHT_TOL && w - a > 0.0 {
                    let ratio = w / (w - a);
                    if ratio < theta {
                        theta = ratio;
                        leaving = Some(i);
                    }
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = theta * a + (1.0 - theta) * *w;
            }
            if let Some(i) = leaving {
                weights[i] = 0.0;
            }
            let mut i = 0;
            while i < corral.len() {
                if weights[i] <= WEIGHT_TOL {
                    corral.remove(i);
                    weights.remove(i);
                } else {
                    i += 1;
                }
            }
            if corral.len() <= 1 {
                weights = vec![1.0; corral.len()];
                break;
            }
        }
        if corral.is_empty() {
            // Numerical breakdown; fall back to the best vertex.
            corral.push(start);
            weights.push(1.0);
            x = points[start];
            break;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        x = corral
            .iter()
            .zip(&weights)
            .fold(Vector3::zeros(), |acc, (&i, &w)| acc + points[i] * w);
    }

    let mut lambdas = vec![0.0; n];
    for (&i, &w) in corral.iter().zip(&weights) {
        lambdas[i] += w;
    }
    (lambdas, x.norm())
}

/// Weights `α` (summing to one) minimizing `‖Σ α_i p_i‖` over the affine hull.
fn affine_minimizer(points: &[Vector3<f64>], corral: &[usize]) -> Vec<f64> {
    let m = corral.len();
    let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
    for (r, &i) in corral.iter().enumerate() {
        for (c, &j) in corral.iter().enumerate() {
            kkt[(r, c)] = points[i].dot(&points[j]);
        }
        kkt[(r, m)] = 1.0;
        kkt[(m, r)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    let solution = kkt
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .or_else(|| kkt.svd(true, true).solve(&rhs, 1e-14).ok())
        .unwrap_or_else(|| {
            let mut uniform = DVector::from_element(m + 1, 1.0 / m as f64);
            uniform[m] = 0.0;
            uniform
        });
    solution.iter().take(m).copied().collect()
}
