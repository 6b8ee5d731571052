mod common;

use common::{graph, scalar_on};
use proptest::prelude::*;
use rand::Rng;
use sizefn::matching::{delta, matching_distance, matching_distance_bruteforce};
use sizefn::sublevel::{cornerpoints, evaluate_from_series, ScalarField};
use sizefn::synth::random_series;
use sizefn::ExtendedReal;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        ..ProptestConfig::default()
    }
}

fn close(a: ExtendedReal, b: ExtendedReal, tol: f64) -> bool {
    match (a, b) {
        (ExtendedReal::Infinity, ExtendedReal::Infinity) => true,
        (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn agrees_with_bruteforce(seed: u64) {
        let mut rng = common::rng(seed);
        let a = random_series(&mut rng, 5, 2);
        let b = random_series(&mut rng, 5, 2);
        let fast = matching_distance(&a, &b).unwrap().d_match;
        let slow = matching_distance_bruteforce(&a, &b).unwrap();
        prop_assert!(close(fast, slow, 1e-12), "{} vs {}", fast, slow);
    }

    #[test]
    fn symmetric_and_triangle(seed: u64) {
        let mut rng = common::rng(seed);
        let [a, b, c] = [0; 3].map(|_| random_series(&mut rng, 4, 1));
        let ab = matching_distance(&a, &b).unwrap().d_match;
        prop_assert_eq!(ab, matching_distance(&b, &a).unwrap().d_match);
        let bc = matching_distance(&b, &c).unwrap().d_match;
        let ac = matching_distance(&a, &c).unwrap().d_match;
        if let (Some(ab), Some(bc), Some(ac)) = (ab.finite(), bc.finite(), ac.finite()) {
            prop_assert!(ac <= ab + bc + 1e-9);
        } else {
            prop_assert!(!(ab.is_finite() && bc.is_finite()) || ac.is_finite());
        }
        prop_assert_eq!(matching_distance(&a, &a).unwrap().d_match, ExtendedReal::Finite(0.0));
    }

    #[test]
    fn delta_is_symmetric(x1 in -3.0f64..3.0, d1 in 0.01f64..3.0, x2 in -3.0f64..3.0, d2 in 0.01f64..3.0, inf1: bool, inf2: bool) {
        let y = |x: f64, d: f64, inf: bool| if inf { ExtendedReal::Infinity } else { ExtendedReal::Finite(x + d) };
        let p = (x1, y(x1, d1, inf1));
        let q = (x2, y(x2, d2, inf2));
        prop_assert_eq!(delta(p, q), delta(q, p));
        prop_assert_eq!(delta(p, p), ExtendedReal::Finite(0.0));
    }

    #[test]
    fn stable_under_perturbation(seed: u64, n in 1usize..120) {
        let g = graph(seed, n, 1, None);
        let mut rng = common::rng(seed ^ 0xf00d);
        let eps: f64 = rng.gen_range(0.01..0.5);
        let f = g.component(0);
        let f2: Vec<f64> = f.iter().map(|v| v + rng.gen_range(-eps..=eps)).collect();
        let g2 = scalar_on(&g, &f2);
        let s1 = cornerpoints(&g, &ScalarField::from_scalar_graph(&g).unwrap());
        let s2 = cornerpoints(&g2, &ScalarField::from_scalar_graph(&g2).unwrap());
        let d = matching_distance(&s1, &s2).unwrap().d_match;
        prop_assert!(d <= ExtendedReal::Finite(eps + 1e-9), "d = {} eps = {}", d, eps);
    }

    #[test]
    fn evaluation_bound_under_small_distance(seed: u64) {
        // d_match ≤ 2ε implies ℓ_ψ(s−ε, t+ε) ≤ ℓ_ψ′(s+ε, t−ε) when s+ε < t−ε
        let mut rng = common::rng(seed);
        let a = random_series(&mut rng, 5, 2);
        let b = random_series(&mut rng, 5, 2);
        let Some(d) = matching_distance(&a, &b).unwrap().d_match.finite() else { return Ok(()) };
        let eps = d / 2.0 + 1e-12;
        for _ in 0..30 {
            let s: f64 = rng.gen_range(-0.5..4.5);
            let t = s + rng.gen_range(0.0..3.0);
            if s + eps < t - eps {
                let lhs = evaluate_from_series(&a, s - eps, t + eps).unwrap();
                let rhs = evaluate_from_series(&b, s + eps, t - eps).unwrap();
                prop_assert!(lhs <= rhs, "({}, {}) eps {}: {} > {}", s, t, eps, lhs, rhs);
            }
        }
    }
}
