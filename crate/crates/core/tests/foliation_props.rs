mod common;

use common::{graph, naive_size};
use proptest::prelude::*;
use rand::Rng;
use sizefn::foliation::{
    approx_fp, default_fp_shift, fp_error_bound, locate_half_plane, make_admissible, plane_point, reduce_measuring,
    sample_admissible, size_function_multi, PlanePoint, SampleStrategy,
};
use sizefn::matching::matching_distance;
use sizefn::sublevel::{cornerpoints, size_function_1d};
use sizefn::{AdmissiblePair, ExtendedReal};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

fn random_pair(rng: &mut impl Rng, k: usize) -> AdmissiblePair {
    let l: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    make_admissible(&l, &b).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn reduction_equivalence(seed: u64, n in 1usize..100, k in 2usize..=3) {
        let g = graph(seed, n, k, None);
        let mut rng = common::rng(!seed);
        for _ in 0..10 {
            let p = random_pair(&mut rng, k);
            let f = reduce_measuring(&g, &p).unwrap();
            let s: f64 = rng.gen_range(-3.0..3.0);
            let t = s + rng.gen_range(0.001..4.0);
            let (x, y) = plane_point(&PlanePoint::new(p.clone(), s, t).unwrap());
            let multi = size_function_multi(&g, &x, &y).unwrap();
            prop_assert_eq!(multi, size_function_1d(&g, &f, s, t).unwrap());
            prop_assert_eq!(multi, naive_size(&g, &x, &y));
        }
    }

    #[test]
    fn half_plane_roundtrip(seed: u64, k in 1usize..=4) {
        let mut rng = common::rng(seed);
        let p = random_pair(&mut rng, k);
        let s: f64 = rng.gen_range(-5.0..5.0);
        let t = s + rng.gen_range(0.01..5.0);
        let pp = PlanePoint::new(p.clone(), s, t).unwrap();
        let (x, y) = plane_point(&pp);
        let back = locate_half_plane(&x, &y).unwrap();
        prop_assert!(back.pair.sup_distance(&p) <= 1e-9);
        prop_assert!((back.s - s).abs() <= 1e-9 && (back.t - t).abs() <= 1e-9);
        let (x2, y2) = plane_point(&back);
        for (a, b) in x.iter().zip(&x2).chain(y.iter().zip(&y2)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn power_mean_bound(seed: u64, n in 1usize..60, k in 2usize..=3) {
        let g = graph(seed, n, k, None);
        let p = random_pair(&mut common::rng(seed.wrapping_add(1)), k);
        let f = reduce_measuring(&g, &p).unwrap();
        let c = default_fp_shift(&g, &p).unwrap();
        for e in [1u32, 2, 4, 8, 16, 32] {
            let fp = approx_fp(&g, &p, e, c).unwrap();
            let bound = fp_error_bound(&g, &p, e, c).unwrap();
            for (v, bound_v) in bound.iter().enumerate() {
                let err = fp.values()[v] - f.values()[v];
                // F ≤ F_p ≤ F + bound, up to rounding of the power mean
                let slack = 8.0 * f64::EPSILON * (f.values()[v].abs() + c);
                prop_assert!(err >= -slack, "p={} v={} err={}", e, v, err);
                prop_assert!(err <= bound_v + slack, "p={} v={} err={} bound={}", e, v, err, bound_v);
            }
        }
    }

    #[test]
    fn foliation_stability(seed: u64, n in 2usize..60, k in 2usize..=3) {
        let g = graph(seed, n, k, None);
        let mut rng = common::rng(seed ^ 0xabc);
        let p = random_pair(&mut rng, k);
        let target = rng.gen_range(0.01..0.9) * p.min_l();
        let l2: Vec<f64> = p.l().iter().map(|l| l + rng.gen_range(-target..target) / 2.0).map(|l: f64| l.max(1e-3)).collect();
        let b2: Vec<f64> = p.b().iter().map(|b| b + rng.gen_range(-target..target) / 2.0).collect();
        let q = make_admissible(&l2, &b2).unwrap();
        let eps = p.sup_distance(&q);
        prop_assume!(eps > 0.0 && eps < p.min_l());
        let d = matching_distance(
            &cornerpoints(&g, &reduce_measuring(&g, &p).unwrap()),
            &cornerpoints(&g, &reduce_measuring(&g, &q).unwrap()),
        )
        .unwrap()
        .d_match;
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let denom = p.l().iter().map(|l| l * (l - eps)).fold(f64::INFINITY, f64::min);
        let bound = eps * (g.max_abs_value() + sup(p.l()) + sup(p.b())) / denom;
        prop_assert!(d <= ExtendedReal::Finite(bound + 1e-12), "d = {} bound = {}", d, bound);
    }

    #[test]
    fn samples_are_admissible(seed: u64, k in 1usize..=4, n in 1usize..30) {
        for p in sample_admissible(k, n, SampleStrategy::Random, seed, 1.5).unwrap() {
            let norm: f64 = p.l().iter().map(|l| l * l).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() <= 1e-12);
            prop_assert!(p.l().iter().all(|&l| l > 0.0));
            prop_assert!(p.b().iter().sum::<f64>().abs() <= 1e-12);
        }
    }
}

#[test]
fn power_mean_converges_at_high_exponent_on_separated_data() {
    // Separated maxima: the largest normalized component beats the others by
    // a margin, so the error decays geometrically in p.
    let g = sizefn::SizeGraph::new(
        2,
        vec![vec![0.9, 0.1], vec![0.2, 0.7], vec![-0.5, 0.4]],
        vec![[0, 1], [1, 2]],
        None,
        None,
    )
    .unwrap();
    let h = 0.5f64.sqrt();
    let p = AdmissiblePair::new(vec![h, h], vec![0.0, 0.0]).unwrap();
    let f = reduce_measuring(&g, &p).unwrap();
    let c = default_fp_shift(&g, &p).unwrap();
    let fp = approx_fp(&g, &p, 2048, c).unwrap();
    assert!(fp.sup_distance(&f) < 1e-6);
}
