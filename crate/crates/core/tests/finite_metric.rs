mod common;

use common::*;
use compass_core::finite_metric::{
    certify_apexes, certify_curvature, curvature_scan, from_graph, point_on_side_defect, validate_metric, voronoi_assign,
    CertificationReport, GateFailure,
};
use compass_core::Curvature;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn exact_samples_pass_at_their_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let plane = matrix(&plane_points(&mut rng, 12), euclid);
    assert!(certify_curvature(Curvature(0.0), &plane, 1e-9).passed());
    let sphere = matrix(&sphere_points(&mut rng, 12, 1.2), sphere_dist);
    assert!(certify_curvature(Curvature(1.0), &sphere, 1e-9).passed());
    let hyp = matrix(&hyperbolic_points(&mut rng, 12, 1.5), hyperbolic_dist);
    assert!(certify_curvature(Curvature(-1.0), &hyp, 1e-9).passed());
}

#[test]
fn curved_samples_fail_above_their_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let hyp = matrix(&hyperbolic_points(&mut rng, 14, 2.0), hyperbolic_dist);
    let rep = certify_curvature(Curvature(0.0), &hyp, 1e-9);
    assert!(!rep.passed());
    assert!(rep.violations.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn cap_sample_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sphere = matrix(&sphere_points(&mut rng, 14, 1.1), sphere_dist);
    let scan = curvature_scan(&sphere, &[-1.0, 0.0, 1.0, 1.5], 1e-9).unwrap();
    assert!(scan.rows[..3].iter().all(|r| r.passed));
    let last = &scan.rows[3];
    assert!(!last.passed && last.gate.is_none() && last.violations > 0);
    assert_eq!(scan.largest_passing, Some(1.0));
}

#[test]
fn myers_gate_for_wide_matrices() {
    let m = validate_metric(Vec::new(), &[vec![0.0, 3.2, 2.0], vec![3.2, 0.0, 1.5], vec![2.0, 1.5, 0.0]]).unwrap();
    let rep = certify_curvature(Curvature(1.0), &m, 1e-9);
    assert!(matches!(rep.gate, Some(GateFailure::Myers { .. })));
    assert_eq!(rep.checked, 0);
}

#[test]
fn graph_and_matrix_agree() {
    let g = from_graph(
        (0..4).map(|i| i.to_string()).collect(),
        &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 5.0), (0, 2, 2.5)],
    )
    .unwrap();
    assert_eq!(g.rows()[0], vec![0.0, 1.0, 2.5, 3.5]);
    assert_eq!(validate_metric(g.labels().to_vec(), &g.rows()).unwrap(), g);
}

#[test]
fn point_on_side_in_the_plane_is_exact() {
    let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 0.0], vec![1.0, 1.3], vec![-0.7, 0.4]];
    let m = matrix(&pts, euclid);
    for p in [3, 4] {
        let d = point_on_side_defect(Curvature(0.0), &m, p, 0, 1, 2, 1e-12).unwrap();
        assert!(d.abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plane_samples_never_violate(seed in any::<u64>(), n in 4usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = matrix(&plane_points(&mut rng, n), euclid);
        let rep = certify_curvature(Curvature(0.0), &m, 1e-9);
        prop_assert!(rep.passed(), "{:?}", rep.violations.first());
    }

    #[test]
    fn partial_runs_merge_to_the_whole(seed in any::<u64>(), cut in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = matrix(&hyperbolic_points(&mut rng, 8, 2.5), hyperbolic_dist);
        let k = Curvature(0.0);
        let whole = certify_apexes(k, &m, 1e-9, 0..8);
        let merged = CertificationReport::merge(k, 1e-9, vec![certify_apexes(k, &m, 1e-9, 0..cut), certify_apexes(k, &m, 1e-9, cut..8)]);
        prop_assert_eq!(merged, whole);
    }

    #[test]
    fn voronoi_owner_is_nearest(seed in any::<u64>(), sites in proptest::collection::btree_set(0usize..10, 1..4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = matrix(&plane_points(&mut rng, 10), euclid);
        let sites: Vec<usize> = sites.into_iter().collect();
        let v = voronoi_assign(&m, &sites).unwrap();
        for x in 0..10 {
            let best = sites.iter().map(|&s| m.get(x, s)).fold(f64::INFINITY, f64::min);
            prop_assert!(m.get(x, v.owner[x]) <= best + 1e-12);
        }
        for &s in &sites {
            prop_assert_eq!(v.owner[s], s);
        }
    }
}
