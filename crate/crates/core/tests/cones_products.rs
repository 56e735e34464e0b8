mod common;

use common::*;
use compass_core::cones_products::*;
use compass_core::finite_metric::{certify_curvature, validate_metric};
use compass_core::Curvature;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn cone_over_a_circle_arc_is_flat() {
    // Σ = arc of the unit circle, so the cone is a planar sector
    let angles = [0.0, 0.4, 0.9, 1.3, 2.0];
    let sigma = line(&angles);
    let points: Vec<ConePoint> = (0..angles.len()).flat_map(|i| PROBE_RADII.map(|r| ConePoint::new(i, r))).collect();
    let cone = cone_metric(&sigma, &points).unwrap();
    let plane: Vec<Vec<f64>> = points.iter().map(|p| vec![p.radius * angles[p.direction].cos(), p.radius * angles[p.direction].sin()]).collect();
    let m = matrix(&plane, euclid);
    for (a, &i) in cone.index.iter().enumerate() {
        for (b, &j) in cone.index.iter().enumerate() {
            assert!((cone.matrix.get(i, j) - m.get(a, b)).abs() < 1e-12);
        }
    }
    assert!(certify_curvature(Curvature(0.0), &cone.matrix, 1e-9).passed());
}

#[test]
fn probe_on_a_sphere_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sigma = matrix(&sphere_points(&mut rng, 5, 1.0), sphere_dist);
    let probe = cone_transfer_probe(&sigma, 1e-9).unwrap();
    assert!(probe.sigma.passed() && probe.cone.passed() && !probe.anomaly);
}

#[test]
fn products_of_lines_are_planar() {
    let p = product_metric(&line(&[0.0, 1.0, 2.5]), &line(&[0.0, 0.5, 3.0]));
    assert_eq!(p.len(), 9);
    assert!(certify_curvature(Curvature(0.0), &p, 1e-9).passed());
    // (0,0) to (2,2) on the diagonal of the square grid [0,1,2]²
    let sq = product_metric(&line(&[0.0, 1.0, 2.0]), &line(&[0.0, 1.0, 2.0]));
    assert!(diagonal_distance_check(&sq, 0, 8, 1e-12).unwrap().passed);
}

#[test]
fn sphere_arcs_have_geodesic_length() {
    let p = vec![1.0, 0.0, 0.0];
    let q = vec![0.0, 0.6, 0.8];
    assert!(curve_length_check(&SphereGeodesics, &p, &q, 64, 1e-12).passed);
}

proptest! {
    #[test]
    fn cone_matrices_are_metrics(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = matrix(&sphere_points(&mut rng, 4, 1.4), sphere_dist);
        let points: Vec<ConePoint> = (0..8).map(|_| ConePoint::new(rng.gen_range(0..4), rng.gen_range(0.0..3.0))).collect();
        let cone = cone_metric(&sigma, &points).unwrap();
        prop_assert!(validate_metric(cone.matrix.labels().to_vec(), &cone.matrix.rows()).is_ok());
    }

    #[test]
    fn euclidean_center_is_affine(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = plane_points(&mut rng, k);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let tail: f64 = w[..k - 1].iter().sum();
        w[k - 1] = 1.0 - tail;
        let z = center_of_mass(&EuclideanSegments, &pts, &w).unwrap();
        for c in 0..2 {
            let affine: f64 = pts.iter().zip(&w).map(|(p, w)| w * p[c]).sum();
            prop_assert!((z[c] - affine).abs() < 1e-12);
        }
    }
}
