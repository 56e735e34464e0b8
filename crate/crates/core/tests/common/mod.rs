#![allow(dead_code)]

use compass_core::finite_metric::validate_metric;
use compass_core::DistanceMatrix;
use rand::Rng;

pub fn matrix(points: &[Vec<f64>], d: impl Fn(&[f64], &[f64]) -> f64) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> = points.iter().map(|p| points.iter().map(|q| if p == q { 0.0 } else { d(p, q) }).collect()).collect();
    validate_metric(Vec::new(), &rows).unwrap()
}

pub fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Great-circle distance via atan2, accurate at all separations.
pub fn sphere_dist(p: &[f64], q: &[f64]) -> f64 {
    let c = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    s.atan2(p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
}

/// Hyperboloid distance `2 asinh(|x − y|_M / 2)`.
pub fn hyperbolic_dist(p: &[f64], q: &[f64]) -> f64 {
    let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let m = (d[1] * d[1] + d[2] * d[2] - d[0] * d[0]).max(0.0);
    2.0 * (0.5 * m.sqrt()).asinh()
}

pub fn plane_points(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect()
}

/// Uniform points on `S²` with polar angle below `cap`.
pub fn sphere_points(rng: &mut impl Rng, n: usize, cap: f64) -> Vec<Vec<f64>> {
    let zmin = cap.cos();
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(zmin..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (1.0 - z * z).sqrt();
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Points of the hyperboloid `t² − x² − y² = 1` within radius `rmax`.
pub fn hyperbolic_points(rng: &mut impl Rng, n: usize, rmax: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let r: f64 = rng.gen_range(0.0..rmax);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            vec![r.cosh(), r.sinh() * phi.cos(), r.sinh() * phi.sin()]
        })
        .collect()
}

pub fn line(points: &[f64]) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> = points.iter().map(|p| points.iter().map(|q| (p - q).abs()).collect()).collect();
    validate_metric(Vec::new(), &rows).unwrap()
}
