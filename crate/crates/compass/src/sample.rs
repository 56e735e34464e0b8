//! Seeded sample spaces. The same seed always yields the same matrix.

use std::f64::consts::{PI, TAU};

use compass_core::finite_metric::validate_metric;
use compass_core::{DistanceMatrix, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Space {
    /// Uniform in the square `[-r, r]²`.
    Plane,
    /// Uniform on a polar cap of angular radius `r` in the unit sphere.
    Sphere,
    /// Uniform in polar coordinates in a ball of radius `r` of `H²`.
    Hyperbolic,
    /// Centre plus `n − 1` leg ends at distance `r` of a metric star.
    Tripod,
    /// Vertices of the cube of side `r`; `n` is ignored.
    Cube,
}

impl Space {
    /// Radius used when none is given.
    pub fn default_radius(self) -> f64 {
        match self {
            Space::Sphere => 0.45 * PI,
            _ => 1.0,
        }
    }
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn sphere_dist(p: &[f64], q: &[f64]) -> f64 {
    let c = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    euclid(&c, &[0.0; 3]).atan2(p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
}

/// `2 asinh(|p − q|_M / 2)` on the hyperboloid.
fn hyperbolic_dist(p: &[f64], q: &[f64]) -> f64 {
    let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let m = (d[1] * d[1] + d[2] * d[2] - d[0] * d[0]).max(0.0);
    2.0 * (0.5 * m.sqrt()).asinh()
}

fn from_points(points: &[Vec<f64>], d: impl Fn(&[f64], &[f64]) -> f64) -> Result<DistanceMatrix> {
    let rows: Vec<Vec<f64>> =
        points.iter().enumerate().map(|(i, p)| points.iter().enumerate().map(|(j, q)| if i == j { 0.0 } else { d(p, q) }).collect()).collect();
    validate_metric(Vec::new(), &rows)
}

pub fn generate(space: Space, n: usize, radius: f64, seed: u64) -> Result<DistanceMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match space {
        Space::Plane => {
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)]).collect();
            from_points(&pts, euclid)
        }
        Space::Sphere => {
            let zmin = radius.cos();
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let z: f64 = rng.gen_range(zmin..1.0);
                    let phi: f64 = rng.gen_range(0.0..TAU);
                    let s = (1.0 - z * z).sqrt();
                    vec![s * phi.cos(), s * phi.sin(), z]
                })
                .collect();
            from_points(&pts, sphere_dist)
        }
        Space::Hyperbolic => {
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let r: f64 = rng.gen_range(0.0..radius);
                    let phi: f64 = rng.gen_range(0.0..TAU);
                    vec![r.cosh(), r.sinh() * phi.cos(), r.sinh() * phi.sin()]
                })
                .collect();
            from_points(&pts, hyperbolic_dist)
        }
        Space::Tripod => {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match (i, j) {
                            _ if i == j => 0.0,
                            (0, _) | (_, 0) => radius,
                            _ => 2.0 * radius,
                        })
                        .collect()
                })
                .collect();
            validate_metric(Vec::new(), &rows)
        }
        Space::Cube => {
            let pts: Vec<Vec<f64>> =
                (0..8).map(|v: u32| (0..3).map(|b| if v >> b & 1 == 1 { radius } else { 0.0 }).collect()).collect();
            from_points(&pts, euclid)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_fix_the_sample() {
        for s in [Space::Plane, Space::Sphere, Space::Hyperbolic] {
            assert_eq!(generate(s, 6, s.default_radius(), 3).unwrap(), generate(s, 6, s.default_radius(), 3).unwrap());
            assert_ne!(generate(s, 6, s.default_radius(), 3).unwrap(), generate(s, 6, s.default_radius(), 4).unwrap());
        }
    }

    #[test]
    fn tripod_and_cube() {
        let t = generate(Space::Tripod, 4, 1.0, 0).unwrap();
        assert_eq!(t.get(1, 2), 2.0);
        let c = generate(Space::Cube, 0, 1.0, 0).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.diameter(), 3f64.sqrt());
    }
}
