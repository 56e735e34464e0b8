//! Euclidean cones, products, the diagonal distance and the iterated
//! center of mass.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::finite_metric::{certify_curvature, validate_metric, CertificationReport, DistanceMatrix};
use crate::gromov_hausdorff::approximate_midpoint;
use crate::math::{acos, dist, dot, norm, sin, sqrt, PI};
use crate::model_space::Curvature;
use crate::report::Report;

/// Radii at which [`cone_transfer_probe`] samples the cone.
pub const PROBE_RADII: [f64; 3] = [0.5, 1.0, 2.0];

/// A point `(v, t)` of the Euclidean cone over a finite space.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConePoint {
    #[cfg_attr(feature = "serde", serde(rename = "dir"))]
    pub direction: usize,
    #[cfg_attr(feature = "serde", serde(rename = "r"))]
    pub radius: f64,
}

impl ConePoint {
    pub fn new(direction: usize, radius: f64) -> Self {
        ConePoint { direction, radius }
    }
}

/// Cone distance: `d² = t² + s² − 2ts cos α` with `α = min(π, d_Σ)`,
/// evaluated as `(t − s)² + 4ts sin²(α/2)`.
pub fn cone_distance(sigma_distance: f64, t: f64, s: f64) -> f64 {
    let h = sin(0.5 * sigma_distance.min(PI));
    sqrt((t - s) * (t - s) + 4.0 * t * s * h * h)
}

/// Cone samples after merging identified points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConeSample {
    pub matrix: DistanceMatrix,
    /// Row of the matrix for every input point.
    pub index: Vec<usize>,
}

/// Distance matrix of cone points. All radius-0 points are the apex and
/// become one row, as do repeated `(v, t)` pairs.
pub fn cone_metric(sigma: &DistanceMatrix, points: &[ConePoint]) -> Result<ConeSample> {
    let mut rows: Vec<ConePoint> = Vec::new();
    let mut index = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if !(p.radius >= 0.0) || !p.radius.is_finite() {
            return Err(Error::NegativeRadius { index: i });
        }
        if p.direction >= sigma.len() {
            return Err(Error::IndexOutOfRange { index: p.direction, len: sigma.len() });
        }
        let same = |q: &ConePoint| {
            (q.radius == 0.0 && p.radius == 0.0) || (q.radius == p.radius && q.direction == p.direction)
        };
        match rows.iter().position(same) {
            Some(r) => index.push(r),
            None => {
                index.push(rows.len());
                rows.push(*p);
            }
        }
    }
    let labels: Vec<String> = rows
        .iter()
        .map(|p| {
            if p.radius == 0.0 {
                "o".to_string()
            } else {
                format!("{}@{}", sigma.labels()[p.direction], p.radius)
            }
        })
        .collect();
    let d: Vec<Vec<f64>> = rows
        .iter()
        .map(|p| {
            rows.iter()
                .map(|q| cone_distance(sigma.get(p.direction, q.direction), p.radius, q.radius))
                .collect()
        })
        .collect();
    let matrix = validate_metric(labels, &d)?;
    Ok(ConeSample { matrix, index })
}

/// `√(d₁² + d₂²)` on the product; point `(i, j)` has index `i·|m2| + j`.
pub fn product_metric(m1: &DistanceMatrix, m2: &DistanceMatrix) -> DistanceMatrix {
    let (n1, n2) = (m1.len(), m2.len());
    let n = n1 * n2;
    let mut labels = Vec::with_capacity(n);
    for a in m1.labels() {
        for b in m2.labels() {
            labels.push(format!("({a},{b})"));
        }
    }
    let mut d = Vec::with_capacity(n * n);
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n1 {
                for l in 0..n2 {
                    let (x, y) = (m1.get(i, k), m2.get(j, l));
                    d.push(sqrt(x * x + y * y));
                }
            }
        }
    }
    DistanceMatrix::from_parts_unchecked(labels, n, d)
}

/// Distance from `(p, q)` to the diagonal of `M × M` against
/// `d(p, q)/√2`. Needs a sample point within `tol` of being a midpoint of
/// `p` and `q`; the report's tolerance is `tol + √2·(midpoint defect)`.
pub fn diagonal_distance_check(m: &DistanceMatrix, p: usize, q: usize, tol: f64) -> Result<Report> {
    for i in [p, q] {
        if i >= m.len() {
            return Err(Error::IndexOutOfRange { index: i, len: m.len() });
        }
    }
    if p == q {
        let mut r = Report::new("diagonal_distance", tol);
        r.observe(0.0, &[("distance", 0.0), ("diagonal_point", p as f64)]);
        return Ok(r);
    }
    let (z, defect) = approximate_midpoint(m, p, q)?;
    if defect > tol {
        return Err(Error::NoMidpoint { defect });
    }
    let target = m.get(p, q) / sqrt(2.0);
    let (best, y) = (0..m.len())
        .map(|y| (sqrt(m.get(p, y) * m.get(p, y) + m.get(q, y) * m.get(q, y)), y))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    let mut r = Report::new("diagonal_distance", tol + sqrt(2.0) * defect);
    r.observe(
        (best - target).abs(),
        &[("distance", best), ("expected", target), ("diagonal_point", y as f64), ("midpoint", z as f64)],
    );
    Ok(r)
}

/// Curves `γ_pq` joining nearby points, parameterized on `[0, 1]` with
/// `γ(p, q, 0) = p` and `γ(p, q, 1) = q`.
pub trait CurveFamily {
    type Point: Clone;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;

    fn curve(&self, p: &Self::Point, q: &Self::Point, t: f64) -> Self::Point;

    /// Curves exist for `d(p, q) < δ`.
    fn delta(&self) -> f64;

    /// `Length(γ_pq) ≤ factor · d(p, q)`.
    fn length_bound_factor(&self) -> f64;
}

/// Straight segments in `ℝⁿ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanSegments;

impl CurveFamily for EuclideanSegments {
    type Point = Vec<f64>;

    fn distance(&self, p: &Vec<f64>, q: &Vec<f64>) -> f64 {
        dist(p, q)
    }

    fn curve(&self, p: &Vec<f64>, q: &Vec<f64>, t: f64) -> Vec<f64> {
        if t == 0.0 {
            return p.clone();
        }
        if t == 1.0 {
            return q.clone();
        }
        p.iter().zip(q).map(|(a, b)| a + t * (b - a)).collect()
    }

    fn delta(&self) -> f64 {
        f64::INFINITY
    }

    fn length_bound_factor(&self) -> f64 {
        1.0
    }
}

/// Minimal great-circle arcs on the unit sphere, for non-antipodal pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct SphereGeodesics;

impl CurveFamily for SphereGeodesics {
    type Point = Vec<f64>;

    fn distance(&self, p: &Vec<f64>, q: &Vec<f64>) -> f64 {
        acos(dot(p, q).clamp(-1.0, 1.0))
    }

    fn curve(&self, p: &Vec<f64>, q: &Vec<f64>, t: f64) -> Vec<f64> {
        if t == 0.0 {
            return p.clone();
        }
        if t == 1.0 {
            return q.clone();
        }
        let a = self.distance(p, q);
        if a == 0.0 {
            return p.clone();
        }
        let (wp, wq) = (sin((1.0 - t) * a) / sin(a), sin(t * a) / sin(a));
        let v: Vec<f64> = p.iter().zip(q).map(|(x, y)| wp * x + wq * y).collect();
        let l = norm(&v);
        v.iter().map(|x| x / l).collect()
    }

    fn delta(&self) -> f64 {
        PI
    }

    fn length_bound_factor(&self) -> f64 {
        1.0
    }
}

/// Length of the polyline through `samples + 1` equally spaced curve
/// points against `factor · d(p, q)`.
pub fn curve_length_check<F: CurveFamily>(family: &F, p: &F::Point, q: &F::Point, samples: usize, tol: f64) -> Report {
    let samples = samples.max(1);
    let pts: Vec<F::Point> = (0..=samples).map(|k| family.curve(p, q, k as f64 / samples as f64)).collect();
    let length: f64 = pts.windows(2).map(|w| family.distance(&w[0], &w[1])).sum();
    let bound = family.length_bound_factor() * family.distance(p, q);
    let mut r = Report::new("curve_length", tol);
    r.observe(length - bound, &[("length", length), ("bound", bound)]);
    r
}

/// Iterated center of mass. With `Λᵢ = λᵢ + … + λ_k`, start from the last
/// point of positive weight and fold earlier points in from the right:
/// `zᵢ = γ(xᵢ, zᵢ₊₁, 1 − λᵢ/Λᵢ)`. For straight segments this is the affine
/// combination `Σ λᵢ xᵢ`.
pub fn center_of_mass<F: CurveFamily>(family: &F, points: &[F::Point], weights: &[f64]) -> Result<F::Point> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), got: weights.len() });
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::WeightsInvalid);
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightsInvalid);
    }
    let delta = family.delta();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if !(family.distance(&points[i], &points[j]) < delta) {
                return Err(Error::PointsTooFarApart { i, j });
            }
        }
    }
    let last = weights.iter().rposition(|&w| w > 0.0).ok_or(Error::WeightsInvalid)?;
    let mut z = points[last].clone();
    let mut tail = weights[last];
    for i in (0..last).rev() {
        tail += weights[i];
        let share = weights[i] / tail;
        z = family.curve(&points[i], &z, 1.0 - share);
    }
    Ok(z)
}

/// Outcome of [`cone_transfer_probe`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConeProbe {
    pub sigma: CertificationReport,
    pub cone: CertificationReport,
    /// `Σ` passes at `κ = 1` while the cone fails at `κ = 0`.
    pub anomaly: bool,
    pub report: Report,
}

/// Samples the cone over `Σ` at radii 1/2, 1, 2 plus the apex and
/// certifies it at `κ = 0`, alongside `Σ` at `κ = 1`. This is a sampled
/// diagnostic: sparse samples can pass vacuously.
pub fn cone_transfer_probe(sigma: &DistanceMatrix, tol: f64) -> Result<ConeProbe> {
    if sigma.diameter() > PI * (1.0 + 1e-9) {
        return Err(Error::PreconditionFailed(format!(
            "angular metric needs diameter at most π, got {}",
            sigma.diameter()
        )));
    }
    let mut pts = vec![ConePoint::new(0, 0.0)];
    for &r in &PROBE_RADII {
        pts.extend((0..sigma.len()).map(|v| ConePoint::new(v, r)));
    }
    let cone = cone_metric(sigma, &pts)?;
    let s = certify_curvature(Curvature(1.0), sigma, tol);
    let c = certify_curvature(Curvature(0.0), &cone.matrix, tol);
    let anomaly = s.passed() && !c.passed();
    let mut report = Report::new("cone_transfer", 0.0);
    report.observe(
        if anomaly { 1.0 } else { 0.0 },
        &[("sigma_passed", s.passed() as u8 as f64), ("cone_passed", c.passed() as u8 as f64)],
    );
    report.note(format!(
        "sigma at curvature 1: {}; cone at curvature 0: {} ({} quadruples, max defect {})",
        if s.passed() { "pass" } else { "fail" },
        if c.passed() { "pass" } else { "fail" },
        c.checked,
        c.max_defect
    ));
    if anomaly {
        report.note("sampled anomaly: inspect the cone violations");
    }
    Ok(ConeProbe { sigma: s, cone: c, anomaly, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gromov_hausdorff::rescale;
    use std::vec;

    fn two_points(d: f64) -> DistanceMatrix {
        validate_metric(Vec::new(), &[vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    fn line(points: &[f64]) -> DistanceMatrix {
        let rows: Vec<Vec<f64>> = points.iter().map(|p| points.iter().map(|q| (p - q).abs()).collect()).collect();
        validate_metric(Vec::new(), &rows).unwrap()
    }

    #[test]
    fn cone_law() {
        let s = two_points(PI / 2.0);
        let c = cone_metric(&s, &[ConePoint::new(0, 1.0), ConePoint::new(1, 1.0)]).unwrap();
        assert!((c.matrix.get(0, 1) - sqrt(2.0)).abs() < 1e-15);
        let wide = validate_metric(Vec::new(), &[vec![0.0, 1.5 * PI], vec![1.5 * PI, 0.0]]).unwrap();
        let c = cone_metric(&wide, &[ConePoint::new(0, 1.0), ConePoint::new(1, 1.0)]).unwrap();
        assert_eq!(c.matrix.get(0, 1), 2.0);
        let c = cone_metric(&s, &[ConePoint::new(0, 1.5), ConePoint::new(1, 0.0), ConePoint::new(0, 0.0)]).unwrap();
        assert_eq!(c.index, vec![0, 1, 1]);
        assert_eq!(c.matrix.get(0, 1), 1.5);
        assert_eq!(cone_metric(&s, &[ConePoint::new(0, -1.0)]), Err(Error::NegativeRadius { index: 0 }));
    }

    #[test]
    fn cone_rescaling() {
        let s = line(&[0.0, 0.4, 1.3, 2.0]);
        let pts: Vec<ConePoint> = (0..4).map(|v| ConePoint::new(v, 0.5 + v as f64)).collect();
        let lam = 2.5;
        let scaled: Vec<ConePoint> = pts.iter().map(|p| ConePoint::new(p.direction, lam * p.radius)).collect();
        let a = cone_metric(&rescale(&s, 1.0).unwrap(), &scaled).unwrap().matrix;
        let b = rescale(&cone_metric(&s, &pts).unwrap().matrix, lam).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.get(i, j) - b.get(i, j)).abs() <= 1e-14 * b.get(i, j).max(1.0));
            }
        }
    }

    #[test]
    fn products() {
        let m = line(&[0.0, 1.0, 3.0]);
        let p = product_metric(&m, &line(&[0.0]));
        assert_eq!(p.rows(), m.rows());
        let seg = line(&[0.0, 1.0]);
        let sq = product_metric(&seg, &seg);
        assert_eq!(sq.get(0, 3), sqrt(2.0));
        assert!(validate_metric(Vec::new(), &product_metric(&m, &seg).rows()).is_ok());
    }

    #[test]
    fn diagonal() {
        let g = line(&(0..=100).map(|i| i as f64 / 100.0).collect::<Vec<_>>());
        let r = diagonal_distance_check(&g, 0, 100, 1e-12).unwrap();
        assert!(r.passed);
        assert_eq!(r.witness_value("diagonal_point"), Some(50.0));
        assert!((r.witness_value("distance").unwrap() - 1.0 / sqrt(2.0)).abs() < 1e-15);
        assert!(diagonal_distance_check(&g, 7, 7, 1e-12).unwrap().passed);
        assert!(matches!(diagonal_distance_check(&two_points(1.0), 0, 1, 1e-9), Err(Error::NoMidpoint { .. })));
    }

    #[test]
    fn centers_of_mass() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let third = 1.0 / 3.0;
        let c = center_of_mass(&EuclideanSegments, &pts, &[third, third, 1.0 - 2.0 * third]).unwrap();
        assert!((c[0] - third).abs() < 1e-15 && (c[1] - third).abs() < 1e-15);
        assert_eq!(center_of_mass(&EuclideanSegments, &pts, &[1.0, 0.0, 0.0]).unwrap(), pts[0]);
        let two = center_of_mass(&EuclideanSegments, &pts[..2], &[0.25, 0.75]).unwrap();
        assert!((two[0] - 0.75).abs() < 1e-15);
        assert_eq!(center_of_mass(&EuclideanSegments, &pts, &[0.5, 0.6, -0.1]), Err(Error::WeightsInvalid));
        let sphere = vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]];
        assert_eq!(
            center_of_mass(&SphereGeodesics, &sphere, &[0.5, 0.5]),
            Err(Error::PointsTooFarApart { i: 0, j: 1 })
        );
        let arc = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let mid = center_of_mass(&SphereGeodesics, &arc, &[0.5, 0.5]).unwrap();
        assert!((mid[0] - mid[1]).abs() < 1e-15 && (norm(&mid) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curve_lengths() {
        let r = curve_length_check(&EuclideanSegments, &vec![0.0, 0.0], &vec![3.0, 4.0], 10, 1e-12);
        assert!(r.passed);
        let r = curve_length_check(&SphereGeodesics, &vec![1.0, 0.0, 0.0], &vec![0.0, 0.0, 1.0], 16, 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn probes() {
        let quarter = |i: usize, j: usize| {
            let k = (i as i64 - j as i64).rem_euclid(4) as usize;
            k.min(4 - k) as f64 * PI / 2.0
        };
        let circle = validate_metric(Vec::new(), &(0..4).map(|i| (0..4).map(|j| quarter(i, j)).collect()).collect::<Vec<_>>()).unwrap();
        let p = cone_transfer_probe(&circle, 1e-9).unwrap();
        assert!(p.sigma.passed() && p.cone.passed() && !p.anomaly);

        let line_sigma = two_points(PI);
        let p = cone_transfer_probe(&line_sigma, 1e-9).unwrap();
        assert!(p.cone.passed());

        let tri = validate_metric(Vec::new(), &[vec![0.0, PI, PI], vec![PI, 0.0, 0.1], vec![PI, 0.1, 0.0]]).unwrap();
        let p = cone_transfer_probe(&tri, 1e-9).unwrap();
        assert!(!p.sigma.passed());
        assert!(!p.cone.passed());
        assert!(!p.cone.violations.is_empty());
        assert!(!p.anomaly);
    }
}
