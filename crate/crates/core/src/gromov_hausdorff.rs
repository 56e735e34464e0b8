//! Hausdorff and Gromov-Hausdorff distances between finite metric spaces.
//!
//! The GH distance of finite spaces is computed as half the minimal
//! distortion of a correspondence.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::finite_metric::DistanceMatrix;
use crate::report::Report;

/// Default cap on `|X|` and `|Y|` for [`gh_distance_exact`].
pub const DEFAULT_SIZE_LIMIT: usize = 6;

/// A total map between the points of two finite spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMap<'a> {
    pub source: &'a DistanceMatrix,
    pub target: &'a DistanceMatrix,
    pub assignment: Vec<usize>,
}

impl<'a> PointMap<'a> {
    pub fn new(source: &'a DistanceMatrix, target: &'a DistanceMatrix, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::DimensionMismatch { expected: source.len(), got: assignment.len() });
        }
        if let Some(&bad) = assignment.iter().find(|&&t| t >= target.len()) {
            return Err(Error::IndexOutOfRange { index: bad, len: target.len() });
        }
        Ok(PointMap { source, target, assignment })
    }

    pub fn identity(m: &'a DistanceMatrix) -> Self {
        PointMap { source: m, target: m, assignment: (0..m.len()).collect() }
    }

    /// `max |d_Y(f x, f x') − d_X(x, x')|` with the first worst pair.
    pub fn distortion(&self) -> (f64, Option<(usize, usize)>) {
        let n = self.source.len();
        let mut worst = (0.0, None);
        for i in 0..n {
            for j in (i + 1)..n {
                let e = (self.target.get(self.assignment[i], self.assignment[j]) - self.source.get(i, j)).abs();
                if e > worst.0 || worst.1.is_none() {
                    worst = (e, Some((i, j)));
                }
            }
        }
        worst
    }

    /// Smallest `ε` with `f(X)` `ε`-dense in `Y`, with the worst target point.
    pub fn density(&self) -> (f64, usize) {
        let mut worst = (0.0, 0);
        for y in 0..self.target.len() {
            let d = self
                .assignment
                .iter()
                .map(|&t| self.target.get(y, t))
                .fold(f64::INFINITY, f64::min);
            if d > worst.0 {
                worst = (d, y);
            }
        }
        worst
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for &t in &self.assignment {
            hit[t] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `d_Y(f x, f x') ≤ d_X(x, x') + tol` for all pairs.
    pub fn is_one_lipschitz(&self, tol: f64) -> bool {
        let n = self.source.len();
        (0..n).all(|i| {
            (0..n).all(|j| self.target.get(self.assignment[i], self.assignment[j]) <= self.source.get(i, j) + tol)
        })
    }

    pub fn is_isometry(&self, tol: f64) -> bool {
        self.distortion().0 <= tol
    }
}

/// A relation between two finite spaces that covers both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    /// `max |d_X(x, x') − d_Y(y, y')|` over pairs of pairs.
    pub fn distortion(&self, x: &DistanceMatrix, y: &DistanceMatrix) -> f64 {
        let mut worst = 0.0f64;
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            for &(c, d) in &self.pairs[i + 1..] {
                worst = worst.max((x.get(a, c) - y.get(b, d)).abs());
            }
        }
        worst
    }

    pub fn covers(&self, nx: usize, ny: usize) -> bool {
        let mut sx = vec![false; nx];
        let mut sy = vec![false; ny];
        for &(a, b) in &self.pairs {
            if a >= nx || b >= ny {
                return false;
            }
            sx[a] = true;
            sy[b] = true;
        }
        sx.into_iter().all(|v| v) && sy.into_iter().all(|v| v)
    }

    /// Maps each source point to its first partner.
    pub fn to_point_map<'a>(&self, x: &'a DistanceMatrix, y: &'a DistanceMatrix) -> Result<PointMap<'a>> {
        let mut assignment = vec![usize::MAX; x.len()];
        for &(a, b) in &self.pairs {
            if a < x.len() && assignment[a] == usize::MAX {
                assignment[a] = b;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(Error::PreconditionFailed("correspondence does not cover the source".into()));
        }
        PointMap::new(x, y, assignment)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GHBound {
    pub lower: f64,
    pub upper: f64,
    pub witness_upper: Correspondence,
    pub witness_lower: String,
}

fn check_subset(m: &DistanceMatrix, s: &[usize]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    match s.iter().find(|&&i| i >= m.len()) {
        Some(&i) => Err(Error::IndexOutOfRange { index: i, len: m.len() }),
        None => Ok(()),
    }
}

fn dist_to_set(m: &DistanceMatrix, p: usize, s: &[usize]) -> f64 {
    s.iter().map(|&q| m.get(p, q)).fold(f64::INFINITY, f64::min)
}

/// `max(sup_{a∈A} d(a, B), sup_{b∈B} d(b, A))`.
pub fn hausdorff_sup(m: &DistanceMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    check_subset(m, a)?;
    check_subset(m, b)?;
    let ab = a.iter().map(|&p| dist_to_set(m, p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|&p| dist_to_set(m, p, a)).fold(0.0, f64::max);
    Ok(ab.max(ba))
}

/// Smallest `ε` with `B ⊆ U_ε(A)` and `A ⊆ U_ε(B)` (closed neighborhoods),
/// searched over the finitely many candidate values.
pub fn hausdorff_neighborhoods(m: &DistanceMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    check_subset(m, a)?;
    check_subset(m, b)?;
    let mut cand: Vec<f64> = a.iter().flat_map(|&p| b.iter().map(move |&q| m.get(p, q))).collect();
    cand.push(0.0);
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    let within = |eps: f64, from: &[usize], to: &[usize]| from.iter().all(|&p| to.iter().any(|&q| m.get(p, q) <= eps));
    // monotone predicate: binary search for the first admissible value
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if within(cand[mid], a, b) && within(cand[mid], b, a) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(cand[lo])
}

/// Hausdorff distance of two subsets of one space. Both the supremum and
/// the neighborhood formulations are evaluated and must agree.
pub fn hausdorff_distance(m: &DistanceMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    let s = hausdorff_sup(m, a, b)?;
    let n = hausdorff_neighborhoods(m, a, b)?;
    assert!((s - n).abs() <= 1e-12 * (1.0 + s), "Hausdorff formulations disagree: {s} vs {n}");
    Ok(s)
}

struct Search<'a> {
    x: &'a DistanceMatrix,
    y: &'a DistanceMatrix,
    best: f64,
    best_pairs: Vec<(usize, usize)>,
    pairs: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn cost(&self, a: usize, b: usize, current: f64) -> f64 {
        self.pairs
            .iter()
            .fold(current, |w, &(c, d)| w.max((self.x.get(a, c) - self.y.get(b, d)).abs()))
    }

    // first every x picks a partner, then every y left uncovered does
    fn run(&mut self, slot: usize, current: f64) {
        let nx = self.x.len();
        if slot < nx {
            let mut options: Vec<(f64, usize)> = (0..self.y.len()).map(|b| (self.cost(slot, b, current), b)).collect();
            options.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
            for (c, b) in options {
                if c >= self.best {
                    break;
                }
                self.pairs.push((slot, b));
                self.run(slot + 1, c);
                self.pairs.pop();
            }
            return;
        }
        let uncovered = (0..self.y.len()).find(|&b| !self.pairs.iter().any(|&(_, d)| d == b));
        let Some(b) = uncovered else {
            if current < self.best {
                self.best = current;
                self.best_pairs = self.pairs.clone();
            }
            return;
        };
        let mut options: Vec<(f64, usize)> = (0..nx).map(|a| (self.cost(a, b, current), a)).collect();
        options.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        for (c, a) in options {
            if c >= self.best {
                break;
            }
            self.pairs.push((a, b));
            self.run(slot, c);
            self.pairs.pop();
        }
    }
}

fn sorted_pairs(mut pairs: Vec<(usize, usize)>) -> Correspondence {
    pairs.sort_unstable();
    pairs.dedup();
    Correspondence { pairs }
}

/// Exact `d_GH` by branch and bound over correspondences. Errors with
/// [`Error::TooLarge`] when either space exceeds `size_limit` points.
pub fn gh_distance_exact(x: &DistanceMatrix, y: &DistanceMatrix, size_limit: usize) -> Result<GHBound> {
    if x.len() > size_limit || y.len() > size_limit {
        return Err(Error::TooLarge { x: x.len(), y: y.len(), limit: size_limit });
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    let start = greedy_correspondence(x, y);
    let start_value = start.distortion(x, y);
    let mut s = Search {
        x,
        y,
        // strict pruning; nudge so that an optimal greedy start is re-found
        best: start_value + f64::EPSILON * (1.0 + start_value),
        best_pairs: start.pairs.clone(),
        pairs: Vec::new(),
    };
    s.run(0, 0.0);
    let witness = sorted_pairs(s.best_pairs);
    let value = 0.5 * witness.distortion(x, y);
    Ok(GHBound {
        lower: value,
        upper: value,
        witness_upper: witness,
        witness_lower: String::from("exhaustive correspondence search"),
    })
}

/// Greedy correspondence: each `x` in turn takes the partner of least
/// added distortion, then uncovered `y` do the same. The best of the runs
/// seeded with every partner of `x_0` is returned.
pub fn greedy_correspondence(x: &DistanceMatrix, y: &DistanceMatrix) -> Correspondence {
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    for seed in 0..y.len() {
        let mut s = Search { x, y, best: f64::INFINITY, best_pairs: Vec::new(), pairs: vec![(0, seed)] };
        let mut current = 0.0;
        for a in 1..x.len() {
            let (c, b) = (0..y.len())
                .map(|b| (s.cost(a, b, current), b))
                .fold((f64::INFINITY, 0), |acc, v| if v.0 < acc.0 { v } else { acc });
            s.pairs.push((a, b));
            current = c;
        }
        for b in 0..y.len() {
            if s.pairs.iter().any(|&(_, d)| d == b) {
                continue;
            }
            let (c, a) = (0..x.len())
                .map(|a| (s.cost(a, b, current), a))
                .fold((f64::INFINITY, 0), |acc, v| if v.0 < acc.0 { v } else { acc });
            s.pairs.push((a, b));
            current = c;
        }
        if best.as_ref().is_none_or(|(v, _)| current < *v) {
            best = Some((current, s.pairs));
        }
    }
    sorted_pairs(best.map(|b| b.1).unwrap_or_default())
}

fn set_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one = |p: &[f64], q: &[f64]| {
        p.iter()
            .map(|&u| q.iter().map(|&v| (u - v).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

fn distance_values(m: &DistanceMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m.len()).flat_map(|i| m.row(i).iter().copied()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn eccentricities(m: &DistanceMatrix) -> Vec<f64> {
    (0..m.len()).map(|i| m.row(i).iter().copied().fold(0.0, f64::max)).collect()
}

/// Certified bracket for `d_GH` that needs no exhaustive search.
///
/// The upper bound is the distortion of [`greedy_correspondence`]. The lower
/// bound is the largest of half the diameter difference and half the
/// Hausdorff distances between the sets of distance values and between the
/// sets of eccentricities; a correspondence of distortion `δ` moves each of
/// these by at most `δ`.
pub fn gh_bounds(x: &DistanceMatrix, y: &DistanceMatrix) -> Result<GHBound> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    let witness = greedy_correspondence(x, y);
    let upper = 0.5 * witness.distortion(x, y);
    let diam = 0.5 * (x.diameter() - y.diameter()).abs();
    let values = 0.5 * set_hausdorff(&distance_values(x), &distance_values(y));
    let ecc = 0.5 * set_hausdorff(&eccentricities(x), &eccentricities(y));
    let (lower, why) = [(diam, "diameter difference"), (values, "distance values"), (ecc, "eccentricities")]
        .into_iter()
        .fold((0.0, "trivial"), |acc, v| if v.0 > acc.0 { v } else { acc });
    let lower = lower.min(upper);
    Ok(GHBound { lower, upper, witness_upper: witness, witness_lower: format!("{why}: {lower}") })
}

/// Checks that `f` is an `ε`-GH approximation: distortion `≤ ε` and image
/// `ε`-dense. The report's `worst` is the larger of the two defects; the
/// witness lists both.
pub fn check_approximation(f: &PointMap<'_>, eps: f64) -> Report {
    let (dis, pair) = f.distortion();
    let (den, y) = f.density();
    let mut r = Report::new("gh_approximation", eps);
    let (i, j) = pair.map_or((f64::NAN, f64::NAN), |(i, j)| (i as f64, j as f64));
    r.observe(dis, &[]);
    r.observe(den, &[]);
    r.witness = [("distortion", dis), ("x1", i), ("x2", j), ("density", den), ("uncovered", y as f64)]
        .into_iter()
        .map(|(k, v)| (k.into(), v))
        .collect();
    if dis > eps {
        r.note(format!("distortion {dis} exceeds {eps}"));
    }
    if den > eps {
        r.note(format!("image is only {den}-dense"));
    }
    r
}

/// Greedy maximal `ε`-separated subset: index 0 first, then repeatedly the
/// lowest index at distance `≥ ε` from everything chosen. `ε = 0` keeps
/// every point.
pub fn greedy_eps_net(m: &DistanceMatrix, eps: f64) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for i in 0..m.len() {
        if net.iter().all(|&j| m.get(i, j) >= eps) {
            net.push(i);
        }
    }
    net
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion<'a> {
    pub map: PointMap<'a>,
    pub net: Vec<usize>,
    pub report: Report,
}

/// Builds `g: Y → X` from an `ε`-approximation `f: X → Y`: take the greedy
/// `ε`-net `{x_i}` of `X`, put `y_i = f(x_i)`, send every `y` to the
/// lowest-index `x_i` with `d(y, y_i) ≤ 3ε`. The result is checked at `7ε`.
pub fn invert_approximation<'a>(f: &PointMap<'a>, eps: f64) -> Result<Inversion<'a>> {
    let pre = check_approximation(f, eps);
    if !pre.passed {
        return Err(Error::PreconditionFailed(format!(
            "input is not a {eps}-approximation (worst defect {})",
            pre.worst
        )));
    }
    let (x, y) = (f.source, f.target);
    let net = greedy_eps_net(x, eps);
    let images: Vec<usize> = net.iter().map(|&i| f.assignment[i]).collect();
    // tiny slack so that 3ε comparisons survive rounding
    let reach = 3.0 * eps * (1.0 + 1e-12) + 1e-15 * y.max_entry();
    let mut assignment = Vec::with_capacity(y.len());
    for p in 0..y.len() {
        let pick = images.iter().position(|&q| y.get(p, q) <= reach).unwrap_or_else(|| {
            // not reachable for a genuine approximation; nearest keeps g total
            (0..images.len())
                .min_by(|&a, &b| y.get(p, images[a]).total_cmp(&y.get(p, images[b])))
                .unwrap_or(0)
        });
        assignment.push(net[pick]);
    }
    let map = PointMap::new(y, x, assignment)?;
    let report = check_approximation(&map, 7.0 * eps);
    Ok(Inversion { map, net, report })
}

/// Point `z` that best approximates a midpoint of `x` and `y`, with defect
/// `max(|d(x,z) − d/2|, |d(y,z) − d/2|)`. Ties go to the lowest index.
pub fn approximate_midpoint(m: &DistanceMatrix, x: usize, y: usize) -> Result<(usize, f64)> {
    for i in [x, y] {
        if i >= m.len() {
            return Err(Error::IndexOutOfRange { index: i, len: m.len() });
        }
    }
    if x == y {
        return Err(Error::PreconditionFailed("midpoint of a point with itself".into()));
    }
    let half = 0.5 * m.get(x, y);
    let mut best = (0, f64::INFINITY);
    for z in 0..m.len() {
        let defect = (m.get(x, z) - half).abs().max((m.get(y, z) - half).abs());
        if defect < best.1 {
            best = (z, defect);
        }
    }
    Ok(best)
}

/// Multiplies every distance by `lambda > 0`.
pub fn rescale(m: &DistanceMatrix, lambda: f64) -> Result<DistanceMatrix> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonpositiveScale);
    }
    let n = m.len();
    let d = (0..n).flat_map(|i| m.row(i).iter().map(move |v| v * lambda)).collect();
    Ok(DistanceMatrix::from_parts_unchecked(m.labels().to_vec(), n, d))
}
