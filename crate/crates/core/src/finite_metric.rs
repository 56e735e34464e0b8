//! Finite metric spaces and four-point curvature certification.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::math::PI;
use crate::model_space::{self, Curvature, Hinge, TriangleSides, TriangleValidity};
use crate::report::Report;

/// Relative slack for the metric axioms.
const AXIOM_REL_TOL: f64 = 1e-12;
/// Relative slack for the Myers and perimeter gates.
const GATE_REL_TOL: f64 = 1e-9;

/// A validated finite metric space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DistanceMatrix {
    labels: Vec<String>,
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        self.max_entry()
    }

    /// `1e-9 ×` the largest distance.
    pub fn default_tolerance(&self) -> f64 {
        1e-9 * self.max_entry()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.n })
        }
    }

    /// Builds a matrix from trusted data, only checking the shape. Used
    /// for constructions that are metric by design.
    pub(crate) fn from_parts_unchecked(labels: Vec<String>, n: usize, d: Vec<f64>) -> Self {
        debug_assert_eq!(d.len(), n * n);
        DistanceMatrix { labels, n, d }
    }

    /// Restriction to a subset of points, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> Result<DistanceMatrix> {
        for &i in idx {
            self.check_index(i)?;
        }
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let m = idx.len();
        let mut d = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                d.push(self.get(i, j));
            }
        }
        validate_flat(labels, m, d)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Checks the metric axioms and builds a [`DistanceMatrix`].
///
/// Empty `labels` means "use the indices". Symmetry and the triangle
/// inequality are checked to `1e-12 ×` the largest entry; off-diagonal
/// zeros are rejected as duplicate points.
pub fn validate_metric(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<DistanceMatrix> {
    let n = rows.len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare { rows: n, row: r, len: row.len() });
        }
    }
    let d: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    validate_flat(labels, n, d)
}

fn validate_flat(labels: Vec<String>, n: usize, d: Vec<f64>) -> Result<DistanceMatrix> {
    let labels = if labels.is_empty() { default_labels(n) } else { labels };
    if labels.len() != n {
        return Err(Error::LabelCount { labels: labels.len(), points: n });
    }
    let at = |i: usize, j: usize| d[i * n + j];
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = at(i, j);
            if !v.is_finite() {
                return Err(Error::NonFinite { i, j });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { i, j });
            }
            scale = scale.max(v);
        }
    }
    let tol = AXIOM_REL_TOL * scale;
    for i in 0..n {
        if at(i, i) != 0.0 {
            return Err(Error::NonzeroDiagonal { i });
        }
        for j in (i + 1)..n {
            if (at(i, j) - at(j, i)).abs() > tol {
                return Err(Error::NotSymmetric { i, j });
            }
            if at(i, j) == 0.0 {
                return Err(Error::DuplicatePoint { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if at(i, k) > at(i, j) + at(j, k) + tol {
                    return Err(Error::TriangleViolation { i, j, k });
                }
            }
        }
    }
    Ok(DistanceMatrix { labels, n, d })
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // min-heap on distance, ties by vertex index
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// All-pairs shortest-path metric of a weighted undirected graph
/// (Dijkstra from every vertex). Edges are `(u, v, weight)` by index.
pub fn from_graph(vertices: Vec<String>, edges: &[(usize, usize, f64)]) -> Result<DistanceMatrix> {
    let n = vertices.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (e, &(u, v, w)) in edges.iter().enumerate() {
        if u >= n {
            return Err(Error::IndexOutOfRange { index: u, len: n });
        }
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, len: n });
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::NonpositiveWeight { edge: e });
        }
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut d = vec![f64::INFINITY; n * n];
    for s in 0..n {
        let row = &mut d[s * n..(s + 1) * n];
        row[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry(0.0, s));
        while let Some(HeapEntry(dist, u)) = heap.pop() {
            if dist > row[u] {
                continue;
            }
            for &(v, w) in &adj[u] {
                let nd = dist + w;
                if nd < row[v] {
                    row[v] = nd;
                    heap.push(HeapEntry(nd, v));
                }
            }
        }
        if let Some(t) = row.iter().position(|x| x.is_infinite()) {
            return Err(Error::Disconnected { from: s, to: t });
        }
    }
    // different summation orders can leave ulp-level asymmetry
    for i in 0..n {
        for j in (i + 1)..n {
            let m = d[i * n + j].min(d[j * n + i]);
            d[i * n + j] = m;
            d[j * n + i] = m;
        }
    }
    validate_flat(vertices, n, d)
}

/// Comparison angle `∠̃^κ(p; x, y)` of the triple at `p`.
pub fn comparison_angle(k: Curvature, m: &DistanceMatrix, p: usize, x: usize, y: usize) -> Result<f64> {
    m.check_index(p)?;
    m.check_index(x)?;
    m.check_index(y)?;
    let b = m.get(p, x);
    let c = m.get(p, y);
    let a = m.get(x, y);
    if p == x || p == y || b == 0.0 || c == 0.0 {
        return Err(Error::DegenerateTriple { p, x, y });
    }
    if k.0 > 0.0 {
        let diam = model_space::model_diameter(k);
        if b >= diam || c >= diam {
            return Err(Error::ComparisonUndefined { p, x, y });
        }
    }
    if model_space::validate_triangle(k, TriangleSides::new(a, b, c)) == TriangleValidity::Invalid {
        return Err(Error::ComparisonUndefined { p, x, y });
    }
    model_space::model_angle(k, a, b, c).map_err(|e| match e {
        Error::DegenerateSide => Error::DegenerateTriple { p, x, y },
        _ => Error::ComparisonUndefined { p, x, y },
    })
}

/// A point `p` together with three further points, all distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quadruple {
    pub p: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Quadruple {
    pub fn new(p: usize, a: usize, b: usize, c: usize) -> Self {
        Quadruple { p, a, b, c }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let ids = [self.p, self.a, self.b, self.c];
        for (i, &u) in ids.iter().enumerate() {
            if u >= n {
                return Err(Error::IndexOutOfRange { index: u, len: n });
            }
            if ids[..i].contains(&u) {
                return Err(Error::PreconditionFailed(format!("quadruple {ids:?} repeats index {u}")));
            }
        }
        Ok(())
    }
}

/// `∠̃(p; a, b) + ∠̃(p; b, c) + ∠̃(p; c, a) − 2π`; the four-point condition
/// holds at this quadruple iff the result is `≤ 0`.
pub fn four_point_defect(k: Curvature, m: &DistanceMatrix, q: Quadruple) -> Result<f64> {
    q.validate(m.len())?;
    let ab = comparison_angle(k, m, q.p, q.a, q.b)?;
    let bc = comparison_angle(k, m, q.p, q.b, q.c)?;
    let ca = comparison_angle(k, m, q.p, q.c, q.a)?;
    Ok(ab + bc + ca - 2.0 * PI)
}

/// Why a quadruple was not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SkipReason {
    ComparisonTriangleUndefined,
    DegenerateTriple,
}

/// A precondition that rules out the curvature bound before any quadruple
/// is examined.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GateFailure {
    /// `diam > π/√κ`.
    Myers { diameter: f64, bound: f64 },
    /// Some triangle has perimeter `> 2π/√κ`.
    Perimeter { triple: [usize; 3], perimeter: f64, bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificationReport {
    pub kappa: f64,
    pub tolerance: f64,
    pub checked: usize,
    /// Sorted by defect, largest first.
    pub violations: Vec<(Quadruple, f64)>,
    pub skipped: Vec<(Quadruple, SkipReason)>,
    pub max_defect: f64,
    pub gate: Option<GateFailure>,
}

impl CertificationReport {
    fn empty(k: Curvature, tolerance: f64) -> Self {
        CertificationReport {
            kappa: k.0,
            tolerance,
            checked: 0,
            violations: Vec::new(),
            skipped: Vec::new(),
            max_defect: f64::NEG_INFINITY,
            gate: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.gate.is_none() && self.violations.is_empty()
    }

    /// Combines partial reports over disjoint apex ranges. The result does
    /// not depend on how the apexes were partitioned, provided `parts` is
    /// given in apex order.
    pub fn merge(k: Curvature, tolerance: f64, parts: Vec<CertificationReport>) -> Self {
        let mut out = CertificationReport::empty(k, tolerance);
        for p in parts {
            out.checked += p.checked;
            out.violations.extend(p.violations);
            out.skipped.extend(p.skipped);
            out.max_defect = out.max_defect.max(p.max_defect);
            if out.gate.is_none() {
                out.gate = p.gate;
            }
        }
        sort_violations(&mut out.violations);
        out
    }
}

fn sort_violations(v: &mut [(Quadruple, f64)]) {
    // stable, so equal defects keep enumeration order
    v.sort_by(|a, b| b.1.total_cmp(&a.1));
}

/// Myers and perimeter gates for `κ > 0`.
pub fn curvature_gate(k: Curvature, m: &DistanceMatrix) -> Option<GateFailure> {
    if !(k.0 > 0.0) {
        return None;
    }
    let diam_bound = model_space::model_diameter(k);
    let diameter = m.diameter();
    if diameter > diam_bound * (1.0 + GATE_REL_TOL) {
        return Some(GateFailure::Myers { diameter, bound: diam_bound });
    }
    let bound = 2.0 * diam_bound;
    let n = m.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for l in (j + 1)..n {
                let perimeter = m.get(i, j) + m.get(j, l) + m.get(i, l);
                if perimeter > bound * (1.0 + GATE_REL_TOL) {
                    return Some(GateFailure::Perimeter { triple: [i, j, l], perimeter, bound });
                }
            }
        }
    }
    None
}

/// Four-point check for the apexes in `apexes` only, without gates.
/// Building block for parallel drivers; see [`CertificationReport::merge`].
pub fn certify_apexes(k: Curvature, m: &DistanceMatrix, tolerance: f64, apexes: Range<usize>) -> CertificationReport {
    let n = m.len();
    let mut rep = CertificationReport::empty(k, tolerance);
    let mut others = Vec::with_capacity(n);
    for p in apexes.start..apexes.end.min(n) {
        others.clear();
        others.extend((0..n).filter(|&i| i != p));
        // comparison angles at p, reused across the triples
        let r = others.len();
        let mut angle = vec![None; r * r];
        let mut reason = vec![None; r * r];
        for i in 0..r {
            for j in (i + 1)..r {
                match comparison_angle(k, m, p, others[i], others[j]) {
                    Ok(a) => angle[i * r + j] = Some(a),
                    Err(Error::DegenerateTriple { .. }) => reason[i * r + j] = Some(SkipReason::DegenerateTriple),
                    Err(_) => reason[i * r + j] = Some(SkipReason::ComparisonTriangleUndefined),
                }
            }
        }
        for i in 0..r {
            for j in (i + 1)..r {
                for l in (j + 1)..r {
                    let q = Quadruple::new(p, others[i], others[j], others[l]);
                    let pairs = [i * r + j, j * r + l, i * r + l];
                    if let Some(&why) = pairs.iter().find_map(|&e| reason[e].as_ref()) {
                        rep.skipped.push((q, why));
                        continue;
                    }
                    let defect = pairs.iter().map(|&e| angle[e].unwrap()).sum::<f64>() - 2.0 * PI;
                    rep.checked += 1;
                    rep.max_defect = rep.max_defect.max(defect);
                    if defect > tolerance {
                        rep.violations.push((q, defect));
                    }
                }
            }
        }
    }
    sort_violations(&mut rep.violations);
    rep
}

/// Four-point certification of `curv ≥ κ` over every apex and unordered
/// triple of the remaining points.
///
/// For `κ > 0` the Myers (`diam ≤ π/√κ`) and perimeter (`≤ 2π/√κ`) gates
/// run first; a gate failure returns immediately with `checked = 0`.
pub fn certify_curvature(k: Curvature, m: &DistanceMatrix, tolerance: f64) -> CertificationReport {
    if let Some(g) = curvature_gate(k, m) {
        let mut rep = CertificationReport::empty(k, tolerance);
        rep.gate = Some(g);
        return rep;
    }
    certify_apexes(k, m, tolerance, 0..m.len())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanRow {
    pub kappa: f64,
    pub passed: bool,
    pub checked: usize,
    pub violations: usize,
    pub skipped: usize,
    pub max_defect: f64,
    pub gate: Option<GateFailure>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvatureScan {
    pub rows: Vec<ScanRow>,
    pub largest_passing: Option<f64>,
    /// Some κ fails while a larger grid value passes.
    pub non_monotone: bool,
}

/// Runs [`certify_curvature`] at every grid value. Pass/fail is not
/// assumed monotone in κ; the whole table is returned.
pub fn curvature_scan(m: &DistanceMatrix, grid: &[f64], tolerance: f64) -> Result<CurvatureScan> {
    if grid.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &k in grid {
        let rep = certify_curvature(Curvature(k), m, tolerance);
        rows.push(ScanRow {
            kappa: k,
            passed: rep.passed(),
            checked: rep.checked,
            violations: rep.violations.len(),
            skipped: rep.skipped.len(),
            max_defect: rep.max_defect,
            gate: rep.gate,
        });
    }
    let largest_passing = rows.iter().filter(|r| r.passed).map(|r| r.kappa).fold(None, |acc: Option<f64>, k| {
        Some(acc.map_or(k, |a| a.max(k)))
    });
    let non_monotone = rows.iter().any(|r| !r.passed && largest_passing.is_some_and(|l| r.kappa < l));
    Ok(CurvatureScan { rows, largest_passing, non_monotone })
}

/// Point-on-a-side comparison. With `z` on a geodesic from `x` to `y`,
/// returns `d̃ − d(p, z)`, where `d̃` is the model distance from `p̃` to the
/// point at arc length `d(x, z)` along `[x̃ ỹ]` in the comparison triangle
/// of `p, x, y`. The comparison holds iff the result is `≤ 0`.
pub fn point_on_side_defect(
    k: Curvature,
    m: &DistanceMatrix,
    p: usize,
    x: usize,
    y: usize,
    z: usize,
    tol: f64,
) -> Result<f64> {
    for i in [p, x, y, z] {
        m.check_index(i)?;
    }
    let gap = m.get(x, z) + m.get(z, y) - m.get(x, y);
    if gap.abs() > tol {
        return Err(Error::NotOnGeodesic { x, y, z, gap });
    }
    let (px, py, xy) = (m.get(p, x), m.get(p, y), m.get(x, y));
    if xy == 0.0 {
        return Err(Error::DegenerateTriple { p, x, y });
    }
    if px == 0.0 {
        // p = x: the model distance is the arc parameter itself
        return Ok(m.get(x, z) - m.get(p, z));
    }
    if k.0 > 0.0 {
        let diam = model_space::model_diameter(k);
        if px >= diam || xy >= diam {
            return Err(Error::ComparisonUndefined { p, x, y });
        }
    }
    if model_space::validate_triangle(k, TriangleSides::new(py, px, xy)) == TriangleValidity::Invalid {
        return Err(Error::ComparisonUndefined { p, x, y });
    }
    let angle_at_x = model_space::model_angle(k, py, px, xy).map_err(|_| Error::ComparisonUndefined { p, x, y })?;
    let xz = m.get(x, z).min(xy);
    let model = model_space::model_side(k, Hinge::new(angle_at_x, px, xz)).map_err(|_| Error::ComparisonUndefined { p, x, y })?;
    Ok(model - m.get(p, z))
}

/// Nearest-site assignment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VoronoiAssignment {
    pub sites: Vec<usize>,
    /// Owning site (a point index) for every point.
    pub owner: Vec<usize>,
    /// Points equidistant (within tolerance) to several nearest sites,
    /// with all of those sites in increasing index order.
    pub ties: Vec<(usize, Vec<usize>)>,
}

impl VoronoiAssignment {
    pub fn is_owned_by(&self, point: usize, site: usize) -> bool {
        self.owner[point] == site || self.ties.iter().any(|(p, s)| *p == point && s.contains(&site))
    }
}

/// Assigns every point to its nearest site; ties go to the lowest site
/// index and are listed. Distances within `1e-12 ×` the matrix scale count
/// as ties.
pub fn voronoi_assign(m: &DistanceMatrix, sites: &[usize]) -> Result<VoronoiAssignment> {
    if sites.is_empty() {
        return Err(Error::EmptySet);
    }
    for (i, &s) in sites.iter().enumerate() {
        m.check_index(s)?;
        if sites[..i].contains(&s) {
            return Err(Error::PreconditionFailed(format!("site {s} listed twice")));
        }
    }
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    let tol = AXIOM_REL_TOL * m.max_entry();
    let mut owner = Vec::with_capacity(m.len());
    let mut ties = Vec::new();
    for x in 0..m.len() {
        let best = sorted.iter().map(|&s| m.get(x, s)).fold(f64::INFINITY, f64::min);
        let near: Vec<usize> = sorted.iter().copied().filter(|&s| m.get(x, s) <= best + tol).collect();
        owner.push(near[0]);
        if near.len() > 1 {
            ties.push((x, near));
        }
    }
    Ok(VoronoiAssignment { sites: sorted, owner, ties })
}

/// Discrete star-shapedness of a Voronoi cell: every point of a geodesic
/// chain running toward `site` must belong to the cell of `site` (ties
/// count as membership).
///
/// The chain must approach the site strictly and its consecutive gaps,
/// including the last point to the site, must add up to the distance from
/// the first point to the site within `tol`.
pub fn star_shaped_check(m: &DistanceMatrix, sites: &[usize], site: usize, chain: &[usize], tol: f64) -> Result<Report> {
    if !sites.contains(&site) {
        return Err(Error::PreconditionFailed(format!("{site} is not one of the sites")));
    }
    for &c in chain {
        m.check_index(c)?;
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !(m.get(w[1], site) < m.get(w[0], site)) {
            return Err(Error::NotAGeodesicChain { index: i + 1 });
        }
    }
    if let (Some(&first), Some(&last)) = (chain.first(), chain.last()) {
        let walked: f64 = chain.windows(2).map(|w| m.get(w[0], w[1])).sum::<f64>() + m.get(last, site);
        if (walked - m.get(first, site)).abs() > tol {
            return Err(Error::NotAGeodesicChain { index: chain.len() - 1 });
        }
    }
    let vor = voronoi_assign(m, sites)?;
    let mut report = Report::new("voronoi_star_shaped", 0.0);
    for (i, &c) in chain.iter().enumerate() {
        let inside = vor.is_owned_by(c, site);
        report.observe(if inside { 0.0 } else { 1.0 }, &[("chain_position", i as f64), ("point", c as f64)]);
    }
    if !report.passed {
        report.note("chain leaves the cell of the site".to_string());
    }
    Ok(report)
}
