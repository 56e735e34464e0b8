//! Short bases of flat tori `ℝⁿ/Λ`.
//!
//! The deck group of a flat torus is the lattice `Λ` acting by
//! translations, so `|γ| = d(p̃, γ p̃)` is the Euclidean length of the
//! lattice vector and does not depend on the base point.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math::{acos, ceil, dot, floor, norm, sqrt, PI};
use crate::report::Report;
use crate::volume_comparison::{short_basis_bound, ShortBasisRegime};

/// Relative width of a length tie.
const TIE_REL: f64 = 1e-12;
/// Largest rank accepted by [`filtration_check`].
pub const FILTRATION_MAX_RANK: usize = 3;

/// A full-rank lattice in `ℝⁿ`, given by basis rows.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Lattice {
    basis: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
    /// LLL-reduced basis `U·B`, used for all enumeration.
    reduced: Vec<Vec<f64>>,
    inverse: Vec<Vec<f64>>,
    transform: Vec<Vec<i64>>,
}

impl Lattice {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        for (r, row) in basis.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { rows: n, row: r, len: row.len() });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { i: r, j });
            }
        }
        invert(&basis).ok_or(Error::SingularBasis)?;
        let gram = basis.iter().map(|a| basis.iter().map(|b| dot(a, b)).collect()).collect();
        let (reduced, transform) = lll(&basis);
        let inverse = invert(&reduced).ok_or(Error::SingularBasis)?;
        Ok(Lattice { basis, gram, reduced, inverse, transform })
    }

    /// `ℤⁿ`.
    pub fn integer(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    /// Basis `(1, 0), (1/2, √3/2)`.
    pub fn hexagonal() -> Self {
        Self::new(vec![vec![1.0, 0.0], vec![0.5, 0.5 * sqrt(3.0)]]).expect("hexagonal basis is regular")
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    /// `Σ cᵢ bᵢ`.
    pub fn vector(&self, coords: &[i64]) -> Vec<f64> {
        let n = self.rank();
        let mut v = vec![0.0; n];
        for (c, b) in coords.iter().zip(&self.basis) {
            for j in 0..n {
                v[j] += *c as f64 * b[j];
            }
        }
        v
    }

    /// Converts coordinates in the reduced basis to the input basis.
    fn input_coords(&self, c: &[i64]) -> Vec<i64> {
        let n = self.rank();
        (0..n).map(|j| (0..n).map(|i| c[i] * self.transform[i][j]).sum()).collect()
    }

    fn reduced_vector(&self, c: &[i64]) -> Vec<f64> {
        let n = self.rank();
        let mut v = vec![0.0; n];
        for (c, b) in c.iter().zip(&self.reduced) {
            for j in 0..n {
                v[j] += *c as f64 * b[j];
            }
        }
        v
    }

    /// Real coordinates of `x` with respect to the reduced basis.
    fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        let n = self.rank();
        (0..n).map(|i| (0..n).map(|j| x[j] * self.inverse[j][i]).sum()).collect()
    }

    /// `|cᵢ| ≤ R · |column i of B⁻¹|` for lattice vectors of length `≤ R`.
    fn coordinate_bounds(&self, radius: f64) -> Vec<f64> {
        let n = self.rank();
        (0..n)
            .map(|i| radius * sqrt((0..n).map(|j| self.inverse[j][i] * self.inverse[j][i]).sum()))
            .collect()
    }

    /// Upper bound for the covering radius: half the sum of reduced basis
    /// lengths.
    fn covering_bound(&self) -> f64 {
        0.5 * self.reduced.iter().map(|b| norm(b)).sum::<f64>()
    }

    /// Every nonzero lattice vector of length `≤ radius`, as integer
    /// coordinates with their lengths, in enumeration order.
    pub fn vectors_within(&self, radius: f64) -> Vec<(Vec<i64>, f64)> {
        let bounds: Vec<i64> = self.coordinate_bounds(radius).iter().map(|b| floor(*b + 1e-9) as i64).collect();
        let lo: Vec<i64> = bounds.iter().map(|b| -b).collect();
        let mut out = Vec::new();
        for_each_box(&lo, &bounds, |c| {
            if c.iter().all(|&x| x == 0) {
                return;
            }
            let len = norm(&self.reduced_vector(c));
            if len <= radius {
                out.push((self.input_coords(c), len));
            }
        });
        out
    }

    /// Distance from `x` to the nearest lattice point.
    pub fn distance_to_lattice(&self, x: &[f64]) -> f64 {
        let t = self.coordinates(x);
        let reach = self.coordinate_bounds(self.covering_bound());
        let lo: Vec<i64> = t.iter().zip(&reach).map(|(t, r)| floor(t - r) as i64).collect();
        let hi: Vec<i64> = t.iter().zip(&reach).map(|(t, r)| ceil(t + r) as i64).collect();
        let mut best = f64::INFINITY;
        for_each_box(&lo, &hi, |c| {
            let v = self.reduced_vector(c);
            let d = sqrt(x.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum());
            best = best.min(d);
        });
        best
    }
}

/// Calls `f` on every integer point of the box `lo ≤ c ≤ hi`, in
/// lexicographic order.
fn for_each_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut c = lo.to_vec();
    loop {
        f(&c);
        let mut i = c.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < hi[i] {
                c[i] += 1;
                break;
            }
            c[i] = lo[i];
        }
    }
}

/// LLL reduction (`δ = 3/4`). Returns the reduced rows and the unimodular
/// `U` with `reduced = U·basis`.
fn lll(basis: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let n = basis.len();
    let mut b = basis.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let gram_schmidt = |b: &[Vec<f64>]| {
        let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&b[i], &star[j]) / dot(&star[j], &star[j]);
                for t in 0..n {
                    v[t] -= mu[i][j] * star[j][t];
                }
            }
            star.push(v);
        }
        let lens: Vec<f64> = star.iter().map(|v| dot(v, v)).collect();
        (mu, lens)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&b);
            let q = libm::round(mu[k][j]);
            if q != 0.0 {
                let qi = q as i64;
                for t in 0..n {
                    b[k][t] -= q * b[j][t];
                    u[k][t] -= qi * u[j][t];
                }
            }
        }
        let (mu, lens) = gram_schmidt(&b);
        if lens[k] >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * lens[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    // recompute rows from U so they are exact integer combinations
    let reduced = u
        .iter()
        .map(|row| (0..n).map(|t| row.iter().zip(basis).map(|(c, r)| *c as f64 * r[t]).sum()).collect())
        .collect();
    (reduced, u)
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let scale = a.iter().map(|r| norm(r)).fold(1.0f64, |p, x| p * x);
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[p][col] == 0.0 {
            return None;
        }
        m.swap(col, p);
        det *= m[col][col];
        let piv = m[col][col];
        for v in m[col].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        m[r][j] -= f * m[col][j];
                    }
                }
            }
        }
    }
    if !(det.abs() > 1e-12 * scale) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Hermite normal form (row style) of the subgroup of `ℤⁿ` generated by
/// `vectors`: echelon rows with positive pivots, entries above each pivot
/// reduced into `[0, pivot)`. Two generating sets give the same subgroup
/// iff their normal forms are equal.
pub fn hermite_normal_form(vectors: &[Vec<i64>], n: usize) -> Vec<Vec<i128>> {
    let mut rows: Vec<Vec<i128>> = vectors.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    let mut r = 0;
    for col in 0..n {
        loop {
            let pick = (r..rows.len()).filter(|&i| rows[i][col] != 0).min_by_key(|&i| rows[i][col].abs());
            let Some(p) = pick else { break };
            rows.swap(r, p);
            let mut done = true;
            for i in (r + 1)..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[r][col]);
                    for j in 0..n {
                        rows[i][j] -= q * rows[r][j];
                    }
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && rows[r][col] != 0 {
            if rows[r][col] < 0 {
                for v in rows[r].iter_mut() {
                    *v = -*v;
                }
            }
            for i in 0..r {
                let q = rows[i][col].div_euclid(rows[r][col]);
                if q != 0 {
                    for j in 0..n {
                        rows[i][j] -= q * rows[r][j];
                    }
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

/// Index of the sublattice with normal form `h` in `ℤⁿ`, or `None` when
/// it has lower rank.
pub fn sublattice_index(h: &[Vec<i128>], n: usize) -> Option<i128> {
    if h.len() < n {
        return None;
    }
    Some((0..n).map(|i| h[i][i]).product())
}

/// Covering radius estimate, which equals the diameter of the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusDiameter {
    pub estimate: f64,
    /// The true diameter lies in `[estimate, estimate + error_bound]`.
    pub error_bound: f64,
}

impl TorusDiameter {
    pub fn upper(&self) -> f64 {
        self.estimate + self.error_bound
    }
}

/// Maximizes the distance to `Λ` over the grid `k/res` of the fundamental
/// parallelepiped (`res ≥ 16` per axis).
pub fn torus_diameter(lat: &Lattice, resolution: usize) -> Result<TorusDiameter> {
    if resolution < 16 {
        return Err(Error::DomainError("grid resolution must be at least 16"));
    }
    let n = lat.rank();
    let hi = vec![resolution as i64 - 1; n];
    let mut estimate = 0.0f64;
    for_each_box(&vec![0; n], &hi, |k| {
        let mut x = vec![0.0; n];
        for (c, b) in k.iter().zip(&lat.reduced) {
            let t = *c as f64 / resolution as f64;
            for j in 0..n {
                x[j] += t * b[j];
            }
        }
        estimate = estimate.max(lat.distance_to_lattice(&x));
    });
    // every point is within half a cell diagonal of a grid vertex
    let error_bound = lat.covering_bound() / resolution as f64;
    Ok(TorusDiameter { estimate, error_bound })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShortBasis {
    pub vectors: Vec<Vec<f64>>,
    /// Integer coordinates with respect to the lattice basis.
    pub coords: Vec<Vec<i64>>,
    pub lengths: Vec<f64>,
    /// Radius within which lattice vectors were enumerated.
    pub search_radius: f64,
}

impl ShortBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Orders by length, near-ties (relative `1e-12`) broken by descending
/// lexicographic order of the integer coordinates.
fn by_length_then_lex(a: &(Vec<i64>, f64), b: &(Vec<i64>, f64)) -> Ordering {
    let scale = a.1.max(b.1);
    if (a.1 - b.1).abs() <= TIE_REL * scale {
        b.0.cmp(&a.0)
    } else {
        a.1.total_cmp(&b.1)
    }
}

/// Greedy short basis: `γᵢ` is a shortest lattice vector outside the
/// subgroup generated by `γ₁, …, γᵢ₋₁`; stops once the whole lattice is
/// generated.
pub fn short_basis(lat: &Lattice) -> ShortBasis {
    let n = lat.rank();
    let diam = torus_diameter(lat, 16).expect("resolution 16 is valid");
    let mut radius = 2.0 * diam.upper() + 1e-9;
    loop {
        let mut cands = lat.vectors_within(radius);
        // the comparator is not transitive across chains of near-ties, so
        // sort by length first and then fix up the tie groups
        cands.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut start = 0;
        while start < cands.len() {
            let mut end = start + 1;
            while end < cands.len() && cands[end].1 - cands[start].1 <= TIE_REL * cands[end].1 {
                end += 1;
            }
            cands[start..end].sort_by(by_length_then_lex);
            start = end;
        }
        let mut chosen: Vec<Vec<i64>> = Vec::new();
        let mut hnf = Vec::new();
        for (c, _) in &cands {
            let mut trial = chosen.clone();
            trial.push(c.clone());
            let h = hermite_normal_form(&trial, n);
            if h != hnf {
                chosen = trial;
                hnf = h;
                if sublattice_index(&hnf, n) == Some(1) {
                    let vectors: Vec<Vec<f64>> = chosen.iter().map(|c| lat.vector(c)).collect();
                    let lengths = vectors.iter().map(|v| norm(v)).collect();
                    return ShortBasis { vectors, coords: chosen, lengths, search_radius: radius };
                }
            }
        }
        // not reachable when the diameter bound holds; widen and retry
        radius *= 2.0;
    }
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    acos((dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0))
}

/// For all `i < j`: `|γⱼ − γᵢ| ≥ |γⱼ| ≥ |γᵢ|` and `∠(γᵢ, γⱼ) ≥ π/3`.
/// Length margins are compared relative to `|γⱼ|`.
pub fn verify_geometry(sb: &ShortBasis, tol: f64) -> Report {
    let mut r = Report::new("short_basis_geometry", tol);
    let m = sb.len();
    for i in 0..m {
        for j in (i + 1)..m {
            let (li, lj) = (sb.lengths[i], sb.lengths[j]);
            let diff: Vec<f64> = sb.vectors[j].iter().zip(&sb.vectors[i]).map(|(a, b)| a - b).collect();
            let lij = norm(&diff);
            let a = angle(&sb.vectors[i], &sb.vectors[j]);
            let defect = ((lj - lij) / lj).max((li - lj) / lj).max(PI / 3.0 - a);
            r.observe(defect, &[("i", i as f64), ("j", j as f64), ("l_ij", lij), ("angle", a)]);
        }
    }
    r
}

/// Compares `Γ(r)`, generated by all lattice vectors of length `≤ r`, with
/// `G(r)`, generated by the short-basis members of length `≤ r`, through
/// their Hermite normal forms.
pub fn filtration_check(lat: &Lattice, r: f64) -> Result<Report> {
    let n = lat.rank();
    if n > FILTRATION_MAX_RANK {
        return Err(Error::RankTooLarge { rank: n, max: FILTRATION_MAX_RANK });
    }
    let sb = short_basis(lat);
    let slack = |len: f64| len <= r * (1.0 + TIE_REL);
    let small: Vec<Vec<i64>> = sb.coords.iter().zip(&sb.lengths).filter(|(_, l)| slack(**l)).map(|(c, _)| c.clone()).collect();
    let g = hermite_normal_form(&small, n);
    // past the search radius Γ(r) already contains all of G(r) = Λ
    let reach = r.min(sb.search_radius) * (1.0 + TIE_REL);
    let all: Vec<Vec<i64>> = lat.vectors_within(reach).into_iter().filter(|(_, l)| slack(*l)).map(|(c, _)| c).collect();
    let gamma = hermite_normal_form(&all, n);
    let mut rep = Report::new("length_filtration", 0.0);
    rep.observe(if g == gamma { 0.0 } else { 1.0 }, &[("r", r), ("rank_G", g.len() as f64), ("rank_Gamma", gamma.len() as f64)]);
    if g != gamma {
        rep.note(format!("G(r) = {g:?} but Γ(r) = {gamma:?}"));
    }
    Ok(rep)
}

/// `|short basis| ≤ C(n)`.
pub fn count_vs_bound(sb: &ShortBasis, n: u32) -> Result<Report> {
    let bound = short_basis_bound(n, ShortBasisRegime::Nonnegative)?;
    let mut r = Report::new("short_basis_count", 0.0);
    r.observe(sb.len() as f64 - bound, &[("count", sb.len() as f64), ("bound", bound)]);
    Ok(r)
}
