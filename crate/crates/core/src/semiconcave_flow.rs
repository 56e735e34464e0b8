//! Gradients and gradient flows of minima of finitely many smooth
//! functions on `ℝⁿ`, with contraction and Petrunin-type estimates,
//! Busemann functions of straight rays and discrete concavity checks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{dist, dot, exp, norm};
use crate::report::Report;

/// Subset enumeration for the minimum-norm point is used up to this many
/// distinct active gradients.
const ENUMERATION_LIMIT: usize = 12;
/// Cap on events plus steps in one gradient curve.
const MAX_SEGMENTS: usize = 10_000_000;

/// One smooth piece `½ xᵀAx + gᵀx + b`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum Branch {
    Affine {
        g: Vec<f64>,
        b: f64,
    },
    Quadratic {
        #[cfg_attr(feature = "serde", serde(rename = "A"))]
        a: Vec<Vec<f64>>,
        g: Vec<f64>,
        b: f64,
    },
}

impl Branch {
    pub fn affine(g: Vec<f64>, b: f64) -> Self {
        Branch::Affine { g, b }
    }

    pub fn quadratic(a: Vec<Vec<f64>>, g: Vec<f64>, b: f64) -> Self {
        Branch::Quadratic { a, g, b }
    }

    fn dim(&self) -> usize {
        match self {
            Branch::Affine { g, .. } | Branch::Quadratic { g, .. } => g.len(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Branch::Affine { g, b } => dot(g, x) + b,
            Branch::Quadratic { a, g, b } => {
                let ax: f64 = a.iter().zip(x).map(|(row, xi)| xi * dot(row, x)).sum();
                0.5 * ax + dot(g, x) + b
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Branch::Affine { g, .. } => g.clone(),
            Branch::Quadratic { a, g, .. } => {
                // gradient of ½xᵀAx is the symmetric part of A applied to x
                let n = g.len();
                (0..n)
                    .map(|i| g[i] + 0.5 * (0..n).map(|j| (a[i][j] + a[j][i]) * x[j]).sum::<f64>())
                    .collect()
            }
        }
    }

    /// Gershgorin bound on the largest eigenvalue of the symmetric part
    /// of `A`; 0 for affine branches.
    pub fn lambda(&self) -> f64 {
        match self {
            Branch::Affine { .. } => 0.0,
            Branch::Quadratic { a, .. } => {
                let n = a.len();
                (0..n)
                    .map(|i| {
                        let off: f64 = (0..n).filter(|&j| j != i).map(|j| (0.5 * (a[i][j] + a[j][i])).abs()).sum();
                        a[i][i] + off
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            Branch::Affine { g, .. } => norm(g),
            Branch::Quadratic { a, g, .. } => {
                if a.iter().flatten().all(|&v| v == 0.0) {
                    norm(g)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// `f = min_i fᵢ` over finitely many branches.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PiecewiseMinFunction {
    branches: Vec<Branch>,
    dim: usize,
    lambda: f64,
    lipschitz: f64,
}

impl PiecewiseMinFunction {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let first = branches.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::DomainError("branches need at least one coordinate"));
        }
        for br in &branches {
            if br.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: br.dim() });
            }
            let (g, b) = match br {
                Branch::Affine { g, b } => (g, b),
                Branch::Quadratic { a, g, b } => {
                    if a.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: a.len() });
                    }
                    for row in a {
                        if row.len() != dim {
                            return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
                        }
                        if row.iter().any(|v| !v.is_finite()) {
                            return Err(Error::DomainError("non-finite branch coefficient"));
                        }
                    }
                    (g, b)
                }
            };
            if g.iter().any(|v| !v.is_finite()) || !b.is_finite() {
                return Err(Error::DomainError("non-finite branch coefficient"));
            }
        }
        let lambda = branches.iter().map(Branch::lambda).fold(f64::NEG_INFINITY, f64::max);
        let lipschitz = branches.iter().map(Branch::lipschitz).fold(0.0, f64::max);
        Ok(PiecewiseMinFunction { branches, dim, lambda, lipschitz })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `f` is `λ`-concave for this `λ`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Largest branch Lipschitz constant (infinite for genuinely
    /// quadratic branches).
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn is_affine(&self) -> bool {
        self.branches.iter().all(|b| matches!(b, Branch::Affine { .. }))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainError("non-finite point"));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.branches.iter().map(|b| b.value(x)).fold(f64::INFINITY, f64::min)
    }

    /// Branches with `fᵢ(x) ≤ f(x) + 10⁻⁹(1 + |f(x)|)`.
    pub fn active(&self, x: &[f64]) -> Vec<usize> {
        let vals: Vec<f64> = self.branches.iter().map(|b| b.value(x)).collect();
        let f = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (1.0 + f.abs());
        (0..vals.len()).filter(|&i| vals[i] <= f + tol).collect()
    }
}

/// `df_p(v) = min` over active branches of `⟨∇fᵢ(p), v⟩`.
pub fn directional_derivative(f: &PiecewiseMinFunction, p: &[f64], v: &[f64]) -> Result<f64> {
    f.check_point(p)?;
    if v.len() != f.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, got: v.len() });
    }
    Ok(active_gradients(f, p).iter().map(|g| dot(g, v)).fold(f64::INFINITY, f64::min))
}

fn active_gradients(f: &PiecewiseMinFunction, p: &[f64]) -> Vec<Vec<f64>> {
    let mut gs: Vec<Vec<f64>> = Vec::new();
    for i in f.active(p) {
        let g = f.branches[i].gradient(p);
        if !gs.contains(&g) {
            gs.push(g);
        }
    }
    gs
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))?;
        if m[p][c].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        for r in (c + 1)..n {
            let q = m[r][c] / m[c][c];
            for j in c..n {
                m[r][j] -= q * m[c][j];
            }
            rhs[r] -= q * rhs[c];
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = ((c + 1)..n).map(|j| m[c][j] * x[j]).sum();
        x[c] = (rhs[c] - s) / m[c][c];
    }
    Some(x)
}

fn combine(gs: &[Vec<f64>], idx: &[usize], mu: &[f64]) -> Vec<f64> {
    let n = gs[0].len();
    let mut h = vec![0.0; n];
    for (&i, &w) in idx.iter().zip(mu) {
        for j in 0..n {
            h[j] += w * gs[i][j];
        }
    }
    h
}

/// Minimum-norm point of the convex hull, by enumerating supports of size
/// at most `n + 1` and keeping the feasible affine minimizers.
fn min_norm_enumerated(gs: &[Vec<f64>]) -> Vec<f64> {
    let k = gs.len();
    let max_support = (gs[0].len() + 1).min(k);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1u32 << k) {
        let idx: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        if idx.len() > max_support {
            continue;
        }
        let s = idx.len();
        // KKT system of min |Σ μᵢ gᵢ|² subject to Σ μᵢ = 1
        let mut m = vec![vec![0.0; s + 1]; s + 1];
        for a in 0..s {
            for b in 0..s {
                m[a][b] = dot(&gs[idx[a]], &gs[idx[b]]);
            }
            m[a][s] = 1.0;
            m[s][a] = 1.0;
        }
        let mut rhs = vec![0.0; s + 1];
        rhs[s] = 1.0;
        let Some(sol) = solve(m, rhs) else { continue };
        let mu = &sol[..s];
        if mu.iter().any(|&w| w < -1e-12) {
            continue;
        }
        let total: f64 = mu.iter().map(|w| w.max(0.0)).sum();
        let mu: Vec<f64> = mu.iter().map(|w| w.max(0.0) / total).collect();
        let h = combine(gs, &idx, &mu);
        let nh = norm(&h);
        if best.as_ref().is_none_or(|(b, _)| nh < *b) {
            best = Some((nh, h));
        }
    }
    best.map(|b| b.1).unwrap_or_else(|| gs[0].clone())
}

/// Minimum-norm point by projected gradient descent on the simplex of
/// weights. Used when there are too many active gradients to enumerate.
fn min_norm_projected(gs: &[Vec<f64>]) -> Vec<f64> {
    let k = gs.len();
    let idx: Vec<usize> = (0..k).collect();
    let gram: Vec<Vec<f64>> = gs.iter().map(|a| gs.iter().map(|b| dot(a, b)).collect()).collect();
    let trace: f64 = (0..k).map(|i| gram[i][i]).sum();
    let step = 1.0 / (2.0 * trace.max(f64::MIN_POSITIVE));
    let mut mu = vec![1.0 / k as f64; k];
    for _ in 0..20_000 {
        let grad: Vec<f64> = (0..k).map(|i| 2.0 * dot(&gram[i], &mu)).collect();
        let y: Vec<f64> = mu.iter().zip(&grad).map(|(m, g)| m - step * g).collect();
        mu = project_simplex(&y);
    }
    // polish on the detected support
    let support: Vec<Vec<f64>> = (0..k).filter(|&i| mu[i] > 1e-6).map(|i| gs[i].clone()).collect();
    if !support.is_empty() && support.len() <= ENUMERATION_LIMIT {
        return min_norm_enumerated(&support);
    }
    combine(gs, &idx, &mu)
}

fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut s = y.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, v) in s.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// Defects of the two gradient conditions at `h`: `|df_p(h) − |h|²|` and
/// the largest `df_p(v) − ⟨h, v⟩` over the given directions.
pub fn gradient_conditions(f: &PiecewiseMinFunction, p: &[f64], h: &[f64], directions: &[Vec<f64>]) -> Result<(f64, f64)> {
    let eq = (directional_derivative(f, p, h)? - dot(h, h)).abs();
    let mut ineq = f64::NEG_INFINITY;
    for v in directions {
        ineq = ineq.max(directional_derivative(f, p, v)? - dot(h, v));
    }
    Ok((eq, ineq))
}

/// The gradient `∇f_p`: the minimum-norm point of the convex hull of the
/// active branch gradients. Both defining conditions (`df_p(h) = |h|²` and
/// `df_p(v) ≤ ⟨h, v⟩`) are checked afterwards on the active gradients.
pub fn gradient(f: &PiecewiseMinFunction, p: &[f64]) -> Result<Vec<f64>> {
    f.check_point(p)?;
    let gs = active_gradients(f, p);
    let h = if gs.len() == 1 {
        gs[0].clone()
    } else if gs.len() <= ENUMERATION_LIMIT {
        min_norm_enumerated(&gs)
    } else {
        min_norm_projected(&gs)
    };
    let scale = 1.0 + gs.iter().map(|g| dot(g, g)).fold(0.0, f64::max);
    let (eq, ineq) = gradient_conditions(f, p, &h, &gs)?;
    if eq > 1e-9 * scale || ineq > 1e-9 * scale {
        return Err(Error::PreconditionFailed(format!(
            "gradient conditions fail at {p:?}: defects {eq}, {ineq}"
        )));
    }
    Ok(h)
}

/// A sampled gradient curve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GradientCurve {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Times at which a new branch became active.
    pub events: Vec<f64>,
}

impl GradientCurve {
    pub fn endpoint(&self) -> &[f64] {
        self.points.last().expect("curves contain their start point")
    }

    /// Linear interpolation; constant past the ends.
    pub fn position(&self, t: f64) -> Vec<f64> {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.points[0].clone();
        }
        if k >= self.times.len() {
            return self.endpoint().to_vec();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.points[k - 1].iter().zip(&self.points[k]).map(|(a, b)| a + w * (b - a)).collect()
    }
}

fn along(x: &[f64], h: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(h).map(|(a, b)| a + s * b).collect()
}

/// Forward Euler for `γ̇₊ = ∇f(γ)` that stops at every time an inactive
/// branch reaches the minimum, located by bisection, and restarts there
/// with the new gradient. Affine branches are integrated exactly.
pub fn gradient_curve(f: &PiecewiseMinFunction, p: &[f64], duration: f64, step: f64) -> Result<GradientCurve> {
    f.check_point(p)?;
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::DomainError("duration must be finite and nonnegative"));
    }
    if !(step > 0.0) {
        return Err(Error::DomainError("step must be positive"));
    }
    if duration > 0.0 && step > duration {
        return Err(Error::StepTooLarge { step, max: duration });
    }
    let mut curve = GradientCurve { times: vec![0.0], points: vec![p.to_vec()], values: vec![f.value(p)], events: Vec::new() };
    let mut t = 0.0;
    let mut x = p.to_vec();
    let mut segments = 0;
    // grid times are anchor + k·step, re-anchored at every event
    let (mut anchor, mut k) = (0.0, 0u64);
    while t < duration {
        segments += 1;
        if segments > MAX_SEGMENTS {
            return Err(Error::PreconditionFailed("gradient curve needs too many segments".into()));
        }
        let h = gradient(f, &x)?;
        if norm(&h) == 0.0 {
            // critical point: the curve stays put
            curve.times.push(duration);
            curve.points.push(x.clone());
            curve.values.push(f.value(&x));
            break;
        }
        let target = (anchor + (k + 1) as f64 * step).min(duration);
        let mut dt = target - t;
        let active = f.active(&x);
        let gap = |s: f64, j: usize| {
            let y = along(&x, &h, s);
            let m = active.iter().map(|&i| f.branches[i].value(&y)).fold(f64::INFINITY, f64::min);
            f.branches[j].value(&y) - m
        };
        let mut event = false;
        for j in (0..f.branches.len()).filter(|j| !active.contains(j)) {
            if gap(dt, j) <= 0.0 {
                let (mut lo, mut hi) = (0.0, dt);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if gap(mid, j) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                dt = hi;
                event = true;
            }
        }
        x = along(&x, &h, dt);
        if event {
            t += dt;
            anchor = t;
            k = 0;
            curve.events.push(t);
        } else {
            t = target;
            k += 1;
        }
        curve.times.push(t);
        curve.points.push(x.clone());
        curve.values.push(f.value(&x));
    }
    Ok(curve)
}

/// Allowance for integration error: rounding only when every branch is
/// affine (the scheme is exact), otherwise `10·step` relative.
fn allowance(f: &PiecewiseMinFunction, step: f64, scale: f64) -> f64 {
    let base = 1e-9 * (1.0 + scale);
    if f.is_affine() {
        base
    } else {
        base + 10.0 * step * (1.0 + scale)
    }
}

/// `d(α(t), β(t)) ≤ d(p, q) e^{λt}` along the gradient curves from `p`
/// and `q`, on the union of both time grids.
pub fn contraction_report(f: &PiecewiseMinFunction, p: &[f64], q: &[f64], duration: f64, step: f64) -> Result<Report> {
    let a = gradient_curve(f, p, duration, step)?;
    let b = gradient_curve(f, q, duration, step)?;
    let d0 = dist(p, q);
    let lambda = f.lambda();
    let mut grid: Vec<f64> = a.times.iter().chain(&b.times).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let growth = exp(lambda.max(0.0) * duration);
    let mut r = Report::new("gradient_flow_contraction", allowance(f, step, d0 * growth));
    for &t in &grid {
        let d = dist(&a.position(t), &b.position(t));
        r.observe(d - d0 * exp(lambda * t), &[("t", t), ("distance", d)]);
    }
    Ok(r)
}

/// `|Φ_s(p) Φ_t(q)|² ≤ |pq|² + 2(f(p) − f(q))(s − t) + (s − t)²` for
/// concave 1-Lipschitz `f`; equality is also required when `f` is a single
/// affine branch with unit gradient.
pub fn petrunin_report(f: &PiecewiseMinFunction, p: &[f64], q: &[f64], s: f64, t: f64, step: f64) -> Result<Report> {
    if f.lambda() > 0.0 {
        return Err(Error::NotConcave { lambda: f.lambda() });
    }
    if f.lipschitz() > 1.0 + 1e-12 {
        return Err(Error::NotOneLipschitz { lipschitz: f.lipschitz() });
    }
    let flow = |x: &[f64], time: f64| -> Result<Vec<f64>> {
        if time == 0.0 {
            f.check_point(x)?;
            return Ok(x.to_vec());
        }
        Ok(gradient_curve(f, x, time, step.min(time))?.endpoint().to_vec())
    };
    let a = flow(p, s)?;
    let b = flow(q, t)?;
    let lhs = {
        let d = dist(&a, &b);
        d * d
    };
    let d0 = dist(p, q);
    let rhs = d0 * d0 + 2.0 * (f.value(p) - f.value(q)) * (s - t) + (s - t) * (s - t);
    let tol = allowance(f, step, rhs.abs());
    let mut r = Report::new("petrunin", tol);
    r.observe(lhs - rhs, &[("lhs", lhs), ("rhs", rhs)]);
    let unit_affine = matches!(f.branches(), [Branch::Affine { g, .. }] if (norm(g) - 1.0).abs() <= 1e-12);
    if unit_affine && (lhs - rhs).abs() > tol {
        r.fail(format!("equality expected for a unit affine function: {lhs} vs {rhs}"));
    }
    Ok(r)
}

/// A unit-speed straight ray in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ray {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
}

impl Ray {
    /// Normalizes `direction`.
    pub fn new(origin: Vec<f64>, direction: Vec<f64>) -> Result<Self> {
        if origin.len() != direction.len() {
            return Err(Error::DimensionMismatch { expected: origin.len(), got: direction.len() });
        }
        let l = norm(&direction);
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::DomainError("ray direction must be a nonzero finite vector"));
        }
        Ok(Ray { origin, direction: direction.iter().map(|v| v / l).collect() })
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        along(&self.origin, &self.direction, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BusemannValue {
    /// `d(x, γ(T)) − T`.
    pub value: f64,
    /// The limit lies in `[lower, value]` with `lower = −d(x, γ(0))`.
    pub lower: f64,
    /// `−⟨x − γ(0), γ̇⟩`, the limit for a straight ray.
    pub closed_form: f64,
}

/// Finite-horizon Busemann value. `d(x, γ(T)) − T` is evaluated as
/// `(|w|² − 2T⟨w, u⟩)/(d(x, γ(T)) + T)` with `w = x − γ(0)`, which avoids
/// cancellation for large `T`.
pub fn busemann_eval(ray: &Ray, x: &[f64], horizon: f64) -> Result<BusemannValue> {
    if x.len() != ray.origin.len() {
        return Err(Error::DimensionMismatch { expected: ray.origin.len(), got: x.len() });
    }
    if !(horizon > 0.0) {
        return Err(Error::DomainError("horizon must be positive"));
    }
    let w: Vec<f64> = x.iter().zip(&ray.origin).map(|(a, b)| a - b).collect();
    let wu = dot(&w, &ray.direction);
    let d = dist(x, &ray.at(horizon));
    let value = (dot(&w, &w) - 2.0 * horizon * wu) / (d + horizon);
    Ok(BusemannValue { value, lower: -norm(&w), closed_form: -wu })
}

/// Discrete concavity of `f(t) − λt²/2` from samples on a uniform grid of
/// the given spacing: `f_{k−1} − 2f_k + f_{k+1} ≤ λh² + 2·tol` at every
/// interior sample. The defect reported is half the excess.
pub fn lambda_concavity_check(samples: &[f64], spacing: f64, lambda: f64, tol: f64) -> Result<Report> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples { got: samples.len(), need: 3 });
    }
    if !(spacing > 0.0) {
        return Err(Error::DomainError("spacing must be positive"));
    }
    let mut r = Report::new("lambda_concavity", tol);
    for k in 1..samples.len() - 1 {
        let second = samples[k - 1] - 2.0 * samples[k] + samples[k + 1];
        r.observe(0.5 * (second - lambda * spacing * spacing), &[("index", k as f64)]);
    }
    Ok(r)
}

/// `⟨∇f_p, u⟩ + ⟨∇f_q, −u⟩ ≥ −λ|pq|` with `u` the unit vector from `p`
/// to `q`. Both one-sided pairings are reported in the witness.
pub fn gradient_inequality_check(f: &PiecewiseMinFunction, p: &[f64], q: &[f64]) -> Result<Report> {
    let l = dist(p, q);
    if !(l > 0.0) {
        return Err(Error::PreconditionFailed("p and q must differ".into()));
    }
    let u: Vec<f64> = q.iter().zip(p).map(|(a, b)| (a - b) / l).collect();
    let at_p = dot(&gradient(f, p)?, &u);
    let at_q = -dot(&gradient(f, q)?, &u);
    let bound = -f.lambda() * l;
    let mut r = Report::new("gradient_pairing", 1e-9 * (1.0 + bound.abs()));
    r.observe(bound - (at_p + at_q), &[("pairing_p", at_p), ("pairing_q", at_q), ("sum", at_p + at_q), ("bound", bound)]);
    Ok(r)
}
