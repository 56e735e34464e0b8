//! Scalar Jacobi and Riccati equations along a geodesic.
//!
//! Jacobi: `y'' + κ(t) y = 0`. Riccati: `a' + a² + κ(t) = 0`. The two are
//! linked by `a = y'/y`, and every Riccati solution here is produced through
//! that substitution, so no integration ever runs through a pole.
//! Integration is classical fixed-step RK4 on `(y, y')`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::format;

use crate::error::{Error, Result};
use crate::math::{ceil, PI};
use crate::model_space::{self, Curvature};
use crate::report::Report;

/// Defaults for the solvers and harnesses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// A Riccati solution is cut off once `|a|` exceeds this.
    pub blowup_threshold: f64,
    /// Tolerance written into comparison reports.
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { blowup_threshold: 1e9, tolerance: 1e-6 }
    }
}

#[derive(Clone)]
enum ProfileKind {
    Constant(f64),
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Samples { times: Vec<f64>, values: Vec<f64> },
}

/// A curvature function `t ↦ κ(t)` on `[0, horizon]`.
#[derive(Clone)]
pub struct CurvatureProfile {
    kind: ProfileKind,
    horizon: f64,
}

impl core::fmt::Debug for CurvatureProfile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let kind = match &self.kind {
            ProfileKind::Constant(k) => format!("Constant({k})"),
            ProfileKind::Closure(_) => "Closure".into(),
            ProfileKind::Samples { times, .. } => format!("Samples({})", times.len()),
        };
        f.debug_struct("CurvatureProfile").field("kind", &kind).field("horizon", &self.horizon).finish()
    }
}

impl CurvatureProfile {
    pub fn constant(kappa: f64, horizon: f64) -> Self {
        CurvatureProfile { kind: ProfileKind::Constant(kappa), horizon }
    }

    pub fn from_fn<F>(f: F, horizon: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CurvatureProfile { kind: ProfileKind::Closure(Arc::new(f)), horizon }
    }

    /// Piecewise-linear interpolation of `(t, κ)` samples. Times must be
    /// strictly increasing and start at 0; the horizon is the last time.
    pub fn from_samples(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::TooFewSamples { got: times.len().min(values.len()), need: 2 });
        }
        if times[0] != 0.0 {
            return Err(Error::DomainError("profile samples must start at t = 0"));
        }
        for (i, w) in times.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::PreconditionFailed(format!(
                    "profile times not strictly increasing at row {}",
                    i + 1
                )));
            }
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::ProfileUndefined { t: times[i] });
            }
        }
        let horizon = *times.last().unwrap();
        Ok(CurvatureProfile { kind: ProfileKind::Samples { times, values }, horizon })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        CurvatureProfile { kind: self.kind.clone(), horizon }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant(k) => *k,
            ProfileKind::Closure(f) => f(t),
            ProfileKind::Samples { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                let last = times.len() - 1;
                if t >= times[last] {
                    return values[last];
                }
                let i = times.partition_point(|&s| s <= t) - 1;
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }

    /// Constant profiles report their value; others `None`.
    pub fn as_constant(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Constant(k) => Some(k),
            _ => None,
        }
    }
}

/// Sampled solution of a scalar ODE.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalarODESolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `y'` for Jacobi solutions; empty for Riccati solutions.
    pub derivatives: Vec<f64>,
    /// Sub-grid locations of sign changes of `y` (Jacobi) in `(0, T]`.
    pub zeros: Vec<f64>,
    /// Where a Riccati solution leaves `[-M, M]`.
    pub blowup_time: Option<f64>,
}

impl ScalarODESolution {
    pub fn first_zero(&self) -> Option<f64> {
        self.zeros.first().copied()
    }

    /// Linear interpolation of the recorded values.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let g = &self.grid;
        if g.is_empty() || t < g[0] || t > *g.last().unwrap() {
            return None;
        }
        let i = g.partition_point(|&s| s <= t).saturating_sub(1).min(g.len() - 1);
        if i + 1 == g.len() {
            return Some(self.values[i]);
        }
        let w = (t - g[i]) / (g[i + 1] - g[i]);
        Some(self.values[i] + w * (self.values[i + 1] - self.values[i]))
    }
}

fn uniform_grid(horizon: f64, step: f64) -> Result<(usize, f64)> {
    let max = horizon / 10.0;
    if !(step > 0.0) || step > max * (1.0 + 1e-12) || !horizon.is_finite() {
        return Err(Error::StepTooLarge { step, max });
    }
    let n = ceil(horizon / step - 1e-9) as usize;
    Ok((n.max(1), horizon / n.max(1) as f64))
}

fn kappa_at(profile: &CurvatureProfile, t: f64) -> Result<f64> {
    let k = profile.eval(t);
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::ProfileUndefined { t })
    }
}

/// Integrates `y'' + κ(t) y = 0` on `[0, T]` with RK4.
///
/// `step` is rounded down so that a whole number of steps covers the
/// horizon; it must not exceed `T/10`.
pub fn solve_jacobi(profile: &CurvatureProfile, y0: f64, dy0: f64, step: f64) -> Result<ScalarODESolution> {
    let (n, h) = uniform_grid(profile.horizon, step)?;
    let mut grid = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut derivatives = Vec::with_capacity(n + 1);
    let (mut y, mut v) = (y0, dy0);
    grid.push(0.0);
    values.push(y);
    derivatives.push(v);
    let mut k_left = kappa_at(profile, 0.0)?;
    for i in 0..n {
        let t = i as f64 * h;
        let k_mid = kappa_at(profile, t + 0.5 * h)?;
        let k_right = kappa_at(profile, (i + 1) as f64 * h)?;
        // (y, v)' = (v, -κ y)
        let (k1y, k1v) = (v, -k_left * y);
        let (k2y, k2v) = (v + 0.5 * h * k1v, -k_mid * (y + 0.5 * h * k1y));
        let (k3y, k3v) = (v + 0.5 * h * k2v, -k_mid * (y + 0.5 * h * k2y));
        let (k4y, k4v) = (v + h * k3v, -k_right * (y + h * k3y));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(y.is_finite() && v.is_finite()) {
            return Err(Error::ProfileUndefined { t: t + h });
        }
        grid.push((i + 1) as f64 * h);
        values.push(y);
        derivatives.push(v);
        k_left = k_right;
    }
    let zeros = sign_changes(&grid, &values);
    Ok(ScalarODESolution { grid, values, derivatives, zeros, blowup_time: None })
}

/// Zeros of the sampled function in `(0, T]`, each refined by bisection on
/// the cubic through the four nearest samples.
fn sign_changes(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let mut zeros = Vec::new();
    let n = values.len();
    for i in 0..n.saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if i > 0 && a == 0.0 {
            // exact hit at a sample, counted once
            if values[i - 1] != 0.0 {
                zeros.push(grid[i]);
            }
            continue;
        }
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            if i + 1 == n - 1 {
                zeros.push(grid[i + 1]);
            }
            continue;
        }
        if (a < 0.0) != (b < 0.0) {
            zeros.push(refine_zero(grid, values, i));
        }
    }
    zeros
}

fn refine_zero(grid: &[f64], values: &[f64], i: usize) -> f64 {
    let n = values.len();
    let start = if i == 0 { 0 } else { (i - 1).min(n.saturating_sub(4)) };
    let idx: Vec<usize> = (start..(start + 4).min(n)).collect();
    let cubic = |t: f64| -> f64 {
        let mut s = 0.0;
        for &j in &idx {
            let mut l = values[j];
            for &m in &idx {
                if m != j {
                    l *= (t - grid[m]) / (grid[j] - grid[m]);
                }
            }
            s += l;
        }
        s
    };
    let (mut lo, mut hi) = (grid[i], grid[i + 1]);
    let mut flo = cubic(lo);
    if (flo < 0.0) == (cubic(hi) < 0.0) {
        // interpolant lost the bracket; fall back to the secant point
        let (a, b) = (values[i], values[i + 1]);
        return lo + (hi - lo) * a / (a - b);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = cubic(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Initial data for the Riccati equation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RiccatiInit {
    Value(f64),
    /// `a(t) ~ 1/t` as `t → 0⁺`.
    PoleAtZero,
}

/// Solves `a' + a² + κ(t) = 0` as `a = y'/y` for the Jacobi solution with
/// data `(0, 1)` (pole at zero) or `(1, a₀)`.
///
/// The output grid starts at the first grid point after 0 for the pole
/// case. The solution stops at the first zero of `y` (where `a → -∞`) or
/// where `|a|` exceeds the blow-up threshold; that time is `blowup_time`.
pub fn solve_riccati(
    profile: &CurvatureProfile,
    init: RiccatiInit,
    step: f64,
    options: &SolverOptions,
) -> Result<ScalarODESolution> {
    let (y0, dy0) = match init {
        RiccatiInit::Value(a) => (1.0, a),
        RiccatiInit::PoleAtZero => (0.0, 1.0),
    };
    let jac = solve_jacobi(profile, y0, dy0, step)?;
    let first_zero = jac.first_zero();
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut blowup_time = None;
    for (i, &t) in jac.grid.iter().enumerate() {
        if i == 0 && matches!(init, RiccatiInit::PoleAtZero) {
            continue;
        }
        if let Some(z) = first_zero {
            if t >= z {
                blowup_time = Some(z);
                break;
            }
        }
        let a = jac.derivatives[i] / jac.values[i];
        if !(a.abs() <= options.blowup_threshold) {
            blowup_time = Some(first_zero.unwrap_or(t));
            break;
        }
        grid.push(t);
        values.push(a);
    }
    Ok(ScalarODESolution { grid, values, derivatives: Vec::new(), zeros: Vec::new(), blowup_time })
}

fn check_profile_order(upper: &CurvatureProfile, lower: &CurvatureProfile, horizon: f64, h: f64) -> Result<()> {
    let n = ceil(horizon / h) as usize;
    for i in 0..=2 * n {
        let t = (i as f64 * 0.5 * h).min(horizon);
        let (u, l) = (upper.eval(t), lower.eval(t));
        if !(u.is_finite() && l.is_finite()) {
            return Err(Error::ProfileUndefined { t });
        }
        if u < l - 1e-12 * (1.0 + l.abs()) {
            return Err(Error::ProfileOrderViolated { t, upper: u, lower: l });
        }
    }
    Ok(())
}

/// Riccati comparison: with `κ_hi ≥ κ_lo` pointwise and `a_hi(0) ≤ a_lo(0)`
/// the solutions stay ordered, `a_hi(t) ≤ a_lo(t)`.
///
/// The report's `worst` is `max (a_hi - a_lo)` over the common grid; a
/// positive value beyond the tolerance indicates a solver defect. Once the
/// upper-curvature solution blows up the ordering holds trivially and the
/// scan stops.
pub fn compare_riccati(
    profile_hi: &CurvatureProfile,
    profile_lo: &CurvatureProfile,
    init_hi: RiccatiInit,
    init_lo: RiccatiInit,
    step: f64,
    options: &SolverOptions,
) -> Result<Report> {
    let horizon = profile_hi.horizon.min(profile_lo.horizon);
    let hi = profile_hi.with_horizon(horizon);
    let lo = profile_lo.with_horizon(horizon);
    let (_, h) = uniform_grid(horizon, step)?;
    check_profile_order(&hi, &lo, horizon, h)?;
    match (init_hi, init_lo) {
        (RiccatiInit::Value(a), RiccatiInit::Value(b)) if a > b => {
            return Err(Error::PreconditionFailed(format!("initial values out of order: {a} > {b}")));
        }
        (RiccatiInit::Value(_), RiccatiInit::PoleAtZero) => {}
        (RiccatiInit::PoleAtZero, RiccatiInit::Value(_)) => {
            return Err(Error::PreconditionFailed("pole initial data for the upper profile only".into()));
        }
        _ => {}
    }
    let g = solve_riccati(&hi, init_hi, step, options)?;
    let big = solve_riccati(&lo, init_lo, step, options)?;
    let mut report = Report::new("riccati_comparison", options.tolerance);
    let mut min_slack = f64::INFINITY;
    let mut min_slack_t = f64::NAN;
    // grids coincide except that the pole case drops t = 0
    let mut j = 0;
    for (i, &t) in g.grid.iter().enumerate() {
        while j < big.grid.len() && big.grid[j] < t {
            j += 1;
        }
        if j == big.grid.len() {
            break;
        }
        if big.grid[j] != t {
            continue;
        }
        let margin = g.values[i] - big.values[j];
        report.observe(margin, &[("t", t), ("lower_curvature_value", big.values[j]), ("upper_curvature_value", g.values[i])]);
        if -margin < min_slack {
            min_slack = -margin;
            min_slack_t = t;
        }
    }
    if let Some(b) = g.blowup_time {
        report.note(format!("upper-curvature solution blows up at t = {b}"));
    }
    if let Some(b) = big.blowup_time {
        if g.blowup_time.is_none_or(|a| a > b + h) {
            report.fail(format!("lower-curvature solution blows up first, at t = {b}"));
        }
    }
    report.note(format!("smallest slack {min_slack} at t = {min_slack_t}"));
    Ok(report)
}

/// Which Rauch comparison to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RauchKind {
    /// Data `y(0) = 0, y'(0) = 1`, compared with `sn_κ`.
    RauchI,
    /// Data `y(0) = 1, y'(0) = 0`, compared with `cs_κ`.
    RauchII,
}

/// Ratio data produced alongside the Rauch report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RauchRun {
    pub report: Report,
    pub times: Vec<f64>,
    pub ratio: Vec<f64>,
    pub first_zero: Option<f64>,
    pub model_first_zero: Option<f64>,
}

fn model_first_zero(k: Curvature, kind: RauchKind) -> Option<f64> {
    if k.0 <= 0.0 {
        return None;
    }
    let d = model_space::model_diameter(k);
    Some(match kind {
        RauchKind::RauchI => d,
        RauchKind::RauchII => 0.5 * d,
    })
}

/// Rauch comparison for a scalar profile `κ(t) ≥ κ_model`.
///
/// Checks that `y/ỹ` is non-increasing up to the first zero of `y` (upward
/// steps above the tolerance fail) and that `y` vanishes no later than the
/// model solution `ỹ` (within one step).
pub fn rauch_ratio(
    profile: &CurvatureProfile,
    model: Curvature,
    kind: RauchKind,
    step: f64,
    tolerance: f64,
) -> Result<RauchRun> {
    let model_profile = CurvatureProfile::constant(model.0, profile.horizon);
    let (_, h) = uniform_grid(profile.horizon, step)?;
    check_profile_order(profile, &model_profile, profile.horizon, h)?;
    let (y0, dy0) = match kind {
        RauchKind::RauchI => (0.0, 1.0),
        RauchKind::RauchII => (1.0, 0.0),
    };
    let sol = solve_jacobi(profile, y0, dy0, step)?;
    let first_zero = sol.first_zero();
    let model_zero = model_first_zero(model, kind);
    let stop = match (first_zero, model_zero) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => f64::INFINITY,
    };
    let mut report = Report::new(
        match kind {
            RauchKind::RauchI => "rauch_I_ratio",
            RauchKind::RauchII => "rauch_II_ratio",
        },
        tolerance,
    );
    let mut times = Vec::new();
    let mut ratio = Vec::new();
    for (i, &t) in sol.grid.iter().enumerate() {
        if t >= stop {
            break;
        }
        let model_y = match kind {
            RauchKind::RauchI => {
                if t == 0.0 {
                    continue;
                }
                model_space::sn(model, t)
            }
            RauchKind::RauchII => model_space::cs(model, t),
        };
        if model_y <= 0.0 {
            break;
        }
        let r = sol.values[i] / model_y;
        if let Some(&prev) = ratio.last() {
            report.observe(r - prev, &[("t", t), ("ratio", r), ("previous_ratio", prev)]);
        }
        times.push(t);
        ratio.push(r);
    }
    if let Some(mz) = model_zero {
        if mz <= profile.horizon {
            match first_zero {
                Some(z) if z <= mz + h => {}
                Some(z) => report.fail(format!("first zero {z} occurs after the model zero {mz}")),
                None => report.fail(format!("no zero before the model zero {mz}")),
            }
        }
    }
    report.note(format!("first zero {:?}, model first zero {:?}", first_zero, model_zero));
    Ok(RauchRun { report, times, ratio, first_zero, model_first_zero: model_zero })
}

/// With `κ(t) ≥ κ > 0`, the Jacobi solution with data `(0, 1)` must vanish
/// by `π/√κ`. The horizon has to reach past that point.
pub fn conjugate_bound_check(profile: &CurvatureProfile, k: Curvature, step: f64) -> Result<Report> {
    if !(k.0 > 0.0) {
        return Err(Error::DomainError("conjugate bound needs κ > 0"));
    }
    let bound = PI / libm::sqrt(k.0);
    let (_, h) = uniform_grid(profile.horizon, step)?;
    check_profile_order(profile, &CurvatureProfile::constant(k.0, profile.horizon), profile.horizon, h)?;
    let sol = solve_jacobi(profile, 0.0, 1.0, step)?;
    let mut report = Report::new("conjugate_bound", h);
    match sol.first_zero() {
        Some(z) => report.observe(z - bound, &[("first_zero", z), ("bound", bound)]),
        None => {
            if profile.horizon < bound + h {
                return Err(Error::PreconditionFailed(format!(
                    "horizon {} does not reach the bound {bound}",
                    profile.horizon
                )));
            }
            report.fail(format!("no zero on [0, {}] although the bound is {bound}", profile.horizon));
        }
    }
    Ok(report)
}
