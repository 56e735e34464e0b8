//! Volumes of model balls, caps and annuli, Bishop-Gromov harnesses, and
//! the counting constants obtained from volume comparison.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{asin, powi, sqrt, PI};
use crate::model_space::{model_diameter, modified_distance, sn, Curvature};
use crate::quadrature::adaptive_simpson;
use crate::report::Report;

/// A ball `B_r` in the `n`-dimensional model space of curvature `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelBallSpec {
    pub n: u32,
    pub kappa: Curvature,
    pub r: f64,
}

impl ModelBallSpec {
    pub fn new(n: u32, kappa: impl Into<Curvature>, r: f64) -> Self {
        ModelBallSpec { n, kappa: kappa.into(), r }
    }

    pub fn volume(&self) -> Result<f64> {
        model_ball_volume(self.n, self.kappa, self.r)
    }
}

/// `Vol(S^{n−1}) = 2π^{n/2}/Γ(n/2)`, by the recursion
/// `S(n+2) = 2π S(n)/n`.
pub fn sphere_measure(n: u32) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * sphere_measure(n - 2) / (n - 2) as f64,
    }
}

fn check_ball(n: u32, r: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::DomainError("dimension must be at least 1"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::DomainError("radius must be finite and nonnegative"));
    }
    Ok(())
}

/// `Vol(S^{n−1}) ∫₀^{min(r, ϖ)} sn_κ(t)^{n−1} dt`, always by adaptive
/// quadrature. [`model_ball_volume`] uses closed forms where it can.
pub fn model_ball_volume_quadrature(n: u32, k: Curvature, r: f64) -> Result<f64> {
    check_ball(n, r)?;
    let top = r.min(model_diameter(k));
    if top == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| powi(sn(k, t), n as i32 - 1);
    // sn is increasing on [0, min(r, ϖ/2)], so this bounds the integrand
    let peak = if k.0 > 0.0 { powi(sn(k, top.min(0.5 * model_diameter(k))), n as i32 - 1) } else { f(top) };
    let tol = 1e-13 * top * peak.max(f64::MIN_POSITIVE);
    Ok(sphere_measure(n) * adaptive_simpson(&f, 0.0, top, tol))
}

/// Volume of the closed `r`-ball in the `n`-dimensional model space of
/// curvature `κ`. Constant in `r` past the diameter when `κ > 0`.
pub fn model_ball_volume(n: u32, k: Curvature, r: f64) -> Result<f64> {
    check_ball(n, r)?;
    match n {
        1 => Ok(2.0 * r.min(model_diameter(k))),
        2 => Ok(2.0 * PI * modified_distance(k, r.min(model_diameter(k)))),
        _ => model_ball_volume_quadrature(n, k, r),
    }
}

/// Volume of a geodesic `r`-ball in the unit sphere `S^{n−1}`.
pub fn spherical_cap_volume(n: u32, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::DomainError("caps need n >= 2"));
    }
    if !(0.0..=PI).contains(&r) {
        return Err(Error::DomainError("cap radius must lie in [0, π]"));
    }
    model_ball_volume(n - 1, Curvature(1.0), r)
}

/// Radii and volumes `Vol B_r` sampled from some space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmpiricalVolumeCurve {
    radii: Vec<f64>,
    volumes: Vec<f64>,
}

impl EmpiricalVolumeCurve {
    pub fn new(radii: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        if radii.len() != volumes.len() {
            return Err(Error::DimensionMismatch { expected: radii.len(), got: volumes.len() });
        }
        if radii.is_empty() {
            return Err(Error::TooFewSamples { got: 0, need: 1 });
        }
        if radii.iter().chain(&volumes).any(|v| !v.is_finite()) {
            return Err(Error::PreconditionFailed("non-finite sample".into()));
        }
        if radii[0] < 0.0 || volumes[0] < 0.0 {
            return Err(Error::PreconditionFailed("negative radius or volume".into()));
        }
        for i in 1..radii.len() {
            if !(radii[i] > radii[i - 1]) {
                return Err(Error::PreconditionFailed(format!("radii not increasing at row {i}")));
            }
            if volumes[i] < volumes[i - 1] {
                return Err(Error::PreconditionFailed(format!("volumes decrease at row {i}")));
            }
        }
        Ok(EmpiricalVolumeCurve { radii, volumes })
    }

    /// The model volumes themselves.
    pub fn model(n: u32, k: Curvature, radii: &[f64]) -> Result<Self> {
        let volumes = radii.iter().map(|&r| model_ball_volume(n, k, r)).collect::<Result<Vec<_>>>()?;
        Self::new(radii.to_vec(), volumes)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }
}

/// Checks that `r ↦ V(r)/V_κ^n(r)` does not increase by more than
/// `tolerance` (relative to the previous ratio) between samples. With
/// `centered`, the curve is taken to be balls around one point and
/// `V(r) ≤ V_κ^n(r)` is checked too. Radius 0 is skipped.
pub fn bg_monotonicity_report(curve: &EmpiricalVolumeCurve, n: u32, k: Curvature, centered: bool, tolerance: f64) -> Result<Report> {
    let mut report = Report::new("bishop_gromov", tolerance);
    let mut prev: Option<f64> = None;
    for (&r, &v) in curve.radii.iter().zip(&curve.volumes) {
        if r == 0.0 {
            continue;
        }
        let model = model_ball_volume(n, k, r)?;
        let ratio = v / model;
        if let Some(p) = prev {
            report.observe((ratio - p) / p.max(f64::MIN_POSITIVE), &[("radius", r), ("ratio", ratio), ("previous_ratio", p)]);
        }
        if centered {
            let excess = (v - model) / model;
            if excess > tolerance {
                report.fail(format!("volume {v} exceeds the model volume {model} at radius {r}"));
            }
        }
        prev = Some(ratio);
    }
    if report.checked == 0 {
        report.note("fewer than two positive radii; nothing to compare");
    }
    Ok(report)
}

/// Discrete weighted running averages `Σ_{i≤k} q_i w_i / Σ_{i≤k} w_i`.
/// Prefixes of zero total weight are reported as NaN.
pub fn running_weighted_average(q: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if q.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: q.len(), got: w.len() });
    }
    if w.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::WeightsInvalid);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    Ok(q.iter()
        .zip(w)
        .map(|(&a, &b)| {
            num += a * b;
            den += b;
            if den > 0.0 { num / den } else { f64::NAN }
        })
        .collect())
}

/// `c(n) = 2·Vol(S^{n−1})`, twice the supremum of the annulus integrand.
pub fn annulus_constant(n: u32) -> f64 {
    2.0 * sphere_measure(n)
}

/// Volume of the annulus `π/2 − ε < d(p, ·) < π/2 + ε` around a point of
/// `S^n` together with the bound `c(n)·ε`.
pub fn annulus_bound(n: u32, eps: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::DomainError("annulus bound needs n >= 2"));
    }
    if !(eps > 0.0 && eps < 0.5 * PI) {
        return Err(Error::DomainError("annulus half-width must lie in (0, π/2)"));
    }
    let f = |t: f64| powi(libm::sin(t), n as i32 - 1);
    let exact = sphere_measure(n) * adaptive_simpson(&f, 0.5 * PI - eps, 0.5 * PI + eps, 1e-14 * eps);
    let bound = annulus_constant(n) * eps;
    debug_assert!(exact <= bound * (1.0 + 1e-12));
    Ok((bound, exact))
}

/// `L(n) = V_{−1}^n(3) / V_{−1}^n(1/2)`.
pub fn packing_multiplicity_bound(n: u32) -> Result<f64> {
    let k = Curvature(-1.0);
    Ok(model_ball_volume(n, k, 3.0)? / model_ball_volume(n, k, 0.5)?)
}

/// Which short-basis constant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ShortBasisRegime {
    /// Curvature `≥ 0`: pairwise angles at least `π/3`.
    Nonnegative,
    /// Curvature `≥ κ < 0` and diameter `≤ D`.
    Curved { kappa: Curvature, diameter: f64 },
}

/// `ε(D) = (cosh²2D − cosh 2D)/sinh²2D = c/(c+1)` with `c = cosh 2D`, the
/// cosine bound for angles between short loops in curvature `≥ −1`.
pub fn angle_cosine_bound(d: f64) -> f64 {
    let c = libm::cosh(2.0 * d);
    c / (c + 1.0)
}

/// `arccos ε(D)`, evaluated as `2 asin(√(1/(2(c+1))))` to stay accurate
/// when `ε(D)` is close to 1.
pub fn angle_bound(d: f64) -> f64 {
    let c = libm::cosh(2.0 * d);
    2.0 * asin(sqrt(0.5 / (c + 1.0)))
}

/// Bound on the number of elements of a short basis: `Vol(S^{n−1})`
/// divided by the volume of a cap of radius half the minimal angle.
pub fn short_basis_bound(n: u32, regime: ShortBasisRegime) -> Result<f64> {
    if n < 2 {
        return Err(Error::DomainError("short basis bound needs n >= 2"));
    }
    let half_angle = match regime {
        ShortBasisRegime::Nonnegative => PI / 6.0,
        ShortBasisRegime::Curved { kappa, diameter } => {
            if !(kappa.0 < 0.0) {
                return Err(Error::DomainError("curved regime needs κ < 0"));
            }
            if !(diameter > 0.0) || !diameter.is_finite() {
                return Err(Error::DomainError("diameter must be positive"));
            }
            0.5 * angle_bound(diameter * sqrt(-kappa.0))
        }
    };
    Ok(sphere_measure(n) / spherical_cap_volume(n, half_angle)?)
}

/// Separation constants for mutually `ε`-critical points (flat case):
/// `ε = V/(ω_n + Dⁿ c(n))·(1 − 10⁻⁹)` and `δ = ε³`.
pub fn critical_separation(n: u32, d: f64, v: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::DomainError("critical separation needs n >= 2"));
    }
    if !(d > 0.0) || !(v > 0.0) {
        return Err(Error::DomainError("D and V must be positive"));
    }
    let omega = model_ball_volume(n, Curvature(0.0), 1.0)?;
    let eps = v / (omega + powi(d, n as i32) * annulus_constant(n)) * (1.0 - 1e-9);
    Ok((eps, eps * eps * eps))
}

/// `diam ≤ π/√κ` (always true for `κ ≤ 0`).
pub fn myers_check(k: Curvature, diam: f64, tol: f64) -> Report {
    let mut r = Report::new("myers", tol);
    let bound = model_diameter(k);
    let excess = if bound.is_finite() { diam - bound } else { f64::NEG_INFINITY };
    r.observe(excess, &[("diameter", diam), ("bound", bound)]);
    r
}
