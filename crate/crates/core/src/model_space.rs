//! Trigonometry of the simply connected constant-curvature model planes.
//!
//! All functions are parameterized by a [`Curvature`] `κ`. The generalized
//! sine `sn_κ` and cosine `cs_κ` solve `y'' + κ y = 0` with initial data
//! `(0, 1)` and `(1, 0)`; the modified distance `md_κ` solves
//! `z'' + κ z = 1` with `z(0) = z'(0) = 0`.
//!
//! The cosine law is evaluated through a half-angle form built from `sn_κ`
//! of half-perimeter combinations. It is algebraically the same law as
//! `cos φ = (cs(a) - cs(b) cs(c)) / (κ sn(b) sn(c))` but has no cancellation
//! near `κ = 0` or for thin triangles; [`cosine_law_cos`] keeps the direct
//! form available for cross-checks.

use crate::error::{Error, Result};
use crate::math::{acos, asin, asinh, atan2, cos, cosh, sin, sinh, sqrt, PI};

/// Below this value of `|κ| t²` the trig functions switch to Taylor series.
const TAYLOR_THRESHOLD: f64 = 1e-8;

/// Relative slack used when classifying side lengths.
const SIDE_REL_TOL: f64 = 1e-10;

/// Curvature of a model space, in units of 1/length².
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Curvature(pub f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    /// Diameter of the model space: `π/√κ` for `κ > 0`, `+∞` otherwise.
    pub fn diameter(self) -> f64 {
        model_diameter(self)
    }
}

impl From<f64> for Curvature {
    fn from(k: f64) -> Self {
        Curvature(k)
    }
}

/// Values of the generalized trigonometric functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trig {
    pub sn: f64,
    pub cs: f64,
    /// `cs/sn`, signed infinity where `sn` vanishes.
    pub ct: f64,
}

pub fn model_diameter(k: Curvature) -> f64 {
    if k.0 > 0.0 {
        PI / sqrt(k.0)
    } else {
        f64::INFINITY
    }
}

/// `sn_κ(t)`. Negative `t` is allowed.
pub fn sn(k: Curvature, t: f64) -> f64 {
    let k = k.0;
    if (k * t * t).abs() < TAYLOR_THRESHOLD {
        let t2 = t * t;
        return t * (1.0 - k * t2 / 6.0 + k * k * t2 * t2 / 120.0);
    }
    if k > 0.0 {
        let r = sqrt(k);
        sin(r * t) / r
    } else {
        let r = sqrt(-k);
        sinh(r * t) / r
    }
}

/// `cs_κ(t)`.
pub fn cs(k: Curvature, t: f64) -> f64 {
    let k = k.0;
    if (k * t * t).abs() < TAYLOR_THRESHOLD {
        let t2 = t * t;
        return 1.0 - k * t2 / 2.0 + k * k * t2 * t2 / 24.0;
    }
    if k > 0.0 {
        cos(sqrt(k) * t)
    } else {
        cosh(sqrt(-k) * t)
    }
}

pub fn trig(k: Curvature, t: f64) -> Trig {
    let s = sn(k, t);
    let c = cs(k, t);
    let ct = if s == 0.0 {
        if c >= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        c / s
    };
    Trig { sn: s, cs: c, ct }
}

/// `ct_κ(t) = cs_κ(t)/sn_κ(t)`.
pub fn ct(k: Curvature, t: f64) -> f64 {
    trig(k, t).ct
}

/// The modified distance `md_κ(t) = ∫₀ᵗ sn_κ`, constant `2/κ` past the
/// model diameter when `κ > 0`. For `κ ≤ 0` the cut-off branch never
/// applies since the diameter is infinite.
pub fn modified_distance(k: Curvature, t: f64) -> f64 {
    let kv = k.0;
    if (kv * t * t).abs() < TAYLOR_THRESHOLD {
        let t2 = t * t;
        return t2 / 2.0 - kv * t2 * t2 / 24.0 + kv * kv * t2 * t2 * t2 / 720.0;
    }
    if kv > 0.0 {
        if t > model_diameter(k) {
            return 2.0 / kv;
        }
        let h = sin(0.5 * sqrt(kv) * t);
        2.0 * h * h / kv
    } else {
        let h = sinh(0.5 * sqrt(-kv) * t);
        2.0 * h * h / -kv
    }
}

/// Side lengths of a (candidate) triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSides {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangleSides {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        TriangleSides { a, b, c }
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TriangleValidity {
    Valid,
    /// Perimeter equals twice the model diameter: the comparison triangle
    /// exists but is not unique.
    ValidDegenerateBoundary,
    Invalid,
}

pub fn validate_triangle(k: Curvature, sides: TriangleSides) -> TriangleValidity {
    let TriangleSides { a, b, c } = sides;
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return TriangleValidity::Invalid;
    }
    let scale = a.max(b).max(c);
    let slack = SIDE_REL_TOL * scale;
    if a > b + c + slack || b > a + c + slack || c > a + b + slack {
        return TriangleValidity::Invalid;
    }
    if k.0 > 0.0 {
        let bound = 2.0 * model_diameter(k);
        let p = sides.perimeter();
        let slack = SIDE_REL_TOL * bound;
        if p > bound + slack {
            return TriangleValidity::Invalid;
        }
        if p >= bound - slack {
            return TriangleValidity::ValidDegenerateBoundary;
        }
    }
    TriangleValidity::Valid
}

/// The direct cosine-law value of `cos ∠̃^κ{a; b, c}` without clamping.
///
/// Ill-conditioned near `κ = 0`; [`model_angle`] does not use it.
pub fn cosine_law_cos(k: Curvature, a: f64, b: f64, c: f64) -> f64 {
    if k.0 == 0.0 {
        (b * b + c * c - a * a) / (2.0 * b * c)
    } else {
        (cs(k, a) - cs(k, b) * cs(k, c)) / (k.0 * sn(k, b) * sn(k, c))
    }
}

/// The model angle `∠̃^κ{a; b, c}` opposite the side `a` in the comparison
/// triangle with sides `a, b, c`.
///
/// Computed from
/// `tan²(φ/2) = sn(s-b) sn(s-c) / (sn(s) sn(s-a))`, `s` the half perimeter.
/// Numerically negative factors within `1e-10` relative of zero are clamped;
/// larger ones report [`Error::InvalidTriangle`]. The boundary case
/// (perimeter `2ϖ^κ`) is accepted and yields the limiting angle.
pub fn model_angle(k: Curvature, a: f64, b: f64, c: f64) -> Result<f64> {
    if validate_triangle(k, TriangleSides { a, b, c }) == TriangleValidity::Invalid {
        return Err(Error::InvalidTriangle);
    }
    let scale = a.max(b).max(c);
    let tiny = SIDE_REL_TOL * scale;
    if b <= tiny || c <= tiny {
        return Err(Error::DegenerateSide);
    }
    if k.0 > 0.0 {
        let diam = model_diameter(k);
        if b >= diam * (1.0 - SIDE_REL_TOL) || c >= diam * (1.0 - SIDE_REL_TOL) {
            return Err(Error::InvalidTriangle);
        }
    }
    let s = 0.5 * (a + b + c);
    // clamp the half-perimeter differences; validate_triangle already
    // bounded how negative they can be
    let sa = (s - a).max(0.0);
    let sb = (s - b).max(0.0);
    let sc = (s - c).max(0.0);
    let num = sn(k, sb) * sn(k, sc);
    let mut den = sn(k, sa) * sn(k, s);
    if den < 0.0 {
        // only reachable for κ > 0 when s exceeds the diameter by rounding
        den = 0.0;
    }
    let num = num.max(0.0);
    if num == 0.0 && den == 0.0 {
        // a = 0 and b = c: zero angle
        return Ok(0.0);
    }
    Ok(2.0 * atan2(sqrt(num), sqrt(den)))
}

/// Hinge data: an angle between two sides sharing a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hinge {
    pub angle: f64,
    pub b: f64,
    pub c: f64,
}

impl Hinge {
    pub fn new(angle: f64, b: f64, c: f64) -> Self {
        Hinge { angle, b, c }
    }
}

fn check_hinge(k: Curvature, h: Hinge) -> Result<()> {
    if !(0.0..=PI).contains(&h.angle) {
        return Err(Error::DomainError("hinge angle must lie in [0, π]"));
    }
    if !(h.b >= 0.0 && h.c >= 0.0 && h.b.is_finite() && h.c.is_finite()) {
        return Err(Error::DomainError("hinge sides must be finite and nonnegative"));
    }
    if k.0 > 0.0 {
        let diam = model_diameter(k);
        if h.b >= diam || h.c >= diam {
            return Err(Error::DomainError("hinge sides must be shorter than the model diameter"));
        }
    }
    Ok(())
}

/// Inverse of `md_κ` on `[0, 2/κ]` (all of `[0, ∞)` for `κ ≤ 0`).
fn inverse_modified_distance(k: Curvature, m: f64) -> f64 {
    let kv = k.0;
    let m = m.max(0.0);
    if kv == 0.0 {
        return sqrt(2.0 * m);
    }
    if kv > 0.0 {
        let r = sqrt(kv);
        let x = sqrt(0.5 * kv * m).min(1.0);
        2.0 * asin(x) / r
    } else {
        let r = sqrt(-kv);
        2.0 * asinh(sqrt(-0.5 * kv * m)) / r
    }
}

/// The model side `γ̃^κ{φ; b, c}`: the third side of the model triangle
/// with sides `b, c` enclosing the angle `φ`.
///
/// Closed-form inversion of the cosine law written through `md_κ`:
/// `md(a) = md(b) + md(c) - κ md(b) md(c) - cos φ sn(b) sn(c)`.
pub fn model_side(k: Curvature, hinge: Hinge) -> Result<f64> {
    check_hinge(k, hinge)?;
    let Hinge { angle, b, c } = hinge;
    let mb = modified_distance(k, b);
    let mc = modified_distance(k, c);
    let m = mb + mc - k.0 * mb * mc - cos(angle) * sn(k, b) * sn(k, c);
    let a = inverse_modified_distance(k, m);
    // rounding can leave `a` a hair outside the admissible interval
    let lo = (b - c).abs();
    let mut hi = b + c;
    if k.0 > 0.0 {
        hi = hi.min(2.0 * model_diameter(k) - b - c);
    }
    Ok(a.clamp(lo, hi.max(lo)))
}

/// Bisection inversion of [`model_angle`]; slow, kept as an independent
/// cross-check for [`model_side`].
pub fn model_side_bisection(k: Curvature, hinge: Hinge) -> Result<f64> {
    check_hinge(k, hinge)?;
    let Hinge { angle, b, c } = hinge;
    let mut lo = (b - c).abs();
    let mut hi = b + c;
    if k.0 > 0.0 {
        hi = hi.min(2.0 * model_diameter(k) - b - c);
    }
    if b == 0.0 || c == 0.0 {
        return Ok(b + c);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        match model_angle(k, mid, b, c) {
            Ok(phi) if phi < angle => lo = mid,
            Ok(_) => hi = mid,
            Err(_) => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Side lengths of the glued configuration in Alexandrov's lemma.
///
/// Vertices `O, A, Q` are consecutive points of a broken side and `P` is the
/// opposite vertex:
///
/// ```text
///            P
///          / | \
///       z /  w  \ d
///        /   |   \
///       O----A----Q
///         x     y
/// ```
///
/// The two triangles `OAP` (sides `x, w, z`) and `AQP` (sides `y, d, w`)
/// share the side `AP` of length `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GluingSides {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    pub d: f64,
}

/// Angles produced by [`alexandrov_gluing`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gluing {
    /// Angle of `OAP` at `A`.
    pub alpha: f64,
    /// Angle of `AQP` at `A`.
    pub beta: f64,
    /// Angle of `OAP` at `O`.
    pub gamma1: f64,
    /// Angle at `O` of the model triangle with sides `x + y, z, d`.
    pub gamma2: f64,
}

/// Alexandrov's lemma: if `α + β ≤ π` then straightening the broken side
/// `O A Q` into a segment of length `x + y` does not increase the angle at
/// `O`, i.e. `γ₂ ≤ γ₁`.
pub fn alexandrov_gluing(k: Curvature, s: GluingSides) -> Result<Gluing> {
    let GluingSides { x, y, z, w, d } = s;
    let fail = |what: &str| Err(Error::PreconditionFailed(what.into()));
    if !(x > 0.0 && y > 0.0 && z > 0.0 && w > 0.0 && d > 0.0) {
        return fail("all lengths must be positive");
    }
    if validate_triangle(k, TriangleSides::new(x, w, z)) != TriangleValidity::Valid {
        return fail("triangle OAP {x, w, z} is not uniquely defined");
    }
    if validate_triangle(k, TriangleSides::new(y, d, w)) != TriangleValidity::Valid {
        return fail("triangle AQP {y, d, w} is not uniquely defined");
    }
    if k.0 > 0.0 && x + y + z + d >= 2.0 * model_diameter(k) {
        return fail("x + y + z + d must be below twice the model diameter");
    }
    let alpha = model_angle(k, z, x, w)?;
    let beta = model_angle(k, d, y, w)?;
    if alpha + beta > PI + 1e-12 {
        return fail("angle condition α + β ≤ π fails");
    }
    let gamma1 = model_angle(k, w, x, z)?;
    let big = TriangleSides::new(x + y, z, d);
    if validate_triangle(k, big) == TriangleValidity::Invalid {
        return fail("triangle {x + y, z, d} does not exist");
    }
    let gamma2 = model_angle(k, d, x + y, z)?;
    Ok(Gluing { alpha, beta, gamma1, gamma2 })
}

/// Convenience wrapper returning `acos` of the clamped direct cosine law;
/// used by tests that cross-check [`model_angle`].
pub fn model_angle_direct(k: Curvature, a: f64, b: f64, c: f64) -> f64 {
    acos(cosine_law_cos(k, a, b, c).clamp(-1.0, 1.0))
}
