use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes across the crate. Variants carry the indices or values
/// needed to locate the offending input.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Side lengths do not form a comparison triangle in the model plane.
    InvalidTriangle,
    /// A side adjacent to the requested angle is (numerically) zero.
    DegenerateSide,
    DomainError(&'static str),
    PreconditionFailed(String),
    /// Step is nonpositive or exceeds the allowed fraction of the horizon.
    StepTooLarge { step: f64, max: f64 },
    ProfileUndefined { t: f64 },
    ProfileOrderViolated { t: f64, upper: f64, lower: f64 },
    NotSquare { rows: usize, row: usize, len: usize },
    NonFinite { i: usize, j: usize },
    NotSymmetric { i: usize, j: usize },
    NegativeEntry { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    DuplicatePoint { i: usize, j: usize },
    TriangleViolation { i: usize, j: usize, k: usize },
    LabelCount { labels: usize, points: usize },
    IndexOutOfRange { index: usize, len: usize },
    Disconnected { from: usize, to: usize },
    NonpositiveWeight { edge: usize },
    /// The comparison triangle does not exist for this curvature.
    ComparisonUndefined { p: usize, x: usize, y: usize },
    DegenerateTriple { p: usize, x: usize, y: usize },
    NotOnGeodesic { x: usize, y: usize, z: usize, gap: f64 },
    NotAGeodesicChain { index: usize },
    EmptySet,
    TooLarge { x: usize, y: usize, limit: usize },
    NonpositiveScale,
    SingularBasis,
    RankTooLarge { rank: usize, max: usize },
    TooFewSamples { got: usize, need: usize },
    NotConcave { lambda: f64 },
    NotOneLipschitz { lipschitz: f64 },
    DimensionMismatch { expected: usize, got: usize },
    NegativeRadius { index: usize },
    NoMidpoint { defect: f64 },
    WeightsInvalid,
    PointsTooFarApart { i: usize, j: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Error::*;
        match self {
            InvalidTriangle => write!(f, "side lengths do not form a model triangle"),
            DegenerateSide => write!(f, "a side adjacent to the angle is zero"),
            DomainError(what) => write!(f, "domain error: {what}"),
            PreconditionFailed(what) => write!(f, "precondition failed: {what}"),
            StepTooLarge { step, max } => {
                write!(f, "step {step} is not in (0, {max}]")
            }
            ProfileUndefined { t } => write!(f, "curvature profile is not finite at t = {t}"),
            ProfileOrderViolated { t, upper, lower } => write!(
                f,
                "profile order violated at t = {t}: upper {upper} < lower {lower}"
            ),
            NotSquare { rows, row, len } => {
                write!(f, "matrix is not square: {rows} rows but row {row} has {len} entries")
            }
            NonFinite { i, j } => write!(f, "entry ({i}, {j}) is not finite"),
            NotSymmetric { i, j } => write!(f, "entries ({i}, {j}) and ({j}, {i}) differ"),
            NegativeEntry { i, j } => write!(f, "entry ({i}, {j}) is negative"),
            NonzeroDiagonal { i } => write!(f, "diagonal entry ({i}, {i}) is not zero"),
            DuplicatePoint { i, j } => write!(f, "points {i} and {j} are at distance zero"),
            TriangleViolation { i, j, k } => {
                write!(f, "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
            LabelCount { labels, points } => {
                write!(f, "{labels} labels given for {points} points")
            }
            IndexOutOfRange { index, len } => write!(f, "index {index} out of range for {len} points"),
            Disconnected { from, to } => write!(f, "vertex {to} is unreachable from vertex {from}"),
            NonpositiveWeight { edge } => write!(f, "edge {edge} has a nonpositive weight"),
            ComparisonUndefined { p, x, y } => {
                write!(f, "comparison triangle for ({p}; {x}, {y}) does not exist")
            }
            DegenerateTriple { p, x, y } => write!(f, "triple ({p}; {x}, {y}) has a zero side"),
            NotOnGeodesic { x, y, z, gap } => {
                write!(f, "point {z} is not on a geodesic from {x} to {y} (gap {gap})")
            }
            NotAGeodesicChain { index } => write!(f, "chain is not geodesic at position {index}"),
            EmptySet => write!(f, "empty point set"),
            TooLarge { x, y, limit } => {
                write!(f, "exhaustive search over {x}x{y} points exceeds the limit {limit}")
            }
            NonpositiveScale => write!(f, "scale factor must be positive"),
            SingularBasis => write!(f, "lattice basis is singular"),
            RankTooLarge { rank, max } => write!(f, "rank {rank} exceeds the supported maximum {max}"),
            TooFewSamples { got, need } => write!(f, "{got} samples given, at least {need} needed"),
            NotConcave { lambda } => write!(f, "function is only {lambda}-concave, need lambda <= 0"),
            NotOneLipschitz { lipschitz } => {
                write!(f, "function has Lipschitz bound {lipschitz} > 1")
            }
            DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            NegativeRadius { index } => write!(f, "cone point {index} has a negative radius"),
            NoMidpoint { defect } => write!(f, "no approximate midpoint (best defect {defect})"),
            WeightsInvalid => write!(f, "weights must be nonnegative and sum to one"),
            PointsTooFarApart { i, j } => {
                write!(f, "points {i} and {j} are farther apart than the curve family allows")
            }
        }
    }
}

impl core::error::Error for Error {}
