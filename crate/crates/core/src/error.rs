use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tail tolerance {0} underflows double precision")]
    TailToleranceUnderflow(f64),

    #[error("evaluation at |z| = {requested} outside certified radius {valid}")]
    RadiusExceeded { requested: f64, valid: f64 },

    #[error("truncation degree {given} below certified degree {required}")]
    DegreeTooSmall { required: usize, given: usize },

    #[error("zero too close to the contour at radius {radius} (min |F*| = {min_modulus:.3e})")]
    GuardBand { radius: f64, min_modulus: f64 },

    #[error("phase tracking could not certify increments < pi on circle of radius {radius}")]
    PhaseUncertified { radius: f64 },

    #[error("zero extraction incomplete: winding count {winding}, extracted {found}")]
    CountMismatch { winding: usize, found: usize },

    #[error("Newton refinement failed to converge near z = {re}+{im}i")]
    NewtonDivergence { re: f64, im: f64 },

    #[error("zeros closer than separation floor {floor} (distance {distance:.3e})")]
    SeparationViolation { floor: f64, distance: f64 },

    #[error("quadrature tolerance not met: requested {requested:.3e}, achieved {achieved:.3e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    #[error("test-function support (radius {needed}) not contained in extraction disk ({available})")]
    SupportViolation { needed: f64, available: f64 },

    #[error("unknown test function: {0}")]
    UnknownTestFunction(String),

    #[error("cut-off fails the quadratic flatness check at the origin: {0}")]
    FlatnessCheck(String),

    #[error("inflated neighbourhoods of compacts {0} and {1} are not disjoint")]
    DisjointnessViolation(usize, usize),

    #[error("compact set is empty")]
    EmptyCompact,

    #[error("{failed} of {total} ensemble samples aborted (limit {limit})")]
    EnsembleAbort {
        failed: usize,
        total: usize,
        limit: usize,
    },

    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: usize, min: usize },

    #[error("grid file malformed: {0}")]
    GridFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
