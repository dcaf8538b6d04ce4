//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by space construction, map audits, orbit analysis and the
/// covering-lemma machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown space '{0}'")]
    UnknownSpace(String),

    #[error("unknown map '{0}'")]
    UnknownMap(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("map '{map}' is not compatible with space '{space}'")]
    IncompatibleSpace { map: String, space: String },

    #[error("point does not belong to space '{space}': {reason}")]
    BadPoint { space: String, reason: String },

    #[error("points belong to different spaces ('{left}' vs '{right}')")]
    SpaceMismatch { left: String, right: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(
        "map '{map}' failed the nonexpansiveness audit: max defect {defect:.3e} over {pairs} pairs"
    )]
    NotNonexpansive {
        map: String,
        defect: f64,
        pairs: usize,
    },

    #[error("audit inconclusive: {0}")]
    AuditInconclusive(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("no recurrence found: minimum return defect {min_defect:.6e}")]
    RecurrenceNotFound { min_defect: f64 },

    #[error("orbit is not injective on its horizon: points {first} and {second} collide")]
    NotInjective { first: usize, second: usize },

    #[error("table has the wrong shift monotonicity for the covering lemma: {0}")]
    WrongMonotonicity(String),

    #[error("table is not shift-monotone in either direction")]
    NotShiftMonotone,

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("cover check failed: index {uncovered} is not within rho of any prefix ball")]
    CoverFailure { uncovered: usize },

    #[error("no recurrent anchor among the supplied starts")]
    NoRecurrentAnchor,

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),

    #[error("point too close to the unit circle: |z| = {modulus}")]
    OnBoundary { modulus: f64 },

    #[error("chain endpoints do not match at link {link}: gap {gap:.3e}")]
    BrokenChain { link: usize, gap: f64 },

    #[error("unsupported space '{0}' for chain search")]
    UnsupportedSpace(String),
}

pub type Result<T> = std::result::Result<T, Error>;
