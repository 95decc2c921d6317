use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("subspace is not invariant under the given map")]
    InvarianceViolated,

    #[error("subspace is not controlled invariant")]
    NotControlledInvariant,

    #[error("subspace is controlled invariant but not output nulling")]
    NotOutputNulling,

    #[error("largest controlled invariant subspace in the state constraint is {{0}} (l = 0)")]
    DegenerateL0,

    #[error("pinned matrix {which} is invalid: {reason}")]
    PinnedInvalid { which: &'static str, reason: String },

    #[error("reachability Gramian is numerically singular (reciprocal condition {rcond:e})")]
    SingularGramian { rcond: f64 },

    #[error("signal grids differ")]
    GridMismatch,

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid constraint set: {0}")]
    InvalidConstraint(String),

    #[error("ker B ∩ ker D is trivial (rho = 0)")]
    RhoZero,

    #[error("controllable weakly unobservable subspace is trivial")]
    RZero,

    #[error("window is empty")]
    EmptyWindow,

    #[error("constraint margin is not strictly positive")]
    ZeroMargin,

    #[error("increment is identically zero")]
    ZeroIncrement,

    #[error("nominal trajectory violates the constraints at t = {time}")]
    NotAdmissibleNominal { time: f64 },

    #[error("no interior window along the nominal trajectory (inconclusive)")]
    NoInteriorWindow,

    #[error("increment failed verification (output deviation {y_sup_diff:e}, admissible {admissible})")]
    VerificationFailed { y_sup_diff: f64, admissible: bool },

    #[error("constraint sets must be linear subspaces for exact analysis")]
    NonLinearConstraints,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
