use thiserror::Error;

use crate::formulate::ModelKind;
use crate::rational::ParseRationalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid facility menu: {0}")]
    InvalidFacilities(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("traffic matrices are defined over different node sets")]
    NodeSetMismatch,
    #[error("negative traffic {amount} on {from}>{to}")]
    NegativeTraffic { from: String, to: String, amount: String },
    #[error("scaling factor must be nonnegative, got {0}")]
    NegativeFactor(String),
    #[error("existing capacities: {0}")]
    ExistingCapacity(String),
    #[error("expected a {expected} model, got {found}")]
    WrongModelKind { expected: ModelKind, found: ModelKind },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("traffic matrices are not pairwise similar on pair {0}")]
    NotPairwiseSimilar(String),
    #[error("traffic matrix is not symmetric on pair {0}")]
    NotSymmetric(String),
    #[error("invalid cut-set definition: {0}")]
    InvalidCutset(String),
    #[error("the cut-set has r = 0, so the rounded inequality is implied by the aggregate")]
    VacuousCut,
    #[error("integer variable `{0}` has no upper bound")]
    MissingBound(String),
    #[error("enumeration box has {size} points, above the limit of {limit}")]
    BoxTooLarge { size: String, limit: u64 },
    #[error("traffic from {0} to {1} cannot be routed: the network is disconnected")]
    Disconnected(String, String),
    #[error("unsupported instance shape: {0}")]
    WrongShape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
