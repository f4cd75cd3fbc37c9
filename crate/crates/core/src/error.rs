use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A sample point in coordinates, printed as rationals.
pub type Point = Vec<String>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspace is not isotropic: g({0}, {1}) != 0")]
    NotIsotropic(usize, usize),

    #[error("vectors are linearly dependent")]
    LinearlyDependent,

    #[error("invalid pairing data: {0}")]
    InvalidPairing(String),

    #[error("*-regularity violated for {what}: rank {rank_a} at {point_a:?}, rank {rank_b} at {point_b:?}")]
    RegularityViolation {
        what: String,
        rank_a: usize,
        point_a: Point,
        rank_b: usize,
        point_b: Point,
    },

    #[error("infeasible Hamiltonian: {reason} (witness point {point:?})")]
    InfeasibleHamiltonian { reason: String, point: Option<Point> },

    #[error("complement choice is not transverse: {0}")]
    NotTransverse(String),

    #[error("interconnection is not maximal isotropic: {0}")]
    NotMaximalIsotropic(String),

    #[error("integration blew up at t = {time} (last finite state at t = {last_valid_time})")]
    IntegrationBlowup { time: f64, last_valid_time: f64 },

    #[error("degenerate constraint: multiplier system singular at t = {time}")]
    DegenerateConstraint { time: f64 },

    #[error("initial state violates the constraint: residual {residual:e}")]
    InitialConstraintViolation { residual: f64 },

    #[error("flows are not uniquely determined by the interconnection at t = {time}")]
    UnsolvableInterconnection { time: f64 },

    #[error("port count mismatch: expected {expected}, found {found}")]
    PortCountMismatch { expected: usize, found: usize },

    #[error("submanifold is not E-proper: rank {rank_a} at {point_a:?}, rank {rank_b} at {point_b:?}")]
    NotProper {
        rank_a: usize,
        point_a: Point,
        rank_b: usize,
        point_b: Point,
    },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("reducibility condition {condition} failed: {witness}")]
    ReducibilityFailure { condition: String, witness: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
