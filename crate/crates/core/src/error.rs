use thiserror::Error;

use crate::instance::ObsId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("observations {a} and {b} cannot share a hypothesis")]
    InfeasiblePair { a: ObsId, b: ObsId },
    #[error("pair ({a}, {b}) given more than once")]
    DuplicatePair { a: ObsId, b: ObsId },
    #[error("self pair on observation {0}")]
    SelfPair(ObsId),
    #[error("non-finite cost on pair ({a}, {b})")]
    NonFiniteCost { a: ObsId, b: ObsId },
    #[error("observation {0} out of range")]
    UnknownObservation(ObsId),
    #[error("a column needs at least one member")]
    EmptyColumn,
    #[error("observation {0} appears in more than one cluster")]
    Overlap(ObsId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex stopped after {0} pivots")]
    IterationLimit(usize),
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("subproblem over {size} observations exceeds the exact limit of {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("column generation did not converge within {0} iterations")]
    MaxIterations(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("partitions cover {pred} and {truth} observations")]
    UniverseMismatch { pred: usize, truth: usize },
}
