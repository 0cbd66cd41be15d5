use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::tsgraph::NodeRef;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("column `{column}` has zero variance")]
    ZeroVariance { column: String },
    #[error("no usable samples left after lag alignment")]
    NoUsableSamples,
    #[error("too few samples: {n} samples for k = {k}")]
    TooFewSamples { n: usize, k: usize },
    #[error("dimension mismatch: expected {expected} rows, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("variable index {index} out of range for {n_vars} variables")]
    VariableOutOfRange { index: usize, n_vars: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("no causal path from {from} to {to}")]
    NoCausalPath { from: NodeRef, to: NodeRef },
    #[error("mediator not on any causal path (variable {variable})")]
    MediatorNotOnPath { variable: usize },
    #[error("window {window} too small for query nodes up to lag {max_lag}")]
    WindowTooSmall { window: usize, max_lag: usize },
    #[error("query node {0} is part of the conditioning set")]
    NodeInConditioningSet(NodeRef),
    #[error("linear part is unstable (spectral radius {spectral_radius:.6} >= 1)")]
    Unstable { spectral_radius: f64 },
    #[error("simulation overflow at step {step}")]
    Overflow { step: usize },
    #[error("linear models only")]
    LinearModelsOnly,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("singular regression; collinear regressors: {regressors:?}")]
    SingularRegression { regressors: Vec<NodeRef> },
    #[error("singular covariance matrix")]
    SingularCovariance,
    #[error("contemporaneous sidepaths present; linear causal effect refused")]
    SidepathsPresent,
    #[error("variable {variable} mediates no interaction")]
    NoMediatedInteraction { variable: usize },
    #[error("bootstrap resample {index} failed: {source}")]
    Resample { index: usize, source: Box<Error> },
    #[error("ensemble replica {index} failed: {source}")]
    Replica { index: usize, source: Box<Error> },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
