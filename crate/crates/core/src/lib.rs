//! Causal pathway analysis of multivariate time series.
//!
//! The crate reconstructs time series graphs from data, enumerates causal
//! paths between lagged nodes and quantifies information transfer and
//! mediation along them with conditional mutual information. It is
//! `no_std` (with `alloc`); the `std` and `parallel` features add standard
//! library support and thread-parallel ensembles.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod math;
mod par;
mod rng;

pub mod dataset;
pub mod discovery;
pub mod error;
pub mod estimators;
pub mod linear_effects;
pub mod measures;
pub mod netmetrics;
pub mod simulate;
pub mod tsgraph;

pub use dataset::{LaggedSamples, TimeSeriesDataset};
pub use error::{Error, Result};
pub use estimators::{CmiEstimate, EstimatorConfig, EstimatorKind};
pub use tsgraph::{ConditionKind, Link, NodeRef, TimeSeriesGraph};
