//! Nearest-neighbor learning from partial labels.
//!
//! Every training instance carries a *bag* of candidate labels instead of a
//! single label. The crate provides:
//!
//! * [`plaknn`]: the adaptive label-elimination classifier with its
//!   disambiguation rule,
//! * [`baselines`]: fixed-k and frequency-threshold adaptive kNN,
//! * [`synth`]: bag generators, label-noise processes and analytic scenarios,
//! * [`theory`]: executable reconstructibility, label-alignment, advantage
//!   and flip constructions on finite-support distributions,
//! * [`preprocess`]: feature pipelines for Euclidean retrieval,
//! * [`bench`]: the experiment harness behind the `bench` binary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod dataset;
pub mod distribution;
mod error;
pub mod knn;
pub mod labels;
pub mod plaknn;
pub mod preprocess;
pub mod synth;
pub mod theory;

pub use dataset::{PartialDataset, PartialExample};
pub use distribution::{
    bayes_risk, bayes_rule, label_frequencies, Atom, BagGenMatrix, DiscreteDistribution,
    LabelDistribution,
};
pub use error::{Error, Result};
pub use knn::{NeighborIndex, NeighborStream};
pub use labels::{Bag, Label, LabelSpace};
pub use plaknn::{EliminationTrace, Mode, PlaknnConfig};

/// Absolute tolerance used for probability comparisons throughout the crate.
pub const PROB_TOL: f64 = 1e-9;
