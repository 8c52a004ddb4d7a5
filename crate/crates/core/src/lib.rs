//! Myoelectric pattern recognition toolkit.
//!
//! The crate covers the full offline pipeline used to evaluate time-domain
//! EMG feature sets on finger-movement data:
//!
//! - [`dataset`]: recordings, CSV ingestion, seeded synthetic signals, AWGN mixing
//! - [`preprocess`]: bandpass/notch filtering, windowing, min–max normalization
//! - [`features`]: the time-domain feature catalog (including LMAV and NSV) and
//!   the named feature-set registry
//! - [`reduce`]: uncorrelated LDA, the RES separability index, scatter export
//! - [`classify`]: QDA, RBF-kernel SVM (SMO) and KNN behind one interface
//! - [`evaluate`]: leave-one-trial-out cross-validation, metrics, sweeps, ANOVA
//! - [`select`]: greedy forward feature selection

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod preprocess;
pub mod reduce;
pub mod seed;
pub mod select;

pub use error::{Error, Result};
