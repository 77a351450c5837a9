//! Tail index estimation for heavy-tailed data by random block maxima,
//! with Hill-family benchmarks, the limiting Gaussian process of the
//! estimator, and a reproducible Monte Carlo benchmark harness.
//!
//! The central estimator averages log maxima over all size-`s` subsamples
//! drawn without replacement and differences them:
//! `gamma_hat(s) = s (M(s) - M(s-1))`. Its path over the matched threshold
//! scale `k = 2n/s` is smooth enough to support a simple automatic
//! threshold rule (minimize the squared path derivative plus a variance
//! penalty), which needs no second-order model fit.

pub mod bench;
pub mod dist;
pub mod error;
pub mod hill;
pub mod process;
pub mod rbm;
pub mod sample;
pub mod seeding;
mod special;

pub use error::{EvtError, Result};
pub use sample::{
    k_of_s, parse_values, EstimatorKind, EstimatorPath, Sample, SecondOrderModel, TailEstimate,
    ThresholdPoint, DEFAULT_CAP,
};
