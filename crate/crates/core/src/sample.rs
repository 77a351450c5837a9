//! Validated samples and the k ↔ s threshold parameterization.
//!
//! All estimators in this crate work on logs of the data, so a [`Sample`]
//! holds strictly positive observations, sorted ascending. Non-positive
//! values are dropped at construction (their count is retained), and an
//! optional cap keeps only the largest `cap` points, which speeds up the
//! block-maxima estimator on very large inputs without losing much tail
//! information.
//!
//! Subsample size `s` and the threshold parameter `k` are tied by
//! `k = 2n/s`; this matching equalizes the asymptotic variances of the
//! Hill and block-maxima estimators so their paths can be compared on a
//! common axis.

use crate::error::{EvtError, Result};
use serde::Serialize;

/// Cap applied when the caller asks for capping without giving a size.
pub const DEFAULT_CAP: usize = 2000;

/// Strictly positive observations, sorted ascending.
///
/// `values[i]` is the (i+1)-th smallest retained observation. Construction
/// tracks how many raw points were removed and why.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    n_raw: usize,
    n_dropped_nonpositive: usize,
    n_capped: usize,
}

impl Sample {
    /// Build a sample from raw data: drop non-positive values (logs must be
    /// finite), sort ascending, and optionally keep only the `cap` largest.
    ///
    /// Fails with [`EvtError::EmptyAfterFiltering`] when fewer than 2 values
    /// survive; every downstream estimator needs at least one log spacing.
    pub fn new(raw: &[f64], cap: Option<usize>) -> Result<Self> {
        let n_raw = raw.len();
        let mut values: Vec<f64> = raw
            .iter()
            .copied()
            .filter(|x| x.is_finite() && *x > 0.0)
            .collect();
        let n_dropped_nonpositive = n_raw - values.len();
        values.sort_by(|a, b| a.partial_cmp(b).expect("values are finite"));

        let mut n_capped = 0;
        if let Some(cap) = cap {
            if values.len() > cap {
                n_capped = values.len() - cap;
                values.drain(..n_capped);
            }
        }

        if values.len() < 2 {
            return Err(EvtError::EmptyAfterFiltering {
                kept: values.len(),
                raw: n_raw,
            });
        }

        Ok(Sample {
            values,
            n_raw,
            n_dropped_nonpositive,
            n_capped,
        })
    }

    /// Number of retained observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Retained observations, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_raw(&self) -> usize {
        self.n_raw
    }

    pub fn n_dropped_nonpositive(&self) -> usize {
        self.n_dropped_nonpositive
    }

    pub fn n_capped(&self) -> usize {
        self.n_capped
    }

    /// Total points removed by filtering and capping.
    pub fn n_dropped(&self) -> usize {
        self.n_dropped_nonpositive + self.n_capped
    }

    /// Logs of the observations ordered largest first: entry `j` is
    /// `ln` of the (j+1)-th largest observation. This is the layout the
    /// order-statistic weight vectors expect.
    pub fn logs_descending(&self) -> Vec<f64> {
        self.values.iter().rev().map(|x| x.ln()).collect()
    }
}

/// Threshold parameter `k = 2n/s` for subsample size `s`.
///
/// `s` ranges over `[2, n]`; `s = n` gives the smallest threshold `k = 2`
/// and `s = 2` the largest `k = n`.
pub fn k_of_s(s: usize, n: usize) -> Result<f64> {
    if s < 2 || s > n {
        return Err(EvtError::domain(format!(
            "subsample size s = {s} out of range [2, {n}]"
        )));
    }
    Ok(2.0 * n as f64 / s as f64)
}

/// One point of an estimator path: subsample size, matched threshold, and
/// the estimate there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub s: usize,
    pub k: f64,
    pub gamma_hat: f64,
}

/// Which estimator produced a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Rbm,
    Hill,
    SmooHill,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Rbm => "rbm",
            EstimatorKind::Hill => "hill",
            EstimatorKind::SmooHill => "smoohill",
        }
    }
}

/// Estimates along the threshold grid, ascending in `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorPath {
    pub estimator: EstimatorKind,
    pub points: Vec<ThresholdPoint>,
}

/// A selected threshold with its estimate and asymptotic standard error
/// `gamma_hat / sqrt(k_hat)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub gamma_hat: f64,
    pub k_hat: f64,
    /// Subsample size matching `k_hat`; `None` for estimators indexed by
    /// an integer order count only.
    pub s_hat: Option<usize>,
    pub stderr: f64,
}

impl TailEstimate {
    pub fn new(gamma_hat: f64, k_hat: f64, s_hat: Option<usize>) -> Self {
        TailEstimate {
            gamma_hat,
            k_hat,
            s_hat,
            stderr: gamma_hat / k_hat.sqrt(),
        }
    }
}

/// Second-order tail model (gamma, rho, lambda): tail index, convergence
/// rate exponent, and the scaled bias level entering every limit law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderModel {
    pub gamma: f64,
    pub rho: f64,
    pub lambda: f64,
}

impl SecondOrderModel {
    /// A model with `gamma > 0` and `rho < 0`, as the limit laws require.
    pub fn new(gamma: f64, rho: f64, lambda: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(EvtError::domain(format!("gamma = {gamma} must be > 0")));
        }
        if !(rho < 0.0) {
            return Err(EvtError::domain(format!("rho = {rho} must be < 0")));
        }
        Ok(SecondOrderModel { gamma, rho, lambda })
    }
}

/// Parse input text with one decimal number per line.
///
/// Any line that does not parse as a finite number is a hard error carrying
/// its 1-based line number; blank lines are not allowed either.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        let parsed = trimmed.parse::<f64>().ok().filter(|x| x.is_finite());
        match parsed {
            Some(x) => out.push(x),
            None => {
                return Err(EvtError::Parse {
                    line: i + 1,
                    content: trimmed.to_string(),
                })
            }
        }
    }
    Ok(out)
}
