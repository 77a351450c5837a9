//! Seeded Monte Carlo benchmark engine.
//!
//! Each replication draws a fresh sample on its own RNG stream (derived
//! from the master seed, the replication index, and the distribution id),
//! runs every configured estimator with its automatic threshold, and
//! records the estimation error against the distribution's true tail
//! index. Replications run in parallel, but aggregation walks them in
//! index order, so results are byte-identical for any worker count.

use crate::dist::Distribution;
use crate::error::{EvtError, Result};
use crate::hill::gh_threshold;
use crate::rbm::{rbm_path, select_threshold};
use crate::sample::Sample;
use crate::seeding::stream_seed;
use rayon::prelude::*;
use serde::Serialize;

/// Estimators the harness knows how to run end to end (automatic
/// threshold included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchEstimator {
    Rbm,
    GuillouHall,
}

impl BenchEstimator {
    pub fn name(&self) -> &'static str {
        match self {
            BenchEstimator::Rbm => "rbm",
            BenchEstimator::GuillouHall => "gh",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rbm" => Ok(BenchEstimator::Rbm),
            "gh" => Ok(BenchEstimator::GuillouHall),
            other => Err(EvtError::domain(format!(
                "unknown estimator `{other}` (expected rbm or gh)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub distribution: Distribution,
    /// Points drawn per replication, before any filtering.
    pub sample_size: usize,
    pub replications: usize,
    pub estimators: Vec<BenchEstimator>,
    pub master_seed: u64,
    pub cap: Option<usize>,
}

/// One aggregated line of benchmark output.
///
/// `replications` counts the included replications; with a single one the
/// standard errors are undefined and reported as 0, with `replications =
/// 1` itself acting as the flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub distribution: String,
    pub estimator: String,
    pub rmse: f64,
    pub rmse_se: f64,
    pub bias: f64,
    pub bias_se: f64,
    pub replications: usize,
    pub n_excluded: usize,
    pub mean_k_hat: f64,
    pub master_seed: u64,
    pub version: String,
}

/// RMSE and bias of a vector of estimation errors, with Monte Carlo
/// standard errors: `bias_se = sd(e)/sqrt(R)` and, by the delta method,
/// `rmse_se = sd(e^2)/(2 rmse sqrt(R))`.
pub fn rmse_bias(errors: &[f64]) -> Result<(f64, f64, f64, f64)> {
    if errors.is_empty() {
        return Err(EvtError::domain(
            "rmse_bias needs at least one error".to_string(),
        ));
    }
    let r = errors.len() as f64;
    let bias = errors.iter().sum::<f64>() / r;
    let mean_sq = errors.iter().map(|e| e * e).sum::<f64>() / r;
    let rmse = mean_sq.sqrt();
    if errors.len() == 1 {
        return Ok((rmse, 0.0, bias, 0.0));
    }
    let var_e = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / (r - 1.0);
    let bias_se = (var_e / r).sqrt();
    let var_sq = errors
        .iter()
        .map(|e| (e * e - mean_sq).powi(2))
        .sum::<f64>()
        / (r - 1.0);
    let rmse_se = if rmse > 0.0 {
        (var_sq / r).sqrt() / (2.0 * rmse)
    } else {
        0.0
    };
    Ok((rmse, rmse_se, bias, bias_se))
}

/// Run the full benchmark: one row per estimator.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.replications < 1 {
        return Err(EvtError::domain("replications must be >= 1".to_string()));
    }
    if config.sample_size < 4 {
        return Err(EvtError::domain("sample size must be >= 4".to_string()));
    }
    if config.estimators.is_empty() {
        return Err(EvtError::domain(
            "at least one estimator required".to_string(),
        ));
    }

    let (gamma_true, _) = config.distribution.truth();
    let dist_id = config.distribution.id();

    // (error, k_hat) per estimator, None when that estimator failed.
    let per_rep: Vec<Vec<Option<(f64, f64)>>> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let seed = stream_seed(config.master_seed, rep as u64, &dist_id);
            let draws = config
                .distribution
                .sample(config.sample_size, seed)
                .expect("sample_size >= 4");
            let sample = Sample::new(&draws, config.cap);
            config
                .estimators
                .iter()
                .map(|est| {
                    let sample = sample.as_ref().ok()?;
                    match est {
                        BenchEstimator::Rbm => select_threshold(&rbm_path(sample))
                            .ok()
                            .map(|e| (e.gamma_hat - gamma_true, e.k_hat)),
                        BenchEstimator::GuillouHall => gh_threshold(sample)
                            .ok()
                            .map(|sel| (sel.estimate.gamma_hat - gamma_true, sel.estimate.k_hat)),
                    }
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(config.estimators.len());
    for (e_idx, est) in config.estimators.iter().enumerate() {
        let mut errors = Vec::with_capacity(config.replications);
        let mut k_sum = 0.0;
        let mut excluded = 0usize;
        for rep in &per_rep {
            match rep[e_idx] {
                Some((err, k_hat)) => {
                    errors.push(err);
                    k_sum += k_hat;
                }
                None => excluded += 1,
            }
        }
        if errors.is_empty() {
            return Err(EvtError::domain(format!(
                "every replication failed for estimator {}",
                est.name()
            )));
        }
        let (rmse, rmse_se, bias, bias_se) = rmse_bias(&errors)?;
        rows.push(BenchRow {
            distribution: dist_id.clone(),
            estimator: est.name().to_string(),
            rmse,
            rmse_se,
            bias,
            bias_se,
            replications: errors.len(),
            n_excluded: excluded,
            mean_k_hat: k_sum / errors.len() as f64,
            master_seed: config.master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        });
    }
    Ok(rows)
}

/// CSV rendering (header included, LF line endings, `.` decimal point).
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "distribution,estimator,rmse,rmse_se,bias,bias_se,replications,n_excluded,mean_k_hat,master_seed,version\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.distribution,
            r.estimator,
            r.rmse,
            r.rmse_se,
            r.bias,
            r.bias_se,
            r.replications,
            r.n_excluded,
            r.mean_k_hat,
            r.master_seed,
            r.version
        ));
    }
    out
}

/// Pretty JSON rendering.
pub fn rows_to_json(rows: &[BenchRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}
