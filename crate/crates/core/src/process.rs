//! The limiting Gaussian process of the threshold-indexed block-maxima
//! estimator, on the log-threshold scale `tau = ln t`.
//!
//! The process `R(tau)` has
//!
//! ```text
//!     E[R(tau)]            = lambda Gamma(1 - rho) (e^tau / 2)^(-rho)
//!     Cov[R(t1), R(t2)]    = 2 gamma^2 / (e^t1 + e^t2)
//! ```
//!
//! Its sample paths are smooth, so it has a derivative process `R'(tau)`
//! whose moments follow by differentiating the kernel:
//!
//! ```text
//!     E[R'(tau)]           = -rho E[R(tau)]
//!     Cov[R'(s), R'(t)]    = 4 gamma^2 e^(s+t) / (e^s + e^t)^3
//!     Cov[R(s), R'(t)]     = -2 gamma^2 e^t / (e^s + e^t)^2
//! ```
//!
//! `(R, R')` is simulated jointly from the exact `2m x 2m` Gaussian on a
//! grid rather than by finite-differencing simulated `R`, which would
//! corrupt the threshold objective with grid noise.
//!
//! The continuous threshold rule minimizes `Z(tau) = R'(tau)^2 +
//! gamma^2/(2 e^tau)`, a posterior-mean-square-bias proxy; the oracle
//! threshold `tau*` minimizes the expected squared error
//! `E[R^2(tau)] = bias(tau)^2 + gamma^2 e^(-tau)` and has a closed form.

use crate::error::{EvtError, Result};
use crate::sample::SecondOrderModel;
use crate::seeding::stream_seed;
use crate::special::gamma as gamma_fn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Jitter escalation policy for the joint covariance factorization.
const JITTER_START_REL: f64 = 1e-12;
const JITTER_MAX_REL: f64 = 1e-6;

/// Model plus a strictly increasing evaluation grid of `tau` values.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    pub model: SecondOrderModel,
    pub grid: Vec<f64>,
}

impl ProcessSpec {
    pub fn new(model: SecondOrderModel, grid: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(EvtError::domain(format!(
                "process grid needs at least 2 points, got {}",
                grid.len()
            )));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) || grid.iter().any(|t| !t.is_finite()) {
            return Err(EvtError::domain(
                "process grid must be finite and strictly increasing".to_string(),
            ));
        }
        Ok(ProcessSpec { model, grid })
    }
}

/// One joint draw of `(R, R')` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPath {
    pub r: Vec<f64>,
    pub r_prime: Vec<f64>,
}

/// `E[R(tau)]`.
pub fn mean_r(tau: f64, model: &SecondOrderModel) -> f64 {
    model.lambda * gamma_fn(1.0 - model.rho) * (-model.rho * (tau - std::f64::consts::LN_2)).exp()
}

/// `Cov[R(tau1), R(tau2)]`, evaluated with the larger exponent factored
/// out so large grid values cannot overflow.
pub fn cov_r(tau1: f64, tau2: f64, model: &SecondOrderModel) -> f64 {
    let m = tau1.max(tau2);
    2.0 * model.gamma * model.gamma * (-m).exp() / ((tau1 - m).exp() + (tau2 - m).exp())
}

/// `E[R'(tau)]`; the derivative of the mean function.
pub fn mean_rp(tau: f64, model: &SecondOrderModel) -> f64 {
    -model.rho * mean_r(tau, model)
}

/// `Cov[R'(tau1), R'(tau2)]`.
pub fn cov_rp(tau1: f64, tau2: f64, model: &SecondOrderModel) -> f64 {
    let m = tau1.max(tau2);
    let e1 = (tau1 - m).exp();
    let e2 = (tau2 - m).exp();
    4.0 * model.gamma * model.gamma * e1 * e2 * (-m).exp() / (e1 + e2).powi(3)
}

/// `Cov[R(tau_r), R'(tau_rp)]`; the kernel differentiated in its second
/// argument. On the diagonal this equals `-gamma^2 / (2 e^tau)`.
pub fn cross_cov(tau_r: f64, tau_rp: f64, model: &SecondOrderModel) -> f64 {
    let m = tau_r.max(tau_rp);
    let er = (tau_r - m).exp();
    let ep = (tau_rp - m).exp();
    -2.0 * model.gamma * model.gamma * ep * (-m).exp() / (er + ep).powi(2)
}

/// Expected squared error of the estimator process at `tau`:
/// squared bias plus variance `gamma^2 e^(-tau)`.
pub fn expected_sq_err(tau: f64, model: &SecondOrderModel) -> f64 {
    let b = mean_r(tau, model);
    b * b + model.gamma * model.gamma * (-tau).exp()
}

/// The oracle threshold `tau* = argmin E[R^2(tau)]`.
///
/// Setting the derivative of `bias^2 + gamma^2 e^(-tau)` to zero gives the
/// stationarity condition
///
/// ```text
///     -2 rho lambda^2 Gamma(1-rho)^2 2^(2 rho) e^(-2 rho tau) = gamma^2 e^(-tau)
/// ```
///
/// whose unique solution is returned. Requires `lambda != 0`: a centered
/// process has no finite optimum (the expected squared error is strictly
/// decreasing).
pub fn optimal_tau(model: &SecondOrderModel) -> Result<f64> {
    if model.lambda == 0.0 {
        return Err(EvtError::domain(
            "optimal threshold undefined for lambda = 0".to_string(),
        ));
    }
    let g = gamma_fn(1.0 - model.rho);
    let c_sq = model.lambda * model.lambda * g * g * 2f64.powf(2.0 * model.rho);
    Ok((model.gamma * model.gamma / (-2.0 * model.rho * c_sq)).ln() / (1.0 - 2.0 * model.rho))
}

/// The 200-point study grid `[tau* - 6, tau* + 4]`: wide enough to bracket
/// the minimum while keeping the factorization well conditioned.
pub fn default_study_grid(tau_star: f64) -> Vec<f64> {
    let points = 200;
    let start = tau_star - 6.0;
    let step = 10.0 / (points - 1) as f64;
    (0..points).map(|i| start + i as f64 * step).collect()
}

/// Row-major joint covariance of `(R(grid), R'(grid))`, dimension `2m`.
pub fn joint_covariance(spec: &ProcessSpec) -> Vec<f64> {
    let grid = &spec.grid;
    let m = grid.len();
    let dim = 2 * m;
    let mut cov = vec![0.0; dim * dim];
    for i in 0..m {
        for j in 0..m {
            cov[i * dim + j] = cov_r(grid[i], grid[j], &spec.model);
            cov[i * dim + (m + j)] = cross_cov(grid[i], grid[j], &spec.model);
            cov[(m + i) * dim + j] = cross_cov(grid[j], grid[i], &spec.model);
            cov[(m + i) * dim + (m + j)] = cov_rp(grid[i], grid[j], &spec.model);
        }
    }
    cov
}

/// Lower-triangular Cholesky factor of a symmetric matrix, or `None` when
/// a pivot is not strictly positive.
fn cholesky_lower(a: &[f64], dim: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = a[i * dim + j];
            for k in 0..j {
                sum -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * dim + i] = sum.sqrt();
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    Some(l)
}

/// Factor the joint covariance, escalating a diagonal jitter from
/// `1e-12 * max_diag` by decades up to `1e-6 * max_diag` before failing.
fn factor_with_jitter(cov: &[f64], dim: usize) -> Result<Vec<f64>> {
    if let Some(l) = cholesky_lower(cov, dim) {
        return Ok(l);
    }
    let max_diag = (0..dim).map(|i| cov[i * dim + i]).fold(0.0f64, f64::max);
    let mut jitter = JITTER_START_REL * max_diag;
    while jitter <= JITTER_MAX_REL * max_diag {
        let mut jittered = cov.to_vec();
        for i in 0..dim {
            jittered[i * dim + i] += jitter;
        }
        if let Some(l) = cholesky_lower(&jittered, dim) {
            return Ok(l);
        }
        jitter *= 10.0;
    }
    Err(EvtError::FactorizationFailure { max_diag })
}

/// Exact multivariate-normal draws of `(R, R')` on the grid; path `p` uses
/// RNG stream `p`, so output is identical however the work is scheduled.
pub fn simulate_paths(spec: &ProcessSpec, n_paths: usize, seed: u64) -> Result<Vec<ProcessPath>> {
    if n_paths < 1 {
        return Err(EvtError::domain("n_paths must be >= 1".to_string()));
    }
    let grid = &spec.grid;
    let m = grid.len();
    let dim = 2 * m;

    let mut mean = Vec::with_capacity(dim);
    mean.extend(grid.iter().map(|&t| mean_r(t, &spec.model)));
    mean.extend(grid.iter().map(|&t| mean_rp(t, &spec.model)));

    let cov = joint_covariance(spec);
    let l = factor_with_jitter(&cov, dim)?;

    let paths = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let mut x = mean.clone();
            for i in 0..dim {
                let row = &l[i * dim..i * dim + i + 1];
                let mut acc = 0.0;
                for (lik, zk) in row.iter().zip(&z) {
                    acc += lik * zk;
                }
                x[i] += acc;
            }
            ProcessPath {
                r: x[..m].to_vec(),
                r_prime: x[m..].to_vec(),
            }
        })
        .collect();
    Ok(paths)
}

/// Index of the grid point minimizing the bias-suspicion objective
/// `Z(tau) = R'(tau)^2 + gamma^2 / (2 e^tau)`; ties go to the smaller
/// `tau`.
pub fn process_threshold_index(path: &ProcessPath, spec: &ProcessSpec) -> usize {
    debug_assert_eq!(path.r_prime.len(), spec.grid.len());
    let g2 = spec.model.gamma * spec.model.gamma;
    let mut best = 0;
    let mut best_z = f64::INFINITY;
    for (j, (&rp, &tau)) in path.r_prime.iter().zip(&spec.grid).enumerate() {
        let z = rp * rp + g2 / (2.0 * tau.exp());
        if z < best_z {
            best_z = z;
            best = j;
        }
    }
    best
}

/// The selected threshold `tau_hat` itself.
pub fn process_threshold(path: &ProcessPath, spec: &ProcessSpec) -> f64 {
    spec.grid[process_threshold_index(path, spec)]
}

/// Per-`rho` summary of the threshold rule study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretSummary {
    pub rho: f64,
    pub gamma: f64,
    pub tau_star: f64,
    /// Quantiles of `tau_hat - tau_star`.
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    /// Mean of `R^2(tau_hat) / E[R^2(tau*)]`.
    pub mean_relative_regret: f64,
    /// Fraction of paths whose argmin is not the right grid boundary.
    pub interior_fraction: f64,
    pub n_paths: usize,
    pub seed: u64,
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Threshold-rule study along the surface `rho = -2 gamma`, scaled to
/// `lambda = 1`: for each `rho` simulate the joint process on the default
/// grid around `tau*`, apply the threshold rule to each path, and
/// summarize `tau_hat - tau_star` and the relative regret
/// `R^2(tau_hat) / E[R^2(tau*)]`.
pub fn regret_study(rhos: &[f64], n_paths: usize, seed: u64) -> Result<Vec<RegretSummary>> {
    let mut out = Vec::with_capacity(rhos.len());
    for (i, &rho) in rhos.iter().enumerate() {
        let model = SecondOrderModel::new(-rho / 2.0, rho, 1.0)?;
        let tau_star = optimal_tau(&model)?;
        let spec = ProcessSpec::new(model, default_study_grid(tau_star))?;
        let study_seed = stream_seed(seed, i as u64, "process-study");
        let paths = simulate_paths(&spec, n_paths, study_seed)?;

        let oracle_err = expected_sq_err(tau_star, &model);
        let mut deltas = Vec::with_capacity(n_paths);
        let mut regret_sum = 0.0;
        let mut interior = 0usize;
        for path in &paths {
            let idx = process_threshold_index(path, &spec);
            deltas.push(spec.grid[idx] - tau_star);
            regret_sum += path.r[idx] * path.r[idx] / oracle_err;
            if idx + 1 < spec.grid.len() {
                interior += 1;
            }
        }
        deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.push(RegretSummary {
            rho,
            gamma: -rho / 2.0,
            tau_star,
            q05: quantile_sorted(&deltas, 0.05),
            q50: quantile_sorted(&deltas, 0.50),
            q95: quantile_sorted(&deltas, 0.95),
            mean_relative_regret: regret_sum / n_paths as f64,
            interior_fraction: interior as f64 / n_paths as f64,
            n_paths,
            seed,
        });
    }
    Ok(out)
}

/// CSV for the study rows (header included).
pub fn regret_rows_to_csv(rows: &[RegretSummary]) -> String {
    let mut out =
        String::from("rho,gamma,tau_star,q05,q50,q95,mean_relative_regret,n_paths,seed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.rho,
            r.gamma,
            r.tau_star,
            r.q05,
            r.q50,
            r.q95,
            r.mean_relative_regret,
            r.n_paths,
            r.seed
        ));
    }
    out
}
