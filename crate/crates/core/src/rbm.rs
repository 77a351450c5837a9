//! The random block maxima (RBM) tail index estimator.
//!
//! For a subsample size `s`, the estimate is
//!
//! ```text
//!     gamma_hat(s) = s * (M(s) - M(s-1))
//! ```
//!
//! where `M(s)` is the average log maximum over all size-`s` subsamples
//! drawn without replacement. `M(s)` never needs explicit enumeration: with
//! observations sorted ascending it collapses to an order-statistic
//! weighted sum
//!
//! ```text
//!     M(s) = sum_{j=1..n-s+1} C(n-j, s-1)/C(n, s) * ln X_{n-j+1,n}
//! ```
//!
//! because the j-th largest observation is the maximum of exactly
//! `C(n-j, s-1)` subsamples. The same estimator is an average of top-two
//! log spacings over all subsamples, which [`brute_force_rbm`] computes by
//! enumeration as an independent cross-check.
//!
//! `gamma_hat` itself is evaluated through the order-statistic spacings
//! `D_j = ln X_{n-j+1,n} - ln X_{n-j,n}` rather than by differencing two
//! `M` sums: the spacing `D_j` enters a subsample's top-two gap exactly
//! when one of the `j` largest points is selected, so
//!
//! ```text
//!     gamma_hat(s) = sum_{j=1..n-s+1} j * w_j(n, s) * D_j
//! ```
//!
//! with the same weights `w_j`. Every term is non-negative, and tied
//! observations contribute exact zeros, so constant data yields exactly 0
//! instead of rounding noise from two nearly equal sums.
//!
//! The threshold rule picks the grid point minimizing the squared path
//! derivative in `ln k` plus a `gamma_hat^2 / (2k)` variance penalty, i.e.
//! the point giving least cause to suspect bias.

use crate::error::{EvtError, Result};
use crate::sample::{EstimatorKind, EstimatorPath, Sample, TailEstimate, ThresholdPoint};

/// Largest `n` accepted by the subset-enumeration oracle.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Subsample-maximum weights `w[j-1] = C(n-j, s-1) / C(n, s)` for
/// `j = 1..n-s+1`.
///
/// Computed by the multiplicative recurrence `w_1 = s/n`,
/// `w_{j+1} = w_j * (n-j-s+1)/(n-j)`, which never forms a factorial and so
/// stays finite for `n` in the tens of thousands.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub n: usize,
    pub s: usize,
    pub w: Vec<f64>,
}

pub fn subsample_max_weights(n: usize, s: usize) -> Result<WeightVector> {
    if s < 1 || s > n {
        return Err(EvtError::domain(format!(
            "subsample size s = {s} out of range [1, {n}]"
        )));
    }
    let mut w = Vec::with_capacity(n - s + 1);
    let mut current = s as f64 / n as f64;
    w.push(current);
    for j in 1..=(n - s) {
        current *= (n - j - s + 1) as f64 / (n - j) as f64;
        w.push(current);
    }
    Ok(WeightVector { n, s, w })
}

/// The profile `m[s-1] = M(s)` for `s = 1..n`.
///
/// `M(1)` is the plain mean of logs and `M(n)` the log sample maximum; the
/// profile is non-decreasing in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MProfile {
    pub m: Vec<f64>,
}

/// Weighted mean log maximum for one `s`, given logs ordered largest first.
///
/// Runs the weight recurrence inline so no weight vector is materialized.
fn weighted_mean_log_max(logs_desc: &[f64], s: usize) -> f64 {
    let n = logs_desc.len();
    debug_assert!(s >= 1 && s <= n);
    let mut weight = s as f64 / n as f64;
    let mut acc = weight * logs_desc[0];
    for j in 1..=(n - s) {
        weight *= (n - j - s + 1) as f64 / (n - j) as f64;
        acc += weight * logs_desc[j];
    }
    acc
}

/// Compute `M(s)` for every `s = 1..n` in `O(n^2)` time and `O(n)` space.
pub fn mean_log_max_profile(sample: &Sample) -> MProfile {
    let logs = sample.logs_descending();
    let n = logs.len();
    let m = (1..=n).map(|s| weighted_mean_log_max(&logs, s)).collect();
    MProfile { m }
}

/// `gamma_hat(s) = s (M(s) - M(s-1))`, evaluated through the spacing form
/// `sum_j j * w_j * D_j` (see the module docs). Non-negative by
/// construction.
fn gamma_at(logs_desc: &[f64], s: usize) -> f64 {
    let n = logs_desc.len();
    debug_assert!(s >= 2 && s <= n);
    let mut weight = s as f64 / n as f64;
    let mut acc = weight * (logs_desc[0] - logs_desc[1]);
    for j in 1..=(n - s) {
        weight *= (n - j - s + 1) as f64 / (n - j) as f64;
        acc += (j + 1) as f64 * weight * (logs_desc[j] - logs_desc[j + 1]);
    }
    acc
}

/// RBM estimate `s * (M(s) - M(s-1))` at a single subsample size.
pub fn rbm_at(sample: &Sample, s: usize) -> Result<f64> {
    let n = sample.len();
    if s < 2 || s > n {
        return Err(EvtError::domain(format!(
            "subsample size s = {s} out of range [2, {n}]"
        )));
    }
    Ok(gamma_at(&sample.logs_descending(), s))
}

/// Subset-enumeration oracle: the exact average of
/// `ln(top) - ln(second)` over all `C(n, s)` subsamples.
///
/// Exponential in `n`; refuses inputs beyond [`BRUTE_FORCE_LIMIT`].
pub fn brute_force_rbm(sample: &Sample, s: usize) -> Result<f64> {
    let n = sample.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(EvtError::TooLargeToEnumerate {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if s < 2 || s > n {
        return Err(EvtError::domain(format!(
            "subsample size s = {s} out of range [2, {n}]"
        )));
    }
    let logs: Vec<f64> = sample.values().iter().map(|x| x.ln()).collect();
    let mut total = 0.0;
    let mut count: u64 = 0;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != s {
            continue;
        }
        // Values are sorted ascending, so the two highest set bits are the
        // subsample's top two order statistics.
        let top = 31 - mask.leading_zeros();
        let rest = mask & !(1 << top);
        let second = 31 - rest.leading_zeros();
        total += logs[top as usize] - logs[second as usize];
        count += 1;
    }
    Ok(total / count as f64)
}

/// Enumeration mean of `ln(max)` over all `C(n, s)` subsamples; oracle for
/// the weighted form of `M(s)`.
pub fn brute_force_mean_log_max(sample: &Sample, s: usize) -> Result<f64> {
    let n = sample.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(EvtError::TooLargeToEnumerate {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if s < 1 || s > n {
        return Err(EvtError::domain(format!(
            "subsample size s = {s} out of range [1, {n}]"
        )));
    }
    let logs: Vec<f64> = sample.values().iter().map(|x| x.ln()).collect();
    let mut total = 0.0;
    let mut count: u64 = 0;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let top = 31 - mask.leading_zeros();
        total += logs[top as usize];
        count += 1;
    }
    Ok(total / count as f64)
}

/// Full estimator path over `s = n, n-1, ..., 2`, i.e. ascending in
/// `k = 2n/s`; the logs are prepared once and each point costs `O(n)`,
/// `O(n^2)` in total.
pub fn rbm_path(sample: &Sample) -> EstimatorPath {
    let n = sample.len();
    let logs = sample.logs_descending();
    let points = (2..=n)
        .rev()
        .map(|s| ThresholdPoint {
            s,
            k: 2.0 * n as f64 / s as f64,
            gamma_hat: gamma_at(&logs, s),
        })
        .collect();
    EstimatorPath {
        estimator: EstimatorKind::Rbm,
        points,
    }
}

/// Candidates below this threshold are excluded from automatic selection:
/// `k < 4` means subsamples larger than half the data, where the estimator
/// degenerates toward a single top spacing (at `s = n` it is exactly
/// `ln X_{n,n} - ln X_{n-1,n}`) with no subsample averaging. There the
/// `gamma^2/(2k)` penalty no longer reflects the estimator's variance, and
/// chance dips of `gamma_hat` toward zero capture the argmin, inflating
/// the error badly.
pub const SELECT_MIN_K: f64 = 4.0;

/// Automatic threshold choice: minimize
///
/// ```text
///     ((gamma(k_i) - gamma(k_{i-1})) / (ln k_i - ln k_{i-1}))^2
///         + gamma(k_i)^2 / (2 k_i)
/// ```
///
/// over path points with a left neighbor and `k >= 4` (subsample at most
/// half the data; see [`SELECT_MIN_K`]). On paths too short to reach
/// `k = 4` every point with a left neighbor is admissible. Ties go to the
/// smaller `k` (less bias risk); when every candidate ties exactly (a flat
/// path, e.g. all-equal data) the largest `k` wins, the limit of the
/// constant-path case where the penalty alone decides.
pub fn select_threshold(path: &EstimatorPath) -> Result<TailEstimate> {
    let pts = &path.points;
    if pts.len() < 2 {
        return Err(EvtError::PathTooShort(pts.len()));
    }
    let mut candidates: Vec<usize> = (1..pts.len())
        .filter(|&i| pts[i].k >= SELECT_MIN_K)
        .collect();
    if candidates.is_empty() {
        candidates = (1..pts.len()).collect();
    }
    let objective = |i: usize| {
        let slope = (pts[i].gamma_hat - pts[i - 1].gamma_hat) / (pts[i].k.ln() - pts[i - 1].k.ln());
        slope * slope + pts[i].gamma_hat * pts[i].gamma_hat / (2.0 * pts[i].k)
    };

    let objectives: Vec<f64> = candidates.iter().map(|&i| objective(i)).collect();
    let all_equal = objectives.windows(2).all(|w| w[0] == w[1]);
    let chosen = if all_equal {
        *candidates.last().unwrap()
    } else {
        let mut best = candidates[0];
        let mut best_obj = objectives[0];
        for (&idx, &obj) in candidates.iter().zip(&objectives).skip(1) {
            if obj < best_obj {
                best_obj = obj;
                best = idx;
            }
        }
        best
    };

    let p = pts[chosen];
    Ok(TailEstimate::new(p.gamma_hat, p.k, Some(p.s)))
}
