//! Hill-family benchmark estimators and closed-form limit laws.
//!
//! Includes the Hill estimator, its moving-window smoothed variant
//! (smooHill, averaging over `(k, 2k]`), the Guillou–Hall automatic
//! threshold diagnostic, and the asymptotic mean/variance formulas used to
//! compare the Hill and block-maxima estimators at matched variance.

use crate::error::{EvtError, Result};
use crate::sample::{Sample, SecondOrderModel, TailEstimate};
use crate::special::gamma;

/// Hill estimator on the top `k + 1` order statistics:
/// `(1/k) * sum_{j=0..k-1} ln(X_{n-j,n} / X_{n-k,n})`.
pub fn hill(sample: &Sample, k: usize) -> Result<f64> {
    let n = sample.len();
    if k < 1 || k > n - 1 {
        return Err(EvtError::domain(format!(
            "hill order count k = {k} out of range [1, {}]",
            n - 1
        )));
    }
    let values = sample.values();
    let base = values[n - 1 - k].ln();
    let sum: f64 = (0..k).map(|j| values[n - 1 - j].ln() - base).sum();
    Ok(sum / k as f64)
}

/// Hill estimates for every `k = 1..n-1` (entry `k-1` holds `hill(k)`),
/// via prefix sums of the descending logs.
pub fn hill_all(sample: &Sample) -> Vec<f64> {
    let logs = sample.logs_descending();
    let n = logs.len();
    let mut out = Vec::with_capacity(n - 1);
    let mut prefix = 0.0;
    for k in 1..n {
        prefix += logs[k - 1];
        out.push(prefix / k as f64 - logs[k]);
    }
    out
}

/// Smoothed Hill estimator: the mean of `hill(j)` over the window
/// `j in (k, min(2k, n-1)]`. The window truncates at `n - 1` so the whole
/// `k` range stays plottable; it is empty (an error) only for `k >= n-1`.
pub fn smoohill(sample: &Sample, k: usize) -> Result<f64> {
    let n = sample.len();
    if k < 1 {
        return Err(EvtError::domain("smoohill needs k >= 1".to_string()));
    }
    let hi = (2 * k).min(n - 1);
    if k + 1 > hi {
        return Err(EvtError::domain(format!(
            "smoohill window ({k}, {hi}] is empty"
        )));
    }
    let hills = hill_all(sample);
    let window = &hills[k..hi];
    Ok(window.iter().sum::<f64>() / window.len() as f64)
}

/// Round a real threshold from the `k = 2n/s` grid to the nearest integer
/// order count usable by the Hill estimator.
pub fn hill_grid_k(k: f64, n: usize) -> usize {
    (k.round() as usize).clamp(1, n - 1)
}

/// Critical value for the Guillou–Hall bias diagnostic.
pub const GH_CRITICAL: f64 = 1.25;

/// Guillou–Hall threshold choice plus a flag marking the degenerate case
/// where the diagnostic rejected every admissible `k` and the largest one
/// was returned instead.
#[derive(Debug, Clone, PartialEq)]
pub struct GhSelection {
    pub estimate: TailEstimate,
    pub fallback: bool,
}

/// Automatic threshold for the Hill estimator by the Guillou–Hall
/// diagnostic, which stops just before bias becomes detectable among the
/// high-order log spacings and needs no second-order fit.
///
/// With scaled log spacings `Z_j = j (ln X_{n-j+1,n} - ln X_{n-j,n})`
/// (i.i.d. exponential with mean gamma in the unbiased regime), the
/// statistic is the normalized linear contrast
///
/// ```text
///     T(k) = sqrt(3/k^3) * sum_{j=1..k} (k - 2j + 1) Z_j / hill(k)
/// ```
///
/// which is asymptotically N(0, 1) when the top `k` spacings carry no
/// bias. It is smoothed over a symmetric window of half-width `floor(k/2)`:
///
/// ```text
///     Q(k) = sqrt( mean of T(j)^2 over |j - k| <= floor(k/2) )
/// ```
///
/// Bias grows with `k`, so rejection becomes permanent once the threshold
/// leaves the tail region; the chosen `k_hat` is the largest admissible
/// `k` with `Q(k) <= 1.25`, i.e. the point just before the terminal
/// rejection run. Scanning from the deep end (rather than stopping at the
/// first small-`k` crossing) keeps chance fluctuations of the noisy
/// low-`k` statistics from truncating the threshold. Admissible `k` are
/// those whose smoothing window fits inside `[1, n-1]`. If every
/// admissible `k` is rejected, the largest one is returned with
/// `fallback = true` so that benchmark replications always produce a
/// value.
pub fn gh_threshold(sample: &Sample) -> Result<GhSelection> {
    let n = sample.len();
    if n < 4 {
        return Err(EvtError::domain(format!(
            "Guillou-Hall diagnostic needs n >= 4, got {n}"
        )));
    }
    let logs = sample.logs_descending();

    // Z_j and the prefix sums needed for the contrast:
    // sum_j (k - 2j + 1) Z_j = (k + 1) S1(k) - 2 S2(k).
    let m = n - 1;
    let mut s1 = vec![0.0; m + 1];
    let mut s2 = vec![0.0; m + 1];
    for j in 1..=m {
        let z = j as f64 * (logs[j - 1] - logs[j]);
        s1[j] = s1[j - 1] + z;
        s2[j] = s2[j - 1] + j as f64 * z;
    }
    let t_stat = |k: usize| -> f64 {
        let hill_k = s1[k] / k as f64;
        if hill_k == 0.0 {
            return 0.0; // all top spacings tied: no bias evidence
        }
        let contrast = (k as f64 + 1.0) * s1[k] - 2.0 * s2[k];
        (3.0 / (k as f64).powi(3)).sqrt() * contrast / hill_k
    };

    // Largest k whose smoothing window [k - k/2, k + k/2] fits in [1, m].
    let k_max = (2..=m).take_while(|&k| k + k / 2 <= m).last();
    let k_max = match k_max {
        Some(k) => k,
        None => {
            return Err(EvtError::domain(format!(
                "Guillou-Hall smoothing window does not fit for n = {n}"
            )))
        }
    };

    let t_sq: Vec<f64> = (1..=m).map(|k| t_stat(k).powi(2)).collect();
    let q = |k: usize| -> f64 {
        let half = k / 2;
        let lo = k - half;
        let hi = k + half;
        let mean = t_sq[lo - 1..hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
        mean.sqrt()
    };

    let accepted = (2..=k_max).rev().find(|&k| q(k) <= GH_CRITICAL);
    let (k_hat, fallback) = match accepted {
        Some(k) => (k, false),
        None => (k_max, true),
    };
    let gamma_hat = hill(sample, k_hat)?;
    Ok(GhSelection {
        estimate: TailEstimate::new(gamma_hat, k_hat as f64, None),
        fallback,
    })
}

/// Asymptotic mean shift and variance of a threshold-indexed estimator
/// after `sqrt(k)` scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitLaw {
    pub mean_shift: f64,
    pub variance: f64,
}

/// Ratio of the block-maxima estimator's asymptotic bias to the Hill
/// estimator's at equal variance: `2^rho * Gamma(1 - rho) * (1 - rho)`.
///
/// Equal to 1 at `rho = -1`; below 1 on `(-1, 0)` and above 1 for
/// `rho < -1`.
pub fn asymptotic_bias_ratio(rho: f64) -> Result<f64> {
    if !(rho < 0.0) {
        return Err(EvtError::domain(format!("rho = {rho} must be < 0")));
    }
    Ok(2f64.powf(rho) * gamma(1.0 - rho) * (1.0 - rho))
}

/// Limit law of the block-maxima estimator at threshold ratio `a`:
/// mean `lambda * Gamma(1 - rho) * (a/2)^(-rho)`, variance `gamma^2 / a`.
pub fn rbm_limit(a: f64, model: &SecondOrderModel) -> Result<LimitLaw> {
    if !(a > 0.0) {
        return Err(EvtError::domain(format!("threshold ratio a = {a} must be > 0")));
    }
    Ok(LimitLaw {
        mean_shift: model.lambda * gamma(1.0 - model.rho) * (a / 2.0).powf(-model.rho),
        variance: model.gamma * model.gamma / a,
    })
}

/// Limiting covariance of the block-maxima estimates at two threshold
/// ratios: `2 gamma^2 / (a_i + a_j)`.
pub fn rbm_limit_cov(a_i: f64, a_j: f64, gamma: f64) -> f64 {
    2.0 * gamma * gamma / (a_i + a_j)
}

/// Limit law of the Hill estimator at threshold ratio `a`:
/// mean `lambda * a^(-rho) / (1 - rho)`, variance `gamma^2 / a`.
pub fn hill_limit(a: f64, model: &SecondOrderModel) -> Result<LimitLaw> {
    if !(a > 0.0) {
        return Err(EvtError::domain(format!("threshold ratio a = {a} must be > 0")));
    }
    Ok(LimitLaw {
        mean_shift: model.lambda * a.powf(-model.rho) / (1.0 - model.rho),
        variance: model.gamma * model.gamma / a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn sample(values: &[f64]) -> Sample {
        Sample::new(values, None).unwrap()
    }

    fn pareto_sample(rng: &mut ChaCha8Rng, n: usize, gamma: f64) -> Sample {
        let raw: Vec<f64> = (0..n)
            .map(|_| (1.0 - rng.random::<f64>()).powf(-gamma))
            .collect();
        sample(&raw)
    }

    #[test]
    fn hill_small_cases() {
        let s = sample(&[1.0, E, E * E]);
        assert!((hill(&s, 2).unwrap() - 1.5).abs() < 1e-15);
        assert!((hill(&sample(&[1.0, E]), 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(hill(&sample(&[4.0, 4.0, 4.0]), 2).unwrap(), 0.0);
        assert!(hill(&s, 0).is_err());
        assert!(hill(&s, 3).is_err());
    }

    #[test]
    fn hill_all_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = pareto_sample(&mut rng, 80, 0.8);
        let all = hill_all(&s);
        for k in 1..80 {
            let direct = hill(&s, k).unwrap();
            assert!(
                (all[k - 1] - direct).abs() < 1e-12,
                "k={k}: {} vs {direct}",
                all[k - 1]
            );
        }
    }

    #[test]
    fn smoohill_window_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = pareto_sample(&mut rng, 5, 1.0);
        let expected = (hill(&s, 3).unwrap() + hill(&s, 4).unwrap()) / 2.0;
        assert!((smoohill(&s, 2).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn smoohill_matches_naive_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = pareto_sample(&mut rng, 500, 0.5);
        let naive: f64 = (11..=20).map(|j| hill(&s, j).unwrap()).sum::<f64>() / 10.0;
        assert!((smoohill(&s, 10).unwrap() - naive).abs() < 1e-13);
    }

    #[test]
    fn smoohill_truncates_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = pareto_sample(&mut rng, 10, 1.0);
        // k = 6: window (6, min(12, 9)] = {7, 8, 9}
        let expected: f64 = (7..=9).map(|j| hill(&s, j).unwrap()).sum::<f64>() / 3.0;
        assert!((smoohill(&s, 6).unwrap() - expected).abs() < 1e-14);
        assert!(smoohill(&s, 9).is_err());
        assert!(smoohill(&s, 0).is_err());
    }

    #[test]
    fn smoohill_of_constant_hill_path() {
        // Descending log spacings c/j make every scaled spacing Z_j = c,
        // hence hill(k) = c for all k and smoohill must return c too.
        let c = 0.8;
        let n = 30;
        let mut log = 0.0;
        let mut values = vec![1.0f64]; // largest, built downward
        for j in 1..n {
            log -= c / j as f64;
            values.push(log.exp());
        }
        let s = sample(&values);
        for k in 1..n - 1 {
            assert!((hill(&s, k).unwrap() - c).abs() < 1e-12);
        }
        for k in 1..n - 1 {
            assert!((smoohill(&s, k).unwrap() - c).abs() < 1e-12);
        }
    }

    #[test]
    fn smoohill_has_smaller_total_variation_than_hill() {
        // The moving-window average must damp the path's oscillation on
        // heavy-tailed data in nearly every replication.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 500;
        let reps = 25;
        let mut wins = 0;
        for _ in 0..reps {
            let raw: Vec<f64> = (0..n)
                .map(|_| (-(rng.random::<f64>()).ln()).powf(-0.5))
                .collect();
            let s = sample(&raw);
            let hills = hill_all(&s);
            let tv_hill: f64 = hills[..n - 2]
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .sum();
            let smooth: Vec<f64> = (1..=n - 2).map(|k| smoohill(&s, k).unwrap()).collect();
            let tv_smooth: f64 = smooth.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            if tv_smooth < tv_hill {
                wins += 1;
            }
        }
        assert!(
            wins as f64 >= 0.95 * reps as f64,
            "smoohill smoother in only {wins}/{reps} replications"
        );
    }

    #[test]
    fn gh_needs_four_points() {
        assert!(gh_threshold(&sample(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn gh_on_exact_pareto_uses_deep_threshold() {
        // Zero-bias regime: the diagnostic should accept essentially the
        // whole admissible range.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = pareto_sample(&mut rng, 500, 0.5);
        let sel = gh_threshold(&s).unwrap();
        assert!(!sel.fallback);
        assert!(sel.estimate.k_hat >= 50.0, "k_hat = {}", sel.estimate.k_hat);
        assert!((sel.estimate.gamma_hat - 0.5).abs() < 0.15);
        assert!(sel.estimate.s_hat.is_none());
    }

    #[test]
    fn gh_on_pareto_is_unbiased_across_replications() {
        // Zero-bias regime Monte Carlo: the mean estimate over
        // replications stays within 3 standard errors of the truth.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let reps = 100;
        let gammas: Vec<f64> = (0..reps)
            .map(|_| {
                let s = pareto_sample(&mut rng, 500, 0.5);
                gh_threshold(&s).unwrap().estimate.gamma_hat
            })
            .collect();
        let mean = gammas.iter().sum::<f64>() / reps as f64;
        let var = gammas.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        let se = (var / reps as f64).sqrt();
        assert!(
            (mean - 0.5).abs() < 3.0 * se,
            "mean {mean} vs 0.5 (se {se})"
        );
    }

    #[test]
    fn gh_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s = pareto_sample(&mut rng, 200, 1.0);
        let a = gh_threshold(&s).unwrap();
        let b = gh_threshold(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bias_ratio_reference_points() {
        assert_eq!(asymptotic_bias_ratio(-1.0).unwrap(), 1.0);
        let r = asymptotic_bias_ratio(-0.5).unwrap();
        assert!((r - 2f64.powf(-0.5) * gamma(1.5) * 1.5).abs() < 1e-15);
        assert!((r - 0.9399).abs() < 1e-4);
        let r2 = asymptotic_bias_ratio(-2.0).unwrap();
        assert!((r2 - 1.5).abs() < 1e-14);
        assert!(asymptotic_bias_ratio(0.0).is_err());
        assert!(asymptotic_bias_ratio(0.5).is_err());
    }

    #[test]
    fn bias_ratio_regimes() {
        for rho in [-0.25, -0.5] {
            assert!(asymptotic_bias_ratio(rho).unwrap() < 1.0);
        }
        for rho in [-1.5, -2.0] {
            assert!(asymptotic_bias_ratio(rho).unwrap() > 1.0);
        }
    }

    #[test]
    fn limit_laws_reference_points() {
        let model = SecondOrderModel::new(1.0, -1.0, 0.0).unwrap();
        let law = rbm_limit(2.0, &model).unwrap();
        assert_eq!(law.mean_shift, 0.0);
        assert!((law.variance - 0.5).abs() < 1e-15);

        let model = SecondOrderModel::new(1.0, -1.0, 1.0).unwrap();
        let law = rbm_limit(2.0, &model).unwrap();
        assert!((law.mean_shift - 1.0).abs() < 1e-14);

        let law = hill_limit(1.0, &model).unwrap();
        assert!((law.mean_shift - 0.5).abs() < 1e-15);
        assert!((law.variance - 1.0).abs() < 1e-15);

        let zero = SecondOrderModel::new(1.0, -1.0, 0.0).unwrap();
        assert_eq!(hill_limit(1.0, &zero).unwrap().mean_shift, 0.0);

        assert!((rbm_limit_cov(1.0, 3.0, 1.0) - 0.5).abs() < 1e-15);
        assert!(rbm_limit(0.0, &model).is_err());
        assert!(hill_limit(-1.0, &model).is_err());
    }

    #[test]
    fn limit_mean_ratio_is_bias_ratio() {
        for rho in [-0.3, -1.0, -1.7] {
            let model = SecondOrderModel::new(0.7, rho, 0.9).unwrap();
            let expected = asymptotic_bias_ratio(rho).unwrap();
            for a in [0.5, 1.0, 2.0] {
                let ratio = rbm_limit(a, &model).unwrap().mean_shift
                    / hill_limit(a, &model).unwrap().mean_shift;
                assert!(
                    (ratio - expected).abs() < 1e-12,
                    "a={a} rho={rho}: {ratio} vs {expected}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn hill_scale_free_and_nonnegative(
            values in proptest::collection::vec(0.01f64..100.0, 3..50),
            c in 0.01f64..100.0,
        ) {
            let s = Sample::new(&values, None).unwrap();
            let scaled: Vec<f64> = values.iter().map(|x| x * c).collect();
            let s2 = Sample::new(&scaled, None).unwrap();
            for k in 1..s.len() {
                let h = hill(&s, k).unwrap();
                prop_assert!(h >= 0.0);
                let h2 = hill(&s2, k).unwrap();
                prop_assert!((h - h2).abs() < 1e-9, "k={} {} vs {}", k, h, h2);
            }
        }
    }
}
