//! Command-line interface for tail index estimation, path emission,
//! benchmarking, and threshold-rule process studies.
//!
//! Exit codes: 0 success, 2 input error, 3 insufficient data, 4 bad spec.

use clap::{Parser, Subcommand};
use rbm_core::bench::{run_benchmark, rows_to_csv, rows_to_json, BenchConfig, BenchEstimator};
use rbm_core::dist::Distribution;
use rbm_core::hill::{gh_threshold, hill, hill_grid_k, smoohill};
use rbm_core::process::{regret_rows_to_csv, regret_study};
use rbm_core::rbm::{rbm_at, rbm_path, select_threshold};
use rbm_core::{parse_values, EvtError, Sample, TailEstimate};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "rbm",
    version,
    about = "Tail index estimation for heavy-tailed data by random block maxima"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate the tail index from a data file (one number per line).
    Estimate {
        /// Input file, one decimal number per line.
        #[arg(long)]
        input: PathBuf,
        /// rbm | hill | smoohill
        #[arg(long, default_value = "rbm")]
        estimator: String,
        /// auto, k:<real>, or s:<int>
        #[arg(long, default_value = "auto")]
        threshold: String,
        /// Keep only the largest N points (N defaults to 2000).
        #[arg(long, num_args = 0..=1, default_missing_value = "2000")]
        cap: Option<usize>,
    },
    /// Emit the estimator path as CSV (k ascending), for plotting.
    Path {
        #[arg(long)]
        input: PathBuf,
        /// Comma list from rbm,hill,smoohill; rbm is always included.
        #[arg(long, default_value = "rbm")]
        estimators: String,
        #[arg(long, num_args = 0..=1, default_missing_value = "2000")]
        cap: Option<usize>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo benchmark of automatic-threshold estimators.
    Bench {
        /// Distribution spec: frechet:2, burr:1:0.5:2, t:4, loggamma,
        /// uinvsqlog, pareto:0.5
        spec: String,
        /// Points drawn per replication.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma list from rbm,gh.
        #[arg(long, default_value = "rbm,gh")]
        estimators: String,
        #[arg(long, num_args = 0..=1, default_missing_value = "2000")]
        cap: Option<usize>,
        /// Worker threads (default: rayon's choice). Output does not
        /// depend on this.
        #[arg(long)]
        workers: Option<usize>,
        /// csv | json
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold-rule study on the limiting process along rho = -2 gamma,
    /// lambda = 1.
    Process {
        /// Comma list of second-order parameters, each < 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        rho: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// (exit code, message) pairs; codes follow the interface contract.
type CliError = (i32, String);

const EXIT_INPUT: i32 = 2;
const EXIT_INSUFFICIENT: i32 = 3;
const EXIT_BAD_SPEC: i32 = 4;

fn main() {
    let cli = Cli::parse();
    if let Err((code, msg)) = run(cli) {
        eprintln!("error: {msg}");
        std::process::exit(code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Estimate {
            input,
            estimator,
            threshold,
            cap,
        } => cmd_estimate(&input, &estimator, &threshold, cap),
        Cmd::Path {
            input,
            estimators,
            cap,
            out,
        } => cmd_path(&input, &estimators, cap, out.as_deref()),
        Cmd::Bench {
            spec,
            n,
            reps,
            seed,
            estimators,
            cap,
            workers,
            format,
            out,
        } => cmd_bench(
            &spec,
            n,
            reps,
            seed,
            &estimators,
            cap,
            workers,
            &format,
            out.as_deref(),
        ),
        Cmd::Process {
            rho,
            paths,
            seed,
            out,
        } => cmd_process(&rho, paths, seed, out.as_deref()),
    }
}

fn load_sample(input: &Path, cap: Option<usize>) -> Result<Sample, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| (EXIT_INPUT, format!("{}: {e}", input.display())))?;
    let values = parse_values(&text).map_err(|e| (EXIT_INPUT, e.to_string()))?;
    Sample::new(&values, cap).map_err(|e| (EXIT_INSUFFICIENT, e.to_string()))
}

#[derive(Debug, Clone, Copy)]
enum ThresholdArg {
    Auto,
    K(f64),
    S(usize),
}

fn parse_threshold(threshold: &str) -> Result<ThresholdArg, CliError> {
    if threshold == "auto" {
        return Ok(ThresholdArg::Auto);
    }
    let bad = || {
        (
            EXIT_BAD_SPEC,
            format!("threshold must be auto, k:<real>, or s:<int>, got `{threshold}`"),
        )
    };
    if let Some(v) = threshold.strip_prefix("k:") {
        let k: f64 = v.parse().map_err(|_| bad())?;
        if !(k.is_finite() && k > 0.0) {
            return Err(bad());
        }
        Ok(ThresholdArg::K(k))
    } else if let Some(v) = threshold.strip_prefix("s:") {
        let s: usize = v.parse().map_err(|_| bad())?;
        Ok(ThresholdArg::S(s))
    } else {
        Err(bad())
    }
}

/// Subsample size for an explicit threshold request, from either form.
fn requested_s(arg: ThresholdArg, n: usize) -> Result<usize, CliError> {
    let s = match arg {
        ThresholdArg::Auto => unreachable!("auto handled by caller"),
        ThresholdArg::S(s) => s,
        ThresholdArg::K(k) => (2.0 * n as f64 / k).round() as usize,
    };
    if s < 2 || s > n {
        return Err((
            EXIT_BAD_SPEC,
            format!("threshold maps to subsample size {s}, outside [2, {n}]"),
        ));
    }
    Ok(s)
}

/// Integer Hill order count for an explicit threshold request.
fn requested_k(arg: ThresholdArg, n: usize) -> Result<usize, CliError> {
    let k = match arg {
        ThresholdArg::Auto => unreachable!("auto handled by caller"),
        ThresholdArg::K(k) => hill_grid_k(k, n),
        ThresholdArg::S(s) => {
            if s < 2 || s > n {
                return Err((
                    EXIT_BAD_SPEC,
                    format!("subsample size {s} outside [2, {n}]"),
                ));
            }
            hill_grid_k(2.0 * n as f64 / s as f64, n)
        }
    };
    Ok(k)
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    estimator: &'a str,
    n_used: usize,
    n_dropped: usize,
    gamma_hat: f64,
    k_hat: f64,
    s_hat: Option<usize>,
    stderr: f64,
}

fn cmd_estimate(
    input: &Path,
    estimator: &str,
    threshold: &str,
    cap: Option<usize>,
) -> Result<(), CliError> {
    let sample = load_sample(input, cap)?;
    let n = sample.len();
    let arg = parse_threshold(threshold)?;

    let insufficient = |e: EvtError| (EXIT_INSUFFICIENT, e.to_string());
    let estimate: TailEstimate = match (estimator, arg) {
        ("rbm", ThresholdArg::Auto) => {
            select_threshold(&rbm_path(&sample)).map_err(insufficient)?
        }
        ("rbm", arg) => {
            let s = requested_s(arg, n)?;
            let gamma = rbm_at(&sample, s).map_err(|e| (EXIT_BAD_SPEC, e.to_string()))?;
            TailEstimate::new(gamma, 2.0 * n as f64 / s as f64, Some(s))
        }
        ("hill", ThresholdArg::Auto) => {
            let sel = gh_threshold(&sample).map_err(insufficient)?;
            if sel.fallback {
                eprintln!(
                    "warning: bias diagnostic rejected every threshold; using largest admissible k"
                );
            }
            sel.estimate
        }
        ("hill", arg) => {
            let k = requested_k(arg, n)?;
            let gamma = hill(&sample, k).map_err(|e| (EXIT_BAD_SPEC, e.to_string()))?;
            TailEstimate::new(gamma, k as f64, None)
        }
        ("smoohill", ThresholdArg::Auto) => {
            // No published automatic rule exists for the smoothed Hill
            // estimator; reuse the bias-diagnostic threshold and average
            // above it.
            let sel = gh_threshold(&sample).map_err(insufficient)?;
            if sel.fallback {
                eprintln!(
                    "warning: bias diagnostic rejected every threshold; using largest admissible k"
                );
            }
            let k = sel.estimate.k_hat as usize;
            let gamma = smoohill(&sample, k).map_err(insufficient)?;
            TailEstimate::new(gamma, k as f64, None)
        }
        ("smoohill", arg) => {
            let k = requested_k(arg, n)?;
            let gamma = smoohill(&sample, k).map_err(|e| (EXIT_BAD_SPEC, e.to_string()))?;
            TailEstimate::new(gamma, k as f64, None)
        }
        (other, _) => {
            return Err((
                EXIT_BAD_SPEC,
                format!("unknown estimator `{other}` (expected rbm, hill, or smoohill)"),
            ))
        }
    };

    let out = EstimateOutput {
        estimator,
        n_used: sample.len(),
        n_dropped: sample.n_dropped(),
        gamma_hat: estimate.gamma_hat,
        k_hat: estimate.k_hat,
        s_hat: estimate.s_hat,
        stderr: estimate.stderr,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("output serializes")
    );
    Ok(())
}

fn cmd_path(
    input: &Path,
    estimators: &str,
    cap: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut with_hill = false;
    let mut with_smoohill = false;
    for name in estimators.split(',') {
        match name.trim() {
            "rbm" | "" => {}
            "hill" => with_hill = true,
            "smoohill" => with_smoohill = true,
            other => {
                return Err((
                    EXIT_BAD_SPEC,
                    format!("unknown estimator `{other}` in --estimators"),
                ))
            }
        }
    }

    let sample = load_sample(input, cap)?;
    let n = sample.len();
    let path = rbm_path(&sample);

    let mut csv = String::from("k,s,gamma_rbm");
    if with_hill {
        csv.push_str(",gamma_hill");
    }
    if with_smoohill {
        csv.push_str(",gamma_smoohill");
    }
    csv.push('\n');
    for p in &path.points {
        csv.push_str(&format!("{},{},{}", p.k, p.s, p.gamma_hat));
        let k_int = hill_grid_k(p.k, n);
        if with_hill {
            let h = hill(&sample, k_int).expect("k_int in range");
            csv.push_str(&format!(",{h}"));
        }
        if with_smoohill {
            // Undefined only where the averaging window above k is empty.
            match smoohill(&sample, k_int) {
                Ok(sh) => csv.push_str(&format!(",{sh}")),
                Err(_) => csv.push(','),
            }
        }
        csv.push('\n');
    }
    emit(&csv, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    spec: &str,
    n: usize,
    reps: usize,
    seed: u64,
    estimators: &str,
    cap: Option<usize>,
    workers: Option<usize>,
    format: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let distribution = Distribution::parse(spec).map_err(|e| (EXIT_BAD_SPEC, e.to_string()))?;
    let estimators: Vec<BenchEstimator> = estimators
        .split(',')
        .map(|s| BenchEstimator::parse(s.trim()).map_err(|e| (EXIT_BAD_SPEC, e.to_string())))
        .collect::<Result<_, _>>()?;
    let config = BenchConfig {
        distribution,
        sample_size: n,
        replications: reps,
        estimators,
        master_seed: seed,
        cap,
    };

    let rows = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| (1, e.to_string()))?;
            pool.install(|| run_benchmark(&config))
        }
        None => run_benchmark(&config),
    }
    .map_err(|e| (EXIT_BAD_SPEC, e.to_string()))?;

    let text = match format {
        "csv" => rows_to_csv(&rows),
        "json" => {
            let mut s = rows_to_json(&rows);
            s.push('\n');
            s
        }
        other => return Err((EXIT_BAD_SPEC, format!("unknown format `{other}`"))),
    };
    emit(&text, out)
}

fn cmd_process(rhos: &[f64], paths: usize, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    if rhos.iter().any(|&r| !(r < 0.0)) {
        return Err((
            EXIT_BAD_SPEC,
            "every --rho must be strictly negative".to_string(),
        ));
    }
    let rows = regret_study(rhos, paths, seed).map_err(|e| (EXIT_BAD_SPEC, e.to_string()))?;
    emit(&regret_rows_to_csv(&rows), out)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
