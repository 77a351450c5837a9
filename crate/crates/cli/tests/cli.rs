//! End-to-end tests of the command-line surface: output contracts and
//! exit codes (0 success, 2 input error, 3 insufficient data, 4 bad spec).

use std::io::Write;
use std::process::{Command, Output};

fn rbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("rbm-cli-test-{name}-{}", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

#[test]
fn estimate_two_point_explicit_threshold() {
    let file = write_temp("two", "1.0\n2.718281828459045\n");
    let out = rbm(&[
        "estimate",
        "--input",
        file.to_str().unwrap(),
        "--threshold",
        "s:2",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["estimator"], "rbm");
    assert_eq!(v["n_used"], 2);
    assert_eq!(v["n_dropped"], 0);
    assert!((v["gamma_hat"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["k_hat"], 2.0);
    assert_eq!(v["s_hat"], 2);
    std::fs::remove_file(file).ok();
}

#[test]
fn estimate_auto_on_seeded_frechet_file() {
    // 500 Frechet(2) points via the library sampler; truth gamma = 0.5.
    let draws = {
        use rbm_core::dist::Distribution;
        Distribution::parse("frechet:2").unwrap().sample(500, 99).unwrap()
    };
    let text: String = draws.iter().map(|x| format!("{x}\n")).collect();
    let file = write_temp("frechet", &text);
    let out = rbm(&["estimate", "--input", file.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let gamma = v["gamma_hat"].as_f64().unwrap();
    assert!((0.3..=0.7).contains(&gamma), "gamma_hat = {gamma}");
    assert!(v["stderr"].as_f64().unwrap() > 0.0);

    // Byte-identical on repeat.
    let again = rbm(&["estimate", "--input", file.to_str().unwrap()]);
    assert_eq!(out.stdout, again.stdout);
    std::fs::remove_file(file).ok();
}

#[test]
fn estimate_hill_and_smoohill_run() {
    let draws = {
        use rbm_core::dist::Distribution;
        Distribution::parse("pareto:0.5").unwrap().sample(300, 3).unwrap()
    };
    let text: String = draws.iter().map(|x| format!("{x}\n")).collect();
    let file = write_temp("pareto", &text);
    for est in ["hill", "smoohill"] {
        let out = rbm(&[
            "estimate",
            "--input",
            file.to_str().unwrap(),
            "--estimator",
            est,
        ]);
        assert!(out.status.success(), "{est} failed");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["estimator"], est);
        assert!(v["s_hat"].is_null());
        let gamma = v["gamma_hat"].as_f64().unwrap();
        assert!((0.2..=0.9).contains(&gamma), "{est} gamma {gamma}");
    }
    // Explicit k form.
    let out = rbm(&[
        "estimate",
        "--input",
        file.to_str().unwrap(),
        "--estimator",
        "hill",
        "--threshold",
        "k:50",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k_hat"], 50.0);
    std::fs::remove_file(file).ok();
}

#[test]
fn estimate_error_exit_codes() {
    let out = rbm(&["estimate", "--input", "/definitely/not/here.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());

    let bad = write_temp("bad", "1.0\nnot-a-number\n2.0\n");
    let out = rbm(&["estimate", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    std::fs::remove_file(bad).ok();

    let neg = write_temp("neg", "-1.0\n-2.0\n");
    let out = rbm(&["estimate", "--input", neg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_file(neg).ok();

    let two = write_temp("two-b", "1.0\n2.0\n");
    let out = rbm(&[
        "estimate",
        "--input",
        two.to_str().unwrap(),
        "--threshold",
        "s:99",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let out = rbm(&[
        "estimate",
        "--input",
        two.to_str().unwrap(),
        "--estimator",
        "nope",
    ]);
    assert_eq!(out.status.code(), Some(4));
    std::fs::remove_file(two).ok();
}

#[test]
fn bare_cap_flag_defaults_to_2000() {
    let draws = {
        use rbm_core::dist::Distribution;
        Distribution::parse("pareto:0.5").unwrap().sample(2100, 11).unwrap()
    };
    let text: String = draws.iter().map(|x| format!("{x}\n")).collect();
    let file = write_temp("capped", &text);
    let out = rbm(&[
        "estimate",
        "--input",
        file.to_str().unwrap(),
        "--cap",
        "--threshold",
        "s:100",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_used"], 2000);
    assert_eq!(v["n_dropped"], 100);
    std::fs::remove_file(file).ok();
}

#[test]
fn path_three_point_file() {
    let file = write_temp("three", "1\n2.718281828459045\n7.38905609893065\n");
    let out = rbm(&["path", "--input", file.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,s,gamma_rbm");
    assert_eq!(lines.len(), 3);
    let row1: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row1[0], "2");
    assert_eq!(row1[1], "3");
    assert!((row1[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    let row2: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row2[0], "3");
    assert!((row2[2].parse::<f64>().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    std::fs::remove_file(file).ok();
}

#[test]
fn path_constant_data_and_columns() {
    let file = write_temp("const", "5.0\n5.0\n5.0\n5.0\n5.0\n5.0\n");
    let out = rbm(&[
        "path",
        "--input",
        file.to_str().unwrap(),
        "--estimators",
        "rbm,hill,smoohill",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,s,gamma_rbm,gamma_hill,gamma_smoohill");
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(cols[3].parse::<f64>().unwrap(), 0.0);
        // smoohill column may be blank on the last grid point only.
        if !cols[4].is_empty() {
            assert_eq!(cols[4].parse::<f64>().unwrap(), 0.0);
        }
    }
    std::fs::remove_file(file).ok();
}

#[test]
fn bench_json_and_out_file() {
    let out = rbm(&[
        "bench", "pareto:1", "--n", "60", "--reps", "10", "--seed", "5", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["replications"], 10);

    let target = std::env::temp_dir().join(format!("rbm-bench-out-{}", std::process::id()));
    let out = rbm(&[
        "bench",
        "pareto:1",
        "--n",
        "60",
        "--reps",
        "10",
        "--seed",
        "5",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "--out must silence stdout");
    let written = std::fs::read_to_string(&target).unwrap();
    assert!(written.starts_with("distribution,estimator,"));
    std::fs::remove_file(target).ok();
}

#[test]
fn bench_frechet_desk_scale_reproduces_error_level() {
    let out = rbm(&[
        "bench", "frechet:2", "--n", "200", "--reps", "1000", "--seed", "7",
        "--estimators", "rbm",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let rmse: f64 = row[2].parse().unwrap();
    assert!(
        (rmse - 0.116).abs() <= 0.012,
        "rbm rmse {rmse} outside 0.116 +/- 0.012"
    );
}

#[test]
fn bench_bad_spec_exits_4() {
    let out = rbm(&["bench", "burr:1", "--n", "100", "--reps", "5"]);
    assert_eq!(out.status.code(), Some(4));
    let out = rbm(&["bench", "frechet:2", "--n", "100", "--reps", "5", "--estimators", "dk"]);
    assert_eq!(out.status.code(), Some(4));
    let out = rbm(&["bench", "frechet:2", "--n", "100", "--reps", "5", "--format", "xml"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn process_study_csv_and_validation() {
    let out = rbm(&[
        "process", "--rho", "-1", "--paths", "400", "--seed", "7",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "rho,gamma,tau_star,q05,q50,q95,mean_relative_regret,n_paths,seed"
    );
    assert_eq!(lines.len(), 2);
    let cols: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cols[0], -1.0);
    assert_eq!(cols[1], 0.5);
    assert!(cols[2].is_finite());

    let out = rbm(&["process", "--rho", "0.5", "--paths", "10"]);
    assert_eq!(out.status.code(), Some(4));
}
