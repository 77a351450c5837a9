//! Acceptance: repeated `bench` invocations with identical seeds must
//! produce byte-identical CSV under 1, 4, and 16 workers.

use std::process::Command;

fn run_bench(workers: usize) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_rbm"))
        .args([
            "bench",
            "frechet:2",
            "--n",
            "80",
            "--reps",
            "48",
            "--seed",
            "1729",
            "--workers",
            &workers.to_string(),
        ])
        .output()
        .expect("bench runs");
    assert!(out.status.success(), "exit {:?}", out.status);
    out.stdout
}

#[test]
fn acceptance_11_bench_determinism_across_workers() {
    let one = run_bench(1);
    let again = run_bench(1);
    assert_eq!(one, again, "same worker count, different bytes");
    for workers in [4usize, 16] {
        let other = run_bench(workers);
        assert_eq!(
            one, other,
            "output differs between 1 and {workers} workers"
        );
    }
    assert!(one.starts_with(b"distribution,estimator,rmse"));
    println!("ACCEPTANCE 11 bench determinism: PASS (byte-identical CSV at 1, 4, 16 workers)");
}
