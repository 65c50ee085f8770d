//! End-to-end checks of the command-line surface: exit codes, file
//! formats, and agreement with the closed forms.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_dfock")
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dfock-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn parse_csv_column(contents: &str, column: usize) -> Vec<f64> {
    contents
        .lines()
        .filter(|line| !line.starts_with('#'))
        .skip(1)
        .map(|line| line.split(',').nth(column).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn fig2_at_zero_alpha_is_a_point_mass() {
    let dir = workdir("fig2");
    let out = dir.join("fig2.csv");
    let output = run(&["figure", "fig2", "--alpha", "0", "--n", "6", "--out", out.to_str().unwrap()]);
    assert!(output.status.success());
    let contents = std::fs::read_to_string(&out).unwrap();
    let probs = parse_csv_column(&contents, 1);
    assert!((probs[1] - 1.0).abs() < 1e-14, "mass not at n = 1: {probs:?}");
    for (n, p) in probs.iter().enumerate() {
        if n != 1 {
            assert!(*p < 1e-14);
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fig2_large_alpha_sums_to_one_with_two_peaks() {
    let dir = workdir("fig2b");
    let out = dir.join("fig2.csv");
    assert!(run(&["figure", "fig2", "--alpha", "3", "--out", out.to_str().unwrap()])
        .status
        .success());
    let contents = std::fs::read_to_string(&out).unwrap();
    let probs = parse_csv_column(&contents, 1);
    let total: f64 = probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-8, "column sum {total}");
    let peaks = probs
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .count();
    assert_eq!(peaks, 2, "expected two interior maxima");
    assert!(contents.starts_with("# dfock figure fig2"));
    assert!(contents.contains("# tail_tolerance"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fig6_ratios_monotone_in_s() {
    let dir = workdir("fig6");
    let out = dir.join("fig6.csv");
    assert!(run(&[
        "figure", "fig6", "--delta", "1", "--kmax", "6", "--s", "0.05:1.5:20",
        "--out", out.to_str().unwrap()
    ])
    .status
    .success());
    let contents = std::fs::read_to_string(&out).unwrap();
    let first_ratio = parse_csv_column(&contents, 1);
    for pair in first_ratio.windows(2) {
        assert!(pair[0] > pair[1], "P₁/P₂ not decreasing in s: {pair:?}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gate_rejects_unnormalized_qubit_with_code_2() {
    let dir = workdir("badgate");
    let out = dir.join("report.json");
    let output = run(&["gate", "cz", "--a", "1", "--b", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists(), "no output file on validation failure");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn improbable_herald_exits_with_code_3() {
    // a photon count deep in the Poisson tail of the coherent mode pushes
    // the second herald below the underflow threshold
    let dir = workdir("improbable");
    let out = dir.join("report.json");
    let output = run(&[
        "gate", "hadamard-micro", "--a", "1", "--b", "0", "--s", "0.2", "--rbs", "0.3",
        "--n", "15", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(
        output.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unwritable_output_exits_with_code_1() {
    let output = run(&[
        "figure", "fig2", "--alpha", "1",
        "--out", "/nonexistent-dir/fig2.csv",
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn xform_identity_at_zero_alpha() {
    let dir = workdir("xform0");
    let state = dir.join("state.json");
    std::fs::write(&state, "[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]").unwrap();
    let out = dir.join("rep.csv");
    assert!(run(&[
        "xform", "--state", state.to_str().unwrap(), "--alpha", "0", "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let contents = std::fs::read_to_string(&out).unwrap();
    let probs = parse_csv_column(&contents, 3);
    assert!((probs[0] - 1.0).abs() < 1e-14);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn xform_vacuum_gives_poisson_weights() {
    let dir = workdir("xformp");
    let state = dir.join("state.json");
    std::fs::write(&state, "[[1.0, 0.0]]").unwrap();
    let out = dir.join("rep.csv");
    assert!(run(&[
        "xform", "--state", state.to_str().unwrap(), "--alpha", "0.9", "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let contents = std::fs::read_to_string(&out).unwrap();
    let probs = parse_csv_column(&contents, 3);
    let lambda = 0.81f64;
    let mut factorial = 1.0;
    for (n, p) in probs.iter().take(8).enumerate() {
        if n > 0 {
            factorial *= n as f64;
        }
        let expect = (-lambda).exp() * lambda.powi(n as i32) / factorial;
        assert!((p - expect).abs() < 1e-10, "Poisson weight at {n}: {p} vs {expect}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn xform_superposition_matches_closed_form() {
    // (|0⟩ + |1⟩)/√2 over the displaced basis equals the closed-form
    // amplitudes of the balanced superposition
    let dir = workdir("xformd");
    let state = dir.join("state.json");
    std::fs::write(&state, "[[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]").unwrap();
    let out = dir.join("rep.csv");
    assert!(run(&[
        "xform", "--state", state.to_str().unwrap(), "--alpha", "0.8", "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let contents = std::fs::read_to_string(&out).unwrap();
    let re = parse_csv_column(&contents, 1);
    let im = parse_csv_column(&contents, 2);
    for n in 0..re.len().min(20) {
        let closed = dfock_core::analytic::delta_amplitude(
            dfock_core::analytic::DeltaSign::Plus,
            num_complex::Complex64::new(0.8, 0.0),
            n,
        );
        assert!(
            (re[n] - closed.re).abs() < 1e-10 && (im[n] - closed.im).abs() < 1e-10,
            "closed-form mismatch at n={n}"
        );
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn xform_rejects_bad_norm_with_code_2() {
    let dir = workdir("badnorm");
    let state = dir.join("state.json");
    std::fs::write(&state, "[[1.0, 0.0], [1.0, 0.0]]").unwrap();
    let out = dir.join("rep.csv");
    let output = run(&[
        "xform", "--state", state.to_str().unwrap(), "--alpha", "0.5", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn xform_rejects_malformed_file_with_code_2() {
    let dir = workdir("badfile");
    let state = dir.join("state.json");
    std::fs::write(&state, "{\"not\": \"amplitudes\"}").unwrap();
    let out = dir.join("rep.csv");
    let output = run(&[
        "xform", "--state", state.to_str().unwrap(), "--alpha", "0.5", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cutoff_pad_env_var_changes_working_space() {
    let dir = workdir("envpad");
    let state = dir.join("state.json");
    std::fs::write(&state, "[[1.0, 0.0]]").unwrap();
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for (out, pad) in [(&out_a, "10"), (&out_b, "30")] {
        let status = Command::new(bin())
            .env("DFOCK_DEFAULT_CUTOFF_PAD", pad)
            .args([
                "xform", "--state", state.to_str().unwrap(), "--alpha", "0.5", "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let rows = |p: &PathBuf| std::fs::read_to_string(p).unwrap().lines().count();
    assert!(rows(&out_b) > rows(&out_a) + 15, "pad override did not widen the space");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cz_direct_trivial_branch_high_fidelity() {
    let dir = workdir("czd");
    let out = dir.join("report.json");
    assert!(run(&[
        "gate", "cz-direct", "--a", "1", "--b", "0", "--a1", "1", "--b1", "0",
        "--out", out.to_str().unwrap()
    ])
    .status
    .success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(parsed["fidelity"].as_f64().unwrap() >= 0.99);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fig4_tmsv_column_sums_within_tolerance() {
    let dir = workdir("fig4t");
    let out = dir.join("fig4.csv");
    assert!(run(&[
        "figure", "fig4-tmsv", "--delta", "1", "--r", "1.4", "--out", out.to_str().unwrap()
    ])
    .status
    .success());
    let contents = std::fs::read_to_string(&out).unwrap();
    let probs = parse_csv_column(&contents, 1);
    let total: f64 = probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-8, "column sum {total} at heavy squeezing");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gate_report_carries_circuit_and_scalars() {
    let dir = workdir("report");
    let out = dir.join("report.json");
    assert!(run(&["gate", "hadamard", "--out", out.to_str().unwrap()]).status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed["gate"], "hadamard");
    assert!(parsed["fidelity"].as_f64().unwrap() > 0.9);
    assert!(parsed["success_probability"].as_f64().unwrap() > 0.0);
    let circuit = parsed["circuit"].as_array().unwrap();
    assert_eq!(circuit.len(), 6);
    assert_eq!(circuit[0]["type"], "bs");
    assert_eq!(circuit[5]["type"], "measure_pnrd");
    // the serialized circuit is runnable as-is through the library
    let circuit_json = serde_json::to_string(&parsed["circuit"]).unwrap();
    let elements = dfock_core::circuit::circuit_from_json(&circuit_json).unwrap();
    assert_eq!(elements.len(), 6);
    std::fs::remove_dir_all(&dir).ok();
}
