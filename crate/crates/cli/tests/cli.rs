//! End-to-end checks of the binary: flag surface, report shapes, exit codes,
//! and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_agd-rc"))
}

fn run_ok(args: &[&str]) -> Value {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn run_raw(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn convert_forward_example() {
    let v = run_ok(&["convert", "--m", "1", "--L", "3"]);
    assert_eq!(v["schema"], "agd-rc/1");
    assert_eq!(v["mu"], 0.5);
    assert_eq!(v["lambda"], 1.5);

    let v = run_ok(&["convert", "--mu", "0.5", "--lambda", "1.5"]);
    assert!((v["m"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["L"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn certify_stable_point_all_routes() {
    let v = run_ok(&[
        "certify", "--family", "hb", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.59",
    ]);
    assert_eq!(v["agreement"], true);
    assert_eq!(v["theorem"]["stable"], true);
    assert_eq!(v["fdi_exact"]["stable"], true);
    assert_eq!(v["fdi_sampled"]["stable"], true);
    assert_eq!(v["lmi"]["found"], true);
    let max_eig = v["lmi"]["witness"]["max_eig_lhs"].as_f64().unwrap();
    assert!(max_eig <= -1e-10);
}

#[test]
fn certify_unstable_point_no_witness() {
    let v = run_ok(&[
        "certify", "--family", "hb", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.70",
    ]);
    assert_eq!(v["agreement"], true);
    assert_eq!(v["theorem"]["stable"], false);
    assert_eq!(v["fdi_exact"]["stable"], false);
    assert_eq!(v["lmi"]["found"], false);
}

#[test]
fn certify_threshold_sets_boundary_flag() {
    let v = run_ok(&[
        "certify", "--family", "hb", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.5942",
    ]);
    assert_eq!(v["boundary"], true);
}

#[test]
fn certify_invalid_constants_exits_2() {
    let out = run_raw(&[
        "certify", "--family", "hb", "--mu", "2.0", "--lambda", "0.6", "--alpha", "0.1", "--beta",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mu * lambda"));
}

#[test]
fn certify_zero_momentum_needs_general_family() {
    let out = run_raw(&[
        "certify", "--family", "hb", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1",
        "--beta", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_raw(&[
        "certify", "--family", "general", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1",
        "--beta", "0",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fdi_exact"]["stable"], true);
    assert!(v.get("theorem").is_none());
}

#[test]
fn certify_route_disagreement_exits_3() {
    // Known patch where the closed-form Nesterov branch disagrees with the
    // canonical frequency-domain verdict away from the boundary band.
    let out = run_raw(&[
        "certify", "--family", "nag", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.56",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["agreement"], false);
    assert_eq!(v["boundary"], false);
    assert_eq!(v["fdi_exact"]["stable"], true);
    assert_eq!(v["theorem"]["stable"], false);
}

#[test]
fn region_single_cell_matches_certify() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cell.csv");
    let out = run_raw(&[
        "region",
        "--family",
        "hb",
        "--mu",
        "0.5",
        "--lambda",
        "0.5",
        "--alpha",
        "0.1:0.1:0.1",
        "--beta",
        "0.59:0.59:0.1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "0.1");
    assert_eq!(fields[1], "0.59");
    assert_eq!(fields[2], "1");

    let v = run_ok(&[
        "certify", "--family", "hb", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.59",
    ]);
    let margin: f64 = fields[3].parse().unwrap();
    assert_eq!(margin, v["fdi_exact"]["margin"].as_f64().unwrap());
}

#[test]
fn region_sweep_writes_one_file_per_value_and_counts_grow() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = run_raw(&[
        "region",
        "--family",
        "hb",
        "--mu",
        "0.1,0.5,1.0,1.5",
        "--lambda",
        "0.5",
        "--alpha",
        "0.02:3:0.1",
        "--beta",
        "0.02:0.98:0.04",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let stable_count = |path: &Path| -> usize {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .filter(|l| l.split(',').nth(2) == Some("1"))
            .count()
    };
    let counts: Vec<usize> = ["0.1", "0.5", "1", "1.5"]
        .iter()
        .map(|mu| stable_count(&dir.path().join(format!("sweep_mu{mu}_lambda0.5.csv"))))
        .collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
}

#[test]
fn region_svg_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    let svg1 = dir.path().join("a.svg");
    let svg2 = dir.path().join("b.svg");
    for (csv, svg) in [(&csv1, &svg1), (&csv2, &svg2)] {
        let out = run_raw(&[
            "region",
            "--family",
            "nag",
            "--mu",
            "0.5",
            "--lambda",
            "0.5",
            "--alpha",
            "0.05:1:0.05",
            "--beta",
            "0.05:0.95:0.05",
            "--csv",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&csv1).unwrap(), std::fs::read(&csv2).unwrap());
    assert_eq!(std::fs::read(&svg1).unwrap(), std::fs::read(&svg2).unwrap());
    assert!(String::from_utf8(std::fs::read(&svg1).unwrap())
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn region_unwritable_path_exits_2() {
    let out = run_raw(&[
        "region",
        "--family",
        "hb",
        "--mu",
        "0.5",
        "--lambda",
        "0.5",
        "--alpha",
        "0.1:0.2:0.1",
        "--beta",
        "0.1:0.2:0.1",
        "--csv",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rate_reports_certificate_and_radius() {
    let v = run_ok(&[
        "rate", "--family", "hb", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.5", "--tol", "1e-3", "--eps", "10",
    ]);
    assert_eq!(v["certified"], true);
    let rho = v["rho"].as_f64().unwrap();
    assert!(rho > 0.0 && rho < 1.0);
    let cond = v["witness"]["cond_p"].as_f64().unwrap();
    let radius = v["safe_init_radius"].as_f64().unwrap();
    assert!((radius - 10.0 / (10.0 * cond).sqrt()).abs() < 1e-9);

    let v = run_ok(&[
        "rate", "--family", "hb", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.7",
    ]);
    assert_eq!(v["certified"], false);
}

#[test]
fn simulate_writes_traces_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let v = run_ok(&[
        "simulate",
        "--benchmark",
        "44",
        "--init",
        "24",
        "--alpha",
        "0.1",
        "--hb-beta",
        "0.59",
        "--nag-beta",
        "0.69",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    let iters: Vec<u64> = runs
        .iter()
        .map(|r| r["iterations"].as_u64().unwrap())
        .collect();
    // gd, hb, nag in plan order; both accelerated methods beat plain descent.
    assert!(iters[1] < iters[0] && iters[2] < iters[0], "{iters:?}");
    for name in ["trace_gd.csv", "trace_hb.csv", "trace_nag.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("k,z,dist,f\n"));
        assert!(text.lines().count() > 10);
    }
}

#[test]
fn verify_rc_benchmark_passes() {
    let v = run_ok(&[
        "verify-rc",
        "--benchmark",
        "44",
        "--mu",
        "0.5",
        "--lambda",
        "0.5",
        "--range",
        "-50:50",
        "--n",
        "2001",
    ]);
    assert_eq!(v["pass"], true);
    assert!(v["min_slack"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["checked"], 2001);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let capped = dir.path().join("capped.csv");
    let free = dir.path().join("free.csv");
    let out = bin()
        .env("AGD_RC_THREADS", "1")
        .args([
            "region",
            "--family",
            "hb",
            "--mu",
            "0.5",
            "--lambda",
            "0.5",
            "--alpha",
            "0.05:1:0.05",
            "--beta",
            "0.05:0.95:0.05",
            "--csv",
        ])
        .arg(&capped)
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = run_raw(&[
        "region",
        "--family",
        "hb",
        "--mu",
        "0.5",
        "--lambda",
        "0.5",
        "--alpha",
        "0.05:1:0.05",
        "--beta",
        "0.05:0.95:0.05",
        "--csv",
        free.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&capped).unwrap(),
        std::fs::read(&free).unwrap()
    );
}

#[test]
fn certify_output_is_deterministic() {
    let a = run_raw(&[
        "certify", "--family", "nag", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.69",
    ]);
    let b = run_raw(&[
        "certify", "--family", "nag", "--mu", "0.5", "--lambda", "0.5", "--alpha", "0.1", "--beta",
        "0.69",
    ]);
    assert_eq!(a.stdout, b.stdout);
}
