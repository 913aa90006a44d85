use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use impatience::experiments::{ExperimentKind, Manifest};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_impatience"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> Output {
    let o = run(args, out);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

#[test]
fn solve_writes_a_normalised_pmf_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "solve", "--A", "10", "--rho", "0.4", "--grid", "40,40", "--tol", "1e-12",
        ],
        dir.path(),
    );

    let total: f64 = csv_rows(&dir.path().join("pmf.csv"))
        .iter()
        .map(|r| r[2].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);

    let manifest = Manifest::read(&dir.path().join("manifest.json")).unwrap();
    assert_eq!(manifest.spec.kind, ExperimentKind::Solve);
    assert_eq!(manifest.spec.tol, 1e-12);
    let p = manifest.spec.params.unwrap();
    assert_eq!((p.alpha(), p.beta()), (0.4, 10.0));
    assert_eq!(manifest.outputs, vec!["pmf.csv", "summary.json"]);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert!(summary["solve"]["residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("model.conf");
    fs::write(
        &cfg,
        "# rates\nalpha = 0.3\nbeta = 4\nmu = 1\nnu = 2\ntheta = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    ok(
        &["solve", "--config", cfg.to_str().unwrap(), "--A", "6"],
        &out,
    );
    let p = Manifest::read(&out.join("manifest.json"))
        .unwrap()
        .spec
        .params
        .unwrap();
    assert_eq!(
        (p.alpha(), p.beta(), p.nu(), p.theta()),
        (0.3, 3.0, 2.0, 0.5)
    );
}

#[test]
fn figure_data_contains_the_anchor_values_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["figure-data", "--rho", "0.5", "--steps", "30"];
    ok(&args, &a);
    ok(&args, &b);
    let first = fs::read(a.join("surface.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("surface.csv")).unwrap());

    let rows = csv_rows(&a.join("surface.csv"));
    let h_at = |x: &str, y: &str| -> f64 {
        rows.iter().find(|r| r[0] == x && r[1] == y).unwrap()[2]
            .parse()
            .unwrap()
    };
    assert!((h_at("0.0", "0.0") - 1.69).abs() < 0.01);
    assert!((h_at("3.0", "0.0") - 1.52).abs() < 0.01);
    assert!((h_at("0.0", "3.0") - 1.99).abs() < 0.01);
    assert!(h_at("1.0", "1.0").abs() < 1e-15);
}

#[test]
fn convergence_drops_axis_probes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(
        &[
            "convergence",
            "--a-list",
            "20,40",
            "--probe",
            "1,1",
            "--probe",
            "0,0",
        ],
        dir.path(),
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("excluded"));
    let rows = csv_rows(&dir.path().join("convergence.csv"));
    assert_eq!(rows.len(), 2);
    let gap = |r: &Vec<String>| (r[7].parse::<f64>().unwrap() - 1.0).abs();
    assert!(gap(&rows[1]) < gap(&rows[0]));
}

#[test]
fn simulate_is_reproducible_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = [
        "simulate",
        "--A",
        "5",
        "--t-end",
        "2000",
        "--burn-in",
        "50",
        "--replications",
        "2",
        "--seed",
        "9",
    ];
    ok(&args, &a);
    ok(&args, &b);
    assert_eq!(
        fs::read(a.join("empirical.csv")).unwrap(),
        fs::read(b.join("empirical.csv")).unwrap()
    );
    assert_eq!(
        Manifest::read(&a.join("manifest.json"))
            .unwrap()
            .spec
            .sim
            .unwrap()
            .seed,
        9
    );
}

#[test]
fn mobile_sweep_reports_the_empty_probability() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["mobile-sweep", "--rho", "0.4", "--rho-tot-list", "0.7,0.8"],
        dir.path(),
    );
    let rows = csv_rows(&dir.path().join("mobile_sweep.csv"));
    for r in &rows {
        let rho_tot: f64 = r[0].parse().unwrap();
        let empty: f64 = r[7].parse().unwrap();
        assert!((empty - (1.0 - rho_tot)).abs() < 1e-6);
    }
    assert!(rows[1][1].parse::<f64>().unwrap() > rows[0][1].parse::<f64>().unwrap());
}

#[test]
fn dominance_run_reports_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["dominance", "--A", "10", "--events", "20000"], dir.path());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("dominance.json")).unwrap())
            .unwrap();
    assert_eq!(report["violations"], 0);
    assert_eq!(report["events"], 20000);
}

#[test]
fn invalid_input_exits_non_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["solve", "--grid", "10"],
        vec!["solve", "--rho", "1.2"],
        vec!["mobile-sweep", "--rho-tot-list", "0.9,1.0"],
        vec!["asymptotics", "--point", "0,1"],
    ] {
        let o = run(&args, dir.path());
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}
