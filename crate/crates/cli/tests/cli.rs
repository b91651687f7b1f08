use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anyon-walk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out-dir", out]);
    run(&full)
}

/// Data rows of a CSV artifact, skipping the header comment and column line.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn body(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn closed_form_distribution_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["simulate", "--mode", "closed-form", "--level", "2", "--steps", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dist = rows(&dir.path().join("dist_t4.csv"));
    let centre = dist.iter().find(|r| r[1] == "0").unwrap();
    assert_eq!(centre[2], "0.375");
    let variance = rows(&dir.path().join("variance.csv"));
    assert_eq!(variance.last().unwrap(), &vec!["4".to_owned(), "4".to_owned(), "16".to_owned()]);
}

#[test]
fn exact_ising_variance_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["simulate", "--mode", "exact", "--level", "2", "--steps", "50", "--origin", "7"]);
    assert!(out.status.success());
    let path = dir.path().join("variance.csv");
    let text = fs::read_to_string(&path).unwrap();
    let header = text.lines().next().unwrap().strip_prefix("# ").unwrap();
    let json: serde_json::Value = serde_json::from_str(header).unwrap();
    assert_eq!(json["config"]["level"], "2");
    assert_eq!(json["config"]["mode"], "exact");
    assert!(json["version"].is_string());
    assert_eq!(text.lines().nth(1).unwrap(), "t,sigma2_scaled,sigma2_raw");
    let last = rows(&path).pop().unwrap();
    // Raw variance equals the number of walk steps, 2t.
    assert_eq!(num(&last[0]), 50.0);
    assert!((num(&last[2]) - 100.0).abs() < 1e-8);
    assert!((num(&last[1]) - 25.0).abs() < 1e-8);
    let dist = rows(&dir.path().join("dist_t50.csv"));
    let total: f64 = dist.iter().map(|r| num(&r[2])).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(dist.iter().any(|r| r[0] == "7" && r[1] == "0"));
}

#[test]
fn emitted_distributions_cover_every_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let all = dir.path().join("all.csv");
    let out = run_in(
        dir.path(),
        &["simulate", "--mode", "circulant", "--level", "3", "--steps", "5", "--emit-distributions", all.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&all).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "t,s,shat,p");
    let ts: std::collections::BTreeSet<String> = rows(&all).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(ts.len(), 6);
}

#[test]
fn disorder_runs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["simulate", "--mode", "disorder", "--steps", "12", "--seeds", "3", "--seed", "5", "--phase", "1.0"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    for file in ["variance.csv", "dist_t12.csv", "variance_seeds.csv"] {
        assert_eq!(body(&a.path().join(file)), body(&b.path().join(file)), "{file}");
    }
    let seeds: std::collections::BTreeSet<String> =
        rows(&a.path().join("variance_seeds.csv")).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(seeds.into_iter().collect::<Vec<_>>(), vec!["5", "6", "7"]);
}

#[test]
fn reference_modes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["simulate", "--mode", "rw", "--steps", "10"]).status.success());
    let last = rows(&dir.path().join("variance.csv")).pop().unwrap();
    assert!((num(&last[2]) - 20.0).abs() < 1e-9);
    assert!(run_in(dir.path(), &["simulate", "--mode", "qw", "--steps", "10"]).status.success());
}

#[test]
fn sweep_orders_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["sweep", "--levels", "1,2,inf", "--steps", "100"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&dir.path().join("sweep.csv"));
    let final_raw = |level: &str| num(&table.iter().filter(|r| r[0] == level).last().unwrap()[3]);
    assert!(final_raw("1") > 10.0 * final_raw("2"));
    assert!(final_raw("inf") > final_raw("2"));
    for level in ["1", "2", "inf"] {
        assert!(dir.path().join(format!("variance_k{level}.csv")).exists());
    }
}

#[test]
fn fit_reads_written_variance() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["simulate", "--mode", "exact", "--level", "1", "--steps", "100"]).status.success());
    let input = dir.path().join("variance.csv");
    let out = run(&["fit", "--input", input.to_str().unwrap(), "--window", "2:200", "--x", "tau", "--y", "sigma2_raw"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((json["K2"].as_f64().unwrap() - 0.125).abs() < 1e-6);
    assert!((json["K3"].as_f64().unwrap() - 0.75).abs() < 1e-4);
    assert!(json["residual"].is_number());
    let out = run(&["fit", "--input", input.to_str().unwrap(), "--with-offset"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["K0"].is_number());
    let out = run(&["fit", "--input", input.to_str().unwrap(), "--window", "3:4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_table_passes() {
    let out = run(&["verify-table", "--levels", "1,2,3,4,5,10"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1 + 6 * 8 * 13);
}

#[test]
fn dump_moments_json() {
    let out = run(&["dump-moments", "--level", "2"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["level"], "2");
    let f1 = json["moments"].as_array().unwrap().iter().find(|m| m["family"] == "F1" && m["delta"] == 0).unwrap();
    assert_eq!(f1["value"]["re"], 1.0);
    assert!((json["kappa1"].as_f64().unwrap() - 0.125).abs() < 1e-12);
}

#[test]
fn invalid_configurations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["simulate", "--mode", "exact", "--steps", "5"],
        &["simulate", "--mode", "exact", "--level", "0", "--steps", "5"],
        &["simulate", "--mode", "exact", "--level", "2", "--steps", "5", "--ring", "10"],
        &["simulate", "--mode", "disorder", "--steps", "5", "--fill-p", "2"],
        &["simulate", "--mode", "closed-form", "--level", "3", "--steps", "5"],
        &["sweep", "--levels", "", "--steps", "5"],
    ];
    for args in cases {
        assert_eq!(run_in(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(run(&["sweep", "--steps", "5"]).status.code(), Some(2));
}
