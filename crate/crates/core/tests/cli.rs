//! End-to-end runs of the `arbirg` binary: outputs on disk and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
name = "cli-smoke"
replications = 3
master_seed = 4
checkpoints = 12
record_wall_clock = false

[problem]
kind = "l1_box"
seed = 2

[budget]
full_map_equivalents = 400

[gap]
n_samples = 100
n_restarts = 2
ascent_iters = 20

[[cells]]
gamma0 = 1.0
eta0 = 1.0

[[solvers]]
kind = "arbirg"
b = 0.25

[[solvers]]
kind = "sr"
regularizer = "identity"
"#;

fn arbirg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arbirg")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("smoke.toml");
    fs::write(&path, CONFIG).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_compare_and_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();

    let run = arbirg(&["run", &cfg, "--out", out_s, "--svg"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["config.toml", "runs.csv", "settings.csv", "aggregate.csv", "svg/g1-e1_accuracy.svg"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let runs = fs::read_dir(out.join("runs")).unwrap().count();
    assert_eq!(runs, 6);
    let header = fs::read_to_string(out.join("runs/arbirg-r0__g1-e1__rep000.csv")).unwrap();
    assert!(header.starts_with(
        "solver,cell,replication,k,evals_full_map_equiv,wall_ms,f_value,gap_estimate,natural_residual,dist_to_xstar"
    ));

    let cmp = arbirg(&["compare", out_s]);
    let table = String::from_utf8(cmp.stdout).unwrap();
    assert!(table.starts_with("cell,solver,baseline"));
    let dominates = table.lines().nth(1).unwrap().contains(",true,");
    assert_eq!(cmp.status.code(), Some(if dominates { 0 } else { 1 }));
    assert!(out.join("compare.csv").exists());

    let bounds = arbirg(&["bounds", out_s, &cfg]);
    assert_eq!(bounds.status.code(), Some(0), "{}", String::from_utf8_lossy(&bounds.stderr));
    let table = String::from_utf8(bounds.stdout).unwrap();
    assert!(table.lines().count() > 5);
    assert!(!table.contains(",true,"));
}

#[test]
fn diag_passes_with_a_small_budget() {
    let d = arbirg(&["diag", "--points", "3", "--draws", "20000"]);
    assert_eq!(d.status.code(), Some(0), "{}", String::from_utf8_lossy(&d.stdout));
    assert_eq!(String::from_utf8(d.stdout).unwrap().lines().count(), 5);
}

#[test]
fn faults_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, CONFIG.replace("replications = 3", "replications = 0")).unwrap();
    assert_eq!(arbirg(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(arbirg(&["compare", tmp.path().join("nowhere").to_str().unwrap()]).status.code(), Some(2));
}
