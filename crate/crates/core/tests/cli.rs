use std::path::Path;
use std::process::{Command, Output};

use progbar_sched::experiments::CSV_HEADER;
use progbar_sched::model::Instance;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_progbar-sched"))
        .args(args)
        .env_remove("PROGBAR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn instance_file(dir: &Path, name: &str, sizes: &[f64]) -> String {
    let path = dir.join(name);
    Instance::from_sizes(sizes.to_vec()).unwrap().save(&path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_round_robin_two_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance_file(dir.path(), "two_jobs.json", &[1.0, 2.0]);
    let o = bin(&["simulate", "--instance", &inst, "--policy", r#"{"variant":"RR"}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "C[0]=2\nC[1]=3\nALG=5\nOPT=4\nratio=1.25\n");
}

#[test]
fn simulate_dumps_events() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance_file(dir.path(), "two_jobs.json", &[1.0, 2.0]);
    let log = dir.path().join("events.tsv");
    let o = bin(&[
        "simulate",
        "--instance",
        &inst,
        "--policy",
        r#"{"variant":"SPT"}"#,
        "--dump-events",
        log.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&log).unwrap();
    let completes: Vec<&str> = text.lines().filter(|l| l.contains("\tcomplete\t")).collect();
    assert_eq!(completes.len(), 2, "{text}");

    let o = bin(&[
        "simulate",
        "--instance",
        &inst,
        "--policy",
        r#"{"variant":"SPT"}"#,
        "--dump-events",
        "-",
    ]);
    assert!(stdout(&o).contains("\tcomplete\t"));
}

#[test]
fn opt_three_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance_file(dir.path(), "three.json", &[1.0, 2.0, 3.0]);
    let o = bin(&["opt", "--instance", &inst]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "10\n");
}

#[test]
fn figure_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = bin(&[
        "figure",
        "--preset",
        "stochastic",
        "--out",
        out.to_str().unwrap(),
        "--n",
        "5",
        "--trials",
        "2",
        "--jobs",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("stochastic.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    // 10 granularities x 2 trials x 4 algorithms
    assert_eq!(lines.count(), 80);
}

#[test]
fn figure_out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_progbar-sched"))
        .args(["figure", "--preset", "smoothness_rho", "--n", "4", "--trials", "1"])
        .env("PROGBAR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("smoothness_rho.csv").exists());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance_file(dir.path(), "i.json", &[1.0, 2.0]);
    assert_eq!(bin(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(bin(&[]).status.code(), Some(2));
    let o = bin(&["simulate", "--instance", &inst, "--policy", "not json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"machines\": 1, \"levels\": [").unwrap();
    assert_eq!(
        bin(&["opt", "--instance", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["figure", "--preset", "nope"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        bin(&["opt", "--instance", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );

    // SPT on an instance marked non-clairvoyant.
    let path = dir.path().join("blind.json");
    let inst = Instance::from_sizes(vec![1.0, 2.0]).unwrap().with_clairvoyance(false);
    inst.save(&path).unwrap();
    let o = bin(&[
        "simulate",
        "--instance",
        path.to_str().unwrap(),
        "--policy",
        r#"{"variant":"SPT"}"#,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("clairvoyance"));
}

#[test]
fn verify_suite_passes() {
    let o = bin(&["verify", "--suite", "brittleness", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}
