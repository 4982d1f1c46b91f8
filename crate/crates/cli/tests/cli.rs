use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
[fleet]
devices = 12

[[jobs]]
demand = { compute = 0.5, memory = 128.0, bandwidth = 2.0 }
fraction_Cm = 0.25
max_rounds_Rm = 4
local_epochs_tau = 1

[[jobs]]
demand = { compute = 0.5, memory = 128.0, bandwidth = 2.0 }
fraction_Cm = 0.25
max_rounds_Rm = 3
local_epochs_tau = 1
target_accuracy = 0.3

[workload]
samples = 600
features = 4
classes = 3
"#;

fn fedact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedact"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn all_schedulers_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let run = fedact(&["--config", &cfg, "--scheduler", "all", "--seeds", "1,2", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let rounds = fs::read_to_string(out.join("rounds.csv")).unwrap();
    let mut lines = rounds.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheduler,seed,job_id,round,selected_count,round_duration_s,cumulative_time_s,loss,accuracy"
    );
    // 5 schedulers x 2 seeds x (4 + 3) rounds.
    assert_eq!(lines.count(), 70);

    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("scheduler,seed,job_id,jct_s,time_to_target_s,final_accuracy,status\n"));
    assert_eq!(summary.lines().count(), 1 + 5 * 2 * 2);
    for row in summary.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[6], "ok", "{row}");
        if cols[2] == "0" {
            assert_eq!(cols[4], "NA");
        }
    }

    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    for name in ["fedact", "genetic", "greedy", "random", "sequential"] {
        assert!(report.contains(name), "{report}");
    }
    assert!(String::from_utf8_lossy(&run.stdout).contains("±"));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("surrogate");
    let run = fedact(&[
        "--config", &cfg, "--scheduler", "greedy", "--seeds", "7", "--workload", "surrogate", "--out", out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().skip(1).all(|l| l.starts_with("greedy,7,")));
}

#[test]
fn invalid_config_names_the_field_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("fraction_Cm = 0.25\nmax_rounds_Rm = 4", "fraction_Cm = 0.0\nmax_rounds_Rm = 4"));
    let run = fedact(&["--config", &cfg, "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("jobs[0].fraction_Cm"), "{err}");
}

#[test]
fn unknown_scheduler_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = fedact(&["--config", &cfg, "--scheduler", "fifo"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("fifo"));
}

#[test]
fn missing_config_file_fails() {
    let run = fedact(&["--config", "/nonexistent/fedact.toml"]);
    assert!(!run.status.success());
}
