//! Black-box tests of the `teachopt` binary: output shapes, exit codes and
//! artifact determinism.

use std::path::Path;
use std::process::{Command, Output};

fn teachopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teachopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn evaluate_expert_prints_objectives() {
    let out = teachopt(&["evaluate", "--expert", "--quiet"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("f1 (total mass)   = 63.331400 kg"), "{text}");
    assert!(text.contains("feasible:"), "{text}");
}

#[test]
fn evaluate_reads_design_file_and_writes_profile() {
    let tmp = tempfile::tempdir().unwrap();
    let design = tmp.path().join("design.cfg");
    std::fs::write(
        &design,
        "mA = 1.6\nmB = 25\nLA = 0.185\nLB = 0.462\nk = 3730\nHb = 0.15\n\
         T1 = 75.7\nT2 = 75.7\nT3 = 75.7\n",
    )
    .unwrap();
    let csv = tmp.path().join("profile.csv");
    let out = teachopt(&[
        "evaluate", "--quiet",
        "--design", design.to_str().unwrap(),
        "--profile-csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let profile = std::fs::read_to_string(&csv).unwrap();
    assert!(profile.starts_with("t,Fc,"), "{profile}");
    // 501 samples plus header.
    assert_eq!(profile.lines().count(), 502);
}

#[test]
fn malformed_design_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let design = tmp.path().join("bad.cfg");
    std::fs::write(&design, "mA = 1.6\nwat = 5\n").unwrap();
    let out = teachopt(&["evaluate", "--quiet", "--design", design.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "[run]\npopulation = 40\n").unwrap();
    let out = teachopt(&["--config", cfg.to_str().unwrap(), "evaluate", "--expert"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gap_warnings_on_stderr_unless_quiet() {
    let out = teachopt(&["check-trajectory"]);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("WARNING: L5"), "{err}");
    assert!(err.contains("WARNING: trajectory parameter range"), "{err}");
    let out = teachopt(&["check-trajectory", "--quiet"]);
    assert!(out.stderr.is_empty());
}

#[test]
fn check_trajectory_reports_all_samples() {
    let out = teachopt(&["check-trajectory", "--quiet"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("samples evaluated: 501"), "{text}");
    assert!(text.contains("all samples reachable"), "{text}");
}

fn optimize_into(dir: &Path, seed: &str) {
    let out = teachopt(&[
        "optimize", "--quiet", "--seed", seed, "--pop", "40", "--gens", "40",
        "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
}

#[test]
fn optimize_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    optimize_into(&a, "21");
    optimize_into(&b, "21");
    optimize_into(&c, "22");
    let read = |d: &Path| std::fs::read(d.join("final_front.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn optimize_thread_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let dir = tmp.path().join(threads);
        let out = Command::new(env!("CARGO_BIN_EXE_teachopt"))
            .env("TEACHOPT_THREADS", threads)
            .args([
                "optimize", "--quiet", "--seed", "5", "--pop", "40", "--gens", "30",
                "--out", dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(std::fs::read(dir.join("final_front.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn resume_rejects_mismatched_config() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    optimize_into(&dir, "21");
    // Same archive, different seed: the config hash must not match.
    let out = teachopt(&[
        "optimize", "--quiet", "--seed", "99", "--pop", "40", "--gens", "80",
        "--resume", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn innovize_round_trips_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let out = teachopt(&[
        "optimize", "--quiet", "--seed", "8", "--pop", "60", "--gens", "120",
        "--out", run.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut reports = Vec::new();
    for name in ["r1", "r2"] {
        let rules = tmp.path().join(name);
        let out = teachopt(&[
            "innovize", run.to_str().unwrap(), "--quiet", "--out", rules.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(rules.join("report.txt").exists());
        assert!(rules.join("scatter_f2_vs_f1.csv").exists());
        reports.push(std::fs::read(rules.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn innovize_needs_a_big_enough_front() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("tiny");
    // A 4-member population cannot produce the 10-member front rule mining
    // requires.
    let out = teachopt(&[
        "optimize", "--quiet", "--seed", "1", "--pop", "4", "--gens", "5",
        "--out", run.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = teachopt(&[
        "innovize", run.to_str().unwrap(), "--quiet",
        "--out", tmp.path().join("rules").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn innovize_missing_archive_is_a_config_error() {
    let out = teachopt(&["innovize", "/nonexistent/archive", "--quiet"]);
    assert_eq!(out.status.code(), Some(2));
}
