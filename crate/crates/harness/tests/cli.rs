//! End-to-end checks of the `owsg-wb` binary: output bytes, exit codes,
//! config-file precedence.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_owsg-wb"))
}

#[test]
fn repeated_runs_are_byte_identical_without_timing() {
    let run = || {
        bin()
            .args(["--seed", "42", "--no-timing", "check", "fvdg", "--pairs", "200"])
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let body = String::from_utf8(first.stdout).unwrap();
    assert!(body.starts_with("experiment,param_json,metric,value,reference,comparator,pass,ms"));
    assert!(body.lines().skip(1).all(|l| l.ends_with(",true,-")));
}

#[test]
fn exit_codes_follow_outcomes() {
    let ok = bin()
        .args(["check", "twirl", "--samples", "5"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let fail = bin().arg("planted-negative").output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let usage = bin().arg("frobnicate").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let suite_fail = bin()
        .args(["suite", "--only", "check-twirl,planted-negative", "--samples", "3"])
        .output()
        .unwrap();
    assert_eq!(suite_fail.status.code(), Some(1));
}

#[test]
fn out_file_and_json_mirror() {
    let dir = std::env::temp_dir().join(format!("owsgwb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.csv");
    let status = bin()
        .args([
            "--seed",
            "7",
            "--no-timing",
            "--json",
            "--out",
            out.to_str().unwrap(),
            "qpotp",
            "wrong-msg",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("wrong_message_lhs"));
    let json = std::fs::read_to_string(out.with_extension("csv.json")).unwrap();
    assert!(json.contains("\"metric\":\"wrong_message_lhs\""));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_supplies_defaults_and_cli_overrides() {
    let dir = std::env::temp_dir().join(format!("owsgwb-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("wb.conf");
    std::fs::write(&cfg, "seed = 5\npairs = 50\nno-timing = true\n").unwrap();
    let from_file = bin()
        .args(["--config", cfg.to_str().unwrap(), "check", "fvdg"])
        .output()
        .unwrap();
    let body = String::from_utf8(from_file.stdout).unwrap();
    assert!(body.contains("\"\"seed\"\":5"));
    assert!(body.contains("\"\"pairs\"\":50"));
    // CLI flag wins over the file.
    let overridden = bin()
        .args(["--config", cfg.to_str().unwrap(), "check", "fvdg", "--pairs", "20"])
        .output()
        .unwrap();
    let body = String::from_utf8(overridden.stdout).unwrap();
    assert!(body.contains("\"\"pairs\"\":20"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn amplify_row_schema_carries_budget_and_abort_rate() {
    let output = bin()
        .args([
            "--no-timing",
            "--scale-loops",
            "0.02",
            "amplify",
            "--trials",
            "100",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let body = String::from_utf8(output.stdout).unwrap();
    assert!(body.contains("t_prime"));
    assert!(body.contains("abort_rate"));
    assert!(body.contains("scale_loops"));
}
