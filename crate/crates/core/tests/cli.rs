use std::path::Path;
use std::process::{Command, Output};

use satnls::io::{parse_config, read_snapshot};

fn satnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satnls"))
        .args(args)
        .output()
        .expect("satnls binary runs")
}

fn code(out: &Output) -> Option<i32> {
    out.status.code()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn stability_verdicts() {
    let stable = satnls(&["stability", "0.001", "30", "512"]);
    assert_eq!(code(&stable), Some(0));
    assert!(String::from_utf8_lossy(&stable.stdout).contains("verdict: stable"));

    let unstable = satnls(&["stability", "0.004", "30", "512", "--sweep", "8"]);
    assert_eq!(code(&unstable), Some(3));
    assert!(String::from_utf8_lossy(&unstable.stdout).contains("verdict: unstable"));
}

#[test]
fn conservation_checks() {
    assert_eq!(code(&satnls(&["conserve", "splitstep"])), Some(0));
    assert_eq!(code(&satnls(&["conserve", "fd"])), Some(0));
    assert_eq!(code(&satnls(&["conserve", "fd", "--tau", "0.01"])), Some(2));
}

#[test]
fn simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let result = satnls(&["simulate", "--preset", "fig2", "--out", path_str(&out)]);
    assert_eq!(
        code(&result),
        Some(0),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );

    let evolution = std::fs::read_to_string(out.join("evolution.csv")).unwrap();
    let mut lines = evolution.lines();
    assert_eq!(
        lines.next(),
        Some("# satnls-evolution v1 rows=100 cols=512 L=64 tau=0.01")
    );
    assert_eq!(lines.count(), 100);

    let diagnostics = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(diagnostics.lines().count(), 102);

    let last = read_snapshot(out.join("final.snapshot")).unwrap();
    assert_eq!(last.grid().points(), 512);
    assert!((last.time() - 1.0).abs() < 1e-12);

    let manifest = std::fs::read_to_string(out.join("manifest")).unwrap();
    assert!(manifest.starts_with("# satnls-manifest v1\n"));
    assert!(manifest.contains("\n# steps=100\n"));
    assert!(manifest.ends_with("# preflight=not-applicable\n"));
}

#[test]
fn manifest_config_round_trips_through_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let result = satnls(&[
        "simulate",
        "--preset",
        "fig4",
        "--T",
        "0.05",
        "--out",
        path_str(&first),
    ]);
    assert_eq!(code(&result), Some(0));

    let manifest = std::fs::read_to_string(first.join("manifest")).unwrap();
    let config_path = dir.path().join("again.cfg");
    std::fs::write(&config_path, manifest).unwrap();
    let config = parse_config(&config_path).unwrap();
    assert_eq!(config.steps(), 5);

    let second = dir.path().join("second");
    let rerun = satnls(&[
        "simulate",
        "--config",
        path_str(&config_path),
        "--out",
        path_str(&second),
    ]);
    assert_eq!(code(&rerun), Some(0));
    assert_eq!(
        std::fs::read(first.join("evolution.csv")).unwrap(),
        std::fs::read(second.join("evolution.csv")).unwrap()
    );
}

#[test]
fn fd_preflight_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fd");
    let result = satnls(&[
        "simulate",
        "--preset",
        "fig1",
        "--T",
        "0.01",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&result), Some(0));
    let manifest = std::fs::read_to_string(out.join("manifest")).unwrap();
    assert!(manifest.contains("# preflight=stable"));
}

#[test]
fn unstable_fd_run_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("blowup");
    let result = satnls(&[
        "simulate",
        "--preset",
        "fig1",
        "--tau",
        "0.004",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&result), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("violates tau < h^2/2"));
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(
        &bad,
        "scheme=fd\nS=-0.1\ntau=0.001\nT=1\nL=30\nN=500\nsolitons=10:20\n",
    )
    .unwrap();
    let result = satnls(&["simulate", "--config", path_str(&bad)]);
    assert_eq!(code(&result), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains('N'));

    assert_eq!(code(&satnls(&["simulate", "--preset", "nope"])), Some(1));
    assert_eq!(code(&satnls(&["simulate"])), Some(1));
    assert_eq!(code(&satnls(&["frobnicate"])), Some(1));
    assert_eq!(code(&satnls(&["--help"])), Some(0));
}

#[test]
fn presets_listing() {
    let list = satnls(&["presets"]);
    assert_eq!(code(&list), Some(0));
    let text = String::from_utf8_lossy(&list.stdout);
    for name in ["fig1", "fig2", "fig10"] {
        assert!(
            text.lines().any(|l| l.starts_with(name)),
            "{name} missing from:\n{text}"
        );
    }
    let one = satnls(&["presets", "fig2"]);
    assert!(String::from_utf8_lossy(&one.stdout).contains("solitons=8:20;18:-20"));
}

#[test]
fn compare_runs_both_schemes() {
    let result = satnls(&["compare", "--preset", "fig4", "--T", "0.02"]);
    assert_eq!(
        code(&result),
        Some(0),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
}

#[test]
fn bench_prints_timings() {
    let result = satnls(&["bench", "--repeat", "1"]);
    assert_eq!(code(&result), Some(0));
    let text = String::from_utf8_lossy(&result.stdout);
    assert!(text.lines().count() >= 3, "{text}");
}
