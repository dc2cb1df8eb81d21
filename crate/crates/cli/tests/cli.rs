//! End-to-end checks of the binary: artifact emission and exit codes
//! (0 = completed, 1 = usage/configuration, 2 = numeric failure).

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corrocert"))
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("corrocert-cli-tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn mesh_and_certify_produce_artifacts() {
    let dir = temp_dir("ok");
    let config = dir.join("run.conf");
    std::fs::write(&config, "n = 2\nm = 4\nrefinement = 1\na = 1\nb = 3\n").unwrap();

    let out = dir.join("out");
    let status = bin()
        .args(["mesh", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("mesh.txt").exists());
    assert!(out.join("mesh_summary.json").exists());

    let output = bin()
        .args(["certify", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--deterministic")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("satisfied = true"), "{stdout}");
    assert!(out.join("criterion_c1.csv").exists());
    assert!(out.join("certify_summary.json").exists());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("certify_summary.json")).unwrap())
            .unwrap();
    assert_eq!(json["c1"]["k"], 9);
    assert_eq!(json["c1"]["satisfied"], true);
}

#[test]
fn usage_errors_exit_one() {
    let dir = temp_dir("usage");
    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "radius = 1\n").unwrap();
    let status = bin()
        .args(["certify", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1), "unknown key should be a usage error");

    let status = bin().arg("certify").status().unwrap();
    assert_eq!(status.code(), Some(1), "missing --config should be a usage error");

    let status = bin().arg("frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(1), "unknown command should be a usage error");
}

#[test]
fn numeric_failures_exit_two() {
    let dir = temp_dir("numeric");
    // asymmetric measured-data file: passes parsing, fails the solver's
    // symmetry contract
    let data = dir.join("data.txt");
    std::fs::write(&data, "1 2 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n").unwrap();
    let config = dir.join("run.conf");
    std::fs::write(
        &config,
        format!("n = 2\nm = 4\nrefinement = 1\ndata = {}\n", data.display()),
    )
    .unwrap();
    let output = bin()
        .args(["reconstruct", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("error"), "{stderr}");
}

#[test]
fn help_exits_zero() {
    let status = bin().arg("--help").status().unwrap();
    assert_eq!(status.code(), Some(0));
}
