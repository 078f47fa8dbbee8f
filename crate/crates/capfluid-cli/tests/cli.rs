//! End-to-end tests of the binary: exit codes, output formats, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_capfluid"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn malformed_json_reports_line_and_column_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\n  \"c\": 0.1,\n  oops\n}");
    let out = run(&["dispersion", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(
        err.contains("line") && err.contains("column"),
        "stderr: {err}"
    );
}

#[test]
fn dt_and_cfl_are_mutually_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "both.json",
        r#"{"time": {"dt": 1e-3, "cfl": 0.4, "t_final": 1.0}}"#,
    );
    let out = run(&["simulate-eulerian", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("exactly one"));

    let neither = write_config(
        dir.path(),
        "neither.json",
        r#"{"time": {"dt": null, "cfl": null, "t_final": 1.0}}"#,
    );
    let out = run(&["simulate-eulerian", "--config", &neither]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "extra.json", r#"{"wavelength": 3.0}"#);
    let out = run(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("wavelength"));
}

#[test]
fn zero_wave_vector_row_is_all_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k0.json",
        r#"{"dispersion": {"k_min": 0.0, "k_max": 0.0, "n_k": 1, "direction": [1, 0, 0]}}"#,
    );
    let out = run(&["dispersion", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("k1,k2,k3,k_abs,lambda_1"));
    let row = lines.next().unwrap();
    for field in row.split(',') {
        let value: f64 = field.parse().unwrap();
        assert_eq!(value, 0.0);
    }
}

#[test]
fn dispersion_json_format_parses() {
    let out = run(&["dispersion", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = parsed.as_array().unwrap();
    assert_eq!(rows.len(), 41);
    assert_eq!(rows[0]["lambdas"].as_array().unwrap().len(), 8);
}

#[test]
fn uniform_initial_data_gives_flat_audits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "uniform.json",
        r#"{
            "grid": {"n": 32},
            "time": {"cfl": 0.4, "t_final": 0.2, "audit_every": 2},
            "initial": {"preset": "uniform"}
        }"#,
    );
    for cmd in ["simulate-eulerian", "simulate-lagrangian"] {
        let out = run(&[cmd, "--config", &cfg]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stderr(&out));
        let text = stdout(&out);
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert!(rows.len() >= 3);
        let energy_col: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
        assert!(
            energy_col.iter().all(|e| e == &energy_col[0]),
            "{cmd} energies not flat: {energy_col:?}"
        );
    }
}

#[test]
fn oversized_dt_warns_and_is_clamped() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bigdt.json",
        r#"{
            "grid": {"n": 32},
            "time": {"dt": 10.0, "cfl": null, "t_final": 0.05, "audit_every": 5}
        }"#,
    );
    let out = run(&["simulate-eulerian", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("stability bound"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn verify_reports_are_byte_identical_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "seeded.json",
        r#"{"verify": {"spectral_samples": 10}, "seed": 7}"#,
    );
    let a = run(&["verify", "--config", &cfg]);
    let b = run(&["verify", "--config", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["overall"], "pass");
    assert_eq!(report["seed"], 7);

    // A different seed still passes but produces a different report body.
    let c = run(&["verify", "--config", &cfg, "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn spinodal_config_verify_marks_expected_failure_and_dispersion_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // (rho, T) = (1, 0.4) for the reference van der Waals parameters sits
    // inside the spinodal; eta is precomputed for that temperature.
    let vdw = capfluid::thermo::EosModel::VanDerWaals {
        a: 1.0,
        b: 1.0 / 3.0,
        r: 1.0,
        cv: 1.5,
    };
    let eta = capfluid::thermo::eta_for_temperature(&vdw, 1.0, 0.4).unwrap();
    let cfg = write_config(
        dir.path(),
        "spinodal.json",
        &format!(
            r#"{{
                "eos": {{"type": "van_der_waals", "a": 1.0, "b": 0.3333333333333333, "r": 1.0, "cv": 1.5}},
                "c": 0.01,
                "equilibrium": {{"rho_e": 1.0, "eta_e": {eta}, "u_e": [0, 0, 0]}},
                "verify": {{"spectral_samples": 5}}
            }}"#
        ),
    );
    let out = run(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["overall"], "pass");
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"equilibrium_not_positive_definite_expected"));

    let out = run(&["dispersion", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("not positive definite"));
}

#[test]
fn snapshots_written_next_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let audits = dir.path().join("audit.csv");
    let cfg = write_config(
        dir.path(),
        "snaps.json",
        &format!(
            r#"{{
                "grid": {{"n": 32}},
                "time": {{"cfl": 0.4, "t_final": 0.1, "audit_every": 10, "snapshot_every": 20}},
                "output": {{"path": "{}"}}
            }}"#,
            audits.display()
        ),
    );
    let out = run(&["simulate-lagrangian", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(audits.exists());
    let snap0 = dir.path().join("audit_snap_000000.csv");
    assert!(snap0.exists(), "missing {snap0:?}");
    let body = std::fs::read_to_string(&snap0).unwrap();
    assert!(body.starts_with("z,v,w,u"));
    let n_rows = body.lines().count() - 1;
    assert_eq!(n_rows, 32);
}

#[test]
fn blow_up_exits_3_with_last_good_time() {
    let dir = tempfile::tempdir().unwrap();
    // Huge amplitude and a grotesque dt on a tiny grid: guaranteed blow-up.
    let cfg = write_config(
        dir.path(),
        "blowup.json",
        r#"{
            "grid": {"n": 16},
            "time": {"dt": 5.0, "cfl": null, "t_final": 50.0, "audit_every": 1},
            "initial": {"preset": "standing_wave", "amplitude": 0.9, "mode": 1}
        }"#,
    );
    let out = run(&["simulate-eulerian", "--config", &cfg]);
    // dt is clamped to the stability bound first, so force the blow-up with
    // an unstable-but-plausible dt instead.
    if out.status.code() == Some(0) {
        let cfg2 = write_config(
            dir.path(),
            "blowup2.json",
            r#"{
                "grid": {"n": 16},
                "time": {"cfl": 4.0, "t_final": 50.0, "audit_every": 1},
                "initial": {"preset": "standing_wave", "amplitude": 0.9, "mode": 1}
            }"#,
        );
        let out2 = run(&["simulate-eulerian", "--config", &cfg2]);
        assert_eq!(out2.status.code(), Some(3), "stderr: {}", stderr(&out2));
        assert!(
            stderr(&out2).contains("last good"),
            "stderr: {}",
            stderr(&out2)
        );
    } else {
        assert_eq!(out.status.code(), Some(3));
        assert!(stderr(&out).contains("last good"));
    }
}

#[test]
fn seventeen_digit_output_round_trips() {
    let out = run(&["dispersion"]);
    let text = stdout(&out);
    for line in text.lines().skip(1).take(5) {
        for field in line.split(',') {
            let x: f64 = field.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), field);
        }
    }
}
