//! End-to-end tests of the `hyperbat` binary: emitted files, exit
//! codes, determinism and format invariants.

use std::path::Path;
use std::process::Command;

fn hyperbat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperbat"))
}

fn run_ok(args: &[&str], dir: &Path) {
    let status = hyperbat().args(args).current_dir(dir).status().unwrap();
    assert!(status.success(), "hyperbat {args:?} failed with {status:?}");
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect()
}

#[test]
fn trace_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "trace".to_string(),
            "--g".into(),
            "2".into(),
            "--gamma".into(),
            "1".into(),
            "--omega-drive".into(),
            "1".into(),
            "--grid".into(),
            "0:6:121".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let a1: Vec<String> = args("a.csv");
    let a2: Vec<String> = args("b.csv");
    run_ok(&a1.iter().map(|s| s.as_str()).collect::<Vec<_>>(), dir.path());
    run_ok(&a2.iter().map(|s| s.as_str()).collect::<Vec<_>>(), dir.path());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    // Identical except the echoed output path inside the config line.
    let strip = |bytes: &[u8]| {
        String::from_utf8(bytes.to_vec())
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# config"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn trace_has_zeros_at_oscillation_nodes() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "trace", "--g", "2", "--gamma", "1", "--omega-drive", "1", "--grid", "0:6:1201",
            "--out", "t.csv",
        ],
        dir.path(),
    );
    let rows = read_rows(&dir.path().join("t.csv"));
    let peak = rows.iter().map(|r| r[1]).fold(0.0f64, f64::max);
    let g_big = (4.0f64 - 1.0 / 16.0).sqrt();
    for n in 1..=3 {
        let node = n as f64 * std::f64::consts::PI / g_big;
        // Minimum of e_norm in a small window around the node.
        let min_near = rows
            .iter()
            .filter(|r| (r[0] - node).abs() < 0.02)
            .map(|r| r[1])
            .fold(f64::MAX, f64::min);
        assert!(min_near < 1e-4 * peak, "node {n}: min {min_near:.3e}");
    }
}

#[test]
fn zero_drive_trace_is_all_zero_columns() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["trace", "--omega-drive", "0", "--grid", "0:4:9", "--out", "z.csv"],
        dir.path(),
    );
    for row in read_rows(&dir.path().join("z.csv")) {
        assert_eq!(row[1], 0.0);
        assert_eq!(row[2], 0.0);
        assert_eq!(row[3], 1.0); // discriminant of the vacuum
    }
}

#[test]
fn normalized_columns_are_independent_of_omega_b() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["trace", "--omega-b", "1", "--grid", "0:5:51", "--out", "w1.csv"],
        dir.path(),
    );
    run_ok(
        &["trace", "--omega-b", "7.3", "--grid", "0:5:51", "--out", "w2.csv"],
        dir.path(),
    );
    let r1 = read_rows(&dir.path().join("w1.csv"));
    let r2 = read_rows(&dir.path().join("w2.csv"));
    for (a, b) in r1.iter().zip(&r2) {
        assert_eq!(a, b);
    }
}

#[test]
fn oracle_trace_columns_agree_with_analytics() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "trace",
            "--g",
            "1",
            "--gamma",
            "1",
            "--omega-drive",
            "0.5",
            "--grid",
            "0:3:7",
            "--oracle",
            "on",
            "--out",
            "o.csv",
        ],
        dir.path(),
    );
    let rows = read_rows(&dir.path().join("o.csv"));
    assert_eq!(rows[0].len(), 10);
    let peak = rows.iter().map(|r| r[1]).fold(0.0f64, f64::max);
    for row in &rows {
        assert!((row[1] - row[5]).abs() < 1e-3 * peak, "e_norm {} vs oracle {}", row[1], row[5]);
        assert!(row[9] < 1e-6, "truncation weight {}", row[9]);
    }
}

#[test]
fn config_file_round_trip_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    let cfg = serde_json::json!({
        "schema": "hyperbat-v1",
        "mode": "trace",
        "params": {"omega_b": 1.0, "g": 3.0, "gamma": 1.5, "omega_drive": 0.7},
        "pulse": {"kind": "delta"},
        "grid": {"start": 0.0, "stop": 2.0, "count": 5, "scale": "linear"},
        "oracle": "off",
        "tol": 1e-8,
        "format": "csv"
    });
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    run_ok(
        &["trace", "--config", "run.json", "--g", "2.0", "--out", "c.csv"],
        dir.path(),
    );
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    // The echoed config reflects the flag override.
    assert!(text.contains("\"g\":2.0"), "override missing: {text}");
    assert!(text.contains("\"gamma\":1.5"));
}

#[test]
fn json_format_emits_schema_document() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["trace", "--grid", "0:2:5", "--format", "json", "--out", "t.json"],
        dir.path(),
    );
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], "hyperbat-v1");
    assert_eq!(doc["config"]["mode"], "trace");
    assert_eq!(doc["columns"].as_array().unwrap().len(), 5);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn figure_panels_emit_data_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    for panel in ["fig2b", "fig2c"] {
        run_ok(&["figure", "--panel", panel, "--grid", "0.01:100:41:log"], dir.path());
        let csv = dir.path().join(format!("{panel}.csv"));
        let gp = dir.path().join(format!("{panel}.gnuplot"));
        assert!(csv.is_file());
        let script = std::fs::read_to_string(&gp).unwrap();
        assert!(script.contains(&format!("'{panel}.csv'")));
        let rows = read_rows(&csv);
        assert_eq!(rows.len(), 41);
        assert_eq!(rows[0].len(), 4);
    }
    run_ok(&["figure", "--panel", "fig2a", "--grid", "0:8:101"], dir.path());
    let rows = read_rows(&dir.path().join("fig2a.csv"));
    assert_eq!(rows[0].len(), 9);
}

#[test]
fn sweep_hits_the_exceptional_point_row() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["sweep", "--quantity", "t_e", "--grid", "0.0625:1:5:log", "--out", "s.csv"],
        dir.path(),
    );
    let rows = read_rows(&dir.path().join("s.csv"));
    // Log grid 0.0625..1 with 5 points passes through g/gamma = 0.25.
    let ep = rows.iter().find(|r| (r[0] - 0.25).abs() < 1e-12).expect("EP row");
    assert_eq!(ep[1], 4.0);

    run_ok(
        &["sweep", "--quantity", "e_max", "--grid", "0.0625:1:5:log", "--out", "e.csv"],
        dir.path(),
    );
    let rows = read_rows(&dir.path().join("e.csv"));
    // Values round-trip through the 12-digit column format.
    let ep = rows.iter().find(|r| (r[0] - 0.25).abs() < 1e-12).expect("EP row");
    assert!((ep[1] - (-2.0f64).exp()).abs() < 1e-12);
}

#[test]
fn verify_with_tiny_cutoff_fails_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let output = hyperbat()
        .args(["verify", "--n-max", "4", "--out", "report.json", "--format", "json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], false);
    // Truncation certificates are violated, not crashed.
    let cases = report["cases"].as_array().unwrap();
    assert!(cases.iter().any(|c| c["certified"] == false));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("verification: FAIL"));
}

#[test]
fn usage_errors_exit_1() {
    let code = hyperbat().args(["trace", "--grid", "5:1:10"]).status().unwrap().code();
    assert_eq!(code, Some(1));
    let code = hyperbat().args(["trace", "--grid", "0:1:1"]).status().unwrap().code();
    assert_eq!(code, Some(1));
    let code = hyperbat().args(["sweep", "--quantity", "bogus"]).status().unwrap().code();
    assert_eq!(code, Some(1));
    let code = hyperbat().args(["trace", "--gamma", "-2"]).status().unwrap().code();
    assert_eq!(code, Some(1));
}

#[test]
fn insufficient_oracle_cutoff_exits_3() {
    let code = hyperbat()
        .args([
            "trace",
            "--omega-drive",
            "1.5",
            "--oracle",
            "on",
            "--n-max",
            "6",
            "--grid",
            "0:1:3",
        ])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(3));
}
