//! End-to-end checks of the binary: exit codes, formats, determinism, and
//! the config escape hatch.

use std::path::Path;
use std::process::{Command, Output};

fn foursurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foursurf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Config equivalent to the built-in hardy scenario, with amplitudes
/// printed at full precision so they parse back to identical bits.
fn hardy_config() -> String {
    let n = 1.0 / (2.0 * 3.0_f64.sqrt());
    format!(
        r#"name = "hardy"
dims = [2, 2]
state = [[{a}, 0.0], [-{a}, 0.0], [-{a}, 0.0], [-{b}, 0.0]]
channel_1 = "hadamard"
channel_2 = "hadamard"
"#,
        a = fmt17(n),
        b = fmt17(3.0 * n),
    )
}

#[test]
fn hardy_text_reports_infeasible_and_is_deterministic() {
    let first = foursurf(&["hardy"]);
    assert!(first.status.success());
    let text = stdout(&first);
    assert!(text.contains("verdict: INFEASIBLE"));
    assert!(text.contains("gamma: A2=+ forces B1=-"));
    assert!(text.contains("delta: A1=+ forces B2=-"));
    assert!(text.contains("no-signaling: PASS"));

    let second = foursurf(&["hardy"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn hardy_csv_has_all_entries() {
    let output = foursurf(&["hardy", "--format", "csv"]);
    assert!(output.status.success());
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "surface,obs1,label1,obs2,label2,probability"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 16);

    let alpha_pp = rows
        .iter()
        .find(|r| r.starts_with("alpha,A1,+,A2,+,"))
        .expect("alpha (+,+) row");
    let p: f64 = alpha_pp.rsplit(',').next().unwrap().parse().unwrap();
    assert!((p - 1.0 / 12.0).abs() < 1e-12);
}

#[test]
fn hardy_json_round_trips() {
    let output = foursurf(&["hardy", "--format", "json"]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).expect("valid json");
    assert_eq!(doc["scenario"], "hardy");
    assert_eq!(doc["verdict"]["status"], "infeasible");
    assert!(doc["timing"].is_number());
    let p = doc["tables"]["alpha"]["probs"]["+,+"].as_f64().unwrap();
    assert!((p - 1.0 / 12.0).abs() < 1e-12);
    assert!(doc["ch_max"].as_f64().unwrap() > 1.0);
}

#[test]
fn custom_config_reproduces_the_builtin_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hardy.toml");
    std::fs::write(&path, hardy_config()).unwrap();

    let builtin = foursurf(&["hardy"]);
    let custom = foursurf(&["custom", "--config", path.to_str().unwrap()]);
    assert!(custom.status.success());
    assert_eq!(builtin.stdout, custom.stdout);

    let builtin_csv = foursurf(&["hardy", "--format", "csv"]);
    let custom_csv = foursurf(&["custom", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(builtin_csv.stdout, custom_csv.stdout);
}

#[test]
fn custom_config_errors_exit_2() {
    // Missing file.
    let missing = foursurf(&["custom", "--config", "/nonexistent/nope.toml"]);
    assert_eq!(missing.status.code(), Some(2));

    // Syntax error with a located message.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "dims = [2, 2]\nstate = 5\n").unwrap();
    let output = foursurf(&["custom", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("line"), "stderr should locate the error: {err}");

    // Non-normalized state.
    let path = dir.path().join("unnormalized.toml");
    std::fs::write(
        &path,
        "dims = [2, 2]\nstate = [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]\nchannel_1 = \"identity\"\nchannel_2 = \"identity\"\n",
    )
    .unwrap();
    let output = foursurf(&["custom", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn custom_dephasing_verdict_is_consistent_with_battery() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dephasing.toml");
    let n = 1.0 / (2.0 * 3.0_f64.sqrt());
    let config = format!(
        r#"name = "dephasing"
dims = [2, 2]
state = [[{a}, 0.0], [-{a}, 0.0], [-{a}, 0.0], [-{b}, 0.0]]
channel_1 = "dephasing:0.3"
channel_2 = "identity"
"#,
        a = fmt17(n),
        b = fmt17(3.0 * n),
    );
    std::fs::write(&path, config).unwrap();
    let output = foursurf(&[
        "custom",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();

    // Exit code stays 0 either way; the verdict must agree with the battery.
    let feasible = doc["verdict"]["status"] == "feasible";
    let ch_max = doc["ch_max"].as_f64().unwrap();
    if feasible {
        assert!(ch_max <= 1.0 + 1e-9);
    } else {
        assert!(ch_max > 1.0 + 1e-9 || doc["verdict"]["certificate"].is_object());
    }
}

#[test]
fn sweep_csv_shape_and_determinism() {
    let first = foursurf(&["sweep", "--steps", "41", "--format", "csv"]);
    assert!(first.status.success());
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "phi,S,max_ch,lp_feasible");
    assert_eq!(lines.count(), 41);

    let second = foursurf(&["sweep", "--steps", "41", "--format", "csv"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_rejects_bad_ranges() {
    let output = foursurf(&["sweep", "--steps", "1"]);
    assert_eq!(output.status.code(), Some(2));
    let output = foursurf(&["sweep", "--phi-min", "1.0", "--phi-max", "0.5"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let to_file = foursurf(&[
        "hardy",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();

    let to_stdout = foursurf(&["hardy", "--format", "csv"]);
    assert_eq!(written, to_stdout.stdout);
    assert!(Path::new(&path).exists());
}

#[test]
fn ancilla_reports_spectra() {
    let output = foursurf(&["ancilla"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("reduced block spectra:"));
    assert!(text.contains("verdict: INFEASIBLE"));
    // Eight block lines: two per surface.
    let count = text
        .lines()
        .filter(|l| l.trim_start().starts_with(['a', 'b', 'g', 'd']) && l.contains("block"))
        .count();
    assert_eq!(count, 8);
}
