use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn myorec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_myorec")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = myorec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn synth(dir: &Path, subjects: &str) -> String {
    let d = dir.to_str().unwrap();
    ok(&["--seed", "2", "--out-dir", d, "synth", "--subjects", subjects]);
    dir.join("manifest.json").to_string_lossy().into_owned()
}

fn json_len(path: &Path) -> usize {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_array().unwrap().len()
}

#[test]
fn extract_writes_one_row_per_window() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), "1");
    let out = tmp.path().join("x");
    ok(&["--out-dir", out.to_str().unwrap(), "extract", "--manifest", &manifest]);
    let text = fs::read_to_string(out.join("features.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 1200);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(&header[..4], &["subject", "movement", "trial", "window"]);
    assert_eq!(header.len() - 4, 26);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == header.len()));
}

#[test]
fn extract_of_empty_manifest_is_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("empty.json");
    fs::write(
        &manifest,
        r#"{"root_path": ".", "layout": "two_channel_csv", "subjects": [], "movements": ["T", "I"], "sample_rate_hz": 2000.0}"#,
    )
    .unwrap();
    let out = tmp.path().join("x");
    ok(&["--out-dir", out.to_str().unwrap(), "extract", "--manifest", manifest.to_str().unwrap()]);
    let text = fs::read_to_string(out.join("features.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("subject,movement,trial,window,LMAV_ch1"));
}

#[test]
fn default_sweeps_emit_standard_grids() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), "1");
    let w = tmp.path().join("w");
    let s = tmp.path().join("s");
    ok(&["--out-dir", w.to_str().unwrap(), "sweep-window", "--manifest", &manifest]);
    ok(&["--out-dir", s.to_str().unwrap(), "sweep-snr", "--manifest", &manifest]);
    assert_eq!(json_len(&w.join("sweep_window.json")), 7);
    assert_eq!(json_len(&s.join("sweep_snr.json")), 21);
    assert!(w.join("run.json").exists() && s.join("sweep_snr.csv").exists());
}

#[test]
fn compare_identical_groups_gives_p_one() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), "3");
    let ev = tmp.path().join("ev");
    let code = myorec(&["--out-dir", ev.to_str().unwrap(), "evaluate", "--manifest", &manifest]).status.code();
    assert_eq!(code, Some(0));
    let report = ev.join("report.json").to_string_lossy().into_owned();
    let cmp = tmp.path().join("cmp");
    let stdout = ok(&["--out-dir", cmp.to_str().unwrap(), "compare", "--group", &report, "--group", &report]);
    assert!(stdout.contains("p = 1,"), "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(cmp.join("compare.json")).unwrap()).unwrap();
    assert_eq!(v["p_value"], 1.0);
}

#[test]
fn scatter_and_res_use_five_windows_per_trial() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), "1");
    let out = tmp.path().join("sc");
    let o = out.to_str().unwrap();
    ok(&["--out-dir", o, "scatter", "--manifest", &manifest, "--windows-per-trial", "5"]);
    ok(&["--out-dir", o, "res", "--manifest", &manifest, "--windows-per-trial", "5"]);
    let scatter = fs::read_to_string(out.join("scatter_S1_PROPOSED.csv")).unwrap();
    assert_eq!(scatter.lines().next(), Some("label,f1,f2"));
    assert_eq!(scatter.lines().count(), 1 + 300);
    assert!(fs::read_to_string(out.join("res.csv")).unwrap().lines().count() >= 2);
}

#[test]
fn bad_input_exits_with_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = myorec(&["--out-dir", tmp.path().to_str().unwrap(), "evaluate", "--manifest", "/nonexistent/manifest.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = myorec(&["evaluate", "--window-ms", "abc"]);
    assert!(!out.status.success());
}
