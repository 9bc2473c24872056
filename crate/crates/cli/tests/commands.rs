use std::fs;
use std::path::Path;

use eatxt_cli::run_from;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["eatxt", "--schema", "2.2"];
    argv.extend_from_slice(args);
    let code = run_from(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn check_reports_ok() {
    let (code, out, err) = cli(&["check", &fixture("brake_system.eatxt")]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("ok (23 elements)"));
}

#[test]
fn export_refuses_invalid_model_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("m.eatxt");
    let dst = dir.path().join("m.eaxml");
    fs::write(
        &src,
        "EAPackage P { DesignFunctionType T { DesignFunctionPrototype x { type Missing; } } }",
    )
    .unwrap();
    let (code, out, err) = cli(&["export", src.to_str().unwrap(), "-o", dst.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("error[E003]: cannot resolve 'Missing'"), "{err}");
    assert!(!dst.exists());
}

#[test]
fn export_import_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let xml = dir.path().join("m.eaxml");
    let back = dir.path().join("m.eatxt");
    assert_eq!(
        cli(&["export", &fixture("brake_system.eatxt"), "-o", xml.to_str().unwrap()]).0,
        0
    );
    assert_eq!(
        cli(&["import", xml.to_str().unwrap(), "-o", back.to_str().unwrap()]).0,
        0
    );
    let original = fs::read_to_string(fixture("brake_system.eatxt")).unwrap();
    let without_comments: String = original
        .lines()
        .filter(|l| !l.trim_start().starts_with("//"))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(fs::read_to_string(back).unwrap(), without_comments);
}

#[test]
fn migrate_command_drops_attribute() {
    let (code, out, err) = cli(&["migrate", &fixture("brake_system_2.1.12.eaxml"), "--to", "2.2"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("xmlns=\"http://east-adl.info/2.2\""));
    assert!(!out.contains("HARDWARE-COMPONENT-TREF"));
    assert!(err.contains("warning[W101]"));
    assert!(err.contains("applied: 2.1.12 -> 2.2: drop attribute 'hardwareComponent' on HardwareFunctionType"));
}

#[test]
fn unsupported_schema_is_a_usage_error() {
    let mut err = Vec::new();
    let code = run_from(
        ["eatxt", "--schema", "9.9", "check", "x.eatxt"],
        &mut Vec::new(),
        &mut err,
    );
    assert_eq!(code, 2);
    assert!(String::from_utf8(err)
        .unwrap()
        .contains("unsupported schema version '9.9'; supported: 2.1.12, 2.2"));
}

#[test]
fn template_and_typo() {
    let (code, out, _) = cli(&["template", "FunctionFlowPort", "--name", "speed"]);
    assert_eq!(code, 0);
    assert_eq!(out, "FunctionFlowPort speed {\n    direction in;\n}\n");
    let (code, _, err) = cli(&["template", "FunctionFlowPrt", "--name", "speed"]);
    assert_eq!(code, 2);
    assert!(err.contains("did you mean 'FunctionFlowPort'?"));
}

#[test]
fn completion_at_offset() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.eatxt");
    let src = "EAPackage P {\n    \n}\n";
    fs::write(&f, src).unwrap();
    let (code, out, _) = cli(&["complete", f.to_str().unwrap(), "--offset", "18"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("AnalysisFunctionType\ttemplate\n"), "{out}");
    let (_, json, _) = cli(&["--json", "complete", f.to_str().unwrap(), "--offset", "18"]);
    let items: serde_json::Value = serde_json::from_str(&json).unwrap();
    let dft = items
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["label"] == "DesignFunctionType")
        .unwrap();
    assert_eq!(dft["insertText"], "DesignFunctionType DesignFunctionType1 {\n    \n}");
    assert_eq!(cli(&["complete", f.to_str().unwrap(), "--offset", "999"]).0, 2);
}

#[test]
fn fmt_in_place() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.eatxt");
    fs::write(&f, "EAPackage P{EAPackage Q{}}").unwrap();
    assert_eq!(cli(&["fmt", "--write", f.to_str().unwrap()]).0, 0);
    assert_eq!(fs::read_to_string(&f).unwrap(), "EAPackage P {\n    EAPackage Q;\n}\n");
}

#[test]
fn one_shot_sync_uses_newer_file() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("m.eatxt");
    let x = dir.path().join("m.eaxml");
    fs::write(&t, "EAPackage Only;\n").unwrap();
    let (code, _, err) = cli(&["sync", t.to_str().unwrap(), x.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(fs::read_to_string(&x)
        .unwrap()
        .contains("<SHORT-NAME>Only</SHORT-NAME>"));
}

#[test]
fn watch_mode_stops_after_polls() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("m.eatxt");
    let x = dir.path().join("m.eaxml");
    fs::write(&t, "EAPackage W;\n").unwrap();
    let (code, _, err) = cli(&[
        "sync",
        t.to_str().unwrap(),
        x.to_str().unwrap(),
        "--watch",
        "--interval",
        "1",
        "--max-polls",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(err.contains("watching"), "{err}");
}
