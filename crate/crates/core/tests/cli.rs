use dodeca::cli::{run, EXIT_PASS, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dodeca").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn periods_json_is_a_sorted_array() {
    let (code, out, _) = call(&["--format", "json", "periods", "--bound", "100"]);
    assert_eq!(code, EXIT_PASS);
    let v: Vec<u64> = serde_json::from_str(&out).unwrap();
    assert!(!v.is_empty());
    assert!(v.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(call(&["--format", "json", "periods", "--bound", "100"]).1, out);
}

#[test]
fn malformed_point_reports_position() {
    let (code, _, err) = call(&["orbit", "--point", "abc"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("at byte 0"), "{err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(call(&["orbit", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["verify", "--only", "11"]).0, EXIT_USAGE);
}

#[test]
fn help_and_version_exit_cleanly() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("verify"));
    assert_eq!(call(&["--version"]).0, EXIT_PASS);
}

#[test]
fn component_at_a_fixed_point() {
    let w = dodeca::billiard::WedgeSystem::new();
    let point = w.o[2].to_literal();
    let (code, out, err) = call(&["--format", "json", "component", "--point", &point]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["component"]["per_tprime"], 1);
    let (code, out, _) = call(&["orbit", "--point", &point, "--steps", "3"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains(&point));
}

#[test]
fn quick_criteria_pass() {
    let (code, out, _) = call(&["verify", "--only", "1", "--only", "3"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.svg");
    let (code, _, err) = call(&["render", "--figure", "table", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{err}");
    assert!(std::fs::read_to_string(&path).unwrap().contains("<svg"));
}
