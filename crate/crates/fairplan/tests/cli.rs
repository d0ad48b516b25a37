//! End-to-end checks of the command-line interface: exit codes, stderr
//! shapes, environment fallback, and output determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fairplan");

fn fixture() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/fsplus.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("FAIRPLAN_SCENARIO_PATH")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn help_and_version_succeed() {
    for args in [&["--help"][..], &["--version"][..], &["tables", "--help"][..]] {
        let output = run(args);
        assert_eq!(output.status.code(), Some(0), "{args:?}");
    }
    assert!(stdout(&run(&["--help"])).contains("validate"));
}

#[test]
fn validate_reports_counts() {
    let output = run(&["validate", fixture()]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let line = stdout(&output);
    assert!(line.starts_with("ok:"), "got {line:?}");
    assert!(line.contains("setups") && line.contains("scenarios"), "got {line:?}");
}

#[test]
fn missing_document_is_a_usage_error() {
    let output = run(&["validate"]);
    assert_eq!(output.status.code(), Some(64));
    assert!(stderr(&output).starts_with("usage error:"));
    assert!(stderr(&output).contains("FAIRPLAN_SCENARIO_PATH"));
}

#[test]
fn unreadable_document_is_a_usage_error() {
    let output = run(&["validate", "/nonexistent/plan.json"]);
    assert_eq!(output.status.code(), Some(64));
    assert!(stderr(&output).starts_with("usage error:"));
}

#[test]
fn syntax_error_is_located_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"schema_version\": \"1\",}").unwrap();
    let output = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains("line 1"), "got {err:?}");
    assert!(err.contains("column"), "got {err:?}");
}

#[test]
fn semantic_issues_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dangling.json");
    std::fs::write(
        &path,
        r#"{
            "schema_version": "1",
            "machine_plans": {
                "p": {"machine_hours_per_year": 6000, "cave_share": 0.5,
                      "duty_cycle": 0.75, "peak_to_average": 2.0}
            },
            "runs": {
                "a": {"setup": "ghost", "machine_plan": "p",
                      "peak_per_s": 1e7, "run_seconds": 1e6},
                "b": {"setup": "phantom", "machine_plan": "p",
                      "peak_per_s": 1e7, "run_seconds": 1e6}
            }
        }"#,
    )
    .unwrap();
    let output = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains("runs.a.setup"), "got {err:?}");
    assert!(err.contains("runs.b.setup"), "got {err:?}");
}

#[test]
fn unknown_scenario_is_a_computation_error() {
    let output = run(&["aggregate", fixture(), "--scenario", "nope"]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(err.contains("nope"), "got {err:?}");
    assert!(err.contains("FS+"), "error should list the known names, got {err:?}");
}

#[test]
fn ambiguous_scenario_choice_is_a_usage_error() {
    let output = run(&["aggregate", fixture()]);
    assert_eq!(output.status.code(), Some(64));
    assert!(stderr(&output).contains("--scenario"));
}

#[test]
fn environment_variable_supplies_the_path() {
    let output = Command::new(BIN)
        .args(["validate"])
        .env("FAIRPLAN_SCENARIO_PATH", fixture())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).starts_with("ok:"));
}

#[test]
fn every_table_id_renders() {
    for id in ["event-sizes", "data-rates", "storage-plan", "compute", "panda-hs06"] {
        let output = run(&["tables", fixture(), "--table", id]);
        assert_eq!(output.status.code(), Some(0), "table {id}: {}", stderr(&output));
        let text = stdout(&output);
        assert!(text.contains('|'), "table {id} should be markdown, got {text:?}");
    }
}

#[test]
fn table_output_is_deterministic() {
    let first = run(&["report", fixture()]);
    let second = run(&["report", fixture()]);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.contains(&b'\r'), "output must be LF only");
}

#[test]
fn report_formats_differ_in_syntax_not_content() {
    let markdown = stdout(&run(&["report", fixture(), "--format", "markdown"]));
    let csv = stdout(&run(&["report", fixture(), "--format", "csv"]));
    let json = stdout(&run(&["report", fixture(), "--format", "json"]));
    assert!(markdown.contains("| "));
    // table titles stand alone; the header row after each carries the commas
    assert!(csv.lines().nth(1).unwrap().contains(','));
    let parsed: serde_json::Value = serde_json::from_str(&json).expect("json output parses");
    assert!(parsed.get("tables").is_some(), "got {parsed}");
    for needle in ["electron", "hadron", "muon"] {
        assert!(markdown.contains(needle), "markdown lacks {needle}");
        assert!(csv.contains(needle), "csv lacks {needle}");
        assert!(json.contains(needle), "json lacks {needle}");
    }
}

#[test]
fn report_writes_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let output = run(&[
        "report",
        fixture(),
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("hadron"));
    assert!(written.ends_with('\n'));
}

#[test]
fn timeline_covers_the_requested_span() {
    let output = run(&[
        "timeline",
        fixture(),
        "--scenario",
        "FS+",
        "--from",
        "2028",
        "--to",
        "2032",
        "--archive",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    for year in ["2028", "2030", "2032"] {
        assert!(text.contains(year), "missing {year} in {text:?}");
    }
    assert!(!text.contains("2033"));
    assert!(text.contains("archive") || text.contains("Archive"), "got {text:?}");
}

#[test]
fn aggregate_names_every_member() {
    let output = run(&["aggregate", fixture(), "--scenario", "FS+"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    for name in ["CBM", "PANDA", "NUSTAR", "HADES", "APPA", "THEORY", "BEAMS"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn stdin_is_never_read() {
    // A dash is a path, not a stdin convention, so this must fail cleanly
    // rather than hang.
    let mut child = Command::new(BIN)
        .args(["validate", "-"])
        .stdin(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    // the pipe may already be closed, which is the point
    let _ = child.stdin.take().unwrap().write_all(b"{}");
    let output = child.wait_with_output().unwrap();
    assert_eq!(output.status.code(), Some(64));
}

#[test]
fn fixture_file_is_canonical() {
    let text = std::fs::read_to_string(fixture()).unwrap();
    let doc = fairplan::scenario::ScenarioDocument::from_path(Path::new(fixture())).unwrap();
    assert_eq!(
        doc.to_canonical_json(),
        text,
        "data/fsplus.json must stay in canonical form; run the scenario_io \
         example to regenerate"
    );
}
