//! End-to-end runs of the command pipeline through the public API,
//! checking artifacts, verdicts, and exit codes.

use height_census::cli::config::{parse_config, CommandKind};
use height_census::cli::runner::execute;

fn run(kind: CommandKind, text: &str) -> (i32, String, serde_json::Value, String) {
    let config = parse_config(kind, text).expect("config parses");
    let dir = tempfile::tempdir().expect("tempdir");
    let outcome = execute(&config, dir.path()).expect("run succeeds");
    let report: serde_json::Value =
        serde_json::from_slice(&outcome.report_bytes).expect("report is JSON");
    let rows = std::fs::read_to_string(dir.path().join("rows.csv")).expect("rows.csv written");
    (outcome.exit_code, outcome.verdict, report, rows)
}

#[test]
fn volume_run_reports_closed_form_agreement() {
    let (exit, verdict, report, rows) = run(
        CommandKind::Volume,
        r#"
            [group]
            k = 2
            s_unit_primes = [2]
        "#,
    );
    assert_eq!(exit, 0);
    assert_eq!(verdict, "pass");
    let c = report["results"]["c_gamma"]["value"].as_f64().unwrap();
    assert!((c - 24.976).abs() < 1e-2, "c = {c}");
    assert_eq!(
        report["results"]["c_closed_form"]["provenance"],
        "closed_form"
    );
    assert!(report["results"]["c_gamma"]["provenance"]
        .as_str()
        .unwrap()
        .starts_with("triangulation±"));
    assert_eq!(rows.lines().count(), 1);
}

#[test]
fn census_ladder_trends_and_writes_rows() {
    let (exit, verdict, report, rows) = run(
        CommandKind::Census,
        r#"
            a = ["1", "1"]
            [group]
            k = 2
            generators = [["2", "1/2"]]
            [ladder]
            base = "100"
            rungs = 3
        "#,
    );
    assert_eq!(exit, 0, "report: {report}");
    assert_eq!(verdict, "pass");
    assert!(report["results"]["fit"]["pass"].as_bool().unwrap());
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("X,count,degenerate,complete,ratio"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("100,7,0,true,"), "row: {first}");
}

#[test]
fn recurrence_run_counts_terms() {
    let (exit, _, report, rows) = run(
        CommandKind::Recurrence,
        r#"
            [recurrence]
            roots = ["2", "3"]
            polys = [["1"], ["1"]]
            [ladder]
            xs = ["1000", "1000000", "1000000000000"]
        "#,
    );
    assert_eq!(exit, 0, "report: {report}");
    assert!(rows.lines().nth(1).unwrap().starts_with("1000,7,0,true,"));
    assert_eq!(report["results"]["root_height"]["value"], "3");
}

#[test]
fn represent_run_counts_values() {
    let (exit, _, report, rows) = run(
        CommandKind::Represent,
        r#"
            [group]
            k = 1
            generators = [["2"]]
            [family]
            A = [["1", "1"]]
            [ladder]
            xs = ["5", "256", "65536"]
        "#,
    );
    assert_eq!(exit, 0, "report: {report}");
    assert!(rows.lines().nth(1).unwrap().starts_with("5,11,0,true,"));
    let predicted = report["results"]["predicted_constant"]["value"]
        .as_f64()
        .unwrap();
    assert!((predicted - 3.122).abs() < 1e-3, "predicted = {predicted}");
}

#[test]
fn malformed_rational_is_an_input_error_naming_the_key() {
    let err = parse_config(
        CommandKind::Census,
        r#"
            a = ["2//3", "1"]
            [group]
            k = 2
            generators = [["2", "1/2"]]
        "#,
    )
    .unwrap_err();
    assert_eq!(err.key, "a[0]");
    assert!(err.to_string().contains("2//3"));
}

#[test]
fn far_off_ratio_fails_the_fit_with_exit_two() {
    // for this group the ball count at X = 16 is 5 against a prediction of
    // log2(16) = 4, a ratio of 1.25, outside the default tolerance
    let config = parse_config(
        CommandKind::Hball,
        r#"
            [group]
            k = 2
            generators = [["2", "1/2"]]
            [ladder]
            xs = ["4", "8", "16"]
        "#,
    )
    .expect("config parses");
    let dir = tempfile::tempdir().expect("tempdir");
    let outcome = execute(&config, dir.path()).expect("run succeeds");
    assert_eq!(outcome.exit_code, 2);
    assert_eq!(outcome.verdict, "fail");
}

#[test]
fn selftest_command_is_rejected_by_execute() {
    let config = parse_config(CommandKind::Selftest, "").expect("empty config parses");
    let dir = tempfile::tempdir().expect("tempdir");
    assert!(execute(&config, dir.path()).is_err());
}
