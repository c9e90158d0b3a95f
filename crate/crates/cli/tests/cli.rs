use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use ohl_core::catalog::Catalog;

fn ohl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ohl"))
        .args(args)
        .env_remove("OHL_DIGITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp_catalog(name: &str, json: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("ohl-{}-{name}.json", std::process::id()));
    std::fs::write(&path, json).unwrap();
    path
}

#[test]
fn verify_single_record() {
    let o = ohl(&["verify", "--id", "eq10_basel", "--digits", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PASS  eq10_basel"));
}

#[test]
fn unknown_id_lists_near_matches() {
    let o = ohl(&["verify", "--id", "eq10_basl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("did you mean: eq10_basel"));
}

#[test]
fn wrong_value_fails_and_engine_error_names_record() {
    let wrong = temp_catalog(
        "wrong",
        r#"[{"id":"a","lhs":"binom2/16^n * 1 / (2n+1) from n=0","rhs":"4*G/pi + 1/1000000000000","status":"Proved","anchor":"x"}]"#,
    );
    let o = ohl(&["verify", "--all", "--digits", "20", "--catalog", wrong.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL  a"));

    let broken = temp_catalog(
        "broken",
        r#"[{"id":"bad_integral","lhs":{"integral":{"lower":"0","upper":"1","integrand":"1/t"}},"rhs":"0","status":"Proved","anchor":"x"}]"#,
    );
    let o = ohl(&["verify", "--all", "--digits", "20", "--catalog", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("bad_integral"));
}

#[test]
fn conjectures_never_fail_the_run() {
    let path = temp_catalog(
        "conj",
        r#"[{"id":"c","lhs":"binom2/16^n * 1 / (2n+1) from n=0","rhs":"1","status":"Conjectural","anchor":"x"},
            {"id":"p","lhs":"binom2/16^n * 1 / (2n+1) from n=0","rhs":"4*G/pi","status":"Proved","anchor":"x"}]"#,
    );
    let o = ohl(&[
        "verify",
        "--all",
        "--include-conjectural",
        "--digits",
        "20",
        "--catalog",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("open  c"));
}

#[test]
fn verify_needs_ten_digits() {
    let o = ohl(&["verify", "--id", "eq10_basel", "--digits", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_prints_catalan_over_pi() {
    let o = ohl(&["eval", "--series", "binom2/16^n * 1/(2n+1) from n=0", "--digits", "20"]);
    assert_eq!(o.status.code(), Some(0));
    // 4G/pi
    assert!(stdout(&o).contains("value   1.1662436161232751206\n"));
}

#[test]
fn digits_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ohl"))
        .args(["eval", "--series", "binom2/16^n * 1/(2n+1) from n=0", "--format", "json"])
        .env("OHL_DIGITS", "12")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["digits"], 12);
    assert_eq!(v["value"], "1.16624361612");
}

#[test]
fn extend_main_two_is_the_printed_form() {
    let o = ohl(&["extend", "--family", "main", "--lambda", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let printed = Catalog::bundled().get("lambda2_main").unwrap().rhs.to_string();
    assert_eq!(v["closed_form"], printed.as_str());
    assert_eq!(v["provenance"], "Recurrence");
    assert_eq!(v["pass"], true);
}

#[test]
fn extend_rejects_unknown_family() {
    let o = ohl(&["extend", "--family", "third", "--lambda", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn discover_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ohl"))
        .args(["discover", "--basis", "small", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    // 4G/pi - 4 ln2/pi to 50 digits
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"0.28370121551266874696771209740158891152550562102473\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["candidate"]["rhs"], "-4*ln2/pi + 4*G/pi");
    assert_eq!(v["candidate"]["status"], "External");
    assert_eq!(v["candidate"]["verified"], false);
}

#[test]
fn report_is_byte_identical() {
    let a = ohl(&["report", "--digits", "20", "--max-lambda", "3"]);
    let b = ohl(&["report", "--digits", "20", "--max-lambda", "3", "--jobs", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["summary"]["failed"].as_array().unwrap().len(), 0);
    let ids: Vec<&str> = v["verification"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}
