use std::process::{Command, Output};

fn ct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ct")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn apply_prints_the_image() {
    let o = ct(&["apply", "[0(2),3(4)]", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "7");
    let o = ct(&["apply", "[0(2),1(4)]", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["image"], "5");
    // -3 = 1 - 4, paired with 0 - 2.
    let o = ct(&["apply", "[0(2),1(4)]", "-3"]);
    assert_eq!(stdout(&o).trim(), "-2");
    let o = ct(&["apply", "[0(2),1(4)]", "3"]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn order_accepts_scan_limits() {
    let o = ct(&["order", "[0(2),1(4)]", "[1(2),2(4)]", "--power-max", "64", "--mod-max", "5000"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("order: inf (heuristic:"), "{}", stdout(&o));
}

#[test]
fn order_reports_certificate() {
    let o = ct(&["order", "[0(2),1(4)]", "[0(2),3(4)]"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("order: 3 (certified: common-vertex)"), "{}", stdout(&o));
}

#[test]
fn order_json_has_report_fields() {
    let o = ct(&["order", "[0(2),1(2)]", "[0(3),1(3)]", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], 4);
    assert_eq!(v["certified"], true);
    assert!(v["method"].is_array());
}

#[test]
fn invalid_transposition_exits_with_one() {
    let o = ct(&["order", "[0(2),1(3)]", "[0(2),1(2)]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("classes intersect"));
    assert_eq!(ct(&["apply", "[0(2)", "1"]).status.code(), Some(1));
    assert_eq!(ct(&["nonsense"]).status.code(), Some(1));
}

#[test]
fn narrow_integers_give_internal_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_ct"))
        .args(["cycle", "--k", "3", "--m", "12", "--t-max", "12"])
        .env("CT_MAX_INT_BITS", "16")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cycle_prefix_matches_iteration() {
    let o = ct(&["cycle", "--k", "3", "--m", "4", "--t-max", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("(2, 0, 1, 3, 7, 15, 31)"));
}

#[test]
fn classify_lists_predicates() {
    let o = ct(&["classify", "[0(3),1(3)]", "[0(3),2(3)]"]);
    let text = stdout(&o);
    assert!(text.contains("horizontal: true"));
    assert!(text.contains("common_vertex: true"));
    assert!(text.contains("equal_modulus: true"));
}

#[test]
fn witness_is_verified() {
    let o = ct(&["witness", "equal-residue", "[0(2),1(2)]", "[0(4),1(2)]", "--n", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("chain: (64, 32, 32, 16, 16)"));
    // Moduli 2 and 4 of the unshared classes are not coprime: refused.
    let o = ct(&["witness", "common-vertex", "[0(2),1(2)]", "[0(4),1(2)]"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn graph_lists_components() {
    let o = ct(&["graph", "[0(2),1(2)]", "[0(2),1(2)]", "--bound", "10", "--dump-edges"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("[first]") && text.contains("[second]"));
    assert!(text.contains("Type1 len=4"));
}

#[test]
fn survey_writes_reports() {
    let dir = std::env::temp_dir().join(format!("ct-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("pairs.csv");
    let json = dir.join("summary.json");
    let o = ct(&[
        "survey",
        "--mod-max",
        "3",
        "--workers",
        "1",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("all orders in Kohl set: true"));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("m1,r1,m2,r2,m3,r3,m4,r4,"));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(summary["histogram"].is_object());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn survey_rejects_unknown_filter() {
    assert_eq!(ct(&["survey", "--mod-max", "3", "--filter", "bogus"]).status.code(), Some(1));
}
