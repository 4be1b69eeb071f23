//! End-to-end tests of the binary: spec loading, report shapes, exit
//! codes, and byte-level determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coarsegeom"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ends_reports_free_group_counts() {
    let out = run(&[
        "ends",
        "--graph",
        r#"{"type":"free","rank":2}"#,
        "--levels",
        "1,2,3",
        "--horizon",
        "offset:2",
    ]);
    let v = stdout_json(&out);
    let counts: Vec<u64> = v["result"]["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![12, 36, 108]);
}

#[test]
fn ends_writes_dot_files() {
    let dir = std::env::temp_dir().join("coarsegeom-dot-test");
    std::fs::create_dir_all(&dir).unwrap();
    let dot = dir.join("tree.dot");
    let out = run(&[
        "ends",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--levels",
        "1,2,4",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("rank=same"));
}

#[test]
fn delta_on_path_and_cycle() {
    let out = run(&[
        "delta",
        "--space",
        r#"{"type":"finite","edges":[[0,1],[1,2],[2,3]],"root":0}"#,
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["delta"], 0.0);

    let out = run(&[
        "delta",
        "--space",
        r#"{"type":"finite","edges":[[0,1],[1,2],[2,3],[3,0]],"root":0}"#,
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["delta"], 4.0);
    assert!(v["result"]["witness"].is_object());
}

#[test]
fn equiv_distinguishes_opposite_rays() {
    let out = run(&[
        "equiv",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--rel",
        "metric",
        "--x",
        r#"{"builtin":"axis","direction":[1]}"#,
        "--y",
        r#"{"builtin":"axis","direction":[-1]}"#,
        "--len",
        "80",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["verdict"]["status"], "Distinguished");
    assert!(v["result"]["verdict"]["witness_index"].is_number());
}

#[test]
fn diag_certificate_gap() {
    let out = run(&["diag", "--family", "zero", "--rmax", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["certificates"][0]["gap"], 2.0);
    assert_eq!(v["result"]["xi"][0][0], 2.0);
}

#[test]
fn corona_partitions_line_rays() {
    let out = run(&[
        "corona",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--rays",
        r#"[{"builtin":"axis","direction":[1]},{"points":[[3],[4],[5],[6],[7],[8],[9],[10],[11],[12],[13],[14],[15],[16],[17],[18],[19],[20],[21],[22],[23],[24],[25],[26],[27],[28],[29],[30],[31],[32],[33],[34],[35],[36],[37],[38],[39],[40]]},{"builtin":"axis","direction":[-1]}]"#,
        "--rel",
        "metric",
        "--len",
        "38",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["classes"], serde_json::json!([[0, 1], [2]]));
}

#[test]
fn axioms_report_shape() {
    let out = run(&[
        "axioms",
        "--generators",
        r#"[[[1,2]],[[2,3]]]"#,
        "--points",
        "4",
        "--depth",
        "3",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["compositions_within_closure"], true);
    assert_eq!(v["result"]["diagonal_within_closure"], true);
}

#[test]
fn collar_cover_multiplicity_bound() {
    let out = run(&[
        "collar-cover",
        "--boundary",
        "point",
        "--levels",
        "32",
        "--k",
        "0",
    ]);
    let v = stdout_json(&out);
    let mult = v["result"]["multiplicity"].as_u64().unwrap();
    assert!(mult <= 3, "multiplicity {mult}");

    let out = run(&[
        "collar-cover",
        "--boundary",
        "cycle:8:0.125",
        "--levels",
        "48",
        "--k",
        "1",
    ]);
    let v = stdout_json(&out);
    let mult = v["result"]["multiplicity"].as_u64().unwrap();
    assert!(mult <= 6, "multiplicity {mult}");
}

#[test]
fn so_profile_writes_csv() {
    let dir = std::env::temp_dir().join("coarsegeom-csv-test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("profile.csv");
    let out = run(&[
        "so-profile",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--field",
        "(1+sin(log(1+x)))/2",
        "--radii",
        "10,40",
        "--meshes",
        "5",
        "--horizon",
        "80",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("r,M,defect,witness"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn maps_close_check() {
    let rays = r#"[{"builtin":"axis","direction":[1]}]"#;
    let out = run(&[
        "maps",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--map",
        "identity",
        "--map2",
        "scale:2",
        "--check",
        "close",
        "--rel",
        "metric",
        "--rays",
        rays,
        "--len",
        "80",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["verdict"]["status"], "Distinguished");

    let out = run(&[
        "maps",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--map",
        "floordiv:2",
        "--check",
        "coarse",
        "--rel",
        "metric",
        "--rays",
        rays,
        "--len",
        "80",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["verdict"]["status"], "Equivalent");
}

#[test]
fn schema_errors_exit_two() {
    let out = run(&[
        "equiv",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--rel",
        "nonsense",
        "--x",
        r#"{"builtin":"axis","direction":[1]}"#,
        "--y",
        r#"{"builtin":"axis","direction":[1]}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--rel"));

    let out = run(&["ends", "--graph", r#"{"type":"zd"}"#, "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn operation_errors_exit_one() {
    // a constant table ray is not a simple end
    let out = run(&[
        "equiv",
        "--graph",
        r#"{"type":"zd","d":1}"#,
        "--rel",
        "metric",
        "--x",
        r#"{"points":[[0],[0],[0],[0],[0],[0],[0],[0]]}"#,
        "--y",
        r#"{"builtin":"axis","direction":[1]}"#,
        "--len",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a simple end"));
}

#[test]
fn identical_configs_are_byte_identical() {
    let args = [
        "corona",
        "--graph",
        r#"{"type":"free","rank":2}"#,
        "--rays",
        r#"[{"builtin":"word","cycle":"a"},{"builtin":"word","cycle":"b"},{"builtin":"word","head":"a","cycle":"b"}]"#,
        "--rel",
        "gromov",
        "--len",
        "48",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["result"]["classes"], serde_json::json!([[0], [1], [2]]));
}
