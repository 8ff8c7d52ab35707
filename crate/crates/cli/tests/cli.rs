use std::process::{Command, Output};

fn matjul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matjul"))
        .args(args)
        .env_remove("MATJUL_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn classify_jordan_block_is_julia2() {
    let out = matjul(&["classify", "--poly", "0,0,1", "--matrix", "1;1;0;1"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["stratum"], "Julia2");
    assert_eq!(json["defective"], true);
    assert_eq!(json["params"]["cycle"]["budget"], 1000);
}

#[test]
fn green_prints_six_decimals() {
    let out = matjul(&["green", "--poly", "0,0,1", "--matrix", "2;0;0;0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.693147");
    let out = matjul(&["green", "--poly", "0,0,1", "--matrix", "2;0;0;0.5", "--direct", "30", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["route"]["kind"], "direct");
}

#[test]
fn poly_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, "[[-2,0],[0,0],[1,0]]").unwrap();
    let arg = format!("@{}", path.display());
    let out = matjul(&["green", "--poly", &arg, "--matrix", "3;0;0;0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.962424");
}

#[test]
fn boettcher_jordan_fixture() {
    let out = matjul(&["boettcher", "--poly", "-2,0,1", "--matrix", "3;1;0;3", "--json"]);
    assert!(out.status.success());
    let m: Vec<Vec<Vec<f64>>> = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((m[0][0][0] - 2.618034).abs() < 1e-6);
    assert!((m[0][1][0] - 1.170820).abs() < 1e-6);
    assert!(m[1][0][0].abs() < 1e-9);
    let out = matjul(&["boettcher", "--poly", "-2,0,1", "--matrix", "1;0;0;3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_all_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = matjul(&["verify", "--suite", "all", "--seed", "42", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("property,samples,max_violation,tolerance,pass\n"));
    assert_eq!(csv, stdout(&out));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_is_reproducible() {
    let a = matjul(&["verify", "--suite", "conjugacy", "--seed", "9", "--jobs", "1"]);
    let b = matjul(&["verify", "--suite", "conjugacy", "--seed", "9", "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let one = matjul(&["verify", "--suite", "green-functional-eq", "--seed", "1"]);
    assert!(one.status.success());
}

#[test]
fn render_writes_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let slice = dir.path().join("slice.json");
    std::fs::write(
        &slice,
        r#"{"mode":{"kind":"jordan_plane","q":[[[1,0],[0,0]],[[0,0],[1,0]]]},
            "window":{"center":[0,0],"width":4,"height":4},"resolution":[16,8]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("img.pgm");
    let out = matjul(&[
        "render",
        "--poly",
        "0,0,1",
        "--slice-file",
        slice.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert!(out.status.success());
    let bytes = std::fs::read(&out_path).unwrap();
    assert!(bytes.starts_with(b"P5\n16 8\n255\n"));
    assert_eq!(bytes.len(), 12 + 128);
    let csv_path = dir.path().join("img.csv");
    let out = matjul(&[
        "render",
        "--poly",
        "0,0,1",
        "--slice-file",
        slice.to_str().unwrap(),
        "--quantity",
        "green",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&csv_path).unwrap().starts_with("row,col,value\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(matjul(&["classify", "--poly", "0,0,1"]).status.code(), Some(2));
    assert_eq!(matjul(&["classify", "--poly", "1", "--matrix", "1;0;0;1"]).status.code(), Some(2));
    assert_eq!(matjul(&["green", "--poly", "0,0,1", "--matrix", "1;2;3"]).status.code(), Some(2));
    assert_eq!(matjul(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(matjul(&["frobnicate"]).status.code(), Some(2));
}
