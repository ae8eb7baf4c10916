use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn omcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omcs")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen(dir: &Path, key: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{}.sv", key.replace(['(', ')', ','], "_")));
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["gen", key, "--out", &p];
    args.extend_from_slice(extra);
    assert!(omcs(&args).status.success());
    p
}

#[test]
fn table_fixture_verifies() {
    let o = omcs(&[
        "scheme-verify",
        "--class",
        fixture("paper4.sv").to_str().unwrap(),
        "--scheme",
        fixture("table1.json").to_str().unwrap(),
        "--size",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("samples: 65"));
    assert!(stdout(&o).ends_with("PASS\n"));
}

#[test]
fn table_fixture_fails_with_size_one() {
    let o = omcs(&[
        "scheme-verify",
        "--class",
        fixture("paper4.sv").to_str().unwrap(),
        "--scheme",
        fixture("table1.json").to_str().unwrap(),
        "--size",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).ends_with("FAIL\n"));
}

#[test]
fn built_schemes_verify() {
    let dir = tempfile::tempdir().unwrap();
    let class = fixture("paper4.sv");
    let out = dir.path().join("scheme.json");
    let o = omcs(&[
        "scheme-build",
        "--class",
        class.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = omcs(&[
        "scheme-verify",
        "--class",
        class.to_str().unwrap(),
        "--scheme",
        out.to_str().unwrap(),
        "--size",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn outputs_are_deterministic() {
    let class = fixture("paper4.sv");
    let a = omcs(&["scheme-build", "--class", class.to_str().unwrap()]);
    let b = omcs(&["scheme-build", "--class", class.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let tri = gen(dir.path(), "tri", &[]);
    assert_eq!(omcs(&["peel", &tri]).stdout, omcs(&["peel", &tri]).stdout);
}

#[test]
fn rank_and_vc_of_the_cube() {
    let dir = tempfile::tempdir().unwrap();
    let cube = gen(dir.path(), "cube(3)", &[]);
    assert_eq!(stdout(&omcs(&["rank", &cube])), "3\n");
    assert_eq!(stdout(&omcs(&["vc", &cube])), "3\nshattered: {1,2,3}\n");
    // Topes alone are enough: the covectors are recovered.
    let topes = gen(dir.path(), "cube(2)", &["--topes"]);
    assert_eq!(stdout(&omcs(&["rank", &topes])), "2\n");
}

#[test]
fn classify_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let tri = gen(dir.path(), "tri", &[]);
    assert!(stdout(&omcs(&["classify", &tri])).starts_with("verdict: COM_NOT_OM\n"));
    let om = gen(dir.path(), "cycle(4)", &[]);
    assert!(stdout(&omcs(&["classify", &om])).starts_with("verdict: OM\n"));
    // A COM has no rank.
    assert_eq!(omcs(&["rank", &tri]).status.code(), Some(3));
}

#[test]
fn matrix_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mat");
    fs::write(&path, "2 3\n1 0 1\n0 1 1/2\n").unwrap();
    let p = path.to_str().unwrap();
    assert!(stdout(&omcs(&["classify", p])).starts_with("verdict: OM\n"));
    assert_eq!(stdout(&omcs(&["cocircuits", p])).lines().count(), 6);
    assert_eq!(stdout(&omcs(&["topes", p])).lines().count(), 6);
    fs::write(&path, "2 3\n1 0 x\n0 1 1\n").unwrap();
    assert_eq!(omcs(&["classify", p]).status.code(), Some(2));
}

#[test]
fn corner_of_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let c = gen(dir.path(), "cycle(5)", &[]);
    let out = stdout(&omcs(&["corner", &c]));
    assert!(out.contains("size: 4\n"), "{out}");
    assert_eq!(out.lines().skip_while(|l| *l != "topes:").count(), 5);
}

#[test]
fn programs_and_negative_results() {
    let dir = tempfile::tempdir().unwrap();
    let base = gen(dir.path(), "tri", &["--base"]);
    let o = omcs(&[
        "program-solve",
        &base,
        "--g",
        "4",
        "--f",
        "1",
        "--constraints",
        "1=+,2=+,3=-",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("solution: "));
    let o = omcs(&[
        "program-solve",
        &base,
        "--g",
        "4",
        "--f",
        "1",
        "--constraints",
        "1=-,2=-",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).starts_with("UNBOUNDED"));
    let o = omcs(&[
        "program-solve",
        &base,
        "--g",
        "4",
        "--f",
        "1",
        "--constraints",
        "1=-,2=-,3=+",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stdout(&o), "EMPTY\n");
    let o = omcs(&["program-solve", &base, "--g", "4", "--f", "9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn peeling_a_triangle_arrangement() {
    let dir = tempfile::tempdir().unwrap();
    let tri = gen(dir.path(), "tri", &[]);
    let out = stdout(&omcs(&["peel", &tri]));
    assert!(out.starts_with("steps: 7\n"), "{out}");
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(omcs(&["gen", "nonsense"]).status.code(), Some(1));
    assert_eq!(omcs(&["classify", "/nonexistent/file.sv"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sv");
    fs::write(&bad, "++\n+a\n").unwrap();
    let o = omcs(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column 2"));
    let big = gen(dir.path(), "cube(4)", &[]);
    assert_eq!(omcs(&["--max-universe", "3", "classify", &big]).status.code(), Some(3));
}

#[test]
fn missing_reconstruction_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("table1.json")).unwrap();
    let broken: String = text
        .lines()
        .filter(|l| !l.contains("\"set\": [1, 4]"))
        .map(|l| format!("{l}\n"))
        .collect();
    let path = dir.path().join("broken.json");
    fs::write(&path, broken).unwrap();
    let o = omcs(&[
        "scheme-verify",
        "--class",
        fixture("paper4.sv").to_str().unwrap(),
        "--scheme",
        path.to_str().unwrap(),
        "--size",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}
