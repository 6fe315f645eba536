use std::io::Write;
use std::process::{Command, Output, Stdio};

fn modk(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_modk"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn k5() -> String {
    stdout(&modk(&["gen", "--generator", "complete", "--n", "5"], ""))
}

#[test]
fn gen_is_seeded() {
    let args = ["--seed", "9", "gen", "--n", "6", "--m", "12", "--count", "3"];
    let a = modk(&args, "");
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&modk(&args, "")));
    assert_eq!(stdout(&a).matches("mg 6 12").count(), 3);
}

#[test]
fn orient_then_verify() {
    let g = k5();
    let dir = std::env::temp_dir().join(format!("modk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let gpath = dir.join("k5.mg");
    std::fs::write(&gpath, &g).unwrap();
    let o = modk(&["--k", "3", "--mod", "2", "orient", "-", "--method", "search"], &g);
    assert_eq!(code(&o), 0);
    let gp = gpath.to_str().unwrap();
    assert_eq!(code(&modk(&["--k", "3", "--mod", "2", "verify", gp, "-"], &stdout(&o))), 0);
    let bad = modk(&["--k", "3", "--mod", "1,2,2,2,2", "verify", gp, "-"], &stdout(&o));
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("violation"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes() {
    let g = k5();
    // no 3-star decomposition: 10 edges
    assert_eq!(code(&modk(&["--k", "3", "factor", "-", "--kind", "stars"], &g)), 2);
    // mod-3 residues summing to 5, not 10
    assert_eq!(code(&modk(&["--k", "3", "--mod", "1", "orient", "-", "--method", "search"], &g)), 1);
    assert_eq!(code(&modk(&["orient", "-"], "mg 2 1\ne 0 7\n")), 2);
    assert_eq!(code(&modk(&["frobnicate"], "")), 2);
    let k8 = stdout(&modk(&["gen", "--generator", "complete", "--n", "8"], ""));
    let budget = modk(&["--budget", "3", "--k", "4", "--mod", "1", "orient", "-", "--method", "search"], &k8);
    assert_eq!(code(&budget), 3);
}

#[test]
fn suite_json_report() {
    let o = modk(&["--format", "json", "suite", "k8-negative"], "");
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "k8-negative");
    assert_eq!(v["passed"], 1);
}

#[test]
fn probe_reports_status() {
    let args = ["--k", "3", "probe", "conj-2k-1", "--generator", "circulant", "--n", "7", "--connections", "1,2,3"];
    let o = modk(&args, "");
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("status none found"));
}
