use std::path::Path;
use std::process::{Command, Output};

fn ecfr(args: &[&str], data: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecfr"))
        .args(args)
        .env("ECFR_DATA_DIR", data)
        .output()
        .expect("run ecfr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn enumerate_prints_view_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ecfr(&["enumerate", "--game", "numeral211"], tmp.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows, ["1,780,", "2,29640,", "3,1096680,"]);

    let o = ecfr(&["enumerate", "--game", "numeral20", "--round", "3", "--classes"], tmp.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().last().unwrap(), "3,58140,3185");

    let o = ecfr(&["enumerate", "--game", "numeral20", "--round", "9"], tmp.path());
    assert!(!o.status.success());
}

#[test]
fn solve_then_eval_on_kuhn() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let out_s = out.to_str().unwrap();
    let o = ecfr(
        &["solve", "--game", "kuhn", "--solver", "vanilla", "--iters", "64", "--eval-every", "16", "--out", out_s],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 2 + 4);
    let last = metrics.lines().last().unwrap().to_string();

    let strategy = out.join("strategy.bin");
    let o = ecfr(&["eval", "--game", "kuhn", "--strategy", strategy.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "b1,b2,epsilon,epsilon_mbg");
    // the eval row equals the last metrics row without its iteration column
    assert_eq!(lines.next().unwrap(), last.split_once(',').unwrap().1);
}

#[test]
fn missing_artifacts_fail_with_a_hint() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = ecfr(
        &["solve", "--game", "numeral20", "--solver", "embedding", "--m", "40%", "--iters", "1", "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("embedding_round2_m102.bin") && err.contains("train-embedding"), "{err}");

    let o = ecfr(&["eval", "--game", "kuhn", "--strategy", "/nonexistent/strategy.bin"], tmp.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing artifact"));
}

#[test]
fn full_scale_requires_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ecfr(
        &["solve", "--game", "numeral211", "--iters", "1", "--out", tmp.path().join("x").to_str().unwrap()],
        tmp.path(),
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--full"));
}
