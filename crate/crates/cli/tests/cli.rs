use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binomratio"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn limit_prints_json() {
    let out = run(&["limit", "--n", "1000000", "--m", "1000000", "--regime", "case2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["regime"]["case"], "case2");
    assert!((v["variance"].as_f64().unwrap() - 1.0477378964424133e-7).abs() < 1e-20);
}

#[test]
fn simulate_writes_histograms_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = run(&[
        "simulate",
        "--n",
        "10000",
        "--m",
        "10000",
        "--regime",
        "case2",
        "--samples",
        "5000",
        "--bins",
        "20",
        "--seed",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["simulated"]["counts"].as_array().unwrap().len(), 20);
    assert_eq!(v["reference"]["edges"].as_array().unwrap().len(), 21);
    assert_eq!(v["report"]["direction"], "forward");
    assert_eq!(v["seed"]["master_seed"], 9);
    assert!(v["report"]["kl"].as_f64().unwrap() >= 0.0);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--n",
        "5000",
        "--m",
        "100",
        "--regime",
        "case3",
        "--samples",
        "2000",
        "--seed",
        "4",
    ];
    let a: serde_json::Value = serde_json::from_str(&stdout(&run(&args))).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&run(&args))).unwrap();
    assert_eq!(a["report"], b["report"]);
    assert_eq!(a["simulated"], b["simulated"]);
}

#[test]
fn sweep_spec_file_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sweep.toml");
    std::fs::write(
        &spec,
        r#"
regime = "case2"
vary = "r"
samples = 2000
bins = 40
master_seed = 11

[base]
n = 100000
m = 100000
p = 0.5
s = 15.0
r = 15.0

[grid]
values = [1.0, 15.0, 30.0]
"#,
    )
    .unwrap();
    let out = run(&["sweep", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "varied_param,varied_value,kl,direction,smoothed_bins,zero_denominator_count,seed,wall_time_ms"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("r,1.5000000000000000e1,"));
    assert!(!text.contains('\r'));
}

#[test]
fn fig4d_preset_warns() {
    let out = run(&["sweep", "--preset", "fig4d", "--samples", "500"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig4d"));
    assert_eq!(stdout(&out).lines().count(), 12);
}

#[test]
fn oracle_small_instance() {
    let out = run(&["oracle", "--n", "2", "--m", "2", "--s", "1", "--r", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["mean"].as_f64().unwrap() - 15.0 / 32.0).abs() < 1e-15);
    assert_eq!(v["support"].as_array().unwrap().len(), 9);
}

#[test]
fn bound_prints_a_table() {
    let out = run(&[
        "bound",
        "--n",
        "10000",
        "--m",
        "10000",
        "--regime",
        "case2",
        "--samples",
        "1000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for key in ["bound", "q50", "q99", "q100"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "{text}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["limit", "--n", "10", "--m", "10", "--p", "1.0", "--regime", "case1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["limit", "--n", "10", "--m", "10", "--regime", "case2", "--alpha", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["sweep", "--preset", "fig9z"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--n", "10", "--m", "10", "--regime", "case1", "--bins", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["oracle", "--n", "100000", "--m", "10000"]).status.code(), Some(3));
    assert_eq!(run(&["limit", "--n", "10"]).status.code(), Some(2));
}
