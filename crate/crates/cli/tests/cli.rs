use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toolbudget"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

#[test]
fn benchmark_run_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let bench = dir.path().join("bench.json");
    let runs = dir.path().join("runs");
    ok(&["gen-benchmark", "--seed", "42", "--out", s(&bench)]);
    let again = ok(&["gen-benchmark", "--seed", "42"]);
    assert_eq!(again.trim_end(), std::fs::read_to_string(&bench).unwrap().trim_end());

    let summary = ok(&["run", "--benchmark", s(&bench), "--out", s(&runs), "--workers", "2"]);
    assert!(summary.contains("600 written"), "{summary}");
    let rerun = ok(&["run", "--benchmark", s(&bench), "--out", s(&runs)]);
    assert!(rerun.contains("0 written, 600 already present"), "{rerun}");

    let records = runs.join("records.jsonl");
    for shape in ["enablement", "budget", "frontier", "qtype", "delta-matrix"] {
        let text = ok(&["report", "--records", s(&records), "--shape", shape]);
        assert!(text.lines().count() > 3, "{shape}: {text}");
    }
    let tables = dir.path().join("tables");
    ok(&["report", "--records", s(&records), "--shape", "budget", "--out", s(&tables)]);
    let csv = std::fs::read_to_string(tables.join("budget.csv")).unwrap();
    assert!(csv.starts_with("window,format,n,schema_tokens,b_rag,mean_k,overflow_rate"));

    let st = json(&ok(&["stats", "--records", s(&records), "--window", "8192"]));
    assert_eq!(st["n"], 100);
    assert!(st["p"].as_f64().unwrap() < 1e-20);

    let fit = json(&ok(&["fit-curve", "--records", s(&records)]));
    let gains = fit["marginal_gains"].as_array().unwrap();
    assert_eq!(gains.len(), 5);
    assert!(gains[0].as_f64().unwrap() >= gains[1].as_f64().unwrap());
}

#[test]
fn compress_and_plan_budget() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.json");
    ok(&["gen-frontier", "--n", "20", "--seed", "3", "--out", s(&cat)]);
    let o = run(&["compress", "--catalog", s(&cat), "--format", "balanced"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 20);
    assert!(String::from_utf8_lossy(&o.stderr).contains("20 tools"));

    let plan = json(&ok(&["plan-budget", "--window", "8192", "--schema-tokens", "5500", "--query-tokens", "15"]));
    assert_eq!(plan["b_rag"], 330);
    assert_eq!(plan["slack"], 315);
    assert_eq!(plan["overflow"], false);
    let over = json(&ok(&["plan-budget", "--window", "8192", "--catalog", s(&cat), "--format", "json"]));
    assert!(over["schema_tokens"].as_u64().unwrap() > 0);
}

#[test]
fn stats_from_differences() {
    let v = json(&ok(&["stats", "--diffs", "1,2,3,4,5"]));
    assert!((v["p"].as_f64().unwrap() - 0.0625).abs() < 1e-9);
    assert_eq!(v["n"], 5);
}

#[test]
fn sweep_thresholds_without_episodes() {
    let v = ok(&["sweep-frontier", "--per-tool", "405", "--savings", "0.5", "--skip-run", "--formats", "json"]);
    let reports = json(&v);
    assert_eq!(reports[0]["complete_overflow_n"], 488);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["gen-benchmark", "--placement", "sideways"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let o = run(&["run", "--benchmark", s(&missing), "--out", s(&dir.path().join("r"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(run(&["run"]).status.code(), Some(2));

    let bench = dir.path().join("bench.json");
    ok(&["gen-benchmark", "--out", s(&bench)]);
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let cfg = dir.path().join("http.cfg");
    std::fs::write(
        &cfg,
        format!(
            "benchmark = {}\nclient = http\nendpoint = http://127.0.0.1:{port}\nmodel = m\n\
             max_retries = 0\nbackoff_ms = 1\ntimeout_secs = 2\nwindows = 32768\n",
            bench.display()
        ),
    )
    .unwrap();
    let o = run(&["run", "--config", s(&cfg), "--out", s(&dir.path().join("h"))]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
