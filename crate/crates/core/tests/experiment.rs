use std::collections::BTreeSet;
use std::path::Path;

use toolbudget::bench::{generate_novatech, save_benchmark};
use toolbudget::compress::SchemaFormat;
use toolbudget::experiment::{
    load_records, paired_stats, report, run_experiment, CurveMetric, ExperimentConfig, ExperimentError, ReportOptions,
    ReportShape, RECORDS_FILE,
};

fn setup(dir: &Path) -> ExperimentConfig {
    let bench = dir.join("bench.json");
    save_benchmark(&generate_novatech(42), &bench).unwrap();
    let mut cfg = ExperimentConfig::parse(&format!(
        "benchmark = {}\nout = {}\nworkers = 3  # small pool\n",
        bench.display(),
        dir.join("run").display()
    ))
    .unwrap();
    cfg.validate().unwrap();
    cfg.seed = 42;
    cfg
}

#[test]
fn oracle_run_is_complete_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let first = run_experiment(&cfg).unwrap();
    assert_eq!((first.total, first.written, first.skipped, first.errors), (600, 600, 0, 0));
    let again = run_experiment(&cfg).unwrap();
    assert_eq!((again.written, again.skipped), (0, 600));

    let records = load_records(&first.path).unwrap();
    assert_eq!(records.len(), 600);
    let keys: BTreeSet<_> = records.iter().map(|r| r.key()).collect();
    assert_eq!(keys.len(), 600);
    assert!(records.iter().all(|r| r.error.is_none()));
}

#[test]
fn interrupted_run_resumes_without_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let full = run_experiment(&cfg).unwrap();
    let path = full.path.clone();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut cut = lines[..250].join("\n");
    cut.push('\n');
    cut.push_str(&lines[250][..lines[250].len() / 2]);
    std::fs::write(&path, cut).unwrap();

    let resumed = run_experiment(&cfg).unwrap();
    assert_eq!((resumed.skipped, resumed.written), (250, 350));
    let records = load_records(&path).unwrap();
    let keys: BTreeSet<_> = records.iter().map(|r| r.key()).collect();
    assert_eq!((records.len(), keys.len()), (600, 600));
}

#[test]
fn corrupt_middle_line_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let out = cfg.out_dir.join(RECORDS_FILE);
    std::fs::create_dir_all(&cfg.out_dir).unwrap();
    std::fs::write(&out, "{not json}\n").unwrap();
    assert!(matches!(run_experiment(&cfg), Err(ExperimentError::Record { line: 1, .. })));
}

#[test]
fn reports_are_pure_and_pairing_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path());
    let summary = run_experiment(&cfg).unwrap();
    let records = load_records(&summary.path).unwrap();
    let opts = ReportOptions { bootstrap: true, resamples: 500, ..ReportOptions::default() };
    for shape in ReportShape::ALL {
        let a = report(&records, shape, &opts).unwrap();
        let b = report(&records, shape, &opts).unwrap();
        assert_eq!(a.to_csv(), b.to_csv(), "{}", shape.as_str());
        assert!(!a.rows.is_empty());
    }
    assert_eq!(records, load_records(&summary.path).unwrap());

    let s = paired_stats(&records, SchemaFormat::Json, SchemaFormat::Conservative, CurveMetric::Em, Some(8192), &opts)
        .unwrap();
    assert_eq!(s.n, 100);
    assert!((s.mean_diff - 1.0).abs() < 1e-12);
    assert!(s.p < 1e-20);

    let json_only: Vec<_> = records.iter().filter(|r| r.format == SchemaFormat::Json).cloned().collect();
    assert!(matches!(report(&json_only, ReportShape::Enablement, &opts), Err(ExperimentError::Unpairable(_))));
    let mut missing = records.clone();
    let drop = missing.iter().position(|r| r.format == SchemaFormat::Conservative).unwrap();
    missing.remove(drop);
    assert!(matches!(report(&missing, ReportShape::Enablement, &opts), Err(ExperimentError::Unpairable(_))));
}

#[test]
fn config_errors_are_specific() {
    assert!(ExperimentConfig::parse("").unwrap().validate().is_err());
    assert!(ExperimentConfig::parse("windows = 0").is_err());
    assert!(ExperimentConfig::parse("colour = red").is_err());
    assert!(ExperimentConfig::parse("no equals sign").is_err());
    assert!(ExperimentConfig::parse("client = http\nbenchmark = b.json").unwrap().validate().is_err());
    let cfg = ExperimentConfig::parse("formats = balanced\nformats = json, conservative\nepsilon = 0.1").unwrap();
    assert_eq!(cfg.formats, vec![SchemaFormat::Json, SchemaFormat::Conservative]);
}
