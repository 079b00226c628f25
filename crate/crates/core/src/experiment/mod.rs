//! Experiment orchestration: resumable run-record files and report tables.

mod config;
mod report;

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{ClientSpec, ConfigError, ExperimentConfig, DEFAULT_SEED, DEFAULT_WINDOWS};
pub use report::{
    curve_points, curve_table, paired_samples, paired_stats, report, CurveMetric, PairedStats, ReportOptions,
    ReportShape, Table,
};

use crate::bench::{load_benchmark, BenchError};
use crate::budget::BudgetConfig;
use crate::compress::SchemaFormat;
use crate::harness::{
    ClientErrorKind, EpisodeRecord, Harness, HttpClient, ModelClient, OracleClient, RecordKey, RunOptions,
};

pub const RECORDS_FILE: &str = "records.jsonl";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("io error on {path}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: bad run record: {message}")]
    Record { path: String, line: usize, message: String },
    #[error("client unreachable: {0}")]
    Unreachable(String),
    #[error("{0}")]
    Unpairable(String),
    #[error("{0}")]
    Invalid(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub path: PathBuf,
    pub total: usize,
    pub written: usize,
    pub skipped: usize,
    pub errors: usize,
}

impl RunSummary {
    pub fn error_rate(&self) -> f64 {
        if self.written == 0 {
            0.0
        } else {
            self.errors as f64 / self.written as f64
        }
    }
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} episodes: {} written, {} already present, {} errors ({:.1}% error rate) -> {}",
            self.total,
            self.written,
            self.skipped,
            self.errors,
            100.0 * self.error_rate(),
            self.path.display()
        )
    }
}

pub fn build_client(spec: &ClientSpec) -> Box<dyn ModelClient> {
    match spec {
        ClientSpec::Oracle { epsilon, seed } => Box::new(OracleClient::new(*epsilon, *seed)),
        ClientSpec::Http(h) => Box::new(HttpClient::new(h.clone())),
    }
}

/// Reads a run-record file. A final line without a newline that fails to
/// parse is treated as an interrupted write and ignored; its byte offset is
/// returned so an appender can cut it off.
fn read_records_tolerant(path: &Path) -> Result<(Vec<EpisodeRecord>, Option<u64>), ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    let mut offset = 0u64;
    let total = text.len();
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let start = offset;
        offset += line.len() as u64;
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        match serde_json::from_str::<EpisodeRecord>(body) {
            Ok(r) => out.push(r),
            Err(_) if !line.ends_with('\n') && offset as usize == total => return Ok((out, Some(start))),
            Err(e) => {
                return Err(ExperimentError::Record {
                    path: path.display().to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok((out, None))
}

pub fn load_records(path: &Path) -> Result<Vec<EpisodeRecord>, ExperimentError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| ExperimentError::Record {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Runs every (question, format, window) episode not already in the records
/// file and appends the new records.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let client = build_client(&config.client);
    run_experiment_with(config, client.as_ref())
}

pub fn run_experiment_with(config: &ExperimentConfig, client: &dyn ModelClient) -> Result<RunSummary, ExperimentError> {
    config.validate()?;
    let bench = load_benchmark(config.benchmark.as_deref().expect("validated"))?;
    bench.validate()?;
    std::fs::create_dir_all(&config.out_dir).map_err(io_err(&config.out_dir))?;
    let path = config.out_dir.join(RECORDS_FILE);

    let mut done: BTreeSet<RecordKey> = BTreeSet::new();
    if path.exists() {
        let (records, cut) = read_records_tolerant(&path)?;
        if let Some(at) = cut {
            let f = OpenOptions::new().write(true).open(&path).map_err(io_err(&path))?;
            f.set_len(at).map_err(io_err(&path))?;
        }
        done.extend(records.iter().map(EpisodeRecord::key));
    }

    let harness = Harness::new(&bench, config.counter);
    let opts = RunOptions { max_iters: config.max_iters, max_chunks: None, seed: config.seed };
    let client_id = client.id();
    let hash = bench.content_hash();
    let mut jobs = Vec::new();
    for &window in &config.windows {
        for &format in &config.formats {
            for q in &bench.questions {
                jobs.push((q, format, window));
            }
        }
    }
    let total = jobs.len();
    let pending: Vec<_> = jobs
        .into_iter()
        .filter(|(q, format, window)| {
            !done.contains(&RecordKey {
                benchmark_hash: hash.clone(),
                question_id: q.id.clone(),
                format: *format,
                window: *window,
                client_id: client_id.clone(),
                seed: config.seed,
            })
        })
        .collect();
    let mut summary = RunSummary { path: path.clone(), total, written: 0, skipped: total - pending.len(), errors: 0 };
    if pending.is_empty() {
        return Ok(summary);
    }

    let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
    file.seek(SeekFrom::End(0)).map_err(io_err(&path))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::Invalid(e.to_string()))?;
    let run = |&(q, format, window): &(&crate::bench::Question, SchemaFormat, usize)| {
        harness.run(q, format, &BudgetConfig::new(window), client, &opts)
    };

    let mut write = |records: &[EpisodeRecord], summary: &mut RunSummary| -> Result<(), ExperimentError> {
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(r).expect("records serialize"));
            buf.push('\n');
            summary.written += 1;
            summary.errors += usize::from(r.error.is_some());
        }
        file.write_all(buf.as_bytes()).map_err(io_err(&path))?;
        file.flush().map_err(io_err(&path))
    };
    // Episodes run one at a time until one reaches the client, so a dead
    // endpoint fails fast. Overflowed episodes never call it.
    let mut start = 0;
    while start < pending.len() {
        let r = run(&pending[start]);
        start += 1;
        if let Some(e) = &r.error {
            if matches!(e.kind, ClientErrorKind::Transport | ClientErrorKind::Timeout) {
                return Err(ExperimentError::Unreachable(e.to_string()));
            }
        }
        write(std::slice::from_ref(&r), &mut summary)?;
        if !r.allocation.overflow {
            break;
        }
    }
    let batch = config.workers * 8;
    for chunk in pending[start..].chunks(batch) {
        let records: Vec<EpisodeRecord> = pool.install(|| chunk.par_iter().map(run).collect());
        write(&records, &mut summary)?;
    }
    Ok(summary)
}
