//! Tool-count sweeps: where retrieval first loses a chunk, where the window
//! overflows outright, and oracle accuracy at large catalog sizes.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::prng::stream;
use crate::bench::{distractor_chunks, generate_frontier_catalog, BenchError, Benchmark};
use crate::budget::{allocate, BudgetConfig};
use crate::compress::{compress_tool, SchemaFormat};
use crate::harness::{ClientError, Harness, ModelClient, RunOptions};
use crate::schema::{serialize_tool, ToolCatalog};
use crate::tokens::{normalized_len, TokenCountProfile};

pub const DEFAULT_FRONTIER_CHUNKS: usize = 500;
pub const DEFAULT_FRONTIER_CHUNK_TOKENS: usize = 350;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("episode {run_id} failed")]
    Episode { run_id: String, source: ClientError },
}

/// Schema cost of the first `n` tools for each format.
#[derive(Debug, Clone, PartialEq)]
pub enum FrontierCosts {
    /// Every tool costs `json_per_tool` in JSON and `(1 - savings)` of that
    /// compressed; the schema costs `ceil(n * per_tool)`.
    Constant { json_per_tool: f64, conservative_savings: f64, balanced_savings: f64 },
    /// Measured prefix costs; `prefix[f][n]` is the cost of the first `n` tools.
    Measured { json: Vec<usize>, conservative: Vec<usize>, balanced: Vec<usize> },
}

impl FrontierCosts {
    pub fn constant(json_per_tool: f64, savings: f64) -> Self {
        FrontierCosts::Constant { json_per_tool, conservative_savings: savings, balanced_savings: savings }
    }

    /// Prefix costs computed from per-tool renderings, without re-rendering
    /// every prefix.
    pub fn measured(catalog: &ToolCatalog, counter: &TokenCountProfile) -> Self {
        let prefix = |lens: Vec<usize>, open: usize, sep: usize| {
            let mut out = vec![0usize];
            let mut bytes = open;
            for (i, l) in lens.iter().enumerate() {
                bytes += l + if i > 0 { sep } else { 0 };
                out.push(counter.tokens_for_bytes(bytes));
            }
            out
        };
        let json = catalog.tools().iter().map(|t| normalized_len(&serialize_tool(t))).collect();
        let comp = |f: SchemaFormat| {
            let p = f.profile().expect("compressed format");
            catalog.tools().iter().map(|t| normalized_len(&compress_tool(t, p))).collect::<Vec<_>>()
        };
        FrontierCosts::Measured {
            json: prefix(json, 2, 2),
            conservative: prefix(comp(SchemaFormat::Conservative), 0, 1),
            balanced: prefix(comp(SchemaFormat::Balanced), 0, 1),
        }
    }

    pub fn max_tools(&self) -> Option<usize> {
        match self {
            FrontierCosts::Constant { .. } => None,
            FrontierCosts::Measured { json, .. } => Some(json.len() - 1),
        }
    }

    pub fn schema_tokens(&self, format: SchemaFormat, n: usize) -> usize {
        match self {
            FrontierCosts::Constant { json_per_tool, conservative_savings, balanced_savings } => {
                let per = match format {
                    SchemaFormat::Json => *json_per_tool,
                    SchemaFormat::Conservative => json_per_tool * (1.0 - conservative_savings),
                    SchemaFormat::Balanced => json_per_tool * (1.0 - balanced_savings),
                };
                (n as f64 * per - 1e-9).ceil().max(0.0) as usize
            }
            FrontierCosts::Measured { json, conservative, balanced } => {
                let v = match format {
                    SchemaFormat::Json => json,
                    SchemaFormat::Conservative => conservative,
                    SchemaFormat::Balanced => balanced,
                };
                v[n]
            }
        }
    }
}

/// Retrieval corpus as token costs in rank order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    pub chunk_tokens: Vec<usize>,
}

impl CorpusSpec {
    pub fn uniform(n: usize, tokens: usize) -> Self {
        Self { chunk_tokens: vec![tokens; n] }
    }
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self::uniform(DEFAULT_FRONTIER_CHUNKS, DEFAULT_FRONTIER_CHUNK_TOKENS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub window: usize,
    pub format: SchemaFormat,
    pub first_chunk_loss_n: Option<usize>,
    pub complete_overflow_n: Option<usize>,
    /// Mean schema cost per tool at the largest count swept.
    pub per_tool_mean: f64,
    /// Savings relative to JSON at the largest count swept.
    pub savings: f64,
    pub n_max: usize,
}

pub fn sweep_thresholds(
    config: &BudgetConfig,
    format: SchemaFormat,
    costs: &FrontierCosts,
    corpus: &CorpusSpec,
    n_max: usize,
    granularity: usize,
) -> Result<ThresholdReport, SweepError> {
    if n_max < 1 || granularity < 1 {
        return Err(SweepError::InvalidArgument("n_max and granularity must be at least 1".into()));
    }
    if let Some(m) = costs.max_tools() {
        if n_max > m {
            return Err(SweepError::InvalidArgument(format!("cost table covers {m} tools, asked for {n_max}")));
        }
    }
    let ids: Vec<String> = (0..corpus.chunk_tokens.len()).map(|i| i.to_string()).collect();
    let mut first_loss = None;
    let mut overflow = None;
    let mut n = granularity;
    while n <= n_max && overflow.is_none() {
        let schema = costs.schema_tokens(format, n);
        let a = allocate(config, schema, ids.iter().map(String::as_str).zip(corpus.chunk_tokens.iter().copied()));
        if first_loss.is_none() && (a.overflow || a.k < corpus.chunk_tokens.len() || a.truncated_last) {
            first_loss = Some(n);
        }
        if a.overflow {
            overflow = Some(n);
        }
        n += granularity;
    }
    let schema_max = costs.schema_tokens(format, n_max) as f64;
    let json_max = costs.schema_tokens(SchemaFormat::Json, n_max) as f64;
    Ok(ThresholdReport {
        window: config.window,
        format,
        first_chunk_loss_n: first_loss,
        complete_overflow_n: overflow,
        per_tool_mean: schema_max / n_max as f64,
        savings: if json_max > 0.0 { 1.0 - schema_max / json_max } else { 0.0 },
        n_max,
    })
}

/// The base benchmark with its catalog grown to `n_tools` synthetic tools and
/// its corpus padded with distractors to `corpus_size` chunks. Gold chunks
/// keep their ranks; every other rank is reshuffled across the larger pool.
pub fn frontier_benchmark(
    base: &Benchmark,
    n_tools: usize,
    seed: u64,
    corpus_size: usize,
    chunk_tokens: usize,
) -> Result<Benchmark, SweepError> {
    let base_n = base.catalog.len();
    if n_tools < base_n {
        return Err(SweepError::InvalidArgument(format!("frontier catalogs keep all {base_n} base tools")));
    }
    let mut b = base.clone();
    if n_tools > base_n {
        let extra = generate_frontier_catalog(n_tools - base_n, seed)?;
        b.catalog = base
            .catalog
            .extended(extra.tools())
            .map_err(|e| SweepError::InvalidArgument(format!("frontier tool clashes with base catalog: {e}")))?;
    }
    let pad = corpus_size.saturating_sub(base.chunks.len());
    b.chunks.extend(distractor_chunks(seed, pad, chunk_tokens));
    let mut rng = stream(seed, "frontier/ranking");
    for q in &b.questions {
        let gold: BTreeSet<&str> = q.gold_chunk_ids.iter().map(String::as_str).collect();
        let old = &base.retrieval_rank[&q.id];
        let mut pool: Vec<String> = old.iter().filter(|id| !gold.contains(id.as_str())).cloned().collect();
        pool.extend(b.chunks[base.chunks.len()..].iter().map(|c| c.id.clone()));
        pool.shuffle(&mut rng);
        let mut pool = pool.into_iter();
        let mut rank: Vec<String> = old
            .iter()
            .map(|id| if gold.contains(id.as_str()) { id.clone() } else { pool.next().expect("pool") })
            .collect();
        rank.extend(pool);
        b.retrieval_rank.insert(q.id.clone(), rank);
    }
    Ok(b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub n_tools: usize,
    pub format: SchemaFormat,
    pub schema_tokens: usize,
    pub em_pct: f64,
    pub mean_f1: f64,
    pub mean_k: f64,
    pub overflow_rate: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn frontier_run(
    config: &BudgetConfig,
    tool_counts: &[usize],
    formats: &[SchemaFormat],
    base: &Benchmark,
    client: &dyn ModelClient,
    seed: u64,
    corpus_size: usize,
    chunk_tokens: usize,
) -> Result<Vec<FrontierRow>, SweepError> {
    let mut rows = Vec::new();
    for &n in tool_counts {
        let bench = frontier_benchmark(base, n, seed, corpus_size, chunk_tokens)?;
        let harness = Harness::new(&bench, TokenCountProfile::default());
        let opts = RunOptions { seed, ..RunOptions::default() };
        for &format in formats {
            let records: Vec<_> =
                bench.questions.par_iter().map(|q| harness.run(q, format, config, client, &opts)).collect();
            if let Some(r) = records.iter().find(|r| r.error.is_some()) {
                return Err(SweepError::Episode {
                    run_id: r.run_id.clone(),
                    source: r.error.clone().expect("checked"),
                });
            }
            let m = records.len() as f64;
            rows.push(FrontierRow {
                n_tools: n,
                format,
                schema_tokens: harness.view(format).tokens,
                em_pct: 100.0 * records.iter().map(|r| f64::from(r.metrics.em)).sum::<f64>() / m,
                mean_f1: records.iter().map(|r| r.metrics.f1).sum::<f64>() / m,
                mean_k: records.iter().map(|r| r.allocation.k as f64).sum::<f64>() / m,
                overflow_rate: records.iter().map(|r| f64::from(r.metrics.overflow)).sum::<f64>() / m,
            });
        }
    }
    Ok(rows)
}
