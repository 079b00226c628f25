//! Benchmark model, generation and persistence.

mod novatech;
pub mod pools;
pub mod prng;
pub mod tools;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::schema::ToolCatalog;
use crate::tokens::TokenCountProfile;

pub use novatech::{distractor_chunks, generate_novatech_with};
pub use tools::{frontier_tool, frontier_tool_cost, generate_frontier_catalog, novatech_catalog};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_GOLD_RANK_BOUND: usize = 6;

/// Required number of questions per type in a full benchmark.
pub const QUESTION_MIX: [(QuestionType, usize); 5] = [
    (QuestionType::SingleHopDoc, 25),
    (QuestionType::SingleHopDb, 25),
    (QuestionType::MultiHop, 20),
    (QuestionType::ToolRequiring, 20),
    (QuestionType::Unanswerable, 10),
];

pub const NOT_ANSWERABLE: &str = "not answerable";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    InvalidArgument(String),
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed benchmark file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid benchmark: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChunkCategory {
    Policy,
    Financial,
    Org,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionType {
    SingleHopDoc,
    SingleHopDb,
    MultiHop,
    ToolRequiring,
    Unanswerable,
}

impl QuestionType {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionType::SingleHopDoc => "single_hop_doc",
            QuestionType::SingleHopDb => "single_hop_db",
            QuestionType::MultiHop => "multi_hop",
            QuestionType::ToolRequiring => "tool_requiring",
            QuestionType::Unanswerable => "unanswerable",
        }
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRef {
    pub question_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub id: String,
    pub text: String,
    pub token_cost: usize,
    pub category: ChunkCategory,
    pub spans: Vec<SpanRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldTool {
    pub name: String,
    pub arguments: BTreeMap<String, String>,
    /// Text the simulated tool returns for this call.
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub qtype: QuestionType,
    pub text: String,
    pub gold_answer: String,
    pub aliases: Vec<String>,
    pub gold_chunk_ids: Vec<String>,
    pub gold_tool: Option<GoldTool>,
    pub supporting_spans: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldPlacement {
    /// Gold chunks take the leading ranks in hop order.
    Top,
    /// Gold chunks take random distinct ranks within the bound.
    Scattered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub seed: u64,
    pub gold_placement: GoldPlacement,
    pub gold_rank_bound: usize,
}

impl BenchConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, gold_placement: GoldPlacement::Top, gold_rank_bound: DEFAULT_GOLD_RANK_BOUND }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub format_version: u32,
    pub seed: u64,
    pub gold_placement: GoldPlacement,
    pub gold_rank_bound: usize,
    pub catalog: ToolCatalog,
    pub chunks: Vec<Chunk>,
    pub questions: Vec<Question>,
    pub retrieval_rank: BTreeMap<String, Vec<String>>,
}

pub fn generate_novatech(seed: u64) -> Benchmark {
    generate_novatech_with(&BenchConfig::new(seed))
}

impl Benchmark {
    pub fn chunk(&self, id: &str) -> Option<&Chunk> {
        self.chunks.iter().find(|c| c.id == id)
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    /// Chunks for a question, best rank first.
    pub fn ranked_chunks<'a>(&'a self, question_id: &str) -> impl Iterator<Item = &'a Chunk> + 'a {
        let index: BTreeMap<&str, &Chunk> = self.chunks.iter().map(|c| (c.id.as_str(), c)).collect();
        self.retrieval_rank.get(question_id).into_iter().flatten().filter_map(move |id| index.get(id.as_str()).copied())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("benchmark serializes")
    }

    /// Short content hash identifying this benchmark in run records.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let b: Benchmark = serde_json::from_str(text)?;
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |m: String| Err(BenchError::Validation(m));
        if self.format_version != FORMAT_VERSION {
            return fail(format!("unsupported format_version {}", self.format_version));
        }
        let counter = TokenCountProfile::default();
        let mut chunk_ids = BTreeSet::new();
        for c in &self.chunks {
            if !chunk_ids.insert(c.id.as_str()) {
                return fail(format!("duplicate chunk id {}", c.id));
            }
            if c.token_cost != counter.count_tokens(&c.text) || c.token_cost == 0 {
                return fail(format!("chunk {}: token_cost does not match its text", c.id));
            }
            for s in &c.spans {
                if !c.text.contains(&s.text) {
                    return fail(format!("chunk {}: span for {} is not in the text", c.id, s.question_id));
                }
            }
        }
        let mut counts: BTreeMap<QuestionType, usize> = BTreeMap::new();
        let mut question_ids = BTreeSet::new();
        for q in &self.questions {
            if !question_ids.insert(q.id.as_str()) {
                return fail(format!("duplicate question id {}", q.id));
            }
            *counts.entry(q.qtype).or_default() += 1;
            self.validate_question(q, &chunk_ids)?;
        }
        for (qtype, want) in QUESTION_MIX {
            let got = counts.get(&qtype).copied().unwrap_or(0);
            if got != want {
                return fail(format!("expected {want} {qtype} questions, found {got}"));
            }
        }
        if self.retrieval_rank.len() != self.questions.len() {
            return fail("retrieval_rank must list every question exactly once".into());
        }
        Ok(())
    }

    fn validate_question(&self, q: &Question, chunk_ids: &BTreeSet<&str>) -> Result<(), BenchError> {
        let fail = |m: String| Err(BenchError::Validation(format!("question {} ({}): {m}", q.id, q.qtype)));
        let gold = q.gold_chunk_ids.len();
        let shape_ok = match q.qtype {
            QuestionType::SingleHopDoc => gold == 1 && q.gold_tool.is_none(),
            QuestionType::SingleHopDb | QuestionType::ToolRequiring => q.gold_tool.is_some(),
            QuestionType::MultiHop => (2..=3).contains(&(gold + usize::from(q.gold_tool.is_some()))),
            QuestionType::Unanswerable => gold == 0 && q.gold_answer == NOT_ANSWERABLE,
        };
        if !shape_ok || gold > 3 {
            return fail("gold evidence does not match the question type".into());
        }
        let Some(rank) = self.retrieval_rank.get(&q.id) else {
            return fail("missing retrieval_rank".into());
        };
        if let Some(bad) = rank.iter().find(|id| !chunk_ids.contains(id.as_str())) {
            return fail(format!("retrieval_rank names unknown chunk {bad}"));
        }
        for g in &q.gold_chunk_ids {
            match rank.iter().position(|id| id == g) {
                Some(pos) if pos < self.gold_rank_bound => {}
                _ => return fail(format!("gold chunk {g} is not ranked within the top {}", self.gold_rank_bound)),
            }
        }
        if let Some(t) = &q.gold_tool {
            if self.catalog.get(&t.name).is_none() {
                return fail(format!("gold tool {} is not in the catalog", t.name));
            }
        }
        for span in &q.supporting_spans {
            let in_chunk = q.gold_chunk_ids.iter().any(|g| self.chunk(g).is_some_and(|c| c.text.contains(span)));
            let in_tool = q.gold_tool.as_ref().is_some_and(|t| t.evidence.contains(span));
            if !(in_chunk || in_tool) {
                return fail(format!("supporting span {span:?} is not in any gold evidence"));
            }
        }
        if q.qtype != QuestionType::Unanswerable && !q.supporting_spans.iter().any(|s| s.contains(&q.gold_answer)) {
            return fail("gold answer does not occur in a supporting span".into());
        }
        Ok(())
    }
}

pub fn save_benchmark(b: &Benchmark, path: &Path) -> Result<(), BenchError> {
    fs::write(path, b.to_json()).map_err(|source| BenchError::Io { path: path.display().to_string(), source })
}

pub fn load_benchmark(path: &Path) -> Result<Benchmark, BenchError> {
    let text =
        fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.display().to_string(), source })?;
    Benchmark::from_json(&text)
}
