//! Episode runner: context assembly, the bounded tool-use loop, and the
//! simulated tool runtime.

mod http;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bench::{Benchmark, Question, QuestionType};
use crate::budget::{allocate, truncate_to_tokens, BudgetAllocation, BudgetConfig};
use crate::compress::{render_catalog, SchemaFormat, LEGEND};
use crate::eval::{score, MetricRow};
use crate::tokens::TokenCountProfile;

pub use http::{parse_response, HttpClient, HttpConfig};
pub use oracle::{dilution_draw, oracle_decide, OracleClient, UNKNOWN_ANSWER};

pub const RECORD_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_ITERS: usize = 3;

pub const SYSTEM_PROMPT: &str = "You are the NovaTech enterprise assistant. Answer the user's question using the \
retrieved documents and the available tools. Call at most one tool per turn. When you can answer, reply with the \
answer only, as briefly as possible. If neither the documents nor the tools can answer the question, reply exactly: \
not answerable.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub name: String,
    pub arguments: BTreeMap<String, Value>,
}

impl ToolCall {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), arguments: BTreeMap::new() }
    }

    pub fn arg(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.arguments.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelDecision {
    ToolCall(ToolCall),
    FinalAnswer { text: String },
}

impl ModelDecision {
    pub fn answer(text: impl Into<String>) -> Self {
        ModelDecision::FinalAnswer { text: text.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum TranscriptEntry {
    Call(ToolCall),
    ToolResult { name: String, text: String },
    Answer { text: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryRole {
    Assistant,
    Tool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryTurn {
    pub role: HistoryRole,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedChunk {
    pub id: String,
    pub text: String,
    pub truncated: bool,
}

/// Everything one model call sees.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledContext {
    pub format: SchemaFormat,
    pub system_text: String,
    pub schema_text: String,
    pub chunks: Vec<PackedChunk>,
    pub history: Vec<HistoryTurn>,
    pub question: String,
    pub budget: BudgetConfig,
    pub allocation: BudgetAllocation,
}

impl AssembledContext {
    pub fn retrieved_text(&self) -> String {
        self.chunks.iter().map(|c| c.text.as_str()).collect::<Vec<_>>().join("\n\n")
    }

    pub fn tool_results(&self) -> impl Iterator<Item = &str> {
        self.history.iter().filter(|t| t.role == HistoryRole::Tool).map(|t| t.text.as_str())
    }

    pub fn history_tokens(&self, counter: &TokenCountProfile) -> usize {
        self.history.iter().map(|t| counter.count_tokens(&t.text)).sum()
    }

    /// Tokens charged for the whole prompt, plus the output reservation.
    pub fn total_tokens(&self, counter: &TokenCountProfile) -> usize {
        counter.count_tokens(&self.system_text)
            + self.allocation.schema_tokens
            + self.allocation.packed_tokens
            + self.history_tokens(counter)
            + self.budget.query_tokens
            + self.budget.output_tokens
    }

    /// Appends a turn, dropping the oldest turns while history exceeds its
    /// reservation.
    pub fn push_history(&mut self, turn: HistoryTurn, counter: &TokenCountProfile) {
        self.history.push(turn);
        while self.history.len() > 1 && self.history_tokens(counter) > self.budget.history_tokens {
            self.history.remove(0);
        }
        if self.history_tokens(counter) > self.budget.history_tokens {
            let last = self.history.last_mut().expect("non-empty");
            last.text = truncate_to_tokens(&last.text, self.budget.history_tokens, counter).to_string();
        }
    }
}

/// Schema text for one format with its token cost, computed once per catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaView {
    pub format: SchemaFormat,
    pub text: String,
    pub tokens: usize,
}

impl SchemaView {
    pub fn new(catalog: &crate::schema::ToolCatalog, format: SchemaFormat, counter: &TokenCountProfile) -> Self {
        let text = render_catalog(catalog, format);
        let tokens = counter.count_tokens(&text);
        Self { format, text, tokens }
    }
}

pub fn system_text(format: SchemaFormat) -> String {
    if format.is_compressed() {
        format!("{SYSTEM_PROMPT}\n{LEGEND}")
    } else {
        SYSTEM_PROMPT.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub max_iters: usize,
    /// Cap on packed chunks regardless of budget.
    pub max_chunks: Option<usize>,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { max_iters: DEFAULT_MAX_ITERS, max_chunks: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientErrorKind {
    Transport,
    Timeout,
    Malformed,
    HttpStatus,
}

impl fmt::Display for ClientErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClientErrorKind::Transport => "transport",
            ClientErrorKind::Timeout => "timeout",
            ClientErrorKind::Malformed => "malformed",
            ClientErrorKind::HttpStatus => "http_status",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{kind} error after {retries} retries: {message}")]
pub struct ClientError {
    pub kind: ClientErrorKind,
    pub message: String,
    pub retries: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub decision: ModelDecision,
    pub retries: usize,
}

pub trait ModelClient: Send + Sync {
    fn id(&self) -> String;
    fn decide(&self, ctx: &AssembledContext, question: &Question) -> Result<Reply, ClientError>;
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub benchmark_hash: String,
    pub question_id: String,
    pub format: SchemaFormat,
    pub window: usize,
    pub client_id: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub schema_version: u32,
    pub run_id: String,
    pub benchmark_hash: String,
    pub question_id: String,
    pub qtype: QuestionType,
    pub format: SchemaFormat,
    pub window: usize,
    pub client_id: String,
    pub seed: u64,
    pub n_tools: usize,
    pub allocation: BudgetAllocation,
    /// Set when the packed list ends in a truncated gold chunk: whether all of
    /// this question's spans in that chunk survived the cut.
    pub truncated_span_intact: Option<bool>,
    pub transcript: Vec<TranscriptEntry>,
    pub final_answer: Option<String>,
    pub iterations: usize,
    pub error: Option<ClientError>,
    pub retries: usize,
    pub metrics: MetricRow,
}

impl EpisodeRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            benchmark_hash: self.benchmark_hash.clone(),
            question_id: self.question_id.clone(),
            format: self.format,
            window: self.window,
            client_id: self.client_id.clone(),
            seed: self.seed,
        }
    }

    pub fn tool_calls(&self) -> impl Iterator<Item = &ToolCall> {
        self.transcript.iter().filter_map(|e| match e {
            TranscriptEntry::Call(c) => Some(c),
            _ => None,
        })
    }
}

pub fn run_id(key: &RecordKey) -> String {
    format!("{}/{}/{}/{}/{}/{}", key.benchmark_hash, key.question_id, key.format, key.window, key.client_id, key.seed)
}

/// A benchmark with its schema renderings cached.
#[derive(Debug, Clone)]
pub struct Harness<'a> {
    pub bench: &'a Benchmark,
    pub bench_hash: String,
    pub counter: TokenCountProfile,
    views: BTreeMap<SchemaFormat, SchemaView>,
}

impl<'a> Harness<'a> {
    pub fn new(bench: &'a Benchmark, counter: TokenCountProfile) -> Self {
        let views = SchemaFormat::ALL.iter().map(|&f| (f, SchemaView::new(&bench.catalog, f, &counter))).collect();
        Self { bench, bench_hash: bench.content_hash(), counter, views }
    }

    pub fn view(&self, format: SchemaFormat) -> &SchemaView {
        &self.views[&format]
    }

    pub fn context(
        &self,
        question: &Question,
        format: SchemaFormat,
        config: &BudgetConfig,
        max_chunks: Option<usize>,
    ) -> AssembledContext {
        let view = self.view(format);
        let budget = config.with_query(self.counter.count_tokens(&question.text));
        let ranked = self.bench.ranked_chunks(&question.id).take(max_chunks.unwrap_or(usize::MAX));
        let allocation = allocate(&budget, view.tokens, ranked.map(|c| (c.id.as_str(), c.token_cost)));
        let chunks = allocation
            .packed_chunk_ids
            .iter()
            .map(|id| {
                let chunk = self.bench.chunk(id).expect("ranked ids exist");
                if allocation.truncated_last {
                    let text = truncate_to_tokens(&chunk.text, allocation.packed_tokens, &self.counter);
                    PackedChunk { id: id.clone(), text: text.to_string(), truncated: true }
                } else {
                    PackedChunk { id: id.clone(), text: chunk.text.clone(), truncated: false }
                }
            })
            .collect();
        AssembledContext {
            format,
            system_text: system_text(format),
            schema_text: view.text.clone(),
            chunks,
            history: Vec::new(),
            question: question.text.clone(),
            budget,
            allocation,
        }
    }

    pub fn run(
        &self,
        question: &Question,
        format: SchemaFormat,
        config: &BudgetConfig,
        client: &dyn ModelClient,
        opts: &RunOptions,
    ) -> EpisodeRecord {
        let mut ctx = self.context(question, format, config, opts.max_chunks);
        let key = RecordKey {
            benchmark_hash: self.bench_hash.clone(),
            question_id: question.id.clone(),
            format,
            window: config.window,
            client_id: client.id(),
            seed: opts.seed,
        };
        let truncated_span_intact = ctx.chunks.last().filter(|c| c.truncated).and_then(|c| {
            let original = self.bench.chunk(&c.id)?;
            let spans: Vec<&str> =
                original.spans.iter().filter(|s| s.question_id == question.id).map(|s| s.text.as_str()).collect();
            (!spans.is_empty()).then(|| spans.iter().all(|s| c.text.contains(s)))
        });
        let mut record = EpisodeRecord {
            schema_version: RECORD_SCHEMA_VERSION,
            run_id: run_id(&key),
            benchmark_hash: key.benchmark_hash,
            question_id: key.question_id,
            qtype: question.qtype,
            format,
            window: config.window,
            client_id: key.client_id,
            seed: opts.seed,
            n_tools: self.bench.catalog.len(),
            allocation: ctx.allocation.clone(),
            truncated_span_intact,
            transcript: Vec::new(),
            final_answer: None,
            iterations: 0,
            error: None,
            retries: 0,
            metrics: MetricRow::default(),
        };
        if !ctx.allocation.overflow {
            for iter in 1..=opts.max_iters {
                record.iterations = iter;
                let reply = match client.decide(&ctx, question) {
                    Ok(r) => r,
                    Err(e) => {
                        record.retries += e.retries;
                        record.error = Some(e);
                        break;
                    }
                };
                record.retries += reply.retries;
                match reply.decision {
                    ModelDecision::FinalAnswer { text } => {
                        record.transcript.push(TranscriptEntry::Answer { text: text.clone() });
                        record.final_answer = Some(text);
                        break;
                    }
                    ModelDecision::ToolCall(call) => {
                        let result = execute_tool(self.bench, &call);
                        let args = serde_json::to_string(&call.arguments).unwrap_or_default();
                        ctx.push_history(
                            HistoryTurn { role: HistoryRole::Assistant, text: format!("call {} {args}", call.name) },
                            &self.counter,
                        );
                        ctx.push_history(HistoryTurn { role: HistoryRole::Tool, text: result.clone() }, &self.counter);
                        let name = call.name.clone();
                        record.transcript.push(TranscriptEntry::Call(call));
                        record.transcript.push(TranscriptEntry::ToolResult { name, text: result });
                    }
                }
            }
        }
        record.metrics = score(&record, question);
        record
    }
}

pub fn assemble_context(
    bench: &Benchmark,
    question: &Question,
    format: SchemaFormat,
    config: &BudgetConfig,
    counter: &TokenCountProfile,
) -> AssembledContext {
    Harness::new(bench, *counter).context(question, format, config, None)
}

pub fn run_episode(
    bench: &Benchmark,
    question: &Question,
    format: SchemaFormat,
    config: &BudgetConfig,
    client: &dyn ModelClient,
    max_iters: usize,
) -> EpisodeRecord {
    let opts = RunOptions { max_iters, ..RunOptions::default() };
    Harness::new(bench, TokenCountProfile::default()).run(question, format, config, client, &opts)
}

fn arg_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.trim().to_lowercase(),
        other => other.to_string(),
    }
}

fn arg_matches(given: &Value, gold: &str) -> bool {
    let given = arg_text(given);
    let gold = gold.trim().to_lowercase();
    if given == gold {
        return true;
    }
    matches!((given.parse::<f64>(), gold.parse::<f64>()), (Ok(a), Ok(b)) if a == b)
}

/// Simulated tool runtime backed by the benchmark's gold evidence.
pub fn execute_tool(bench: &Benchmark, call: &ToolCall) -> String {
    let Some(tool) = bench.catalog.get(&call.name) else {
        return serde_json::json!({ "error": format!("unknown tool: {}", call.name) }).to_string();
    };
    let hit = bench.questions.iter().filter_map(|q| q.gold_tool.as_ref()).find(|g| {
        g.name == tool.name
            && g.arguments
                .iter()
                .filter(|(k, _)| tool.is_required(k))
                .all(|(k, v)| call.arguments.get(k).is_some_and(|given| arg_matches(given, v)))
    });
    match hit {
        Some(g) => g.evidence.clone(),
        None => r#"{"status": "ok", "rows": []}"#.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::generate_novatech;

    #[test]
    fn system_text_fits_reservation() {
        let p = TokenCountProfile::default();
        for f in SchemaFormat::ALL {
            assert!(p.count_tokens(&system_text(f)) <= crate::budget::DEFAULT_SYSTEM_TOKENS);
        }
    }

    #[test]
    fn tool_runtime_cases() {
        let b = generate_novatech(42);
        let q = b.questions.iter().find(|q| q.qtype == QuestionType::SingleHopDb).unwrap();
        let g = q.gold_tool.as_ref().unwrap();
        let mut call = ToolCall::new(&g.name);
        for (k, v) in &g.arguments {
            call = call.arg(k, v.to_uppercase());
        }
        assert_eq!(execute_tool(&b, &call), g.evidence);

        let wrong = ToolCall::new(&g.name).arg(g.arguments.keys().next().unwrap(), "nope");
        assert!(execute_tool(&b, &wrong).contains("\"rows\": []"));
        assert!(execute_tool(&b, &ToolCall::new("launch_rocket")).contains("unknown tool"));
    }

    #[test]
    fn numeric_arguments_match_by_value() {
        assert!(arg_matches(&Value::from(12500), "12500"));
        assert!(arg_matches(&Value::from(12500.0), "12500"));
        assert!(!arg_matches(&Value::from(12), "12500"));
    }

    #[test]
    fn history_drops_oldest_turns() {
        let b = generate_novatech(42);
        let h = Harness::new(&b, TokenCountProfile::default());
        let mut ctx = h.context(&b.questions[0], SchemaFormat::Conservative, &BudgetConfig::new(16_384), None);
        ctx.budget.history_tokens = 10;
        ctx.push_history(HistoryTurn { role: HistoryRole::Tool, text: "a".repeat(24) }, &h.counter);
        ctx.push_history(HistoryTurn { role: HistoryRole::Tool, text: "b".repeat(24) }, &h.counter);
        assert_eq!(ctx.history.len(), 1);
        assert!(ctx.history[0].text.starts_with('b'));
    }
}
