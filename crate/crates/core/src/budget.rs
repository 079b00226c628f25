//! Context-window accounting.
//!
//! The retrieval budget left for chunks is
//!
//! ```text
//! B_RAG = B - B_sys - B_schema - B_hist - B_out
//! ```
//!
//! and the question itself is charged against it before packing.

use serde::{Deserialize, Serialize};

use crate::tokens::TokenCountProfile;

pub const DEFAULT_SYSTEM_TOKENS: usize = 350;
pub const DEFAULT_HISTORY_TOKENS: usize = 1500;
pub const DEFAULT_OUTPUT_TOKENS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub window: usize,
    pub system_tokens: usize,
    pub history_tokens: usize,
    pub output_tokens: usize,
    pub query_tokens: usize,
}

impl BudgetConfig {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            system_tokens: DEFAULT_SYSTEM_TOKENS,
            history_tokens: DEFAULT_HISTORY_TOKENS,
            output_tokens: DEFAULT_OUTPUT_TOKENS,
            query_tokens: 0,
        }
    }

    pub fn with_query(mut self, query_tokens: usize) -> Self {
        self.query_tokens = query_tokens;
        self
    }

    /// `B_RAG` before the query is charged. Negative when the fixed
    /// reservations alone exceed the window.
    pub fn rag_budget(&self, schema_tokens: usize) -> i64 {
        self.window as i64
            - self.system_tokens as i64
            - schema_tokens as i64
            - self.history_tokens as i64
            - self.output_tokens as i64
    }

    /// Budget left for chunks once the query is charged.
    pub fn slack(&self, schema_tokens: usize) -> i64 {
        self.rag_budget(schema_tokens) - self.query_tokens as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetAllocation {
    pub schema_tokens: usize,
    pub rag_budget: i64,
    pub k: usize,
    pub packed_chunk_ids: Vec<String>,
    /// Token cost charged for the packed chunks; a truncated chunk is charged
    /// at its truncated size.
    pub packed_tokens: usize,
    pub truncated_last: bool,
    pub overflow: bool,
}

impl BudgetAllocation {
    /// Slack available to chunks (`B_RAG - query`), which may be negative.
    pub fn slack(&self, config: &BudgetConfig) -> i64 {
        self.rag_budget - config.query_tokens as i64
    }
}

/// Packs chunks, given best rank first as `(id, token_cost)`, into the slack
/// left after fixed reservations and the query.
///
/// Packing stops at the first chunk that does not fit. When not even the top
/// chunk fits but some slack remains, that chunk is kept in truncated form.
pub fn allocate<'a, I>(config: &BudgetConfig, schema_tokens: usize, chunks: I) -> BudgetAllocation
where
    I: IntoIterator<Item = (&'a str, usize)>,
{
    let rag_budget = config.rag_budget(schema_tokens);
    let slack = rag_budget - config.query_tokens as i64;
    let mut alloc = BudgetAllocation {
        schema_tokens,
        rag_budget,
        k: 0,
        packed_chunk_ids: Vec::new(),
        packed_tokens: 0,
        truncated_last: false,
        overflow: slack <= 0,
    };
    if alloc.overflow {
        return alloc;
    }
    let slack = slack as usize;
    let mut chunks = chunks.into_iter().peekable();
    while let Some(&(id, cost)) = chunks.peek() {
        if alloc.packed_tokens + cost > slack {
            break;
        }
        alloc.packed_tokens += cost;
        alloc.packed_chunk_ids.push(id.to_string());
        chunks.next();
    }
    if alloc.packed_chunk_ids.is_empty() {
        if let Some((id, _)) = chunks.next() {
            alloc.packed_chunk_ids.push(id.to_string());
            alloc.packed_tokens = slack;
            alloc.truncated_last = true;
        }
    }
    alloc.k = alloc.packed_chunk_ids.len();
    alloc
}

/// `floor(max(slack, 0) / mean_chunk)`.
pub fn chunk_capacity(config: &BudgetConfig, schema_tokens: usize, mean_chunk: f64) -> usize {
    assert!(mean_chunk > 0.0, "mean chunk size must be positive");
    let slack = config.slack(schema_tokens).max(0) as f64;
    (slack / mean_chunk).floor() as usize
}

/// Cuts `text` at a whitespace boundary so that it costs at most `tokens`.
/// Falls back to a character boundary when the first word alone is too long.
pub fn truncate_to_tokens<'a>(text: &'a str, tokens: usize, counter: &TokenCountProfile) -> &'a str {
    if counter.count_tokens(text) <= tokens {
        return text;
    }
    let max_bytes = counter.max_bytes_for(tokens).min(text.len());
    let mut cut = max_bytes;
    while !text.is_char_boundary(cut) {
        cut -= 1;
    }
    // Normalization can only shrink or keep byte length, so checking the
    // prefix count guards the rare non-ASCII case.
    while cut > 0 && counter.count_tokens(&text[..cut]) > tokens {
        cut -= 1;
        while !text.is_char_boundary(cut) {
            cut -= 1;
        }
    }
    let head = &text[..cut];
    let next_is_space = text[cut..].starts_with(char::is_whitespace);
    if next_is_space {
        return head.trim_end();
    }
    match head.rfind(char::is_whitespace) {
        Some(ws) => head[..ws].trim_end(),
        None => head,
    }
}
