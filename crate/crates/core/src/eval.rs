//! Answer scoring and aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::Question;
use crate::harness::EpisodeRecord;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub question_id: String,
    pub em: u8,
    pub f1: f64,
    pub tool_ok: Option<u8>,
    pub rag_coverage: f64,
    pub overflow: u8,
    pub k: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("cannot aggregate an empty set of rows")]
    Empty,
}

/// Lowercase, strip punctuation, drop the articles a/an/the, collapse
/// whitespace.
pub fn normalize_answer(text: &str) -> String {
    let kept: String = text.to_lowercase().chars().filter(|c| c.is_alphanumeric() || c.is_whitespace()).collect();
    kept.split_whitespace().filter(|w| !matches!(*w, "a" | "an" | "the")).collect::<Vec<_>>().join(" ")
}

pub fn exact_match(pred: &str, gold: &str, aliases: &[String]) -> u8 {
    let p = normalize_answer(pred);
    let hit = p == normalize_answer(gold) || aliases.iter().any(|a| p == normalize_answer(a));
    u8::from(hit)
}

/// Token-level F1 over normalized whitespace tokens, counted as multisets.
pub fn token_f1(pred: &str, gold: &str) -> f64 {
    let p = normalize_answer(pred);
    let g = normalize_answer(gold);
    let pt: Vec<&str> = p.split_whitespace().collect();
    let gt: Vec<&str> = g.split_whitespace().collect();
    match (pt.is_empty(), gt.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &gt {
        *counts.entry(t).or_default() += 1;
    }
    let mut common = 0usize;
    for t in &pt {
        if let Some(c) = counts.get_mut(t) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / pt.len() as f64;
    let recall = common as f64 / gt.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

pub fn tool_selection_accuracy(record: &EpisodeRecord, question: &Question) -> Option<u8> {
    let gold = question.gold_tool.as_ref()?;
    Some(u8::from(record.tool_calls().any(|c| c.name == gold.name)))
}

pub fn rag_coverage(record: &EpisodeRecord, question: &Question) -> f64 {
    if question.gold_chunk_ids.is_empty() {
        return 1.0;
    }
    let packed = &record.allocation.packed_chunk_ids;
    let truncated = record.allocation.truncated_last.then(|| packed.last()).flatten();
    let hits = question
        .gold_chunk_ids
        .iter()
        .filter(|g| if truncated == Some(g) { record.truncated_span_intact == Some(true) } else { packed.contains(g) })
        .count();
    hits as f64 / question.gold_chunk_ids.len() as f64
}

pub fn score(record: &EpisodeRecord, question: &Question) -> MetricRow {
    let (em, f1) = match &record.final_answer {
        Some(a) => {
            let em = exact_match(a, &question.gold_answer, &question.aliases);
            let f1 = if em == 1 {
                1.0
            } else {
                std::iter::once(&question.gold_answer)
                    .chain(&question.aliases)
                    .map(|g| token_f1(a, g))
                    .fold(0.0, f64::max)
            };
            (em, f1)
        }
        None => (0, 0.0),
    };
    MetricRow {
        question_id: question.id.clone(),
        em,
        f1,
        tool_ok: tool_selection_accuracy(record, question),
        rag_coverage: rag_coverage(record, question),
        overflow: u8::from(record.allocation.overflow),
        k: record.allocation.k,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: Vec<String>,
    pub n: usize,
    pub em_pct: f64,
    pub mean_f1: f64,
    /// Mean over rows with a gold tool; absent when none have one.
    pub tool_acc: Option<f64>,
    pub coverage: f64,
    pub overflow_rate: f64,
    pub mean_k: f64,
}

/// Per-group means, groups in key order.
pub fn aggregate<'a, I>(rows: I) -> Result<Vec<AggregateRow>, EvalError>
where
    I: IntoIterator<Item = (Vec<String>, &'a MetricRow)>,
{
    let mut groups: BTreeMap<Vec<String>, Vec<&MetricRow>> = BTreeMap::new();
    for (key, row) in rows {
        groups.entry(key).or_default().push(row);
    }
    if groups.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(groups
        .into_iter()
        .map(|(group, rows)| {
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&MetricRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            let tools: Vec<f64> = rows.iter().filter_map(|r| r.tool_ok).map(f64::from).collect();
            AggregateRow {
                group,
                n: rows.len(),
                em_pct: 100.0 * mean(&|r| f64::from(r.em)),
                mean_f1: mean(&|r| r.f1),
                tool_acc: (!tools.is_empty()).then(|| tools.iter().sum::<f64>() / tools.len() as f64),
                coverage: mean(&|r| r.rag_coverage),
                overflow_rate: mean(&|r| f64::from(r.overflow)),
                mean_k: mean(&|r| r.k as f64),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKey {
    Model,
    Format,
    Window,
    QType,
    Tools,
}

impl GroupKey {
    pub fn name(self) -> &'static str {
        match self {
            GroupKey::Model => "model",
            GroupKey::Format => "format",
            GroupKey::Window => "window",
            GroupKey::QType => "qtype",
            GroupKey::Tools => "n_tools",
        }
    }

    pub fn value(self, r: &EpisodeRecord) -> String {
        match self {
            GroupKey::Model => r.client_id.clone(),
            GroupKey::Format => r.format.to_string(),
            GroupKey::Window => r.window.to_string(),
            GroupKey::QType => r.qtype.to_string(),
            GroupKey::Tools => r.n_tools.to_string(),
        }
    }
}

pub fn aggregate_records(records: &[EpisodeRecord], keys: &[GroupKey]) -> Result<Vec<AggregateRow>, EvalError> {
    aggregate(records.iter().map(|r| (keys.iter().map(|k| k.value(r)).collect(), &r.metrics)))
}
