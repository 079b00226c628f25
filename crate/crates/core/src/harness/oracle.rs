//! Deterministic reference policy that answers from gold evidence whenever
//! that evidence is actually in context.

use rand::Rng;

use super::{AssembledContext, ClientError, ModelClient, ModelDecision, Reply, ToolCall};
use crate::bench::prng::stream;
use crate::bench::{Question, QuestionType, NOT_ANSWERABLE};

pub const UNKNOWN_ANSWER: &str = "unknown";

/// Uniform draw shared by every format for one (question, distractor) pair,
/// so paired episodes see the same noise.
pub fn dilution_draw(seed: u64, question_id: &str, chunk_id: &str) -> f64 {
    stream(seed, &format!("dilution/{question_id}/{chunk_id}")).gen()
}

pub fn oracle_decide(ctx: &AssembledContext, question: &Question, epsilon: f64, seed: u64) -> ModelDecision {
    assert!((0.0..=1.0).contains(&epsilon), "epsilon must lie in [0, 1]");
    let has_result = ctx.tool_results().next().is_some();
    if let Some(gold) = &question.gold_tool {
        if !has_result && ctx.schema_text.contains(gold.name.as_str()) {
            let mut call = ToolCall::new(&gold.name);
            for (k, v) in &gold.arguments {
                call = call.arg(k, v.as_str());
            }
            return ModelDecision::ToolCall(call);
        }
    }

    let answerable = !question.supporting_spans.is_empty()
        && question.supporting_spans.iter().all(|span| {
            ctx.chunks.iter().any(|c| c.text.contains(span.as_str()))
                || ctx.tool_results().any(|r| r.contains(span.as_str()))
        });
    let answer = if answerable {
        question.gold_answer.as_str()
    } else if question.qtype == QuestionType::Unanswerable {
        NOT_ANSWERABLE
    } else {
        return ModelDecision::answer(UNKNOWN_ANSWER);
    };

    if epsilon > 0.0 {
        let diluted = ctx
            .chunks
            .iter()
            .filter(|c| !question.gold_chunk_ids.contains(&c.id))
            .any(|c| dilution_draw(seed, &question.id, &c.id) < epsilon);
        if diluted {
            return ModelDecision::answer(UNKNOWN_ANSWER);
        }
    }
    ModelDecision::answer(answer)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleClient {
    pub epsilon: f64,
    pub seed: u64,
}

impl OracleClient {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        assert!((0.0..=1.0).contains(&epsilon), "epsilon must lie in [0, 1]");
        Self { epsilon, seed }
    }
}

impl Default for OracleClient {
    fn default() -> Self {
        Self::new(0.0, 0)
    }
}

impl ModelClient for OracleClient {
    fn id(&self) -> String {
        if self.epsilon == 0.0 {
            "oracle".to_string()
        } else {
            format!("oracle-eps{}", self.epsilon)
        }
    }

    fn decide(&self, ctx: &AssembledContext, question: &Question) -> Result<Reply, ClientError> {
        Ok(Reply { decision: oracle_decide(ctx, question, self.epsilon, self.seed), retries: 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::generate_novatech;
    use crate::budget::BudgetConfig;
    use crate::compress::SchemaFormat;
    use crate::harness::Harness;
    use crate::tokens::TokenCountProfile;

    fn ctx_for(qtype: QuestionType, window: usize) -> (crate::bench::Benchmark, usize, SchemaFormat, usize) {
        let b = generate_novatech(42);
        let i = b.questions.iter().position(|q| q.qtype == qtype).unwrap();
        (b, i, SchemaFormat::Conservative, window)
    }

    #[test]
    fn answers_from_packed_span() {
        let (b, i, f, w) = ctx_for(QuestionType::SingleHopDoc, 32_768);
        let h = Harness::new(&b, TokenCountProfile::default());
        let q = &b.questions[i];
        let ctx = h.context(q, f, &BudgetConfig::new(w), None);
        assert_eq!(oracle_decide(&ctx, q, 0.0, 1), ModelDecision::answer(q.gold_answer.clone()));
    }

    #[test]
    fn unknown_without_evidence() {
        let (b, i, f, w) = ctx_for(QuestionType::SingleHopDoc, 32_768);
        let h = Harness::new(&b, TokenCountProfile::default());
        let q = &b.questions[i];
        let mut ctx = h.context(q, f, &BudgetConfig::new(w), None);
        ctx.chunks.clear();
        assert_eq!(oracle_decide(&ctx, q, 0.0, 1), ModelDecision::answer(UNKNOWN_ANSWER));
    }

    #[test]
    fn calls_gold_tool_first() {
        let (b, i, f, w) = ctx_for(QuestionType::SingleHopDb, 8192);
        let h = Harness::new(&b, TokenCountProfile::default());
        let q = &b.questions[i];
        let ctx = h.context(q, f, &BudgetConfig::new(w), None);
        match oracle_decide(&ctx, q, 0.0, 1) {
            ModelDecision::ToolCall(c) => assert_eq!(c.name, q.gold_tool.as_ref().unwrap().name),
            other => panic!("expected a tool call, got {other:?}"),
        }
    }

    #[test]
    fn full_dilution_flips_every_answer() {
        let (b, i, f, w) = ctx_for(QuestionType::SingleHopDoc, 32_768);
        let h = Harness::new(&b, TokenCountProfile::default());
        let q = &b.questions[i];
        let ctx = h.context(q, f, &BudgetConfig::new(w), None);
        assert_eq!(oracle_decide(&ctx, q, 1.0, 1), ModelDecision::answer(UNKNOWN_ANSWER));
    }
}
