use std::sync::atomic::{AtomicUsize, Ordering};

use proptest::prelude::*;
use toolbudget::bench::{generate_novatech, Benchmark, Question};
use toolbudget::budget::{allocate, BudgetConfig};
use toolbudget::compress::SchemaFormat;
use toolbudget::eval::{exact_match, token_f1};
use toolbudget::harness::{
    AssembledContext, ClientError, Harness, ModelClient, OracleClient, Reply, RunOptions, RECORD_SCHEMA_VERSION,
};
use toolbudget::tokens::TokenCountProfile;

struct Counting {
    inner: OracleClient,
    calls: AtomicUsize,
}

impl ModelClient for Counting {
    fn id(&self) -> String {
        "counting".into()
    }

    fn decide(&self, ctx: &AssembledContext, q: &Question) -> Result<Reply, ClientError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.decide(ctx, q)
    }
}

fn bench() -> &'static Benchmark {
    static B: std::sync::OnceLock<Benchmark> = std::sync::OnceLock::new();
    B.get_or_init(|| generate_novatech(42))
}

fn chunk_list() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..2_000, 0..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn packing_respects_slack_and_rank_order(costs in chunk_list(), window in 0usize..40_000, schema in 0usize..20_000, query in 0usize..200) {
        let cfg = BudgetConfig::new(window).with_query(query);
        let ids: Vec<String> = (0..costs.len()).map(|i| format!("c{i}")).collect();
        let a = allocate(&cfg, schema, ids.iter().map(String::as_str).zip(costs.iter().copied()));
        let slack = cfg.slack(schema);
        prop_assert_eq!(a.overflow, slack <= 0);
        prop_assert_eq!(a.k, a.packed_chunk_ids.len());
        prop_assert_eq!(&a.packed_chunk_ids[..], &ids[..a.k]);
        if a.overflow {
            prop_assert_eq!(a.k, 0);
        } else {
            prop_assert!(a.packed_tokens as i64 <= slack);
            if !a.truncated_last {
                prop_assert_eq!(a.packed_tokens, costs[..a.k].iter().sum::<usize>());
                if a.k < costs.len() {
                    prop_assert!(a.packed_tokens as i64 + costs[a.k] as i64 > slack);
                }
            } else {
                prop_assert_eq!(a.k, 1);
                prop_assert!(costs[0] as i64 > slack);
            }
        }
    }

    #[test]
    fn packing_is_monotone_in_schema_cost(costs in chunk_list(), window in 0usize..40_000, s1 in 0usize..20_000, s2 in 0usize..20_000) {
        let (lo, hi) = (s1.min(s2), s1.max(s2));
        let cfg = BudgetConfig::new(window);
        let ids: Vec<String> = (0..costs.len()).map(|i| format!("c{i}")).collect();
        let pairs = || ids.iter().map(String::as_str).zip(costs.iter().copied());
        let cheap = allocate(&cfg, lo, pairs());
        let dear = allocate(&cfg, hi, pairs());
        prop_assert!(cheap.rag_budget >= dear.rag_budget);
        prop_assert!(cheap.k >= dear.k || dear.truncated_last);
        prop_assert!(!cheap.overflow || dear.overflow);
    }

    #[test]
    fn exact_match_implies_full_f1(pred in "[a-zA-Z ,.]{0,30}", gold in "[a-zA-Z ,.]{0,30}") {
        let em = exact_match(&pred, &gold, &[]);
        let f1 = token_f1(&pred, &gold);
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(f64::from(em) <= f1.ceil());
        if em == 1 {
            prop_assert_eq!(f1, 1.0);
        }
        prop_assert_eq!(exact_match(&pred, &pred, &[]), 1);
    }

    #[test]
    fn coverage_grows_with_window(qi in 0usize..100, w1 in 4_000usize..64_000, w2 in 4_000usize..64_000) {
        let b = bench();
        let q = &b.questions[qi % b.questions.len()];
        let h = Harness::new(b, TokenCountProfile::default());
        let run = |w| h.run(q, SchemaFormat::Json, &BudgetConfig::new(w), &OracleClient::default(), &RunOptions::default());
        let (small, large) = (run(w1.min(w2)), run(w1.max(w2)));
        prop_assert!(small.metrics.rag_coverage <= large.metrics.rag_coverage);
        prop_assert!(small.allocation.k <= large.allocation.k || small.allocation.truncated_last);
    }
}

#[test]
fn paired_episodes_share_everything_but_the_schema() {
    let b = bench();
    let h = Harness::new(b, TokenCountProfile::default());
    let cfg = BudgetConfig::new(16_384);
    for q in &b.questions {
        let json = h.context(q, SchemaFormat::Json, &cfg, None);
        let cons = h.context(q, SchemaFormat::Conservative, &cfg, None);
        assert_eq!(json.question, cons.question);
        assert_eq!(json.budget, cons.budget);
        assert!(cons.allocation.schema_tokens < json.allocation.schema_tokens);
        assert!(cons.allocation.k >= json.allocation.k);
        let shared = json.allocation.k;
        assert_eq!(json.allocation.packed_chunk_ids[..], cons.allocation.packed_chunk_ids[..shared]);
    }
}

#[test]
fn overflowing_episodes_never_reach_the_client() {
    let b = bench();
    let h = Harness::new(b, TokenCountProfile::default());
    let client = Counting { inner: OracleClient::default(), calls: AtomicUsize::new(0) };
    let q = &b.questions[0];
    let rec = h.run(q, SchemaFormat::Json, &BudgetConfig::new(4_096), &client, &RunOptions::default());
    assert!(rec.allocation.overflow);
    assert_eq!(client.calls.load(Ordering::SeqCst), 0);
    assert_eq!((rec.metrics.em, rec.metrics.f1, rec.metrics.overflow, rec.iterations), (0, 0.0, 1, 0));
    assert!(rec.final_answer.is_none() && rec.error.is_none());

    let rec = h.run(q, SchemaFormat::Conservative, &BudgetConfig::new(32_768), &client, &RunOptions::default());
    assert!(!rec.allocation.overflow);
    assert_eq!(client.calls.load(Ordering::SeqCst), rec.iterations);
    assert_eq!(rec.schema_version, RECORD_SCHEMA_VERSION);
}

#[test]
fn noiseless_oracle_is_deterministic() {
    let b = bench();
    let h = Harness::new(b, TokenCountProfile::default());
    let cfg = BudgetConfig::new(16_384);
    for q in b.questions.iter().step_by(7) {
        for f in SchemaFormat::ALL {
            let a = h.run(q, f, &cfg, &OracleClient::new(0.0, 1), &RunOptions::default());
            let c = h.run(q, f, &cfg, &OracleClient::new(0.0, 1), &RunOptions::default());
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
        }
    }
}

#[test]
fn iteration_cap_is_respected() {
    let b = bench();
    let h = Harness::new(b, TokenCountProfile::default());
    let opts = RunOptions { max_iters: 1, ..RunOptions::default() };
    for q in &b.questions {
        let rec = h.run(q, SchemaFormat::Conservative, &BudgetConfig::new(32_768), &OracleClient::default(), &opts);
        assert!(rec.iterations <= 1);
    }
}
