use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toolbudget::bench::{generate_frontier_catalog, generate_novatech, novatech_catalog, Benchmark};
use toolbudget::budget::{allocate, BudgetConfig};
use toolbudget::compress::{
    compress_tool, extract_core, parse_compressed, savings_rate, schema_tokens, CompressionProfile, SchemaFormat,
};
use toolbudget::curvefit::{eval_ck, fit_ck, marginal_gain, refined_steps};
use toolbudget::experiment::{curve_points, CurveMetric};
use toolbudget::harness::{EpisodeRecord, Harness, ModelClient, OracleClient, RunOptions};
use toolbudget::stats::{bootstrap_ci, cohens_d, doubled_ranks, pearson_r, wilcoxon_signed_rank, PairedSample};
use toolbudget::sweeps::{frontier_run, sweep_thresholds, CorpusSpec, FrontierCosts};
use toolbudget::tokens::TokenCountProfile;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_all(b: &Benchmark, window: usize, format: SchemaFormat, client: &dyn ModelClient) -> Vec<EpisodeRecord> {
    let h = Harness::new(b, TokenCountProfile::default());
    let cfg = BudgetConfig::new(window);
    b.questions.iter().map(|q| h.run(q, format, &cfg, client, &RunOptions::default())).collect()
}

fn em_pct(rs: &[EpisodeRecord]) -> f64 {
    100.0 * rs.iter().map(|r| f64::from(r.metrics.em)).sum::<f64>() / rs.len() as f64
}

fn em_sample(a: &[EpisodeRecord], b: &[EpisodeRecord]) -> PairedSample {
    PairedSample::new(a.iter().zip(b).map(|(x, y)| (f64::from(x.metrics.em), f64::from(y.metrics.em))).collect())
        .expect("non-empty")
}

fn overflow_regime() -> Check {
    let b = generate_novatech(42);
    let p = TokenCountProfile::default();
    let json = schema_tokens(&b.catalog, SchemaFormat::Json, &p);
    let cons = schema_tokens(&b.catalog, SchemaFormat::Conservative, &p);
    ensure((10_400..=11_600).contains(&json), || format!("json catalog costs {json} tokens"))?;
    ensure((5_200..=5_900).contains(&cons), || format!("conservative catalog costs {cons} tokens"))?;
    let cfg = BudgetConfig::new(8192);
    ensure(cfg.slack(json) <= 0, || "json catalog leaves room at 8K".into())?;
    for q in 0..=65 {
        let slack = cfg.with_query(q).slack(cons);
        ensure((265..=330).contains(&slack), || format!("B_RAG {slack} at query length {q}"))?;
    }
    let h = Harness::new(&b, p);
    for q in &b.questions {
        let ctx = h.context(q, SchemaFormat::Conservative, &cfg, None);
        ensure(ctx.allocation.k >= 1, || format!("question {} packs no chunk", q.id))?;
        let jctx = h.context(q, SchemaFormat::Json, &cfg, None);
        ensure(jctx.allocation.overflow, || format!("question {} fits under json", q.id))?;
    }
    let alloc = allocate(&cfg, cons, [("c", 200usize)]);
    Ok(format!("json {json}, conservative {cons}, B_RAG {} with k = {}", cfg.rag_budget(cons), alloc.k))
}

fn savings_bands() -> Check {
    let p = TokenCountProfile::default();
    let check = |name: &str, cat: &toolbudget::schema::ToolCatalog| -> Result<(f64, f64), String> {
        let c = savings_rate(cat, CompressionProfile::Conservative, &p).map_err(|e| e.to_string())?;
        let b = savings_rate(cat, CompressionProfile::Balanced, &p).map_err(|e| e.to_string())?;
        ensure((0.44..=0.52).contains(&c), || format!("{name}: conservative savings {c:.3}"))?;
        ensure(b > c && b <= 0.56, || format!("{name}: balanced savings {b:.3} vs conservative {c:.3}"))?;
        Ok((c, b))
    };
    let nova = novatech_catalog(42);
    let (c, b) = check("novatech", &nova)?;
    let frontier = generate_frontier_catalog(800, 42).map_err(|e| e.to_string())?;
    for n in [50, 100, 200, 400, 800] {
        check(&format!("frontier n={n}"), &frontier.prefix(n))?;
    }
    let delta = schema_tokens(&nova, SchemaFormat::Conservative, &p) as f64
        - schema_tokens(&nova, SchemaFormat::Balanced, &p) as f64;
    ensure((296.25..=493.75).contains(&delta), || format!("balanced saves {delta} more tokens"))?;
    Ok(format!("novatech {c:.3}/{b:.3}, balanced delta {delta}"))
}

fn binary_enablement() -> Check {
    let b = generate_novatech(42);
    let json = run_all(&b, 8192, SchemaFormat::Json, &OracleClient::default());
    let cons = run_all(&b, 8192, SchemaFormat::Conservative, &OracleClient::default());
    let (ej, ec) = (em_pct(&json), em_pct(&cons));
    ensure(ej == 0.0, || format!("json EM {ej}"))?;
    ensure(ec >= 25.0, || format!("conservative EM {ec}"))?;
    let w = wilcoxon_signed_rank(&em_sample(&json, &cons)).map_err(|e| e.to_string())?;
    ensure(w.p < 0.01, || format!("p = {}", w.p))?;
    Ok(format!("EM {ej} vs {ec}, p = {:.2e}", w.p))
}

fn ceiling_null() -> Check {
    let b = generate_novatech(42);
    let mut out = Vec::new();
    for w in [16_384, 32_768] {
        let j = em_pct(&run_all(&b, w, SchemaFormat::Json, &OracleClient::default()));
        let c = em_pct(&run_all(&b, w, SchemaFormat::Conservative, &OracleClient::default()));
        ensure(j == c, || format!("window {w}: EM {j} vs {c}"))?;
        out.push(format!("{w}: {j}/{c}"));
    }
    Ok(out.join(", "))
}

fn frontier_thresholds() -> Check {
    let p = TokenCountProfile::default();
    let budget = BudgetConfig::new(200_000);
    let corpus = CorpusSpec::default();
    let frontier = generate_frontier_catalog(800, 42).map_err(|e| e.to_string())?;
    let s = savings_rate(&frontier, CompressionProfile::Conservative, &p).map_err(|e| e.to_string())?;
    let costs = FrontierCosts::constant(405.0, s);
    let th = |f| sweep_thresholds(&budget, f, &costs, &corpus, 2_000, 1).map_err(|e| e.to_string());
    let json_n = th(SchemaFormat::Json)?.complete_overflow_n.ok_or("json never overflows")?;
    let cons_n = th(SchemaFormat::Conservative)?.complete_overflow_n.ok_or("conservative never overflows")?;
    ensure(json_n == 488, || format!("json overflows at n = {json_n}"))?;
    ensure(cons_n >= 800, || format!("conservative overflows at n = {cons_n}"))?;
    let ratio = cons_n as f64 / json_n as f64;
    let expect = 1.0 / (1.0 - s);
    ensure((ratio / expect - 1.0).abs() <= 0.02, || format!("ratio {ratio:.3} vs {expect:.3}"))?;

    let base = generate_novatech(42);
    let formats = [SchemaFormat::Json, SchemaFormat::Conservative];
    let rows =
        frontier_run(&budget, &[50, 100, 200, 300, 500, 800], &formats, &base, &OracleClient::default(), 42, 500, 350)
            .map_err(|e| e.to_string())?;
    let em = |n, f| rows.iter().find(|r| r.n_tools == n && r.format == f).map(|r| r.em_pct).unwrap_or(f64::NAN);
    for n in [500, 800] {
        let (j, c) = (em(n, SchemaFormat::Json), em(n, SchemaFormat::Conservative));
        ensure(j == 0.0 && c > 0.0, || format!("n = {n}: EM {j} vs {c}"))?;
    }
    for n in [50, 100, 200, 300] {
        let (j, c) = (em(n, SchemaFormat::Json), em(n, SchemaFormat::Conservative));
        ensure(j == c, || format!("n = {n}: EM {j} vs {c}"))?;
    }
    Ok(format!("json {json_n}, conservative {cons_n} (s = {s:.3}, ratio {ratio:.3})"))
}

/// Two-sided p by enumerating all sign assignments.
fn brute_force_p(diffs: &[f64]) -> f64 {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let ranks = doubled_ranks(&nz);
    let obs: u64 = nz.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let n = nz.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: u64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        le += u64::from(w <= obs);
        ge += u64::from(w >= obs);
    }
    (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
}

fn statistics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let n = rng.gen_range(1..=12);
        let diffs: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(-4i32..=4))).collect();
        if diffs.iter().all(|d| *d == 0.0) {
            continue;
        }
        let s = PairedSample::from_diffs(&diffs).map_err(|e| e.to_string())?;
        let got = wilcoxon_signed_rank(&s).map_err(|e| e.to_string())?.p;
        let want = brute_force_p(&diffs);
        ensure((got - want).abs() < 1e-9, || format!("instance {i} {diffs:?}: {got} vs {want}"))?;
    }
    let p = wilcoxon_signed_rank(&PairedSample::from_diffs(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()).unwrap().p;
    ensure((p - 0.0625).abs() < 1e-12, || format!("p = {p}"))?;
    let d = cohens_d(&PairedSample::from_diffs(&[0.0, 2.0]).unwrap()).map_err(|e| e.to_string())?;
    ensure((d - 0.5f64.sqrt()).abs() < 1e-6, || format!("d = {d}"))?;
    let s = PairedSample::from_diffs(&[0.3, -0.1, 0.8, 0.0, 1.2, 0.4]).unwrap();
    let (a, b) = (bootstrap_ci(&s, 10_000, 42, 0.95), bootstrap_ci(&s, 10_000, 42, 0.95));
    ensure(a.0.to_bits() == b.0.to_bits() && a.1.to_bits() == b.1.to_bits(), || "bootstrap drifted".into())?;
    Ok(format!("200 exact instances, d = {d:.4}"))
}

fn curve_recovery() -> Check {
    let (sa, sl, sc) = refined_steps();
    let ks: Vec<f64> = (0..=10).map(f64::from).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let (a, l, c) = (rng.gen_range(0.1..2.0), rng.gen_range(0.3..4.0), rng.gen_range(0.0..0.5));
        let truth =
            toolbudget::curvefit::SaturationFit { c_max: a, lambda: l, c0: c, r_squared: 1.0, mse: 0.0, n_points: 0 };
        let pts: Vec<(f64, f64)> = ks.iter().map(|&k| (k, eval_ck(&truth, k))).collect();
        let fit = fit_ck(&pts).map_err(|e| e.to_string())?;
        let close = (fit.c_max - a).abs() <= sa && (fit.lambda - l).abs() <= sl && (fit.c0 - c).abs() <= sc;
        ensure(close && fit.r_squared >= 0.999, || format!("triple {i} ({a:.3}, {l:.3}, {c:.3}) fit as {fit:?}"))?;
    }
    let b = generate_novatech(42);
    let mut records = Vec::new();
    for w in [8192, 16_384, 32_768] {
        for f in [SchemaFormat::Json, SchemaFormat::Conservative] {
            records.extend(run_all(&b, w, f, &OracleClient::default()));
        }
    }
    let fit = fit_ck(&curve_points(&records, CurveMetric::F1)).map_err(|e| e.to_string())?;
    let (g1, g2) = (marginal_gain(&fit, 1), marginal_gain(&fit, 2));
    ensure(fit.lambda >= 5.0, || format!("lambda {}", fit.lambda))?;
    ensure(g1 > 5.0 * g2, || format!("gains {g1} vs {g2}"))?;
    Ok(format!("20 triples recovered; oracle fit lambda {:.2}, gain(1) {g1:.3}, gain(2) {g2:.2e}", fit.lambda))
}

fn dilution() -> Check {
    let b = generate_novatech(42);
    let h = Harness::new(&b, TokenCountProfile::default());
    let cfg = BudgetConfig::new(32_768);
    let client = OracleClient::new(0.02, 1);
    let em_at = |k| {
        let opts = RunOptions { max_chunks: Some(k), ..RunOptions::default() };
        b.questions
            .iter()
            .map(|q| f64::from(h.run(q, SchemaFormat::Json, &cfg, &client, &opts).metrics.em))
            .sum::<f64>()
    };
    let (e9, e26) = (em_at(9), em_at(26));
    ensure(e26 < e9, || format!("EM {e26} at k = 26 vs {e9} at k = 9"))?;

    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..10u64 {
        let mut v = b.clone();
        v.catalog = b.catalog.prefix(10 + 2 * i as usize);
        let client = OracleClient::new(0.02, i);
        let json = run_all(&v, 16_384, SchemaFormat::Json, &client);
        let cons = run_all(&v, 16_384, SchemaFormat::Conservative, &client);
        let mean_k = |rs: &[EpisodeRecord]| rs.iter().map(|r| r.allocation.k as f64).sum::<f64>() / rs.len() as f64;
        xs.push(mean_k(&cons) - mean_k(&json));
        ys.push(em_pct(&cons) - em_pct(&json));
    }
    let r = pearson_r(&xs, &ys).map_err(|e| e.to_string())?;
    ensure(r < 0.0, || format!("r = {r}"))?;
    Ok(format!("EM {e9} at k = 9, {e26} at k = 26, r = {r:.3}"))
}

fn determinism() -> Check {
    let cat = generate_frontier_catalog(1000, 9).map_err(|e| e.to_string())?;
    for t in cat.tools() {
        for profile in [CompressionProfile::Conservative, CompressionProfile::Balanced] {
            let back = parse_compressed(&compress_tool(t, profile)).map_err(|e| e.to_string())?;
            ensure(back == vec![extract_core(t)], || format!("tool {} lost structure", t.name))?;
        }
    }
    for seed in [1, 42] {
        ensure(generate_novatech(seed).to_json() == generate_novatech(seed).to_json(), || {
            format!("seed {seed} not byte-stable")
        })?;
    }
    let b = generate_novatech(42);
    let once = |f| serde_json::to_string(&run_all(&b, 16_384, f, &OracleClient::default())).expect("serialize");
    for f in SchemaFormat::ALL {
        ensure(once(f) == once(f), || format!("{f} episodes differ between runs"))?;
    }
    Ok("1000 tools, 2 seeds, 3 formats".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("overflow regime", overflow_regime, 1),
        ("savings bands", savings_bands, 5),
        ("binary enablement", binary_enablement, 10),
        ("ceiling null", ceiling_null, 10),
        ("frontier thresholds", frontier_thresholds, 30),
        ("statistics", statistics, 30),
        ("curve-fit recovery", curve_recovery, 60),
        ("dilution", dilution, 10),
        ("round trip and determinism", determinism, 30),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let slow = took > Duration::from_secs(limit);
        let (status, detail) = match (&result, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {limit} s limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("criterion {}: {status} {name} ({:.2} s) {detail}", i + 1, took.as_secs_f64());
        if status == "FAIL" {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
