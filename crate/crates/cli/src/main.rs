use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use toolbudget::bench::{
    generate_frontier_catalog, generate_novatech_with, load_benchmark, save_benchmark, BenchConfig, Benchmark,
    GoldPlacement, DEFAULT_GOLD_RANK_BOUND,
};
use toolbudget::budget::{chunk_capacity, BudgetConfig};
use toolbudget::compress::{render_catalog, schema_tokens, SchemaFormat};
use toolbudget::curvefit::{fit_ck, marginal_gain};
use toolbudget::experiment::{
    build_client, curve_points, curve_table, load_records, paired_stats, report, run_experiment, ClientSpec,
    CurveMetric, ExperimentConfig, ExperimentError, ReportOptions, ReportShape, Table,
};
use toolbudget::harness::{ClientErrorKind, OracleClient};
use toolbudget::schema::{parse_catalog, serialize_catalog};
use toolbudget::stats::{
    bootstrap_ci, cohens_d, effect_label, stars, wilcoxon_signed_rank, PairedSample, BOOTSTRAP_RESAMPLES,
};
use toolbudget::sweeps::{
    frontier_benchmark, frontier_run, sweep_thresholds, CorpusSpec, FrontierCosts, SweepError, DEFAULT_FRONTIER_CHUNKS,
    DEFAULT_FRONTIER_CHUNK_TOKENS,
};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_TRANSPORT: u8 = 3;

/// Tool-schema compression and context-budget experiments.
#[derive(Parser)]
#[command(name = "toolbudget", version)]
struct Cli {
    /// Experiment config file (flat `key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the enterprise benchmark as JSON.
    GenBenchmark {
        #[arg(long, default_value = "top")]
        placement: String,
        #[arg(long, default_value_t = DEFAULT_GOLD_RANK_BOUND)]
        gold_rank_bound: usize,
    },
    /// Generate a synthetic catalog of `n` tools.
    GenFrontier {
        #[arg(long)]
        n: usize,
    },
    /// Render a catalog in a compressed format and report token costs.
    Compress {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long, default_value = "conservative")]
        format: SchemaFormat,
    },
    /// Retrieval budget and chunk capacity for a window and schema cost.
    PlanBudget(PlanArgs),
    /// Run an experiment, appending to `<out>/records.jsonl`.
    Run(RunArgs),
    /// Overflow thresholds and oracle accuracy across tool counts.
    SweepFrontier(SweepArgs),
    /// Fit the saturation curve to (k, score) pairs from run records.
    FitCurve {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = "f1")]
        metric: CurveMetric,
    },
    /// Paired significance test between two formats, or over raw differences.
    Stats(StatsArgs),
    /// Render a report table from run records.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        shape: ReportShape,
        #[arg(long)]
        bootstrap: bool,
        #[arg(long, default_value = "json")]
        baseline: SchemaFormat,
    },
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    window: usize,
    #[arg(long, conflicts_with = "catalog")]
    schema_tokens: Option<usize>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: SchemaFormat,
    #[arg(long, default_value_t = 0)]
    query_tokens: usize,
    #[arg(long, default_value_t = 350.0)]
    mean_chunk: f64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// Comma-separated formats.
    #[arg(long)]
    formats: Option<String>,
    /// Comma-separated window sizes.
    #[arg(long)]
    windows: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 200_000)]
    window: usize,
    #[arg(long, default_value = "json,conservative")]
    formats: String,
    /// Tool counts for the oracle run.
    #[arg(long, default_value = "50,100,200,300,500,800")]
    counts: String,
    /// Largest tool count for the threshold sweep.
    #[arg(long, default_value_t = 1000)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    granularity: usize,
    /// Constant JSON cost per tool; measured costs are used when absent.
    #[arg(long)]
    per_tool: Option<f64>,
    #[arg(long, default_value_t = 0.5, requires = "per_tool")]
    savings: f64,
    #[arg(long, default_value_t = DEFAULT_FRONTIER_CHUNKS)]
    corpus_chunks: usize,
    #[arg(long, default_value_t = DEFAULT_FRONTIER_CHUNK_TOKENS)]
    chunk_tokens: usize,
    /// Base benchmark; generated from the seed when absent.
    #[arg(long)]
    benchmark: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Only compute thresholds.
    #[arg(long)]
    skip_run: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, conflicts_with = "diffs")]
    records: Option<PathBuf>,
    /// Comma-separated paired differences.
    #[arg(long)]
    diffs: Option<String>,
    #[arg(long, default_value = "json")]
    a: SchemaFormat,
    #[arg(long, default_value = "conservative")]
    b: SchemaFormat,
    #[arg(long, default_value = "em")]
    metric: CurveMetric,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    bootstrap: bool,
    #[arg(long, default_value_t = BOOTSTRAP_RESAMPLES)]
    resamples: usize,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let code = if is_transport(&error) { EXIT_TRANSPORT } else { EXIT_VALIDATION };
        Failure { code, error }
    }
}

fn is_transport(e: &anyhow::Error) -> bool {
    if let Some(ExperimentError::Unreachable(_)) = e.downcast_ref::<ExperimentError>() {
        return true;
    }
    if let Some(SweepError::Episode { source, .. }) = e.downcast_ref::<SweepError>() {
        return matches!(source.kind, ClientErrorKind::Transport | ClientErrorKind::Timeout);
    }
    false
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, error: anyhow::anyhow!("{msg}") }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn out_dir(out: Option<&Path>) -> anyhow::Result<Option<PathBuf>> {
    if let Some(d) = out {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    Ok(out.map(Path::to_path_buf))
}

fn pretty<T: ?Sized + serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|e| usage(format!("bad {what} {x:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(usage(format!("empty {what} list")));
    }
    Ok(items)
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(toolbudget::experiment::DEFAULT_SEED);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::GenBenchmark { placement, gold_rank_bound } => {
            let gold_placement = match placement.as_str() {
                "top" => GoldPlacement::Top,
                "scattered" => GoldPlacement::Scattered,
                other => return Err(usage(format!("placement must be top or scattered, got {other:?}"))),
            };
            let bench =
                generate_novatech_with(&BenchConfig { seed, gold_placement, gold_rank_bound: *gold_rank_bound });
            bench.validate()?;
            match out {
                Some(p) => save_benchmark(&bench, p)?,
                None => println!("{}", bench.to_json()),
            }
            eprintln!(
                "benchmark {} ({} questions, {} chunks)",
                bench.content_hash(),
                bench.questions.len(),
                bench.chunks.len()
            );
        }
        Command::GenFrontier { n } => {
            let cat = generate_frontier_catalog(*n, seed)?;
            emit(out, &(serialize_catalog(&cat) + "\n"))?;
        }
        Command::Compress { catalog, format } => {
            let text = fs::read_to_string(catalog).with_context(|| format!("reading {}", catalog.display()))?;
            let cat = parse_catalog(&text)?;
            let counter = load_config(&cli)?.counter;
            emit(out, &(render_catalog(&cat, *format) + "\n"))?;
            let json = schema_tokens(&cat, SchemaFormat::Json, &counter);
            let tokens = schema_tokens(&cat, *format, &counter);
            eprintln!(
                "{} tools: json {json} tokens, {format} {tokens} tokens, savings {:.3}",
                cat.len(),
                1.0 - tokens as f64 / json.max(1) as f64
            );
        }
        Command::PlanBudget(a) => {
            if a.mean_chunk <= 0.0 {
                return Err(usage("--mean-chunk must be positive"));
            }
            let schema = match (&a.catalog, a.schema_tokens) {
                (Some(p), _) => {
                    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    schema_tokens(&parse_catalog(&text)?, a.format, &load_config(&cli)?.counter)
                }
                (None, Some(s)) => s,
                (None, None) => return Err(usage("give --schema-tokens or --catalog")),
            };
            let cfg = BudgetConfig::new(a.window).with_query(a.query_tokens);
            let v = serde_json::json!({
                "window": a.window,
                "schema_tokens": schema,
                "b_rag": cfg.rag_budget(schema),
                "slack": cfg.slack(schema),
                "overflow": cfg.slack(schema) <= 0,
                "chunk_capacity": chunk_capacity(&cfg, schema, a.mean_chunk),
            });
            emit(out, &pretty(&v))?;
        }
        Command::Run(a) => {
            let mut cfg = load_config(&cli)?;
            let mut sets: Vec<(&str, String)> = Vec::new();
            if let Some(b) = &a.benchmark {
                sets.push(("benchmark", b.display().to_string()));
            }
            if let Some(v) = &a.formats {
                sets.push(("formats", v.clone()));
            }
            if let Some(v) = &a.windows {
                sets.push(("windows", v.clone()));
            }
            if let Some(v) = a.epsilon {
                sets.push(("epsilon", v.to_string()));
            }
            if let Some(v) = &a.endpoint {
                sets.push(("endpoint", v.clone()));
            }
            if let Some(v) = &a.model {
                sets.push(("model", v.clone()));
            }
            if let Some(v) = a.workers {
                sets.push(("workers", v.to_string()));
            }
            for (k, v) in sets {
                cfg.set(k, &v).map_err(usage)?;
            }
            let summary = run_experiment(&cfg)?;
            println!("{summary}");
        }
        Command::SweepFrontier(a) => sweep(&cli, a, seed)?,
        Command::FitCurve { records, metric } => {
            let recs = load_records(records)?;
            let points = curve_points(&recs, *metric);
            let fit = fit_ck(&points)?;
            let gains: Vec<f64> = (1..=5).map(|k| marginal_gain(&fit, k)).collect();
            let v = serde_json::json!({ "fit": fit, "metric": metric, "marginal_gains": gains });
            match out_dir(out)? {
                Some(d) => {
                    fs::write(d.join("fit.json"), pretty(&v))?;
                    fs::write(d.join("curve.csv"), curve_table(&points, &fit).to_csv())?;
                }
                None => print!("{}", pretty(&v)),
            }
        }
        Command::Stats(a) => stats(a, out)?,
        Command::Report { records, shape, bootstrap, baseline } => {
            let recs = load_records(records)?;
            let opts = ReportOptions { baseline: *baseline, bootstrap: *bootstrap, seed, ..ReportOptions::default() };
            let table = report(&recs, *shape, &opts)?;
            print!("{}", table.to_text());
            if let Some(d) = out_dir(out)? {
                fs::write(d.join(format!("{}.csv", shape.as_str())), table.to_csv())?;
            }
        }
    }
    Ok(())
}

fn sweep(cli: &Cli, a: &SweepArgs, seed: u64) -> Result<(), Failure> {
    let formats: Vec<SchemaFormat> = list(&a.formats, "format")?;
    let counts: Vec<usize> = list(&a.counts, "tool count")?;
    if a.n_max < 1 || a.granularity < 1 {
        return Err(usage("--n-max and --granularity must be at least 1"));
    }
    let cfg = load_config(cli)?;
    let base: Benchmark = match &a.benchmark {
        Some(p) => load_benchmark(p)?,
        None => generate_novatech_with(&BenchConfig::new(seed)),
    };
    let costs = match a.per_tool {
        Some(per) => FrontierCosts::constant(per, a.savings),
        None => {
            let n = a.n_max.max(base.catalog.len());
            let b = frontier_benchmark(&base, n, seed, 0, a.chunk_tokens)?;
            FrontierCosts::measured(&b.catalog.prefix(a.n_max), &cfg.counter)
        }
    };
    let budget = BudgetConfig::new(a.window);
    let corpus = CorpusSpec::uniform(a.corpus_chunks, a.chunk_tokens);
    let reports = formats
        .iter()
        .map(|&f| sweep_thresholds(&budget, f, &costs, &corpus, a.n_max, a.granularity))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table =
        Table::new("Frontier scaling", &["n_tools", "format", "schema_tokens", "em", "f1", "mean_k", "overflow_rate"]);
    if !a.skip_run {
        let client = match &cfg.client {
            ClientSpec::Oracle { .. } if a.epsilon > 0.0 => Box::new(OracleClient::new(a.epsilon, seed)),
            spec => build_client(spec),
        };
        let rows =
            frontier_run(&budget, &counts, &formats, &base, client.as_ref(), seed, a.corpus_chunks, a.chunk_tokens)?;
        for r in rows {
            table.rows.push(vec![
                r.n_tools.to_string(),
                r.format.to_string(),
                r.schema_tokens.to_string(),
                format!("{:.1}", r.em_pct),
                format!("{:.3}", r.mean_f1),
                format!("{:.1}", r.mean_k),
                format!("{:.2}", r.overflow_rate),
            ]);
        }
    }
    match out_dir(cli.out.as_deref())? {
        Some(d) => {
            fs::write(d.join("thresholds.json"), pretty(&reports))?;
            if !a.skip_run {
                fs::write(d.join("frontier.csv"), table.to_csv())?;
            }
        }
        None => {
            print!("{}", pretty(&reports));
            if !a.skip_run {
                print!("{}", table.to_text());
            }
        }
    }
    Ok(())
}

fn stats(a: &StatsArgs, out: Option<&Path>) -> Result<(), Failure> {
    let opts = ReportOptions { bootstrap: a.bootstrap, resamples: a.resamples, ..ReportOptions::default() };
    let v = match (&a.records, &a.diffs) {
        (Some(p), _) => {
            let recs = load_records(p)?;
            serde_json::to_value(paired_stats(&recs, a.a, a.b, a.metric, a.window, &opts)?)?
        }
        (None, Some(d)) => {
            let diffs: Vec<f64> = list(d, "difference")?;
            let s = PairedSample::from_diffs(&diffs)?;
            let w = wilcoxon_signed_rank(&s).ok();
            let p = w.map_or(1.0, |w| w.p);
            let d = cohens_d(&s).ok();
            serde_json::json!({
                "n": s.len(),
                "mean_diff": s.mean_diff(),
                "wilcoxon": w,
                "p": p,
                "stars": stars(p),
                "cohens_d": d,
                "effect": d.map(effect_label),
                "ci": a.bootstrap.then(|| bootstrap_ci(&s, opts.resamples, opts.seed, opts.level)),
            })
        }
        (None, None) => bail_usage("give --records or --diffs")?,
    };
    emit(out, &pretty(&v))?;
    Ok(())
}

fn bail_usage<T>(msg: &str) -> Result<T, Failure> {
    Err(usage(msg))
}
