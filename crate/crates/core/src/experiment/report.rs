//! Report tables computed from run records alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::compress::SchemaFormat;
use crate::curvefit::{eval_ck, SaturationFit};
use crate::harness::EpisodeRecord;
use crate::stats::{
    bootstrap_ci, cohens_d, effect_label, stars, wilcoxon_signed_rank, PairedSample, StatsError, WilcoxonResult,
    BOOTSTRAP_RESAMPLES, BOOTSTRAP_SEED,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportShape {
    Enablement,
    Budget,
    Frontier,
    QType,
    DeltaMatrix,
}

impl ReportShape {
    pub const ALL: [ReportShape; 5] = [
        ReportShape::Enablement,
        ReportShape::Budget,
        ReportShape::Frontier,
        ReportShape::QType,
        ReportShape::DeltaMatrix,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReportShape::Enablement => "enablement",
            ReportShape::Budget => "budget",
            ReportShape::Frontier => "frontier",
            ReportShape::QType => "qtype",
            ReportShape::DeltaMatrix => "delta_matrix",
        }
    }
}

impl std::str::FromStr for ReportShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s.replace('-', "_"))
            .ok_or_else(|| format!("unknown report shape {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveMetric {
    Em,
    F1,
}

impl CurveMetric {
    fn of(self, r: &EpisodeRecord) -> f64 {
        match self {
            CurveMetric::Em => f64::from(r.metrics.em),
            CurveMetric::F1 => r.metrics.f1,
        }
    }
}

impl std::str::FromStr for CurveMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "em" => Ok(CurveMetric::Em),
            "f1" => Ok(CurveMetric::F1),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub baseline: SchemaFormat,
    pub bootstrap: bool,
    pub resamples: usize,
    pub seed: u64,
    pub level: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            baseline: SchemaFormat::Json,
            bootstrap: false,
            resamples: BOOTSTRAP_RESAMPLES,
            seed: BOOTSTRAP_SEED,
            level: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Self { title: title.to_string(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
    }

    /// Left-aligned text columns, two spaces apart, numbers right-aligned.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| self.rows.iter().map(|r| r[c].chars().count()).chain([self.headers[c].len()]).max().unwrap_or(0))
            .collect();
        let numeric = |s: &str| s.trim_end_matches('*').parse::<f64>().is_ok();
        let mut out = String::new();
        writeln!(out, "{}", self.title).unwrap();
        let line = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| if numeric(c) { format!("{c:>w$}") } else { format!("{c:<w$}") })
                .collect();
            writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
        };
        line(&self.headers, &mut out);
        writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")).unwrap();
        for r in &self.rows {
            line(r, &mut out);
        }
        out
    }
}

fn f(x: f64, places: usize) -> String {
    format!("{x:.places$}")
}

fn fmt_p(p: f64) -> String {
    if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

/// Records that share everything but the format.
type PairKey = (String, String, u64, usize, usize, String);
/// Display group: client, window, tool count.
type Group = (String, usize, usize);
type Pairs<'r> = BTreeMap<Group, Vec<(&'r EpisodeRecord, &'r EpisodeRecord)>>;

fn pair_key(r: &EpisodeRecord) -> PairKey {
    (r.client_id.clone(), r.benchmark_hash.clone(), r.seed, r.window, r.n_tools, r.question_id.clone())
}

fn group(r: &EpisodeRecord) -> Group {
    (r.client_id.clone(), r.window, r.n_tools)
}

/// Matched `(a, b)` records per group; every record of either format must
/// have its counterpart.
fn pair_up<'r>(records: &'r [EpisodeRecord], a: SchemaFormat, b: SchemaFormat) -> Result<Pairs<'r>, ExperimentError> {
    let index = |fmt: SchemaFormat| -> BTreeMap<PairKey, &'r EpisodeRecord> {
        records.iter().filter(|r| r.format == fmt).map(|r| (pair_key(r), r)).collect()
    };
    let (ia, ib) = (index(a), index(b));
    if ia.is_empty() || ib.is_empty() {
        let missing = if ia.is_empty() { a } else { b };
        return Err(ExperimentError::Unpairable(format!("no {missing} records to pair against")));
    }
    for (k, other, fmt) in ia.keys().map(|k| (k, &ib, b)).chain(ib.keys().map(|k| (k, &ia, a))) {
        if !other.contains_key(k) {
            return Err(ExperimentError::Unpairable(format!(
                "question {} (client {}, window {}, {} tools) has no {fmt} record",
                k.5, k.0, k.3, k.4
            )));
        }
    }
    let mut out: BTreeMap<Group, Vec<_>> = BTreeMap::new();
    for (k, ra) in &ia {
        out.entry(group(ra)).or_default().push((*ra, ib[k]));
    }
    Ok(out)
}

fn sample(pairs: &[(&EpisodeRecord, &EpisodeRecord)], metric: CurveMetric, scale: f64) -> PairedSample {
    PairedSample::new(pairs.iter().map(|(a, b)| (scale * metric.of(a), scale * metric.of(b))).collect())
        .expect("groups are non-empty")
}

/// Wilcoxon p, with all-zero differences reported as p = 1.
fn wilcoxon_p(s: &PairedSample) -> f64 {
    match wilcoxon_signed_rank(s) {
        Ok(w) => w.p,
        Err(_) => 1.0,
    }
}

fn mean_of<'a>(rs: impl IntoIterator<Item = &'a EpisodeRecord>, m: impl Fn(&EpisodeRecord) -> f64) -> (usize, f64) {
    let (n, s) = rs.into_iter().fold((0usize, 0.0), |(n, s), r| (n + 1, s + m(r)));
    (n, if n == 0 { 0.0 } else { s / n as f64 })
}

fn compared_formats(records: &[EpisodeRecord], baseline: SchemaFormat) -> Result<Vec<SchemaFormat>, ExperimentError> {
    let mut fs: Vec<SchemaFormat> = records.iter().map(|r| r.format).filter(|f| *f != baseline).collect();
    fs.sort();
    fs.dedup();
    if fs.is_empty() {
        return Err(ExperimentError::Unpairable(format!("no records in a format other than {baseline}")));
    }
    Ok(fs)
}

pub fn report(records: &[EpisodeRecord], shape: ReportShape, opts: &ReportOptions) -> Result<Table, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::Invalid("no run records".into()));
    }
    match shape {
        ReportShape::Enablement => enablement(records, opts),
        ReportShape::Budget => Ok(budget(records)),
        ReportShape::Frontier => Ok(frontier(records)),
        ReportShape::QType => qtype(records, opts),
        ReportShape::DeltaMatrix => delta_matrix(records, opts),
    }
}

fn ci_headers(mut h: Vec<&'static str>, opts: &ReportOptions) -> Vec<&'static str> {
    if opts.bootstrap {
        h.extend(["ci_lo", "ci_hi"]);
    }
    h
}

fn push_ci(row: &mut Vec<String>, s: &PairedSample, opts: &ReportOptions) {
    if opts.bootstrap {
        let (lo, hi) = bootstrap_ci(s, opts.resamples, opts.seed, opts.level);
        row.extend([f(lo, 1), f(hi, 1)]);
    }
}

fn enablement(records: &[EpisodeRecord], opts: &ReportOptions) -> Result<Table, ExperimentError> {
    let base = opts.baseline;
    let headers = ci_headers(vec!["model", "window", "format", "n", "base_em", "em", "delta_pp", "p", "sig"], opts);
    let mut t = Table::new(&format!("Binary enablement: EM % vs {base}"), &headers);
    for fmt in compared_formats(records, base)? {
        for ((client, window, _), pairs) in pair_up(records, base, fmt)? {
            let s = sample(&pairs, CurveMetric::Em, 100.0);
            let (em_a, em_b) = mean_pair(&s);
            let p = wilcoxon_p(&s);
            let mut row = vec![
                client,
                window.to_string(),
                fmt.to_string(),
                s.len().to_string(),
                f(em_a, 1),
                f(em_b, 1),
                format!("{:+.1}", em_b - em_a),
                fmt_p(p),
                stars(p).to_string(),
            ];
            push_ci(&mut row, &s, opts);
            t.rows.push(row);
        }
    }
    Ok(t)
}

fn mean_pair(s: &PairedSample) -> (f64, f64) {
    let n = s.len() as f64;
    let (a, b) = s.pairs().iter().fold((0.0, 0.0), |(x, y), (a, b)| (x + a, y + b));
    (a / n, b / n)
}

fn budget(records: &[EpisodeRecord]) -> Table {
    let mut t = Table::new(
        "Budget allocation",
        &["window", "format", "n", "schema_tokens", "b_rag", "mean_k", "overflow_rate"],
    );
    let mut groups: BTreeMap<(usize, SchemaFormat), Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.window, r.format)).or_default().push(r);
    }
    for ((window, fmt), rs) in groups {
        let (n, schema) = mean_of(rs.iter().copied(), |r| r.allocation.schema_tokens as f64);
        let (_, b_rag) = mean_of(rs.iter().copied(), |r| r.allocation.rag_budget as f64);
        let (_, k) = mean_of(rs.iter().copied(), |r| r.allocation.k as f64);
        let (_, o) = mean_of(rs.iter().copied(), |r| f64::from(u8::from(r.allocation.overflow)));
        t.rows.push(vec![
            window.to_string(),
            fmt.to_string(),
            n.to_string(),
            f(schema, 0),
            f(b_rag, 0),
            f(k, 1),
            f(o, 2),
        ]);
    }
    t
}

fn frontier(records: &[EpisodeRecord]) -> Table {
    let mut t = Table::new(
        "Frontier scaling",
        &["model", "window", "n_tools", "format", "n", "schema_tokens", "em", "f1", "mean_k", "overflow_rate"],
    );
    let mut groups: BTreeMap<(String, usize, usize, SchemaFormat), Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.client_id.clone(), r.window, r.n_tools, r.format)).or_default().push(r);
    }
    for ((client, window, n_tools, fmt), rs) in groups {
        let (n, em) = mean_of(rs.iter().copied(), |r| 100.0 * f64::from(r.metrics.em));
        let (_, f1) = mean_of(rs.iter().copied(), |r| r.metrics.f1);
        let (_, schema) = mean_of(rs.iter().copied(), |r| r.allocation.schema_tokens as f64);
        let (_, k) = mean_of(rs.iter().copied(), |r| r.allocation.k as f64);
        let (_, o) = mean_of(rs.iter().copied(), |r| f64::from(r.metrics.overflow));
        t.rows.push(vec![
            client,
            window.to_string(),
            n_tools.to_string(),
            fmt.to_string(),
            n.to_string(),
            f(schema, 0),
            f(em, 1),
            f(f1, 3),
            f(k, 1),
            f(o, 2),
        ]);
    }
    t
}

fn qtype(records: &[EpisodeRecord], opts: &ReportOptions) -> Result<Table, ExperimentError> {
    let base = opts.baseline;
    let mut t = Table::new(
        &format!("Accuracy by question type, delta vs {base}"),
        &["model", "window", "qtype", "format", "n", "em", "f1", "delta_pp"],
    );
    let mut rows: Vec<(Group, String, SchemaFormat, Vec<String>)> = Vec::new();
    for fmt in compared_formats(records, base)? {
        for (g, pairs) in pair_up(records, base, fmt)? {
            let mut by_type: BTreeMap<String, Vec<(&EpisodeRecord, &EpisodeRecord)>> = BTreeMap::new();
            for p in pairs {
                by_type.entry(p.0.qtype.to_string()).or_default().push(p);
            }
            for (qt, ps) in by_type {
                let (n, em_a) = mean_of(ps.iter().map(|p| p.0), |r| 100.0 * f64::from(r.metrics.em));
                let (_, em_b) = mean_of(ps.iter().map(|p| p.1), |r| 100.0 * f64::from(r.metrics.em));
                let (_, f1_a) = mean_of(ps.iter().map(|p| p.0), |r| r.metrics.f1);
                let (_, f1_b) = mean_of(ps.iter().map(|p| p.1), |r| r.metrics.f1);
                let cells = |fm: SchemaFormat, em: f64, f1: f64, d: String| {
                    vec![g.0.clone(), g.1.to_string(), qt.clone(), fm.to_string(), n.to_string(), f(em, 1), f(f1, 3), d]
                };
                rows.push((g.clone(), qt.clone(), base, cells(base, em_a, f1_a, String::new())));
                rows.push((g.clone(), qt.clone(), fmt, cells(fmt, em_b, f1_b, format!("{:+.1}", em_b - em_a))));
            }
        }
    }
    rows.sort_by(|a, b| (&a.0, &a.1, a.2).cmp(&(&b.0, &b.1, b.2)));
    rows.dedup_by(|a, b| (&a.0, &a.1, a.2) == (&b.0, &b.1, b.2));
    t.rows = rows.into_iter().map(|r| r.3).collect();
    Ok(t)
}

fn delta_matrix(records: &[EpisodeRecord], opts: &ReportOptions) -> Result<Table, ExperimentError> {
    let base = opts.baseline;
    let headers =
        ci_headers(vec!["model", "window", "format", "n", "em", "f1", "delta_em_pp", "delta_f1", "p", "sig"], opts);
    let mut t = Table::new(&format!("Complete results, deltas vs {base}"), &headers);
    let mut rows: BTreeMap<(Group, SchemaFormat), Vec<String>> = BTreeMap::new();
    for fmt in compared_formats(records, base)? {
        for (g, pairs) in pair_up(records, base, fmt)? {
            let em = sample(&pairs, CurveMetric::Em, 100.0);
            let f1 = sample(&pairs, CurveMetric::F1, 1.0);
            let (em_a, em_b) = mean_pair(&em);
            let (f1_a, f1_b) = mean_pair(&f1);
            let n = em.len().to_string();
            let blank = if opts.bootstrap { 4 } else { 2 };
            rows.entry((g.clone(), base)).or_insert_with(|| {
                let mut r = vec![g.0.clone(), g.1.to_string(), base.to_string(), n.clone(), f(em_a, 1), f(f1_a, 3)];
                r.extend(std::iter::repeat_n(String::new(), 2 + blank));
                r
            });
            let p = wilcoxon_p(&em);
            let mut row = vec![
                g.0.clone(),
                g.1.to_string(),
                fmt.to_string(),
                n,
                f(em_b, 1),
                f(f1_b, 3),
                format!("{:+.1}", em_b - em_a),
                format!("{:+.3}", f1_b - f1_a),
                fmt_p(p),
                stars(p).to_string(),
            ];
            push_ci(&mut row, &em, opts);
            rows.insert((g, fmt), row);
        }
    }
    t.rows = rows.into_values().collect();
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedStats {
    pub a: SchemaFormat,
    pub b: SchemaFormat,
    pub metric: CurveMetric,
    pub n: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_diff: f64,
    pub wilcoxon: Option<WilcoxonResult>,
    pub p: f64,
    pub stars: String,
    pub cohens_d: Option<f64>,
    pub effect: Option<String>,
    pub ci: Option<(f64, f64)>,
}

/// Pooled matched sample of `metric` for formats `a` and `b`, optionally
/// restricted to one window.
pub fn paired_samples(
    records: &[EpisodeRecord],
    a: SchemaFormat,
    b: SchemaFormat,
    metric: CurveMetric,
    window: Option<usize>,
) -> Result<PairedSample, ExperimentError> {
    let kept: Vec<EpisodeRecord> = records.iter().filter(|r| window.is_none_or(|w| r.window == w)).cloned().collect();
    let pairs: Vec<_> = pair_up(&kept, a, b)?.into_values().flatten().collect();
    Ok(sample(&pairs, metric, 1.0))
}

pub fn paired_stats(
    records: &[EpisodeRecord],
    a: SchemaFormat,
    b: SchemaFormat,
    metric: CurveMetric,
    window: Option<usize>,
    opts: &ReportOptions,
) -> Result<PairedStats, ExperimentError> {
    let s = paired_samples(records, a, b, metric, window)?;
    let w = match wilcoxon_signed_rank(&s) {
        Ok(w) => Some(w),
        Err(StatsError::AllZero) => None,
        Err(e) => return Err(ExperimentError::Invalid(e.to_string())),
    };
    let p = w.map_or(1.0, |w| w.p);
    let d = cohens_d(&s).ok();
    let (mean_a, mean_b) = mean_pair(&s);
    Ok(PairedStats {
        a,
        b,
        metric,
        n: s.len(),
        mean_a,
        mean_b,
        mean_diff: s.mean_diff(),
        wilcoxon: w,
        p,
        stars: stars(p).to_string(),
        cohens_d: d,
        effect: d.map(|d| effect_label(d).to_string()),
        ci: opts.bootstrap.then(|| bootstrap_ci(&s, opts.resamples, opts.seed, opts.level)),
    })
}

/// `(k, score)` for every episode that finished without a client error.
pub fn curve_points(records: &[EpisodeRecord], metric: CurveMetric) -> Vec<(f64, f64)> {
    records.iter().filter(|r| r.error.is_none()).map(|r| (r.allocation.k as f64, metric.of(r))).collect()
}

/// Per-k mean score next to the fitted curve, for plotting.
pub fn curve_table(points: &[(f64, f64)], fit: &SaturationFit) -> Table {
    let mut t = Table::new("Score by packed chunks", &["k", "n", "mean_score", "fitted"]);
    let mut by_k: BTreeMap<u64, (usize, f64)> = BTreeMap::new();
    for &(k, y) in points {
        let e = by_k.entry(k as u64).or_default();
        e.0 += 1;
        e.1 += y;
    }
    for (k, (n, s)) in by_k {
        t.rows.push(vec![k.to_string(), n.to_string(), f(s / n as f64, 4), f(eval_ck(fit, k as f64), 4)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_names_round_trip() {
        for s in ReportShape::ALL {
            assert_eq!(s.as_str().parse::<ReportShape>().unwrap(), s);
        }
        assert!("pie".parse::<ReportShape>().is_err());
    }

    #[test]
    fn text_table_aligns() {
        let mut t = Table::new("T", &["name", "value"]);
        t.rows.push(vec!["a".into(), "1.5".into()]);
        t.rows.push(vec!["long".into(), "10.25".into()]);
        let text = t.to_text();
        assert!(text.contains("a       1.5"), "{text}");
        assert!(t.to_csv().starts_with("name,value\n"));
    }
}
