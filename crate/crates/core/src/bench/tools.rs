//! Tool catalogs for the enterprise benchmark and the frontier sweeps.
//!
//! Tools are drafted from templates plus randomly drawn optional parameters,
//! then calibrated: optional enum parameters grow by drawing further values
//! from their pools, and descriptions grow by detail sentences after the
//! summary. Enum growth moves both JSON and compressed sizes, detail
//! sentences move only the JSON size, which lets the two be steered apart.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::pools::{ARRAY_PARAMS, DETAIL_SENTENCES, ENUM_PARAMS, OBJECT_PARAMS, SCALAR_PARAMS, TAG_WORDS};
use super::prng::stream;
use crate::compress::{compress_tool, CompressionProfile};
use crate::schema::{serialize_tool, ParamType, ParameterSpec, ScalarKind, ToolCatalog, ToolDefinition};
use crate::tokens::TokenCountProfile;

/// Compressed (conservative) size of the enterprise catalog, in tokens.
pub const NOVATECH_COMPRESSED_TOKENS: usize = 5500;
/// JSON size the enterprise catalog is steered towards, in tokens.
pub const NOVATECH_JSON_TOKENS: usize = 10_950;

pub const FRONTIER_MIN_COST: f64 = 380.0;
pub const FRONTIER_MAX_COST: f64 = 473.0;
/// Shape of the per-tool cost distribution on `[min, max]`; with this
/// exponent the mean is 405.
const FRONTIER_COST_EXPONENT: f64 = 2.72;
const FRONTIER_BLOCK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToolCategory {
    Database,
    Document,
    Computation,
    Communication,
}

/// Required parameters of a template, used by gold tool calls.
#[derive(Debug, Clone, Copy)]
pub enum KeyKind {
    Str,
    Int,
    Num,
    Enum(&'static [&'static str]),
}

pub struct Template {
    pub name: &'static str,
    pub category: ToolCategory,
    pub summary: &'static str,
    pub keys: &'static [(&'static str, KeyKind)],
}

pub const QUARTERS: &[&str] = &["Q1", "Q2", "Q3", "Q4"];
pub const METRICS: &[&str] = &[
    "gross_margin",
    "operating_margin",
    "ebitda_margin",
    "net_revenue_retention",
    "customer_churn",
    "days_sales_outstanding",
    "cash_conversion_cycle",
    "revenue_per_employee",
];
pub const PRODUCT_LINES: &[&str] = &[
    "helix_platform",
    "atlas_analytics",
    "nimbus_storage",
    "orion_security",
    "vega_mobile",
    "lyra_connect",
    "pulsar_edge",
    "quasar_ai",
];
pub const CURRENCIES: &[&str] = &["EUR", "USD", "GBP", "CHF", "JPY", "SEK", "PLN", "CAD"];
pub const DEPARTMENTS: &[&str] =
    &["finance", "engineering", "sales", "marketing", "human_resources", "legal", "operations", "procurement"];
pub const KPIS: &[&str] = &[
    "monthly_active_users",
    "support_backlog",
    "on_time_delivery",
    "employee_attrition",
    "pipeline_coverage",
    "first_response_time",
];
pub const SEVERITIES: &[&str] = &["low", "medium", "high", "critical"];

use KeyKind::*;
use ToolCategory::*;

pub const TEMPLATES: &[Template] = &[
    Template {
        name: "query_employees",
        category: Database,
        summary: "Look up employee records in the HR directory by identifier.",
        keys: &[("employee_id", Str)],
    },
    Template {
        name: "financial_report",
        category: Database,
        summary: "Return the consolidated financial report for one fiscal quarter.",
        keys: &[("fiscal_year", Int), ("fiscal_quarter", Enum(QUARTERS))],
    },
    Template {
        name: "get_customer_account",
        category: Database,
        summary: "Fetch a customer account with tier, owner and contract value.",
        keys: &[("account_id", Str)],
    },
    Template {
        name: "list_purchase_orders",
        category: Database,
        summary: "Retrieve purchase orders and their approval status by number.",
        keys: &[("po_number", Str)],
    },
    Template {
        name: "query_inventory",
        category: Database,
        summary: "Check current stock levels for a product SKU across warehouses.",
        keys: &[("sku", Str)],
    },
    Template {
        name: "get_project_status",
        category: Database,
        summary: "Report the delivery phase and budget burn of a project.",
        keys: &[("project_code", Str)],
    },
    Template {
        name: "lookup_vendor",
        category: Database,
        summary: "Look up a registered vendor and its commercial terms.",
        keys: &[("vendor_id", Str)],
    },
    Template {
        name: "search_knowledge_base",
        category: Document,
        summary: "Search the internal knowledge base for matching articles and pages.",
        keys: &[("query", Str)],
    },
    Template {
        name: "get_policy_document",
        category: Document,
        summary: "Fetch the current text of a company policy document.",
        keys: &[("policy_id", Str)],
    },
    Template {
        name: "list_documents",
        category: Document,
        summary: "List documents stored in a shared folder with their metadata.",
        keys: &[("folder", Str)],
    },
    Template {
        name: "get_document_revision",
        category: Document,
        summary: "Retrieve one specific revision of a controlled document.",
        keys: &[("document_id", Str), ("revision", Int)],
    },
    Template {
        name: "search_contracts",
        category: Document,
        summary: "Search signed contracts by counterparty name and contract type.",
        keys: &[("counterparty", Str)],
    },
    Template {
        name: "fetch_meeting_notes",
        category: Document,
        summary: "Fetch the published notes and action items of a meeting.",
        keys: &[("meeting_id", Str)],
    },
    Template {
        name: "get_product_spec",
        category: Document,
        summary: "Return the technical specification sheet for a product line.",
        keys: &[("product", Enum(PRODUCT_LINES))],
    },
    Template {
        name: "calculate_metrics",
        category: Computation,
        summary: "Compute a standard business metric for one fiscal quarter.",
        keys: &[("metric", Enum(METRICS)), ("fiscal_quarter", Enum(QUARTERS)), ("fiscal_year", Int)],
    },
    Template {
        name: "forecast_revenue",
        category: Computation,
        summary: "Forecast revenue for a product line over future quarters.",
        keys: &[("product_line", Enum(PRODUCT_LINES)), ("horizon_quarters", Int)],
    },
    Template {
        name: "compute_budget_variance",
        category: Computation,
        summary: "Compute the budget variance of a cost center for a quarter.",
        keys: &[("cost_center", Str), ("fiscal_quarter", Enum(QUARTERS))],
    },
    Template {
        name: "convert_currency",
        category: Computation,
        summary: "Convert an amount between currencies at the treasury rate.",
        keys: &[("amount", Num), ("source_currency", Enum(CURRENCIES)), ("target_currency", Enum(CURRENCIES))],
    },
    Template {
        name: "calculate_headcount_cost",
        category: Computation,
        summary: "Estimate the fully loaded annual cost of additional headcount.",
        keys: &[("department", Enum(DEPARTMENTS)), ("headcount", Int)],
    },
    Template {
        name: "estimate_project_cost",
        category: Computation,
        summary: "Estimate the total delivery cost of a staffed project.",
        keys: &[("project_code", Str), ("team_size", Int)],
    },
    Template {
        name: "compute_kpi_trend",
        category: Computation,
        summary: "Compute the trend of a KPI over recent reporting periods.",
        keys: &[("kpi", Enum(KPIS)), ("periods", Int)],
    },
    Template {
        name: "send_email",
        category: Communication,
        summary: "Send an email from the shared service mailbox to one recipient.",
        keys: &[("recipient", Str), ("subject", Str)],
    },
    Template {
        name: "post_chat_message",
        category: Communication,
        summary: "Post a message to a team chat channel as the assistant.",
        keys: &[("channel", Str), ("text", Str)],
    },
    Template {
        name: "create_support_ticket",
        category: Communication,
        summary: "Open a support ticket for a customer account with a severity.",
        keys: &[("account_id", Str), ("severity", Enum(SEVERITIES))],
    },
    Template {
        name: "schedule_meeting",
        category: Communication,
        summary: "Schedule a meeting and reserve a free room for the organizer.",
        keys: &[("organizer", Str), ("duration_minutes", Int)],
    },
    Template {
        name: "notify_manager",
        category: Communication,
        summary: "Notify the line manager of an employee about an event.",
        keys: &[("employee_id", Str), ("reason", Str)],
    },
    Template {
        name: "create_calendar_event",
        category: Communication,
        summary: "Create a shared calendar event on the company calendar.",
        keys: &[("title", Str), ("date", Str)],
    },
    Template {
        name: "send_sms_alert",
        category: Communication,
        summary: "Send a short SMS alert to an on-call phone number.",
        keys: &[("phone_number", Str), ("message", Str)],
    },
];

pub fn template(name: &str) -> Option<&'static Template> {
    TEMPLATES.iter().find(|t| t.name == name)
}

fn scalar_kind(c: char) -> ScalarKind {
    match c {
        'i' => ScalarKind::Integer,
        'n' => ScalarKind::Number,
        'b' => ScalarKind::Boolean,
        _ => ScalarKind::String,
    }
}

fn values(pool: usize) -> Vec<&'static str> {
    ENUM_PARAMS[pool].1.split_whitespace().collect()
}

/// Optional enum parameter whose value list can still grow.
#[derive(Debug, Clone)]
struct EnumSlot {
    param: usize,
    pool: usize,
    used: Vec<bool>,
}

#[derive(Debug, Clone)]
struct Draft {
    tool: ToolDefinition,
    summary: String,
    details: Vec<&'static str>,
    slots: Vec<EnumSlot>,
}

impl Draft {
    fn new(
        rng: &mut ChaCha20Rng,
        name: String,
        summary: String,
        keys: Vec<ParameterSpec>,
        total_params: usize,
    ) -> Self {
        let mut tool = ToolDefinition::new(name, summary.clone());
        for k in keys {
            tool = tool.param(k, true);
        }
        let mut slots = Vec::new();
        let mut attempts = 0;
        while tool.parameters.len() < total_params && attempts < 200 {
            attempts += 1;
            let roll: f64 = rng.gen();
            let (spec, slot) = if roll < 0.72 {
                let pool = rng.gen_range(0..ENUM_PARAMS.len());
                let all = values(pool);
                let start = rng.gen_range(2..=4).min(all.len());
                let spec = ParameterSpec::enumeration(ENUM_PARAMS[pool].0, all[..start].iter().copied());
                let spec = if rng.gen_bool(0.3) { spec.with_default(all[0]) } else { spec };
                let mut used = vec![false; all.len()];
                used[..start].iter_mut().for_each(|u| *u = true);
                (spec, Some((pool, used)))
            } else if roll < 0.87 {
                let (name, kind, default) = SCALAR_PARAMS[rng.gen_range(0..SCALAR_PARAMS.len())];
                let mut spec = ParameterSpec::scalar(name, scalar_kind(kind));
                if let Some(d) = default {
                    spec = spec.with_default(d);
                }
                (spec, None)
            } else if roll < 0.94 {
                let (name, item) = ARRAY_PARAMS[rng.gen_range(0..ARRAY_PARAMS.len())];
                (ParameterSpec::array(name, scalar_kind(item)), None)
            } else {
                let (name, children) = OBJECT_PARAMS[rng.gen_range(0..OBJECT_PARAMS.len())];
                let children = children.iter().map(|(c, k)| ParameterSpec::scalar(*c, scalar_kind(*k))).collect();
                (ParameterSpec::object(name, children), None)
            };
            if tool.get(&spec.name).is_some() {
                continue;
            }
            let required = slot.is_none() && spec.default_value.is_none() && rng.gen_bool(0.2);
            if let Some((pool, used)) = slot {
                slots.push(EnumSlot { param: tool.parameters.len(), pool, used });
            }
            tool = tool.param(spec, required);
        }
        Draft { tool, summary, details: Vec::new(), slots }
    }

    fn set_description(&mut self, tail: &str) {
        let mut d = self.summary.clone();
        for s in &self.details {
            d.push(' ');
            d.push_str(s);
        }
        d.push_str(tail);
        self.tool.description = d;
    }

    fn push_value(&mut self, slot: usize, idx: usize) -> &'static str {
        let s = &mut self.slots[slot];
        s.used[idx] = true;
        let v = values(s.pool)[idx];
        if let ParamType::Enum(vals) = &mut self.tool.parameters[s.param].ty {
            vals.push(v.to_string());
        }
        v
    }

    fn next_unused(&self, slot: usize) -> Option<usize> {
        self.slots[slot].used.iter().position(|u| !u)
    }

    fn json_len(&self) -> usize {
        serialize_tool(&self.tool).len()
    }

    fn compressed_len(&self) -> usize {
        compress_tool(&self.tool, CompressionProfile::Conservative).len()
    }
}

// Growing an enum by one unquoted value `v` adds `|v` to the compressed line
// and `, "v"` to the JSON.
fn compressed_growth(v: &str) -> usize {
    v.len() + 1
}

fn json_growth(v: &str) -> usize {
    v.len() + 4
}

fn key_spec(name: &str, kind: KeyKind) -> ParameterSpec {
    match kind {
        Str => ParameterSpec::scalar(name, ScalarKind::String),
        Int => ParameterSpec::scalar(name, ScalarKind::Integer),
        Num => ParameterSpec::scalar(name, ScalarKind::Number),
        Enum(vals) => ParameterSpec::enumeration(name, vals.iter().copied()),
    }
}

/// The 28-tool enterprise catalog: conservative compression costs exactly
/// [`NOVATECH_COMPRESSED_TOKENS`] and the JSON form about
/// [`NOVATECH_JSON_TOKENS`] under the default counter.
pub fn novatech_catalog(seed: u64) -> ToolCatalog {
    let counter = TokenCountProfile::default();
    let mut rng = stream(seed, "novatech/tools");
    let mut drafts: Vec<Draft> = TEMPLATES
        .iter()
        .map(|t| {
            let keys = t.keys.iter().map(|(n, k)| key_spec(n, *k)).collect::<Vec<_>>();
            let total = rng.gen_range(6..=8).max(keys.len() + 3);
            Draft::new(&mut rng, t.name.to_string(), t.summary.to_string(), keys, total)
        })
        .collect();

    // Compressed size: grow enums round-robin, then close the last gap with
    // the best-fitting unused value anywhere in the catalog.
    let target = counter.max_bytes_for(NOVATECH_COMPRESSED_TOKENS);
    let mut cur: usize = drafts.iter().map(Draft::compressed_len).sum::<usize>() + drafts.len() - 1;
    let mut grew = true;
    while grew {
        grew = false;
        for d in drafts.iter_mut() {
            for s in 0..d.slots.len() {
                if let Some(i) = d.next_unused(s) {
                    let v = values(d.slots[s].pool)[i];
                    if cur + compressed_growth(v) <= target {
                        d.push_value(s, i);
                        cur += compressed_growth(v);
                        grew = true;
                    }
                }
            }
        }
    }
    while target - cur >= 4 {
        let gap = target - cur;
        let best = drafts
            .iter()
            .enumerate()
            .flat_map(|(d, draft)| {
                draft.slots.iter().enumerate().flat_map(move |(s, slot)| {
                    values(slot.pool)
                        .into_iter()
                        .enumerate()
                        .filter(move |(i, _)| !slot.used[*i])
                        .map(move |(i, v)| (compressed_growth(v), d, s, i))
                })
            })
            .filter(|(g, ..)| *g <= gap)
            .max_by_key(|(g, d, s, i)| (*g, std::cmp::Reverse((*d, *s, *i))));
        let Some((g, d, s, i)) = best else { break };
        drafts[d].push_value(s, i);
        cur += g;
    }

    // JSON size: detail sentences only appear in JSON.
    let json_target = NOVATECH_JSON_TOKENS * 4;
    let mut json: usize = drafts.iter().map(Draft::json_len).sum::<usize>() + 2 + 2 * (drafts.len() - 1);
    let mut order: Vec<usize> = (0..drafts.len()).collect();
    order.shuffle(&mut rng);
    'fill: for round in 0..DETAIL_SENTENCES.len() {
        for &d in &order {
            if json >= json_target {
                break 'fill;
            }
            let pick = DETAIL_SENTENCES[(d * 5 + round * 3) % DETAIL_SENTENCES.len()];
            if drafts[d].details.contains(&pick) {
                continue;
            }
            drafts[d].details.push(pick);
            json += pick.len() + 1;
        }
    }
    for d in &mut drafts {
        d.set_description("");
    }
    ToolCatalog::new(drafts.into_iter().map(|d| d.tool).collect()).expect("templates are valid and distinct")
}

const VERBS: &[&str] = &[
    "sync",
    "list",
    "fetch",
    "update",
    "archive",
    "approve",
    "export",
    "validate",
    "reconcile",
    "schedule",
    "publish",
    "resolve",
    "assign",
    "audit",
    "estimate",
    "import",
];
const NOUNS: &[&str] = &[
    "invoices",
    "shipments",
    "leads",
    "contracts",
    "tickets",
    "assets",
    "payroll_runs",
    "timesheets",
    "campaigns",
    "vendors",
    "budgets",
    "licenses",
    "incidents",
    "orders",
    "expenses",
    "forecasts",
    "devices",
    "subscriptions",
];
const SCOPES: &[&str] = &[
    "selected business unit",
    "requesting team",
    "current fiscal period",
    "chosen region",
    "given account",
    "active workspace",
    "regional office",
    "reporting entity",
];

/// Target JSON cost of the `j`-th frontier tool. Costs are drawn by
/// stratified sampling in blocks of sixteen, which keeps every prefix of the
/// sequence close to the distribution mean.
pub fn frontier_tool_cost(seed: u64, j: usize) -> usize {
    let block = j / FRONTIER_BLOCK;
    let mut rng = stream(seed, &format!("frontier/block/{block}"));
    let mut strata: Vec<usize> = (0..FRONTIER_BLOCK).collect();
    strata.shuffle(&mut rng);
    let jitters: Vec<f64> = (0..FRONTIER_BLOCK).map(|_| rng.gen()).collect();
    let pos = j % FRONTIER_BLOCK;
    let u = (strata[pos] as f64 + jitters[pos]) / FRONTIER_BLOCK as f64;
    let cost = FRONTIER_MIN_COST + (FRONTIER_MAX_COST - FRONTIER_MIN_COST) * u.powf(FRONTIER_COST_EXPONENT);
    cost.round() as usize
}

/// One synthetic frontier tool whose canonical JSON costs exactly
/// [`frontier_tool_cost`] tokens under the default counter, with conservative
/// compression at roughly half of that.
pub fn frontier_tool(seed: u64, j: usize) -> ToolDefinition {
    let counter = TokenCountProfile::default();
    let cost = frontier_tool_cost(seed, j);
    let mut rng = stream(seed, &format!("frontier/tool/{j}"));
    let verb = VERBS[rng.gen_range(0..VERBS.len())];
    let noun = NOUNS[rng.gen_range(0..NOUNS.len())];
    let scope = SCOPES[rng.gen_range(0..SCOPES.len())];
    let name = format!("{verb}_{noun}_{j:03}");
    let summary = format!("{} {} records for the {scope}.", capitalize(verb), noun.replace('_', " "));
    let key = ParameterSpec::scalar(format!("{}_id", noun.trim_end_matches('s')), ScalarKind::String);
    let mut draft = Draft::new(&mut rng, name, summary, vec![key], 8);

    let json_max = counter.max_bytes_for(cost);
    let comp_max = counter.max_bytes_for(cost / 2);
    // Room kept for the closing padding sentence.
    let reserve = 12;

    let mut json = draft.json_len();
    let mut comp = draft.compressed_len();
    let mut grew = true;
    while grew {
        grew = false;
        for s in 0..draft.slots.len() {
            if let Some(i) = draft.next_unused(s) {
                let v = values(draft.slots[s].pool)[i];
                if comp + compressed_growth(v) <= comp_max && json + json_growth(v) + reserve <= json_max {
                    draft.push_value(s, i);
                    comp += compressed_growth(v);
                    json += json_growth(v);
                    grew = true;
                }
            }
        }
    }
    let mut order: Vec<&'static str> = DETAIL_SENTENCES.to_vec();
    order.shuffle(&mut rng);
    for s in order {
        if json + s.len() + 1 + reserve <= json_max {
            draft.details.push(s);
            json += s.len() + 1;
        }
    }
    draft.set_description("");
    let json = draft.json_len();
    let gap = json_max.saturating_sub(json);
    if gap >= 10 {
        draft.set_description(&padding_sentence(gap, &mut rng));
    }
    debug_assert!(counter.count_tokens(&serialize_tool(&draft.tool)) == cost);
    draft.tool
}

pub fn generate_frontier_catalog(n: usize, seed: u64) -> Result<ToolCatalog, super::BenchError> {
    if n == 0 {
        return Err(super::BenchError::InvalidArgument("frontier catalog needs at least one tool".into()));
    }
    let tools = (0..n).map(|j| frontier_tool(seed, j)).collect();
    Ok(ToolCatalog::new(tools).expect("frontier names are unique"))
}

/// ` Tags: w1 w2 ... wn.` of exactly `len` bytes (`len >= 10`).
fn padding_sentence(len: usize, rng: &mut ChaCha20Rng) -> String {
    let mut out = String::from(" Tags:");
    let mut room = len - out.len() - 1;
    while room > 0 {
        // Each word costs its length plus one space.
        let fitting: Vec<&str> =
            TAG_WORDS.iter().copied().filter(|w| w.len() + 1 == room || w.len() + 1 + 3 <= room).collect();
        let w = match fitting.iter().find(|w| w.len() + 1 == room) {
            Some(w) if room <= 13 => w.to_string(),
            _ if fitting.is_empty() => "x".repeat(room - 1),
            _ => fitting[rng.gen_range(0..fitting.len())].to_string(),
        };
        out.push(' ');
        out.push_str(&w);
        room -= w.len() + 1;
    }
    out.push('.');
    out
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_hits_exact_lengths() {
        let mut rng = stream(1, "t");
        for len in 10..200 {
            assert_eq!(padding_sentence(len, &mut rng).len(), len, "len {len}");
        }
    }
}
