//! The NovaTech enterprise benchmark: a fictional company's tool catalog,
//! document corpus and question set.
//!
//! Answers are planted as single sentences near the top of their chunk, so a
//! chunk that is tail-truncated to fit a small retrieval budget still holds
//! its fact. Every question's supporting spans are literal substrings of its
//! gold evidence.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde_json::{Map, Value};

use super::pools::{FIRST_NAMES, JOB_TITLES, LAST_NAMES, OFFICES, PRODUCTS, PROJECTS, SEGMENTS, VENDOR_NAMES};
use super::prng::stream;
use super::tools::{novatech_catalog, CURRENCIES, DEPARTMENTS, KPIS, METRICS, PRODUCT_LINES, QUARTERS, SEVERITIES};
use super::{
    BenchConfig, Benchmark, Chunk, ChunkCategory, GoldPlacement, GoldTool, Question, QuestionType, SpanRef,
    FORMAT_VERSION, NOT_ANSWERABLE,
};
use crate::schema::to_canonical_string;
use crate::tokens::TokenCountProfile;

const LONG_CHUNK_BYTES: usize = 1400;
const RECORD_CHUNK_BYTES: usize = 600;
const SUMMARY_BYTES: (usize, usize) = (800, 1000);

/// A fact planted in a chunk, with the question it answers.
struct Fact {
    topic: String,
    sentence: String,
    question: String,
    answer: String,
    aliases: Vec<String>,
    /// Second hop resolved by a tool call, for bridging facts.
    tool: Option<(GoldTool, String)>,
}

struct Gen {
    rng: ChaCha20Rng,
    used: BTreeSet<String>,
}

impl Gen {
    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }

    fn fresh(&mut self, mut make: impl FnMut(&mut ChaCha20Rng) -> String) -> String {
        loop {
            let v = make(&mut self.rng);
            if self.used.insert(v.clone()) {
                return v;
            }
        }
    }

    fn code(&mut self, prefix: &str, lo: u32, hi: u32) -> String {
        self.fresh(|r| format!("{prefix}-{}", r.gen_range(lo..hi)))
    }

    fn person(&mut self) -> String {
        self.fresh(|r| {
            format!(
                "{} {}",
                FIRST_NAMES[r.gen_range(0..FIRST_NAMES.len())],
                LAST_NAMES[r.gen_range(0..LAST_NAMES.len())]
            )
        })
    }

    fn one_decimal(&mut self, lo: f64, hi: f64) -> String {
        format!("{:.1}", self.rng.gen_range(lo..hi))
    }
}

/// Evidence record as canonical JSON, plus the `"key": "value"` span for one field.
fn record(fields: &[(&str, String)], answer_key: &str) -> (String, String) {
    let mut map = Map::new();
    for (k, v) in fields {
        map.insert(k.to_string(), Value::String(v.clone()));
    }
    let text = to_canonical_string(&map);
    let value = &fields.iter().find(|(k, _)| *k == answer_key).expect("answer field present").1;
    let span = format!("\"{answer_key}\": {}", serde_json::to_string(value).unwrap());
    (text, span)
}

fn args(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

// ---------------------------------------------------------------------------
// Entity lookups resolved by tools

struct Lookup {
    tool: GoldTool,
    span: String,
    answer: String,
}

fn employee_lookup(g: &mut Gen, employee_id: &str, field: &str) -> Lookup {
    let name = g.person();
    let title = g.pick(JOB_TITLES).to_string();
    let office = g.pick(OFFICES).to_string();
    let ext = g.fresh(|r| r.gen_range(2000..9000).to_string());
    let year = g.rng.gen_range(2012..2024).to_string();
    let fields = [
        ("employee_id", employee_id.to_string()),
        ("name", name),
        ("job_title", title),
        ("office", office),
        ("phone_extension", ext),
        ("start_year", year),
    ];
    let (evidence, span) = record(&fields, field);
    let answer = fields.iter().find(|(k, _)| *k == field).unwrap().1.clone();
    Lookup {
        tool: GoldTool { name: "query_employees".into(), arguments: args(&[("employee_id", employee_id)]), evidence },
        span,
        answer,
    }
}

fn account_lookup(g: &mut Gen, account_id: &str, field: &str) -> Lookup {
    let tier = g.pick(&["gold", "platinum", "enterprise", "strategic"]).to_string();
    let manager = g.person();
    let acv = format!("{} million EUR", g.one_decimal(0.4, 4.0));
    let fields = [
        ("account_id", account_id.to_string()),
        ("tier", tier),
        ("account_manager", manager),
        ("annual_contract_value", acv),
    ];
    let (evidence, span) = record(&fields, field);
    let answer = fields.iter().find(|(k, _)| *k == field).unwrap().1.clone();
    Lookup {
        tool: GoldTool {
            name: "get_customer_account".into(),
            arguments: args(&[("account_id", account_id)]),
            evidence,
        },
        span,
        answer,
    }
}

fn vendor_lookup(g: &mut Gen, vendor_id: &str, name: &str, field: &str) -> Lookup {
    let terms = format!("net {}", g.pick(&[15, 30, 45, 60, 90]));
    let country = g.pick(&["Czechia", "Poland", "Portugal", "Germany", "Ireland", "Spain"]).to_string();
    let rating = g.pick(&["preferred", "approved", "probation"]).to_string();
    let fields = [
        ("vendor_id", vendor_id.to_string()),
        ("vendor_name", name.to_string()),
        ("payment_terms", terms),
        ("country", country),
        ("risk_rating", rating),
    ];
    let (evidence, span) = record(&fields, field);
    let answer = fields.iter().find(|(k, _)| *k == field).unwrap().1.clone();
    Lookup {
        tool: GoldTool { name: "lookup_vendor".into(), arguments: args(&[("vendor_id", vendor_id)]), evidence },
        span,
        answer,
    }
}

fn inventory_lookup(g: &mut Gen, sku: &str) -> Lookup {
    let units = g.rng.gen_range(120..4800).to_string();
    let warehouse = g.pick(&["Rotterdam Port", "Berlin Central", "Lisbon North", "Warsaw East"]).to_string();
    let fields = [("sku", sku.to_string()), ("units_on_hand", units), ("warehouse", warehouse)];
    let (evidence, span) = record(&fields, "units_on_hand");
    Lookup {
        tool: GoldTool { name: "query_inventory".into(), arguments: args(&[("sku", sku)]), evidence },
        span,
        answer: fields[1].1.clone(),
    }
}

// ---------------------------------------------------------------------------
// Document facts

fn policy_fact(g: &mut Gen, i: usize) -> Fact {
    let plain = |topic: &str, sentence: String, question: &str, answer: String, alias: Option<String>| Fact {
        topic: topic.into(),
        sentence,
        question: question.into(),
        answer,
        aliases: alias.into_iter().collect(),
        tool: None,
    };
    match i {
        0 => {
            let n = g.rng.gen_range(2..=4);
            plain(
                "Hybrid work",
                format!("Under the hybrid work policy, employees may work remotely for up to {n} days per week."),
                "How many days per week may employees work remotely under the hybrid work policy?",
                format!("{n} days"),
                Some(n.to_string()),
            )
        }
        1 => {
            let x = g.rng.gen_range(11..20) * 5;
            plain(
                "Travel",
                format!("The international travel per diem is {x} EUR per day."),
                "What is the international travel per diem?",
                format!("{x} EUR per day"),
                Some(format!("{x} EUR")),
            )
        }
        2 => {
            let n = g.rng.gen_range(12..=26);
            plain(
                "Parental leave",
                format!("Primary caregivers receive {n} weeks of fully paid parental leave."),
                "How many weeks of fully paid parental leave do primary caregivers receive?",
                format!("{n} weeks"),
                Some(n.to_string()),
            )
        }
        3 => {
            let x = g.pick(&[2500, 5000, 7500, 10000]);
            plain(
                "Expense approval",
                format!("Any single expense above {x} EUR requires director approval."),
                "Above what amount does a single expense require director approval?",
                format!("{x} EUR"),
                Some(x.to_string()),
            )
        }
        4 => {
            let x = g.rng.gen_range(12..30) * 100;
            plain(
                "Learning and development",
                format!("Each employee has an annual learning budget of {x} EUR."),
                "What is the annual learning budget per employee?",
                format!("{x} EUR"),
                Some(x.to_string()),
            )
        }
        5 => {
            let n = g.pick(&[30, 45, 60, 90]);
            plain(
                "Access security",
                format!("Passwords for production systems must be rotated every {n} days."),
                "How often must passwords for production systems be rotated?",
                format!("every {n} days"),
                Some(format!("{n} days")),
            )
        }
        6 => {
            let n = g.pick(&[24, 30, 36, 42, 48]);
            plain(
                "Equipment",
                format!("Laptops become eligible for replacement after {n} months of service."),
                "After how many months of service does a laptop become eligible for replacement?",
                format!("{n} months"),
                Some(n.to_string()),
            )
        }
        7 => {
            let n = g.pick(&[12, 18, 24, 36]);
            plain(
                "Data retention",
                format!("Customer support transcripts are retained for {n} months before deletion."),
                "How long are customer support transcripts retained before deletion?",
                format!("{n} months"),
                None,
            )
        }
        8 => {
            let x = g.rng.gen_range(6..17) * 50;
            plain(
                "Home office",
                format!("New hires receive a one-time home office stipend of {x} EUR."),
                "How large is the one-time home office stipend for new hires?",
                format!("{x} EUR"),
                Some(x.to_string()),
            )
        }
        _ => {
            let n = g.pick(&[4, 6, 8, 12]);
            plain(
                "Notice periods",
                format!("The standard notice period for senior staff is {n} weeks."),
                "What is the standard notice period for senior staff?",
                format!("{n} weeks"),
                Some(n.to_string()),
            )
        }
    }
}

fn financial_fact(g: &mut Gen, i: usize) -> Fact {
    let y = g.rng.gen_range(2021..=2024);
    let plain = |topic: &str, sentence: String, question: String, answer: String, alias: Option<String>| Fact {
        topic: topic.into(),
        sentence,
        question,
        answer,
        aliases: alias.into_iter().collect(),
        tool: None,
    };
    match i {
        0 => {
            let q = g.rng.gen_range(1..=4);
            let x = g.one_decimal(30.0, 70.0);
            plain(
                "Quarterly results",
                format!("Total revenue for Q{q} FY{y} reached {x} million EUR."),
                format!("What was total revenue in Q{q} FY{y}?"),
                format!("{x} million EUR"),
                Some(x),
            )
        }
        1 => {
            let x = g.one_decimal(90.0, 160.0);
            plain(
                "Operating expenses",
                format!("Operating expenses in FY{y} came to {x} million EUR."),
                format!("How much were operating expenses in FY{y}?"),
                format!("{x} million EUR"),
                Some(x),
            )
        }
        2 => {
            let x = g.one_decimal(20.0, 80.0);
            plain(
                "Liquidity",
                format!("The group closed FY{y} with a cash position of {x} million EUR."),
                format!("What cash position did the group close FY{y} with?"),
                format!("{x} million EUR"),
                Some(x),
            )
        }
        3 => {
            let p = g.one_decimal(8.0, 22.0);
            plain(
                "Research spending",
                format!("Research and development spending equaled {p}% of revenue in FY{y}."),
                format!("What share of revenue went to research and development in FY{y}?"),
                format!("{p}%"),
                None,
            )
        }
        4 => {
            let n = g.rng.gen_range(38..70);
            plain(
                "Working capital",
                format!("Days sales outstanding improved to {n} days by the end of FY{y}."),
                format!("What were days sales outstanding at the end of FY{y}?"),
                format!("{n} days"),
                Some(n.to_string()),
            )
        }
        5 => {
            let x = g.one_decimal(4.0, 15.0);
            plain(
                "Capital expenditure",
                format!("The board approved a capital expenditure budget of {x} million EUR for FY{y}."),
                format!("What capital expenditure budget did the board approve for FY{y}?"),
                format!("{x} million EUR"),
                Some(x),
            )
        }
        6 => {
            let s = g.pick(SEGMENTS).to_string();
            let p = g.one_decimal(3.0, 25.0);
            plain(
                "Segment performance",
                format!("The {s} segment grew by {p}% year over year in FY{y}."),
                format!("By how much did the {s} segment grow in FY{y}?"),
                format!("{p}%"),
                None,
            )
        }
        7 => {
            let p = g.one_decimal(55.0, 72.0);
            plain(
                "Margins",
                format!("Gross margin for FY{y} stood at {p}%."),
                format!("What was the gross margin for FY{y}?"),
                format!("{p}%"),
                None,
            )
        }
        8 => {
            let p = g.rng.gen_range(45..68);
            plain(
                "Cost structure",
                format!("Personnel costs accounted for {p}% of operating expenses in FY{y}."),
                format!("What share of operating expenses were personnel costs in FY{y}?"),
                format!("{p}%"),
                None,
            )
        }
        _ => {
            let x = g.one_decimal(100.0, 240.0);
            plain(
                "Recurring revenue",
                format!("Annual recurring revenue reached {x} million EUR at the end of FY{y}."),
                format!("What was annual recurring revenue at the end of FY{y}?"),
                format!("{x} million EUR"),
                Some(x),
            )
        }
    }
}

fn org_fact(g: &mut Gen, i: usize) -> Fact {
    let plain = |topic: &str, sentence: String, question: String, answer: String, alias: Option<String>| Fact {
        topic: topic.into(),
        sentence,
        question,
        answer,
        aliases: alias.into_iter().collect(),
        tool: None,
    };
    match i {
        0 => {
            let o = g.pick(OFFICES).to_string();
            let name = g.person();
            plain(
                "Site leadership",
                format!("The {o} office is led by site director {name}."),
                format!("Who is the site director of the {o} office?"),
                name,
                None,
            )
        }
        1 => {
            let d = g.pick(&["finance", "legal", "procurement", "marketing"]).to_string();
            let n = g.rng.gen_range(18..140);
            plain(
                "Workforce",
                format!("The {d} department employs {n} full-time staff."),
                format!("How many full-time staff does the {d} department employ?"),
                n.to_string(),
                None,
            )
        }
        2 => {
            let name = g.person();
            plain(
                "Reporting lines",
                format!("The data platform team reports to {name}."),
                "Who does the data platform team report to?".into(),
                name,
                None,
            )
        }
        3 => {
            let o = g.pick(OFFICES).to_string();
            let y = g.rng.gen_range(2004..2021);
            plain(
                "Office history",
                format!("The {o} office opened in {y}."),
                format!("In which year did the {o} office open?"),
                y.to_string(),
                None,
            )
        }
        4 => {
            let n = g.rng.gen_range(1000..1999);
            plain(
                "Service desk",
                format!("The internal IT service desk can be reached at extension {n}."),
                "Which extension reaches the internal IT service desk?".into(),
                format!("extension {n}"),
                Some(n.to_string()),
            )
        }
        5 => {
            let d = g.pick(&["Monday", "Tuesday", "Wednesday", "Thursday"]).to_string();
            plain(
                "Works council",
                format!("The works council meets on the first {d} of each month."),
                "On which day of the month does the works council meet?".into(),
                format!("first {d}"),
                Some(d),
            )
        }
        _ => {
            let name = g.person();
            plain(
                "Executive team",
                format!("The chief financial officer is {name}."),
                "Who is the chief financial officer?".into(),
                name,
                None,
            )
        }
    }
}

fn product_fact(g: &mut Gen, i: usize, product: &str) -> Fact {
    let p = product;
    let plain = |topic: &str, sentence: String, question: String, answer: String, alias: Option<String>| Fact {
        topic: topic.into(),
        sentence,
        question,
        answer,
        aliases: alias.into_iter().collect(),
        tool: None,
    };
    match i {
        0 => {
            let n = g.rng.gen_range(2..40) * 50;
            plain(
                "Capacity",
                format!("{p} supports up to {n} concurrent users per workspace."),
                format!("How many concurrent users per workspace does {p} support?"),
                n.to_string(),
                None,
            )
        }
        1 => {
            let v = format!("{}.{}", g.rng.gen_range(2..9), g.rng.gen_range(0..12));
            plain(
                "Releases",
                format!("The current release of {p} is version {v}."),
                format!("What is the current release version of {p}?"),
                format!("version {v}"),
                Some(v),
            )
        }
        2 => {
            let n = g.rng.gen_range(1..20);
            plain(
                "Plans",
                format!("{p} includes {n} TB of storage in the standard plan."),
                format!("How much storage does the standard plan of {p} include?"),
                format!("{n} TB"),
                None,
            )
        }
        3 => {
            let a = g.pick(&["99.5", "99.9", "99.95", "99.99"]).to_string();
            plain(
                "Service levels",
                format!("{p} carries an uptime commitment of {a}% per month."),
                format!("What monthly uptime commitment does {p} carry?"),
                format!("{a}%"),
                None,
            )
        }
        4 => {
            let y = g.rng.gen_range(2014..2024);
            plain(
                "Product history",
                format!("{p} launched commercially in {y}."),
                format!("In which year did {p} launch commercially?"),
                y.to_string(),
                None,
            )
        }
        5 => {
            let x = g.rng.gen_range(9..80);
            plain(
                "Pricing",
                format!("The list price of {p} is {x} EUR per seat per month."),
                format!("What is the list price of {p} per seat per month?"),
                format!("{x} EUR"),
                None,
            )
        }
        6 => {
            let n = g.rng.gen_range(2..9);
            plain(
                "Hosting",
                format!("{p} is hosted in {n} data center regions."),
                format!("In how many data center regions is {p} hosted?"),
                n.to_string(),
                None,
            )
        }
        _ => {
            let n = g.pick(&[30, 90, 180, 365]);
            plain(
                "Audit logging",
                format!("{p} keeps audit logs for {n} days."),
                format!("For how many days does {p} keep audit logs?"),
                format!("{n} days"),
                None,
            )
        }
    }
}

fn bridge_fact(g: &mut Gen, cat: ChunkCategory, index: usize) -> Fact {
    match cat {
        ChunkCategory::Org => {
            let project = PROJECTS[index % PROJECTS.len()];
            let eid = g.code("E", 1000, 9999);
            let look = employee_lookup(g, &eid, "office");
            Fact {
                topic: "Project staffing".into(),
                sentence: format!("Project {project} is led by employee {eid}."),
                question: format!("In which office does the lead of project {project} work?"),
                answer: look.answer,
                aliases: vec![],
                tool: Some((look.tool, look.span)),
            }
        }
        ChunkCategory::Financial => {
            let segment = SEGMENTS[index % SEGMENTS.len()];
            let aid = g.code("AC", 1000, 9999);
            let look = account_lookup(g, &aid, "account_manager");
            Fact {
                topic: "Customer concentration".into(),
                sentence: format!("The largest {segment} customer by contract value is account {aid}."),
                question: format!("Who is the account manager for the largest {segment} customer?"),
                answer: look.answer,
                aliases: vec![],
                tool: Some((look.tool, look.span)),
            }
        }
        ChunkCategory::Policy => {
            let office = OFFICES[index % OFFICES.len()];
            let vid = g.code("V", 100, 999);
            let name = g.pick(VENDOR_NAMES).to_string();
            let look = vendor_lookup(g, &vid, &name, "payment_terms");
            Fact {
                topic: "Procurement".into(),
                sentence: format!("Laptops for the {office} office are procured from vendor {vid}."),
                question: format!("What payment terms apply to the laptop vendor of the {office} office?"),
                answer: look.answer,
                aliases: vec![],
                tool: Some((look.tool, look.span)),
            }
        }
        ChunkCategory::Product => {
            let product = PRODUCTS[(index + 3) % PRODUCTS.len()];
            let sku = g.code("SKU", 10000, 99999);
            let look = inventory_lookup(g, &sku);
            Fact {
                topic: "Hardware supply".into(),
                sentence: format!("{product} devices ship with a core module tracked as {sku}."),
                question: format!("How many units of the core module used in {product} devices are in stock?"),
                answer: look.answer,
                aliases: vec![],
                tool: Some((look.tool, look.span)),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Filler prose

fn filler_sentence(rng: &mut ChaCha20Rng, cat: ChunkCategory) -> String {
    let (subjects, verbs, objects): (&[&str], &[&str], &[&str]) = match cat {
        ChunkCategory::Policy => (
            &[
                "Line managers",
                "All employees",
                "The people team",
                "Contractors",
                "New joiners",
                "Team leads",
                "The compliance office",
            ],
            &[
                "are expected to review",
                "must acknowledge",
                "should consult",
                "are responsible for applying",
                "can request clarification on",
                "regularly discuss",
            ],
            &[
                "the applicable guidance",
                "the approval workflow",
                "the documented exceptions",
                "the regional addenda",
                "the escalation path",
                "the record keeping rules",
                "the published checklist",
            ],
        ),
        ChunkCategory::Financial => (
            &[
                "The controlling team",
                "Group treasury",
                "Regional finance leads",
                "The audit committee",
                "Business partners",
                "The planning office",
            ],
            &["reviewed", "reconciled", "monitored closely", "reported on", "stress tested", "commented on"],
            &[
                "the underlying cost drivers",
                "the working capital position",
                "the forecast assumptions",
                "the currency exposure",
                "the accrual schedule",
                "the intercompany balances",
            ],
        ),
        ChunkCategory::Org => (
            &[
                "Each site",
                "The leadership team",
                "Department heads",
                "The facilities group",
                "Internal communications",
                "The talent team",
            ],
            &["coordinates", "publishes", "maintains", "periodically reviews", "shares", "owns"],
            &[
                "the organizational chart",
                "the onboarding plan",
                "the seating arrangements",
                "the team charters",
                "the succession plans",
                "the internal newsletter",
            ],
        ),
        ChunkCategory::Product => (
            &[
                "The product team",
                "Release engineering",
                "Customer success",
                "The platform group",
                "Solution architects",
                "Quality assurance",
            ],
            &["documents", "validates", "tracks", "announces", "benchmarks", "supports"],
            &[
                "the feature roadmap",
                "the integration guides",
                "the upgrade procedure",
                "the known limitations",
                "the deployment options",
                "the compatibility matrix",
            ],
        ),
    };
    const TAILS: &[&str] = &[
        "before the end of each quarter",
        "in close coordination with the affected teams",
        "as part of the regular review cycle",
        "whenever material changes occur",
        "using the templates on the intranet",
        "with support from the shared service center",
        "so that decisions remain traceable",
        "and record the outcome in the central register",
    ];
    format!(
        "{} {} {} {}.",
        subjects[rng.gen_range(0..subjects.len())],
        verbs[rng.gen_range(0..verbs.len())],
        objects[rng.gen_range(0..objects.len())],
        TAILS[rng.gen_range(0..TAILS.len())]
    )
}

const SHORT_PADS: &[&str] = &[
    "Reviewed annually.",
    "See the intranet.",
    "Applies group-wide.",
    "No exceptions.",
    "Owner: operations.",
    "Noted.",
    "Confirmed.",
    "Binding.",
    "In force.",
    "Final.",
    "See annex.",
    "Ok.",
    "Yes.",
];

/// Appends filler until `text` is within three bytes of `target`.
fn fill(rng: &mut ChaCha20Rng, text: &mut String, target: usize, cat: ChunkCategory) {
    let mut misses = 0;
    while misses < 20 && text.len() + 30 < target {
        let s = filler_sentence(rng, cat);
        if text.len() + 1 + s.len() <= target {
            text.push(' ');
            text.push_str(&s);
        } else {
            misses += 1;
        }
    }
    while target - text.len() > 3 {
        let room = target - text.len() - 1;
        match SHORT_PADS.iter().filter(|p| p.len() <= room).max_by_key(|p| p.len()) {
            Some(p) => {
                text.push(' ');
                text.push_str(p);
            }
            None => break,
        }
    }
}

// ---------------------------------------------------------------------------
// Assembly

struct Draft {
    chunks: Vec<Chunk>,
    questions: Vec<Question>,
}

impl Draft {
    fn add_chunk(&mut self, id: String, category: ChunkCategory, text: String) -> usize {
        let token_cost = TokenCountProfile::default().count_tokens(&text);
        self.chunks.push(Chunk { id, text, token_cost, category, spans: vec![] });
        self.chunks.len() - 1
    }

    fn question_id(&self) -> String {
        format!("q{:03}", self.questions.len() + 1)
    }

    fn push_question(&mut self, mut q: Question, chunk_spans: &[(usize, String)]) {
        for (c, span) in chunk_spans {
            self.chunks[*c].spans.push(SpanRef { question_id: q.id.clone(), text: span.clone() });
            if !q.gold_chunk_ids.contains(&self.chunks[*c].id) {
                q.gold_chunk_ids.push(self.chunks[*c].id.clone());
            }
        }
        self.questions.push(q);
    }
}

fn header(cat: ChunkCategory, n: usize, topic: &str) -> String {
    match cat {
        ChunkCategory::Policy => format!("NovaTech Employee Handbook, section {n}: {topic}."),
        ChunkCategory::Financial => format!("NovaTech Finance Bulletin {n}: {topic}."),
        ChunkCategory::Org => format!("NovaTech Organization Notes {n}: {topic}."),
        ChunkCategory::Product => format!("NovaTech Product Brief {n}: {topic}."),
    }
}

fn cat_name(cat: ChunkCategory) -> &'static str {
    match cat {
        ChunkCategory::Policy => "policy",
        ChunkCategory::Financial => "financial",
        ChunkCategory::Org => "org",
        ChunkCategory::Product => "product",
    }
}

pub fn generate_novatech_with(cfg: &BenchConfig) -> Benchmark {
    let catalog = novatech_catalog(cfg.seed);
    let mut g = Gen { rng: stream(cfg.seed, "novatech/content"), used: BTreeSet::new() };
    let mut d = Draft { chunks: Vec::new(), questions: Vec::new() };

    // Fact-bearing prose chunks: eight long per category plus two policy and
    // two financial summaries. Bridge facts sit in the first few of each.
    let bridges = [
        (ChunkCategory::Org, 3),
        (ChunkCategory::Financial, 3),
        (ChunkCategory::Policy, 2),
        (ChunkCategory::Product, 2),
    ];
    let mut doc_facts: Vec<(usize, Fact)> = Vec::new();
    let mut bridge_facts: Vec<(usize, Fact)> = Vec::new();
    let cats = [ChunkCategory::Policy, ChunkCategory::Financial, ChunkCategory::Org, ChunkCategory::Product];
    let mut product_order: Vec<&str> = PRODUCTS.to_vec();
    product_order.shuffle(&mut g.rng);
    for cat in cats {
        let n_prose = match cat {
            ChunkCategory::Policy | ChunkCategory::Financial => 10,
            _ => 8,
        };
        let n_bridge = bridges.iter().find(|(c, _)| *c == cat).unwrap().1;
        let template_count = match cat {
            ChunkCategory::Policy | ChunkCategory::Financial => 10,
            ChunkCategory::Org => 7,
            ChunkCategory::Product => 8,
        };
        let mut templates: Vec<usize> = (0..template_count).collect();
        templates.shuffle(&mut g.rng);
        for i in 0..n_prose {
            let fact = if i < n_bridge {
                bridge_fact(&mut g, cat, i)
            } else {
                let t = templates[(i - n_bridge) % template_count];
                match cat {
                    ChunkCategory::Policy => policy_fact(&mut g, t),
                    ChunkCategory::Financial => financial_fact(&mut g, t),
                    ChunkCategory::Org => org_fact(&mut g, t),
                    ChunkCategory::Product => product_fact(&mut g, t, product_order[i % product_order.len()]),
                }
            };
            let summary = matches!(cat, ChunkCategory::Policy | ChunkCategory::Financial) && i >= 8;
            let mut text = header(cat, i + 1, &fact.topic);
            if summary {
                text = format!("Summary. {text}");
            }
            text.push(' ');
            text.push_str(&fact.sentence);
            let target =
                if summary { g.rng.gen_range(SUMMARY_BYTES.0 / 4..=SUMMARY_BYTES.1 / 4) * 4 } else { LONG_CHUNK_BYTES };
            fill(&mut g.rng, &mut text, target, cat);
            let idx = d.add_chunk(format!("{}-{:02}", cat_name(cat), i + 1), cat, text);
            if fact.tool.is_some() {
                bridge_facts.push((idx, fact));
            } else {
                doc_facts.push((idx, fact));
            }
        }
    }

    let records = record_chunks(&mut g, &mut d);

    // single_hop_doc
    doc_facts.shuffle(&mut g.rng);
    for (idx, fact) in doc_facts.into_iter().take(25) {
        let q = Question {
            id: d.question_id(),
            qtype: QuestionType::SingleHopDoc,
            text: fact.question,
            gold_answer: fact.answer,
            aliases: fact.aliases,
            gold_chunk_ids: vec![],
            gold_tool: None,
            supporting_spans: vec![fact.sentence.clone()],
        };
        d.push_question(q, &[(idx, fact.sentence)]);
    }

    // single_hop_db
    for i in 0..25 {
        let id = d.question_id();
        let q = db_question(&mut g, i, id);
        d.push_question(q, &[]);
    }

    // multi_hop: chunk + tool
    for (idx, fact) in bridge_facts {
        let (tool, span) = fact.tool.unwrap();
        let q = Question {
            id: d.question_id(),
            qtype: QuestionType::MultiHop,
            text: fact.question,
            gold_answer: fact.answer,
            aliases: fact.aliases,
            gold_chunk_ids: vec![],
            gold_tool: Some(tool),
            supporting_spans: vec![fact.sentence.clone(), span],
        };
        d.push_question(q, &[(idx, fact.sentence)]);
    }
    // multi_hop: record + record, and record + record + tool
    for chain in records {
        let spans: Vec<(usize, String)> = chain.hops.clone();
        let mut supporting: Vec<String> = spans.iter().map(|(_, s)| s.clone()).collect();
        let gold_tool = chain.tool.map(|(t, span)| {
            supporting.push(span);
            t
        });
        let q = Question {
            id: d.question_id(),
            qtype: QuestionType::MultiHop,
            text: chain.question,
            gold_answer: chain.answer,
            aliases: vec![],
            gold_chunk_ids: vec![],
            gold_tool,
            supporting_spans: supporting,
        };
        d.push_question(q, &spans);
    }

    // tool_requiring
    for i in 0..20 {
        let id = d.question_id();
        let q = tool_question(&mut g, i, id);
        d.push_question(q, &[]);
    }

    // unanswerable
    let mut topics = UNANSWERABLE.to_vec();
    topics.shuffle(&mut g.rng);
    for text in topics.into_iter().take(10) {
        let q = Question {
            id: d.question_id(),
            qtype: QuestionType::Unanswerable,
            text: text.to_string(),
            gold_answer: NOT_ANSWERABLE.to_string(),
            aliases: vec!["unanswerable".into(), "no answer".into(), "cannot be answered".into()],
            gold_chunk_ids: vec![],
            gold_tool: None,
            supporting_spans: vec![],
        };
        d.push_question(q, &[]);
    }

    let retrieval_rank = rank_chunks(cfg, &d);
    Benchmark {
        format_version: FORMAT_VERSION,
        seed: cfg.seed,
        gold_placement: cfg.gold_placement,
        gold_rank_bound: cfg.gold_rank_bound,
        catalog,
        chunks: d.chunks,
        questions: d.questions,
        retrieval_rank,
    }
}

fn rank_chunks(cfg: &BenchConfig, d: &Draft) -> BTreeMap<String, Vec<String>> {
    let mut rng = stream(cfg.seed, "novatech/ranking");
    let all: Vec<&str> = d.chunks.iter().map(|c| c.id.as_str()).collect();
    let mut out = BTreeMap::new();
    for q in &d.questions {
        let mut rest: Vec<&str> = all.iter().copied().filter(|id| !q.gold_chunk_ids.iter().any(|g| g == id)).collect();
        rest.shuffle(&mut rng);
        let mut ranking: Vec<String> = rest.into_iter().map(str::to_string).collect();
        let bound = cfg.gold_rank_bound.max(q.gold_chunk_ids.len()).min(all.len());
        let slots: Vec<usize> = match cfg.gold_placement {
            GoldPlacement::Top => (0..q.gold_chunk_ids.len()).collect(),
            GoldPlacement::Scattered => {
                let mut s = rand::seq::index::sample(&mut rng, bound, q.gold_chunk_ids.len()).into_vec();
                s.sort_unstable();
                s
            }
        };
        for (slot, gold) in slots.into_iter().zip(&q.gold_chunk_ids) {
            ranking.insert(slot, gold.clone());
        }
        out.insert(q.id.clone(), ranking);
    }
    out
}

struct Chain {
    question: String,
    answer: String,
    hops: Vec<(usize, String)>,
    tool: Option<(GoldTool, String)>,
}

/// Four structured-record chunks of 150 tokens forming two two-hop chains:
/// product to component part to supplier, and office to cost center to owner.
fn record_chunks(g: &mut Gen, d: &mut Draft) -> Vec<Chain> {
    let mut products: Vec<&str> = PRODUCTS.to_vec();
    products.shuffle(&mut g.rng);
    let products = &products[..5];
    let mut offices: Vec<&str> = OFFICES.to_vec();
    offices.shuffle(&mut g.rng);
    let offices = &offices[..5];

    let parts: Vec<String> = products.iter().map(|_| g.code("PX", 100, 999)).collect();
    let vendors: Vec<(String, String)> =
        products.iter().map(|_| (g.code("V", 100, 999), g.pick(VENDOR_NAMES).to_string())).collect();
    let leads: Vec<String> = products.iter().map(|_| format!("{} days", g.rng.gen_range(7..60))).collect();
    let centers: Vec<String> = offices.iter().map(|_| g.code("CC", 1000, 9999)).collect();
    let owners: Vec<(String, String)> = offices.iter().map(|_| (g.person(), g.code("E", 1000, 9999))).collect();

    let bom_rows: Vec<String> = products.iter().zip(&parts).map(|(p, x)| format!("{p}: component {x}.")).collect();
    let sup_rows: Vec<String> = parts
        .iter()
        .zip(&vendors)
        .zip(&leads)
        .map(|((x, (vid, name)), lead)| format!("{x}: supplier {name} ({vid}), lead time {lead}."))
        .collect();
    let cc_rows: Vec<String> =
        offices.iter().zip(&centers).map(|(o, c)| format!("{o} facilities: cost center {c}.")).collect();
    let own_rows: Vec<String> =
        centers.iter().zip(&owners).map(|(c, (n, e))| format!("{c}: owner {n}, employee {e}.")).collect();

    let mut make = |id: &str, cat: ChunkCategory, title: &str, rows: &[String], g: &mut Gen| {
        let mut text = format!("{title}. Record list, one entry per line.");
        for r in rows {
            text.push('\n');
            text.push_str(r);
        }
        fill(&mut g.rng, &mut text, RECORD_CHUNK_BYTES, cat);
        d.add_chunk(id.to_string(), cat, text)
    };
    let bom = make("product-09", ChunkCategory::Product, "Bill of materials register", &bom_rows, g);
    let sup = make("product-10", ChunkCategory::Product, "Component supplier register", &sup_rows, g);
    let ccs = make("org-09", ChunkCategory::Org, "Facilities cost center register", &cc_rows, g);
    let own = make("org-10", ChunkCategory::Org, "Cost center ownership register", &own_rows, g);

    let mut chains = Vec::new();
    for i in 0..3 {
        chains.push(Chain {
            question: format!("What is the lead time of the component used in {}?", products[i]),
            answer: leads[i].clone(),
            hops: vec![(bom, bom_rows[i].clone()), (sup, sup_rows[i].clone())],
            tool: None,
        });
        chains.push(Chain {
            question: format!("Who owns the facilities cost center of the {} office?", offices[i]),
            answer: owners[i].0.clone(),
            hops: vec![(ccs, cc_rows[i].clone()), (own, own_rows[i].clone())],
            tool: None,
        });
    }
    for i in 3..5 {
        let (vid, name) = &vendors[i];
        let look = vendor_lookup(g, vid, name, "payment_terms");
        chains.push(Chain {
            question: format!("What payment terms does the supplier of the {} component have?", products[i]),
            answer: look.answer,
            hops: vec![(bom, bom_rows[i].clone()), (sup, sup_rows[i].clone())],
            tool: Some((look.tool, look.span)),
        });
        let look = employee_lookup(g, &owners[i].1, "phone_extension");
        chains.push(Chain {
            question: format!("What is the phone extension of the {} facilities cost center owner?", offices[i]),
            answer: look.answer,
            hops: vec![(ccs, cc_rows[i].clone()), (own, own_rows[i].clone())],
            tool: Some((look.tool, look.span)),
        });
    }
    chains
}

fn db_question(g: &mut Gen, i: usize, id: String) -> Question {
    let (text, look) = match i % 7 {
        0 => {
            let eid = g.code("E", 1000, 9999);
            let field = *g.pick(&["job_title", "office"]);
            let label = if field == "office" { "office" } else { "job title" };
            (format!("What is the {label} of employee {eid}?"), employee_lookup(g, &eid, field))
        }
        1 => {
            let year = g.fresh(|r| format!("{}", r.gen_range(2019..=2024)));
            let q = *g.pick(QUARTERS);
            let margin = format!("{}%", g.one_decimal(8.0, 24.0));
            let revenue = format!("{} million EUR", g.one_decimal(30.0, 70.0));
            let fields = [
                ("fiscal_year", year.clone()),
                ("fiscal_quarter", q.to_string()),
                ("revenue", revenue),
                ("operating_margin", margin.clone()),
            ];
            let (evidence, span) = record(&fields, "operating_margin");
            let tool = GoldTool {
                name: "financial_report".into(),
                arguments: args(&[("fiscal_year", &year), ("fiscal_quarter", q)]),
                evidence,
            };
            (
                format!("What operating margin does the financial report show for {q} of fiscal year {year}?"),
                Lookup { tool, span, answer: margin },
            )
        }
        2 => {
            let aid = g.code("AC", 1000, 9999);
            (
                format!("Who is the account manager for customer account {aid}?"),
                account_lookup(g, &aid, "account_manager"),
            )
        }
        3 => {
            let po = g.code("PO", 100_000, 999_999);
            let status = g
                .pick(&["awaiting finance approval", "delivered", "partially received", "cancelled by requester"])
                .to_string();
            let amount = format!("{} EUR", g.rng.gen_range(1_000..90_000));
            let fields = [("po_number", po.clone()), ("status", status.clone()), ("amount", amount)];
            let (evidence, span) = record(&fields, "status");
            let tool =
                GoldTool { name: "list_purchase_orders".into(), arguments: args(&[("po_number", &po)]), evidence };
            (format!("What is the status of purchase order {po}?"), Lookup { tool, span, answer: status })
        }
        4 => {
            let sku = g.code("SKU", 10000, 99999);
            (format!("How many units of {sku} are on hand?"), inventory_lookup(g, &sku))
        }
        5 => {
            let code = g.code("PRJ", 100, 999);
            let phase = g.pick(&["discovery", "design", "build", "user acceptance testing", "rollout"]).to_string();
            let burn = format!("{}%", g.rng.gen_range(10..95));
            let fields = [("project_code", code.clone()), ("phase", phase.clone()), ("budget_consumed", burn)];
            let (evidence, span) = record(&fields, "phase");
            let tool =
                GoldTool { name: "get_project_status".into(), arguments: args(&[("project_code", &code)]), evidence };
            (format!("Which delivery phase is project {code} in?"), Lookup { tool, span, answer: phase })
        }
        _ => {
            let vid = g.code("V", 100, 999);
            let name = g.pick(VENDOR_NAMES).to_string();
            (format!("What payment terms does vendor {vid} have?"), vendor_lookup(g, &vid, &name, "payment_terms"))
        }
    };
    Question {
        id,
        qtype: QuestionType::SingleHopDb,
        text,
        gold_answer: look.answer,
        aliases: vec![],
        gold_chunk_ids: vec![],
        gold_tool: Some(look.tool),
        supporting_spans: vec![look.span],
    }
}

fn tool_question(g: &mut Gen, i: usize, id: String) -> Question {
    let mut answer_field = "result";
    let (name, text, arguments, result): (&str, String, Vec<(&str, String)>, String) = match i % 14 {
        0 => {
            let m = *g.pick(METRICS);
            let q = *g.pick(QUARTERS);
            let y = g.rng.gen_range(2021..=2024).to_string();
            let v = format!("{}%", g.one_decimal(5.0, 60.0));
            (
                "calculate_metrics",
                format!("Calculate the {} for {q} of fiscal year {y}.", m.replace('_', " ")),
                vec![("metric", m.into()), ("fiscal_quarter", q.into()), ("fiscal_year", y)],
                v,
            )
        }
        1 => {
            let p = *g.pick(PRODUCT_LINES);
            let h = g.rng.gen_range(2..=8).to_string();
            let v = format!("{} million EUR", g.one_decimal(5.0, 40.0));
            (
                "forecast_revenue",
                format!("Forecast revenue for the {p} product line over the next {h} quarters."),
                vec![("product_line", p.into()), ("horizon_quarters", h)],
                v,
            )
        }
        2 => {
            let cc = g.code("CC", 1000, 9999);
            let q = *g.pick(QUARTERS);
            let v = format!("{}% under budget", g.one_decimal(0.5, 9.0));
            (
                "compute_budget_variance",
                format!("Compute the budget variance of cost center {cc} for {q}."),
                vec![("cost_center", cc), ("fiscal_quarter", q.into())],
                v,
            )
        }
        3 => {
            let amount = (g.rng.gen_range(10..500) * 100).to_string();
            let mut cur = CURRENCIES.to_vec();
            cur.shuffle(&mut g.rng);
            let v = format!("{}.{:02} {}", g.rng.gen_range(900..60_000), g.rng.gen_range(0..100), cur[1]);
            (
                "convert_currency",
                format!("Convert {amount} {} to {}.", cur[0], cur[1]),
                vec![("amount", amount), ("source_currency", cur[0].into()), ("target_currency", cur[1].into())],
                v,
            )
        }
        4 => {
            let dpt = *g.pick(DEPARTMENTS);
            let n = g.rng.gen_range(2..=15).to_string();
            let v = format!("{} million EUR", g.one_decimal(0.2, 2.5));
            (
                "calculate_headcount_cost",
                format!("What would {n} additional hires in {} cost per year?", dpt.replace('_', " ")),
                vec![("department", dpt.into()), ("headcount", n)],
                v,
            )
        }
        5 => {
            let code = g.code("PRJ", 100, 999);
            let n = g.rng.gen_range(3..=12).to_string();
            let v = format!("{} EUR", g.rng.gen_range(80..2_000) * 1000);
            (
                "estimate_project_cost",
                format!("Estimate the cost of project {code} with a team of {n}."),
                vec![("project_code", code), ("team_size", n)],
                v,
            )
        }
        6 => {
            let k = *g.pick(KPIS);
            let n = g.rng.gen_range(3..=12).to_string();
            let v = format!("up {}%", g.one_decimal(0.5, 15.0));
            (
                "compute_kpi_trend",
                format!("What is the trend of {} over the last {n} periods?", k.replace('_', " ")),
                vec![("kpi", k.into()), ("periods", n)],
                v,
            )
        }
        7 => {
            let who = g.person();
            let addr = format!("{}@novatech.example", who.to_lowercase().replace(' ', "."));
            let subject = g.pick(&["Q3 audit", "Budget review", "Offsite agenda", "Vendor renewal"]).to_string();
            answer_field = "message_id";
            (
                "send_email",
                format!("Email {addr} with the subject \"{subject}\" and report the message id."),
                vec![("recipient", addr), ("subject", subject)],
                g.code("MSG", 10000, 99999),
            )
        }
        8 => {
            let channel =
                g.fresh(|r| format!("#team-{}", ["finance", "ops", "sales", "platform", "legal"][r.gen_range(0..5)]));
            let msg = g.pick(&["Release is live", "Standup moved", "Audit starts Monday"]).to_string();
            answer_field = "message_ref";
            (
                "post_chat_message",
                format!("Post \"{msg}\" to {channel} and give the message reference."),
                vec![("channel", channel), ("text", msg)],
                g.code("CHT", 10000, 99999),
            )
        }
        9 => {
            let aid = g.code("AC", 1000, 9999);
            let sev = *g.pick(SEVERITIES);
            answer_field = "ticket_id";
            (
                "create_support_ticket",
                format!("Open a {sev} severity support ticket for account {aid}. What is the ticket id?"),
                vec![("account_id", aid), ("severity", sev.into())],
                g.code("TCK", 10000, 99999),
            )
        }
        10 => {
            let who = g.person();
            let mins = g.pick(&["30", "45", "60", "90"]).to_string();
            let room = format!("{}-{}", g.pick(&["Aurora", "Borealis", "Cedar", "Delta"]), g.rng.gen_range(1..9));
            answer_field = "room";
            (
                "schedule_meeting",
                format!("Book a {mins} minute meeting for {who}. Which room was reserved?"),
                vec![("organizer", who), ("duration_minutes", mins)],
                room,
            )
        }
        11 => {
            let eid = g.code("E", 1000, 9999);
            let reason = g.pick(&["sick leave", "certification completed", "overtime approval"]).to_string();
            answer_field = "notified";
            (
                "notify_manager",
                format!("Notify the manager of employee {eid} about {reason}. Who was notified?"),
                vec![("employee_id", eid), ("reason", reason)],
                g.person(),
            )
        }
        12 => {
            let title = g.pick(&["Town hall", "Security drill", "Quarter close"]).to_string();
            let date = format!("2025-{:02}-{:02}", g.rng.gen_range(1..=12), g.rng.gen_range(1..=28));
            answer_field = "event_id";
            (
                "create_calendar_event",
                format!("Create a calendar event \"{title}\" on {date} and return its id."),
                vec![("title", title), ("date", date)],
                g.code("EVT", 1000, 9999),
            )
        }
        _ => {
            let phone = g.fresh(|r| {
                format!("+351 91{} {:03} {:03}", r.gen_range(0..10), r.gen_range(0..1000), r.gen_range(0..1000))
            });
            let msg = g.pick(&["Disk usage above threshold", "Backup job failed", "VPN gateway down"]).to_string();
            answer_field = "alert_id";
            (
                "send_sms_alert",
                format!("Send the SMS alert \"{msg}\" to {phone} and report the alert id."),
                vec![("phone_number", phone), ("message", msg)],
                g.code("ALR", 1000, 9999),
            )
        }
    };
    let mut fields: Vec<(&str, String)> = vec![("status", "ok".into())];
    fields.push((answer_field, result.clone()));
    let (evidence, span) = record(&fields, answer_field);
    let arg_refs: Vec<(&str, &str)> = arguments.iter().map(|(k, v)| (*k, v.as_str())).collect();
    Question {
        id,
        qtype: QuestionType::ToolRequiring,
        text,
        gold_answer: result,
        aliases: vec![],
        gold_chunk_ids: vec![],
        gold_tool: Some(GoldTool { name: name.into(), arguments: args(&arg_refs), evidence }),
        supporting_spans: vec![span],
    }
}

const UNANSWERABLE: &[&str] = &[
    "What is the reimbursement limit for pet insurance?",
    "Which office hosts the annual chess tournament?",
    "How many electric scooters does the company lend to staff?",
    "What was the winning bid in the FY2019 office canteen tender?",
    "Who designed the company logo used before 2010?",
    "What is the dress code for the Toronto rooftop terrace?",
    "How many beehives are kept on the Berlin campus?",
    "Which streaming service is included in the employee perks bundle?",
    "What is the maximum weight allowed for parcels in the internal mailroom?",
    "Who won the 2023 internal hackathon?",
    "What brand of coffee machine is installed in the Dublin office?",
    "How many parking spaces are reserved for visitors in Warsaw?",
];

/// Topic-free filler chunks of exactly `tokens` tokens, for padding a corpus
/// beyond the base benchmark.
pub fn distractor_chunks(seed: u64, count: usize, tokens: usize) -> Vec<Chunk> {
    let mut rng = stream(seed, "distractors");
    let counter = TokenCountProfile::default();
    let cats = [ChunkCategory::Policy, ChunkCategory::Financial, ChunkCategory::Org, ChunkCategory::Product];
    (0..count)
        .map(|i| {
            let cat = cats[i % cats.len()];
            let mut text = format!("NovaTech Archive {}: general notes.", i + 1);
            fill(&mut rng, &mut text, counter.max_bytes_for(tokens), cat);
            let token_cost = counter.count_tokens(&text);
            Chunk { id: format!("archive-{:04}", i + 1), text, token_cost, category: cat, spans: vec![] }
        })
        .collect()
}
