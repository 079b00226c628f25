//! Compact signature rendering of tool catalogs.
//!
//! Each tool becomes one line:
//!
//! ```text
//! get_tickets(status:{open|closed|pending}!, limit:int=20, tags:str[], filter.owner:str) # List tickets.
//! ```
//!
//! `!` marks a required parameter, `=v` a default, `{a|b}` an enum and
//! `kind[]` an array. Object parameters are flattened into dotted children;
//! a required object marks every child required. Values containing grammar
//! characters are written as JSON string literals.
//!
//! The conservative profile keeps a `# ...` note with the leading sentence of
//! the tool description and clipped parameter descriptions. The balanced
//! profile drops all prose. Both keep the full structural core, which
//! [`parse_compressed`] recovers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::{serialize_catalog, ParamKind, ParamType, ParameterSpec, ScalarKind, ToolCatalog, ToolDefinition};
use crate::tokens::TokenCountProfile;

pub const FORMAT_TAG: &str = "compact-sig/1";

/// Word limit for descriptive notes kept by the conservative profile.
pub const NOTE_WORD_LIMIT: usize = 12;

/// Short explanation of the grammar, placed in the system prompt whenever
/// a compressed catalog is shown to a model.
pub const LEGEND: &str = "Tools are listed one per line as name(param:type, ...). \
`!` marks required, `=v` a default, `{a|b}` allowed values, `t[]` a list, a.b a nested field. \
Call a tool by replying with JSON {\"tool\": name, \"arguments\": {...}}.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompressionProfile {
    Conservative,
    Balanced,
}

/// How a catalog is presented to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaFormat {
    Json,
    Conservative,
    Balanced,
}

impl SchemaFormat {
    pub const ALL: [SchemaFormat; 3] = [SchemaFormat::Json, SchemaFormat::Conservative, SchemaFormat::Balanced];

    pub fn profile(self) -> Option<CompressionProfile> {
        match self {
            SchemaFormat::Json => None,
            SchemaFormat::Conservative => Some(CompressionProfile::Conservative),
            SchemaFormat::Balanced => Some(CompressionProfile::Balanced),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemaFormat::Json => "json",
            SchemaFormat::Conservative => "conservative",
            SchemaFormat::Balanced => "balanced",
        }
    }

    pub fn is_compressed(self) -> bool {
        self != SchemaFormat::Json
    }
}

impl std::str::FromStr for SchemaFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(SchemaFormat::Json),
            "conservative" | "compressed" => Ok(SchemaFormat::Conservative),
            "balanced" => Ok(SchemaFormat::Balanced),
            other => Err(format!("unknown schema format {other:?}")),
        }
    }
}

impl std::fmt::Display for SchemaFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedCatalog {
    pub lines: Vec<String>,
    pub format_tag: String,
    pub token_count: usize,
}

impl CompressedCatalog {
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompressError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("savings rate is undefined for an empty catalog")]
    EmptyCatalog,
}

/// Everything about a tool that determines which calls are valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreParam {
    /// Dotted path, `parent.child` for flattened object members.
    pub path: String,
    pub kind: ParamKind,
    pub required: bool,
    pub enum_values: Vec<String>,
    pub default_value: Option<String>,
    pub item_kind: Option<ScalarKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralCore {
    pub name: String,
    pub params: Vec<CoreParam>,
}

pub fn extract_core(tool: &ToolDefinition) -> StructuralCore {
    let mut params = Vec::new();
    for p in &tool.parameters {
        let required = tool.is_required(&p.name);
        match &p.ty {
            ParamType::Object(children) if !children.is_empty() => {
                for c in children {
                    params.push(core_param(format!("{}.{}", p.name, c.name), c, required));
                }
            }
            _ => params.push(core_param(p.name.clone(), p, required)),
        }
    }
    StructuralCore { name: tool.name.clone(), params }
}

fn core_param(path: String, p: &ParameterSpec, required: bool) -> CoreParam {
    CoreParam {
        path,
        kind: p.kind(),
        required,
        enum_values: p.enum_values().to_vec(),
        default_value: p.default_value.clone(),
        item_kind: p.item_kind(),
    }
}

// ---------------------------------------------------------------------------
// Rendering

pub fn compress_tool(tool: &ToolDefinition, profile: CompressionProfile) -> String {
    let mut line = String::with_capacity(128);
    line.push_str(&tool.name);
    line.push('(');
    let core = extract_core(tool);
    for (i, p) in core.params.iter().enumerate() {
        if i > 0 {
            line.push_str(", ");
        }
        render_param(&mut line, p);
    }
    line.push(')');
    if profile == CompressionProfile::Conservative {
        let note = conservative_note(tool);
        if !note.is_empty() {
            line.push_str(" # ");
            line.push_str(&note);
        }
    }
    line
}

pub fn compress_catalog(
    catalog: &ToolCatalog,
    profile: CompressionProfile,
    counter: &TokenCountProfile,
) -> CompressedCatalog {
    let lines: Vec<String> = catalog.tools().iter().map(|t| compress_tool(t, profile)).collect();
    let token_count = counter.count_tokens(&lines.join("\n"));
    CompressedCatalog { lines, format_tag: FORMAT_TAG.to_string(), token_count }
}

/// Catalog text exactly as it is placed in a prompt.
pub fn render_catalog(catalog: &ToolCatalog, format: SchemaFormat) -> String {
    match format.profile() {
        None => serialize_catalog(catalog),
        Some(p) => catalog.tools().iter().map(|t| compress_tool(t, p)).collect::<Vec<_>>().join("\n"),
    }
}

pub fn schema_tokens(catalog: &ToolCatalog, format: SchemaFormat, counter: &TokenCountProfile) -> usize {
    counter.count_tokens(&render_catalog(catalog, format))
}

/// `(json - compressed) / json` in tokens.
pub fn savings_rate(
    catalog: &ToolCatalog,
    profile: CompressionProfile,
    counter: &TokenCountProfile,
) -> Result<f64, CompressError> {
    if catalog.is_empty() {
        return Err(CompressError::EmptyCatalog);
    }
    let json = counter.count_tokens(&serialize_catalog(catalog)) as f64;
    let comp = compress_catalog(catalog, profile, counter).token_count as f64;
    Ok((json - comp) / json)
}

fn kind_name(kind: ScalarKind) -> &'static str {
    match kind {
        ScalarKind::String => "str",
        ScalarKind::Number => "num",
        ScalarKind::Integer => "int",
        ScalarKind::Boolean => "bool",
    }
}

fn render_param(out: &mut String, p: &CoreParam) {
    out.push_str(&p.path);
    out.push(':');
    match p.kind {
        ParamKind::Enum => {
            out.push('{');
            for (i, v) in p.enum_values.iter().enumerate() {
                if i > 0 {
                    out.push('|');
                }
                push_value(out, v);
            }
            out.push('}');
        }
        ParamKind::Array => {
            out.push_str(kind_name(p.item_kind.unwrap_or(ScalarKind::String)));
            out.push_str("[]");
        }
        ParamKind::Object => out.push_str("obj"),
        ParamKind::String => out.push_str("str"),
        ParamKind::Number => out.push_str("num"),
        ParamKind::Integer => out.push_str("int"),
        ParamKind::Boolean => out.push_str("bool"),
    }
    if p.required {
        out.push('!');
    }
    if let Some(d) = &p.default_value {
        out.push('=');
        push_value(out, d);
    }
}

fn needs_quoting(v: &str) -> bool {
    v.is_empty() || v.chars().any(|c| c.is_whitespace() || c.is_control() || ",()|{}!=#\\\"".contains(c))
}

fn push_value(out: &mut String, v: &str) {
    if needs_quoting(v) {
        out.push_str(&serde_json::to_string(v).expect("strings always serialize"));
    } else {
        out.push_str(v);
    }
}

fn conservative_note(tool: &ToolDefinition) -> String {
    let mut note = clip_words(first_sentence(&tool.description), NOTE_WORD_LIMIT);
    let mut described = tool
        .parameters
        .iter()
        .flat_map(|p| {
            let own = p.description.as_deref().map(|d| (p.name.clone(), d));
            let kids = p
                .children()
                .iter()
                .filter_map(move |c| c.description.as_deref().map(|d| (format!("{}.{}", p.name, c.name), d)));
            own.into_iter().chain(kids)
        })
        .peekable();
    if described.peek().is_some() && !note.is_empty() {
        note.push_str(" |");
    }
    for (i, (path, desc)) in described.enumerate() {
        if i > 0 {
            note.push(';');
        }
        if !note.is_empty() {
            note.push(' ');
        }
        let _ = write!(note, "{path}: {}", clip_words(desc, NOTE_WORD_LIMIT));
    }
    note
}

/// Text up to and including the first sentence terminator that is followed
/// by whitespace, or the whole text.
pub fn first_sentence(text: &str) -> &str {
    let text = text.trim();
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if matches!(b, b'.' | b'!' | b'?') && bytes.get(i + 1).is_some_and(|n| n.is_ascii_whitespace()) {
            return &text[..=i];
        }
    }
    text
}

/// Keeps at most `limit` whitespace-separated words, marking a cut with `...`.
pub fn clip_words(text: &str, limit: usize) -> String {
    let words: Vec<&str> = text.split_whitespace().collect();
    if words.len() <= limit {
        words.join(" ")
    } else {
        format!("{}...", words[..limit].join(" "))
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Recovers the structural core of every tool line. Notes after the closing
/// parenthesis are ignored.
pub fn parse_compressed(text: &str) -> Result<Vec<StructuralCore>, CompressError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l).map_err(|message| CompressError::Parse { line: i + 1, message }))
        .collect()
}

fn parse_line(line: &str) -> Result<StructuralCore, String> {
    let open = line.find('(').ok_or("missing `(`")?;
    let name = line[..open].trim();
    if !crate::schema::is_identifier(name) {
        return Err(format!("invalid tool name {name:?}"));
    }
    let body = &line[open + 1..];
    let close = find_unquoted(body, b')').ok_or("missing `)`")?;
    let sig = &body[..close];
    let params =
        split_top_level(sig)?.into_iter().map(|item| parse_item(item.trim())).collect::<Result<Vec<_>, _>>()?;
    Ok(StructuralCore { name: name.to_string(), params })
}

/// Byte offset of the first `target` outside quotes and braces.
fn find_unquoted(s: &str, target: u8) -> Option<usize> {
    let mut in_quote = false;
    let mut escaped = false;
    let mut depth = 0usize;
    for (i, &b) in s.as_bytes().iter().enumerate() {
        if in_quote {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_quote = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_quote = true,
            b'{' => depth += 1,
            b'}' => depth = depth.saturating_sub(1),
            _ if b == target && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn split_top_level(sig: &str) -> Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut rest = sig;
    if rest.trim().is_empty() {
        return Ok(parts);
    }
    while let Some(i) = find_unquoted(rest, b',') {
        parts.push(&rest[..i]);
        rest = &rest[i + 1..];
    }
    parts.push(rest);
    Ok(parts)
}

/// Reads a possibly quoted value from the front of `s`, returning it and the rest.
fn take_value<'a>(s: &'a str, stops: &[u8]) -> Result<(String, &'a str), String> {
    if s.starts_with('"') {
        let bytes = s.as_bytes();
        let mut escaped = false;
        for i in 1..bytes.len() {
            match bytes[i] {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => {
                    let v: String = serde_json::from_str(&s[..=i]).map_err(|e| e.to_string())?;
                    return Ok((v, &s[i + 1..]));
                }
                _ => {}
            }
        }
        Err("unterminated quoted value".into())
    } else {
        let end = s.bytes().position(|b| stops.contains(&b)).unwrap_or(s.len());
        Ok((s[..end].to_string(), &s[end..]))
    }
}

fn parse_item(item: &str) -> Result<CoreParam, String> {
    let colon = item.find(':').ok_or_else(|| format!("parameter without kind: {item:?}"))?;
    let path = item[..colon].to_string();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(format!("bad parameter path {path:?}"));
    }
    let mut rest = &item[colon + 1..];
    let mut enum_values = Vec::new();
    let mut item_kind = None;
    let kind = if let Some(r) = rest.strip_prefix('{') {
        rest = r;
        loop {
            let (v, r) = take_value(rest, b"|}")?;
            enum_values.push(v);
            match r.as_bytes().first() {
                Some(b'|') => rest = &r[1..],
                Some(b'}') => {
                    rest = &r[1..];
                    break;
                }
                _ => return Err("unterminated enum".into()),
            }
        }
        ParamKind::Enum
    } else {
        let end = rest.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len());
        let word = &rest[..end];
        rest = &rest[end..];
        let scalar = match word {
            "str" => Some(ScalarKind::String),
            "num" => Some(ScalarKind::Number),
            "int" => Some(ScalarKind::Integer),
            "bool" => Some(ScalarKind::Boolean),
            "obj" => None,
            other => return Err(format!("unknown kind {other:?}")),
        };
        if let Some(r) = rest.strip_prefix("[]") {
            rest = r;
            item_kind = Some(scalar.ok_or("object arrays are not supported")?);
            ParamKind::Array
        } else {
            scalar.map(ParamKind::from).unwrap_or(ParamKind::Object)
        }
    };
    let required = if let Some(r) = rest.strip_prefix('!') {
        rest = r;
        true
    } else {
        false
    };
    let default_value = if let Some(r) = rest.strip_prefix('=') {
        let (v, r) = take_value(r, b"")?;
        rest = r;
        Some(v)
    } else {
        None
    };
    if !rest.trim().is_empty() {
        return Err(format!("trailing text {rest:?} in {path:?}"));
    }
    Ok(CoreParam { path, kind, required, enum_values, default_value, item_kind })
}
