//! Tool definitions in the function-calling subset of JSON Schema.
//!
//! Supported shapes: an object of typed properties with a `required` list,
//! string enums, arrays of scalars and one level of nested objects. Anything
//! outside that subset (`anyOf`, `$ref`, nullable unions, deeper nesting) is
//! rejected at parse time.
//!
//! Canonical serialization uses a fixed key order and a single space after
//! `,` and `:` separators, so equal definitions always produce identical
//! bytes and therefore identical token counts.

use std::collections::BTreeSet;
use std::fmt;
use std::io;

use serde::de::Error as _;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use thiserror::Error;

/// Keywords from full JSON Schema that this subset refuses outright.
const UNSUPPORTED_KEYWORDS: &[&str] = &["anyOf", "oneOf", "allOf", "not", "$ref", "patternProperties"];

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected a JSON object at {0}")]
    NotAnObject(String),
    #[error("missing field `{field}` at {at}")]
    MissingField { field: &'static str, at: String },
    #[error("invalid name {0:?}")]
    InvalidName(String),
    #[error("required entry {0:?} does not name a top-level parameter")]
    UnknownRequired(String),
    #[error("parameter {param:?}: unsupported kind {kind}")]
    UnsupportedKind { param: String, kind: String },
    #[error("parameter {param:?}: unsupported keyword `{keyword}`")]
    UnsupportedKeyword { param: String, keyword: String },
    #[error("duplicate parameter {0:?}")]
    DuplicateParameter(String),
    #[error("parameter {0:?}: enum must list at least one value")]
    EmptyEnum(String),
    #[error("parameter {param:?}: duplicate enum value {value:?}")]
    DuplicateEnumValue { param: String, value: String },
    #[error("parameter {param:?}: default {value} does not match its kind")]
    InvalidDefault { param: String, value: String },
    #[error("parameter {0:?}: objects may only nest one level")]
    NestingTooDeep(String),
    #[error("duplicate tool name {0:?}")]
    DuplicateTool(String),
}

/// Scalar kinds, used on their own and as array item kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarKind {
    String,
    Number,
    Integer,
    Boolean,
}

impl ScalarKind {
    pub fn json_type(self) -> &'static str {
        match self {
            ScalarKind::String => "string",
            ScalarKind::Number => "number",
            ScalarKind::Integer => "integer",
            ScalarKind::Boolean => "boolean",
        }
    }

    fn from_json_type(s: &str) -> Option<Self> {
        Some(match s {
            "string" => ScalarKind::String,
            "number" => ScalarKind::Number,
            "integer" => ScalarKind::Integer,
            "boolean" => ScalarKind::Boolean,
            _ => return None,
        })
    }
}

/// Flat kind tag of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamKind {
    String,
    Number,
    Integer,
    Boolean,
    Array,
    Object,
    Enum,
}

impl From<ScalarKind> for ParamKind {
    fn from(k: ScalarKind) -> Self {
        match k {
            ScalarKind::String => ParamKind::String,
            ScalarKind::Number => ParamKind::Number,
            ScalarKind::Integer => ParamKind::Integer,
            ScalarKind::Boolean => ParamKind::Boolean,
        }
    }
}

/// The type of a parameter together with the data only some kinds carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamType {
    Scalar(ScalarKind),
    Enum(Vec<String>),
    Array(ScalarKind),
    Object(Vec<ParameterSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSpec {
    pub name: String,
    pub ty: ParamType,
    /// Text rendering of the default: raw string for string/enum kinds,
    /// the JSON literal for numbers and booleans.
    pub default_value: Option<String>,
    pub description: Option<String>,
}

impl ParameterSpec {
    pub fn scalar(name: impl Into<String>, kind: ScalarKind) -> Self {
        Self { name: name.into(), ty: ParamType::Scalar(kind), default_value: None, description: None }
    }

    pub fn enumeration<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            ty: ParamType::Enum(values.into_iter().map(Into::into).collect()),
            default_value: None,
            description: None,
        }
    }

    pub fn array(name: impl Into<String>, item: ScalarKind) -> Self {
        Self { name: name.into(), ty: ParamType::Array(item), default_value: None, description: None }
    }

    pub fn object(name: impl Into<String>, children: Vec<ParameterSpec>) -> Self {
        Self { name: name.into(), ty: ParamType::Object(children), default_value: None, description: None }
    }

    pub fn with_default(mut self, value: impl Into<String>) -> Self {
        self.default_value = Some(value.into());
        self
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = Some(text.into());
        self
    }

    pub fn kind(&self) -> ParamKind {
        match &self.ty {
            ParamType::Scalar(k) => (*k).into(),
            ParamType::Enum(_) => ParamKind::Enum,
            ParamType::Array(_) => ParamKind::Array,
            ParamType::Object(_) => ParamKind::Object,
        }
    }

    pub fn enum_values(&self) -> &[String] {
        match &self.ty {
            ParamType::Enum(v) => v,
            _ => &[],
        }
    }

    pub fn item_kind(&self) -> Option<ScalarKind> {
        match self.ty {
            ParamType::Array(k) => Some(k),
            _ => None,
        }
    }

    pub fn children(&self) -> &[ParameterSpec] {
        match &self.ty {
            ParamType::Object(c) => c,
            _ => &[],
        }
    }

    fn validate(&self, depth: usize) -> Result<(), SchemaError> {
        if !is_param_name(&self.name) {
            return Err(SchemaError::InvalidName(self.name.clone()));
        }
        match &self.ty {
            ParamType::Enum(values) => {
                if values.is_empty() {
                    return Err(SchemaError::EmptyEnum(self.name.clone()));
                }
                let mut seen = BTreeSet::new();
                for v in values {
                    if !seen.insert(v.as_str()) {
                        return Err(SchemaError::DuplicateEnumValue { param: self.name.clone(), value: v.clone() });
                    }
                }
            }
            ParamType::Object(children) => {
                if depth > 0 {
                    return Err(SchemaError::NestingTooDeep(self.name.clone()));
                }
                check_unique(children)?;
                for c in children {
                    c.validate(depth + 1)?;
                }
            }
            ParamType::Scalar(_) | ParamType::Array(_) => {}
        }
        if let Some(d) = &self.default_value {
            if !default_fits(&self.ty, d) {
                return Err(SchemaError::InvalidDefault { param: self.name.clone(), value: d.clone() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolDefinition {
    pub name: String,
    pub description: String,
    pub parameters: Vec<ParameterSpec>,
    pub required: BTreeSet<String>,
}

impl ToolDefinition {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self { name: name.into(), description: description.into(), parameters: Vec::new(), required: BTreeSet::new() }
    }

    pub fn param(mut self, spec: ParameterSpec, required: bool) -> Self {
        if required {
            self.required.insert(spec.name.clone());
        }
        self.parameters.push(spec);
        self
    }

    pub fn is_required(&self, param: &str) -> bool {
        self.required.contains(param)
    }

    pub fn get(&self, param: &str) -> Option<&ParameterSpec> {
        self.parameters.iter().find(|p| p.name == param)
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if !is_identifier(&self.name) {
            return Err(SchemaError::InvalidName(self.name.clone()));
        }
        check_unique(&self.parameters)?;
        for p in &self.parameters {
            p.validate(0)?;
        }
        for r in &self.required {
            if self.get(r).is_none() {
                return Err(SchemaError::UnknownRequired(r.clone()));
            }
        }
        Ok(())
    }
}

/// An ordered set of tools with pairwise distinct names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ToolCatalog {
    tools: Vec<ToolDefinition>,
}

impl ToolCatalog {
    pub fn new(tools: Vec<ToolDefinition>) -> Result<Self, SchemaError> {
        let mut seen = BTreeSet::new();
        for t in &tools {
            t.validate()?;
            if !seen.insert(t.name.as_str()) {
                return Err(SchemaError::DuplicateTool(t.name.clone()));
            }
        }
        Ok(Self { tools })
    }

    pub fn tools(&self) -> &[ToolDefinition] {
        &self.tools
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&ToolDefinition> {
        self.tools.iter().find(|t| t.name == name)
    }

    /// The first `n` tools as a catalog of their own.
    pub fn prefix(&self, n: usize) -> ToolCatalog {
        ToolCatalog { tools: self.tools[..n.min(self.tools.len())].to_vec() }
    }

    /// Appends tools from `other`, rejecting name collisions.
    pub fn extended(&self, other: &[ToolDefinition]) -> Result<ToolCatalog, SchemaError> {
        let mut tools = self.tools.clone();
        tools.extend_from_slice(other);
        ToolCatalog::new(tools)
    }

    pub fn into_tools(self) -> Vec<ToolDefinition> {
        self.tools
    }
}

impl Serialize for ToolCatalog {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.tools.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ToolCatalog {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let tools = Vec::<ToolDefinition>::deserialize(d)?;
        ToolCatalog::new(tools).map_err(D::Error::custom)
    }
}

fn check_unique(params: &[ParameterSpec]) -> Result<(), SchemaError> {
    let mut seen = BTreeSet::new();
    for p in params {
        if !seen.insert(p.name.as_str()) {
            return Err(SchemaError::DuplicateParameter(p.name.clone()));
        }
    }
    Ok(())
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parameter names additionally allow `-`, which is common in HTTP-style APIs.
fn is_param_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn default_fits(ty: &ParamType, text: &str) -> bool {
    match ty {
        ParamType::Scalar(ScalarKind::String) => true,
        ParamType::Scalar(ScalarKind::Integer) => text.parse::<i64>().is_ok(),
        ParamType::Scalar(ScalarKind::Number) => serde_json::from_str::<serde_json::Number>(text).is_ok(),
        ParamType::Scalar(ScalarKind::Boolean) => text == "true" || text == "false",
        ParamType::Enum(values) => values.iter().any(|v| v == text),
        ParamType::Array(_) | ParamType::Object(_) => false,
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses one tool definition from JSON text.
///
/// Accepts the bare `{name, description, parameters}` shape and the
/// `{"type": "function", "function": {...}}` wrapper used by chat APIs.
pub fn parse_tool(json_text: &str) -> Result<ToolDefinition, SchemaError> {
    let value: Value = serde_json::from_str(json_text)?;
    parse_tool_value(&value)
}

/// Parses a catalog file: either a single tool object or an array of tools.
pub fn parse_catalog(json_text: &str) -> Result<ToolCatalog, SchemaError> {
    let value: Value = serde_json::from_str(json_text)?;
    match &value {
        Value::Array(items) => ToolCatalog::new(items.iter().map(parse_tool_value).collect::<Result<_, _>>()?),
        _ => ToolCatalog::new(vec![parse_tool_value(&value)?]),
    }
}

pub fn parse_tool_value(value: &Value) -> Result<ToolDefinition, SchemaError> {
    let mut obj = value.as_object().ok_or_else(|| SchemaError::NotAnObject("tool".into()))?;
    if let Some(inner) = obj.get("function").and_then(Value::as_object) {
        obj = inner;
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or(SchemaError::MissingField { field: "name", at: "tool".into() })?
        .to_string();
    let description = obj.get("description").and_then(Value::as_str).unwrap_or_default().to_string();

    let mut tool = ToolDefinition::new(name, description);
    if let Some(params) = obj.get("parameters") {
        let params = params.as_object().ok_or_else(|| SchemaError::NotAnObject(format!("{}.parameters", tool.name)))?;
        check_keywords(&tool.name, params)?;
        if let Some(t) = params.get("type") {
            if t.as_str() != Some("object") {
                return Err(SchemaError::UnsupportedKind { param: tool.name.clone(), kind: t.to_string() });
            }
        }
        tool.parameters = parse_properties(params, 0)?;
        tool.required = parse_required(params)?;
    }
    tool.validate()?;
    Ok(tool)
}

fn parse_required(obj: &Map<String, Value>) -> Result<BTreeSet<String>, SchemaError> {
    let Some(req) = obj.get("required") else {
        return Ok(BTreeSet::new());
    };
    let arr = req.as_array().ok_or(SchemaError::MissingField { field: "required", at: "parameters".into() })?;
    arr.iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| SchemaError::UnknownRequired(v.to_string())))
        .collect()
}

fn parse_properties(obj: &Map<String, Value>, depth: usize) -> Result<Vec<ParameterSpec>, SchemaError> {
    let Some(props) = obj.get("properties") else {
        return Ok(Vec::new());
    };
    let props = props.as_object().ok_or_else(|| SchemaError::NotAnObject("properties".into()))?;
    props.iter().map(|(name, spec)| parse_param(name, spec, depth)).collect()
}

fn check_keywords(param: &str, obj: &Map<String, Value>) -> Result<(), SchemaError> {
    for kw in UNSUPPORTED_KEYWORDS {
        if obj.contains_key(*kw) {
            return Err(SchemaError::UnsupportedKeyword { param: param.to_string(), keyword: kw.to_string() });
        }
    }
    Ok(())
}

fn parse_param(name: &str, spec: &Value, depth: usize) -> Result<ParameterSpec, SchemaError> {
    let obj = spec.as_object().ok_or_else(|| SchemaError::NotAnObject(name.to_string()))?;
    check_keywords(name, obj)?;
    let unsupported = |kind: String| SchemaError::UnsupportedKind { param: name.to_string(), kind };

    let type_str = match obj.get("type") {
        None => None,
        Some(Value::String(s)) => Some(s.as_str()),
        Some(other) => return Err(unsupported(other.to_string())),
    };

    let ty = if let Some(values) = obj.get("enum") {
        if !matches!(type_str, None | Some("string")) {
            return Err(unsupported(format!("{} enum", type_str.unwrap_or_default())));
        }
        let values = values
            .as_array()
            .ok_or_else(|| SchemaError::EmptyEnum(name.to_string()))?
            .iter()
            .map(|v| v.as_str().map(str::to_string).ok_or_else(|| unsupported(format!("enum value {v}"))))
            .collect::<Result<Vec<_>, _>>()?;
        ParamType::Enum(values)
    } else {
        match type_str {
            Some("array") => {
                let items = obj
                    .get("items")
                    .and_then(Value::as_object)
                    .ok_or(SchemaError::MissingField { field: "items", at: name.to_string() })?;
                check_keywords(name, items)?;
                let item = items.get("type").and_then(Value::as_str).unwrap_or("array");
                let kind = ScalarKind::from_json_type(item).ok_or_else(|| unsupported(format!("array of {item}")))?;
                ParamType::Array(kind)
            }
            Some("object") => {
                if depth > 0 {
                    return Err(SchemaError::NestingTooDeep(name.to_string()));
                }
                ParamType::Object(parse_properties(obj, depth + 1)?)
            }
            Some(t) => ParamType::Scalar(ScalarKind::from_json_type(t).ok_or_else(|| unsupported(t.to_string()))?),
            None => return Err(SchemaError::MissingField { field: "type", at: name.to_string() }),
        }
    };

    let description = obj.get("description").and_then(Value::as_str).map(str::to_string);
    let default_value = match obj.get("default") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        Some(Value::Bool(b)) => Some(b.to_string()),
        Some(other) => return Err(SchemaError::InvalidDefault { param: name.to_string(), value: other.to_string() }),
    };
    // String defaults for numeric kinds would otherwise round-trip as numbers.
    if let (Some(Value::String(_)), ParamType::Scalar(k)) = (obj.get("default"), &ty) {
        if *k != ScalarKind::String {
            return Err(SchemaError::InvalidDefault { param: name.to_string(), value: obj["default"].to_string() });
        }
    }

    Ok(ParameterSpec { name: name.to_string(), ty, default_value, description })
}

// ---------------------------------------------------------------------------
// Canonical serialization

impl Serialize for ToolDefinition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ToolDefinition", 3)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("description", &self.description)?;
        st.serialize_field("parameters", &ParametersBlock(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ToolDefinition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(d)?;
        parse_tool_value(&value).map_err(D::Error::custom)
    }
}

struct ParametersBlock<'a>(&'a ToolDefinition);

impl Serialize for ParametersBlock<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let tool = self.0;
        let required: Vec<&str> =
            tool.parameters.iter().filter(|p| tool.required.contains(&p.name)).map(|p| p.name.as_str()).collect();
        let mut st = s.serialize_struct("Parameters", 3)?;
        st.serialize_field("type", "object")?;
        st.serialize_field("properties", &Properties(&tool.parameters))?;
        st.serialize_field("required", &required)?;
        st.end()
    }
}

struct Properties<'a>(&'a [ParameterSpec]);

impl Serialize for Properties<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for p in self.0 {
            map.serialize_entry(&p.name, p)?;
        }
        map.end()
    }
}

struct ItemType(ScalarKind);

impl Serialize for ItemType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("type", self.0.json_type())?;
        map.end()
    }
}

impl Serialize for ParameterSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        match &self.ty {
            ParamType::Scalar(k) => map.serialize_entry("type", k.json_type())?,
            ParamType::Enum(values) => {
                map.serialize_entry("type", "string")?;
                map.serialize_entry("enum", values)?;
            }
            ParamType::Array(item) => {
                map.serialize_entry("type", "array")?;
                map.serialize_entry("items", &ItemType(*item))?;
            }
            ParamType::Object(children) => {
                map.serialize_entry("type", "object")?;
                map.serialize_entry("properties", &Properties(children))?;
            }
        }
        if let Some(d) = &self.description {
            map.serialize_entry("description", d)?;
        }
        if let Some(d) = &self.default_value {
            map.serialize_entry("default", &default_literal(&self.ty, d))?;
        }
        map.end()
    }
}

fn default_literal(ty: &ParamType, text: &str) -> Value {
    match ty {
        ParamType::Scalar(ScalarKind::Integer | ScalarKind::Number) => serde_json::from_str::<serde_json::Number>(text)
            .map(Value::Number)
            .unwrap_or_else(|_| Value::String(text.to_string())),
        ParamType::Scalar(ScalarKind::Boolean) => Value::Bool(text == "true"),
        _ => Value::String(text.to_string()),
    }
}

/// JSON formatter that writes `, ` and `: ` separators and nothing else.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpacedFormatter;

impl serde_json::ser::Formatter for SpacedFormatter {
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }
}

/// Writes any serializable value with [`SpacedFormatter`].
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::with_capacity(256);
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SpacedFormatter);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn serialize_tool(tool: &ToolDefinition) -> String {
    to_canonical_string(tool)
}

/// Canonical JSON for a whole catalog: a JSON array of canonical tools.
pub fn serialize_catalog(catalog: &ToolCatalog) -> String {
    to_canonical_string(catalog)
}

impl fmt::Display for ToolDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tool(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_tool_has_no_parameters() {
        let t = parse_tool(
            r#"{"name":"ping","description":"","parameters":{"type":"object","properties":{},"required":[]}}"#,
        )
        .unwrap();
        assert_eq!(t.name, "ping");
        assert!(t.parameters.is_empty());
        assert_eq!(
            serialize_tool(&t),
            r#"{"name": "ping", "description": "", "parameters": {"type": "object", "properties": {}, "required": []}}"#
        );
    }

    #[test]
    fn enum_values_keep_source_order() {
        let t = parse_tool(
            r#"{"name":"get_tickets","description":"List tickets","parameters":{"type":"object","properties":{
                "status":{"type":"string","enum":["open","closed","pending"]},
                "limit":{"type":"integer","default":20},
                "tags":{"type":"array","items":{"type":"string"}},
                "verbose":{"type":"boolean"}},"required":["status"]}}"#,
        )
        .unwrap();
        assert_eq!(t.parameters.len(), 4);
        let status = t.get("status").unwrap();
        assert_eq!(status.kind(), ParamKind::Enum);
        assert_eq!(status.enum_values(), ["open", "closed", "pending"]);
        assert_eq!(t.get("limit").unwrap().default_value.as_deref(), Some("20"));
        assert_eq!(t.get("tags").unwrap().item_kind(), Some(ScalarKind::String));
        assert!(t.is_required("status"));
    }

    #[test]
    fn function_wrapper_is_accepted() {
        let t = parse_tool(
            r#"{"type":"function","function":{"name":"ping","parameters":{"type":"object","properties":{}}}}"#,
        )
        .unwrap();
        assert_eq!(t.name, "ping");
        assert_eq!(t.description, "");
    }

    #[test]
    fn rejects_listed_error_cases() {
        assert!(matches!(parse_tool("{not json"), Err(SchemaError::Json(_))));
        assert!(matches!(
            parse_tool(r#"{"description":"x","parameters":{"type":"object","properties":{}}}"#),
            Err(SchemaError::MissingField { field: "name", .. })
        ));
        assert!(matches!(
            parse_tool(r#"{"name":"a","parameters":{"type":"object","properties":{},"required":["ghost"]}}"#),
            Err(SchemaError::UnknownRequired(_))
        ));
        assert!(matches!(
            parse_tool(r#"{"name":"a","parameters":{"type":"object","properties":{"x":{"type":"null"}}}}"#),
            Err(SchemaError::UnsupportedKind { .. })
        ));
        assert!(matches!(
            parse_tool(r#"{"name":"a","parameters":{"type":"object","properties":{"x":{"anyOf":[]}}}}"#),
            Err(SchemaError::UnsupportedKeyword { .. })
        ));
    }

    #[test]
    fn rejects_invalid_structure() {
        assert!(matches!(
            parse_tool(r#"{"name":"9bad","parameters":{"type":"object","properties":{}}}"#),
            Err(SchemaError::InvalidName(_))
        ));
        assert!(matches!(
            parse_tool(
                r#"{"name":"a","parameters":{"type":"object","properties":{"o":{"type":"object","properties":{"i":{"type":"object","properties":{}}}}}}}"#
            ),
            Err(SchemaError::NestingTooDeep(_))
        ));
        assert!(matches!(
            parse_tool(
                r#"{"name":"a","parameters":{"type":"object","properties":{"e":{"type":"string","enum":["x","x"]}}}}"#
            ),
            Err(SchemaError::DuplicateEnumValue { .. })
        ));
        assert!(matches!(
            parse_tool(r#"{"name":"a","parameters":{"type":"object","properties":{"e":{"type":"string","enum":[]}}}}"#),
            Err(SchemaError::EmptyEnum(_))
        ));
        assert!(matches!(
            parse_tool(
                r#"{"name":"a","parameters":{"type":"object","properties":{"n":{"type":"integer","default":"ten"}}}}"#
            ),
            Err(SchemaError::InvalidDefault { .. })
        ));
        assert!(matches!(
            parse_tool(
                r#"{"name":"a","parameters":{"type":"object","properties":{"e":{"type":"string","enum":["x"],"default":"y"}}}}"#
            ),
            Err(SchemaError::InvalidDefault { .. })
        ));
    }

    #[test]
    fn catalog_rejects_duplicate_names() {
        let text = r#"[{"name":"a","parameters":{"type":"object","properties":{}}},{"name":"a"}]"#;
        assert!(matches!(parse_catalog(text), Err(SchemaError::DuplicateTool(_))));
        let single = parse_catalog(r#"{"name":"a"}"#).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn serialization_is_canonical_and_reparses() {
        let tool = ToolDefinition::new("query_employees", "Look up \"staff\" records.")
            .param(ParameterSpec::scalar("employee_id", ScalarKind::String), true)
            .param(ParameterSpec::enumeration("status", ["active", "on_leave"]).with_default("active"), false)
            .param(ParameterSpec::scalar("ratio", ScalarKind::Number).with_default("0.5"), false)
            .param(ParameterSpec::scalar("dry_run", ScalarKind::Boolean).with_default("false"), false)
            .param(
                ParameterSpec::object(
                    "period",
                    vec![ParameterSpec::scalar("start", ScalarKind::String).with_description("ISO date")],
                ),
                true,
            );
        let text = serialize_tool(&tool);
        assert_eq!(text, serialize_tool(&tool));
        assert!(text.contains(r#""default": 0.5"#));
        assert!(text.contains(r#""default": false"#));
        assert!(text.contains(r#""required": ["employee_id", "period"]"#));
        let back = parse_tool(&text).unwrap();
        assert_eq!(back, tool);
        assert_eq!(serialize_tool(&back), text);
    }

    #[test]
    fn reserialization_canonicalizes_whitespace_and_keys() {
        let messy = r#"{ "parameters" : {"required":["b"], "properties":{"b":{"default":3,"type":"integer"}},"type":"object"},"name":"t" }"#;
        let canon = serialize_tool(&parse_tool(messy).unwrap());
        assert_eq!(
            canon,
            r#"{"name": "t", "description": "", "parameters": {"type": "object", "properties": {"b": {"type": "integer", "default": 3}}, "required": ["b"]}}"#
        );
        assert_eq!(serialize_tool(&parse_tool(&canon).unwrap()), canon);
    }
}
