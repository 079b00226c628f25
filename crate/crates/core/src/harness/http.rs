//! Chat-completions client for externally served models.

use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::{AssembledContext, ClientError, ClientErrorKind, HistoryRole, ModelClient, ModelDecision, Reply, ToolCall};
use crate::bench::Question;

#[derive(Debug, Clone, PartialEq)]
pub struct HttpConfig {
    /// Base URL; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token, if any.
    pub api_key_env: Option<String>,
    pub timeout: Duration,
    pub max_retries: usize,
    pub backoff: Duration,
}

impl HttpConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            api_key_env: None,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

pub struct HttpClient {
    config: HttpConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpClient {
    pub fn new(config: HttpConfig) -> Self {
        let api_key = config.api_key_env.as_deref().and_then(|v| std::env::var(v).ok());
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self { config, api_key, agent }
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'))
    }

    /// Request body for one turn. JSON schemas travel in the `tools` field;
    /// compressed catalogs are embedded in the system message.
    pub fn request_body(&self, ctx: &AssembledContext) -> Value {
        let mut system = ctx.system_text.clone();
        if ctx.format.is_compressed() {
            system.push_str("\n\nTools:\n");
            system.push_str(&ctx.schema_text);
        }
        let mut user = String::new();
        if !ctx.chunks.is_empty() {
            user.push_str("Documents:\n");
            user.push_str(&ctx.retrieved_text());
            user.push_str("\n\n");
        }
        if !ctx.history.is_empty() {
            user.push_str("Previous steps:\n");
            for turn in &ctx.history {
                let who = match turn.role {
                    HistoryRole::Assistant => "assistant",
                    HistoryRole::Tool => "tool result",
                };
                user.push_str(&format!("{who}: {}\n", turn.text));
            }
            user.push('\n');
        }
        user.push_str("Question: ");
        user.push_str(&ctx.question);

        let mut body = json!({
            "model": self.config.model,
            "temperature": 0,
            "max_tokens": ctx.budget.output_tokens,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        });
        if !ctx.format.is_compressed() {
            let tools: Vec<Value> = serde_json::from_str::<Vec<Value>>(&ctx.schema_text)
                .unwrap_or_default()
                .into_iter()
                .map(|t| json!({"type": "function", "function": t}))
                .collect();
            body["tools"] = Value::Array(tools);
        }
        body
    }

    fn send_once(&self, body: &Value) -> Result<String, (ClientError, bool)> {
        let err = |kind, message: String| ClientError { kind, message, retries: 0 };
        let mut req = self.agent.post(self.endpoint());
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = match req.send_json(body) {
            Ok(r) => r,
            Err(ureq::Error::Timeout(t)) => return Err((err(ClientErrorKind::Timeout, t.to_string()), true)),
            Err(ureq::Error::Io(e)) if e.kind() == std::io::ErrorKind::TimedOut => {
                return Err((err(ClientErrorKind::Timeout, e.to_string()), true))
            }
            Err(e) => return Err((err(ClientErrorKind::Transport, e.to_string()), true)),
        };
        let status = resp.status().as_u16();
        let text = match resp.body_mut().read_to_string() {
            Ok(t) => t,
            Err(ureq::Error::Timeout(t)) => return Err((err(ClientErrorKind::Timeout, t.to_string()), true)),
            Err(e) => return Err((err(ClientErrorKind::Transport, e.to_string()), true)),
        };
        if !(200..300).contains(&status) {
            let retry = status == 429 || status >= 500;
            return Err((err(ClientErrorKind::HttpStatus, format!("status {status}: {text}")), retry));
        }
        Ok(text)
    }
}

impl ModelClient for HttpClient {
    fn id(&self) -> String {
        self.config.model.clone()
    }

    fn decide(&self, ctx: &AssembledContext, _question: &Question) -> Result<Reply, ClientError> {
        let body = self.request_body(ctx);
        let mut attempt = 0;
        loop {
            match self.send_once(&body) {
                Ok(text) => {
                    return parse_response(&text)
                        .map(|decision| Reply { decision, retries: attempt })
                        .map_err(|e| ClientError { retries: attempt, ..e })
                }
                Err((_, true)) if attempt < self.config.max_retries => {
                    thread::sleep(self.config.backoff * 2u32.pow(attempt as u32));
                    attempt += 1;
                }
                Err((e, _)) => return Err(ClientError { retries: attempt, ..e }),
            }
        }
    }
}

fn malformed(message: impl Into<String>) -> ClientError {
    ClientError { kind: ClientErrorKind::Malformed, message: message.into(), retries: 0 }
}

fn parse_arguments(raw: &Value) -> Result<ToolCall, ClientError> {
    let args = match raw {
        Value::String(s) if s.trim().is_empty() => Value::Object(Default::default()),
        Value::String(s) => serde_json::from_str(s).map_err(|e| malformed(format!("tool arguments: {e}")))?,
        other => other.clone(),
    };
    let Value::Object(map) = args else {
        return Err(malformed("tool arguments are not an object"));
    };
    Ok(ToolCall { name: String::new(), arguments: map.into_iter().collect() })
}

/// A JSON `{"tool": ..., "arguments": ...}` reply, as requested of models
/// that see a compressed catalog.
fn inline_call(content: &str) -> Option<ToolCall> {
    let trimmed = content.trim();
    let inner = trimmed
        .strip_prefix("```json")
        .or_else(|| trimmed.strip_prefix("```"))
        .and_then(|s| s.strip_suffix("```"))
        .unwrap_or(trimmed)
        .trim();
    if !inner.starts_with('{') {
        return None;
    }
    let v: Value = serde_json::from_str(inner).ok()?;
    let name = v.get("tool")?.as_str()?.to_string();
    let mut call =
        parse_arguments(v.get("arguments").unwrap_or(&Value::Null)).ok().unwrap_or_else(|| ToolCall::new(""));
    call.name = name;
    Some(call)
}

pub fn parse_response(text: &str) -> Result<ModelDecision, ClientError> {
    let v: Value = serde_json::from_str(text).map_err(|e| malformed(format!("response is not JSON: {e}")))?;
    let message = v
        .get("choices")
        .and_then(|c| c.get(0))
        .and_then(|c| c.get("message"))
        .ok_or_else(|| malformed("response has no choices[0].message"))?;
    if let Some(call) = message.get("tool_calls").and_then(|c| c.get(0)) {
        let f = call.get("function").ok_or_else(|| malformed("tool call without function"))?;
        let name = f.get("name").and_then(Value::as_str).ok_or_else(|| malformed("tool call without name"))?;
        let mut parsed = parse_arguments(f.get("arguments").unwrap_or(&Value::Null))?;
        parsed.name = name.to_string();
        return Ok(ModelDecision::ToolCall(parsed));
    }
    let content = match message.get("content") {
        Some(Value::String(s)) => s.as_str(),
        Some(Value::Null) | None => "",
        Some(_) => return Err(malformed("message content is not text")),
    };
    if let Some(call) = inline_call(content) {
        return Ok(ModelDecision::ToolCall(call));
    }
    Ok(ModelDecision::answer(content.trim()))
}
