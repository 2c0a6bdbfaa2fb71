//! Completion backend for an OpenAI-compatible `/completions` endpoint.

use std::time::Duration;

use irsa_core::backend::{Backend, BackendError, CompletionRequest, CompletionResult};
use irsa_core::model::{FinishReason, TopLogprobs};
use serde_json::{json, Value};

pub const ENV_KEY: &str = "IRSA_API_KEY";
pub const ENV_BASE: &str = "IRSA_API_BASE";
const ATTEMPTS: u32 = 3;

pub struct HttpBackend {
    agent: ureq::Agent,
    base: String,
    key: Option<String>,
    model: String,
}

impl HttpBackend {
    pub fn new(base: impl Into<String>, key: Option<String>, model: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(300)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpBackend { agent, base: base.into().trim_end_matches('/').to_string(), key, model: model.into() }
    }

    /// Reads `IRSA_API_BASE` (required) and `IRSA_API_KEY` (optional).
    pub fn from_env(model: impl Into<String>) -> Result<Self, String> {
        let base = std::env::var(ENV_BASE).map_err(|_| format!("{ENV_BASE} is not set"))?;
        Ok(HttpBackend::new(base, std::env::var(ENV_KEY).ok(), model))
    }

    pub fn request_body(&self, req: &CompletionRequest) -> Value {
        let mut body = json!({
            "model": self.model,
            "prompt": req.context,
            "max_tokens": req.max_tokens,
            "temperature": req.temperature,
        });
        if !req.stop.is_empty() {
            body["stop"] = json!(req.stop);
        }
        if let Some(k) = req.logprobs {
            body["logprobs"] = json!(k);
        }
        body
    }

    fn post(&self, body: &Value) -> Result<Value, (bool, String)> {
        let url = format!("{}/completions", self.base);
        let mut call = self.agent.post(&url).header("Content-Type", "application/json");
        if let Some(key) = &self.key {
            call = call.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = call.send_json(body).map_err(|e| (true, e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| (true, e.to_string()))?;
        if status >= 400 {
            let retry = status == 429 || status >= 500;
            return Err((retry, format!("HTTP {status}: {}", text.chars().take(300).collect::<String>())));
        }
        serde_json::from_str(&text).map_err(|e| (false, format!("response is not JSON: {e}")))
    }
}

/// Reads `choices[0]` of a completions response.
pub fn parse_response(req: &CompletionRequest, v: &Value) -> Result<CompletionResult, BackendError> {
    let choice = v
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| BackendError::Transport("response has no choices".into()))?;
    let text = choice.get("text").and_then(Value::as_str).unwrap_or_default().to_string();
    let finish_reason = match choice.get("finish_reason").and_then(Value::as_str) {
        Some("length") => FinishReason::BudgetExhausted,
        // the API reports "stop" for both stop sequences and end-of-text
        Some("stop") if !req.stop.is_empty() => FinishReason::StopSequence,
        _ => FinishReason::NaturalEnd,
    };
    let logprobs = choice.get("logprobs").and_then(|l| l.get("top_logprobs")).and_then(Value::as_array).map(|tokens| {
        tokens
            .iter()
            .map(|t| {
                t.as_object()
                    .map(|m| m.iter().filter_map(|(k, v)| v.as_f64().map(|f| (k.clone(), f))).collect::<TopLogprobs>())
                    .unwrap_or_default()
            })
            .collect::<Vec<_>>()
    });
    if req.logprobs.is_some() && logprobs.as_ref().is_none_or(|l| l.is_empty()) {
        return Err(BackendError::LogprobsUnsupported);
    }
    Ok(CompletionResult { text, finish_reason, logprobs })
}

impl Backend for HttpBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        req.validate()?;
        let body = self.request_body(req);
        let mut last = String::new();
        for attempt in 0..ATTEMPTS {
            match self.post(&body) {
                Ok(v) => return parse_response(req, &v),
                Err((retry, msg)) => {
                    last = msg;
                    if !retry {
                        break;
                    }
                    if attempt + 1 < ATTEMPTS {
                        std::thread::sleep(Duration::from_millis(500 << attempt));
                    }
                }
            }
        }
        Err(BackendError::Transport(last))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_and_response() {
        let b = HttpBackend::new("http://localhost:1/v1/", None, "m");
        let mut req = CompletionRequest::new("ctx", vec!["</state>".into()], 5);
        let body = b.request_body(&req);
        assert_eq!(body["prompt"], "ctx");
        assert_eq!(body["stop"][0], "</state>");
        assert!(body.get("logprobs").is_none());
        let v = json!({"choices": [{"text": " a", "finish_reason": "stop"}]});
        let r = parse_response(&req, &v).unwrap();
        assert_eq!((r.text.as_str(), r.finish_reason), (" a", FinishReason::StopSequence));
        req.logprobs = Some(5);
        assert_eq!(parse_response(&req, &v), Err(BackendError::LogprobsUnsupported));
        let v = json!({"choices": [{"text": " true", "finish_reason": "length",
            "logprobs": {"top_logprobs": [{" true": -0.1, " false": -2.5}]}}]});
        let r = parse_response(&req, &v).unwrap();
        assert_eq!(r.finish_reason, FinishReason::BudgetExhausted);
        assert_eq!(r.logprobs.unwrap()[0][" false"], -2.5);
    }

    #[test]
    fn unreachable_host_is_a_transport_error() {
        let b = HttpBackend::new("http://127.0.0.1:9", None, "m");
        let req = CompletionRequest::new("ctx", vec![], 5);
        assert!(matches!(b.complete(&req), Err(BackendError::Transport(_))));
    }
}
