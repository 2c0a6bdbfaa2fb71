//! The completion contract shared by every backend, plus the offline mocks.

pub mod mock;

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{FinishReason, TopLogprobs};

pub use mock::{CorruptMock, ObedientMock};

pub const MAX_STOP_SEQUENCES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub context: String,
    pub stop: Vec<String>,
    pub max_tokens: u32,
    pub temperature: f64,
    /// Number of top candidates to report per generated token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logprobs: Option<u8>,
}

impl CompletionRequest {
    pub fn new(context: impl Into<String>, stop: Vec<String>, max_tokens: u32) -> Self {
        CompletionRequest { context: context.into(), stop, max_tokens, temperature: 0.0, logprobs: None }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.max_tokens == 0 {
            return Err(BackendError::InvalidRequest("max_tokens must be >= 1".into()));
        }
        if self.stop.len() > MAX_STOP_SEQUENCES {
            return Err(BackendError::InvalidRequest("at most 4 stop sequences".into()));
        }
        if self.stop.iter().any(|s| s.is_empty()) {
            return Err(BackendError::InvalidRequest("empty stop sequence".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(BackendError::InvalidRequest("temperature must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResult {
    /// Generated text; never includes the stop sequence that ended it.
    pub text: String,
    pub finish_reason: FinishReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logprobs: Option<Vec<TopLogprobs>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no recorded completion for request {0}")]
    CacheMiss(String),
    #[error("corrupt store: {0}")]
    StoreCorrupt(String),
    #[error("context not recognized: {0}")]
    UnrecognizedContext(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("backend does not report token log-probabilities")]
    LogprobsUnsupported,
}

/// A text-completion service. Implementations must tolerate concurrent calls.
pub trait Backend: Send + Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError>;
}

impl<B: Backend + ?Sized> Backend for &B {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        (**self).complete(req)
    }
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        (**self).complete(req)
    }
}

impl<B: Backend + ?Sized> Backend for Arc<B> {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        (**self).complete(req)
    }
}

/// Number of whitespace-delimited words, the token measure used by the mocks.
pub fn count_tokens(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Byte index just past the `n`-th word, or `None` if `text` has at most `n` words.
fn cut_after_words(text: &str, n: usize) -> Option<usize> {
    let mut words = 0;
    let mut in_word = false;
    for (k, c) in text.char_indices() {
        if c.is_whitespace() {
            if in_word && words == n {
                return text[k..].split_whitespace().next().map(|_| k);
            }
            in_word = false;
        } else if !in_word {
            in_word = true;
            words += 1;
            if words > n {
                return Some(text[..k].trim_end().len());
            }
        }
    }
    None
}

/// Applies stop sequences and the token budget to a full continuation.
pub fn clip(full: &str, req: &CompletionRequest) -> CompletionResult {
    let stop_at = req.stop.iter().filter_map(|s| full.find(s.as_str())).min();
    let upto = stop_at.unwrap_or(full.len());
    let head = &full[..upto];
    if let Some(cut) = cut_after_words(head, req.max_tokens as usize) {
        return CompletionResult {
            text: head[..cut].to_string(),
            finish_reason: FinishReason::BudgetExhausted,
            logprobs: None,
        };
    }
    let finish_reason = if stop_at.is_some() { FinishReason::StopSequence } else { FinishReason::NaturalEnd };
    CompletionResult { text: head.to_string(), finish_reason, logprobs: None }
}
