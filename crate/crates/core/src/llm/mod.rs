//! Chat-completion backends: scripted replay for tests, closures, and an
//! HTTP client for the common chat-completions wire format.

mod config;
mod http;
mod scripted;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use config::{BackendConfig, BackendKind, ConfigError, Settings};
pub use http::{HttpBackend, RetryPolicy};
pub use scripted::{FnBackend, ScriptEntry, ScriptedBackend};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_prompt: String,
    pub user_prompt: String,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Free-form label; scripted backends key their replies on it.
    pub tag: String,
}

impl ChatRequest {
    pub fn new(tag: impl Into<String>, system_prompt: impl Into<String>, user_prompt: impl Into<String>) -> Self {
        Self {
            system_prompt: system_prompt.into(),
            user_prompt: user_prompt.into(),
            temperature: 0.0,
            max_tokens: 1024,
            tag: tag.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatResponse {
    pub text: String,
    pub latency: Duration,
    pub backend_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("request timed out")]
    Timeout,
    #[error("HTTP status {0}")]
    HttpStatus(u16),
    #[error("no scripted response left for tag '{0}'")]
    ScriptExhausted(String),
    #[error("credential variable {0} is not set")]
    CredentialMissing(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("invalid script: {0}")]
    Script(String),
}

impl LlmError {
    /// Worth another attempt with the same request.
    pub fn is_transient(&self) -> bool {
        match self {
            LlmError::Timeout | LlmError::Transport(_) => true,
            LlmError::HttpStatus(code) => *code == 429 || *code >= 500,
            _ => false,
        }
    }
}

/// Shareable chat-completion handle.
pub trait ChatBackend: Send + Sync {
    fn id(&self) -> String;

    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError>;
}

impl<B: ChatBackend + ?Sized> ChatBackend for Box<B> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).complete(req)
    }
}

impl<B: ChatBackend + ?Sized> ChatBackend for std::sync::Arc<B> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).complete(req)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transient_classification() {
        assert!(LlmError::Timeout.is_transient());
        assert!(LlmError::HttpStatus(429).is_transient());
        assert!(LlmError::HttpStatus(503).is_transient());
        assert!(!LlmError::HttpStatus(401).is_transient());
        assert!(!LlmError::ScriptExhausted("x".into()).is_transient());
    }
}
