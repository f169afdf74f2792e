use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::{json, Value};

use super::{ChatBackend, ChatRequest, ChatResponse, LlmError};

#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
    /// Extra random delay, as a fraction of the computed backoff.
    pub jitter: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(20),
            jitter: 0.25,
        }
    }
}

impl RetryPolicy {
    /// Backoff before retry number `attempt` (0-based), without jitter.
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 2u32.saturating_pow(attempt.min(16));
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }

    /// Upper bound on the total time spent sleeping between attempts.
    pub fn backoff_budget(&self) -> Duration {
        (0..self.max_retries)
            .map(|a| self.delay(a).mul_f64(1.0 + self.jitter))
            .sum()
    }
}

/// Client for `POST {endpoint}/chat/completions`.
pub struct HttpBackend {
    endpoint: String,
    model: String,
    api_key_env: Option<String>,
    retry: RetryPolicy,
    client: reqwest::blocking::Client,
}

impl std::fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpBackend")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .field("api_key_env", &self.api_key_env)
            .finish()
    }
}

impl HttpBackend {
    pub fn new(
        endpoint: &str,
        model: &str,
        api_key_env: Option<&str>,
        timeout: Duration,
        retry: RetryPolicy,
    ) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(Self {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key_env: api_key_env.map(str::to_string),
            retry,
            client,
        })
    }

    fn body(&self, req: &ChatRequest) -> Value {
        let mut messages = Vec::new();
        if !req.system_prompt.is_empty() {
            messages.push(json!({ "role": "system", "content": req.system_prompt }));
        }
        messages.push(json!({ "role": "user", "content": req.user_prompt }));
        json!({
            "model": self.model,
            "messages": messages,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        })
    }

    fn attempt(&self, body: &Value, key: Option<&str>) -> Result<String, (LlmError, Option<Duration>)> {
        let mut rb = self.client.post(format!("{}/chat/completions", self.endpoint)).json(body);
        if let Some(k) = key {
            rb = rb.bearer_auth(k);
        }
        let resp = rb.send().map_err(|e| {
            let err = if e.is_timeout() {
                LlmError::Timeout
            } else {
                LlmError::Transport(e.without_url().to_string())
            };
            (err, None)
        })?;
        let status = resp.status();
        if !status.is_success() {
            let retry_after = resp
                .headers()
                .get("retry-after")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|s| s.is_finite() && *s >= 0.0)
                .map(Duration::from_secs_f64);
            return Err((LlmError::HttpStatus(status.as_u16()), retry_after));
        }
        let value: Value = resp.json().map_err(|e| {
            let err = if e.is_timeout() {
                LlmError::Timeout
            } else {
                LlmError::MalformedResponse(e.without_url().to_string())
            };
            (err, None)
        })?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| (LlmError::MalformedResponse("missing choices[0].message.content".into()), None))
    }
}

impl ChatBackend for HttpBackend {
    fn id(&self) -> String {
        format!("http:{}", self.model)
    }

    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let key = match &self.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| LlmError::CredentialMissing(var.clone()))?),
            None => None,
        };
        let body = self.body(req);
        let start = Instant::now();
        let mut attempt = 0;
        loop {
            match self.attempt(&body, key.as_deref()) {
                Ok(text) => {
                    return Ok(ChatResponse {
                        text,
                        latency: start.elapsed(),
                        backend_id: self.id(),
                    })
                }
                Err((err, retry_after)) if err.is_transient() && attempt < self.retry.max_retries => {
                    let backoff = self.retry.delay(attempt);
                    let jitter = backoff.mul_f64(rand::rng().random::<f64>() * self.retry.jitter);
                    let wait = retry_after.map_or(backoff + jitter, |r| r.min(self.retry.max_delay));
                    tracing::warn!(tag = %req.tag, attempt, error = %err, ?wait, "retrying chat request");
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                Err((err, _)) => return Err(err),
            }
        }
    }
}
