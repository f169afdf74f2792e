use std::time::Duration;

use serde_json::{json, Value};

use super::{normalize, EmbedError, Embedder};

/// Client for services exposing `POST {endpoint}/embeddings`.
pub struct HttpEmbedder {
    endpoint: String,
    model: String,
    api_key_env: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpEmbedder {
    pub fn new(endpoint: &str, model: &str, api_key_env: Option<&str>, timeout: Duration) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        Ok(Self {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key_env: api_key_env.map(str::to_string),
            client,
        })
    }
}

impl Embedder for HttpEmbedder {
    fn fingerprint(&self) -> String {
        format!("http/{}/{}", self.endpoint, self.model)
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let mut req = self
            .client
            .post(format!("{}/embeddings", self.endpoint))
            .json(&json!({ "model": self.model, "input": text }));
        if let Some(var) = &self.api_key_env {
            let key = std::env::var(var)
                .map_err(|_| EmbedError::Provider(format!("credential variable {var} is not set")))?;
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| EmbedError::Provider(e.without_url().to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(EmbedError::Provider(format!("HTTP status {}", status.as_u16())));
        }
        let body: Value = resp.json().map_err(|e| EmbedError::Provider(e.to_string()))?;
        let values = body["data"][0]["embedding"]
            .as_array()
            .ok_or_else(|| EmbedError::Provider("response has no data[0].embedding".into()))?;
        let v = values
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| EmbedError::Provider("non-numeric embedding".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(normalize(v))
    }
}
