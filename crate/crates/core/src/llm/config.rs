use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use super::{ChatBackend, HttpBackend, LlmError, RetryPolicy, ScriptedBackend};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("{key}: invalid value '{value}'")]
    Invalid { key: String, value: String },
    #[error("{0} is required")]
    Missing(String),
    #[error("{0}: credentials must be passed by environment variable name (use {0}_env)")]
    InlineCredential(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Scripted,
    Http,
}

impl FromStr for BackendKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "scripted" | "scripted-mock" | "mock" => Ok(BackendKind::Scripted),
            "http" => Ok(BackendKind::Http),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    pub timeout: Duration,
    pub max_retries: u32,
    pub backoff_base: Duration,
    pub script: Option<PathBuf>,
}

impl BackendConfig {
    pub fn scripted(script: impl Into<PathBuf>) -> Self {
        Self {
            kind: BackendKind::Scripted,
            endpoint: None,
            model: None,
            api_key_env: None,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            backoff_base: Duration::from_millis(500),
            script: Some(script.into()),
        }
    }

    pub fn validate(&self, role: &str) -> Result<(), ConfigError> {
        let missing = |k: &str| Err(ConfigError::Missing(format!("{role}.{k}")));
        match self.kind {
            BackendKind::Http if self.endpoint.is_none() => missing("endpoint"),
            BackendKind::Http if self.model.is_none() => missing("model"),
            BackendKind::Scripted if self.script.is_none() => missing("script"),
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<Box<dyn ChatBackend>, LlmError> {
        match self.kind {
            BackendKind::Scripted => {
                let path = self.script.as_ref().ok_or_else(|| LlmError::Script("no script file configured".into()))?;
                Ok(Box::new(ScriptedBackend::load(path)?))
            }
            BackendKind::Http => {
                let retry = RetryPolicy {
                    max_retries: self.max_retries,
                    base_delay: self.backoff_base,
                    ..RetryPolicy::default()
                };
                Ok(Box::new(HttpBackend::new(
                    self.endpoint.as_deref().unwrap_or_default(),
                    self.model.as_deref().unwrap_or_default(),
                    self.api_key_env.as_deref(),
                    self.timeout,
                    retry,
                )?))
            }
        }
    }
}

/// Flat `section.key = value` settings, layered file < environment < flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

pub const ENV_PREFIX: &str = "NLSTL_";

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1 });
            }
            s.set(k, v.trim().trim_matches('"'))?;
        }
        Ok(s)
    }

    /// Applies `NLSTL_SECTION_KEY` variables over known keys of the given
    /// sections.
    pub fn overlay_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<(), ConfigError> {
        for (name, value) in vars {
            let Some(rest) = name.strip_prefix(ENV_PREFIX) else { continue };
            let rest = rest.to_ascii_lowercase();
            let key = match rest.split_once('_') {
                Some((section, field)) if ["generator", "refiner", "augmenter", "embedder", "dataset"].contains(&section) => {
                    format!("{section}.{field}")
                }
                _ => rest,
            };
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if key.ends_with("api_key") || key.ends_with("token") {
            return Err(ConfigError::InlineCredential(key.to_string()));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::Invalid {
                    key: key.into(),
                    value: v.into(),
                })
            })
            .transpose()
    }

    /// Backend settings for a role such as `generator` or `refiner`.
    pub fn backend(&self, role: &str) -> Result<BackendConfig, ConfigError> {
        let key = |k: &str| format!("{role}.{k}");
        let kind_raw = self.get(&key("kind")).ok_or_else(|| ConfigError::Missing(key("kind")))?;
        let kind = kind_raw.parse().map_err(|_| ConfigError::Invalid {
            key: key("kind"),
            value: kind_raw.into(),
        })?;
        let cfg = BackendConfig {
            kind,
            endpoint: self.get(&key("endpoint")).map(str::to_string),
            model: self.get(&key("model")).map(str::to_string),
            api_key_env: self.get(&key("api_key_env")).map(str::to_string),
            timeout: Duration::from_secs_f64(self.get_parsed(&key("timeout_secs"))?.unwrap_or(60.0)),
            max_retries: self.get_parsed(&key("max_retries"))?.unwrap_or(3),
            backoff_base: Duration::from_millis(self.get_parsed(&key("backoff_ms"))?.unwrap_or(500)),
            script: self.get(&key("script")).map(PathBuf::from),
        };
        cfg.validate(role)?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layered_resolution() {
        let mut s = Settings::parse(
            "# backends\ngenerator.kind = http\ngenerator.endpoint = http://localhost:9/v1\ngenerator.model = \"m\"\n",
        )
        .unwrap();
        s.overlay_env([
            ("NLSTL_GENERATOR_MODEL".to_string(), "from-env".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ])
        .unwrap();
        s.set("generator.max_retries", "7").unwrap();
        let b = s.backend("generator").unwrap();
        assert_eq!(b.kind, BackendKind::Http);
        assert_eq!(b.model.as_deref(), Some("from-env"));
        assert_eq!(b.max_retries, 7);
        assert_eq!(b.timeout, Duration::from_secs(60));
    }

    #[test]
    fn validation() {
        let s = Settings::parse("refiner.kind = http\nrefiner.model = m").unwrap();
        assert_eq!(s.backend("refiner"), Err(ConfigError::Missing("refiner.endpoint".into())));
        let s = Settings::parse("refiner.kind = scripted").unwrap();
        assert_eq!(s.backend("refiner"), Err(ConfigError::Missing("refiner.script".into())));
        assert!(matches!(Settings::parse("x"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(
            Settings::parse("generator.api_key = sk-123"),
            Err(ConfigError::InlineCredential(_))
        ));
        let s = Settings::parse("generator.kind = carrier-pigeon").unwrap();
        assert!(matches!(s.backend("generator"), Err(ConfigError::Invalid { .. })));
    }
}
