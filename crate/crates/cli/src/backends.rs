use std::path::PathBuf;

use clap::Args;
use nlstl_core::llm::{BackendConfig, ChatBackend, Settings};

use crate::exit::{io, usage, Failure};

/// Backend overrides shared by the commands that call a model.
#[derive(Debug, Args, Default, Clone)]
pub struct BackendFlags {
    /// Backend kind for every role (scripted or http).
    #[arg(long)]
    pub backend: Option<String>,
    /// Script file for every scripted role.
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long)]
    pub generator_script: Option<PathBuf>,
    #[arg(long)]
    pub refiner_script: Option<PathBuf>,
    /// Model name for every http role.
    #[arg(long)]
    pub model: Option<String>,
    /// Endpoint for every http role.
    #[arg(long)]
    pub endpoint: Option<String>,
}

/// Config file, then `NLSTL_*` environment, then flags.
pub fn settings(config: Option<&PathBuf>) -> Result<Settings, Failure> {
    let mut s = match config {
        Some(p) => Settings::parse(&crate::exit::read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => Settings::default(),
    };
    s.overlay_env(std::env::vars()).map_err(|e| usage(format!("environment: {e}")))?;
    Ok(s)
}

impl BackendFlags {
    pub fn apply(&self, s: &mut Settings, role: &str) -> Result<(), Failure> {
        let mut set = |k: &str, v: &str| s.set(&format!("{role}.{k}"), v).map_err(usage);
        if let Some(b) = &self.backend {
            set("kind", b)?;
        }
        if let Some(m) = &self.model {
            set("model", m)?;
        }
        if let Some(e) = &self.endpoint {
            set("endpoint", e)?;
        }
        let specific = match role {
            "generator" => self.generator_script.as_ref(),
            "refiner" => self.refiner_script.as_ref(),
            _ => None,
        };
        if let Some(p) = specific.or(self.script.as_ref()) {
            set("script", &p.to_string_lossy())?;
            if self.backend.is_none() && s.get(&format!("{role}.kind")).is_none() {
                s.set(&format!("{role}.kind"), "scripted").map_err(usage)?;
            }
        }
        Ok(())
    }

    pub fn build(&self, settings: &Settings, role: &str) -> Result<Box<dyn ChatBackend>, Failure> {
        let mut s = settings.clone();
        self.apply(&mut s, role)?;
        let cfg: BackendConfig = s.backend(role).map_err(usage)?;
        cfg.build().map_err(|e| io(format!("{role} backend: {e}")))
    }
}
