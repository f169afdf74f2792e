use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ChatBackend, ChatRequest, ChatResponse, LlmError};

/// One line of a script file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub tag: String,
    pub response: String,
    /// Only answers requests whose user prompt contains this text.
    #[serde(default, rename = "match", skip_serializing_if = "Option::is_none")]
    pub matches: Option<String>,
    /// Answers any number of times instead of once.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub repeat: bool,
}

impl ScriptEntry {
    pub fn once(tag: &str, response: &str) -> Self {
        Self {
            tag: tag.into(),
            response: response.into(),
            matches: None,
            repeat: false,
        }
    }

    pub fn repeating(tag: &str, response: &str) -> Self {
        Self {
            repeat: true,
            ..Self::once(tag, response)
        }
    }

    pub fn when(mut self, needle: &str) -> Self {
        self.matches = Some(needle.into());
        self
    }
}

/// Replays scripted responses: the first unused entry whose tag (and match
/// text, if any) fits the request.
#[derive(Debug)]
pub struct ScriptedBackend {
    name: String,
    entries: Vec<ScriptEntry>,
    used: Mutex<Vec<bool>>,
}

impl ScriptedBackend {
    pub fn new(name: &str, entries: Vec<ScriptEntry>) -> Self {
        let used = Mutex::new(vec![false; entries.len()]);
        Self {
            name: name.into(),
            entries,
            used,
        }
    }

    pub fn from_jsonl(name: &str, text: &str) -> Result<Self, LlmError> {
        let entries = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| LlmError::Script(format!("line {}: {e}", i + 1))))
            .collect::<Result<Vec<ScriptEntry>, _>>()?;
        Ok(Self::new(name, entries))
    }

    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path).map_err(|e| LlmError::Script(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().map_or("script".into(), |s| s.to_string_lossy().into_owned());
        Self::from_jsonl(&name, &text)
    }

    /// Entries not yet consumed.
    pub fn remaining(&self) -> usize {
        let used = self.used.lock().expect("script lock");
        self.entries.iter().zip(used.iter()).filter(|(e, u)| e.repeat || !**u).count()
    }
}

impl ChatBackend for ScriptedBackend {
    fn id(&self) -> String {
        format!("scripted:{}", self.name)
    }

    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let mut used = self.used.lock().expect("script lock");
        let hit = self.entries.iter().enumerate().find(|(i, e)| {
            e.tag == req.tag
                && (e.repeat || !used[*i])
                && e.matches.as_ref().is_none_or(|m| req.user_prompt.contains(m.as_str()))
        });
        match hit {
            Some((i, e)) => {
                used[i] = true;
                Ok(ChatResponse {
                    text: e.response.clone(),
                    latency: Duration::ZERO,
                    backend_id: self.id(),
                })
            }
            None => Err(LlmError::ScriptExhausted(req.tag.clone())),
        }
    }
}

type Responder = dyn Fn(&ChatRequest) -> Result<String, LlmError> + Send + Sync;

/// Backend computed by a closure.
pub struct FnBackend {
    name: String,
    f: Box<Responder>,
}

impl FnBackend {
    pub fn new(name: &str, f: impl Fn(&ChatRequest) -> Result<String, LlmError> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Box::new(f),
        }
    }
}

impl ChatBackend for FnBackend {
    fn id(&self) -> String {
        format!("fn:{}", self.name)
    }

    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        Ok(ChatResponse {
            text: (self.f)(req)?,
            latency: Duration::ZERO,
            backend_id: self.id(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(tag: &str, prompt: &str) -> ChatRequest {
        ChatRequest::new(tag, "sys", prompt)
    }

    #[test]
    fn replays_in_order_then_exhausts() {
        let b = ScriptedBackend::from_jsonl(
            "t",
            "{\"tag\":\"gen\",\"response\":\"one\"}\n\n{\"tag\":\"gen\",\"response\":\"two\"}\n",
        )
        .unwrap();
        assert_eq!(b.complete(&req("gen", "p")).unwrap().text, "one");
        assert_eq!(b.complete(&req("gen", "p")).unwrap().text, "two");
        assert_eq!(b.complete(&req("gen", "p")), Err(LlmError::ScriptExhausted("gen".into())));
        assert_eq!(b.complete(&req("other", "p")), Err(LlmError::ScriptExhausted("other".into())));
    }

    #[test]
    fn match_and_repeat() {
        let b = ScriptedBackend::new(
            "t",
            vec![
                ScriptEntry::once("r", "for-b").when("bravo"),
                ScriptEntry::repeating("r", "default"),
            ],
        );
        assert_eq!(b.complete(&req("r", "alpha")).unwrap().text, "default");
        assert_eq!(b.complete(&req("r", "x bravo")).unwrap().text, "for-b");
        assert_eq!(b.complete(&req("r", "x bravo")).unwrap().text, "default");
        assert_eq!(b.remaining(), 1);
    }

    #[test]
    fn identical_sequences_identical_answers() {
        let script = "{\"tag\":\"a\",\"response\":\"1\"}\n{\"tag\":\"b\",\"response\":\"2\"}\n{\"tag\":\"a\",\"response\":\"3\"}";
        let run = || {
            let b = ScriptedBackend::from_jsonl("t", script).unwrap();
            ["a", "b", "a"].map(|t| b.complete(&req(t, "")).unwrap().text)
        };
        assert_eq!(run(), run());
        assert_eq!(run(), ["1", "2", "3"]);
    }

    #[test]
    fn bad_script_line() {
        let err = ScriptedBackend::from_jsonl("t", "{\"tag\":1}").unwrap_err();
        assert!(matches!(err, LlmError::Script(m) if m.starts_with("line 1")));
    }

    #[test]
    fn closure_backend() {
        let b = FnBackend::new("echo", |r| Ok(r.user_prompt.to_uppercase()));
        assert_eq!(b.complete(&req("x", "hi")).unwrap().text, "HI");
        assert_eq!(b.id(), "fn:echo");
    }
}
