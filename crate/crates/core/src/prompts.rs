//! Prompt templates. Each file holds the system prompt, a line `---`, then
//! the user prompt with `{placeholder}` slots:
//!
//! | file              | placeholders                        |
//! |-------------------|-------------------------------------|
//! | `evolution.txt`   | `exemplars`, `count`                |
//! | `generate.txt`    | `nl`                                |
//! | `in_context.txt`  | `nl`, `references`                  |
//! | `refine.txt`      | `nl`, `preliminary`, `references`   |
//! | `feedback.txt`    | `nl`, `preliminary`                 |
//! | `self_refine.txt` | `nl`, `preliminary`, `feedback`     |

use std::collections::BTreeMap;
use std::path::Path;

use crate::llm::ChatRequest;
use crate::pair::NlStlPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PromptKind {
    Evolution,
    Generate,
    InContext,
    Refine,
    Feedback,
    SelfRefine,
}

impl PromptKind {
    pub const ALL: [PromptKind; 6] = [
        PromptKind::Evolution,
        PromptKind::Generate,
        PromptKind::InContext,
        PromptKind::Refine,
        PromptKind::Feedback,
        PromptKind::SelfRefine,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            PromptKind::Evolution => "evolution.txt",
            PromptKind::Generate => "generate.txt",
            PromptKind::InContext => "in_context.txt",
            PromptKind::Refine => "refine.txt",
            PromptKind::Feedback => "feedback.txt",
            PromptKind::SelfRefine => "self_refine.txt",
        }
    }

    /// Request tag; scripted backends key on it.
    pub fn tag(self) -> &'static str {
        match self {
            PromptKind::Evolution => "evolve",
            PromptKind::Generate => "generate",
            PromptKind::InContext => "in-context",
            PromptKind::Refine => "refine",
            PromptKind::Feedback => "feedback",
            PromptKind::SelfRefine => "self-refine",
        }
    }

    pub fn placeholders(self) -> &'static [&'static str] {
        match self {
            PromptKind::Evolution => &["exemplars", "count"],
            PromptKind::Generate => &["nl"],
            PromptKind::InContext => &["nl", "references"],
            PromptKind::Refine => &["nl", "preliminary", "references"],
            PromptKind::Feedback => &["nl", "preliminary"],
            PromptKind::SelfRefine => &["nl", "preliminary", "feedback"],
        }
    }

    fn builtin(self) -> &'static str {
        match self {
            PromptKind::Evolution => include_str!("../prompts/evolution.txt"),
            PromptKind::Generate => include_str!("../prompts/generate.txt"),
            PromptKind::InContext => include_str!("../prompts/in_context.txt"),
            PromptKind::Refine => include_str!("../prompts/refine.txt"),
            PromptKind::Feedback => include_str!("../prompts/feedback.txt"),
            PromptKind::SelfRefine => include_str!("../prompts/self_refine.txt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("{file}: missing '---' line between system and user prompt")]
    NoSeparator { file: String },
    #[error("{file}: unknown placeholder {{{name}}}")]
    UnknownPlaceholder { file: String, name: String },
    #[error("no value for placeholder {{{0}}}")]
    MissingValue(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub system: String,
    pub user: String,
}

enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str),
}

fn pieces(text: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let name_len = after
            .find(|c: char| !(c.is_ascii_lowercase() || c == '_'))
            .unwrap_or(after.len());
        if name_len > 0 && after[name_len..].starts_with('}') {
            out.push(Piece::Text(&rest[..open]));
            out.push(Piece::Slot(&after[..name_len]));
            rest = &after[name_len + 1..];
        } else {
            out.push(Piece::Text(&rest[..=open]));
            rest = after;
        }
    }
    out.push(Piece::Text(rest));
    out
}

impl PromptTemplate {
    pub fn parse(file: &str, text: &str, allowed: &[&str]) -> Result<Self, PromptError> {
        let (system, user) = text
            .split_once("\n---\n")
            .ok_or_else(|| PromptError::NoSeparator { file: file.into() })?;
        for p in pieces(system).into_iter().chain(pieces(user)) {
            if let Piece::Slot(name) = p {
                if !allowed.contains(&name) {
                    return Err(PromptError::UnknownPlaceholder {
                        file: file.into(),
                        name: name.into(),
                    });
                }
            }
        }
        Ok(Self {
            system: system.trim().to_string(),
            user: user.trim().to_string(),
        })
    }

    /// Substitutes every slot in one pass; inserted values are not rescanned.
    pub fn render(&self, vars: &BTreeMap<&str, String>) -> Result<(String, String), PromptError> {
        let fill = |text: &str| -> Result<String, PromptError> {
            let mut out = String::with_capacity(text.len());
            for p in pieces(text) {
                match p {
                    Piece::Text(t) => out.push_str(t),
                    Piece::Slot(name) => out.push_str(
                        vars.get(name)
                            .ok_or_else(|| PromptError::MissingValue(name.into()))?,
                    ),
                }
            }
            Ok(out)
        };
        Ok((fill(&self.system)?, fill(&self.user)?))
    }
}

/// All templates, built in or overridden from a directory.
#[derive(Debug, Clone)]
pub struct PromptSet {
    templates: BTreeMap<PromptKind, PromptTemplate>,
}

impl Default for PromptSet {
    fn default() -> Self {
        let templates = PromptKind::ALL
            .iter()
            .map(|&k| {
                let t = PromptTemplate::parse(k.file_name(), k.builtin(), k.placeholders())
                    .expect("built-in prompt is well formed");
                (k, t)
            })
            .collect();
        Self { templates }
    }
}

impl PromptSet {
    /// Built-in templates with any same-named files in `dir` taking over.
    pub fn load_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut set = Self::default();
        for k in PromptKind::ALL {
            let path = dir.join(k.file_name());
            if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| PromptError::Io(format!("{}: {e}", path.display())))?;
                set.templates
                    .insert(k, PromptTemplate::parse(k.file_name(), &text.replace("\r\n", "\n"), k.placeholders())?);
            }
        }
        Ok(set)
    }

    pub fn get(&self, kind: PromptKind) -> &PromptTemplate {
        &self.templates[&kind]
    }

    pub fn request(&self, kind: PromptKind, vars: &[(&str, String)]) -> Result<ChatRequest, PromptError> {
        let map: BTreeMap<&str, String> = vars.iter().cloned().collect();
        let (system, user) = self.get(kind).render(&map)?;
        Ok(ChatRequest::new(kind.tag(), system, user))
    }
}

/// Numbered `NL:`/`STL:` listing of pairs, as embedded in prompts.
pub fn format_pairs(pairs: &[NlStlPair]) -> String {
    pairs
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{}.\nNL: {}\nSTL: {}", i + 1, p.nl, p.stl))
        .collect::<Vec<_>>()
        .join("\n\n")
}
