/// A `NL:`/`STL:` block recovered from model output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub nl: String,
    pub stl: String,
    pub domain: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedBlocks {
    pub blocks: Vec<Block>,
    /// Blocks that started but never completed (missing or empty half).
    pub dropped: usize,
}

enum Key {
    Nl,
    Stl,
    Domain,
}

/// Strips list markers, emphasis and quotes, then splits off a known key.
fn keyed(line: &str) -> Option<(Key, &str)> {
    let mut s = line.trim();
    s = s.trim_start_matches(|c: char| c.is_ascii_digit());
    s = s.trim_start_matches(['.', ')', '-', '*', '>', '#', ' ']);
    s = s.trim_start_matches("**");
    let (key, rest) = s.split_once(':')?;
    let key = key.trim().trim_matches('*').trim().to_ascii_lowercase();
    let rest = rest.trim_start_matches("**").trim();
    match key.as_str() {
        "nl" | "natural language" | "sentence" | "requirement" => Some((Key::Nl, rest)),
        "stl" | "formula" | "stl formula" => Some((Key::Stl, rest)),
        "domain" => Some((Key::Domain, rest)),
        _ => None,
    }
}

pub(crate) fn clean_formula(s: &str) -> String {
    s.trim().trim_matches(|c| c == '`' || c == '$').trim().to_string()
}

/// Reads blocks leniently: keys may be numbered, bulleted or bold, NL text
/// may wrap over several lines, and code fences are ignored.
pub fn parse_blocks(text: &str) -> ParsedBlocks {
    let mut out = ParsedBlocks::default();
    let mut nl: Option<String> = None;
    let mut domain: Option<String> = None;
    let mut in_nl = false;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            continue;
        }
        match keyed(line) {
            Some((Key::Nl, rest)) => {
                if nl.is_some() {
                    out.dropped += 1;
                }
                nl = Some(rest.to_string());
                in_nl = true;
            }
            Some((Key::Domain, rest)) => {
                domain = Some(rest.to_string());
                in_nl = false;
            }
            Some((Key::Stl, rest)) => {
                in_nl = false;
                let stl = clean_formula(rest);
                match nl.take() {
                    Some(n) if !n.trim().is_empty() && !stl.is_empty() => out.blocks.push(Block {
                        nl: n.trim().to_string(),
                        stl,
                        domain: domain.take().filter(|d| !d.is_empty()),
                    }),
                    _ => {
                        out.dropped += 1;
                        domain = None;
                    }
                }
            }
            None if in_nl && !line.trim().is_empty() => {
                let n = nl.get_or_insert_with(String::new);
                n.push(' ');
                n.push_str(line.trim());
            }
            None => in_nl = false,
        }
    }
    if nl.is_some() {
        out.dropped += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_clean_blocks() {
        let text = "NL: a one.\nSTL: G[0,1](x>0)\n\nNL: b two.\nSTL: F[0,2](y<1)\nNL: c.\nSTL: x > 2\n";
        let p = parse_blocks(text);
        assert_eq!(p.blocks.len(), 3);
        assert_eq!(p.dropped, 0);
        assert_eq!(p.blocks[1].nl, "b two.");
        assert_eq!(p.blocks[2].stl, "x > 2");
    }

    #[test]
    fn truncated_block_is_dropped() {
        let text = "NL: first\nSTL: x > 0\nNL: second\nSTL: y > 0\nNL: third but cut off";
        let p = parse_blocks(text);
        assert_eq!(p.blocks.len(), 2);
        assert_eq!(p.dropped, 1);
    }

    #[test]
    fn tolerant_formats() {
        let text = "Here you go:\n```\n1. **NL:** The arm\n   stays up.\n   **STL:** `G[0,5](h > 1)`\n- nl: Domain next\n  domain: robotics\n  stl: $F[0,1](z<0)$\n```\nSTL: orphan\nNL: empty formula\nSTL:   \n";
        let p = parse_blocks(text);
        assert_eq!(
            p.blocks,
            vec![
                Block {
                    nl: "The arm stays up.".into(),
                    stl: "G[0,5](h > 1)".into(),
                    domain: None
                },
                Block {
                    nl: "Domain next".into(),
                    stl: "F[0,1](z<0)".into(),
                    domain: Some("robotics".into())
                },
            ]
        );
        assert_eq!(p.dropped, 2);
    }

    #[test]
    fn prose_only() {
        assert_eq!(parse_blocks("I cannot help with that."), ParsedBlocks::default());
    }
}
