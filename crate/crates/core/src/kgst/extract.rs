use crate::dataset::clean_formula;
use crate::syntax::check_syntax;

const LABELS: [&str; 5] = ["stl:", "formula:", "stl formula:", "answer:", "corrected:"];

fn strip_label(line: &str) -> &str {
    let l = line.trim().trim_start_matches(['-', '*', '>']).trim();
    let lower = l.to_ascii_lowercase();
    for lab in LABELS {
        if lower.starts_with(lab) {
            return l[lab.len()..].trim();
        }
    }
    l
}

fn first_valid<'a>(lines: impl Iterator<Item = &'a str>) -> Option<String> {
    lines
        .map(|l| clean_formula(strip_label(l)))
        .find(|l| !l.is_empty() && check_syntax(l).is_ok())
}

/// First line of model output that is a well-formed formula, looking inside
/// code fences before the rest of the text.
pub fn extract_formula(text: &str) -> Option<String> {
    let mut fenced = Vec::new();
    let mut inside = false;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            inside = !inside;
            continue;
        }
        if inside {
            fenced.push(line);
        }
    }
    first_valid(fenced.into_iter()).or_else(|| first_valid(text.lines()))
}
