use std::io::{BufRead, Write};

use nlstl_core::dataset::{QueuedCandidate, ReviewDecision};

const CHECKS: &str = "  check: operators | values (thresholds, bounds) | syntax | semantics";

/// Terminal review over the queue. Keys: a accept, r reject (rest of the
/// line is the reason), s skip, q quit. Returns the decisions made.
pub fn interactive(
    queue: &[QueuedCandidate],
    reviewer: &str,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> std::io::Result<Vec<ReviewDecision>> {
    let mut decisions = Vec::new();
    let total = queue.len();
    'items: for (i, q) in queue.iter().enumerate() {
        writeln!(out, "\n[{}/{total}] {}  (round {}, domain {})", i + 1, q.pair.id, q.pair.round, q.pair.domain)?;
        writeln!(out, "  NL:  {}", q.pair.nl)?;
        writeln!(out, "  STL: {}", q.pair.stl)?;
        let nearest = q.nearest_id.as_deref().unwrap_or("-");
        writeln!(out, "  novelty: max ROUGE-L {:.3} (nearest {nearest})", q.novelty)?;
        writeln!(out, "{CHECKS}")?;
        loop {
            write!(out, "[a]ccept [r]eject [s]kip [q]uit > ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                break 'items;
            }
            let line = line.trim();
            let (key, rest) = line.split_at(line.chars().next().map_or(0, char::len_utf8));
            let mk = |d: ReviewDecision| ReviewDecision {
                reviewer: reviewer.to_string(),
                ..d
            };
            match key {
                "a" => decisions.push(mk(ReviewDecision::accept(&q.pair.id))),
                "r" => {
                    let mut d = mk(ReviewDecision::reject(&q.pair.id, rest.trim()));
                    if rest.trim().is_empty() {
                        d.reason = None;
                    }
                    decisions.push(d);
                }
                "s" => {}
                "q" => break 'items,
                _ => {
                    writeln!(out, "  unknown key {line:?}")?;
                    continue;
                }
            }
            break;
        }
    }
    Ok(decisions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlstl_core::dataset::Verdict;
    use nlstl_core::pair::NlStlPair;

    fn q(id: &str) -> QueuedCandidate {
        QueuedCandidate {
            pair: NlStlPair::new(id, "x stays positive", "G[0,1](x > 0)"),
            novelty: 0.2,
            nearest_id: Some("seed-001".into()),
        }
    }

    #[test]
    fn keys_map_to_decisions() {
        let queue = [q("c1"), q("c2"), q("c3"), q("c4"), q("c5")];
        let mut input = "a\nzz\nr bound too small\ns\nq\n".as_bytes();
        let mut out = Vec::new();
        let d = interactive(&queue, "ana", &mut input, &mut out).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].verdict, Verdict::Accept);
        assert_eq!(d[1].reason.as_deref(), Some("bound too small"));
        assert_eq!(d[1].reviewer, "ana");
        let shown = String::from_utf8(out).unwrap();
        assert!(shown.contains("unknown key \"zz\""));
        assert!(shown.contains("operators | values"));
        assert!(shown.contains("[4/5]") && !shown.contains("[5/5]"));
    }

    #[test]
    fn end_of_input_stops() {
        let mut input = "a\n".as_bytes();
        let d = interactive(&[q("c1"), q("c2")], "x", &mut input, &mut Vec::new()).unwrap();
        assert_eq!(d.len(), 1);
    }
}
