//! Small data files shipped with the crate.

/// 31 samples at 1 s where every high-speed sample is followed by low rpm.
pub const RESPONSE_SATISFYING_CSV: &str = include_str!("../data/response_ok.csv");
/// Same speed profile, but rpm never drops after the first speed peak.
pub const RESPONSE_VIOLATING_CSV: &str = include_str!("../data/response_violated.csv");

/// Forty hand-written pairs over driving, robotics, electronics and
/// miscellaneous domains, one JSON object per line.
pub const SEED_PAIRS_JSONL: &str = include_str!("../data/seeds.jsonl");

pub fn seed_pairs() -> Vec<crate::pair::NlStlPair> {
    crate::pair::read_jsonl(SEED_PAIRS_JSONL).expect("bundled seeds are valid JSON Lines")
}
