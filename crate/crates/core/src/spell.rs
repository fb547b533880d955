//! Frequency-guided spelling repair: single-codepoint confusion fixes and
//! restoration of missing word spaces, both scored against a lexicon of
//! attested words.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("lexicon error at line {line}: {msg}")]
pub struct LexiconParseError {
    pub line: usize,
    pub msg: String,
}

/// Word-frequency list. Absent words have count zero.
#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    counts: HashMap<String, u64>,
    total: u64,
}

impl Lexicon {
    pub fn new() -> Lexicon {
        Lexicon::default()
    }

    /// Parse `word<TAB>count` lines; duplicate words accumulate.
    pub fn parse(src: &str) -> Result<Lexicon, LexiconParseError> {
        let mut lexicon = Lexicon::new();
        for (line, raw) in src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        {
            let err = |msg: String| LexiconParseError { line, msg };
            let mut fields = raw.split('\t');
            let (Some(word), Some(count), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(err("expected word<TAB>count".into()));
            };
            let count: u64 = count.parse().map_err(|_| err(format!("bad count {count:?}")))?;
            lexicon.add(word, count);
        }
        Ok(lexicon)
    }

    pub fn add(&mut self, word: &str, count: u64) {
        if word.is_empty() || count == 0 {
            return;
        }
        *self.counts.entry(word.to_string()).or_insert(0) += count;
        self.total += count;
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Relative log-frequency, `None` for unattested words.
    fn log_prob(&self, word: &str) -> Option<f64> {
        let c = self.count(word);
        if c == 0 || self.total == 0 {
            None
        } else {
            Some((c as f64 / self.total as f64).ln())
        }
    }
}

/// Unordered pairs of codepoints that typists and OCR mix up.
#[derive(Clone, Debug, Default)]
pub struct ConfusionTable {
    pairs: HashSet<(char, char)>,
}

pub const EMBEDDED_CONFUSIONS: &str = include_str!("../data/confusions.tsv");

impl ConfusionTable {
    /// Parse `a<TAB>b` single-codepoint pairs; the relation is symmetric.
    pub fn parse(src: &str) -> Result<ConfusionTable, LexiconParseError> {
        let mut table = ConfusionTable::default();
        for (line, raw) in src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        {
            let err = |msg: String| LexiconParseError { line, msg };
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 2 {
                return Err(err("expected a<TAB>b".into()));
            }
            let single = |f: &str| -> Result<char, LexiconParseError> {
                let mut chars = f.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(err(format!("{f:?} is not a single codepoint"))),
                }
            };
            let a = single(fields[0])?;
            let b = single(fields[1])?;
            if a == b {
                return Err(err("pair of identical codepoints".into()));
            }
            table.pairs.insert((a, b));
            table.pairs.insert((b, a));
        }
        Ok(table)
    }

    /// The (deliberately empty) default shipped with the crate; projects add
    /// the pairs their source material actually needs.
    pub fn embedded() -> ConfusionTable {
        ConfusionTable::parse(EMBEDDED_CONFUSIONS).expect("embedded confusion table is valid")
    }

    pub fn alternatives(&self, c: char) -> impl Iterator<Item = char> + '_ {
        self.pairs.iter().filter(move |(a, _)| *a == c).map(|(_, b)| *b)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Repair a word by replacing at most one codepoint with a confusion-pair
/// alternative. Attested words are left alone; among attested candidates the
/// most frequent wins, ties going to the codepoint-lexicographically
/// smallest. Returns the input unchanged when nothing better is found.
pub fn correct_confusions(word: &str, lexicon: &Lexicon, confusions: &ConfusionTable) -> String {
    if word.is_empty() || lexicon.contains(word) || confusions.is_empty() {
        return word.to_string();
    }
    let chars: Vec<char> = word.chars().collect();
    let mut best: Option<(u64, String)> = None;
    for (i, &c) in chars.iter().enumerate() {
        for alt in confusions.alternatives(c) {
            let mut candidate = chars.clone();
            candidate[i] = alt;
            let candidate: String = candidate.into_iter().collect();
            let count = lexicon.count(&candidate);
            if count == 0 {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bc, bw)) => count > *bc || (count == *bc && candidate < *bw),
            };
            if better {
                best = Some((count, candidate));
            }
        }
    }
    best.map(|(_, w)| w).unwrap_or_else(|| word.to_string())
}

const MAX_RESTORED_PARTS: usize = 4;
const SCORE_TOLERANCE: f64 = 1e-9;

/// Split a run-together word into 2–4 attested parts, maximizing the summed
/// log-frequency. Near-ties go to the codepoint-lexicographically smallest
/// part sequence. `None` when the word is already attested or no qualifying
/// split exists.
pub fn restore_spaces(word: &str, lexicon: &Lexicon) -> Option<Vec<String>> {
    if lexicon.contains(word) {
        return None;
    }
    let chars: Vec<char> = word.chars().collect();
    if chars.len() < 2 {
        return None;
    }
    let mut candidates: Vec<(f64, Vec<String>)> = Vec::new();
    let mut parts: Vec<String> = Vec::new();
    fn recurse(
        chars: &[char],
        from: usize,
        lexicon: &Lexicon,
        parts: &mut Vec<String>,
        score: f64,
        candidates: &mut Vec<(f64, Vec<String>)>,
    ) {
        if from == chars.len() {
            if parts.len() >= 2 {
                candidates.push((score, parts.clone()));
            }
            return;
        }
        if parts.len() == MAX_RESTORED_PARTS {
            return;
        }
        for end in from + 1..=chars.len() {
            let piece: String = chars[from..end].iter().collect();
            if let Some(lp) = lexicon.log_prob(&piece) {
                parts.push(piece);
                recurse(chars, end, lexicon, parts, score + lp, candidates);
                parts.pop();
            }
        }
    }
    recurse(&chars, 0, lexicon, &mut parts, 0.0, &mut candidates);
    let best_score = candidates.iter().map(|(s, _)| *s).fold(f64::NEG_INFINITY, f64::max);
    candidates
        .into_iter()
        .filter(|(s, _)| *s >= best_score - SCORE_TOLERANCE)
        .map(|(_, parts)| parts)
        .min()
}
