//! N-gram bookkeeping over tokenized sentences: type/token tallies for the
//! corpus report, a mergeable count store for parallel runs, and an add-k
//! language-model probability over the collected counts.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

/// Counts of all n-grams up to a maximum order, collected sentence by
/// sentence (windows never cross a sentence boundary; no padding symbols).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NgramTable {
    /// `orders[n-1]` maps an n-token window to its occurrence count.
    orders: Vec<BTreeMap<Vec<String>, u64>>,
    sentence_count: u64,
    token_count: u64,
}

/// The model order the corpus pipeline uses throughout.
pub const DEFAULT_ORDER: usize = 3;

/// Count a whole corpus of tokenized sentences at the standard order
/// (unigrams through trigrams).
pub fn count_ngrams<S: AsRef<str>>(sentences: &[Vec<S>]) -> NgramTable {
    let mut table = NgramTable::new(DEFAULT_ORDER);
    for sentence in sentences {
        table.count_sentence(sentence);
    }
    table
}

impl NgramTable {
    pub fn new(max_order: usize) -> NgramTable {
        assert!(max_order >= 1, "need at least unigrams");
        NgramTable { orders: vec![BTreeMap::new(); max_order], sentence_count: 0, token_count: 0 }
    }

    pub fn max_order(&self) -> usize {
        self.orders.len()
    }

    pub fn sentence_count(&self) -> u64 {
        self.sentence_count
    }

    pub fn token_count(&self) -> u64 {
        self.token_count
    }

    /// Count one sentence's windows of every order.
    pub fn count_sentence<S: AsRef<str>>(&mut self, tokens: &[S]) {
        self.sentence_count += 1;
        self.token_count += tokens.len() as u64;
        for (i, map) in self.orders.iter_mut().enumerate() {
            let order = i + 1;
            if tokens.len() < order {
                continue;
            }
            for window in tokens.windows(order) {
                let key: Vec<String> = window.iter().map(|t| t.as_ref().to_string()).collect();
                *map.entry(key).or_insert(0) += 1;
            }
        }
    }

    /// Fold another table (over a disjoint slice of the corpus) into this
    /// one. Merging is associative and commutative, so any partition of the
    /// corpus gives the same table.
    pub fn merge(&mut self, other: &NgramTable) {
        assert_eq!(self.max_order(), other.max_order(), "order mismatch");
        self.sentence_count += other.sentence_count;
        self.token_count += other.token_count;
        for (mine, theirs) in self.orders.iter_mut().zip(&other.orders) {
            for (key, count) in theirs {
                *mine.entry(key.clone()).or_insert(0) += count;
            }
        }
    }

    pub fn distinct(&self, order: usize) -> u64 {
        self.orders.get(order - 1).map_or(0, |m| m.len() as u64)
    }

    pub fn occurrences(&self, order: usize, ngram: &[&str]) -> u64 {
        let key: Vec<String> = ngram.iter().map(|t| t.to_string()).collect();
        self.orders.get(order - 1).and_then(|m| m.get(&key)).copied().unwrap_or(0)
    }

    pub fn ngrams(&self, order: usize) -> impl Iterator<Item = (&[String], u64)> {
        self.orders
            .get(order - 1)
            .into_iter()
            .flat_map(|m| m.iter().map(|(k, v)| (k.as_slice(), *v)))
    }

    /// Distinct unigrams: the vocabulary the language model smooths over.
    pub fn vocabulary_size(&self) -> u64 {
        self.distinct(1)
    }

    /// Total occurrences of windows beginning with `history` at order
    /// `history.len() + 1` — the denominator mass of the conditional
    /// distribution after that history.
    fn continuation_total(&self, history: &[String]) -> u64 {
        let order = history.len() + 1;
        let Some(map) = self.orders.get(order - 1) else {
            return 0;
        };
        if history.is_empty() {
            return map.values().sum();
        }
        map.range(history.to_vec()..)
            .take_while(|(key, _)| key.starts_with(history))
            .map(|(_, count)| count)
            .sum()
    }

    /// Add-k conditional log-probability `ln P(word | history)`:
    ///
    /// `P(w | h) = (c(h·w) + k) / (Σ_w' c(h·w') + k · (V + 1))`
    ///
    /// where `V` is the vocabulary size; the `+ 1` reserves mass for an
    /// unseen word, so the probabilities over the vocabulary plus one
    /// out-of-vocabulary event sum to exactly 1. Only the last
    /// `max_order - 1` history tokens are used (shorter histories — e.g. at
    /// a sentence start — simply condition on what there is). With `k = 0`
    /// this is maximum likelihood and unseen events are `-inf`.
    pub fn conditional_logprob(&self, history: &[&str], word: &str, k: f64) -> f64 {
        assert!(k >= 0.0, "negative smoothing");
        assert!(k == 0.0 || self.vocabulary_size() > 0, "smoothing needs a nonempty vocabulary");
        let keep = history.len().min(self.max_order() - 1);
        let history: Vec<String> =
            history[history.len() - keep..].iter().map(|t| t.to_string()).collect();
        let mut key = history.clone();
        key.push(word.to_string());
        let joint = self.orders[key.len() - 1].get(&key).copied().unwrap_or(0);
        let total = self.continuation_total(&history);
        let numerator = joint as f64 + k;
        let denominator = total as f64 + k * (self.vocabulary_size() as f64 + 1.0);
        if numerator == 0.0 || denominator == 0.0 {
            return f64::NEG_INFINITY;
        }
        (numerator / denominator).ln()
    }

    /// Log-probability of a whole sentence: the sum over positions of
    /// `ln P(wᵢ | wᵢ₋₂ wᵢ₋₁)`, each position conditioning on as much of its
    /// in-sentence history as the model order allows (the first word on
    /// nothing, the second on one word). Empty sentences score 0.
    pub fn lm_logprob(&self, sentence: &[&str], k: f64) -> f64 {
        sentence
            .iter()
            .enumerate()
            .map(|(i, word)| self.conditional_logprob(&sentence[..i], word, k))
            .sum()
    }

    /// Corpus-level type and token tallies.
    pub fn report(&self) -> CorpusReport {
        CorpusReport {
            sentences: self.sentence_count,
            tokens: self.token_count,
            distinct: (1..=self.max_order()).map(|o| self.distinct(o)).collect(),
        }
    }

    /// Dump every count as `order<TAB>tokens<TAB>count`, tokens separated by
    /// single spaces, sorted by order then n-gram.
    pub fn write_counts<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (i, map) in self.orders.iter().enumerate() {
            for (key, count) in map {
                writeln!(w, "{}\t{}\t{}", i + 1, key.join(" "), count)?;
            }
        }
        Ok(())
    }
}

/// The summary table a corpus run prints: sentence and token totals plus
/// distinct-type counts per n-gram order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusReport {
    pub sentences: u64,
    pub tokens: u64,
    /// `distinct[n-1]` = number of distinct n-grams.
    pub distinct: Vec<u64>,
}

fn order_label(order: usize) -> String {
    match order {
        1 => "Unigrams".to_string(),
        2 => "Bigrams".to_string(),
        3 => "Trigrams".to_string(),
        n => format!("{n}-grams"),
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Sentences\t{}", self.sentences)?;
        writeln!(f, "Tokens\t{}", self.tokens)?;
        for (i, d) in self.distinct.iter().enumerate() {
            writeln!(f, "{}\t{}", order_label(i + 1), d)?;
        }
        Ok(())
    }
}
