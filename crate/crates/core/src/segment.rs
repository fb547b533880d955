//! Sentence splitting and whitespace tokenization.
//!
//! Sentences end at a configurable boundary set (by default the full stop
//! `።` and the question mark); material after the last boundary is dropped,
//! not silently attached, and the count of dropped fragments is reported.

use std::collections::BTreeSet;

/// A whitespace-delimited token with its codepoint offset into the sentence
/// text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    /// The sentence body, trimmed, without its terminator.
    pub text: String,
    pub terminator: char,
    pub tokens: Vec<Token>,
}

#[derive(Clone, Debug)]
pub struct SegmentOptions {
    pub boundaries: BTreeSet<char>,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions { boundaries: BTreeSet::from(['።', '?']) }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SegmentOutcome {
    pub sentences: Vec<Sentence>,
    /// Non-empty trailing spans that had no terminator (0 or 1 per call).
    pub dropped_fragments: usize,
}

/// Split text into whitespace-delimited tokens, remembering where each one
/// started.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push(Token { text: std::mem::take(&mut current), offset: start });
            }
        } else {
            if current.is_empty() {
                start = i;
            }
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(Token { text: current, offset: start });
    }
    tokens
}

/// Split a document into terminated sentences. A sentence with no tokens
/// (two adjacent terminators) is kept; callers that want a minimum length
/// filter afterwards.
pub fn split_sentences(text: &str, options: &SegmentOptions) -> SegmentOutcome {
    let mut outcome = SegmentOutcome::default();
    let mut span = String::new();
    for c in text.chars() {
        if options.boundaries.contains(&c) {
            let body = span.trim().to_string();
            let tokens = tokenize(&body);
            outcome.sentences.push(Sentence { text: body, terminator: c, tokens });
            span.clear();
        } else {
            span.push(c);
        }
    }
    if !span.trim().is_empty() {
        outcome.dropped_fragments += 1;
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn splits_on_default_boundaries() {
        let out = split_sentences("ልጁ መጣ። ማን ነው? ግን", &SegmentOptions::default());
        assert_eq!(out.sentences.len(), 2);
        assert_eq!(out.sentences[0].text, "ልጁ መጣ");
        assert_eq!(out.sentences[0].terminator, '።');
        assert_eq!(out.sentences[1].text, "ማን ነው");
        assert_eq!(out.sentences[1].terminator, '?');
        assert_eq!(out.dropped_fragments, 1);
    }

    #[test]
    fn exclamation_is_not_a_boundary_by_default() {
        let out = split_sentences("ሂድ! ና።", &SegmentOptions::default());
        assert_eq!(out.sentences.len(), 1);
        assert_eq!(out.sentences[0].text, "ሂድ! ና");
    }

    #[test]
    fn custom_boundaries() {
        let options = SegmentOptions { boundaries: BTreeSet::from(['።', '?', '!']) };
        let out = split_sentences("ሂድ! ና።", &options);
        assert_eq!(out.sentences.len(), 2);
    }

    #[test]
    fn empty_sentences_are_kept() {
        let out = split_sentences("። ሀ።", &SegmentOptions::default());
        assert_eq!(out.sentences.len(), 2);
        assert!(out.sentences[0].tokens.is_empty());
        assert_eq!(out.sentences[1].tokens.len(), 1);
        assert_eq!(out.dropped_fragments, 0);
    }

    #[test]
    fn token_offsets_are_codepoint_positions() {
        let tokens = tokenize("ሰላም  ነው");
        assert_eq!(tokens.len(), 2);
        assert_eq!(tokens[0], Token { text: "ሰላም".into(), offset: 0 });
        assert_eq!(tokens[1], Token { text: "ነው".into(), offset: 5 });
    }

    proptest! {
        #[test]
        fn tokens_are_faithful_slices(s in "[ \tሀሁላም።a-z?]{0,40}") {
            let chars: Vec<char> = s.chars().collect();
            for token in tokenize(&s) {
                let len = token.text.chars().count();
                prop_assert!(len > 0);
                prop_assert!(!token.text.chars().any(char::is_whitespace));
                let slice: String =
                    chars[token.offset..token.offset + len].iter().collect();
                prop_assert_eq!(&slice, &token.text);
            }
        }

        #[test]
        fn every_input_token_lands_in_a_sentence_or_the_dropped_tail(
            s in "[ ሀሁ።?x]{0,40}"
        ) {
            let options = SegmentOptions::default();
            let out = split_sentences(&s, &options);
            let stripped: String =
                s.chars().map(|c| if options.boundaries.contains(&c) { ' ' } else { c }).collect();
            let total: usize = tokenize(&stripped).len();
            let in_sentences: usize = out.sentences.iter().map(|sn| sn.tokens.len()).sum();
            prop_assert!(in_sentences <= total);
            if out.dropped_fragments == 0 {
                prop_assert_eq!(in_sentences, total);
            }
        }
    }
}
