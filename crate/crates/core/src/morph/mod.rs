//! Morphological analysis: romanize a token, run it through the transducer
//! cascade, and read tag sequences back as segmented, feature-annotated
//! analyses.

mod grammar;
mod lexical;
pub mod template;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use grammar::{AffixEntry, Grammar, GrammarParseError, Lexeme, Slot, EMBEDDED_GRAMMAR};

use crate::ethiopic::{char_class, CharClass};
use crate::fst::{FeatureStructure, Fst};
use crate::segment::Sentence;
use crate::sera::{to_sera, SeraTable, EMBEDDED_SERA};
use lexical::{build_cascade, parse_tag, PrefixMode, Tag};

/// Part-of-speech tags. The last three are assigned by the analyzer itself:
/// gazetteer names, punctuation, and unanalyzable tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosTag {
    N,
    V,
    Adj,
    NAdj,
    Pron,
    Num,
    Adv,
    Conj,
    Adp,
    Int,
    NmPrs,
    Pun,
    Unc,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::N => "N",
            PosTag::V => "V",
            PosTag::Adj => "ADJ",
            PosTag::NAdj => "NADJ",
            PosTag::Pron => "PRON",
            PosTag::Num => "NUM",
            PosTag::Adv => "ADV",
            PosTag::Conj => "CONJ",
            PosTag::Adp => "ADP",
            PosTag::Int => "INT",
            PosTag::NmPrs => "NM_PRS",
            PosTag::Pun => "PUN",
            PosTag::Unc => "UNC",
        }
    }

    /// Stems that take the nominal affix pattern.
    pub fn is_nominal(self) -> bool {
        matches!(self, PosTag::N | PosTag::NAdj | PosTag::Adj | PosTag::Pron | PosTag::Num)
    }

    /// Uninflecting words.
    pub fn is_particle(self) -> bool {
        matches!(self, PosTag::Adv | PosTag::Conj | PosTag::Adp | PosTag::Int)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosTag {
    type Err = ();

    fn from_str(s: &str) -> Result<PosTag, ()> {
        Ok(match s {
            "N" => PosTag::N,
            "V" => PosTag::V,
            "ADJ" => PosTag::Adj,
            "NADJ" => PosTag::NAdj,
            "PRON" => PosTag::Pron,
            "NUM" => PosTag::Num,
            "ADV" => PosTag::Adv,
            "CONJ" => PosTag::Conj,
            "ADP" => PosTag::Adp,
            "INT" => PosTag::Int,
            "NM_PRS" => PosTag::NmPrs,
            "PUN" => PosTag::Pun,
            "UNC" => PosTag::Unc,
            _ => return Err(()),
        })
    }
}

/// One segmented morpheme of an analysis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Morpheme {
    Affix { form: String, label: String },
    Stem { citation: String, glosses: Vec<String> },
}

/// One reading of a token.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MorphAnalysis {
    pub pos: PosTag,
    pub morphemes: Vec<Morpheme>,
    pub features: FeatureStructure,
    /// The romanized form the analysis was computed over.
    pub sera: String,
}

/// Render morphemes the way the corpus annotation writes them:
/// `be (prep)-{yh}` / `{ktt+te1a2_e3} (prf, recip, pas)-e (sb=3sm)`.
pub fn format_morphemes(morphemes: &[Morpheme]) -> String {
    morphemes
        .iter()
        .map(|m| match m {
            Morpheme::Affix { form, label } => format!("{form} ({label})"),
            Morpheme::Stem { citation, glosses } => {
                if glosses.is_empty() {
                    format!("{{{citation}}}")
                } else {
                    format!("{{{citation}}} ({})", glosses.join(", "))
                }
            }
        })
        .collect::<Vec<_>>()
        .join("-")
}

impl Grammar {
    /// Pick the reading to annotate with: fewest morphemes, then the best
    /// attested stem, then the lexicographically smallest rendering. The
    /// result does not depend on input order.
    pub fn select_analysis<'a>(&self, analyses: &'a [MorphAnalysis]) -> Option<&'a MorphAnalysis> {
        let stem_count = |a: &MorphAnalysis| -> u64 {
            a.morphemes
                .iter()
                .find_map(|m| match m {
                    Morpheme::Stem { citation, .. } => Some(self.citation_count(citation)),
                    Morpheme::Affix { .. } => None,
                })
                .unwrap_or(0)
        };
        analyses.iter().min_by(|a, b| {
            a.morphemes
                .len()
                .cmp(&b.morphemes.len())
                .then_with(|| stem_count(b).cmp(&stem_count(a)))
                .then_with(|| format_morphemes(&a.morphemes).cmp(&format_morphemes(&b.morphemes)))
                .then_with(|| a.cmp(b))
        })
    }
}

/// Where an empty result came from, for corpus triage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalysisDiagnostics {
    /// How many readings the token would have under a longer proclitic chain
    /// than the grammar's pattern allows. Nonzero only when the strict
    /// pattern found nothing.
    pub pruned_by_prefix_cap: usize,
    /// The token could not be romanized at all.
    pub romanization_failed: bool,
}

/// A sentence with one selected reading per token; the terminator is carried
/// as a final punctuation word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub words: Vec<(String, MorphAnalysis)>,
    pub source: Sentence,
}

/// A compiled analyzer: grammar, romanization table, and the transducer
/// cascade (plus a relaxed-proclitic probe used only for diagnostics).
pub struct Analyzer {
    grammar: Grammar,
    table: SeraTable,
    cascade: Fst,
    probe: Fst,
}

impl Analyzer {
    pub fn new(grammar: Grammar, table: SeraTable) -> Analyzer {
        let cascade = build_cascade(&grammar, &table, PrefixMode::Standard);
        let probe = build_cascade(&grammar, &table, PrefixMode::Probe);
        Analyzer { grammar, table, cascade, probe }
    }

    /// Analyzer over the embedded grammar and romanization table.
    pub fn embedded() -> Analyzer {
        Analyzer::new(
            Grammar::embedded().clone(),
            SeraTable::parse(EMBEDDED_SERA).expect("embedded romanization table is valid"),
        )
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn sera_table(&self) -> &SeraTable {
        &self.table
    }

    fn run(&self, fst: &Fst, sera: &str) -> BTreeSet<MorphAnalysis> {
        let symbols: Vec<String> = sera.chars().map(String::from).collect();
        let symbol_refs: Vec<&str> = symbols.iter().map(String::as_str).collect();
        let Ok(transductions) = fst.transduce(&symbol_refs) else {
            return BTreeSet::new();
        };
        transductions
            .into_iter()
            .filter_map(|t| self.analysis_from_tags(&t.output, t.weight, sera))
            .collect()
    }

    fn analysis_from_tags(
        &self,
        tags: &[String],
        features: FeatureStructure,
        sera: &str,
    ) -> Option<MorphAnalysis> {
        let mut morphemes = Vec::new();
        let mut pos = None;
        for tag in tags {
            match parse_tag(tag)? {
                Tag::Stem(i) => {
                    let lexeme = self.grammar.lexemes().get(i)?;
                    pos = Some(lexeme.pos);
                    morphemes.push(Morpheme::Stem {
                        citation: lexeme.citation.clone(),
                        glosses: lexeme.glosses.clone(),
                    });
                }
                Tag::Affix(i) => {
                    let affix = self.grammar.affixes().get(i)?;
                    morphemes.push(Morpheme::Affix {
                        form: affix.display.clone(),
                        label: affix.label.clone(),
                    });
                }
            }
        }
        Some(MorphAnalysis { pos: pos?, morphemes, features, sera: sera.to_string() })
    }

    fn unanalyzed(&self, surface: &str, sera: &str) -> MorphAnalysis {
        MorphAnalysis {
            pos: PosTag::Unc,
            morphemes: vec![Morpheme::Stem { citation: surface.to_string(), glosses: vec![] }],
            features: FeatureStructure::top(),
            sera: sera.to_string(),
        }
    }

    /// All cascade readings of an already-romanized token; no fallbacks.
    pub fn cascade_analyses(&self, sera: &str) -> Vec<MorphAnalysis> {
        self.run(&self.cascade, sera).into_iter().collect()
    }

    /// Analyze a surface token (syllabic script, or already romanized —
    /// romanization passes ASCII through). Always returns at least one
    /// analysis; tokens nothing else covers come back as [`PosTag::Unc`].
    pub fn analyze(&self, surface: &str) -> Vec<MorphAnalysis> {
        self.analyze_with_diagnostics(surface).0
    }

    pub fn analyze_with_diagnostics(
        &self,
        surface: &str,
    ) -> (Vec<MorphAnalysis>, AnalysisDiagnostics) {
        let mut diagnostics = AnalysisDiagnostics::default();
        let sera = match to_sera(surface, &self.table) {
            Ok(s) => s,
            Err(_) => {
                diagnostics.romanization_failed = true;
                return (vec![self.unanalyzed(surface, surface)], diagnostics);
            }
        };
        if self.grammar.in_gazetteer(&sera) {
            let analysis = MorphAnalysis {
                pos: PosTag::NmPrs,
                morphemes: vec![Morpheme::Stem { citation: sera.clone(), glosses: vec![] }],
                features: FeatureStructure::top(),
                sera,
            };
            return (vec![analysis], diagnostics);
        }
        let analyses = self.run(&self.cascade, &sera);
        if !analyses.is_empty() {
            return (analyses.into_iter().collect(), diagnostics);
        }
        diagnostics.pruned_by_prefix_cap = self.run(&self.probe, &sera).len();
        (vec![self.unanalyzed(surface, &sera)], diagnostics)
    }

    /// The reading of a token that is pure punctuation.
    fn punctuation_word(&self, surface: &str) -> MorphAnalysis {
        let sera = to_sera(surface, &self.table).unwrap_or_else(|_| surface.to_string());
        MorphAnalysis {
            pos: PosTag::Pun,
            morphemes: vec![Morpheme::Stem { citation: sera.clone(), glosses: vec![] }],
            features: FeatureStructure::top(),
            sera,
        }
    }

    /// The single reading a corpus annotation carries: punctuation tokens
    /// become [`PosTag::Pun`], everything else goes through [`Self::analyze`]
    /// and [`Grammar::select_analysis`].
    pub fn tag_token(&self, surface: &str) -> MorphAnalysis {
        let is_punct =
            !surface.is_empty() && surface.chars().all(|c| char_class(c) == CharClass::Punct);
        if is_punct {
            return self.punctuation_word(surface);
        }
        let analyses = self.analyze(surface);
        self.grammar
            .select_analysis(&analyses)
            .cloned()
            .expect("analyze always returns at least one reading")
    }

    /// Tag every token of a segmented sentence and append the terminator as a
    /// punctuation word, so the output is one word longer than the token
    /// list.
    pub fn tag_sentence(&self, sentence: &Sentence) -> TaggedSentence {
        let mut words: Vec<(String, MorphAnalysis)> = Vec::with_capacity(sentence.tokens.len() + 1);
        for token in &sentence.tokens {
            words.push((token.text.clone(), self.tag_token(&token.text)));
        }
        let terminator = sentence.terminator.to_string();
        let tagged = self.punctuation_word(&terminator);
        words.push((terminator, tagged));
        TaggedSentence { words, source: sentence.clone() }
    }
}
