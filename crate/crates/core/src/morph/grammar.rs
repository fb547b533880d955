//! The analyzer's grammar file: a lexicon of stems, an affix inventory with
//! slot assignments, and a gazetteer of proper names, all in romanized form.
//!
//! ```text
//! [lexicon]
//! # form<TAB>pos<TAB>root+template?   (then optional key=value fields:
//! #                                    cite=, gloss=a|b, feat=[...], count=N)
//! tekatet	V	ktt+te1a2_e3	gloss=prf|recip|pas	feat=[asp:prf]	count=12
//! zihu	PRON	cite=yh	count=40
//! zrzr	N
//!
//! [affixes]
//! # form<TAB>slot<TAB>label<TAB>features   (label/features optional; then
//! #                                         optional surface=... override)
//! be	prep	prep	[]
//! e	vsuf	sb=3sm	[asp:prf,sb:[p:3,n:sg,g:m]]
//! al	vneg1	neg1	[]	surface='al
//!
//! [gazetteer]
//! 'ityoPya
//! ```
//!
//! Verbs carry a `root+template` third field; their citation form is that
//! pair and their matched form is the template expansion (gemination markers
//! included). In affix lines a field starting with `[` is the feature
//! structure, a `surface=` field overrides the matched string (the displayed
//! form stays the first field), and any other bare field is the label.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::sync::LazyLock;

use thiserror::Error;

use crate::fst::FeatureStructure;
use crate::morph::template::{expand_template, orthographic_surface};
use crate::morph::PosTag;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("grammar error at line {line}: {msg}")]
pub struct GrammarParseError {
    pub line: usize,
    pub msg: String,
}

/// Affix position in the word pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    /// Prepositional proclitic on nominals.
    Prep,
    /// Genitive proclitic on nominals.
    Gen,
    /// Definiteness suffix on nominals.
    Def,
    /// Conjunctive suffix on nominals.
    NounConj,
    /// Subject-agreement prefix on verbs.
    VerbPrefix,
    /// Subject-agreement suffix on verbs.
    VerbSuffix,
    /// Auxiliary ending on verbs.
    Aux,
    /// First half of the negation circumfix (prefix).
    Neg1,
    /// Second half of the negation circumfix (final suffix).
    Neg2,
}

impl Slot {
    fn parse(s: &str) -> Option<Slot> {
        Some(match s {
            "prep" => Slot::Prep,
            "gen" => Slot::Gen,
            "def" => Slot::Def,
            "ncnj" => Slot::NounConj,
            "vpre" => Slot::VerbPrefix,
            "vsuf" => Slot::VerbSuffix,
            "aux" => Slot::Aux,
            "vneg1" => Slot::Neg1,
            "vneg2" => Slot::Neg2,
            _ => return None,
        })
    }

    fn default_label(self) -> &'static str {
        match self {
            Slot::Prep => "prep",
            Slot::Gen => "gen",
            Slot::Def => "def",
            Slot::NounConj => "cnj",
            Slot::VerbPrefix | Slot::VerbSuffix => "sb",
            Slot::Aux => "aux",
            Slot::Neg1 => "neg1",
            Slot::Neg2 => "neg2",
        }
    }
}

/// One stem. `surface` is the romanized orthographic spelling, `match_form`
/// the lexical spelling the analyzer matches (it may carry gemination
/// markers), and `citation` the form shown in braces in the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexeme {
    pub surface: String,
    pub citation: String,
    pub match_form: String,
    pub pos: PosTag,
    pub glosses: Vec<String>,
    pub features: FeatureStructure,
    /// Attestation count used to rank competing analyses.
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffixEntry {
    pub display: String,
    pub surface: String,
    pub slot: Slot,
    pub label: String,
    pub features: FeatureStructure,
}

#[derive(Clone, Debug, Default)]
pub struct Grammar {
    lexemes: Vec<Lexeme>,
    affixes: Vec<AffixEntry>,
    gazetteer: BTreeSet<String>,
}

pub const EMBEDDED_GRAMMAR: &str = include_str!("../../data/grammar.txt");

static DEFAULT_GRAMMAR: LazyLock<Grammar> =
    LazyLock::new(|| Grammar::parse(EMBEDDED_GRAMMAR).expect("embedded grammar is valid"));

/// Collect a `key=value` field whose key is in `allowed`, erroring on
/// duplicates. Returns `Ok(false)` for a field that is not a known option so
/// the caller can interpret it positionally.
fn take_option(
    line: usize,
    field: &str,
    allowed: &[&str],
    options: &mut HashMap<String, String>,
) -> Result<bool, GrammarParseError> {
    let Some((key, value)) = field.split_once('=') else {
        return Ok(false);
    };
    if !allowed.contains(&key) {
        return Ok(false);
    }
    if options.insert(key.to_string(), value.to_string()).is_some() {
        return Err(GrammarParseError { line, msg: format!("duplicate option {key:?}") });
    }
    Ok(true)
}

impl Grammar {
    pub fn parse(src: &str) -> Result<Grammar, GrammarParseError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Lexicon,
            Affixes,
            Gazetteer,
        }
        let mut section = Section::None;
        let mut grammar = Grammar::default();
        for (line, raw) in src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.is_empty() && !l.trim_start().starts_with('#'))
        {
            let err = |msg: String| GrammarParseError { line, msg };
            if let Some(name) = raw.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                section = match name {
                    "lexicon" => Section::Lexicon,
                    "affixes" => Section::Affixes,
                    "gazetteer" => Section::Gazetteer,
                    _ => return Err(err(format!("unknown section {name:?}"))),
                };
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            match section {
                Section::None => return Err(err("entry before any section header".into())),
                Section::Lexicon => {
                    if fields.len() < 2 {
                        return Err(err("expected form<TAB>pos<TAB>root+template?".into()));
                    }
                    let surface = fields[0].to_string();
                    if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                        return Err(err(format!("bad surface {surface:?}")));
                    }
                    let pos: PosTag = fields[1]
                        .parse()
                        .map_err(|_| err(format!("unknown part of speech {:?}", fields[1])))?;
                    if matches!(pos, PosTag::NmPrs | PosTag::Pun | PosTag::Unc) {
                        return Err(err(format!("{pos} is assigned by the analyzer, not listed")));
                    }
                    let mut options = HashMap::new();
                    let mut root_template: Option<(&str, &str)> = None;
                    for &field in &fields[2..] {
                        if take_option(
                            line,
                            field,
                            &["cite", "gloss", "feat", "count"],
                            &mut options,
                        )? {
                            continue;
                        }
                        if let Some(pair) = field.split_once('+') {
                            if root_template.replace(pair).is_some() {
                                return Err(err("more than one root+template field".into()));
                            }
                            continue;
                        }
                        return Err(err(format!("unrecognized field {field:?}")));
                    }
                    let features = match options.get("feat") {
                        Some(f) => FeatureStructure::parse(f).map_err(|e| err(e.to_string()))?,
                        None => FeatureStructure::top(),
                    };
                    let glosses: Vec<String> = options
                        .get("gloss")
                        .map(|g| g.split('|').map(str::to_string).collect())
                        .unwrap_or_default();
                    let count: u64 = match options.get("count") {
                        Some(c) => c.parse().map_err(|_| err(format!("bad count {c:?}")))?,
                        None => 1,
                    };
                    let (citation, match_form) = match root_template {
                        Some((root, template)) => {
                            if pos != PosTag::V {
                                return Err(err("root+template entries are verbs".into()));
                            }
                            if options.contains_key("cite") {
                                return Err(err("verb citations are derived, not given".into()));
                            }
                            let lexical =
                                expand_template(root, template).map_err(|e| err(e.to_string()))?;
                            if orthographic_surface(&lexical) != surface {
                                return Err(err(format!(
                                    "template expands to {:?}, not {surface:?}",
                                    orthographic_surface(&lexical)
                                )));
                            }
                            (format!("{root}+{template}"), lexical)
                        }
                        None => {
                            if pos == PosTag::V {
                                return Err(err("verbs need a root+template field".into()));
                            }
                            let citation =
                                options.get("cite").cloned().unwrap_or_else(|| surface.clone());
                            // A citation is matchable only if it spells the
                            // surface once gemination marks are dropped.
                            let match_form = if orthographic_surface(&citation) == surface {
                                citation.clone()
                            } else {
                                surface.clone()
                            };
                            (citation, match_form)
                        }
                    };
                    grammar.lexemes.push(Lexeme {
                        surface,
                        citation,
                        match_form,
                        pos,
                        glosses,
                        features,
                        count,
                    });
                }
                Section::Affixes => {
                    if fields.len() < 2 {
                        return Err(err("expected form<TAB>slot<TAB>label<TAB>features".into()));
                    }
                    let display = fields[0].to_string();
                    if display.is_empty() || display.chars().any(char::is_whitespace) {
                        return Err(err(format!("bad affix {display:?}")));
                    }
                    let slot = Slot::parse(fields[1])
                        .ok_or_else(|| err(format!("unknown slot {:?}", fields[1])))?;
                    let mut options = HashMap::new();
                    let mut label: Option<&str> = None;
                    let mut features: Option<FeatureStructure> = None;
                    for &field in &fields[2..] {
                        if field.starts_with('[') {
                            let fs =
                                FeatureStructure::parse(field).map_err(|e| err(e.to_string()))?;
                            if features.replace(fs).is_some() {
                                return Err(err("more than one feature field".into()));
                            }
                            continue;
                        }
                        if take_option(line, field, &["surface"], &mut options)? {
                            continue;
                        }
                        if label.replace(field).is_some() {
                            return Err(err("more than one label field".into()));
                        }
                    }
                    let surface =
                        options.get("surface").cloned().unwrap_or_else(|| display.clone());
                    if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                        return Err(err(format!("bad affix surface {surface:?}")));
                    }
                    let label = label.unwrap_or(slot.default_label()).to_string();
                    if label.is_empty() {
                        return Err(err("empty label".into()));
                    }
                    let features = features.unwrap_or_default();
                    grammar.affixes.push(AffixEntry { display, surface, slot, label, features });
                }
                Section::Gazetteer => {
                    if fields.len() != 1 || fields[0].is_empty() {
                        return Err(err("expected one romanized name per line".into()));
                    }
                    grammar.gazetteer.insert(fields[0].to_string());
                }
            }
        }
        Ok(grammar)
    }

    /// The grammar shipped with the crate.
    pub fn embedded() -> &'static Grammar {
        &DEFAULT_GRAMMAR
    }

    pub fn lexemes(&self) -> &[Lexeme] {
        &self.lexemes
    }

    pub fn affixes(&self) -> &[AffixEntry] {
        &self.affixes
    }

    pub fn gazetteer(&self) -> &BTreeSet<String> {
        &self.gazetteer
    }

    pub fn in_gazetteer(&self, romanized: &str) -> bool {
        self.gazetteer.contains(romanized)
    }

    /// Highest attestation count among lexemes with this citation.
    pub fn citation_count(&self, citation: &str) -> u64 {
        self.lexemes.iter().filter(|l| l.citation == citation).map(|l| l.count).max().unwrap_or(0)
    }
}
