//! End-to-end corpus runs: read documents, normalize orthography, split
//! sentences, optionally repair spelling, tag every token, and write one
//! annotated XML file per document plus a corpus-wide statistics report.
//!
//! Runs are deterministic for a fixed configuration and input set regardless
//! of the worker count: documents are processed in input order, all shared
//! tables are immutable, and per-document results are merged in order.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::ethiopic::{
    char_class, normalize_homophones, normalize_punct, CharClass, HomophoneTable, PunctTable,
};
use crate::morph::{format_morphemes, Analyzer, Grammar, PosTag, TaggedSentence};
use crate::segment::{split_sentences, SegmentOptions, Sentence, Token};
use crate::sera::SeraTable;
use crate::spell::{correct_confusions, restore_spaces, ConfusionTable, Lexicon};
use crate::stats::{NgramTable, DEFAULT_ORDER};

/// Corpus tokens seen at least this often count as attested during the
/// spell-repair bootstrap; rarer tokens are candidates for repair.
const ATTESTATION_THRESHOLD: u64 = 2;

/// A full description of one corpus run.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    /// Input files or glob patterns, in the order given.
    pub inputs: Vec<String>,
    /// Directory the XML files, `report.txt`, and `counts.tsv` are written to.
    pub output_dir: PathBuf,
    /// Replacement data tables; `None` means the embedded default.
    pub homophone_table: Option<PathBuf>,
    pub punct_table: Option<PathBuf>,
    pub sera_table: Option<PathBuf>,
    pub confusion_table: Option<PathBuf>,
    pub grammar: Option<PathBuf>,
    /// Seed lexicon for spell repair (`word<TAB>count` lines).
    pub lexicon: Option<PathBuf>,
    /// Run the corpus-bootstrapped spelling repair pass.
    pub spell: bool,
    /// Add-k smoothing constant carried alongside the counts.
    pub smoothing_k: f64,
    /// Worker threads for document-level parallelism.
    pub workers: usize,
    /// Drop sentences with fewer tokens than this.
    pub min_tokens: usize,
    /// Include punctuation tokens in the n-gram statistics.
    pub count_punct: bool,
    /// Concatenate all documents into one `corpus.xml` instead of one file
    /// per input document.
    pub single_file: bool,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            inputs: Vec::new(),
            output_dir: PathBuf::from("out"),
            homophone_table: None,
            punct_table: None,
            sera_table: None,
            confusion_table: None,
            grammar: None,
            lexicon: None,
            spell: false,
            smoothing_k: 1.0,
            workers: 1,
            min_tokens: 1,
            count_punct: true,
            single_file: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Unreadable { path: PathBuf, source: io::Error },
    #[error("cannot load {path}: {msg}")]
    Table { path: PathBuf, msg: String },
}

impl PipelineConfig {
    /// Parse the flat `key = value` configuration format. Blank lines and
    /// `#` comments are skipped; `input` may repeat; relative paths are
    /// resolved against `base`.
    pub fn parse(src: &str, base: &Path) -> Result<PipelineConfig, ConfigError> {
        let mut config = PipelineConfig::default();
        config.output_dir = base.join("out");
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let syntax = |msg: String| ConfigError::Syntax { line, msg };
            let (key, value) =
                text.split_once('=').ok_or_else(|| syntax("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(syntax(format!("{key}: empty value")));
            }
            let path = || resolve(base, value);
            match key {
                "input" => config.inputs.push(path().to_string_lossy().into_owned()),
                "output_dir" => config.output_dir = path(),
                "homophone_table" => config.homophone_table = Some(path()),
                "punct_table" => config.punct_table = Some(path()),
                "sera_table" => config.sera_table = Some(path()),
                "confusion_table" => config.confusion_table = Some(path()),
                "grammar" => config.grammar = Some(path()),
                "lexicon" => config.lexicon = Some(path()),
                "spell" => config.spell = parse_bool(value).map_err(syntax)?,
                "count_punct" => config.count_punct = parse_bool(value).map_err(syntax)?,
                "single_file" => config.single_file = parse_bool(value).map_err(syntax)?,
                "smoothing_k" => {
                    config.smoothing_k = value
                        .parse()
                        .map_err(|_| syntax(format!("smoothing_k: {value:?} is not a number")))?;
                }
                "workers" => {
                    config.workers = value
                        .parse()
                        .map_err(|_| syntax(format!("workers: {value:?} is not a count")))?;
                }
                "min_tokens" => {
                    config.min_tokens = value
                        .parse()
                        .map_err(|_| syntax(format!("min_tokens: {value:?} is not a count")))?;
                }
                other => return Err(syntax(format!("unknown key {other:?}"))),
            }
        }
        Ok(config)
    }

    /// Read and parse a configuration file; relative paths inside it are
    /// resolved against its parent directory.
    pub fn load(path: &Path) -> Result<PipelineConfig, ConfigError> {
        let src = fs::read_to_string(path)
            .map_err(|e| ConfigError::Unreadable { path: path.to_path_buf(), source: e })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&src, base)
    }

    /// Check the invariants a run relies on: at least one worker, a usable
    /// smoothing constant, and every referenced table file present.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.workers == 0 {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        if !self.smoothing_k.is_finite() || self.smoothing_k < 0.0 {
            return Err(ConfigError::Invalid(format!(
                "smoothing_k must be a finite non-negative number, got {}",
                self.smoothing_k
            )));
        }
        let tables = [
            ("homophone_table", &self.homophone_table),
            ("punct_table", &self.punct_table),
            ("sera_table", &self.sera_table),
            ("confusion_table", &self.confusion_table),
            ("grammar", &self.grammar),
            ("lexicon", &self.lexicon),
        ];
        for (key, path) in tables {
            if let Some(path) = path {
                if !path.is_file() {
                    return Err(ConfigError::Invalid(format!(
                        "{key}: {} is not a readable file",
                        path.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let path = Path::new(value);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

/// A problem with one input that the run recorded and worked around.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileError {
    pub path: PathBuf,
    pub message: String,
}

/// What a run did: document/sentence/token totals, how many tokens fell back
/// to the unanalyzable tag, how many spelling repairs were applied, how many
/// unterminated trailing fragments were dropped, and any per-file errors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub documents: usize,
    pub sentences: u64,
    /// Word tokens, not counting the sentence terminators (each annotated
    /// sentence carries one more word than this tally).
    pub tokens: u64,
    pub unc_count: u64,
    pub corrections: u64,
    pub dropped_fragments: u64,
    pub errors: Vec<FileError>,
}

/// A failure that aborts the run (output cannot be produced).
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// A document after normalization and segmentation, before tagging.
struct PreparedDoc {
    path: PathBuf,
    sentences: Vec<PreparedSentence>,
    dropped_fragments: usize,
}

struct PreparedSentence {
    tokens: Vec<String>,
    terminator: char,
}

/// Per-document results, merged in input order.
struct DocOutput {
    path: PathBuf,
    xml: String,
    table: NgramTable,
    sentences: u64,
    tokens: u64,
    unc: u64,
}

/// A loaded, validated pipeline: configuration plus every table it needs.
pub struct Pipeline {
    config: PipelineConfig,
    homophones: HomophoneTable,
    punct: PunctTable,
    analyzer: Analyzer,
    confusions: ConfusionTable,
    seed_lexicon: Lexicon,
}

impl Pipeline {
    /// Validate the configuration and load every table (embedded defaults
    /// where no replacement file is given).
    pub fn new(config: PipelineConfig) -> Result<Pipeline, ConfigError> {
        config.validate()?;
        fn read(path: &Path) -> Result<String, ConfigError> {
            fs::read_to_string(path)
                .map_err(|e| ConfigError::Unreadable { path: path.to_path_buf(), source: e })
        }
        fn load<T, E: std::fmt::Display>(
            path: &Option<PathBuf>,
            parse: impl Fn(&str) -> Result<T, E>,
            default: impl Fn() -> T,
        ) -> Result<T, ConfigError> {
            match path {
                Some(p) => parse(&read(p)?)
                    .map_err(|e| ConfigError::Table { path: p.clone(), msg: e.to_string() }),
                None => Ok(default()),
            }
        }
        let homophones = load(&config.homophone_table, HomophoneTable::parse, || {
            HomophoneTable::embedded().clone()
        })?;
        let punct =
            load(&config.punct_table, PunctTable::parse, || PunctTable::embedded().clone())?;
        let sera = load(&config.sera_table, SeraTable::parse, || SeraTable::embedded().clone())?;
        let grammar = load(&config.grammar, Grammar::parse, || Grammar::embedded().clone())?;
        let confusions =
            load(&config.confusion_table, ConfusionTable::parse, ConfusionTable::embedded)?;
        let seed_lexicon = load(&config.lexicon, Lexicon::parse, Lexicon::new)?;
        Ok(Pipeline {
            config,
            homophones,
            punct,
            analyzer: Analyzer::new(grammar, sera),
            confusions,
            seed_lexicon,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Run the whole pipeline. Unreadable inputs are recorded in the summary
    /// and skipped; unwritable outputs abort.
    pub fn run(&self) -> Result<RunSummary, PipelineError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.config.workers).build()?;
        pool.install(|| self.run_inner())
    }

    fn run_inner(&self) -> Result<RunSummary, PipelineError> {
        let mut summary = RunSummary::default();

        // Expand inputs; a pattern that matches nothing is a recorded error.
        let files = self.expand_inputs(&mut summary.errors);

        // Normalize and segment every document, in input order.
        let prepared: Vec<Result<PreparedDoc, FileError>> =
            files.par_iter().map(|path| self.prepare_doc(path)).collect();
        let mut docs = Vec::with_capacity(prepared.len());
        for result in prepared {
            match result {
                Ok(doc) => docs.push(doc),
                Err(e) => summary.errors.push(e),
            }
        }

        if self.config.spell {
            summary.corrections = self.repair_spelling(&mut docs);
        }

        // Tag and render every document, still in input order.
        let outputs: Vec<DocOutput> = docs.par_iter().map(|doc| self.tag_doc(doc)).collect();

        // Ordered sequential merge and write-out.
        let out_dir = &self.config.output_dir;
        fs::create_dir_all(out_dir)
            .map_err(|e| PipelineError::Write { path: out_dir.clone(), source: e })?;
        let mut merged = NgramTable::new(DEFAULT_ORDER);
        let mut used_stems: HashMap<String, usize> = HashMap::new();
        let mut corpus_xml = String::from("<corpus>\n");
        for output in &outputs {
            if self.config.single_file {
                corpus_xml.push_str(&output.xml);
            } else {
                let name = output_name(&output.path, &mut used_stems);
                write_file(&out_dir.join(name), &output.xml)?;
            }
            merged.merge(&output.table);
            summary.sentences += output.sentences;
            summary.tokens += output.tokens;
            summary.unc_count += output.unc;
        }
        if self.config.single_file {
            corpus_xml.push_str("</corpus>\n");
            write_file(&out_dir.join("corpus.xml"), &corpus_xml)?;
        }
        summary.documents = outputs.len();
        summary.dropped_fragments = docs.iter().map(|d| d.dropped_fragments as u64).sum();

        write_file(&out_dir.join("report.txt"), &merged.report().to_string())?;
        let mut counts = Vec::new();
        merged.write_counts(&mut counts).expect("writing to a Vec cannot fail");
        let counts = String::from_utf8(counts).expect("counts are UTF-8");
        write_file(&out_dir.join("counts.tsv"), &counts)?;

        Ok(summary)
    }

    /// Expand the configured paths/globs into a deduplicated, per-pattern
    /// sorted file list.
    fn expand_inputs(&self, errors: &mut Vec<FileError>) -> Vec<PathBuf> {
        let mut seen = BTreeSet::new();
        let mut files = Vec::new();
        for pattern in &self.config.inputs {
            let record = |errors: &mut Vec<FileError>, message: String| {
                errors.push(FileError { path: PathBuf::from(pattern), message });
            };
            let entries = match glob::glob(pattern) {
                Ok(entries) => entries,
                Err(e) => {
                    record(errors, format!("bad pattern: {e}"));
                    continue;
                }
            };
            let mut matched = Vec::new();
            for entry in entries {
                match entry {
                    Ok(path) if path.is_file() => matched.push(path),
                    Ok(_) => {}
                    Err(e) => record(errors, e.to_string()),
                }
            }
            matched.sort();
            if matched.is_empty() {
                record(errors, "matched no files".into());
            }
            for path in matched {
                if seen.insert(path.clone()) {
                    files.push(path);
                }
            }
        }
        files
    }

    fn prepare_doc(&self, path: &Path) -> Result<PreparedDoc, FileError> {
        let raw = fs::read_to_string(path)
            .map_err(|e| FileError { path: path.to_path_buf(), message: e.to_string() })?;
        let text = normalize_punct(&normalize_homophones(&raw, &self.homophones), &self.punct);
        let outcome = split_sentences(&text, &SegmentOptions::default());
        let mut sentences = Vec::new();
        for sentence in outcome.sentences {
            let mut tokens = Vec::new();
            for token in &sentence.tokens {
                tokens.extend(split_edge_punct(&token.text));
            }
            if tokens.len() >= self.config.min_tokens {
                sentences.push(PreparedSentence { tokens, terminator: sentence.terminator });
            }
        }
        Ok(PreparedDoc {
            path: path.to_path_buf(),
            sentences,
            dropped_fragments: outcome.dropped_fragments,
        })
    }

    /// Two-pass spelling repair: count every token corpus-wide, treat tokens
    /// below the attestation threshold as suspect, and repair each suspect
    /// occurrence against the frozen bootstrapped lexicon (confusion
    /// substitution first, then space restoration). Returns the number of
    /// repairs.
    fn repair_spelling(&self, docs: &mut [PreparedDoc]) -> u64 {
        let mut corpus_counts: HashMap<&str, u64> = HashMap::new();
        for doc in docs.iter() {
            for sentence in &doc.sentences {
                for token in &sentence.tokens {
                    if !is_punct_token(token) {
                        *corpus_counts.entry(token).or_insert(0) += 1;
                    }
                }
            }
        }
        let mut lexicon = self.seed_lexicon.clone();
        for (token, count) in corpus_counts {
            if count >= ATTESTATION_THRESHOLD {
                lexicon.add(token, count);
            }
        }
        docs.par_iter_mut()
            .map(|doc| {
                let mut repairs = 0;
                for sentence in &mut doc.sentences {
                    let mut i = 0;
                    while i < sentence.tokens.len() {
                        let token = &sentence.tokens[i];
                        if is_punct_token(token) {
                            i += 1;
                            continue;
                        }
                        let fixed = correct_confusions(token, &lexicon, &self.confusions);
                        if fixed != *token {
                            sentence.tokens[i] = fixed;
                            repairs += 1;
                            i += 1;
                            continue;
                        }
                        if let Some(parts) = restore_spaces(token, &lexicon) {
                            let advance = parts.len();
                            sentence.tokens.splice(i..=i, parts);
                            repairs += 1;
                            i += advance;
                            continue;
                        }
                        i += 1;
                    }
                }
                repairs
            })
            .sum()
    }

    fn tag_doc(&self, doc: &PreparedDoc) -> DocOutput {
        let mut xml = String::from("<doc>\n");
        let mut table = NgramTable::new(DEFAULT_ORDER);
        let mut tokens = 0;
        let mut unc = 0;
        for prepared in &doc.sentences {
            let sentence = assemble_sentence(&prepared.tokens, prepared.terminator);
            let tagged = self.analyzer.tag_sentence(&sentence);
            unc += tagged.words.iter().filter(|(_, a)| a.pos == PosTag::Unc).count() as u64;
            tokens += prepared.tokens.len() as u64;
            let counted: Vec<&str> = prepared
                .tokens
                .iter()
                .filter(|t| self.config.count_punct || !is_punct_token(t))
                .map(String::as_str)
                .collect();
            table.count_sentence(&counted);
            xml.push_str(&emit_xml(&tagged));
        }
        xml.push_str("</doc>\n");
        DocOutput {
            path: doc.path.clone(),
            xml,
            table,
            sentences: doc.sentences.len() as u64,
            tokens,
            unc,
        }
    }
}

/// Convenience wrapper: build the pipeline and run it.
pub fn run_pipeline(config: PipelineConfig) -> Result<RunSummary, RunError> {
    let pipeline = Pipeline::new(config)?;
    Ok(pipeline.run()?)
}

/// Either way a run can fail: rejected configuration or fatal output I/O.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Render one tagged sentence as annotated XML: a `<s>` element with one
/// `<w>` per word, attributes in the order pos, morphemes, latin (the latter
/// two omitted for punctuation), element content the surface form plus one
/// space. Punctuation content is written in its romanized form.
pub fn emit_xml(sentence: &TaggedSentence) -> String {
    let mut out = String::from("<s>\n");
    for (surface, analysis) in &sentence.words {
        if analysis.pos == PosTag::Pun {
            let _ = writeln!(out, "  <w pos=\"PUN\">{} </w>", escape_text(&analysis.sera));
        } else {
            let _ = writeln!(
                out,
                "  <w pos=\"{}\" morphemes=\"{}\" latin=\"{}\">{} </w>",
                analysis.pos,
                escape_attr(&format_morphemes(&analysis.morphemes)),
                escape_attr(&analysis.sera),
                escape_text(surface),
            );
        }
    }
    out.push_str("</s>\n");
    out
}

/// Detach leading and trailing punctuation runs from a token, each run
/// becoming its own token. Interior punctuation (hyphenated compounds) is
/// left alone, as is a token that is nothing but punctuation.
fn split_edge_punct(token: &str) -> Vec<String> {
    let chars: Vec<char> = token.chars().collect();
    let is_punct = |c: &char| char_class(*c) == CharClass::Punct;
    let lead = chars.iter().take_while(|c| is_punct(c)).count();
    if lead == chars.len() {
        return vec![token.to_string()];
    }
    let trail = chars.iter().rev().take_while(|c| is_punct(c)).count();
    let mut out = Vec::new();
    if lead > 0 {
        out.push(chars[..lead].iter().collect());
    }
    out.push(chars[lead..chars.len() - trail].iter().collect());
    if trail > 0 {
        out.push(chars[chars.len() - trail..].iter().collect());
    }
    out
}

fn is_punct_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| char_class(c) == CharClass::Punct)
}

/// Rebuild a [`Sentence`] around an already-final token list.
fn assemble_sentence(tokens: &[String], terminator: char) -> Sentence {
    let text = tokens.join(" ");
    let mut built = Vec::with_capacity(tokens.len());
    let mut offset = 0;
    for token in tokens {
        built.push(Token { text: token.clone(), offset });
        offset += token.chars().count() + 1;
    }
    Sentence { text, terminator, tokens: built }
}

/// Pick `<stem>.xml` for a document, disambiguating repeated stems with a
/// numeric suffix in input order.
fn output_name(path: &Path, used: &mut HashMap<String, usize>) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "doc".to_string());
    let n = used.entry(stem.clone()).or_insert(0);
    *n += 1;
    if *n == 1 {
        format!("{stem}.xml")
    } else {
        format!("{stem}-{n}.xml")
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents)
        .map_err(|e| PipelineError::Write { path: path.to_path_buf(), source: e })
}

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::FeatureStructure;
    use crate::morph::{MorphAnalysis, Morpheme};
    use std::fs;

    fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn config_parses_every_key() {
        let base = Path::new("/base");
        let src = "\
# corpus run
input = docs/*.txt
input = /abs/extra.txt
output_dir = out
grammar = tables/grammar.txt
lexicon = tables/lexicon.tsv
spell = true
smoothing_k = 0.5
workers = 4
min_tokens = 2
count_punct = false
single_file = true
";
        let config = PipelineConfig::parse(src, base).unwrap();
        assert_eq!(config.inputs, vec!["/base/docs/*.txt", "/abs/extra.txt"]);
        assert_eq!(config.output_dir, PathBuf::from("/base/out"));
        assert_eq!(config.grammar, Some(PathBuf::from("/base/tables/grammar.txt")));
        assert_eq!(config.lexicon, Some(PathBuf::from("/base/tables/lexicon.tsv")));
        assert!(config.spell);
        assert_eq!(config.smoothing_k, 0.5);
        assert_eq!(config.workers, 4);
        assert_eq!(config.min_tokens, 2);
        assert!(!config.count_punct);
        assert!(config.single_file);
        assert!(config.homophone_table.is_none());
    }

    #[test]
    fn config_rejects_malformed_lines() {
        let base = Path::new(".");
        for (src, needle) in [
            ("just words", "key = value"),
            ("workers = many", "not a count"),
            ("spell = yes", "true or false"),
            ("colour = blue", "unknown key"),
            ("input =", "empty value"),
        ] {
            match PipelineConfig::parse(src, base) {
                Err(ConfigError::Syntax { line: 1, msg }) => {
                    assert!(msg.contains(needle), "{src:?}: {msg}")
                }
                other => panic!("{src:?}: expected syntax error, got {other:?}"),
            }
        }
    }

    #[test]
    fn validate_checks_workers_smoothing_and_files() {
        let mut config = PipelineConfig::default();
        config.workers = 0;
        assert!(matches!(config.validate(), Err(ConfigError::Invalid(_))));
        config.workers = 1;
        config.smoothing_k = -1.0;
        assert!(matches!(config.validate(), Err(ConfigError::Invalid(_))));
        config.smoothing_k = f64::NAN;
        assert!(matches!(config.validate(), Err(ConfigError::Invalid(_))));
        config.smoothing_k = 0.0;
        config.grammar = Some(PathBuf::from("/no/such/grammar.txt"));
        assert!(matches!(config.validate(), Err(ConfigError::Invalid(_))));
        config.grammar = None;
        assert!(config.validate().is_ok());
    }

    #[test]
    fn edge_punctuation_splits_off_but_interior_stays() {
        assert_eq!(split_edge_punct("«ዝርዝር»"), vec!["«", "ዝርዝር", "»"]);
        assert_eq!(split_edge_punct("ዝርዝር፣"), vec!["ዝርዝር", "፣"]);
        assert_eq!(split_edge_punct("(ሀገር"), vec!["(", "ሀገር"]);
        assert_eq!(split_edge_punct("ቤት-ሰብ"), vec!["ቤት-ሰብ"]);
        assert_eq!(split_edge_punct("፣፣"), vec!["፣፣"]);
        assert_eq!(split_edge_punct("ቤት"), vec!["ቤት"]);
    }

    #[test]
    fn xml_rendering_matches_the_annotation_format() {
        let analyzer = Analyzer::embedded();
        let outcome = split_sentences("ዝርዝር።", &SegmentOptions::default());
        let tagged = analyzer.tag_sentence(&outcome.sentences[0]);
        assert_eq!(
            emit_xml(&tagged),
            "<s>\n  <w pos=\"N\" morphemes=\"{zrzr}\" latin=\"zrzr\">ዝርዝር </w>\n  <w pos=\"PUN\">:: </w>\n</s>\n"
        );
    }

    #[test]
    fn xml_escapes_markup_characters() {
        let word = |surface: &str, citation: &str| {
            (
                surface.to_string(),
                MorphAnalysis {
                    pos: PosTag::Unc,
                    morphemes: vec![Morpheme::Stem {
                        citation: citation.to_string(),
                        glosses: vec![],
                    }],
                    features: FeatureStructure::top(),
                    sera: citation.to_string(),
                },
            )
        };
        let sentence = TaggedSentence {
            words: vec![word("a<b&c", "a<b&c"), word("q\"r", "q\"r")],
            source: assemble_sentence(&["a<b&c".to_string(), "q\"r".to_string()], '።'),
        };
        let xml = emit_xml(&sentence);
        assert!(xml.contains("latin=\"a&lt;b&amp;c\">a&lt;b&amp;c </w>"), "{xml}");
        assert!(xml.contains("latin=\"q&quot;r\">q\"r </w>"), "{xml}");
    }

    #[test]
    fn run_tags_documents_and_accounts_for_every_token() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "one.txt", "በዚሁ ዝርዝር ። ሀገር ፤ ሰው ።");
        write(dir.path(), "two.txt", "ዝርዝር ። ቤት");
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("*.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        let summary = run_pipeline(config).unwrap();

        assert_eq!(summary.documents, 2);
        assert_eq!(summary.sentences, 3);
        assert_eq!(summary.tokens, 6);
        assert_eq!(summary.dropped_fragments, 1);
        assert!(summary.errors.is_empty());
        assert!(summary.unc_count <= summary.tokens);

        let one = fs::read_to_string(dir.path().join("out/one.xml")).unwrap();
        let two = fs::read_to_string(dir.path().join("out/two.xml")).unwrap();
        // Terminators ride along as words: Σ <w = tokens + sentences.
        let words = one.matches("<w ").count() + two.matches("<w ").count();
        assert_eq!(words as u64, summary.tokens + summary.sentences);
        assert!(one.starts_with("<doc>\n<s>\n"));
        assert!(one.ends_with("</s>\n</doc>\n"));

        let report = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
        assert!(report.contains("Sentences\t3"), "{report}");
        assert!(report.contains("Tokens\t6"), "{report}");
        let counts = fs::read_to_string(dir.path().join("out/counts.tsv")).unwrap();
        assert!(counts.contains("1\tዝርዝር\t2"), "{counts}");
    }

    #[test]
    fn emitted_xml_is_well_formed() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "doc.txt", "«ዝርዝር» ፥ \u{1364} ምስጢራዊ ።");
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("doc.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        run_pipeline(config).unwrap();
        let xml = fs::read_to_string(dir.path().join("out/doc.xml")).unwrap();
        let mut reader = quick_xml::Reader::from_str(&xml);
        loop {
            match reader.read_event() {
                Ok(quick_xml::events::Event::Eof) => break,
                Ok(_) => {}
                Err(e) => panic!("bad XML at {}: {e}\n{xml}", reader.buffer_position()),
            }
        }
    }

    #[test]
    fn single_file_mode_concatenates_documents() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.txt", "ሰው ።");
        write(dir.path(), "b.txt", "ቤት ።");
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("*.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        config.single_file = true;
        run_pipeline(config).unwrap();
        let xml = fs::read_to_string(dir.path().join("out/corpus.xml")).unwrap();
        assert!(xml.starts_with("<corpus>\n<doc>\n"));
        assert!(xml.ends_with("</doc>\n</corpus>\n"));
        assert_eq!(xml.matches("<doc>").count(), 2);
        assert!(!dir.path().join("out/a.xml").exists());
    }

    #[test]
    fn unmatched_inputs_are_recorded_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("missing-*.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        let summary = run_pipeline(config).unwrap();
        assert_eq!(summary.documents, 0);
        assert_eq!(summary.errors.len(), 1);
        assert!(summary.errors[0].message.contains("matched no files"));
        // The empty run still writes its (zeroed) report.
        assert!(dir.path().join("out/report.txt").exists());
    }

    #[test]
    fn an_empty_input_set_yields_a_zeroed_summary() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = PipelineConfig::default();
        config.output_dir = dir.path().join("out");
        let summary = run_pipeline(config).unwrap();
        assert_eq!(summary, RunSummary::default());
    }

    #[test]
    fn min_tokens_drops_short_sentences() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "doc.txt", "ሰው ። ሰው ቤት ።");
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("doc.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        config.min_tokens = 2;
        let summary = run_pipeline(config).unwrap();
        assert_eq!(summary.sentences, 1);
        assert_eq!(summary.tokens, 2);
    }

    #[test]
    fn spell_pass_restores_spaces_in_rare_glued_tokens() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "doc.txt", "ሀገር ሰው ። ሀገር ሰው ። ሀገርሰው ።");
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("doc.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        config.spell = true;
        let summary = run_pipeline(config).unwrap();
        assert_eq!(summary.corrections, 1);
        // The glued token became two, so all three sentences have two tokens.
        assert_eq!(summary.tokens, 6);
        let counts = fs::read_to_string(dir.path().join("out/counts.tsv")).unwrap();
        assert!(counts.contains("1\tሀገር\t3"), "{counts}");
        assert!(!counts.contains("ሀገርሰው"), "{counts}");
    }

    #[test]
    fn spell_pass_applies_confusion_repairs() {
        let dir = tempfile::tempdir().unwrap();
        // ዘ and ዠ as a visually-confusable pair; the majority spelling wins.
        write(dir.path(), "confusions.tsv", "ዘ\tዠ\n");
        write(dir.path(), "doc.txt", "ዘመን ቤት ። ዘመን ቤት ። ዠመን ቤት ።");
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("doc.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        config.confusion_table = Some(dir.path().join("confusions.tsv"));
        config.spell = true;
        let summary = run_pipeline(config).unwrap();
        assert_eq!(summary.corrections, 1);
        let counts = fs::read_to_string(dir.path().join("out/counts.tsv")).unwrap();
        assert!(counts.contains("1\tዘመን\t3"), "{counts}");
        assert!(!counts.contains("ዠመን"), "{counts}");
    }

    #[test]
    fn count_punct_toggle_filters_statistics_only() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "doc.txt", "ሰው ፣ ቤት ።");
        let mut base = PipelineConfig::default();
        base.inputs = vec![dir.path().join("doc.txt").to_string_lossy().into_owned()];

        let mut with = base.clone();
        with.output_dir = dir.path().join("with");
        let summary = run_pipeline(with).unwrap();
        assert_eq!(summary.tokens, 3);
        let report = fs::read_to_string(dir.path().join("with/report.txt")).unwrap();
        assert!(report.contains("Tokens\t3"), "{report}");

        let mut without = base.clone();
        without.output_dir = dir.path().join("without");
        without.count_punct = false;
        let summary = run_pipeline(without).unwrap();
        // The comma still reaches the XML as a word; only the stats skip it.
        assert_eq!(summary.tokens, 3);
        let report = fs::read_to_string(dir.path().join("without/report.txt")).unwrap();
        assert!(report.contains("Tokens\t2"), "{report}");
        let xml = fs::read_to_string(dir.path().join("without/doc.xml")).unwrap();
        assert_eq!(xml.matches("<w ").count(), 4);
    }

    #[test]
    fn repeated_file_stems_get_distinct_outputs() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("a")).unwrap();
        fs::create_dir(dir.path().join("b")).unwrap();
        write(&dir.path().join("a"), "doc.txt", "ሰው ።");
        write(&dir.path().join("b"), "doc.txt", "ቤት ።");
        let mut config = PipelineConfig::default();
        config.inputs = vec![dir.path().join("*/doc.txt").to_string_lossy().into_owned()];
        config.output_dir = dir.path().join("out");
        let summary = run_pipeline(config).unwrap();
        assert_eq!(summary.documents, 2);
        assert!(dir.path().join("out/doc.xml").exists());
        assert!(dir.path().join("out/doc-2.xml").exists());
    }
}
