//! Corpus-construction pipeline for Amharic text in Ethiopic script.
//!
//! The stages mirror a newspaper-corpus build at desk scale: orthographic
//! normalization (homophone and punctuation variants), sentence segmentation
//! and tokenization, optional spelling repair, SERA romanization, morphological
//! analysis with feature-structure-weighted finite-state transducers, and
//! n-gram statistics over the result.

pub mod ethiopic;
pub mod fst;
pub mod morph;
pub mod pipeline;
pub mod segment;
pub mod sera;
pub mod spell;
pub mod stats;

pub use ethiopic::{CharClass, Family, HomophoneTable, PunctTable, SyllableParts};
pub use fst::{FeatureStructure, Fst, Value};
pub use morph::{Analyzer, Grammar, MorphAnalysis, Morpheme, PosTag, TaggedSentence};
pub use pipeline::{PipelineConfig, RunSummary};
pub use segment::{Sentence, Token};
pub use sera::SeraTable;
pub use spell::{ConfusionTable, Lexicon};
pub use stats::{CorpusReport, NgramTable};
