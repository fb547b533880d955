//! Command-line front end: `run` drives a whole corpus build from a
//! configuration file; the other subcommands expose single pipeline stages
//! over standard input or a file.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fidel_core::ethiopic::{normalize_homophones, normalize_punct, HomophoneTable, PunctTable};
use fidel_core::morph::{format_morphemes, Analyzer};
use fidel_core::pipeline::{ConfigError, Pipeline, PipelineConfig, PipelineError, RunSummary};
use fidel_core::segment::{split_sentences, SegmentOptions};
use fidel_core::sera::{to_sera, SeraTable};
use fidel_core::stats::count_ngrams;

/// Corpus pipeline for Amharic text in Ethiopic script.
#[derive(Parser)]
#[command(name = "fidel-pipe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline described by a configuration file.
    Run {
        /// Path to a flat `key = value` configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Enable the spelling-repair pass (overrides the config file).
        #[arg(long)]
        spell: bool,
        /// Write one concatenated corpus.xml instead of per-document files.
        #[arg(long)]
        single_file: bool,
        /// Include punctuation tokens in the statistics (true or false).
        #[arg(long, value_name = "BOOL")]
        count_punct: Option<bool>,
        /// Drop sentences with fewer than this many tokens.
        #[arg(long, value_name = "N")]
        min_tokens: Option<usize>,
        /// Worker threads for document-level parallelism.
        #[arg(long, value_name = "N")]
        workers: Option<usize>,
    },
    /// Normalize homophone characters and punctuation variants.
    Normalize { file: Option<PathBuf> },
    /// Split text into sentences of whitespace tokens.
    Segment { file: Option<PathBuf> },
    /// Romanize Ethiopic text.
    Sera { file: Option<PathBuf> },
    /// Analyze each whitespace token, one tab-separated line per token.
    Analyze { file: Option<PathBuf> },
    /// Count n-grams over pre-tokenized sentences (one sentence per line).
    Stats { file: Option<PathBuf> },
}

/// An error with the exit code it maps to: 1 for I/O and data failures,
/// 2 for configuration problems.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn fatal(message: String) -> CliError {
        CliError { code: 1, message }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> CliError {
        CliError { code: 2, message: e.to_string() }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> CliError {
        CliError::fatal(e.to_string())
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fidel-pipe: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, spell, single_file, count_punct, min_tokens, workers } => {
            cmd_run(&config, spell, single_file, count_punct, min_tokens, workers)
        }
        Command::Normalize { file } => cmd_normalize(&read_input(&file)?),
        Command::Segment { file } => cmd_segment(&read_input(&file)?),
        Command::Sera { file } => cmd_sera(&read_input(&file)?),
        Command::Analyze { file } => cmd_analyze(&read_input(&file)?),
        Command::Stats { file } => cmd_stats(&read_input(&file)?),
    }
}

fn read_input(file: &Option<PathBuf>) -> Result<String, CliError> {
    match file {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::fatal(format!("cannot read {}: {e}", path.display()))),
        None => {
            let mut buf = String::new();
            io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::fatal(format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
    }
}

fn emit(result: io::Result<()>) -> Result<(), CliError> {
    result.map_err(|e| CliError::fatal(format!("cannot write standard output: {e}")))
}

fn cmd_run(
    config_path: &PathBuf,
    spell: bool,
    single_file: bool,
    count_punct: Option<bool>,
    min_tokens: Option<usize>,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let mut config = PipelineConfig::load(config_path)?;
    if spell {
        config.spell = true;
    }
    if single_file {
        config.single_file = true;
    }
    if let Some(v) = count_punct {
        config.count_punct = v;
    }
    if let Some(v) = min_tokens {
        config.min_tokens = v;
    }
    if let Some(v) = workers {
        config.workers = v;
    }
    let pipeline = Pipeline::new(config)?;
    let summary = pipeline.run()?;
    for error in &summary.errors {
        eprintln!("fidel-pipe: {}: {}", error.path.display(), error.message);
    }
    emit(io::stdout().lock().write_all(render_summary(&summary).as_bytes()))
}

fn render_summary(s: &RunSummary) -> String {
    format!(
        "Documents\t{}\nSentences\t{}\nTokens\t{}\nUNC\t{}\nCorrections\t{}\nDropped fragments\t{}\n",
        s.documents, s.sentences, s.tokens, s.unc_count, s.corrections, s.dropped_fragments
    )
}

fn cmd_normalize(text: &str) -> Result<(), CliError> {
    let normalized = normalize_punct(
        &normalize_homophones(text, HomophoneTable::embedded()),
        PunctTable::embedded(),
    );
    emit(io::stdout().lock().write_all(normalized.as_bytes()))
}

fn cmd_segment(text: &str) -> Result<(), CliError> {
    let outcome = split_sentences(text, &SegmentOptions::default());
    let mut out = io::stdout().lock();
    for sentence in &outcome.sentences {
        let tokens: Vec<&str> = sentence.tokens.iter().map(|t| t.text.as_str()).collect();
        if tokens.is_empty() {
            emit(writeln!(out, "{}", sentence.terminator))?;
        } else {
            emit(writeln!(out, "{} {}", tokens.join(" "), sentence.terminator))?;
        }
    }
    if outcome.dropped_fragments > 0 {
        eprintln!(
            "fidel-pipe: dropped {} unterminated trailing fragment(s)",
            outcome.dropped_fragments
        );
    }
    Ok(())
}

fn cmd_sera(text: &str) -> Result<(), CliError> {
    let romanized = to_sera(text, SeraTable::embedded())
        .map_err(|e| CliError::fatal(format!("cannot romanize input: {e}")))?;
    emit(io::stdout().lock().write_all(romanized.as_bytes()))
}

fn cmd_analyze(text: &str) -> Result<(), CliError> {
    let analyzer = Analyzer::embedded();
    let mut out = io::stdout().lock();
    for token in text.split_whitespace() {
        let analysis = analyzer.tag_token(token);
        emit(writeln!(
            out,
            "{}\t{}\t{}\t{}",
            token,
            analysis.pos,
            format_morphemes(&analysis.morphemes),
            analysis.sera
        ))?;
    }
    Ok(())
}

fn cmd_stats(text: &str) -> Result<(), CliError> {
    let sentences: Vec<Vec<&str>> = text
        .lines()
        .map(|line| line.split_whitespace().collect::<Vec<&str>>())
        .filter(|tokens| !tokens.is_empty())
        .collect();
    let table = count_ngrams(&sentences);
    emit(io::stdout().lock().write_all(table.report().to_string().as_bytes()))
}
