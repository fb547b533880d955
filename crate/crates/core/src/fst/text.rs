//! Plain-text exchange format for transducers, one machine per file.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! start 0
//! final 2 [sb:[p:2]]
//! final 3
//! 0 1 a b [p:{2,3}]
//! 1 2 <eps> x
//! ```
//!
//! Lines are whitespace-separated. `start <id>` names the start state (once);
//! `final <id> [features]` marks a final state, feature structure optional
//! (identity when omitted); every other non-comment line is an arc
//! `<from> <to> <input> <output> [features]`. Symbols are whitespace-free
//! strings; the reserved token `<eps>` spells epsilon. States are numbered
//! `0..n` and created on demand. The writer emits this same shape with
//! canonically formatted feature structures, so write→parse is lossless.

use std::fmt::Write as _;

use thiserror::Error;

use super::{FeatureStructure, Fst, StateId};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("fst text format error at line {line}: {msg}")]
pub struct TextFormatError {
    pub line: usize,
    pub msg: String,
}

const EPS: &str = "<eps>";

/// Parse a machine from the text format.
pub fn parse_fst(input: &str) -> Result<Fst, TextFormatError> {
    let mut fst = Fst::new();
    let mut saw_start = false;
    let err = |line: usize, msg: String| TextFormatError { line, msg };

    let ensure_state = |fst: &mut Fst, id: StateId| {
        while fst.num_states() <= id {
            fst.add_state();
        }
    };

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |s: &str, what: &str| -> Result<StateId, TextFormatError> {
            s.parse::<StateId>()
                .map_err(|_| err(line_no, format!("{what} is not a state id: {s:?}")))
        };
        let parse_weight = |fields: &[&str]| -> Result<FeatureStructure, TextFormatError> {
            if fields.is_empty() {
                return Ok(FeatureStructure::top());
            }
            let joined = fields.join(" ");
            FeatureStructure::parse(&joined).map_err(|e| err(line_no, e.to_string()))
        };

        match fields[0] {
            "start" => {
                if fields.len() != 2 {
                    return Err(err(line_no, "start takes exactly one state id".into()));
                }
                if saw_start {
                    return Err(err(line_no, "duplicate start line".into()));
                }
                let id = parse_id(fields[1], "start state")?;
                ensure_state(&mut fst, id);
                fst.set_start(id);
                saw_start = true;
            }
            "final" => {
                if fields.len() < 2 {
                    return Err(err(line_no, "final takes a state id".into()));
                }
                let id = parse_id(fields[1], "final state")?;
                let weight = parse_weight(&fields[2..])?;
                ensure_state(&mut fst, id);
                fst.set_final(id, weight);
            }
            _ => {
                if fields.len() < 4 {
                    return Err(err(
                        line_no,
                        "arc line needs <from> <to> <input> <output> [features]".into(),
                    ));
                }
                let from = parse_id(fields[0], "arc source")?;
                let to = parse_id(fields[1], "arc target")?;
                for sym in [fields[2], fields[3]] {
                    if sym.starts_with('[') {
                        return Err(err(
                            line_no,
                            format!("symbol may not start with '[': {sym:?}"),
                        ));
                    }
                }
                let input = (fields[2] != EPS).then_some(fields[2]);
                let output = (fields[3] != EPS).then_some(fields[3]);
                let weight = parse_weight(&fields[4..])?;
                ensure_state(&mut fst, from.max(to));
                fst.add_arc(from, to, input, output, weight);
            }
        }
    }
    if !saw_start && fst.num_states() > 0 {
        return Err(err(input.lines().count(), "missing start line".into()));
    }
    Ok(fst)
}

/// Write a machine in the text format.
pub fn write_fst(fst: &Fst) -> String {
    let mut out = String::new();
    if let Some(start) = fst.start() {
        let _ = writeln!(out, "start {start}");
    }
    for (state, weight) in fst.finals() {
        if weight.is_top() {
            let _ = writeln!(out, "final {state}");
        } else {
            let _ = writeln!(out, "final {state} {weight}");
        }
    }
    for from in 0..fst.num_states() {
        for arc in fst.arcs_from(from) {
            let input = arc.input.as_deref().unwrap_or(EPS);
            let output = arc.output.as_deref().unwrap_or(EPS);
            if arc.weight.is_top() {
                let _ = writeln!(out, "{from} {} {input} {output}", arc.to);
            } else {
                let _ = writeln!(out, "{from} {} {input} {output} {}", arc.to, arc.weight);
            }
        }
    }
    out
}
