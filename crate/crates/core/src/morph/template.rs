//! Root-and-template morphology: a verb root is a sequence of radical
//! consonants, and a template interleaves them (referenced by 1-based
//! digits) with vowels and the gemination marker `_`.

use thiserror::Error;

/// Marks gemination of the preceding consonant in lexical (romanized) forms.
/// The orthography does not write it.
pub const GEMINATION_MARKER: char = '_';

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("root has no radicals")]
    EmptyRoot,
    #[error("template slot {digit} exceeds the {radicals} radicals of the root")]
    DigitOverflow { digit: u8, radicals: usize },
    #[error("template slot {digit} out of order (expected {expected})")]
    OutOfOrder { digit: u8, expected: u8 },
    #[error("template uses {used} of {radicals} radicals")]
    UnusedRadicals { used: usize, radicals: usize },
}

/// Interleave a root's radicals into a template. Each digit 1..=9 in the
/// template is replaced by the corresponding radical; digits must appear
/// exactly once each, in ascending order, and cover the whole root. All
/// other template codepoints are copied through.
///
/// `expand_template("ktt", "te1a2_e3")` → `"tekat_et"`.
pub fn expand_template(root: &str, template: &str) -> Result<String, TemplateError> {
    let radicals: Vec<char> = root.chars().collect();
    if radicals.is_empty() {
        return Err(TemplateError::EmptyRoot);
    }
    let mut expected: u8 = 1;
    let mut out = String::new();
    for c in template.chars() {
        if let Some(d) = c.to_digit(10) {
            let digit = d as u8;
            if digit != expected {
                return Err(TemplateError::OutOfOrder { digit, expected });
            }
            let Some(radical) = radicals.get(usize::from(digit) - 1) else {
                return Err(TemplateError::DigitOverflow { digit, radicals: radicals.len() });
            };
            out.push(*radical);
            expected += 1;
        } else {
            out.push(c);
        }
    }
    let used = usize::from(expected) - 1;
    if used != radicals.len() {
        return Err(TemplateError::UnusedRadicals { used, radicals: radicals.len() });
    }
    Ok(out)
}

/// Strip gemination markers: the spelling a lexical form takes in the
/// orthography.
pub fn orthographic_surface(lexical: &str) -> String {
    lexical.chars().filter(|c| *c != GEMINATION_MARKER).collect()
}
