//! Romanization to and from the ASCII transcription used for morphological
//! analysis ("SERA"-style): one lowercase/uppercase consonant letter per
//! family, a vowel letter per order (order 6 of plain families is written as
//! nothing), `W` for labialization, `::` for the full stop.
//!
//! The glottal family is special-cased: its carrier is the apostrophe and
//! all seven of its vowels are written explicitly (`'a 'u 'i 'A 'E 'I 'o`).
//! An apostrophe not followed by a glottal vowel is read back as a literal
//! apostrophe, so quoted romanized text survives a round trip.

use std::collections::HashMap;
use std::sync::LazyLock;

use thiserror::Error;

use crate::ethiopic::{
    char_class, compose_syllable, decompose, CharClass, Family, TableParseError,
};

pub const SENTENCE_SEPARATOR: &str = "::";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeraError {
    #[error("no romanization for syllable {c:?}")]
    UnmappedSyllable { c: char },
    #[error("unparsable romanized text at byte offset {offset}")]
    Syntax { offset: usize },
}

#[derive(Clone, Debug)]
struct FamilyEntry {
    name: String,
    glottal: bool,
}

/// Bidirectional transliteration table, loaded from a tab-separated file:
/// a `vowels` row and a `glottal-vowels` row (seven comma-separated
/// spellings each, empty meaning "written as nothing"), then one
/// `base-codepoint<TAB>consonant[<TAB>glottal]` row per family.
#[derive(Clone, Debug)]
pub struct SeraTable {
    families: HashMap<char, FamilyEntry>,
    by_name: Vec<(String, char)>,
    /// (spelling, order) sorted longest spelling first; `plain_default` is
    /// the order written as nothing, if any.
    plain_vowels: Vec<(String, u8)>,
    plain_default: Option<u8>,
    glottal_vowels: Vec<(String, u8)>,
    glottal_default: Option<u8>,
}

pub const EMBEDDED_SERA: &str = include_str!("../data/sera.tsv");

static DEFAULT_SERA: LazyLock<SeraTable> = LazyLock::new(|| {
    SeraTable::parse(EMBEDDED_SERA).expect("embedded romanization table is valid")
});

fn parse_vowel_row(
    line: usize,
    field: &str,
) -> Result<(Vec<(String, u8)>, Option<u8>), TableParseError> {
    let spellings: Vec<&str> = field.split(',').collect();
    if spellings.len() != 7 {
        return Err(TableParseError {
            line,
            msg: format!("expected 7 comma-separated vowels, got {}", spellings.len()),
        });
    }
    let mut vowels = Vec::new();
    let mut default = None;
    for (i, s) in spellings.iter().enumerate() {
        let order = (i + 1) as u8;
        if s.is_empty() {
            if default.replace(order).is_some() {
                return Err(TableParseError {
                    line,
                    msg: "more than one vowel written as nothing".into(),
                });
            }
        } else {
            vowels.push((s.to_string(), order));
        }
    }
    vowels.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok((vowels, default))
}

impl SeraTable {
    pub fn parse(src: &str) -> Result<SeraTable, TableParseError> {
        let mut families = HashMap::new();
        let mut by_name: Vec<(String, char)> = Vec::new();
        let mut plain = None;
        let mut glottal = None;
        for (line, raw) in src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        {
            let err = |msg: String| TableParseError { line, msg };
            let fields: Vec<&str> = raw.split('\t').collect();
            match fields[0] {
                "vowels" if fields.len() == 2 => {
                    plain = Some(parse_vowel_row(line, fields[1])?);
                }
                "glottal-vowels" if fields.len() == 2 => {
                    glottal = Some(parse_vowel_row(line, fields[1])?);
                }
                "vowels" | "glottal-vowels" => {
                    return Err(err("vowel rows take exactly one field".into()));
                }
                base => {
                    if !(2..=3).contains(&fields.len()) {
                        return Err(err("expected base<TAB>consonant[<TAB>glottal]".into()));
                    }
                    let mut chars = base.chars();
                    let (Some(c), None) = (chars.next(), chars.next()) else {
                        return Err(err(format!("{base:?} is not a single codepoint")));
                    };
                    match decompose(c) {
                        Some(p) if p.order == 1 && !p.labialized => {}
                        _ => return Err(err(format!("{c:?} is not an order-1 family base"))),
                    }
                    let name = fields[1].to_string();
                    if name.is_empty() || !name.is_ascii() {
                        return Err(err(format!("consonant {name:?} must be non-empty ASCII")));
                    }
                    let is_glottal = match fields.get(2) {
                        None => false,
                        Some(&"glottal") => true,
                        Some(other) => return Err(err(format!("unknown flag {other:?}"))),
                    };
                    if by_name.iter().any(|(n, _)| *n == name) {
                        return Err(err(format!("duplicate consonant {name:?}")));
                    }
                    if families
                        .insert(c, FamilyEntry { name: name.clone(), glottal: is_glottal })
                        .is_some()
                    {
                        return Err(err(format!("duplicate family {c:?}")));
                    }
                    by_name.push((name, c));
                }
            }
        }
        let Some((plain_vowels, plain_default)) = plain else {
            return Err(TableParseError { line: 0, msg: "missing vowels row".into() });
        };
        let Some((glottal_vowels, glottal_default)) = glottal else {
            return Err(TableParseError { line: 0, msg: "missing glottal-vowels row".into() });
        };
        if families.is_empty() {
            return Err(TableParseError { line: 0, msg: "no consonant families".into() });
        }
        by_name.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(SeraTable {
            families,
            by_name,
            plain_vowels,
            plain_default,
            glottal_vowels,
            glottal_default,
        })
    }

    /// The table shipped with the crate (29 families).
    pub fn embedded() -> &'static SeraTable {
        &DEFAULT_SERA
    }

    /// (family, consonant spelling, is-glottal) for every mapped family.
    pub fn families(&self) -> impl Iterator<Item = (Family, &str, bool)> {
        let mut rows: Vec<_> =
            self.families.iter().map(|(c, e)| (Family(*c), e.name.as_str(), e.glottal)).collect();
        rows.sort_by_key(|(f, _, _)| f.0);
        rows.into_iter()
    }

    /// Codepoints of all single-codepoint consonant spellings.
    pub fn consonant_chars(&self) -> std::collections::BTreeSet<char> {
        self.by_name
            .iter()
            .filter_map(|(name, _)| {
                let mut chars = name.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Some(c),
                    _ => None,
                }
            })
            .collect()
    }

    /// Codepoints appearing in any vowel spelling (plain or glottal).
    pub fn vowel_chars(&self) -> std::collections::BTreeSet<char> {
        self.plain_vowels
            .iter()
            .chain(self.glottal_vowels.iter())
            .flat_map(|(s, _)| s.chars())
            .collect()
    }

    fn vowels_for(&self, glottal: bool) -> (&[(String, u8)], Option<u8>) {
        if glottal {
            (&self.glottal_vowels, self.glottal_default)
        } else {
            (&self.plain_vowels, self.plain_default)
        }
    }

    fn vowel_spelling(&self, glottal: bool, order: u8) -> Option<&str> {
        let (vowels, default) = self.vowels_for(glottal);
        if default == Some(order) {
            return Some("");
        }
        vowels.iter().find(|(_, o)| *o == order).map(|(s, _)| s.as_str())
    }
}

/// Romanize syllabic text. The full stop becomes `::`; whitespace, digits,
/// and punctuation pass through; syllables of families missing from the
/// table (and labialized glottals) are errors.
pub fn to_sera(text: &str, table: &SeraTable) -> Result<String, SeraError> {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if let Some(parts) = decompose(c) {
            let entry =
                table.families.get(&parts.family.0).ok_or(SeraError::UnmappedSyllable { c })?;
            if parts.labialized && entry.glottal {
                return Err(SeraError::UnmappedSyllable { c });
            }
            out.push_str(&entry.name);
            if parts.labialized {
                out.push('W');
            }
            // Labialization is always written with the plain vowel letters.
            let vowel = table
                .vowel_spelling(entry.glottal && !parts.labialized, parts.order)
                .ok_or(SeraError::UnmappedSyllable { c })?;
            out.push_str(vowel);
        } else if c == '።' {
            out.push_str(SENTENCE_SEPARATOR);
        } else if ('\u{1200}'..='\u{137F}').contains(&c) && char_class(c) == CharClass::Other {
            return Err(SeraError::UnmappedSyllable { c });
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Parse romanized text back to syllabic script. Whitespace passes through,
/// `::` becomes the full stop, and a lone apostrophe stays an apostrophe;
/// anything else unparsable is an error carrying its byte offset.
pub fn from_sera(text: &str, table: &SeraTable) -> Result<String, SeraError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let rest = |i: usize| -> &str { &text[chars[i].0..] };
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        if c.is_whitespace() {
            out.push(c);
            i += 1;
            continue;
        }
        if rest(i).starts_with(SENTENCE_SEPARATOR) {
            out.push('።');
            i += SENTENCE_SEPARATOR.chars().count();
            continue;
        }
        let Some((name, base)) =
            table.by_name.iter().find(|(name, _)| rest(i).starts_with(name.as_str()))
        else {
            return Err(SeraError::Syntax { offset });
        };
        let entry = &table.families[base];
        let mut j = i + name.chars().count();
        let labialized = !entry.glottal && matches!(chars.get(j), Some((_, 'W')));
        if labialized {
            j += 1;
        }
        let after = if j < chars.len() { rest(j) } else { "" };
        let (vowels, default) = table.vowels_for(entry.glottal && !labialized);
        let vowel = vowels.iter().find(|(s, _)| after.starts_with(s.as_str()));
        let order = match (vowel, default) {
            (Some((s, o)), _) => {
                j += s.chars().count();
                *o
            }
            (None, Some(o)) => o,
            (None, None) => {
                // No explicit vowel and none implied: for the apostrophe
                // carrier this is ordinary punctuation, otherwise a syntax
                // error.
                if name == "'" {
                    out.push('\'');
                    i += 1;
                    continue;
                }
                return Err(SeraError::Syntax { offset });
            }
        };
        match compose_syllable(Family(*base), order, labialized) {
            Ok(syllable) => {
                out.push(syllable);
                i = j;
            }
            Err(_) => return Err(SeraError::Syntax { offset }),
        }
    }
    Ok(out)
}
