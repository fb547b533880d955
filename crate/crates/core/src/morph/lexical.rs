//! Compilation of the grammar into a weighted transducer cascade.
//!
//! Three machines are composed: an orthographic glide rule (a `y` between
//! `i` and a vowel may be a transition glide, deleted on the lexical side),
//! a gemination rule (a doubled consonant — or nothing, since the
//! orthography does not write gemination — realizes the lexical marker `_`),
//! and the lexicon machine proper, which spells stems and affixes in their
//! morphotactic slots and emits one tag symbol per morpheme. Composition
//! prunes the freely nondeterministic alternation rules down to the paths
//! the lexicon licenses.

use std::collections::{BTreeSet, HashMap};

use crate::fst::{FeatureStructure, Fst, StateId};
use crate::morph::grammar::{Grammar, Slot};
use crate::morph::template::GEMINATION_MARKER;
use crate::morph::PosTag;
use crate::sera::SeraTable;

/// Tag emitted at the end of each stem (`S<index into Grammar::lexemes>`)
/// or affix (`A<index into Grammar::affixes>`).
pub(crate) fn stem_tag(index: usize) -> String {
    format!("S{index}")
}

pub(crate) fn affix_tag(index: usize) -> String {
    format!("A{index}")
}

pub(crate) enum Tag {
    Stem(usize),
    Affix(usize),
}

pub(crate) fn parse_tag(tag: &str) -> Option<Tag> {
    let index = tag.get(1..)?.parse().ok()?;
    match tag.as_bytes().first() {
        Some(b'S') => Some(Tag::Stem(index)),
        Some(b'A') => Some(Tag::Affix(index)),
        _ => None,
    }
}

/// How many proclitics the nominal thread accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PrefixMode {
    /// The grammatical pattern: an optional preposition, then an optional
    /// genitive.
    Standard,
    /// A diagnostic over-acceptor: up to [`PROBE_PREFIX_CAP`] proclitics in
    /// any order, used to tell "no analysis at all" from "rejected by the
    /// proclitic pattern".
    Probe,
}

pub(crate) const PROBE_PREFIX_CAP: usize = 4;

fn top() -> FeatureStructure {
    FeatureStructure::top()
}

/// Chain arcs spelling `s`, one input codepoint each, no output.
fn add_seq(fst: &mut Fst, from: StateId, s: &str) -> StateId {
    let mut cur = from;
    for ch in s.chars() {
        let next = fst.add_state();
        fst.add_arc(cur, next, Some(&ch.to_string()), None, top());
        cur = next;
    }
    cur
}

/// Tag-emitting arc: no input, one output symbol, carrying the morpheme's
/// features.
fn add_tag(fst: &mut Fst, from: StateId, to: StateId, tag: &str, weight: FeatureStructure) {
    fst.add_arc(from, to, None, Some(tag), weight);
}

fn add_link(fst: &mut Fst, from: StateId, to: StateId) {
    fst.add_arc(from, to, None, None, top());
}

/// Spell every `(lexeme index, match form, features)` entry as a shared
/// prefix tree rooted at `root`; each entry ends with its stem tag into
/// `exit`.
fn add_trie(
    fst: &mut Fst,
    root: StateId,
    entries: &[(usize, String)],
    grammar: &Grammar,
    exit: StateId,
) {
    let mut nodes: HashMap<(StateId, char), StateId> = HashMap::new();
    for (index, form) in entries {
        let mut cur = root;
        for ch in form.chars() {
            let key = (cur, ch);
            cur = match nodes.get(&key) {
                Some(&next) => next,
                None => {
                    let next = fst.add_state();
                    fst.add_arc(cur, next, Some(&ch.to_string()), None, top());
                    nodes.insert(key, next);
                    next
                }
            };
        }
        add_tag(fst, cur, exit, &stem_tag(*index), grammar.lexemes()[*index].features.clone());
    }
}

fn slot_affixes(grammar: &Grammar, slot: Slot) -> Vec<usize> {
    grammar.affixes().iter().enumerate().filter(|(_, a)| a.slot == slot).map(|(i, _)| i).collect()
}

/// One affix: spell its surface from `from`, then emit its tag into `to`.
fn add_affix(fst: &mut Fst, grammar: &Grammar, index: usize, from: StateId, to: StateId) {
    let affix = &grammar.affixes()[index];
    let end = add_seq(fst, from, &affix.surface);
    add_tag(fst, end, to, &affix_tag(index), affix.features.clone());
}

fn stems_with_pos(grammar: &Grammar, want: fn(PosTag) -> bool) -> Vec<(usize, String)> {
    grammar
        .lexemes()
        .iter()
        .enumerate()
        .filter(|(_, l)| want(l.pos))
        .map(|(i, l)| (i, l.match_form.clone()))
        .collect()
}

/// The lexicon machine: lexical codepoints in, morpheme tags out.
pub(crate) fn build_lexicon_fst(grammar: &Grammar, mode: PrefixMode) -> Fst {
    let mut fst = Fst::new();
    let q0 = fst.add_state();
    fst.set_start(q0);

    let preps = slot_affixes(grammar, Slot::Prep);
    let gens = slot_affixes(grammar, Slot::Gen);
    let defs = slot_affixes(grammar, Slot::Def);
    let ncnjs = slot_affixes(grammar, Slot::NounConj);
    let vpres = slot_affixes(grammar, Slot::VerbPrefix);
    let vsufs = slot_affixes(grammar, Slot::VerbSuffix);
    let auxes = slot_affixes(grammar, Slot::Aux);
    let neg1s = slot_affixes(grammar, Slot::Neg1);
    let neg2s = slot_affixes(grammar, Slot::Neg2);

    // --- Nominals: [prep]? [gen]? stem [def]? [cnj]? ---
    let nominals = stems_with_pos(grammar, PosTag::is_nominal);
    if !nominals.is_empty() {
        let hub = fst.add_state();
        match mode {
            PrefixMode::Standard => {
                add_link(&mut fst, q0, hub);
                for &gi in &gens {
                    let after = fst.add_state();
                    add_affix(&mut fst, grammar, gi, q0, after);
                    add_link(&mut fst, after, hub);
                }
                for &pi in &preps {
                    let after_prep = fst.add_state();
                    add_affix(&mut fst, grammar, pi, q0, after_prep);
                    add_link(&mut fst, after_prep, hub);
                    for &gi in &gens {
                        let after_gen = fst.add_state();
                        add_affix(&mut fst, grammar, gi, after_prep, after_gen);
                        add_link(&mut fst, after_gen, hub);
                    }
                }
            }
            PrefixMode::Probe => {
                let mut cur = q0;
                for _ in 0..PROBE_PREFIX_CAP {
                    add_link(&mut fst, cur, hub);
                    let next = fst.add_state();
                    for &i in preps.iter().chain(&gens) {
                        add_affix(&mut fst, grammar, i, cur, next);
                    }
                    cur = next;
                }
                add_link(&mut fst, cur, hub);
            }
        }
        let done = fst.add_state();
        fst.set_final(done, top());
        add_trie(&mut fst, hub, &nominals, grammar, done);
        let defined = fst.add_state();
        fst.set_final(defined, top());
        for &di in &defs {
            add_affix(&mut fst, grammar, di, done, defined);
        }
        let conjoined = fst.add_state();
        fst.set_final(conjoined, top());
        for &ci in &ncnjs {
            add_affix(&mut fst, grammar, ci, done, conjoined);
            add_affix(&mut fst, grammar, ci, defined, conjoined);
        }
    }

    // --- Particles: bare stems ---
    let particles = stems_with_pos(grammar, PosTag::is_particle);
    if !particles.is_empty() {
        let done = fst.add_state();
        fst.set_final(done, top());
        add_trie(&mut fst, q0, &particles, grammar, done);
    }

    // --- Verbs, affirmative: [sbj]? stem [sbj]? [aux]? ---
    let verbs = stems_with_pos(grammar, |p| p == PosTag::V);
    if !verbs.is_empty() {
        let hub = fst.add_state();
        add_link(&mut fst, q0, hub);
        for &pi in &vpres {
            let after = fst.add_state();
            add_affix(&mut fst, grammar, pi, q0, after);
            add_link(&mut fst, after, hub);
        }
        let stem = fst.add_state();
        fst.set_final(stem, top());
        add_trie(&mut fst, hub, &verbs, grammar, stem);
        let suffixed = fst.add_state();
        fst.set_final(suffixed, top());
        for &si in &vsufs {
            add_affix(&mut fst, grammar, si, stem, suffixed);
        }
        let with_aux = fst.add_state();
        fst.set_final(with_aux, top());
        for &ai in &auxes {
            add_affix(&mut fst, grammar, ai, stem, with_aux);
            add_affix(&mut fst, grammar, ai, suffixed, with_aux);
        }

        // --- Verbs, negated: the circumfix needs its own copy of the whole
        // thread, because only the state after the closing suffix may be
        // final and feature weights cannot enforce that (a path that never
        // saw the prefix would still unify with a requirement at the final
        // state).
        if !neg1s.is_empty() && !neg2s.is_empty() {
            let negated = fst.add_state();
            for &ni in &neg1s {
                add_affix(&mut fst, grammar, ni, q0, negated);
            }
            let hub = fst.add_state();
            add_link(&mut fst, negated, hub);
            for &pi in &vpres {
                let after = fst.add_state();
                add_affix(&mut fst, grammar, pi, negated, after);
                add_link(&mut fst, after, hub);
            }
            let stem = fst.add_state();
            add_trie(&mut fst, hub, &verbs, grammar, stem);
            let suffixed = fst.add_state();
            for &si in &vsufs {
                add_affix(&mut fst, grammar, si, stem, suffixed);
            }
            let closed = fst.add_state();
            fst.set_final(closed, top());
            for &ni in &neg2s {
                add_affix(&mut fst, grammar, ni, stem, closed);
                add_affix(&mut fst, grammar, ni, suffixed, closed);
            }
        }
    }

    fst
}

/// Every codepoint that may occur on the lexical tape, gemination marker
/// excluded (it only ever appears via the gemination rule's output).
pub(crate) fn surface_alphabet(grammar: &Grammar, table: &SeraTable) -> BTreeSet<char> {
    let mut alphabet = table.consonant_chars();
    alphabet.extend(table.vowel_chars());
    alphabet.insert('W');
    for lexeme in grammar.lexemes() {
        alphabet.extend(lexeme.match_form.chars());
    }
    for affix in grammar.affixes() {
        alphabet.extend(affix.surface.chars());
    }
    alphabet.remove(&GEMINATION_MARKER);
    alphabet
}

/// Orthography-to-lexical gemination rule. Identity on everything, plus:
/// a doubled consonant may spell `consonant + marker` (written gemination),
/// and the marker may appear from nothing (gemination the orthography left
/// unwritten). The second option makes the machine wildly nondeterministic
/// on its own; it is only ever used composed with the lexicon, which prunes
/// markers the stems do not call for.
pub(crate) fn build_gemination_fst(alphabet: &BTreeSet<char>, consonants: &BTreeSet<char>) -> Fst {
    let marker = GEMINATION_MARKER.to_string();
    let mut fst = Fst::new();
    let q0 = fst.add_state();
    fst.set_start(q0);
    fst.set_final(q0, top());
    fst.add_arc(q0, q0, None, Some(&marker), top());
    for &c in alphabet {
        let sym = c.to_string();
        fst.add_arc(q0, q0, Some(&sym), Some(&sym), top());
        if consonants.contains(&c) {
            let half = fst.add_state();
            fst.add_arc(q0, half, Some(&sym), Some(&sym), top());
            fst.add_arc(half, q0, Some(&sym), Some(&marker), top());
        }
    }
    fst
}

/// Orthography-to-lexical glide rule: `y` between `i` and a vowel may be a
/// transition glide with no lexical counterpart. Deletion is optional; the
/// lexicon decides.
pub(crate) fn build_glide_fst(alphabet: &BTreeSet<char>, vowels: &BTreeSet<char>) -> Fst {
    let mut fst = Fst::new();
    let q0 = fst.add_state();
    let after_i = fst.add_state();
    let deleted = fst.add_state();
    fst.set_start(q0);
    fst.set_final(q0, top());
    fst.set_final(after_i, top());
    let target = |c: char| if c == 'i' { after_i } else { q0 };
    for &c in alphabet {
        let sym = c.to_string();
        fst.add_arc(q0, target(c), Some(&sym), Some(&sym), top());
        fst.add_arc(after_i, target(c), Some(&sym), Some(&sym), top());
        if vowels.contains(&c) {
            fst.add_arc(deleted, target(c), Some(&sym), Some(&sym), top());
        }
    }
    fst.add_arc(after_i, deleted, Some("y"), None, top());
    fst
}

/// The full analyzer machine: romanized orthography in, morpheme tags out.
pub(crate) fn build_cascade(grammar: &Grammar, table: &SeraTable, mode: PrefixMode) -> Fst {
    let alphabet = surface_alphabet(grammar, table);
    let glide = build_glide_fst(&alphabet, &table.vowel_chars());
    let gemination = build_gemination_fst(&alphabet, &table.consonant_chars());
    let lexicon = build_lexicon_fst(grammar, mode);
    glide.compose(&gemination.compose(&lexicon))
}
