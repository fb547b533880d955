//! Attribute–value feature structures with set-valued atoms and unification.
//!
//! A feature structure maps attribute names to values; a value is an atom, a
//! non-empty set of atoms recording unresolved ambiguity (e.g. the person and
//! gender readings of an agreement prefix), or a nested structure. Unification
//! is the meet operation: atoms unify when equal, an atom unifies with a set
//! containing it, two sets intersect, and structures combine attribute-wise
//! with attributes present on only one side adopted unchanged. An empty
//! intersection fails the whole unification; failure is an ordinary outcome
//! (`None`), not an error.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A value stored under an attribute.
///
/// Singleton sets are normalized to [`Value::Atom`] at construction time, so
/// equality on structures is canonical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom(String),
    Set(BTreeSet<String>),
    Node(FeatureStructure),
}

impl Value {
    pub fn atom(a: impl Into<String>) -> Value {
        Value::Atom(a.into())
    }

    /// Build a set value from the given atoms, normalizing a singleton to an
    /// atom.
    ///
    /// # Panics
    /// Panics when the iterator is empty: the empty ambiguity set is not a
    /// value (it denotes failure, which unification expresses as `None`).
    pub fn set_of<I, S>(atoms: I) -> Value
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = atoms.into_iter().map(Into::into).collect();
        Value::from_set(set).expect("ambiguity set must be non-empty")
    }

    fn from_set(set: BTreeSet<String>) -> Option<Value> {
        match set.len() {
            0 => None,
            1 => Some(Value::Atom(set.into_iter().next().unwrap())),
            _ => Some(Value::Set(set)),
        }
    }

    fn unify(a: &Value, b: &Value) -> Option<Value> {
        match (a, b) {
            (Value::Atom(x), Value::Atom(y)) => (x == y).then(|| Value::Atom(x.clone())),
            (Value::Atom(x), Value::Set(s)) | (Value::Set(s), Value::Atom(x)) => {
                s.contains(x).then(|| Value::Atom(x.clone()))
            }
            (Value::Set(s), Value::Set(t)) => Value::from_set(s.intersection(t).cloned().collect()),
            (Value::Node(m), Value::Node(n)) => m.unify(n).map(Value::Node),
            // An atom or set never unifies with a nested structure.
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => f.write_str(a),
            Value::Set(s) => {
                f.write_str("{")?;
                for (i, a) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(a)?;
                }
                f.write_str("}")
            }
            Value::Node(n) => n.fmt(f),
        }
    }
}

/// A (possibly nested) attribute–value map. The empty structure is the
/// unification identity, written `[]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureStructure {
    attrs: BTreeMap<String, Value>,
}

impl FeatureStructure {
    /// The identity structure (no attributes).
    pub fn top() -> FeatureStructure {
        FeatureStructure::default()
    }

    pub fn is_top(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn set(&mut self, attr: impl Into<String>, value: Value) -> &mut Self {
        self.attrs.insert(attr.into(), value);
        self
    }

    pub fn with(mut self, attr: impl Into<String>, value: Value) -> Self {
        self.set(attr, value);
        self
    }

    pub fn get(&self, attr: &str) -> Option<&Value> {
        self.attrs.get(attr)
    }

    pub fn attrs(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Unify two structures; `None` is unification failure, not a fault.
    pub fn unify(&self, other: &FeatureStructure) -> Option<FeatureStructure> {
        let mut out = self.attrs.clone();
        for (attr, vb) in &other.attrs {
            match out.entry(attr.clone()) {
                Entry::Vacant(e) => {
                    e.insert(vb.clone());
                }
                Entry::Occupied(mut e) => {
                    let merged = Value::unify(e.get(), vb)?;
                    e.insert(merged);
                }
            }
        }
        Some(FeatureStructure { attrs: out })
    }

    /// `self` subsumes `other` when unifying them adds nothing to `other`.
    pub fn subsumes(&self, other: &FeatureStructure) -> bool {
        self.unify(other).as_ref() == Some(other)
    }

    /// Parse the bracketed notation, e.g. `[sb:[p:{2,3},n:sg],asp:impf]`.
    /// `[]` is the identity structure.
    pub fn parse(input: &str) -> Result<FeatureStructure, FeatureParseError> {
        let chars: Vec<char> = input.chars().collect();
        let mut p = Parser { chars: &chars, pos: 0 };
        p.skip_ws();
        let fs = p.structure()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input after structure"));
        }
        Ok(fs)
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (attr, value)) in self.attrs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{attr}:{value}")?;
        }
        f.write_str("]")
    }
}

/// Error from [`FeatureStructure::parse`], with a character offset.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("feature syntax error at offset {pos}: {msg}")]
pub struct FeatureParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '+' | '.' | '\'' | '/' | '=')
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> FeatureParseError {
        FeatureParseError { pos: self.pos, msg: msg.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FeatureParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<String, FeatureParseError> {
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn structure(&mut self) -> Result<FeatureStructure, FeatureParseError> {
        self.expect('[')?;
        let mut fs = FeatureStructure::top();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(fs);
        }
        loop {
            self.skip_ws();
            let attr = self.ident()?;
            self.skip_ws();
            self.expect(':')?;
            self.skip_ws();
            let value = self.value()?;
            if fs.get(&attr).is_some() {
                return Err(self.err(format!("duplicate attribute '{attr}'")));
            }
            fs.set(attr, value);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    return Ok(fs);
                }
                _ => return Err(self.err("expected ',' or ']'")),
            }
        }
    }

    fn value(&mut self) -> Result<Value, FeatureParseError> {
        match self.peek() {
            Some('[') => Ok(Value::Node(self.structure()?)),
            Some('{') => {
                self.pos += 1;
                let mut set = BTreeSet::new();
                loop {
                    self.skip_ws();
                    set.insert(self.ident()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some('}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected ',' or '}'")),
                    }
                }
                Value::from_set(set).ok_or_else(|| self.err("empty ambiguity set"))
            }
            _ => Ok(Value::Atom(self.ident()?)),
        }
    }
}
