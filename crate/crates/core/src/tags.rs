//! Montagovian semantic types and the CHILDES tag tables.
//!
//! The tag tables drive two things: the marker written on each constant of a
//! shell logical form, and the set of semantic types a tagged constant may
//! take during type inference. They ship as a human-editable TSV file so
//! corpora with extended tag sets can be supported without a rebuild.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// A Montagovian semantic type. `Var` only appears in schematic table rows
/// (the `X` of the conjunction/coordination entries) and as scratch state
/// during unification, never in a reported concrete type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemanticType {
    E,
    T,
    Var(u32),
    Arrow(Box<SemanticType>, Box<SemanticType>),
}

impl SemanticType {
    pub fn arrow(from: SemanticType, to: SemanticType) -> SemanticType {
        SemanticType::Arrow(Box::new(from), Box::new(to))
    }

    /// Number of arguments along the arrow spine: `<e,<e,t>>` has arity 2.
    pub fn arity(&self) -> usize {
        match self {
            SemanticType::Arrow(_, to) => 1 + to.arity(),
            _ => 0,
        }
    }

    pub fn is_concrete(&self) -> bool {
        match self {
            SemanticType::E | SemanticType::T => true,
            SemanticType::Var(_) => false,
            SemanticType::Arrow(a, b) => a.is_concrete() && b.is_concrete(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            SemanticType::E => "e".into(),
            SemanticType::T => "t".into(),
            SemanticType::Var(i) => {
                if *i == 0 {
                    "X".into()
                } else {
                    format!("X{i}")
                }
            }
            SemanticType::Arrow(a, b) => format!("<{},{}>", a.render(), b.render()),
        }
    }

    pub fn parse(text: &str) -> Result<SemanticType> {
        let mut chars = text.char_indices().peekable();
        let ty = parse_type(text, &mut chars)?;
        if let Some((pos, _)) = chars.next() {
            return Err(Error::TypeSyntax(format!(
                "trailing input at byte {pos} in `{text}`"
            )));
        }
        Ok(ty)
    }
}

type Chars<'a> = std::iter::Peekable<std::str::CharIndices<'a>>;

fn parse_type(text: &str, chars: &mut Chars) -> Result<SemanticType> {
    match chars.next() {
        Some((_, 'e')) => Ok(SemanticType::E),
        Some((_, 't')) => Ok(SemanticType::T),
        Some((_, 'X')) => Ok(SemanticType::Var(0)),
        Some((_, '<')) => {
            let from = parse_type(text, chars)?;
            expect(text, chars, ',')?;
            let to = parse_type(text, chars)?;
            expect(text, chars, '>')?;
            Ok(SemanticType::arrow(from, to))
        }
        Some((pos, c)) => Err(Error::TypeSyntax(format!(
            "unexpected `{c}` at byte {pos} in `{text}`"
        ))),
        None => Err(Error::TypeSyntax(format!("unexpected end of `{text}`"))),
    }
}

fn expect(text: &str, chars: &mut Chars, want: char) -> Result<()> {
    match chars.next() {
        Some((_, c)) if c == want => Ok(()),
        other => Err(Error::TypeSyntax(format!(
            "expected `{want}` in `{text}`, found {other:?}"
        ))),
    }
}

/// What Table 6 says about a tag: a set of candidate types, or one of the
/// special markers.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeEntry {
    Types(Vec<SemanticType>),
    NotConsidered,
    /// Copulas; assigned the fixed type `<e,<e,t>>` at inference time.
    HandledSeparately,
    /// The `prep` row; behaviour is configurable (see `TypeTables`).
    Prep,
}

#[derive(Debug, Clone)]
pub struct TagRow {
    pub shell_marker: String,
    pub types: TypeEntry,
}

/// The tag inventory: one row per CHILDES POS tag.
#[derive(Debug, Clone)]
pub struct TagTable {
    rows: BTreeMap<String, TagRow>,
}

const BUILTIN_TSV: &str = include_str!("data/tags.tsv");

impl TagTable {
    /// The table shipped with the crate.
    pub fn builtin() -> &'static TagTable {
        static TABLE: OnceLock<TagTable> = OnceLock::new();
        TABLE.get_or_init(|| TagTable::from_str(BUILTIN_TSV).expect("builtin tag table"))
    }

    pub fn from_str(text: &str) -> Result<TagTable> {
        let mut rows = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (tag, marker, types) = match (fields.next(), fields.next(), fields.next()) {
                (Some(t), Some(m), Some(ty)) => (t.trim(), m.trim(), ty.trim()),
                _ => {
                    return Err(Error::TagTable(format!(
                        "line {}: expected 3 tab-separated fields",
                        i + 1
                    )))
                }
            };
            let types = match types {
                "not_considered" => TypeEntry::NotConsidered,
                "handled_separately" => TypeEntry::HandledSeparately,
                "prep" => TypeEntry::Prep,
                spec => TypeEntry::Types(
                    spec.split(';')
                        .map(|s| SemanticType::parse(s.trim()))
                        .collect::<Result<Vec<_>>>()?,
                ),
            };
            rows.insert(
                tag.to_string(),
                TagRow {
                    shell_marker: marker.to_string(),
                    types,
                },
            );
        }
        if rows.is_empty() {
            return Err(Error::TagTable("empty tag table".into()));
        }
        Ok(TagTable { rows })
    }

    pub fn from_path(path: &std::path::Path) -> Result<TagTable> {
        TagTable::from_str(&std::fs::read_to_string(path)?)
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.rows.contains_key(tag)
    }

    pub fn shell_marker(&self, tag: &str) -> Result<&str> {
        self.rows
            .get(tag)
            .map(|r| r.shell_marker.as_str())
            .ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    pub fn type_entry(&self, tag: &str) -> Result<&TypeEntry> {
        self.rows
            .get(tag)
            .map(|r| &r.types)
            .ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(|k| k.as_str())
    }
}
