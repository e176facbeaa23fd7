//! CCG categories: syntax, rendering, and reverse application.

use std::fmt;

use crate::error::{Error, Result};

/// The atomic category inventory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    S,
    Sq,
    Swhq,
    NP,
    N,
}

impl Atom {
    pub const ALL: [Atom; 5] = [Atom::S, Atom::Sq, Atom::Swhq, Atom::NP, Atom::N];

    pub fn as_str(&self) -> &'static str {
        match self {
            Atom::S => "S",
            Atom::Sq => "Sq",
            Atom::Swhq => "Swhq",
            Atom::NP => "NP",
            Atom::N => "N",
        }
    }

    pub fn parse(s: &str) -> Option<Atom> {
        match s {
            "S" => Some(Atom::S),
            "Sq" => Some(Atom::Sq),
            "Swhq" => Some(Atom::Swhq),
            "NP" => Some(Atom::NP),
            "N" => Some(Atom::N),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slash {
    /// `/`: argument to the right.
    Forward,
    /// `\`: argument to the left.
    Backward,
}

/// A CCG category. Slash operators associate left, so `S\NP/NP` parses as
/// `(S\NP)/NP`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Atom(Atom),
    Complex(Box<Category>, Slash, Box<Category>),
}

impl Category {
    pub fn atom(a: Atom) -> Category {
        Category::Atom(a)
    }

    pub fn forward(result: Category, arg: Category) -> Category {
        Category::Complex(Box::new(result), Slash::Forward, Box::new(arg))
    }

    pub fn backward(result: Category, arg: Category) -> Category {
        Category::Complex(Box::new(result), Slash::Backward, Box::new(arg))
    }

    /// Total slash count anywhere in the category.
    pub fn slash_count(&self) -> usize {
        match self {
            Category::Atom(_) => 0,
            Category::Complex(r, _, a) => 1 + r.slash_count() + a.slash_count(),
        }
    }

    /// Slashes along the result spine only: the arity of the category.
    pub fn spine_arity(&self) -> usize {
        match self {
            Category::Atom(_) => 0,
            Category::Complex(r, _, _) => 1 + r.spine_arity(),
        }
    }

    /// The atom at the end of the result spine.
    pub fn target(&self) -> Atom {
        match self {
            Category::Atom(a) => *a,
            Category::Complex(r, _, _) => r.target(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, false);
        out
    }

    fn render_into(&self, out: &mut String, parenthesize: bool) {
        match self {
            Category::Atom(a) => out.push_str(a.as_str()),
            Category::Complex(r, s, a) => {
                if parenthesize {
                    out.push('(');
                }
                r.render_into(out, false);
                out.push(match s {
                    Slash::Forward => '/',
                    Slash::Backward => '\\',
                });
                a.render_into(out, matches!(a.as_ref(), Category::Complex(..)));
                if parenthesize {
                    out.push(')');
                }
            }
        }
    }

    /// Render with slash direction collapsed to `|`, e.g. `S|NP|NP`.
    pub fn render_collapsed(&self) -> String {
        fn rec(c: &Category, out: &mut String, parens: bool) {
            match c {
                Category::Atom(a) => out.push_str(a.as_str()),
                Category::Complex(r, _, a) => {
                    if parens {
                        out.push('(');
                    }
                    rec(r, out, false);
                    out.push('|');
                    rec(a, out, matches!(a.as_ref(), Category::Complex(..)));
                    if parens {
                        out.push(')');
                    }
                }
            }
        }
        let mut out = String::new();
        rec(self, &mut out, false);
        out
    }

    /// Parse a category. Both `\` and the doubled `\\` used by annotation
    /// files are accepted for the backward slash.
    pub fn parse(text: &str) -> Result<Category> {
        let cleaned = text.replace("\\\\", "\\");
        let mut p = CatParser {
            text: &cleaned,
            bytes: cleaned.as_bytes(),
            pos: 0,
        };
        let c = p.category()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(Error::CategorySyntax(format!(
                "trailing input at byte {} in `{text}`",
                p.pos
            )));
        }
        Ok(c)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

struct CatParser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> CatParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && (self.bytes[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn category(&mut self) -> Result<Category> {
        let mut cur = self.operand()?;
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos).map(|b| *b as char) {
                Some('/') => {
                    self.pos += 1;
                    let arg = self.operand()?;
                    cur = Category::forward(cur, arg);
                }
                Some('\\') => {
                    self.pos += 1;
                    let arg = self.operand()?;
                    cur = Category::backward(cur, arg);
                }
                _ => return Ok(cur),
            }
        }
    }

    fn operand(&mut self) -> Result<Category> {
        self.skip_ws();
        match self.bytes.get(self.pos).map(|b| *b as char) {
            Some('(') => {
                self.pos += 1;
                let c = self.category()?;
                self.skip_ws();
                if self.bytes.get(self.pos) == Some(&b')') {
                    self.pos += 1;
                    Ok(c)
                } else {
                    Err(Error::CategorySyntax(format!(
                        "expected `)` at byte {} in `{}`",
                        self.pos, self.text
                    )))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .bytes
                    .get(self.pos)
                    .map(|b| (*b as char).is_ascii_alphanumeric())
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                Atom::parse(name).map(Category::Atom).ok_or_else(|| {
                    Error::CategorySyntax(format!("unknown atom `{name}` in `{}`", self.text))
                })
            }
            other => Err(Error::CategorySyntax(format!(
                "unexpected {other:?} at byte {} in `{}`",
                self.pos, self.text
            ))),
        }
    }
}

/// Undo one level of type raising: `T/(T\A)` and `T\(T/A)` both reduce to
/// `A`. Applied repeatedly until the category is stable.
pub fn strip_type_raising(cat: &Category) -> Category {
    let mut cur = cat.clone();
    loop {
        let next = match &cur {
            Category::Complex(t1, s, inner) => match inner.as_ref() {
                Category::Complex(t2, s2, a) if t1 == t2 && *s != *s2 => Some((**a).clone()),
                _ => None,
            },
            _ => None,
        };
        match next {
            Some(c) => cur = c,
            None => return cur,
        }
    }
}

/// One reverse application step: `left` and `right` combine back into the
/// parent by forward (`functor_left = true`) or backward application.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CatSplit {
    pub left: Category,
    pub right: Category,
    pub functor_left: bool,
}

/// Default argument candidates for reverse application, before the seen-
/// category registry is merged in.
pub fn default_argument_candidates() -> Vec<Category> {
    vec![
        Category::atom(Atom::NP),
        Category::atom(Atom::N),
        Category::atom(Atom::S),
        Category::backward(Category::atom(Atom::S), Category::atom(Atom::NP)),
        Category::forward(Category::atom(Atom::S), Category::atom(Atom::NP)),
    ]
}

/// All binary splits of `cat` by reverse application. For each candidate
/// argument `Y` this yields `(Y, cat\Y)` and `(cat/Y, Y)`, keeping splits
/// whose children both respect `max_slashes`. `registry` extends the fixed
/// candidate pool with previously seen categories. Output is sorted by
/// rendered text for determinism.
pub fn split_category(
    cat: &Category,
    registry: &[Category],
    max_slashes: usize,
) -> Vec<CatSplit> {
    if cat.slash_count() >= max_slashes {
        // Both children would need to stay within the cap, but the functor
        // child always carries one more slash than the parent.
        return Vec::new();
    }
    let mut candidates = default_argument_candidates();
    for c in registry {
        if !candidates.contains(c) {
            candidates.push(c.clone());
        }
    }
    let mut out: Vec<CatSplit> = Vec::new();
    for arg in candidates {
        if arg.slash_count() > max_slashes {
            continue;
        }
        let functor_fwd = Category::forward(cat.clone(), arg.clone());
        let functor_bwd = Category::backward(cat.clone(), arg.clone());
        if functor_bwd.slash_count() <= max_slashes {
            out.push(CatSplit {
                left: arg.clone(),
                right: functor_bwd,
                functor_left: false,
            });
        }
        if functor_fwd.slash_count() <= max_slashes {
            out.push(CatSplit {
                left: functor_fwd,
                right: arg,
                functor_left: true,
            });
        }
    }
    out.sort_by(|a, b| {
        (a.left.render(), a.right.render()).cmp(&(b.left.render(), b.right.render()))
    });
    out.dedup();
    out
}
