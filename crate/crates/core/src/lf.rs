//! Lambda-calculus logical forms.
//!
//! Terms use de Bruijn indices internally, which makes alpha-equivalence
//! plain structural equality. The surface syntax writes lambdas as `L0.`,
//! `L1.`, ... with variables referring to the binder label, e.g.
//! `L0.L1.v|lose-past 1 0` for the transitive frame that takes its object
//! first. The named form `\lambda x. ...` used by gold lexicon annotations
//! is accepted on input as well.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::tags::TagTable;

/// A tagged constant. Feature suffixes (`past`, `BARE`, `pl`, ...) are part
/// of the constant's identity: the learner treats each form atomically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constant {
    pub tag: String,
    pub lemma: String,
    pub features: Vec<String>,
}

impl Constant {
    pub fn new(tag: &str, lemma: &str) -> Constant {
        Constant {
            tag: tag.into(),
            lemma: lemma.into(),
            features: Vec::new(),
        }
    }

    pub fn with_features(tag: &str, lemma: &str, features: &[&str]) -> Constant {
        Constant {
            tag: tag.into(),
            lemma: lemma.into(),
            features: features.iter().map(|f| f.to_string()).collect(),
        }
    }
}

/// A logical form in beta-normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// De Bruijn index: 0 is the innermost enclosing binder.
    Var(usize),
    Const(Constant),
    Lam(Box<Term>),
    /// Head applied to one or more arguments. In normal form the head is
    /// always a `Var` or `Const` and the argument list is non-empty.
    App(Box<Term>, Vec<Term>),
}

impl Term {
    pub fn lam(body: Term) -> Term {
        Term::Lam(Box::new(body))
    }

    pub fn app(head: Term, args: Vec<Term>) -> Term {
        Term::App(Box::new(head), args)
    }

    pub fn cst(tag: &str, lemma: &str) -> Term {
        Term::Const(Constant::new(tag, lemma))
    }

    /// Number of leading lambda binders.
    pub fn count_binders(&self) -> usize {
        match self {
            Term::Lam(b) => 1 + b.count_binders(),
            _ => 0,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Lam(b) => 1 + b.node_count(),
            Term::App(h, args) => {
                1 + h.node_count() + args.iter().map(|a| a.node_count()).sum::<usize>()
            }
        }
    }

    pub fn constant_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Const(_) => 1,
            Term::Lam(b) => b.constant_count(),
            Term::App(h, args) => {
                h.constant_count() + args.iter().map(|a| a.constant_count()).sum::<usize>()
            }
        }
    }

    /// True when no de Bruijn index escapes the term.
    pub fn is_closed(&self) -> bool {
        fn free_below(t: &Term, depth: usize) -> bool {
            match t {
                Term::Var(i) => *i >= depth,
                Term::Const(_) => false,
                Term::Lam(b) => free_below(b, depth + 1),
                Term::App(h, args) => {
                    free_below(h, depth) || args.iter().any(|a| free_below(a, depth))
                }
            }
        }
        !free_below(self, 0)
    }

    /// The constant heading the term once leading lambdas are stripped, if any.
    pub fn head_constant(&self) -> Option<&Constant> {
        match self {
            Term::Const(c) => Some(c),
            Term::Lam(b) => b.head_constant(),
            Term::App(h, _) => match h.as_ref() {
                Term::Const(c) => Some(c),
                _ => None,
            },
            Term::Var(_) => None,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        render_term(self, 0, Pos::Top, &mut out);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Alpha-equivalence. De Bruijn terms are already alpha-canonical, so this
/// is structural equality; it exists to keep call sites self-describing.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}

// ---------------------------------------------------------------------------
// Rendering

#[derive(Clone, Copy, PartialEq)]
enum Pos {
    Top,
    Arg,
}

fn render_term(t: &Term, depth: usize, pos: Pos, out: &mut String) {
    match t {
        Term::Var(i) => {
            // Binder labels count outermost-first, so index i at nesting
            // depth d refers to label d-1-i.
            out.push_str(&(depth - 1 - i).to_string());
        }
        Term::Const(c) => render_const(c, out),
        Term::Lam(_) => {
            if pos == Pos::Arg {
                out.push('(');
            }
            let mut cur = t;
            let mut d = depth;
            while let Term::Lam(b) = cur {
                out.push('L');
                out.push_str(&d.to_string());
                out.push('.');
                d += 1;
                cur = b;
            }
            render_term(cur, d, Pos::Top, out);
            if pos == Pos::Arg {
                out.push(')');
            }
        }
        Term::App(h, args) => {
            if pos == Pos::Arg {
                out.push('(');
            }
            render_term(h, depth, Pos::Arg, out);
            for a in args {
                out.push(' ');
                render_term(a, depth, Pos::Arg, out);
            }
            if pos == Pos::Arg {
                out.push(')');
            }
        }
    }
}

fn render_const(c: &Constant, out: &mut String) {
    let special = match (c.tag.as_str(), c.lemma.as_str()) {
        ("neg", "not") => Some("not"),
        ("Q", "Q") => Some("Q"),
        ("pro:int", "WH") => Some("WH"),
        ("conj", "&") => Some("&"),
        _ => None,
    };
    if let Some(s) = special {
        if c.features.is_empty() {
            out.push_str(s);
            return;
        }
    }
    if !c.tag.is_empty() {
        out.push_str(&c.tag);
        out.push('|');
    }
    out.push_str(&c.lemma);
    for f in &c.features {
        out.push('-');
        out.push_str(f);
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    /// Binder label from `L0.` or `\lambda x.`.
    Binder(String),
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '(' {
            toks.push((i, Tok::LParen));
            i += 1;
            continue;
        }
        if c == ')' {
            toks.push((i, Tok::RParen));
            i += 1;
            continue;
        }
        if text[i..].starts_with("\\lambda") {
            let start = i;
            i += "\\lambda".len();
            while i < bytes.len() && (bytes[i] as char).is_whitespace() {
                i += 1;
            }
            let name_start = i;
            while i < bytes.len() && bytes[i] as char != '.' {
                i += 1;
            }
            if i >= bytes.len() || name_start == i {
                return Err(Error::LfSyntax {
                    pos: start,
                    msg: "malformed \\lambda binder".into(),
                });
            }
            toks.push((start, Tok::Binder(text[name_start..i].trim().to_string())));
            i += 1; // '.'
            continue;
        }
        if c == 'L' {
            // `L<digits>.` is a binder; anything else starting with L is an atom.
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 && j < bytes.len() && bytes[j] as char == '.' {
                toks.push((i, Tok::Binder(text[i + 1..j].to_string())));
                i = j + 1;
                continue;
            }
        }
        let start = i;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            i += 1;
        }
        toks.push((start, Tok::Atom(text[start..i].to_string())));
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    env: Vec<String>,
    tags: &'a TagTable,
    text_len: usize,
    /// Accept bare non-numeric atoms as untagged constants (shell markers).
    lenient: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.text_len)
    }

    fn term(&mut self) -> Result<Term> {
        if let Some(Tok::Binder(_)) = self.peek() {
            let label = match self.toks[self.pos].1.clone() {
                Tok::Binder(l) => l,
                _ => unreachable!(),
            };
            self.pos += 1;
            self.env.push(label);
            let body = self.term()?;
            self.env.pop();
            return Ok(Term::lam(body));
        }
        let mut items = vec![self.item()?];
        while matches!(
            self.peek(),
            Some(Tok::Atom(_)) | Some(Tok::LParen) | Some(Tok::Binder(_))
        ) {
            items.push(self.item()?);
        }
        if items.len() == 1 {
            Ok(items.pop().unwrap())
        } else {
            let head = items.remove(0);
            Ok(Term::app(head, items))
        }
    }

    fn item(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(t)
                    }
                    _ => Err(Error::LfSyntax {
                        pos: self.here(),
                        msg: "expected `)`".into(),
                    }),
                }
            }
            Some(Tok::Binder(_)) => self.term(),
            Some(Tok::Atom(a)) => {
                self.pos += 1;
                self.atom(&a)
            }
            Some(Tok::RParen) | None => Err(Error::LfSyntax {
                pos: self.here(),
                msg: "expected a term".into(),
            }),
        }
    }

    fn atom(&mut self, text: &str) -> Result<Term> {
        if let Some(bar) = text.find('|') {
            let tag = &text[..bar];
            let rest = &text[bar + 1..];
            if !self.tags.contains(tag) {
                return Err(Error::UnknownTag(tag.to_string()));
            }
            let mut parts = rest.split('-');
            let lemma = parts.next().unwrap_or("");
            if lemma.is_empty() {
                return Err(Error::LfSyntax {
                    pos: self.here(),
                    msg: format!("constant `{text}` has an empty lemma"),
                });
            }
            return Ok(Term::Const(Constant {
                tag: tag.to_string(),
                lemma: lemma.to_string(),
                features: parts.map(|p| p.to_string()).collect(),
            }));
        }
        match text {
            "not" => return Ok(Term::cst("neg", "not")),
            "Q" => return Ok(Term::cst("Q", "Q")),
            "WH" => return Ok(Term::cst("pro:int", "WH")),
            "&" => return Ok(Term::cst("conj", "&")),
            _ => {}
        }
        // A bound variable, referenced by its binder label.
        if let Some(offset) = self.env.iter().rev().position(|l| l == text) {
            return Ok(Term::Var(offset));
        }
        if self.lenient && !text.bytes().all(|b| b.is_ascii_digit()) {
            return Ok(Term::Const(Constant::new("", text)));
        }
        Err(Error::UnboundVar(text.to_string()))
    }
}

fn parse_with(text: &str, tags: &TagTable, lenient: bool) -> Result<Term> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::LfSyntax {
            pos: 0,
            msg: "empty logical form".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        env: Vec::new(),
        tags,
        text_len: text.len(),
        lenient,
    };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return Err(Error::LfSyntax {
            pos: p.here(),
            msg: "trailing input".into(),
        });
    }
    Ok(normalize(t))
}

/// Parse the surface syntax into a beta-normal, closed term.
pub fn parse_lf(text: &str, tags: &TagTable) -> Result<Term> {
    parse_with(text, tags, false)
}

/// Parse a rendered shell logical form back into a `ShellTerm`. Marker
/// atoms (`verb`, `entity`, ...) become untagged constants.
pub fn parse_shell(text: &str, tags: &TagTable) -> Result<ShellTerm> {
    Ok(ShellTerm(parse_with(text, tags, true)?))
}

pub fn render_lf(t: &Term) -> String {
    t.render()
}

// ---------------------------------------------------------------------------
// Beta reduction

fn shift(t: &Term, by: usize, cutoff: usize) -> Term {
    match t {
        Term::Var(i) => {
            if *i >= cutoff {
                Term::Var(i + by)
            } else {
                Term::Var(*i)
            }
        }
        Term::Const(_) => t.clone(),
        Term::Lam(b) => Term::lam(shift(b, by, cutoff + 1)),
        Term::App(h, args) => Term::app(
            shift(h, by, cutoff),
            args.iter().map(|a| shift(a, by, cutoff)).collect(),
        ),
    }
}

/// Substitute `arg` for index `j`, decrementing indices above `j`.
fn subst(t: &Term, j: usize, arg: &Term) -> Term {
    match t {
        Term::Var(i) => {
            if *i == j {
                shift(arg, j, 0)
            } else if *i > j {
                Term::Var(i - 1)
            } else {
                Term::Var(*i)
            }
        }
        Term::Const(_) => t.clone(),
        Term::Lam(b) => Term::lam(subst(b, j + 1, arg)),
        Term::App(h, args) => Term::app(
            subst(h, j, arg),
            args.iter().map(|a| subst(a, j, arg)).collect(),
        ),
    }
}

/// Reduce to beta-normal form, flattening nested applications.
pub fn normalize(t: Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t,
        Term::Lam(b) => Term::lam(normalize(*b)),
        Term::App(h, args) => {
            let mut head = normalize(*h);
            let mut queue: std::collections::VecDeque<Term> =
                args.into_iter().map(normalize).collect();
            loop {
                match head {
                    Term::App(h2, a2) => {
                        for (k, a) in a2.into_iter().enumerate() {
                            queue.insert(k, a);
                        }
                        head = *h2;
                    }
                    Term::Lam(body) => {
                        if let Some(arg) = queue.pop_front() {
                            head = normalize(subst(&body, 0, &arg));
                        } else {
                            head = Term::Lam(body);
                            break;
                        }
                    }
                    _ => break,
                }
            }
            if queue.is_empty() {
                head
            } else {
                Term::app(head, queue.into_iter().collect())
            }
        }
    }
}

/// Beta-apply `functor` to `argument`. The functor must have at least one
/// leading binder; the result is in normal form.
pub fn apply(functor: &Term, argument: &Term) -> Result<Term> {
    match functor {
        Term::Lam(body) => Ok(normalize(subst(body, 0, argument))),
        _ => Err(Error::NoBinder),
    }
}

// ---------------------------------------------------------------------------
// Shell logical forms

/// A logical form with every constant replaced by its function-class marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShellTerm(pub Term);

impl ShellTerm {
    pub fn render(&self) -> String {
        self.0.render()
    }

    pub fn node_count(&self) -> usize {
        self.0.node_count()
    }
}

impl fmt::Display for ShellTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Replace every constant with its shell marker, preserving structure.
pub fn to_shell(t: &Term, tags: &TagTable) -> Result<ShellTerm> {
    fn rec(t: &Term, tags: &TagTable) -> Result<Term> {
        Ok(match t {
            Term::Var(i) => Term::Var(*i),
            Term::Const(c) => Term::Const(Constant::new("", tags.shell_marker(&c.tag)?)),
            Term::Lam(b) => Term::lam(rec(b, tags)?),
            Term::App(h, args) => Term::app(
                rec(h, tags)?,
                args.iter().map(|a| rec(a, tags)).collect::<Result<_>>()?,
            ),
        })
    }
    Ok(ShellTerm(rec(t, tags)?))
}

// ---------------------------------------------------------------------------
// Reverse application (splits)

#[derive(Debug, Clone)]
pub struct SplitOptions {
    /// Fresh binders introduced per split. Reverse application introduces
    /// exactly one, so values above 1 currently change nothing; 0 disables
    /// splitting entirely.
    pub max_new_binders: usize,
    /// Abstract proper subsets of a subterm's occurrences as well as the
    /// full occurrence set.
    pub abstract_subsets: bool,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            max_new_binders: 1,
            abstract_subsets: false,
        }
    }
}

/// Closed subterms eligible for abstraction, including curried application
/// prefixes (`f a` inside `f a b`) but excluding bare variables and the
/// term itself.
fn abstraction_candidates(t: &Term) -> BTreeSet<Term> {
    fn collect(t: &Term, root: bool, out: &mut BTreeSet<Term>) {
        if !root && !matches!(t, Term::Var(_)) && t.is_closed() {
            out.insert(t.clone());
        }
        match t {
            Term::Lam(b) => collect(b, false, out),
            Term::App(h, args) => {
                collect(h, false, out);
                for a in args {
                    collect(a, false, out);
                }
                for k in 1..args.len() {
                    let prefix = Term::app((**h).clone(), args[..k].to_vec());
                    if prefix.is_closed() {
                        out.insert(prefix);
                    }
                }
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    collect(t, true, &mut out);
    out
}

/// Rewrite occurrences of `sub` (full nodes and application prefixes) to a
/// variable bound by one fresh outermost binder. `take` is consulted once
/// per occurrence in preorder.
fn rewrite(t: &Term, sub: &Term, depth: usize, take: &mut dyn FnMut() -> bool) -> Term {
    if t == sub {
        if take() {
            return Term::Var(depth);
        }
        // An unreplaced occurrence cannot contain further full occurrences
        // (a term never properly contains itself) but its arguments may
        // still hold other matches, so fall through to the structural walk.
    }
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Lam(b) => Term::lam(rewrite(b, sub, depth + 1, take)),
        Term::App(h, args) => {
            // Proper application prefixes: `sub` may be `h a1 .. ak` for k < n.
            for k in 1..args.len() {
                let matches_prefix = Term::app((**h).clone(), args[..k].to_vec()) == *sub;
                if matches_prefix {
                    if take() {
                        let rest = args[k..]
                            .iter()
                            .map(|a| rewrite(a, sub, depth, take))
                            .collect();
                        return Term::app(Term::Var(depth), rest);
                    }
                    break; // at most one prefix length can match
                }
            }
            Term::app(
                rewrite(h, sub, depth, take),
                args.iter().map(|a| rewrite(a, sub, depth, take)).collect(),
            )
        }
    }
}

fn count_occurrences(t: &Term, sub: &Term) -> usize {
    let mut n = 0;
    let _ = rewrite(t, sub, 0, &mut || {
        n += 1;
        true
    });
    n
}

/// All reverse-application decompositions of `t`: pairs `(functor,
/// argument)` with `apply(functor, argument)` alpha-equal to `t`. The
/// argument is a closed subterm abstracted into one fresh outermost binder;
/// by default all of its occurrences are captured.
pub fn enumerate_splits(t: &Term, opts: &SplitOptions) -> Vec<(Term, Term)> {
    if opts.max_new_binders == 0 {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    for sub in abstraction_candidates(t) {
        let functor = Term::lam(rewrite(t, &sub, 0, &mut || true));
        out.insert((functor, sub.clone()));
        if opts.abstract_subsets {
            let n = count_occurrences(t, &sub);
            if n > 1 && n <= 12 {
                for mask in 1..(1u32 << n) - 1 {
                    let mut idx = 0;
                    let body = rewrite(t, &sub, 0, &mut || {
                        let taken = mask & (1 << idx) != 0;
                        idx += 1;
                        taken
                    });
                    out.insert((Term::lam(body), sub.clone()));
                }
            }
        }
    }
    out.into_iter().collect()
}
