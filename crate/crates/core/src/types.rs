//! Semantic type inference for logical forms and the congruence check
//! between CCG categories and logical forms.

use std::collections::BTreeSet;

use crate::ccg::{Atom, Category, strip_type_raising};
use crate::lf::{Constant, Term};
use crate::tags::{SemanticType, TagTable, TypeEntry};

/// Configuration for the type system.
#[derive(Debug, Clone)]
pub struct TypeTables {
    /// Treat prepositions like adverbs (skipped during typing) instead of
    /// assigning them candidate types.
    pub prep_as_not_considered: bool,
}

impl Default for TypeTables {
    fn default() -> Self {
        TypeTables {
            prep_as_not_considered: true,
        }
    }
}

/// The fixed copula type `<e,<e,t>>`.
fn copula_type() -> SemanticType {
    SemanticType::arrow(
        SemanticType::E,
        SemanticType::arrow(SemanticType::E, SemanticType::T),
    )
}

/// The adjectival predicate type `<<<e,t>,<e,t>>,<e,t>>` assumed for the
/// `hasproperty` predicate in annotated corpora.
fn hasproperty_type() -> SemanticType {
    let et = SemanticType::arrow(SemanticType::E, SemanticType::T);
    SemanticType::arrow(SemanticType::arrow(et.clone(), et.clone()), et)
}

/// Candidate types for a constant, or `None` when the constant's tag is not
/// considered by the type system (so any use passes vacuously).
pub fn constant_type_candidates(
    c: &Constant,
    tags: &TagTable,
    tables: &TypeTables,
) -> Option<Vec<SemanticType>> {
    let entry = match tags.type_entry(&c.tag) {
        Ok(e) => e,
        Err(_) => return None,
    };
    let mut out: Vec<SemanticType> = match entry {
        TypeEntry::Types(ts) => ts.clone(),
        TypeEntry::NotConsidered => return None,
        TypeEntry::HandledSeparately => vec![copula_type()],
        TypeEntry::Prep => {
            if tables.prep_as_not_considered {
                return None;
            }
            vec![SemanticType::arrow(
                SemanticType::E,
                SemanticType::arrow(SemanticType::E, SemanticType::T),
            )]
        }
    };
    if c.lemma == "hasproperty" {
        let hp = hasproperty_type();
        if !out.contains(&hp) {
            out.push(hp);
        }
    }
    // Bare nouns can denote individuals directly.
    if c.features.iter().any(|f| f == "BARE") && !out.contains(&SemanticType::E) {
        out.push(SemanticType::E);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Unification

type Subst = std::collections::BTreeMap<u32, SemanticType>;

fn walk(t: &SemanticType, s: &Subst) -> SemanticType {
    match t {
        SemanticType::Var(i) => match s.get(i) {
            Some(bound) => walk(bound, s),
            None => t.clone(),
        },
        _ => t.clone(),
    }
}

fn occurs(i: u32, t: &SemanticType, s: &Subst) -> bool {
    match walk(t, s) {
        SemanticType::Var(j) => i == j,
        SemanticType::Arrow(a, b) => occurs(i, &a, s) || occurs(i, &b, s),
        _ => false,
    }
}

fn unify(a: &SemanticType, b: &SemanticType, s: &mut Subst) -> bool {
    let a = walk(a, s);
    let b = walk(b, s);
    match (&a, &b) {
        (SemanticType::Var(i), SemanticType::Var(j)) if i == j => true,
        (SemanticType::Var(i), other) | (other, SemanticType::Var(i)) => {
            if occurs(*i, other, s) {
                false
            } else {
                s.insert(*i, other.clone());
                true
            }
        }
        (SemanticType::E, SemanticType::E) | (SemanticType::T, SemanticType::T) => true,
        (SemanticType::Arrow(a1, b1), SemanticType::Arrow(a2, b2)) => {
            unify(a1, a2, s) && unify(b1, b2, s)
        }
        _ => false,
    }
}

fn resolve(t: &SemanticType, s: &Subst) -> SemanticType {
    match walk(t, s) {
        SemanticType::Arrow(a, b) => SemanticType::arrow(resolve(&a, s), resolve(&b, s)),
        other => other,
    }
}

/// Rename all schematic variables in `t` so they are fresh relative to
/// `next`, which is advanced past any variables used.
fn freshen(t: &SemanticType, next: &mut u32, map: &mut std::collections::BTreeMap<u32, u32>) -> SemanticType {
    match t {
        SemanticType::Var(i) => {
            let id = *map.entry(*i).or_insert_with(|| {
                let id = *next;
                *next += 1;
                id
            });
            SemanticType::Var(id)
        }
        SemanticType::Arrow(a, b) => {
            SemanticType::arrow(freshen(a, next, map), freshen(b, next, map))
        }
        SemanticType::E => SemanticType::E,
        SemanticType::T => SemanticType::T,
    }
}

struct Infer<'a> {
    tags: &'a TagTable,
    tables: &'a TypeTables,
    next_var: u32,
    /// Complete typings found so far, as resolved types of the root term.
    results: BTreeSet<SemanticType>,
    /// Cap on branching to keep pathological terms cheap.
    budget: usize,
}

impl<'a> Infer<'a> {
    fn fresh(&mut self) -> SemanticType {
        let v = SemanticType::Var(self.next_var);
        self.next_var += 1;
        v
    }

    /// All substitutions under which `t` can take type `want`, extending `s`.
    fn typings_of(
        &mut self,
        t: &Term,
        env: &[SemanticType],
        want: &SemanticType,
        s: &Subst,
    ) -> Vec<Subst> {
        let mut out = Vec::new();
        self.typings_into(t, env, want, s.clone(), &mut out);
        out
    }

    fn typings_into(
        &mut self,
        t: &Term,
        env: &[SemanticType],
        want: &SemanticType,
        s: Subst,
        out: &mut Vec<Subst>,
    ) {
        if self.budget == 0 {
            return;
        }
        match t {
            Term::Var(i) => {
                let mut s = s;
                let ty = env[env.len() - 1 - i].clone();
                if unify(&ty, want, &mut s) {
                    out.push(s);
                }
            }
            Term::Const(c) => match constant_type_candidates(c, self.tags, self.tables) {
                None => out.push(s),
                Some(cands) => {
                    for cand in cands {
                        self.budget = self.budget.saturating_sub(1);
                        let mut map = std::collections::BTreeMap::new();
                        let cand = freshen(&cand, &mut self.next_var, &mut map);
                        let mut s2 = s.clone();
                        if unify(&cand, want, &mut s2) {
                            out.push(s2);
                        }
                    }
                }
            },
            Term::Lam(b) => {
                let mut s = s;
                let arg = self.fresh();
                let res = self.fresh();
                if !unify(&SemanticType::arrow(arg.clone(), res.clone()), want, &mut s) {
                    return;
                }
                let mut env2 = env.to_vec();
                env2.push(arg);
                self.typings_into(b, &env2, &res, s, out);
            }
            Term::App(h, args) => {
                if let Term::Const(c) = h.as_ref() {
                    if constant_type_candidates(c, self.tags, self.tables).is_none() {
                        out.push(s);
                        return;
                    }
                }
                let arg_tys: Vec<SemanticType> = args.iter().map(|_| self.fresh()).collect();
                let mut head_ty = want.clone();
                for at in arg_tys.iter().rev() {
                    head_ty = SemanticType::arrow(at.clone(), head_ty);
                }
                let mut head_subs = Vec::new();
                self.typings_into(h, env, &head_ty, s, &mut head_subs);
                for hs in head_subs {
                    let mut states = vec![hs];
                    for (k, a) in args.iter().enumerate() {
                        let mut next = Vec::new();
                        for st in states {
                            self.typings_into(a, env, &arg_tys[k], st, &mut next);
                        }
                        states = next;
                        if states.is_empty() {
                            break;
                        }
                    }
                    out.extend(states);
                }
            }
        }
    }

    fn finish(&mut self, root: &SemanticType, s: &Subst) {
        self.results.insert(resolve(root, s));
    }
}

/// All types a closed term can take, including schematic results when the
/// term's own constraints leave variables free (rendered with `X` names).
pub fn infer_types(t: &Term, tags: &TagTable, tables: &TypeTables) -> Vec<SemanticType> {
    let mut inf = Infer {
        tags,
        tables,
        next_var: 0,
        results: BTreeSet::new(),
        budget: 100_000,
    };
    let root = inf.fresh();
    let subs = inf.typings_of(t, &[], &root.clone(), &Subst::new());
    for s in subs {
        inf.finish(&root, &s);
    }
    inf.results.into_iter().collect()
}

/// Map a CCG category to its expected semantic type: the S family maps to
/// `t`, `NP` to `e`, `N` to `<e,t>`, and slashes to arrows regardless of
/// direction.
pub fn ccg_to_semtype(cat: &Category) -> SemanticType {
    match cat {
        Category::Atom(Atom::S) | Category::Atom(Atom::Sq) | Category::Atom(Atom::Swhq) => {
            SemanticType::T
        }
        Category::Atom(Atom::NP) => SemanticType::E,
        Category::Atom(Atom::N) => SemanticType::arrow(SemanticType::E, SemanticType::T),
        Category::Complex(r, _, a) => SemanticType::arrow(ccg_to_semtype(a), ccg_to_semtype(r)),
    }
}

fn is_noun_tag(tag: &str) -> bool {
    tag == "n" || tag == "n:pt"
}

/// Whether category `cat` may label logical form `t`.
///
/// The core condition is that some typing of `t` unifies with the semantic
/// type of `cat` (after undoing type raising) and that the term's binder
/// count matches the type's arity. Two carve-outs: terms headed by a word
/// class the type system skips always pass, and binder-free noun terms may
/// take `N` (type `<e,t>`) despite having no binder.
pub fn congruent(cat: &Category, t: &Term, tags: &TagTable, tables: &TypeTables) -> bool {
    if let Some(head) = t.head_constant() {
        if constant_type_candidates(head, tags, tables).is_none() {
            return true;
        }
    }
    let stripped = strip_type_raising(cat);
    let want = ccg_to_semtype(&stripped);
    let noun_exception = stripped == Category::Atom(Atom::N)
        && t.count_binders() == 0
        && t.head_constant().map(|c| is_noun_tag(&c.tag)).unwrap_or(false);
    if !noun_exception && t.count_binders() != want.arity() {
        return false;
    }
    let mut inf = Infer {
        tags,
        tables,
        next_var: 1_000,
        results: BTreeSet::new(),
        budget: 100_000,
    };
    if noun_exception {
        // A bare noun constant has type <e,t> from its tag row directly.
        return infer_types(t, tags, tables)
            .iter()
            .any(|ty| {
                let mut s = Subst::new();
                unify(ty, &want, &mut s)
            });
    }
    !inf.typings_of(t, &[], &want, &Subst::new()).is_empty()
}
