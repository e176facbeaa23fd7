//! Shared helpers for the integration test targets: a table-driven stub
//! scorer, deterministic random instance generators, and a brute-force
//! forest oracle.

use std::collections::BTreeMap;

use ccg_bootstrap::ccg::{split_category, Atom, Category};
use ccg_bootstrap::forest::{ForestConfig, TreeNode};
use ccg_bootstrap::lf::{enumerate_splits, parse_lf, ShellTerm, Term};
use ccg_bootstrap::model::Scorer;
use ccg_bootstrap::tags::TagTable;
use ccg_bootstrap::types::{congruent, TypeTables};
use rand::Rng;

/// Scorer backed by explicit probability tables; unknown queries score 0.
/// Used to freeze hand-picked factor values into a derivation.
#[derive(Default)]
pub struct TableScorer {
    pub root: BTreeMap<String, f64>,
    pub splits: BTreeMap<(String, String, String), f64>,
    pub leaves: BTreeMap<String, f64>,
    pub shells: BTreeMap<(String, String), f64>,
    pub lfs: BTreeMap<(String, String), f64>,
    pub words: BTreeMap<(String, String), f64>,
}

impl Scorer for TableScorer {
    fn root_prior(&self, atom: Atom) -> f64 {
        *self.root.get(atom.as_str()).unwrap_or(&0.0)
    }

    fn split_prob(&self, parent: &Category, left: &Category, right: &Category) -> f64 {
        *self
            .splits
            .get(&(parent.render(), left.render(), right.render()))
            .unwrap_or(&0.0)
    }

    fn leaf_prob(&self, cat: &Category) -> f64 {
        *self.leaves.get(&cat.render()).unwrap_or(&0.0)
    }

    fn shell_prob(&self, cat: &Category, shell: &ShellTerm) -> f64 {
        *self
            .shells
            .get(&(cat.render(), shell.render()))
            .unwrap_or(&0.0)
    }

    fn lf_prob(&self, shell: &ShellTerm, lf: &Term) -> f64 {
        *self.lfs.get(&(shell.render(), lf.render())).unwrap_or(&0.0)
    }

    fn word_prob(&self, lf: &Term, span: &[String]) -> f64 {
        *self
            .words
            .get(&(lf.render(), span.join(" ")))
            .unwrap_or(&0.0)
    }
}

/// Random closed LF over a tiny vocabulary: an entity, or a verb applied
/// to one or two entities. At most 8 nodes.
pub fn random_lf<R: Rng>(rng: &mut R, tags: &TagTable) -> Term {
    let entity = |rng: &mut R| -> String {
        if rng.gen_bool(0.5) {
            format!("n:prop|p{}", rng.gen_range(0..3))
        } else {
            format!(
                "(det:art|d{} n|n{})",
                rng.gen_range(0..2),
                rng.gen_range(0..2)
            )
        }
    };
    let text = match rng.gen_range(0..3) {
        0 => entity(rng),
        1 => format!("v|v{} {}", rng.gen_range(0..2), entity(rng)),
        _ => {
            let a = entity(rng);
            let b = entity(rng);
            format!("v|v{} {} {}", rng.gen_range(0..2), a, b)
        }
    };
    parse_lf(&text, tags).expect("generator emits valid LFs")
}

/// Random utterance of 1..=max_len opaque tokens.
pub fn random_tokens<R: Rng>(rng: &mut R, max_len: usize) -> Vec<String> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|i| format!("w{i}")).collect()
}

/// Canonical serialization of a derivation tree for set comparison.
pub fn serialize_tree(node: &TreeNode) -> String {
    match &node.children {
        None => format!(
            "[{} {}..{} {}]",
            node.cat.render(),
            node.span.0,
            node.span.1,
            node.lf.render()
        ),
        Some((l, r)) => format!(
            "[{} {}..{} {} {} {}]",
            node.cat.render(),
            node.span.0,
            node.span.1,
            node.lf.render(),
            serialize_tree(l),
            serialize_tree(r)
        ),
    }
}

/// Brute-force forest enumeration: plain recursion with no memoization,
/// caps, or sharing. Generates every labeled bracketing and filters by
/// congruence.
pub fn oracle_forest(
    tokens: &[String],
    lf: &Term,
    registry: &[Category],
    config: &ForestConfig,
    tags: &TagTable,
    tables: &TypeTables,
) -> Vec<String> {
    fn go(
        cat: &Category,
        lf: &Term,
        i: usize,
        j: usize,
        registry: &[Category],
        config: &ForestConfig,
        tags: &TagTable,
        tables: &TypeTables,
    ) -> Vec<String> {
        let mut out = Vec::new();
        if !congruent(cat, lf, tags, tables) {
            return out;
        }
        if j - i <= config.max_leaf_span {
            out.push(format!("[{} {}..{} {}]", cat.render(), i, j, lf.render()));
        }
        if j - i >= 2 {
            for cs in split_category(cat, registry, config.max_slashes) {
                for (functor, argument) in enumerate_splits(lf, &config.split_options) {
                    let (left_lf, right_lf) = if cs.functor_left {
                        (&functor, &argument)
                    } else {
                        (&argument, &functor)
                    };
                    for k in i + 1..j {
                        let lefts = go(&cs.left, left_lf, i, k, registry, config, tags, tables);
                        if lefts.is_empty() {
                            continue;
                        }
                        let rights = go(&cs.right, right_lf, k, j, registry, config, tags, tables);
                        for l in &lefts {
                            for r in &rights {
                                out.push(format!(
                                    "[{} {}..{} {} {} {}]",
                                    cat.render(),
                                    i,
                                    j,
                                    lf.render(),
                                    l,
                                    r
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    let mut all = Vec::new();
    for atom in Atom::ALL {
        let cat = Category::atom(atom);
        all.extend(go(
            &cat,
            lf,
            0,
            tokens.len(),
            registry,
            config,
            tags,
            tables,
        ));
    }
    all
}
