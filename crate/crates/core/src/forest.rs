//! Derivation forests: every binary CCG tree that derives a token span
//! while composing to a target logical form.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::ccg::{split_category, Atom, Category};
use crate::error::{Error, Result};
use crate::lf::{enumerate_splits, to_shell, ShellTerm, SplitOptions, Term};
use crate::model::Scorer;
use crate::tags::TagTable;
use crate::types::{congruent, TypeTables};

#[derive(Debug, Clone)]
pub struct ForestConfig {
    /// Cap on constructed derivation nodes per forest.
    pub max_trees: usize,
    /// Longest token span a single leaf may cover.
    pub max_leaf_span: usize,
    /// Slash cap for categories introduced by splitting.
    pub max_slashes: usize,
    pub split_options: SplitOptions,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            max_trees: 5000,
            max_leaf_span: 3,
            max_slashes: 2,
            split_options: SplitOptions::default(),
        }
    }
}

/// One node of a derivation. `children` is `None` for lexical leaves.
#[derive(Debug)]
pub struct TreeNode {
    pub cat: Category,
    pub lf: Term,
    pub shell: ShellTerm,
    /// Half-open token range covered by this node.
    pub span: (usize, usize),
    pub children: Option<(Rc<TreeNode>, Rc<TreeNode>)>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Lexical entries of the derivation: (span, category, logical form).
    pub fn leaves(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        fn walk<'a>(n: &'a TreeNode, out: &mut Vec<&'a TreeNode>) {
            match &n.children {
                None => out.push(n),
                Some((l, r)) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn debug_json(&self, tokens: &[String]) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "cat": self.cat.render(),
            "lf": self.lf.render(),
            "span": [self.span.0, self.span.1],
            "words": tokens[self.span.0..self.span.1].join(" "),
        });
        if let Some((l, r)) = &self.children {
            obj["children"] = serde_json::Value::Array(vec![
                l.debug_json(tokens),
                r.debug_json(tokens),
            ]);
        }
        obj
    }
}

/// All derivations of one (utterance, logical form) pair.
pub struct Forest {
    pub tokens: Vec<String>,
    pub lf: Term,
    /// Complete derivations, each rooted in an atomic category.
    pub roots: Vec<Rc<TreeNode>>,
}

impl Forest {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root_atom(tree: &TreeNode) -> Atom {
        match tree.cat {
            Category::Atom(a) => a,
            _ => unreachable!("forest roots are atomic"),
        }
    }
}

struct Builder<'a> {
    tags: &'a TagTable,
    tables: &'a TypeTables,
    registry: &'a [Category],
    config: &'a ForestConfig,
    memo: BTreeMap<(String, String, usize, usize), Rc<Vec<Rc<TreeNode>>>>,
    congruence: BTreeMap<(String, String), bool>,
    lf_splits: BTreeMap<String, Rc<Vec<(Term, Term)>>>,
    nodes: usize,
}

impl<'a> Builder<'a> {
    fn congruent(&mut self, cat: &Category, lf: &Term) -> bool {
        let key = (cat.render(), lf.render());
        if let Some(&v) = self.congruence.get(&key) {
            return v;
        }
        let v = congruent(cat, lf, self.tags, self.tables);
        self.congruence.insert(key, v);
        v
    }

    fn splits_of(&mut self, lf: &Term) -> Rc<Vec<(Term, Term)>> {
        let key = lf.render();
        if let Some(v) = self.lf_splits.get(&key) {
            return Rc::clone(v);
        }
        let v = Rc::new(enumerate_splits(lf, &self.config.split_options));
        self.lf_splits.insert(key, Rc::clone(&v));
        v
    }

    fn alloc(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.config.max_trees {
            Err(Error::ForestLimit(format!(
                "more than {} derivation nodes",
                self.config.max_trees
            )))
        } else {
            Ok(())
        }
    }

    fn build(&mut self, cat: &Category, lf: &Term, i: usize, j: usize) -> Result<Rc<Vec<Rc<TreeNode>>>> {
        let key = (cat.render(), lf.render(), i, j);
        if let Some(v) = self.memo.get(&key) {
            return Ok(Rc::clone(v));
        }
        // Seed the memo so reentrant lookups (which cannot produce new
        // trees on a strictly smaller span anyway) see an empty result.
        self.memo.insert(key.clone(), Rc::new(Vec::new()));

        let mut trees: Vec<Rc<TreeNode>> = Vec::new();
        if self.congruent(cat, lf) {
            if j - i <= self.config.max_leaf_span {
                self.alloc()?;
                trees.push(Rc::new(TreeNode {
                    cat: cat.clone(),
                    lf: lf.clone(),
                    shell: to_shell(lf, self.tags)?,
                    span: (i, j),
                    children: None,
                }));
            }
            if j - i >= 2 {
                let cat_splits = split_category(cat, self.registry, self.config.max_slashes);
                let lf_splits = self.splits_of(lf);
                for cs in &cat_splits {
                    for (functor, argument) in lf_splits.iter() {
                        let (left_lf, right_lf) = if cs.functor_left {
                            (functor, argument)
                        } else {
                            (argument, functor)
                        };
                        for k in i + 1..j {
                            let lefts = self.build(&cs.left, left_lf, i, k)?;
                            if lefts.is_empty() {
                                continue;
                            }
                            let rights = self.build(&cs.right, right_lf, k, j)?;
                            for l in lefts.iter() {
                                for r in rights.iter() {
                                    self.alloc()?;
                                    trees.push(Rc::new(TreeNode {
                                        cat: cat.clone(),
                                        lf: lf.clone(),
                                        shell: to_shell(lf, self.tags)?,
                                        span: (i, j),
                                        children: Some((Rc::clone(l), Rc::clone(r))),
                                    }));
                                }
                            }
                        }
                    }
                }
            }
        }
        let trees = Rc::new(trees);
        self.memo.insert(key, Rc::clone(&trees));
        Ok(trees)
    }
}

/// Build the full forest for an utterance/LF pair. An over-limit forest
/// surfaces as `Error::ForestLimit` so callers can skip the datapoint.
pub fn build_forest(
    tokens: &[String],
    lf: &Term,
    registry: &[Category],
    config: &ForestConfig,
    tags: &TagTable,
    tables: &TypeTables,
) -> Result<Forest> {
    let mut b = Builder {
        tags,
        tables,
        registry,
        config,
        memo: BTreeMap::new(),
        congruence: BTreeMap::new(),
        lf_splits: BTreeMap::new(),
        nodes: 0,
    };
    let mut roots = Vec::new();
    for atom in Atom::ALL {
        let cat = Category::Atom(atom);
        let trees = b.build(&cat, lf, 0, tokens.len())?;
        roots.extend(trees.iter().cloned());
    }
    Ok(Forest {
        tokens: tokens.to_vec(),
        lf: lf.clone(),
        roots,
    })
}

/// Cache of node scores keyed by shared-node identity.
pub type ScoreCache = BTreeMap<usize, f64>;

/// Probability of the subtree below `node` (excluding the root prior).
pub fn subtree_prob<S: Scorer>(
    node: &Rc<TreeNode>,
    scorer: &S,
    tokens: &[String],
    cache: &mut ScoreCache,
) -> f64 {
    let key = Rc::as_ptr(node) as usize;
    if let Some(&p) = cache.get(&key) {
        return p;
    }
    let p = match &node.children {
        None => {
            scorer.leaf_prob(&node.cat)
                * scorer.shell_prob(&node.cat, &node.shell)
                * scorer.lf_prob(&node.shell, &node.lf)
                * scorer.word_prob(&node.lf, &tokens[node.span.0..node.span.1])
        }
        Some((l, r)) => {
            scorer.split_prob(&node.cat, &l.cat, &r.cat)
                * subtree_prob(l, scorer, tokens, cache)
                * subtree_prob(r, scorer, tokens, cache)
        }
    };
    cache.insert(key, p);
    p
}

/// Joint probability of a complete derivation, including the root prior.
pub fn tree_joint<S: Scorer>(
    root: &Rc<TreeNode>,
    scorer: &S,
    tokens: &[String],
    cache: &mut ScoreCache,
) -> f64 {
    scorer.root_prior(Forest::root_atom(root)) * subtree_prob(root, scorer, tokens, cache)
}

/// Normalized posterior over the derivations of a forest. A numerically
/// all-zero forest falls back to uniform with a warning.
pub fn forest_posterior<S: Scorer>(forest: &Forest, scorer: &S) -> Vec<f64> {
    forest_posterior_pooled(std::slice::from_ref(forest), scorer)
}

/// Posterior over the union of several forests' derivations (the pooled
/// candidate set of the distractor setting). Weights are returned in
/// forest-then-tree order and sum to one.
pub fn forest_posterior_pooled<S: Scorer>(forests: &[Forest], scorer: &S) -> Vec<f64> {
    let mut cache = ScoreCache::new();
    let mut joints = Vec::new();
    for forest in forests {
        for t in &forest.roots {
            joints.push(tree_joint(t, scorer, &forest.tokens, &mut cache));
        }
    }
    let total: f64 = joints.iter().sum();
    if total > 0.0 && total.is_finite() {
        joints.iter().map(|j| j / total).collect()
    } else {
        if !joints.is_empty() {
            log::warn!("pooled forest scored to zero; using uniform posterior");
        }
        let n = joints.len().max(1);
        vec![1.0 / n as f64; joints.len()]
    }
}
