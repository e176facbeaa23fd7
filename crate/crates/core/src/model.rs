//! The learner's probabilistic state: Dirichlet-process conditional tables
//! over the four factor families, the root category prior, and the registry
//! of categories seen so far.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ccg::{split_category, Atom, Category};
use crate::error::{Error, Result};
use crate::lf::{ShellTerm, Term};

/// A conditional count table with a Dirichlet-process posterior. Counts are
/// real-valued because observations carry posterior weights.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CondTable {
    counts: BTreeMap<String, BTreeMap<String, f64>>,
    marginals: BTreeMap<String, f64>,
}

impl CondTable {
    pub fn observe(&mut self, context: &str, outcome: &str, weight: f64) -> Result<()> {
        if weight < 0.0 {
            return Err(Error::NegativeWeight(weight));
        }
        *self
            .counts
            .entry(context.to_string())
            .or_default()
            .entry(outcome.to_string())
            .or_insert(0.0) += weight;
        *self.marginals.entry(context.to_string()).or_insert(0.0) += weight;
        Ok(())
    }

    pub fn count(&self, context: &str, outcome: &str) -> f64 {
        self.counts
            .get(context)
            .and_then(|m| m.get(outcome))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn marginal(&self, context: &str) -> f64 {
        self.marginals.get(context).copied().unwrap_or(0.0)
    }

    /// `(n(context, outcome) + alpha * base) / (n(context) + alpha)`.
    pub fn posterior(&self, context: &str, outcome: &str, alpha: f64, base: f64) -> f64 {
        (self.count(context, outcome) + alpha * base) / (self.marginal(context) + alpha)
    }

    /// Observed outcomes for a context, with their counts.
    pub fn outcomes(&self, context: &str) -> impl Iterator<Item = (&str, f64)> {
        self.counts
            .get(context)
            .into_iter()
            .flat_map(|m| m.iter().map(|(k, v)| (k.as_str(), *v)))
    }

    pub fn contexts(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(|k| k.as_str())
    }
}

/// Concentration parameters for the five tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alphas {
    pub alpha_t: f64,
    pub alpha_h: f64,
    pub alpha_l: f64,
    pub alpha_w: f64,
    pub alpha_root: f64,
}

impl Alphas {
    /// The values used while learning.
    pub fn training() -> Alphas {
        Alphas {
            alpha_t: 10.0,
            alpha_h: 1.0,
            alpha_l: 1.0,
            alpha_w: 0.25,
            alpha_root: 1.0,
        }
    }

    /// The values used when reporting probabilities.
    pub fn eval() -> Alphas {
        Alphas {
            alpha_t: 1.0,
            alpha_h: 1.0,
            alpha_l: 1.0,
            alpha_w: 1.0,
            alpha_root: 1.0,
        }
    }
}

/// Fixed constants of the base distributions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseConfig {
    /// Size of the shell-constant inventory used in the shell base measure.
    pub shell_inventory: f64,
    /// Assumed predicate vocabulary size for the logical-form base measure.
    pub lf_vocab: f64,
    /// Assumed word vocabulary size for the word base measure.
    pub word_vocab: f64,
    /// Slash cap when enumerating category splits.
    pub max_slashes: usize,
}

impl Default for BaseConfig {
    fn default() -> Self {
        BaseConfig {
            shell_inventory: 112.0,
            lf_vocab: 1.0e4,
            word_vocab: 1.0e4,
            max_slashes: 2,
        }
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// The full mutable model: one table per factor of the generative story.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelState {
    pub version: u32,
    /// Category expansion: outcome is a rendered split `(L, R)` or `leaf`,
    /// context is the rendered parent category.
    pub p_t: CondTable,
    /// Shell LF given slash-collapsed category.
    pub p_h: CondTable,
    /// Full LF given shell LF.
    pub p_l: CondTable,
    /// Word span given LF.
    pub p_w: CondTable,
    /// Root atom counts; single context `root`.
    pub root: CondTable,
    /// Every category ever assigned to a node, rendered.
    pub seen_categories: BTreeSet<String>,
    pub base: BaseConfig,
}

pub const ROOT_CONTEXT: &str = "root";
pub const LEAF_OUTCOME: &str = "leaf";

pub fn split_outcome(left: &Category, right: &Category) -> String {
    format!("({}, {})", left.render(), right.render())
}

/// Join a token span into the p_w outcome key.
pub fn span_key(tokens: &[String]) -> String {
    tokens.join(" ")
}

impl ModelState {
    pub fn new() -> ModelState {
        ModelState {
            version: CHECKPOINT_VERSION,
            p_t: CondTable::default(),
            p_h: CondTable::default(),
            p_l: CondTable::default(),
            p_w: CondTable::default(),
            root: CondTable::default(),
            seen_categories: BTreeSet::new(),
            base: BaseConfig::default(),
        }
    }

    pub fn note_category(&mut self, cat: &Category) {
        self.seen_categories.insert(cat.render());
    }

    /// The seen-category registry, parsed.
    pub fn registry(&self) -> Vec<Category> {
        self.seen_categories
            .iter()
            .filter_map(|s| Category::parse(s).ok())
            .collect()
    }

    pub fn observe_root(&mut self, atom: Atom, weight: f64) -> Result<()> {
        self.root.observe(ROOT_CONTEXT, atom.as_str(), weight)
    }

    pub fn observe_split(
        &mut self,
        parent: &Category,
        left: &Category,
        right: &Category,
        weight: f64,
    ) -> Result<()> {
        self.p_t
            .observe(&parent.render(), &split_outcome(left, right), weight)
    }

    pub fn observe_leaf(&mut self, cat: &Category, weight: f64) -> Result<()> {
        self.p_t.observe(&cat.render(), LEAF_OUTCOME, weight)
    }

    pub fn observe_shell(&mut self, cat: &Category, shell: &ShellTerm, weight: f64) -> Result<()> {
        self.p_h
            .observe(&cat.render_collapsed(), &shell.render(), weight)
    }

    pub fn observe_lf(&mut self, shell: &ShellTerm, lf: &Term, weight: f64) -> Result<()> {
        self.p_l.observe(&shell.render(), &lf.render(), weight)
    }

    pub fn observe_words(&mut self, lf: &Term, tokens: &[String], weight: f64) -> Result<()> {
        self.p_w.observe(&lf.render(), &span_key(tokens), weight)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ModelState> {
        let text = std::fs::read_to_string(path)?;
        let state: ModelState = serde_json::from_str(&text)?;
        if state.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {} (expected {})",
                state.version, CHECKPOINT_VERSION
            )));
        }
        Ok(state)
    }
}

impl Default for ModelState {
    fn default() -> Self {
        ModelState::new()
    }
}

/// Anything that can assign probabilities to the factors of a derivation.
pub trait Scorer {
    fn root_prior(&self, atom: Atom) -> f64;
    fn split_prob(&self, parent: &Category, left: &Category, right: &Category) -> f64;
    fn leaf_prob(&self, cat: &Category) -> f64;
    fn shell_prob(&self, cat: &Category, shell: &ShellTerm) -> f64;
    fn lf_prob(&self, shell: &ShellTerm, lf: &Term) -> f64;
    fn word_prob(&self, lf: &Term, span: &[String]) -> f64;
}

/// A read-only scoring view over a model state with a fixed set of alphas.
/// Separate training and evaluation views can coexist over one state.
pub struct ModelScorer<'a> {
    state: &'a ModelState,
    alphas: Alphas,
    registry: Vec<Category>,
}

impl<'a> ModelScorer<'a> {
    pub fn new(state: &'a ModelState, alphas: Alphas) -> ModelScorer<'a> {
        ModelScorer {
            state,
            alphas,
            registry: state.registry(),
        }
    }

    pub fn alphas(&self) -> Alphas {
        self.alphas
    }

    pub fn state(&self) -> &ModelState {
        self.state
    }

    pub fn registry_cats(&self) -> &[Category] {
        &self.registry
    }

    /// Base probability of any single expansion outcome of `parent`:
    /// uniform over the K possible splits plus the leaf outcome.
    pub fn expansion_base(&self, parent: &Category) -> f64 {
        let k = split_category(parent, &self.registry, self.state.base.max_slashes).len();
        1.0 / (k as f64 + 1.0)
    }

    /// Base probability of a shell LF: a halving prior on its size times a
    /// uniform choice over the shell inventory per node.
    pub fn shell_base(&self, shell: &ShellTerm) -> f64 {
        0.5 * (1.0 / self.state.base.shell_inventory).powi(shell.node_count() as i32)
    }

    /// Base probability of a full LF given its shell: uniform over an
    /// assumed predicate vocabulary per constant, with a halving prior.
    pub fn lf_base(&self, lf: &Term) -> f64 {
        0.5 * (1.0 / self.state.base.lf_vocab).powi(lf.constant_count() as i32)
    }

    /// Base probability of a word span: geometric in length over an assumed
    /// word vocabulary.
    pub fn word_base(&self, span_len: usize) -> f64 {
        (0.5 / self.state.base.word_vocab).powi(span_len as i32)
    }
}

impl Scorer for ModelScorer<'_> {
    fn root_prior(&self, atom: Atom) -> f64 {
        self.state.root.posterior(
            ROOT_CONTEXT,
            atom.as_str(),
            self.alphas.alpha_root,
            1.0 / Atom::ALL.len() as f64,
        )
    }

    fn split_prob(&self, parent: &Category, left: &Category, right: &Category) -> f64 {
        self.state.p_t.posterior(
            &parent.render(),
            &split_outcome(left, right),
            self.alphas.alpha_t,
            self.expansion_base(parent),
        )
    }

    fn leaf_prob(&self, cat: &Category) -> f64 {
        self.state.p_t.posterior(
            &cat.render(),
            LEAF_OUTCOME,
            self.alphas.alpha_t,
            self.expansion_base(cat),
        )
    }

    fn shell_prob(&self, cat: &Category, shell: &ShellTerm) -> f64 {
        self.state.p_h.posterior(
            &cat.render_collapsed(),
            &shell.render(),
            self.alphas.alpha_h,
            self.shell_base(shell),
        )
    }

    fn lf_prob(&self, shell: &ShellTerm, lf: &Term) -> f64 {
        self.state.p_l.posterior(
            &shell.render(),
            &lf.render(),
            self.alphas.alpha_l,
            self.lf_base(lf),
        )
    }

    fn word_prob(&self, lf: &Term, span: &[String]) -> f64 {
        self.state.p_w.posterior(
            &lf.render(),
            &span_key(span),
            self.alphas.alpha_w,
            self.word_base(span.len()),
        )
    }
}
