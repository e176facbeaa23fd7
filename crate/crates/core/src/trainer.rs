//! Single-pass, in-order incremental EM training with optional distractor
//! logical forms.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::corpus::{Corpus, DataPoint, WordOrder};
use crate::error::{Error, Result};
use crate::eval::word_order_scores;
use crate::forest::{build_forest, forest_posterior_pooled, Forest, ForestConfig, TreeNode};
use crate::lf::Term;
use crate::model::{Alphas, ModelScorer, ModelState};
use crate::tags::TagTable;
use crate::types::TypeTables;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Number of distractor logical forms pooled with the true one.
    pub distractors: usize,
    pub alphas: Alphas,
    pub forest: ForestConfig,
    pub tables: TypeTables,
    /// Snapshot word-order scores every this many datapoints (0 disables;
    /// the final state is always snapshotted by the caller if needed).
    pub snapshot_stride: usize,
    /// Deduplicate distractor LFs that equal the true LF or each other.
    pub dedup_candidates: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            distractors: 0,
            alphas: Alphas::training(),
            forest: ForestConfig::default(),
            tables: TypeTables::default(),
            snapshot_stride: 1,
            dedup_candidates: true,
        }
    }
}

/// Per-datapoint training diagnostics.
#[derive(Debug, Clone)]
pub struct LogRow {
    pub index: usize,
    pub tokens_seen: usize,
    pub n_trees: usize,
    pub skipped: bool,
    /// Normalized word-order scores, present on snapshot strides.
    pub word_order: Option<BTreeMap<WordOrder, f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct TrainingLog {
    pub rows: Vec<LogRow>,
}

/// The candidate LF pool for datapoint `i`: the true LF plus the LFs of
/// the ⌊n/2⌋ preceding and ⌈n/2⌉ following datapoints, truncated at the
/// corpus boundaries.
pub fn build_candidate_lfs(corpus: &Corpus, i: usize, n: usize, dedup: bool) -> Vec<Term> {
    let mut out = vec![corpus.datapoints[i].lf.clone()];
    let before = n / 2;
    let after = n - before;
    for k in (i.saturating_sub(before)..i).rev() {
        out.push(corpus.datapoints[k].lf.clone());
    }
    for k in i + 1..(i + 1 + after).min(corpus.datapoints.len()) {
        out.push(corpus.datapoints[k].lf.clone());
    }
    if dedup {
        let mut seen = std::collections::BTreeSet::new();
        out.retain(|t| seen.insert(t.clone()));
    }
    out
}

#[derive(Debug, Clone)]
pub struct StepReport {
    pub n_trees: usize,
    pub skipped: bool,
}

fn accumulate_tree(
    state: &mut ModelState,
    node: &Rc<TreeNode>,
    tokens: &[String],
    weight: f64,
) -> Result<()> {
    state.note_category(&node.cat);
    match &node.children {
        None => {
            state.observe_leaf(&node.cat, weight)?;
            state.observe_shell(&node.cat, &node.shell, weight)?;
            state.observe_lf(&node.shell, &node.lf, weight)?;
            state.observe_words(&node.lf, &tokens[node.span.0..node.span.1], weight)?;
        }
        Some((l, r)) => {
            state.observe_split(&node.cat, &l.cat, &r.cat, weight)?;
            accumulate_tree(state, l, tokens, weight)?;
            accumulate_tree(state, r, tokens, weight)?;
        }
    }
    Ok(())
}

/// One EM step: build a forest per candidate LF, pool all trees, compute
/// the posterior under the current parameters, then add every
/// co-occurrence with the tree's posterior weight.
pub fn train_step(
    state: &mut ModelState,
    dp: &DataPoint,
    candidates: &[Term],
    config: &TrainConfig,
    tags: &TagTable,
) -> Result<StepReport> {
    let registry = state.registry();
    let mut forests: Vec<Forest> = Vec::new();
    for lf in candidates {
        match build_forest(&dp.tokens, lf, &registry, &config.forest, tags, &config.tables) {
            Ok(f) => {
                if !f.is_empty() {
                    forests.push(f);
                }
            }
            Err(Error::ForestLimit(msg)) => {
                log::warn!("skipping candidate LF `{}`: {msg}", lf.render());
            }
            Err(e) => return Err(e),
        }
    }
    let n_trees: usize = forests.iter().map(|f| f.roots.len()).sum();
    if n_trees == 0 {
        log::warn!("no parse for `{}`; datapoint skipped", dp.tokens.join(" "));
        return Ok(StepReport {
            n_trees: 0,
            skipped: true,
        });
    }
    let weights = {
        let scorer = ModelScorer::new(state, config.alphas);
        forest_posterior_pooled(&forests, &scorer)
    };
    let mut w_iter = weights.iter();
    for forest in &forests {
        for tree in &forest.roots {
            let w = *w_iter.next().expect("weight per tree");
            if w == 0.0 {
                continue;
            }
            state.observe_root(Forest::root_atom(tree), w)?;
            accumulate_tree(state, tree, &dp.tokens, w)?;
        }
    }
    Ok(StepReport {
        n_trees,
        skipped: false,
    })
}

/// Train on a corpus in one in-order pass. The log has one row per
/// datapoint; word-order snapshots (computed with evaluation alphas) are
/// attached every `snapshot_stride` rows and on the final row.
pub fn train(
    corpus: &Corpus,
    config: &TrainConfig,
    tags: &TagTable,
) -> Result<(ModelState, TrainingLog)> {
    let mut state = ModelState::new();
    state.base.max_slashes = config.forest.max_slashes;
    let mut log_rows = Vec::with_capacity(corpus.datapoints.len());
    let mut tokens_seen = 0usize;
    for (i, dp) in corpus.datapoints.iter().enumerate() {
        let candidates = build_candidate_lfs(corpus, i, config.distractors, config.dedup_candidates);
        let report = train_step(&mut state, dp, &candidates, config, tags)?;
        tokens_seen += dp.tokens.len();
        let last = i + 1 == corpus.datapoints.len();
        let snapshot = config.snapshot_stride > 0
            && (last || (i + 1) % config.snapshot_stride == 0);
        let word_order = snapshot.then(|| {
            let scorer = ModelScorer::new(&state, Alphas::eval());
            word_order_scores(&scorer).normalized
        });
        log_rows.push(LogRow {
            index: i,
            tokens_seen,
            n_trees: report.n_trees,
            skipped: report.skipped,
            word_order,
        });
    }
    Ok((state, TrainingLog { rows: log_rows }))
}
