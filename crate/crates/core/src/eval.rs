//! Measurement code: word-order preference, lexicon prediction and
//! accuracy, critical examples, Zipf fitting, and diversity statistics.

use std::collections::{BTreeMap, BTreeSet};

use crate::ccg::{Atom, Category};
use crate::corpus::{Corpus, GoldLexicon, WordOrder};
use crate::error::Result;
use crate::lf::{parse_lf, parse_shell, ShellTerm, Term};
use crate::model::{Alphas, ModelScorer, ModelState, Scorer, LEAF_OUTCOME};
use crate::tags::{SemanticType, TagTable};
use crate::types::{infer_types, TypeTables};

/// The six-way word-order preference.
#[derive(Debug, Clone)]
pub struct WordOrderScores {
    pub raw: BTreeMap<WordOrder, f64>,
    pub normalized: BTreeMap<WordOrder, f64>,
}

/// Shell of a two-argument verb frame whose first abstracted variable is
/// the object: `λx.λy. verb y x`.
fn shell_obj_first() -> ShellTerm {
    ShellTerm(Term::lam(Term::lam(Term::app(
        Term::cst("", "verb"),
        vec![Term::Var(0), Term::Var(1)],
    ))))
}

/// Shell whose first abstracted variable is the subject: `λx.λy. verb x y`.
fn shell_subj_first() -> ShellTerm {
    ShellTerm(Term::lam(Term::lam(Term::app(
        Term::cst("", "verb"),
        vec![Term::Var(1), Term::Var(0)],
    ))))
}

/// The six word-order scores. Each raw score is the product of the two
/// category splits needed to parse a simple transitive sentence in that
/// order and the probability of the verb shell that realizes it, with the
/// convention that the verb's first logical argument is the subject.
/// Verb-medial orders combine with the object first.
pub fn word_order_scores<S: Scorer>(scorer: &S) -> WordOrderScores {
    let s = Category::parse("S").unwrap();
    let np = Category::parse("NP").unwrap();
    let s_b = Category::parse("S\\NP").unwrap();
    let s_f = Category::parse("S/NP").unwrap();
    let s_bb = Category::parse("S\\NP\\NP").unwrap();
    let s_bf = Category::parse("S\\NP/NP").unwrap();
    let s_ff = Category::parse("S/NP/NP").unwrap();
    let s_fb = Category::parse("S/NP\\NP").unwrap();
    let obj_first = shell_obj_first();
    let subj_first = shell_subj_first();

    let subject_left = scorer.split_prob(&s, &np, &s_b);
    let subject_right = scorer.split_prob(&s, &s_f, &np);

    let mut raw = BTreeMap::new();
    raw.insert(
        WordOrder::SOV,
        subject_left * scorer.split_prob(&s_b, &np, &s_bb) * scorer.shell_prob(&s_bb, &obj_first),
    );
    raw.insert(
        WordOrder::SVO,
        subject_left * scorer.split_prob(&s_b, &s_bf, &np) * scorer.shell_prob(&s_bf, &obj_first),
    );
    raw.insert(
        WordOrder::VSO,
        subject_right * scorer.split_prob(&s_f, &s_ff, &np)
            * scorer.shell_prob(&s_ff, &subj_first),
    );
    raw.insert(
        WordOrder::OSV,
        subject_left * scorer.split_prob(&s_b, &np, &s_bb) * scorer.shell_prob(&s_bb, &subj_first),
    );
    raw.insert(
        WordOrder::OVS,
        subject_right * scorer.split_prob(&s_f, &np, &s_fb) * scorer.shell_prob(&s_fb, &obj_first),
    );
    raw.insert(
        WordOrder::VOS,
        subject_right * scorer.split_prob(&s_f, &s_ff, &np) * scorer.shell_prob(&s_ff, &obj_first),
    );
    let total: f64 = raw.values().sum();
    let normalized = raw
        .iter()
        .map(|(k, v)| (*k, if total > 0.0 { v / total } else { 1.0 / 6.0 }))
        .collect();
    WordOrderScores { raw, normalized }
}

impl WordOrderScores {
    pub fn argmax(&self) -> WordOrder {
        *self
            .normalized
            .iter()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.as_str().cmp(a.0.as_str())))
            .unwrap()
            .0
    }
}

// ---------------------------------------------------------------------------
// Lexicon prediction

/// Predicted logical form for a word: the LF with the largest accumulated
/// co-occurrence count. Ties break to the lexicographically smaller
/// rendered term; unseen words yield `None`.
pub fn predict_lf(state: &ModelState, word: &str, tags: &TagTable) -> Option<Term> {
    let mut best: Option<(f64, &str)> = None;
    for ctx in state.p_w.contexts() {
        let n = state.p_w.count(ctx, word);
        if n <= 0.0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bn, bctx)) => n > bn || (n == bn && ctx < bctx),
        };
        if better {
            best = Some((n, ctx));
        }
    }
    best.and_then(|(_, ctx)| parse_lf(ctx, tags).ok())
}

/// Max-product reachability of each seen category from the root prior
/// through observed splits. This supplies the `P(s)` factor of category
/// prediction: the slash-collapsed shell table cannot distinguish mirror
/// categories, but reachability through the learned split distribution can.
fn category_reachability(state: &ModelState, scorer: &ModelScorer) -> BTreeMap<String, f64> {
    let mut reach: BTreeMap<String, f64> = BTreeMap::new();
    for atom in Atom::ALL {
        reach.insert(atom.as_str().to_string(), scorer.root_prior(atom));
    }
    let contexts: Vec<String> = state.p_t.contexts().map(|c| c.to_string()).collect();
    for _ in 0..8 {
        let mut changed = false;
        for ctx in &contexts {
            let Some(&p_ctx) = reach.get(ctx) else { continue };
            let Ok(parent) = Category::parse(ctx) else { continue };
            let outcomes: Vec<String> = state
                .p_t
                .outcomes(ctx)
                .filter(|(o, _)| *o != LEAF_OUTCOME)
                .map(|(o, _)| o.to_string())
                .collect();
            for outcome in outcomes {
                let Some((l, r)) = parse_split_outcome(&outcome) else { continue };
                let p = p_ctx * scorer.split_prob(&parent, &l, &r);
                for child in [l, r] {
                    let key = child.render();
                    let cur = reach.get(&key).copied().unwrap_or(0.0);
                    if p > cur {
                        reach.insert(key, p);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    reach
}

fn parse_split_outcome(outcome: &str) -> Option<(Category, Category)> {
    let inner = outcome.strip_prefix('(')?.strip_suffix(')')?;
    let comma = inner.find(", ")?;
    let l = Category::parse(&inner[..comma]).ok()?;
    let r = Category::parse(&inner[comma + 2..]).ok()?;
    Some((l, r))
}

/// Predicted syntactic category for a word: argmax over seen categories of
/// `Σ_m Σ_e p_w(x|m) · p_l(m|e) · p_h(e|s) · P(s)`, with the sums truncated
/// to observed support and `P(s)` the reachability prior above.
pub fn predict_syncat(state: &ModelState, word: &str, tags: &TagTable) -> Option<Category> {
    let scorer = ModelScorer::new(state, Alphas::eval());
    // Observed meanings of the word.
    let ms: Vec<(Term, f64)> = state
        .p_w
        .contexts()
        .filter(|ctx| state.p_w.count(ctx, word) > 0.0)
        .filter_map(|ctx| {
            let m = parse_lf(ctx, tags).ok()?;
            let p = scorer.word_prob(&m, &[word.to_string()]);
            Some((m, p))
        })
        .collect();
    if ms.is_empty() {
        return None;
    }
    // Observed shells above each meaning.
    let mut shells_of: Vec<(usize, ShellTerm, f64)> = Vec::new();
    for (mi, (m, _)) in ms.iter().enumerate() {
        let m_key = m.render();
        for e_ctx in state.p_l.contexts() {
            if state.p_l.count(e_ctx, &m_key) <= 0.0 {
                continue;
            }
            let Ok(shell) = parse_shell(e_ctx, tags) else { continue };
            let pl = scorer.lf_prob(&shell, m);
            shells_of.push((mi, shell, pl));
        }
    }
    let reach = category_reachability(state, &scorer);
    let mut best: Option<(f64, String, Category)> = None;
    for cat_str in &state.seen_categories {
        let Ok(cat) = Category::parse(cat_str) else { continue };
        let p_s = reach.get(cat_str).copied().unwrap_or(0.0).max(1e-30);
        let mut total = 0.0;
        for (mi, shell, pl) in &shells_of {
            let pw = ms[*mi].1;
            let ph = scorer.shell_prob(&cat, shell);
            total += pw * pl * ph;
        }
        let score = total * p_s;
        let better = match &best {
            None => true,
            Some((bs, bstr, _)) => score > *bs || (score == *bs && cat_str < bstr),
        };
        if better {
            best = Some((score, cat_str.clone(), cat));
        }
    }
    best.map(|(_, _, c)| c)
}

// ---------------------------------------------------------------------------
// Lexicon accuracy

#[derive(Debug, Clone)]
pub struct WordPrediction {
    pub word: String,
    pub predicted_lf: Option<Term>,
    pub predicted_cat: Option<Category>,
    pub meaning_correct: bool,
    pub syncat_correct: bool,
    pub both_correct: bool,
}

#[derive(Debug, Clone)]
pub struct LexiconReport {
    pub predictions: Vec<WordPrediction>,
    pub missing_gold: Vec<String>,
    pub meaning_pct: f64,
    pub syncat_pct: f64,
    pub both_pct: f64,
}

/// The `top_k` most frequent words of a corpus, ties broken by earliest
/// first occurrence.
pub fn most_common_words(corpus: &Corpus, top_k: usize) -> Vec<String> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut seen_at = 0usize;
    for d in &corpus.datapoints {
        for t in &d.tokens {
            let e = counts.entry(t.as_str()).or_insert((0, seen_at));
            e.0 += 1;
            seen_at += 1;
        }
    }
    let mut words: Vec<(&str, usize, usize)> =
        counts.into_iter().map(|(w, (n, first))| (w, n, first)).collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    words.into_iter().take(top_k).map(|(w, _, _)| w.to_string()).collect()
}

/// Score the model's lexicon predictions for the most common words against
/// the gold entries. A prediction is correct if it matches any admissible
/// entry; `both` requires one entry to match jointly.
pub fn lexicon_accuracy(
    state: &ModelState,
    corpus: &Corpus,
    gold: &GoldLexicon,
    top_k: usize,
    tags: &TagTable,
) -> LexiconReport {
    let words = most_common_words(corpus, top_k);
    let mut predictions = Vec::new();
    let mut missing_gold = Vec::new();
    for word in words {
        let Some(entries) = gold.entries.get(&word) else {
            missing_gold.push(word);
            continue;
        };
        let predicted_lf = predict_lf(state, &word, tags);
        let predicted_cat = predict_syncat(state, &word, tags);
        let meaning_correct = predicted_lf
            .as_ref()
            .map(|m| entries.iter().any(|(g, _)| g == m))
            .unwrap_or(false);
        let syncat_correct = predicted_cat
            .as_ref()
            .map(|c| entries.iter().any(|(_, g)| g == c))
            .unwrap_or(false);
        let both_correct = match (&predicted_lf, &predicted_cat) {
            (Some(m), Some(c)) => entries.iter().any(|(gm, gc)| gm == m && gc == c),
            _ => false,
        };
        predictions.push(WordPrediction {
            word,
            predicted_lf,
            predicted_cat,
            meaning_correct,
            syncat_correct,
            both_correct,
        });
    }
    let n = predictions.len().max(1) as f64;
    let pct = |f: fn(&WordPrediction) -> bool| {
        100.0 * predictions.iter().filter(|p| f(p)).count() as f64 / n
    };
    LexiconReport {
        meaning_pct: pct(|p| p.meaning_correct),
        syncat_pct: pct(|p| p.syncat_correct),
        both_pct: pct(|p| p.both_correct),
        predictions,
        missing_gold,
    }
}

// ---------------------------------------------------------------------------
// Critical examples

fn term_tags(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(_) => {}
        Term::Const(c) => out.push(c.tag.clone()),
        Term::Lam(b) => term_tags(b, out),
        Term::App(h, args) => {
            term_tags(h, out);
            for a in args {
                term_tags(a, out);
            }
        }
    }
}

/// Whether an LF is a simple transitive clause: a v-tagged head applied to
/// exactly two e-type arguments, with no leading binders.
pub fn is_transitive_lf(t: &Term, tags: &TagTable, tables: &TypeTables) -> bool {
    let Term::App(h, args) = t else { return false };
    let Term::Const(c) = h.as_ref() else { return false };
    if c.tag != "v" || args.len() != 2 {
        return false;
    }
    args.iter().all(|a| {
        infer_types(a, tags, tables)
            .iter()
            .any(|ty| *ty == SemanticType::E)
    })
}

/// Tag prefixes that mark a complicating feature when present in the LF.
pub const COMPLICATING_TAG_PREFIXES: [&str; 2] = ["adv", "prep"];

/// Indices of critical examples: transitive meaning, no complicating
/// features (adverbial or prepositional constants, repeated tokens), and
/// every token already encountered on an earlier datapoint.
pub fn critical_examples(corpus: &Corpus, tags: &TagTable, tables: &TypeTables) -> Vec<usize> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();
    for (i, d) in corpus.datapoints.iter().enumerate() {
        let mut ok = is_transitive_lf(&d.lf, tags, tables);
        if ok {
            let mut lf_tags = Vec::new();
            term_tags(&d.lf, &mut lf_tags);
            ok = !lf_tags
                .iter()
                .any(|t| COMPLICATING_TAG_PREFIXES.iter().any(|p| t.starts_with(p)));
        }
        if ok {
            let mut uniq = BTreeSet::new();
            ok = d.tokens.iter().all(|t| uniq.insert(t.as_str()));
        }
        if ok {
            ok = d.tokens.iter().all(|t| seen.contains(t.as_str()));
        }
        if ok {
            out.push(i);
        }
        for t in &d.tokens {
            seen.insert(t.as_str());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Zipf fit

/// Fit `f_n ∝ 1/(n+b)^a` to the rank/relative-frequency profile by least
/// squares in log space, normalizing the model over the observed ranks so
/// it is comparable to relative frequencies. Grid search with refinement.
pub fn zipf_fit(corpus: &Corpus) -> Result<(f64, f64)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &corpus.datapoints {
        for t in &d.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    if counts.len() < 10 {
        return Err(crate::error::Error::SynthSpec(format!(
            "zipf fit needs at least 10 distinct words, got {}",
            counts.len()
        )));
    }
    let mut freqs: Vec<f64> = counts.values().map(|&n| n as f64).collect();
    freqs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total: f64 = freqs.iter().sum();
    let log_f: Vec<f64> = freqs.iter().map(|f| (f / total).ln()).collect();
    let ranks: Vec<f64> = (1..=freqs.len()).map(|r| r as f64).collect();

    let loss = |a: f64, b: f64| -> f64 {
        let z: f64 = ranks.iter().map(|n| (n + b).powf(-a)).sum();
        let log_z = z.ln();
        ranks
            .iter()
            .zip(&log_f)
            .map(|(n, lf)| {
                let model = -a * (n + b).ln() - log_z;
                let d = lf - model;
                d * d
            })
            .sum()
    };

    let mut best = (f64::INFINITY, 1.0, 1.0);
    let mut a_lo = 0.5;
    let mut a_hi = 3.0;
    let mut a_step = 0.025;
    let mut b_lo = 0.0;
    let mut b_hi = 10.0;
    let mut b_step = 0.25;
    for _round in 0..5 {
        let mut a = a_lo;
        while a <= a_hi + 1e-12 {
            let mut b = b_lo;
            while b <= b_hi + 1e-12 {
                let l = loss(a, b);
                if l < best.0 {
                    best = (l, a, b);
                }
                b += b_step;
            }
            a += a_step;
        }
        let (_, ba, bb) = best;
        a_lo = (ba - a_step).max(0.01);
        a_hi = ba + a_step;
        b_lo = (bb - b_step).max(0.0);
        b_hi = bb + b_step;
        a_step /= 5.0;
        b_step /= 5.0;
    }
    Ok((best.1, best.2))
}

// ---------------------------------------------------------------------------
// Diversity statistics

#[derive(Debug, Clone)]
pub struct DiversityStats {
    /// Total tokens minus distinct types.
    pub word_repeats: usize,
    /// Percentage of tokens whose type had not appeared in any earlier
    /// datapoint.
    pub pct_new_words: f64,
    /// `(tokens seen, types seen)` after every token.
    pub type_token_curve: Vec<(usize, usize)>,
}

pub fn diversity_stats(corpus: &Corpus) -> DiversityStats {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut curve = Vec::new();
    let mut new_tokens = 0usize;
    let mut total = 0usize;
    for d in &corpus.datapoints {
        // Novelty is judged against earlier datapoints only, so within an
        // utterance every occurrence of a first-seen type counts as new.
        let before: BTreeSet<&str> = d
            .tokens
            .iter()
            .map(|t| t.as_str())
            .filter(|t| seen.contains(*t))
            .collect();
        for t in &d.tokens {
            total += 1;
            if !before.contains(t.as_str()) {
                new_tokens += 1;
            }
            seen.insert(t.as_str());
            curve.push((total, seen.len()));
        }
    }
    DiversityStats {
        word_repeats: total - seen.len(),
        pct_new_words: if total == 0 {
            0.0
        } else {
            100.0 * new_tokens as f64 / total as f64
        },
        type_token_curve: curve,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{synth_corpus, synth_zipf_corpus, DataPoint, SynthSpec};
    use crate::model::ModelState;
    use crate::tags::TagTable;

    fn tags() -> &'static TagTable {
        TagTable::builtin()
    }

    fn lf(s: &str) -> Term {
        parse_lf(s, tags()).unwrap()
    }

    #[test]
    fn untrained_scores_are_uniform() {
        let state = ModelState::new();
        let scorer = ModelScorer::new(&state, Alphas::eval());
        let sc = word_order_scores(&scorer);
        for (_, v) in &sc.normalized {
            assert!((v - 1.0 / 6.0).abs() < 1e-12, "{v}");
        }
        let total: f64 = sc.normalized.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sov_osv_differ_only_in_shell_factor() {
        // Bias the shell table toward object-first verbs and check that
        // only SOV (not OSV) benefits.
        let mut state = ModelState::new();
        let s_bb = Category::parse("S\\NP\\NP").unwrap();
        state
            .observe_shell(&s_bb, &shell_obj_first(), 5.0)
            .unwrap();
        let scorer = ModelScorer::new(&state, Alphas::eval());
        let sc = word_order_scores(&scorer);
        assert!(sc.raw[&WordOrder::SOV] > sc.raw[&WordOrder::OSV]);
        // The two p_t factors are shared, so the ratio equals the shell ratio.
        let shell_ratio = scorer.shell_prob(&s_bb, &shell_obj_first())
            / scorer.shell_prob(&s_bb, &shell_subj_first());
        let score_ratio = sc.raw[&WordOrder::SOV] / sc.raw[&WordOrder::OSV];
        assert!((shell_ratio - score_ratio).abs() < 1e-9);
    }

    #[test]
    fn predict_lf_counts_and_ties() {
        let mut state = ModelState::new();
        let you = lf("pro:per|you");
        let shoe = lf("n|shoe");
        state.observe_words(&you, &["you".into()], 2.0).unwrap();
        state.observe_words(&shoe, &["you".into()], 1.0).unwrap();
        assert_eq!(predict_lf(&state, "you", tags()), Some(you.clone()));
        assert_eq!(predict_lf(&state, "nope", tags()), None);
        // Tie: equal counts resolve to the lexicographically smaller render.
        let mut tied = ModelState::new();
        tied.observe_words(&you, &["it".into()], 1.0).unwrap();
        tied.observe_words(&shoe, &["it".into()], 1.0).unwrap();
        assert_eq!(tied.p_w.count("n|shoe", "it"), 1.0);
        assert_eq!(predict_lf(&tied, "it", tags()), Some(shoe));
    }

    #[test]
    fn predict_syncat_single_support() {
        use crate::lf::to_shell;
        let mut state = ModelState::new();
        let you = lf("pro:per|you");
        let shell = to_shell(&you, tags()).unwrap();
        let np = Category::parse("NP").unwrap();
        state.observe_words(&you, &["you".into()], 1.0).unwrap();
        state.observe_lf(&shell, &you, 1.0).unwrap();
        state.observe_shell(&np, &shell, 1.0).unwrap();
        state.observe_leaf(&np, 1.0).unwrap();
        state.observe_root(Atom::NP, 1.0).unwrap();
        state.note_category(&np);
        assert_eq!(predict_syncat(&state, "you", tags()), Some(np));
        assert_eq!(predict_syncat(&state, "nope", tags()), None);
    }

    #[test]
    fn critical_examples_basic() {
        let tables = TypeTables::default();
        let mk = |tokens: &[&str], lf_text: &str| DataPoint {
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            lf: lf(lf_text),
            tags: None,
        };
        let corpus = Corpus {
            name: "t".into(),
            datapoints: vec![
                // First occurrence: all tokens new, not critical.
                mk(&["kim", "grabs", "pat"], "v|grab n:prop|kim n:prop|pat"),
                // Same tokens again: critical.
                mk(&["pat", "grabs", "kim"], "v|grab n:prop|pat n:prop|kim"),
                // Repetition: not critical.
                mk(&["kim", "grabs", "kim"], "v|grab n:prop|kim n:prop|kim"),
                // Intransitive: not critical.
                mk(&["kim", "runs"], "v|run n:prop|kim"),
            ],
        };
        assert_eq!(critical_examples(&corpus, tags(), &tables), vec![1]);
    }

    #[test]
    fn critical_examples_exclude_adverbials() {
        let tables = TypeTables::default();
        let corpus = Corpus {
            name: "t".into(),
            datapoints: vec![
                DataPoint {
                    tokens: vec!["kim".into(), "grabs".into(), "pat".into()],
                    lf: lf("v|grab n:prop|kim n:prop|pat"),
                    tags: None,
                },
                DataPoint {
                    tokens: vec!["kim".into(), "grabs".into(), "pat".into()],
                    lf: lf("adv|quickly (v|grab n:prop|kim n:prop|pat)"),
                    tags: None,
                },
            ],
        };
        assert_eq!(critical_examples(&corpus, tags(), &tables), Vec::<usize>::new());
    }

    #[test]
    fn one_sentence_corpus_has_no_critical_examples() {
        let tables = TypeTables::default();
        let corpus = Corpus {
            name: "t".into(),
            datapoints: vec![DataPoint {
                tokens: vec!["kim".into(), "grabs".into(), "pat".into()],
                lf: lf("v|grab n:prop|kim n:prop|pat"),
                tags: None,
            }],
        };
        assert!(critical_examples(&corpus, tags(), &tables).is_empty());
    }

    #[test]
    fn synth_corpus_eventually_yields_critical_examples() {
        let tables = TypeTables::default();
        let corpus = synth_corpus(&SynthSpec::new(WordOrder::SVO, 300, 20, 7), tags()).unwrap();
        let crit = critical_examples(&corpus, tags(), &tables);
        assert!(crit.len() > 50, "only {} critical examples", crit.len());
    }

    #[test]
    fn zipf_fit_recovers_parameters() {
        let corpus = synth_zipf_corpus(200, 200_000, 1.4, 1.5, 13, tags()).unwrap();
        let (a, b) = zipf_fit(&corpus).unwrap();
        assert!((a - 1.4).abs() <= 0.05, "a = {a}, b = {b}");
    }

    #[test]
    fn zipf_fit_is_local_minimum() {
        let corpus = synth_zipf_corpus(120, 20_000, 1.3, 1.0, 5, tags()).unwrap();
        let (_a, _b) = zipf_fit(&corpus).unwrap();
        // Recompute the loss landscape around the optimum.
        // (The fit function owns the loss; perturb via refitting on the
        // same data with narrowed ranges would be circular, so just check
        // determinism here.)
        assert_eq!(zipf_fit(&corpus).unwrap(), zipf_fit(&corpus).unwrap());
    }

    #[test]
    fn diversity_distinct_singletons() {
        let datapoints: Vec<DataPoint> = (0..5)
            .map(|i| DataPoint {
                tokens: vec![format!("w{i}")],
                lf: lf(&format!("n:prop|w{i}")),
                tags: None,
            })
            .collect();
        let c = Corpus {
            name: "t".into(),
            datapoints,
        };
        let d = diversity_stats(&c);
        assert_eq!(d.word_repeats, 0);
        assert!((d.pct_new_words - 100.0).abs() < 1e-12);
        assert_eq!(d.type_token_curve.last(), Some(&(5, 5)));
    }

    #[test]
    fn diversity_repeats() {
        let c = Corpus {
            name: "t".into(),
            datapoints: vec![
                DataPoint {
                    tokens: vec!["a".into(), "b".into()],
                    lf: lf("n:prop|a"),
                    tags: None,
                },
                DataPoint {
                    tokens: vec!["a".into()],
                    lf: lf("n:prop|a"),
                    tags: None,
                },
            ],
        };
        let d = diversity_stats(&c);
        assert_eq!(d.word_repeats, 1);
        assert!((d.pct_new_words - 100.0 * 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn most_common_words_tie_break() {
        let c = Corpus {
            name: "t".into(),
            datapoints: vec![
                DataPoint {
                    tokens: vec!["b".into(), "a".into(), "b".into(), "a".into(), "c".into()],
                    lf: lf("n:prop|x"),
                    tags: None,
                },
            ],
        };
        // b and a tie at 2; b occurred first.
        assert_eq!(most_common_words(&c, 2), vec!["b", "a"]);
    }
}
