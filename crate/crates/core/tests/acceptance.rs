//! End-to-end acceptance criteria. Each test prints a single PASS line on
//! success (visible with `--nocapture`); a failed assertion marks the
//! criterion failed.

mod common;

use std::collections::BTreeSet;
use std::rc::Rc;

use ccg_bootstrap::corpus::{
    load_corpus, parse_gold_lexicon, synth_corpus, synth_zipf_corpus, Corpus, LoadOptions,
    SynthSpec, WordOrder,
};
use ccg_bootstrap::eval::{
    critical_examples, diversity_stats, lexicon_accuracy, word_order_scores, zipf_fit,
};
use ccg_bootstrap::forest::{build_forest, forest_posterior, tree_joint, ForestConfig, ScoreCache, TreeNode};
use ccg_bootstrap::lf::parse_lf;
use ccg_bootstrap::model::{Alphas, CondTable, ModelScorer, ModelState};
use ccg_bootstrap::tags::TagTable;
use ccg_bootstrap::trainer::{train, TrainConfig, TrainingLog};
use ccg_bootstrap::types::TypeTables;
use common::{oracle_forest, random_lf, random_tokens, serialize_tree, TableScorer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tags() -> &'static TagTable {
    TagTable::builtin()
}

/// Word-order training setup: single-word leaves force fully compositional
/// analyses, so the generator's intransitive sentences disambiguate the
/// subject side of S (see the convergence tests for the full rationale).
fn convergence_config() -> TrainConfig {
    let mut config = TrainConfig::default();
    config.forest.max_leaf_span = 1;
    config
}

fn argmax(scores: &std::collections::BTreeMap<WordOrder, f64>) -> WordOrder {
    *scores
        .iter()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0
}

#[test]
fn criterion_01_dirichlet_posterior_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n: f64 = rng.gen_range(0.0..50.0);
        let rest: f64 = rng.gen_range(0.0..50.0);
        let alpha: f64 = rng.gen_range(0.01..20.0);
        let base: f64 = rng.gen_range(0.0..1.0);
        let mut table = CondTable::default();
        table.observe("c", "x", n).unwrap();
        table.observe("c", "y", rest).unwrap();
        let expected = (n + alpha * base) / (n + rest + alpha);
        let got = table.posterior("c", "x", alpha, base);
        let rel = (got - expected).abs() / expected.abs().max(1e-300);
        assert!(rel <= 1e-12, "got {got}, expected {expected}");
    }
    println!("PASS criterion 1: Dirichlet posterior matches (n+aH)/(N+a) on 1000 cases");
}

#[test]
fn criterion_02_worked_example_oracle() {
    let tokens: Vec<String> = ["you", "lost", "a", "pencil"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let lf = parse_lf("v|lose-past pro:per|you (det:art|a n|pencil)", tags()).unwrap();
    let config = ForestConfig::default();
    let tables = TypeTables::default();
    let forest = build_forest(&tokens, &lf, &[], &config, tags(), &tables).unwrap();

    // The target derivation: [you [lost [a pencil]]] with each word a leaf.
    let find = |family: &str| -> Rc<TreeNode> {
        forest
            .roots
            .iter()
            .find(|t| {
                let Some((np, vp)) = &t.children else { return false };
                let Some((verb, obj)) = &vp.children else { return false };
                let Some((det, noun)) = &obj.children else { return false };
                t.cat.render() == family
                    && np.is_leaf()
                    && np.cat.render() == "NP"
                    && verb.is_leaf()
                    && verb.cat.render() == format!("{family}\\NP/NP")
                    && det.is_leaf()
                    && det.cat.render() == "NP/N"
                    && noun.is_leaf()
                    && noun.cat.render() == "N"
            })
            .cloned()
            .expect("worked-example tree present in forest")
    };
    let target = find("S");
    let mirror = find("Sq");

    // Freeze the published factor for every node of both family trees.
    let mut stub = TableScorer::default();
    let joint_target = 5.281e-7;
    let pooled_total = 5.888e-7;
    stub.root.insert("S".into(), 0.388);
    stub.root.insert(
        "Sq".into(),
        0.388 * (pooled_total - joint_target) / joint_target,
    );
    for tree in [&target, &mirror] {
        let (np, vp) = tree.children.as_ref().unwrap();
        let (verb, obj) = vp.children.as_ref().unwrap();
        let (det, noun) = obj.children.as_ref().unwrap();
        let mut split = |p: &TreeNode, l: &TreeNode, r: &TreeNode, v: f64| {
            stub.splits
                .insert((p.cat.render(), l.cat.render(), r.cat.render()), v);
        };
        split(tree, np, vp, 1.0);
        split(vp, verb, obj, 0.549);
        split(obj, det, noun, 0.261);
        for (leaf, probs) in [
            (np, [0.738, 0.66, 0.327, 0.912]),
            (verb, [0.989, 0.961, 0.012, 0.862]),
            (det, [0.994, 0.999, 0.486, 0.95]),
            (noun, [0.994, 1.0, 0.015, 0.973]),
        ] {
            stub.leaves.insert(leaf.cat.render(), probs[0]);
            stub.shells
                .insert((leaf.cat.render(), leaf.shell.render()), probs[1]);
            stub.lfs
                .insert((leaf.shell.render(), leaf.lf.render()), probs[2]);
            let span = tokens[leaf.span.0..leaf.span.1].join(" ");
            stub.words.insert((leaf.lf.render(), span), probs[3]);
        }
    }

    let mut cache = ScoreCache::new();
    let joint = tree_joint(&target, &stub, &tokens, &mut cache);
    let rel = (joint - joint_target).abs() / joint_target;
    assert!(rel <= 0.002, "joint {joint:.6e} vs {joint_target:.6e}");

    let posterior = forest_posterior(&forest, &stub);
    let idx = forest
        .roots
        .iter()
        .position(|t| Rc::ptr_eq(t, &target))
        .unwrap();
    assert!(
        (posterior[idx] - 0.896).abs() <= 0.001,
        "posterior {}",
        posterior[idx]
    );
    println!(
        "PASS criterion 2: worked example joint {joint:.4e} (ref 5.281e-7), posterior {:.4} (ref 0.896)",
        posterior[idx]
    );
}

#[test]
fn criterion_03_forest_matches_bruteforce_oracle() {
    let tables = TypeTables::default();
    let mut config = ForestConfig::default();
    config.max_trees = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let lf = random_lf(&mut rng, tags());
        let tokens = random_tokens(&mut rng, 3);
        let forest = build_forest(&tokens, &lf, &[], &config, tags(), &tables).unwrap();
        let got: BTreeSet<String> = forest.roots.iter().map(|t| serialize_tree(t)).collect();
        let want: BTreeSet<String> = oracle_forest(&tokens, &lf, &[], &config, tags(), &tables)
            .into_iter()
            .collect();
        assert_eq!(
            got,
            want,
            "case {case}: tokens {:?}, lf {}",
            tokens,
            lf.render()
        );
    }
    println!("PASS criterion 3: forest enumeration equals brute-force oracle on 200 instances");
}

#[test]
fn criterion_04_word_order_convergence_all_six() {
    for wo in WordOrder::ALL {
        let corpus = synth_corpus(&SynthSpec::new(wo, 300, 20, 7), tags()).unwrap();
        let (state, log) = train(&corpus, &convergence_config(), tags()).unwrap();
        let scorer = ModelScorer::new(&state, Alphas::eval());
        let scores = word_order_scores(&scorer);
        assert!(
            scores.normalized[&wo] > 0.9,
            "{}: final score {:.4}",
            wo.as_str(),
            scores.normalized[&wo]
        );
        for row in log.rows.iter().filter(|r| r.index >= 150) {
            if let Some(snapshot) = &row.word_order {
                assert_eq!(
                    argmax(snapshot),
                    wo,
                    "{}: argmax flipped at datapoint {}",
                    wo.as_str(),
                    row.index
                );
            }
        }
    }
    println!("PASS criterion 4: all six word orders converge (> 0.9, argmax stable from 150)");
}

#[test]
fn criterion_05_distractor_robustness() {
    let corpus = synth_corpus(&SynthSpec::new(WordOrder::SVO, 300, 20, 7), tags()).unwrap();
    for distractors in [2usize, 6] {
        let mut config = convergence_config();
        config.distractors = distractors;
        config.snapshot_stride = 0;
        let (state, _) = train(&corpus, &config, tags()).unwrap();
        let scorer = ModelScorer::new(&state, Alphas::eval());
        let scores = word_order_scores(&scorer);
        assert_eq!(scores.argmax(), WordOrder::SVO, "n={distractors}");
        assert!(
            scores.normalized[&WordOrder::SVO] > 0.6,
            "n={distractors}: {:.4}",
            scores.normalized[&WordOrder::SVO]
        );
    }
    println!("PASS criterion 5: SVO survives 2 and 6 distractors (> 0.6)");
}

fn synth_gold() -> String {
    // Matches the synthetic generator's vocabulary at vocab = 20.
    let mut lines = Vec::new();
    for i in 0..8 {
        lines.push(format!("kim{i}:n:prop|kim{i} || NP"));
    }
    for i in 0..5 {
        lines.push(format!(
            "grab{i}:L0.L1.v|grab{i} 1 0 || S\\NP/NP,L0.v|grab{i} 0 || S\\NP"
        ));
    }
    for i in 0..4 {
        lines.push(format!("ball{i}:n|ball{i} || N"));
    }
    for i in 0..3 {
        lines.push(format!("the{i}:L0.det:art|the{i} 0 || NP/N"));
    }
    lines.join("\n")
}

#[test]
fn criterion_06_lexicon_accuracy_on_synthetic_corpus() {
    let corpus = synth_corpus(&SynthSpec::new(WordOrder::SVO, 300, 20, 7), tags()).unwrap();
    let mut config = convergence_config();
    config.snapshot_stride = 0;
    let (state, _) = train(&corpus, &config, tags()).unwrap();
    let gold = parse_gold_lexicon(&synth_gold(), tags()).unwrap();
    let report = lexicon_accuracy(&state, &corpus, &gold, 20, tags());
    assert!(report.missing_gold.is_empty());
    assert_eq!(report.predictions.len(), 20);
    assert_eq!(report.meaning_pct, 100.0, "meaning {}", report.meaning_pct);
    assert!(report.syncat_pct >= 90.0, "syncat {}", report.syncat_pct);
    println!(
        "PASS criterion 6: lexicon meaning {:.0}%, syncat {:.0}% on 20 words",
        report.meaning_pct, report.syncat_pct
    );
}

#[test]
fn criterion_07_zipf_refit() {
    let corpus = synth_zipf_corpus(100, 50_000, 1.4, 1.5, 1, tags()).unwrap();
    let (a, _b) = zipf_fit(&corpus).unwrap();
    assert!((a - 1.4).abs() <= 0.05, "refit a = {a:.4}");
    println!("PASS criterion 7: Zipf refit a = {a:.4} (ref 1.4 +/- 0.05)");
}

#[test]
fn criterion_08_diversity_self_consistency() {
    let corpora = [
        synth_corpus(&SynthSpec::new(WordOrder::SVO, 300, 20, 7), tags()).unwrap(),
        synth_corpus(&SynthSpec::new(WordOrder::VOS, 50, 12, 3), tags()).unwrap(),
        synth_zipf_corpus(40, 2_000, 1.2, 0.5, 9, tags()).unwrap(),
    ];
    for corpus in &corpora {
        let stats = diversity_stats(corpus);
        let types: BTreeSet<&str> = corpus
            .datapoints
            .iter()
            .flat_map(|d| d.tokens.iter().map(String::as_str))
            .collect();
        assert_eq!(stats.word_repeats, corpus.token_count() - types.len());
        let curve = &stats.type_token_curve;
        for pair in curve.windows(2) {
            assert!(pair[1].1 >= pair[0].1, "curve decreases");
            assert!(
                pair[1].1 - pair[0].1 <= pair[1].0 - pair[0].0,
                "curve slope exceeds 1"
            );
        }
    }
    println!("PASS criterion 8: diversity statistics self-consistent on 3 corpora");
}

#[test]
fn criterion_09_conditional_replication() {
    // Data-dependent: runs only when the non-bundled corpora are supplied.
    let adam = std::env::var("CCG_ADAM_CORPUS").ok();
    let hagar = std::env::var("CCG_HAGAR_CORPUS").ok();
    if adam.is_none() && hagar.is_none() {
        println!("PASS criterion 9: skipped (set CCG_ADAM_CORPUS / CCG_HAGAR_CORPUS to enable)");
        return;
    }
    let load = LoadOptions { filter_co: true };
    let tables = TypeTables::default();
    let check = |path: &str, utterances: usize, tokens: usize, critical: usize| {
        let corpus = load_corpus(std::path::Path::new(path), &load, tags()).unwrap();
        assert_eq!(corpus.utterance_count(), utterances, "{path} utterances");
        assert_eq!(corpus.token_count(), tokens, "{path} tokens");
        assert_eq!(
            critical_examples(&corpus, tags(), &tables).len(),
            critical,
            "{path} critical examples"
        );
        corpus
    };
    let mut trained: Option<(Corpus, ModelState, TrainingLog)> = None;
    if let Some(path) = &adam {
        let corpus = check(path, 5320, 19314, 391);
        if std::env::var("CCG_ADAM_GOLD").is_ok() {
            let (state, log) = train(&corpus, &TrainConfig::default(), tags()).unwrap();
            trained = Some((corpus, state, log));
        }
    }
    if let Some(path) = &hagar {
        check(path, 3295, 6187, 14);
    }
    if let (Some((corpus, state, _)), Ok(gold_path)) = (&trained, std::env::var("CCG_ADAM_GOLD")) {
        let text = std::fs::read_to_string(gold_path).unwrap();
        let gold = parse_gold_lexicon(&text, tags()).unwrap();
        let report = lexicon_accuracy(state, corpus, &gold, 50, tags());
        assert!((report.meaning_pct - 100.0).abs() <= 2.0);
        assert!((report.syncat_pct - 76.0).abs() <= 2.0);
    }
    println!("PASS criterion 9: replication counts match on supplied corpora");
}

#[test]
fn criterion_10_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_ccg-bootstrap");
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("svo.jsonl");
    let corpus = synth_corpus(&SynthSpec::new(WordOrder::SVO, 60, 20, 7), tags()).unwrap();
    ccg_bootstrap::corpus::save_corpus(&corpus, &corpus_path).unwrap();
    let run = |out: &str| {
        let status = std::process::Command::new(bin)
            .args([
                "train",
                "--corpus",
                corpus_path.to_str().unwrap(),
                "--out-dir",
                dir.path().join(out).to_str().unwrap(),
                "--max-span",
                "1",
                "--snapshot-stride",
                "10",
            ])
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
    };
    run("a");
    run("b");
    for file in ["model.json", "training_log.csv", "manifest.json"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    println!("PASS criterion 10: identical manifests produce byte-identical outputs");
}
