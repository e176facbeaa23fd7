//! Command-line entry point wiring the library into reproducible runs.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{
    load_corpus, save_corpus, synth_corpus, synth_zipf_corpus, load_gold_lexicon, Corpus,
    LoadOptions, SynthSpec, WordOrder,
};
use crate::error::{Error, Result};
use crate::eval::{
    critical_examples, diversity_stats, lexicon_accuracy, word_order_scores, zipf_fit,
};
use crate::forest::{build_forest, forest_posterior, ForestConfig};
use crate::lf::parse_lf;
use crate::model::{Alphas, ModelScorer, ModelState};
use crate::tags::TagTable;
use crate::trainer::{train, TrainConfig, TrainingLog};
use crate::types::TypeTables;

#[derive(Parser)]
#[command(name = "ccg-bootstrap", version, about = "Probabilistic CCG acquisition from utterance/logical-form pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on a corpus and write checkpoint, curve CSV, and manifest.
    Train(TrainArgs),
    /// Score a trained model's lexicon against a gold lexicon.
    EvalLexicon(EvalLexiconArgs),
    /// Report the six word-order scores of a checkpoint.
    WordOrder(WordOrderArgs),
    /// Corpus-level statistics: counts, critical examples, Zipf fit, diversity.
    CorpusStats(CorpusStatsArgs),
    /// Print the scored derivation forest for one utterance/LF pair.
    Parse(ParseArgs),
    /// Generate a deterministic synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum XAxis {
    Utterances,
    Tokens,
}

#[derive(Args)]
struct CorpusOpts {
    /// Corpus file (JSONL, one {"tokens", "lf"[, "tags"]} object per line).
    #[arg(long)]
    corpus: PathBuf,
    /// Drop communicator tokens ("co" tag or no LF counterpart).
    #[arg(long)]
    filter_co: bool,
    /// Tag table TSV overriding the built-in CHILDES table.
    #[arg(long)]
    tag_table: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusOpts,
    /// Output directory for model.json, training_log.csv, manifest.json.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Distractor logical forms pooled with each true LF.
    #[arg(long, default_value_t = 0)]
    distractors: usize,
    #[arg(long, default_value_t = 10.0)]
    alpha_t: f64,
    #[arg(long, default_value_t = 0.25)]
    alpha_w: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_l: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_h: f64,
    /// Per-datapoint derivation cap; over-limit datapoints are skipped.
    #[arg(long, default_value_t = 5000)]
    max_trees: usize,
    /// Maximum tokens a single lexical item may span.
    #[arg(long, default_value_t = 3)]
    max_span: usize,
    /// Word-order snapshot cadence in datapoints (0 disables).
    #[arg(long, default_value_t = 1)]
    snapshot_stride: usize,
    /// Curve CSV index column: datapoint index or cumulative token count.
    #[arg(long, value_enum, default_value_t = XAxis::Utterances)]
    x_axis: XAxis,
}

#[derive(Args)]
struct EvalLexiconArgs {
    /// Model checkpoint from `train`.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    corpus: CorpusOpts,
    /// Gold lexicon ("word:LF || CAT" lines).
    #[arg(long)]
    gold: PathBuf,
    /// Evaluate the top-k most frequent corpus words.
    #[arg(long, default_value_t = 100)]
    top_k: usize,
    /// Write the JSON report here as well as stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WordOrderArgs {
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct CorpusStatsArgs {
    #[command(flatten)]
    corpus: CorpusOpts,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParseArgs {
    /// Optional checkpoint; omitted means a fresh (uniform) model.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Space-separated utterance.
    #[arg(long)]
    utterance: String,
    /// Logical form of the utterance.
    #[arg(long)]
    lf: String,
    /// Print at most this many trees, best posterior first.
    #[arg(long, default_value_t = 5)]
    top: usize,
    #[arg(long, default_value_t = 5000)]
    max_trees: usize,
    #[arg(long, default_value_t = 3)]
    max_span: usize,
    #[arg(long)]
    tag_table: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Constituent order of generated transitive sentences.
    #[arg(long, default_value = "SVO")]
    order: String,
    #[arg(long, default_value_t = 300)]
    sentences: usize,
    #[arg(long, default_value_t = 20)]
    vocab: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    intransitive_ratio: f64,
    /// Generate a Zipf-distributed single-token corpus with this many
    /// tokens instead of sentences (uses --zipf-a / --zipf-b).
    #[arg(long, default_value_t = 0)]
    zipf_tokens: usize,
    #[arg(long, default_value_t = 1.4)]
    zipf_a: f64,
    #[arg(long, default_value_t = 1.5)]
    zipf_b: f64,
    /// Output corpus path (JSONL).
    #[arg(long)]
    out: PathBuf,
}

/// Run the CLI; the return value is the process exit code
/// (0 success, 1 usage, 2 data error, 3 internal error).
pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(&args),
        Command::EvalLexicon(args) => cmd_eval_lexicon(&args),
        Command::WordOrder(args) => cmd_word_order(&args),
        Command::CorpusStats(args) => cmd_corpus_stats(&args),
        Command::Parse(args) => cmd_parse(&args),
        Command::Synth(args) => cmd_synth(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ForestLimit(_) | Error::NegativeWeight(_) | Error::NoBinder => 3,
        _ => 2,
    }
}

fn load_tags(path: &Option<PathBuf>) -> Result<TagTable> {
    match path {
        Some(p) => TagTable::from_path(p),
        None => Ok(TagTable::builtin().clone()),
    }
}

fn read_corpus(opts: &CorpusOpts, tags: &TagTable) -> Result<Corpus> {
    let load = LoadOptions {
        filter_co: opts.filter_co,
    };
    load_corpus(&opts.corpus, &load, tags)
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Serialize)]
struct Manifest {
    tool_version: &'static str,
    command: String,
    config: serde_json::Value,
    inputs: std::collections::BTreeMap<String, String>,
}

fn write_manifest(
    dir: &Path,
    command: &str,
    config: serde_json::Value,
    input_paths: &[&Path],
) -> Result<()> {
    let mut inputs = std::collections::BTreeMap::new();
    for p in input_paths {
        inputs.insert(p.display().to_string(), sha256_file(p)?);
    }
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config,
        inputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

fn write_training_log(path: &Path, log: &TrainingLog, x_axis: XAxis) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["index".to_string(), "n_trees".into(), "skipped".into()];
    header.extend(WordOrder::ALL.iter().map(|wo| wo.as_str().to_lowercase()));
    w.write_record(&header)?;
    for row in &log.rows {
        let index = match x_axis {
            XAxis::Utterances => row.index,
            XAxis::Tokens => row.tokens_seen,
        };
        let mut rec = vec![
            index.to_string(),
            row.n_trees.to_string(),
            row.skipped.to_string(),
        ];
        match &row.word_order {
            Some(scores) => {
                rec.extend(WordOrder::ALL.iter().map(|wo| format!("{:.6}", scores[wo])));
            }
            None => rec.extend(std::iter::repeat(String::new()).take(WordOrder::ALL.len())),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let tags = load_tags(&args.corpus.tag_table)?;
    let corpus = read_corpus(&args.corpus, &tags)?;
    let mut config = TrainConfig::default();
    config.distractors = args.distractors;
    config.alphas = Alphas {
        alpha_t: args.alpha_t,
        alpha_w: args.alpha_w,
        alpha_l: args.alpha_l,
        alpha_h: args.alpha_h,
        ..Alphas::training()
    };
    config.forest = ForestConfig {
        max_trees: args.max_trees,
        max_leaf_span: args.max_span,
        ..ForestConfig::default()
    };
    config.snapshot_stride = args.snapshot_stride;
    fs::create_dir_all(&args.out_dir)?;

    let (state, log) = train(&corpus, &config, &tags)?;
    state.save(&args.out_dir.join("model.json"))?;
    write_training_log(&args.out_dir.join("training_log.csv"), &log, args.x_axis)?;

    let config_json = serde_json::json!({
        "corpus": args.corpus.corpus.display().to_string(),
        "filter_co": args.corpus.filter_co,
        "distractors": args.distractors,
        "alpha_t": args.alpha_t,
        "alpha_w": args.alpha_w,
        "alpha_l": args.alpha_l,
        "alpha_h": args.alpha_h,
        "max_trees": args.max_trees,
        "max_span": args.max_span,
        "snapshot_stride": args.snapshot_stride,
        "x_axis": match args.x_axis { XAxis::Utterances => "utterances", XAxis::Tokens => "tokens" },
    });
    let mut inputs: Vec<&Path> = vec![&args.corpus.corpus];
    if let Some(tt) = &args.corpus.tag_table {
        inputs.push(tt);
    }
    write_manifest(&args.out_dir, "train", config_json, &inputs)?;

    let skipped = log.rows.iter().filter(|r| r.skipped).count();
    println!(
        "trained on {} utterances ({} tokens), {} skipped; outputs in {}",
        corpus.utterance_count(),
        corpus.token_count(),
        skipped,
        args.out_dir.display()
    );
    if let Some(scores) = log.rows.last().and_then(|r| r.word_order.as_ref()) {
        let best = scores
            .iter()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        println!("final word-order argmax: {} ({:.4})", best.0.as_str(), best.1);
    }
    Ok(())
}

fn print_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(path) = out {
        fs::write(path, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_eval_lexicon(args: &EvalLexiconArgs) -> Result<()> {
    let tags = load_tags(&args.corpus.tag_table)?;
    let state = ModelState::load(&args.model)?;
    let corpus = read_corpus(&args.corpus, &tags)?;
    let gold = load_gold_lexicon(&args.gold, &tags)?;
    let report = lexicon_accuracy(&state, &corpus, &gold, args.top_k, &tags);
    let json = serde_json::json!({
        "top_k": args.top_k,
        "evaluated": report.predictions.len(),
        "missing_gold": report.missing_gold,
        "meaning_pct": report.meaning_pct,
        "syncat_pct": report.syncat_pct,
        "both_pct": report.both_pct,
        "predictions": report.predictions.iter().map(|p| serde_json::json!({
            "word": p.word,
            "predicted_lf": p.predicted_lf.as_ref().map(|t| t.render()),
            "predicted_cat": p.predicted_cat.as_ref().map(|c| c.render()),
            "meaning_correct": p.meaning_correct,
            "syncat_correct": p.syncat_correct,
            "both_correct": p.both_correct,
        })).collect::<Vec<_>>(),
    });
    print_json(&json, &args.out)
}

fn cmd_word_order(args: &WordOrderArgs) -> Result<()> {
    let state = ModelState::load(&args.model)?;
    let scorer = ModelScorer::new(&state, Alphas::eval());
    let scores = word_order_scores(&scorer);
    let to_map = |m: &std::collections::BTreeMap<WordOrder, f64>| {
        m.iter()
            .map(|(k, v)| (k.as_str().to_string(), *v))
            .collect::<std::collections::BTreeMap<_, _>>()
    };
    let json = serde_json::json!({
        "raw": to_map(&scores.raw),
        "normalized": to_map(&scores.normalized),
        "argmax": scores.argmax().as_str(),
    });
    print_json(&json, &None)
}

fn cmd_corpus_stats(args: &CorpusStatsArgs) -> Result<()> {
    let tags = load_tags(&args.corpus.tag_table)?;
    let corpus = read_corpus(&args.corpus, &tags)?;
    let tables = TypeTables::default();
    let critical = critical_examples(&corpus, &tags, &tables);
    let stats = diversity_stats(&corpus);
    let zipf = if corpus.token_count() > 0 {
        let (a, b) = zipf_fit(&corpus)?;
        Some(serde_json::json!({ "a": a, "b": b }))
    } else {
        None
    };
    let json = serde_json::json!({
        "corpus": corpus.name,
        "utterances": corpus.utterance_count(),
        "tokens": corpus.token_count(),
        "word_types": corpus.token_count() - stats.word_repeats,
        "word_repeats": stats.word_repeats,
        "pct_new_words": stats.pct_new_words,
        "critical_examples": critical.len(),
        "zipf": zipf,
    });
    print_json(&json, &args.out)
}

fn cmd_parse(args: &ParseArgs) -> Result<()> {
    let tags = load_tags(&args.tag_table)?;
    let state = match &args.model {
        Some(p) => ModelState::load(p)?,
        None => ModelState::new(),
    };
    let lf = parse_lf(&args.lf, &tags)?;
    let tokens: Vec<String> = args.utterance.split_whitespace().map(String::from).collect();
    let config = ForestConfig {
        max_trees: args.max_trees,
        max_leaf_span: args.max_span,
        ..ForestConfig::default()
    };
    let registry = state.registry();
    let tables = TypeTables::default();
    let forest = build_forest(&tokens, &lf, &registry, &config, &tags, &tables)?;
    let scorer = ModelScorer::new(&state, Alphas::eval());
    let posterior = forest_posterior(&forest, &scorer);
    let mut scored: Vec<(usize, f64)> = posterior.iter().copied().enumerate().collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let trees = scored
        .iter()
        .take(args.top)
        .map(|(i, p)| {
            let tree = &forest.roots[*i];
            serde_json::json!({
                "posterior": p,
                "category": tree.cat.render(),
                "tree": tree.debug_json(&tokens),
            })
        })
        .collect::<Vec<_>>();
    let json = serde_json::json!({
        "utterance": args.utterance,
        "lf": lf.render(),
        "n_trees": forest.roots.len(),
        "top": trees,
    });
    print_json(&json, &None)
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let tags = TagTable::builtin();
    let corpus = if args.zipf_tokens > 0 {
        synth_zipf_corpus(args.vocab, args.zipf_tokens, args.zipf_a, args.zipf_b, args.seed, tags)?
    } else {
        let order = WordOrder::parse(&args.order)
            .ok_or_else(|| Error::SynthSpec(format!("unknown word order `{}`", args.order)))?;
        let spec = SynthSpec {
            intransitive_ratio: args.intransitive_ratio,
            ..SynthSpec::new(order, args.sentences, args.vocab, args.seed)
        };
        synth_corpus(&spec, tags)?
    };
    save_corpus(&corpus, &args.out)?;
    println!(
        "wrote {} utterances ({} tokens) to {}",
        corpus.utterance_count(),
        corpus.token_count(),
        args.out.display()
    );
    Ok(())
}
