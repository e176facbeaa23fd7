//! Train on a synthetic SVO corpus and print the learning curve.

use ccg_bootstrap::corpus::{synth_corpus, SynthSpec, WordOrder};
use ccg_bootstrap::tags::TagTable;
use ccg_bootstrap::trainer::{train, TrainConfig};

fn main() {
    let tags = TagTable::builtin();
    let corpus = synth_corpus(&SynthSpec::new(WordOrder::SVO, 120, 20, 7), tags).unwrap();
    let mut config = TrainConfig::default();
    config.forest.max_leaf_span = 1;
    config.snapshot_stride = 10;
    let (state, log) = train(&corpus, &config, tags).unwrap();
    println!("index  trees  svo");
    for row in &log.rows {
        if let Some(scores) = &row.word_order {
            println!(
                "{:5}  {:5}  {:.4}",
                row.index, row.n_trees, scores[&WordOrder::SVO]
            );
        }
    }
    println!(
        "\n{} categories seen, {} root observations",
        state.seen_categories.len(),
        state.root.marginal("root")
    );
}
