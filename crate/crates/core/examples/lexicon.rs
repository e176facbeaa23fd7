//! Predict word meanings and syntactic categories from a trained model.

use ccg_bootstrap::corpus::{synth_corpus, SynthSpec, WordOrder};
use ccg_bootstrap::eval::{most_common_words, predict_lf, predict_syncat};
use ccg_bootstrap::tags::TagTable;
use ccg_bootstrap::trainer::{train, TrainConfig};

fn main() {
    let tags = TagTable::builtin();
    let corpus = synth_corpus(&SynthSpec::new(WordOrder::SVO, 200, 20, 7), tags).unwrap();
    let mut config = TrainConfig::default();
    config.forest.max_leaf_span = 1;
    config.snapshot_stride = 0;
    let (state, _) = train(&corpus, &config, tags).unwrap();
    for word in most_common_words(&corpus, 20) {
        let lf = predict_lf(&state, &word, tags);
        let cat = predict_syncat(&state, &word, tags);
        println!(
            "{:8} {:25} {}",
            word,
            lf.map(|t| t.render()).unwrap_or_else(|| "-".into()),
            cat.map(|c| c.render()).unwrap_or_else(|| "-".into())
        );
    }
}
