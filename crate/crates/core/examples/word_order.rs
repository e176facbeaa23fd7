//! Train one model per generating word order and report the six scores.

use ccg_bootstrap::corpus::{synth_corpus, SynthSpec, WordOrder};
use ccg_bootstrap::eval::word_order_scores;
use ccg_bootstrap::model::{Alphas, ModelScorer};
use ccg_bootstrap::tags::TagTable;
use ccg_bootstrap::trainer::{train, TrainConfig};

fn main() {
    let tags = TagTable::builtin();
    let mut config = TrainConfig::default();
    config.forest.max_leaf_span = 1;
    config.snapshot_stride = 0;
    print!("{:>10}", "generator");
    for wo in WordOrder::ALL {
        print!("{:>8}", wo.as_str());
    }
    println!();
    for generator in WordOrder::ALL {
        let corpus = synth_corpus(&SynthSpec::new(generator, 150, 20, 7), tags).unwrap();
        let (state, _) = train(&corpus, &config, tags).unwrap();
        let scorer = ModelScorer::new(&state, Alphas::eval());
        let scores = word_order_scores(&scorer);
        print!("{:>10}", generator.as_str());
        for wo in WordOrder::ALL {
            print!("{:>8.3}", scores.normalized[&wo]);
        }
        println!();
    }
}
