//! Diversity and Zipf statistics for a generated corpus.

use ccg_bootstrap::corpus::{synth_corpus, synth_zipf_corpus, SynthSpec, WordOrder};
use ccg_bootstrap::eval::{critical_examples, diversity_stats, zipf_fit};
use ccg_bootstrap::tags::TagTable;
use ccg_bootstrap::types::TypeTables;

fn main() {
    let tags = TagTable::builtin();
    let tables = TypeTables::default();
    let corpus = synth_corpus(&SynthSpec::new(WordOrder::SVO, 300, 20, 7), tags).unwrap();
    let stats = diversity_stats(&corpus);
    println!("corpus: {}", corpus.name);
    println!("utterances: {}", corpus.utterance_count());
    println!("tokens: {}", corpus.token_count());
    println!("word repeats: {}", stats.word_repeats);
    println!("% new words: {:.2}", stats.pct_new_words);
    println!(
        "critical examples: {}",
        critical_examples(&corpus, tags, &tables).len()
    );
    let (a, b) = zipf_fit(&corpus).unwrap();
    println!("zipf fit: a={a:.3} b={b:.3}");

    // Refit a corpus with known Zipf parameters.
    let zipf = synth_zipf_corpus(100, 50_000, 1.4, 1.5, 1, tags).unwrap();
    let (a, b) = zipf_fit(&zipf).unwrap();
    println!("\ngenerated with a=1.4 b=1.5, refit: a={a:.3} b={b:.3}");
}
