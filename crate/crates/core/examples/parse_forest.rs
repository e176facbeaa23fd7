//! Build and score the derivation forest for one utterance/LF pair.

use ccg_bootstrap::forest::{build_forest, forest_posterior, ForestConfig};
use ccg_bootstrap::lf::parse_lf;
use ccg_bootstrap::model::{Alphas, ModelScorer, ModelState};
use ccg_bootstrap::tags::TagTable;
use ccg_bootstrap::types::TypeTables;

fn main() {
    let tags = TagTable::builtin();
    let tokens: Vec<String> = ["you", "lost", "a", "pencil"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let lf = parse_lf("v|lose-past pro:per|you (det:art|a n|pencil)", tags).unwrap();
    let config = ForestConfig::default();
    let tables = TypeTables::default();
    let forest = build_forest(&tokens, &lf, &[], &config, tags, &tables).unwrap();
    println!("{} derivations", forest.roots.len());

    // A fresh model scores every derivation from the base distributions.
    let state = ModelState::new();
    let scorer = ModelScorer::new(&state, Alphas::eval());
    let posterior = forest_posterior(&forest, &scorer);
    let mut ranked: Vec<(usize, f64)> = posterior.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    for (i, p) in ranked.iter().take(3) {
        let tree = &forest.roots[*i];
        println!("\nposterior {p:.4}");
        println!(
            "{}",
            serde_json::to_string_pretty(&tree.debug_json(&tokens)).unwrap()
        );
    }
}
