//! Enumerate the reverse-application splits of a logical form.

use ccg_bootstrap::lf::{apply, enumerate_splits, parse_lf, SplitOptions};
use ccg_bootstrap::tags::TagTable;

fn main() {
    let tags = TagTable::builtin();
    let lf = parse_lf("v|lose-past pro:per|you (det:art|a n|pencil)", tags).unwrap();
    println!("term: {}", lf.render());
    for (functor, argument) in enumerate_splits(&lf, &SplitOptions::default()) {
        let back = apply(&functor, &argument).unwrap();
        println!(
            "  functor {:40} argument {:25} reapplies to {}",
            functor.render(),
            argument.render(),
            back.render()
        );
    }
}
