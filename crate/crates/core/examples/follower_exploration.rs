//! Follows the bundled help documents and prints the exploration report.
//!
//! cargo run --example follower_exploration

use axis::corpus::Corpus;
use axis::planner::Planner;

fn main() -> anyhow::Result<()> {
    let corpus = Corpus::bundled()?;
    let mut planner = Planner::scripted(0);
    let (registry, report) = corpus.learn_library(&mut planner);
    println!("{}", report.to_text());
    for s in registry.iter().filter(|s| s.provenance != axis::skill::Provenance::Builtin) {
        println!("{:<40} {:<14} h={}", s.name, s.kind.label(), s.hierarchy);
    }
    Ok(())
}
