//! Self-directed exploration from a few seed documents.
//!
//!     cargo run --example explorer_exploration -- 60 7

use axis::corpus::Corpus;
use axis::explore::{explore, ExploreBudget};
use axis::planner::Planner;
use axis::skill::builtin::base_library;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let max_steps = args.next().map(|a| a.parse()).transpose()?.unwrap_or(60);
    let rng_seed = args.next().map(|a| a.parse()).transpose()?.unwrap_or(7);

    let corpus = Corpus::bundled()?;
    let seeds: Vec<_> = ["empty", "canonical"].iter().map(|id| corpus.seeds[*id].clone()).collect();
    let mut registry = base_library();
    let report = explore(
        &seeds,
        &mut Planner::scripted(rng_seed),
        &mut registry,
        ExploreBudget { max_steps, rng_seed },
        &corpus.api_docs(),
    );
    println!("{}", report.to_text());
    Ok(())
}
