//! Runs every bundled task under both policies and prints the summary.
//!
//!     cargo run --example bench_policies

use axis::bench::{run_bench, RunOptions};
use axis::corpus::Corpus;
use axis::planner::Planner;

fn main() -> anyhow::Result<()> {
    let corpus = Corpus::bundled()?;
    let lib = corpus.load_library(None)?;
    let summary = run_bench(&corpus.tasks, &corpus.seeds, &lib, &corpus.api_docs(), RunOptions::default(), || {
        Planner::scripted(0)
    })
    .map_err(anyhow::Error::msg)?;
    print!("{}", summary.to_text());
    println!();
    for r in summary.runs.iter().filter(|r| r.policy == axis::planner::Policy::ApiFirst) {
        println!("{:<20} {} step(s), {} API, {} UI", r.task_id, r.steps, r.api_actions, r.ui_actions);
    }
    Ok(())
}
