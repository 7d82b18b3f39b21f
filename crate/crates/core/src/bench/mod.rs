//! UI-tree pruning analysis and the policy benchmark.

mod run;
mod summary;
mod task;
pub mod tree;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::env::SeedFile;
use crate::explore::EquivalenceEntry;
use crate::planner::{Planner, Policy};
use crate::skill::SkillRegistry;

pub use run::{policy_candidates, run_task, RunMetrics, RunOptions};
pub use summary::{aggregate, rate, round1, BenchSummary, PolicyRow};
pub use task::{load_tasks, Difficulty, TaskSpec};
pub use tree::{analyze_tree, annotate, non_essential, ApiBinding, ApiCoverageMap, UiTreeReport};

/// Runs every task under both policies in parallel, each run with its own
/// planner from `make_planner`, and aggregates.
pub fn run_bench<F>(
    tasks: &[TaskSpec],
    seeds: &BTreeMap<String, SeedFile>,
    registry: &SkillRegistry,
    api_docs: &[EquivalenceEntry],
    options: RunOptions,
    make_planner: F,
) -> Result<BenchSummary, String>
where
    F: Fn() -> Planner + Sync,
{
    let jobs: Vec<(&TaskSpec, Policy)> = tasks
        .iter()
        .flat_map(|t| [(t, Policy::UiOnly), (t, Policy::ApiFirst)])
        .collect();
    let runs = jobs
        .par_iter()
        .map(|(task, policy)| {
            let seed = seeds
                .get(&task.seed)
                .ok_or_else(|| format!("task `{}`: unknown seed `{}`", task.id, task.seed))?;
            let mut planner = make_planner();
            run_task(task, seed, *policy, &mut planner, registry, api_docs, options)
        })
        .collect::<Result<Vec<_>, _>>()?;
    aggregate(&runs)
}
