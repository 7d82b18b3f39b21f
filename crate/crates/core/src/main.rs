use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use axis::bench::{analyze_tree, run_bench, run_task, ApiCoverageMap, RunOptions};
use axis::corpus::Corpus;
use axis::env::{ControlNode, EnvSession};
use axis::exec::ActionRegistry;
use axis::explore::{explore, ExploreBudget, ExplorationReport};
use axis::planner::{Planner, Policy, RemoteConfig, RemotePlanner};
use axis::skill::builtin::base_library;
use axis::skill::{Provenance, Skill, SkillRegistry};
use axis::validate::{validate_dynamic, validate_static};

#[derive(Parser)]
#[command(name = "axis", version, about = "API-first skill exploration over a simulated word processor")]
struct Cli {
    /// Planner backend. `remote` reads AXIS_PLANNER_URL and friends.
    #[arg(long, global = true, value_enum, default_value_t = PlannerKind::Scripted)]
    planner: PlannerKind,
    /// Corpus root (seeds, helpdocs, tasks, api_equiv.json, trees, skills).
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Seed directory, overriding `<corpus>/seeds`.
    #[arg(long, global = true)]
    seed_dir: Option<PathBuf>,
    /// Skill library directory. Read by validate/run-task/bench/analyze-ui,
    /// written by explore.
    #[arg(long, global = true)]
    skills_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    out: OutFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlannerKind {
    Scripted,
    Remote,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    Follower,
    Explorer,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Learn skills from help documents and/or self-driven exploration.
    Explore {
        #[arg(long, value_enum, default_value_t = Mode::Follower)]
        mode: Mode,
        /// Explorer instructions per seed.
        #[arg(long, default_value_t = 40)]
        max_steps: usize,
        /// Explorer seeds, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "empty,canonical,shapes_doc")]
        seeds: Vec<String>,
    },
    /// Statically and dynamically validate one skill file (DSL source or
    /// stored JSON).
    Validate {
        file: PathBuf,
        /// Seed the dynamic check starts from.
        #[arg(long, default_value = "canonical")]
        seed: String,
    },
    /// Run one benchmark task under one policy.
    RunTask {
        task: String,
        #[arg(long, default_value = "api_first")]
        policy: String,
        #[arg(long, default_value_t = 20)]
        step_cap: usize,
    },
    /// Run every task under both policies and aggregate.
    Bench {
        #[arg(long, default_value_t = 20)]
        step_cap: usize,
    },
    /// Classify UI-tree nodes as prunable given API coverage.
    AnalyzeUi {
        /// ControlNode JSON; defaults to the bundled Home-tab fixture.
        #[arg(long)]
        tree: Option<PathBuf>,
        /// ApiCoverageMap JSON; derived from the equivalence table when absent.
        #[arg(long)]
        coverage: Option<PathBuf>,
    },
}

impl Cli {
    fn corpus(&self) -> Result<Corpus> {
        let root = self.corpus.clone().unwrap_or_else(Corpus::bundled_dir);
        Corpus::load(&root, self.seed_dir.as_deref()).with_context(|| format!("loading corpus {}", root.display()))
    }

    fn planner(&self) -> Result<Planner> {
        Ok(match self.planner {
            PlannerKind::Scripted => Planner::scripted(self.rng_seed),
            PlannerKind::Remote => Planner::new(RemotePlanner::new(RemoteConfig::from_env().map_err(|e| anyhow!(e))?)),
        })
    }

    fn library(&self, corpus: &Corpus) -> Result<SkillRegistry> {
        corpus
            .load_library(self.skills_dir.as_deref())
            .context("loading skill library")
    }

    fn emit(&self, json: String, text: String) {
        match self.out {
            OutFormat::Json => println!("{json}"),
            OutFormat::Text => print!("{text}"),
        }
    }
}

fn read_skill(path: &Path, registry: &SkillRegistry) -> Result<(String, Option<Skill>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let source = if path.extension().is_some_and(|e| e == "json") {
        let v: serde_json::Value = serde_json::from_str(&text)?;
        v.get("source")
            .and_then(|s| s.as_str())
            .ok_or_else(|| anyhow!("{} has no `source` field", path.display()))?
            .to_string()
    } else {
        text
    };
    let compiled = Skill::compile(&source, Provenance::Follower, registry).ok();
    Ok((source, compiled))
}

fn run(cli: &Cli) -> Result<bool> {
    let corpus = cli.corpus()?;
    match &cli.command {
        Command::Explore { mode, max_steps, seeds } => {
            let mut planner = cli.planner()?;
            let api_docs = corpus.api_docs();
            let mut registry = base_library();
            let mut report = ExplorationReport::new(axis::explore::Origin::Follower);
            if *mode != Mode::Explorer {
                let (reg, r) = corpus.learn_library(&mut planner);
                registry = reg;
                report = r;
            }
            if *mode != Mode::Follower {
                let chosen = seeds
                    .iter()
                    .map(|id| corpus.seeds.get(id).cloned().ok_or_else(|| anyhow!("unknown seed `{id}`")))
                    .collect::<Result<Vec<_>>>()?;
                let budget = ExploreBudget {
                    max_steps: *max_steps,
                    rng_seed: cli.rng_seed,
                };
                let r = explore(&chosen, &mut planner, &mut registry, budget, &api_docs);
                if *mode == Mode::Explorer {
                    report = r;
                } else {
                    report.merge(r);
                }
            }
            if let Some(dir) = &cli.skills_dir {
                registry.save(dir).with_context(|| format!("saving library to {}", dir.display()))?;
            }
            cli.emit(report.to_json(), report.to_text());
            Ok(report.incomplete.is_empty())
        }
        Command::Validate { file, seed } => {
            let registry = cli.library(&corpus)?;
            let (source, compiled) = read_skill(file, &registry)?;
            let findings = validate_static(&source, &registry, ActionRegistry::standard());
            let start = corpus
                .seeds
                .get(seed)
                .ok_or_else(|| anyhow!("unknown seed `{seed}`"))?;
            let outcome = match (&compiled, findings.is_empty()) {
                (Some(skill), true) => {
                    let snapshot = EnvSession::load(start)?.snapshot();
                    let mut planner = cli.planner()?;
                    Some(validate_dynamic(skill, &registry, seed, &snapshot, &mut planner))
                }
                _ => None,
            };
            let passed = findings.is_empty() && outcome.as_ref().is_some_and(|o| o.passed());
            let mut text = String::new();
            for f in &findings {
                text.push_str(&format!("static {:?} at statement {}: {}\n", f.rule, f.statement, f.message));
            }
            if findings.is_empty() && compiled.is_none() {
                text.push_str("static checks passed but the skill does not compile against the library\n");
            }
            if let Some(o) = &outcome {
                text.push_str(&format!(
                    "dynamic: {} `{}` checker `{}`: {}\n",
                    o.skill,
                    o.invocation,
                    o.checker,
                    o.verdict.as_ref().map(|v| v.rationale.as_str()).unwrap_or("no verdict")
                ));
            }
            text.push_str(if passed { "PASS\n" } else { "FAIL\n" });
            let json = serde_json::to_string_pretty(&json!({
                "static": findings,
                "dynamic": outcome,
                "passed": passed,
            }))?;
            cli.emit(json, text);
            Ok(passed)
        }
        Command::RunTask { task, policy, step_cap } => {
            let policy = Policy::parse(policy).ok_or_else(|| anyhow!("policy must be ui_only or api_first"))?;
            let spec = corpus.task(task).ok_or_else(|| anyhow!("unknown task `{task}`"))?;
            let registry = cli.library(&corpus)?;
            let mut planner = cli.planner()?;
            let options = RunOptions {
                step_cap: *step_cap,
                ..Default::default()
            };
            let m = run_task(spec, &corpus.seeds[&spec.seed], policy, &mut planner, &registry, &corpus.api_docs(), options)
                .map_err(|e| anyhow!(e))?;
            let text = format!(
                "{} [{}]: {} in {} step(s), {} UI + {} API action(s), sim {:.1}s\n",
                m.task_id,
                m.policy.as_str(),
                if m.success { "success" } else { "failure" },
                m.steps,
                m.ui_actions,
                m.api_actions,
                m.sim_time
            );
            cli.emit(serde_json::to_string_pretty(&m)?, text);
            Ok(true)
        }
        Command::Bench { step_cap } => {
            let registry = cli.library(&corpus)?;
            let options = RunOptions {
                step_cap: *step_cap,
                ..Default::default()
            };
            // Fail early on a bad remote configuration.
            cli.planner()?;
            let summary = run_bench(&corpus.tasks, &corpus.seeds, &registry, &corpus.api_docs(), options, || {
                cli.planner().expect("planner was constructible above")
            })
            .map_err(|e| anyhow!(e))?;
            cli.emit(summary.to_json(), summary.to_text());
            Ok(true)
        }
        Command::AnalyzeUi { tree, coverage } => {
            let tree_path = tree.clone().unwrap_or_else(|| corpus.trees_dir().join("home_tab.json"));
            let text = std::fs::read_to_string(&tree_path).with_context(|| format!("reading {}", tree_path.display()))?;
            let root: ControlNode = serde_json::from_str(&text).with_context(|| format!("parsing {}", tree_path.display()))?;
            let registry = cli.library(&corpus)?;
            let cov = match coverage {
                Some(p) => ApiCoverageMap::load(p)?,
                None => ApiCoverageMap::from_equivalences(&root, &corpus.api_docs(), &registry, corpus.canonical_seed()),
            };
            cov.check_skills(&registry).map_err(|e| anyhow!(e))?;
            let report = analyze_tree(&root, &cov).map_err(|e| anyhow!(e))?;
            cli.emit(serde_json::to_string_pretty(&report)?, report.to_text());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if cli.out == OutFormat::Json {
                println!("{}", json!({"error": format!("{e:#}")}));
            }
            ExitCode::from(2)
        }
    }
}
