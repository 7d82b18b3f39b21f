//! Acceptance run: one line per criterion.
//!
//! Runs without the libtest harness so the lines always print. Criterion 10
//! is known to be unattainable (see `EXPECTED_FAIL`); it is checked exactly
//! as stated and reported, but does not fail the run.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use axis::bench::{analyze_tree, rate, run_bench, run_task, ApiBinding, ApiCoverageMap, RunOptions};
use axis::corpus::Corpus;
use axis::env::{ControlNode, ControlType, EnvSession, SeedFile};
use axis::exec::ActionRegistry;
use axis::explore::{explore, ExplorationReport, ExploreBudget};
use axis::planner::{Planner, Policy};
use axis::skill::classify::hierarchy;
use axis::skill::{parse_invocation, Provenance, Skill, SkillKind, SkillRegistry};
use axis::validate::{validate_dynamic, validate_static};

/// 9 / 112 = 8.036%, which rounds to 8.0 and sits outside 8.1 +/- 0.05.
const EXPECTED_FAIL: &[u32] = &[10];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Ctx {
    corpus: Corpus,
    learned: SkillRegistry,
    report: ExplorationReport,
}

fn c1_fig1(cx: &Ctx) -> Outcome {
    let task = cx.corpus.task("t_fig1").ok_or("t_fig1 missing")?;
    let seed = &cx.corpus.seeds[&task.seed];
    let docs = cx.corpus.api_docs();
    let t0 = Instant::now();
    let ui = run_task(task, seed, Policy::UiOnly, &mut Planner::scripted(0), &cx.learned, &docs, RunOptions::default())?;
    let api = run_task(task, seed, Policy::ApiFirst, &mut Planner::scripted(0), &cx.learned, &docs, RunOptions::default())?;
    let took = t0.elapsed();
    ensure(ui.success && api.success, || "a run failed".into())?;
    ensure((ui.ui_actions, ui.api_actions) == (3, 0), || format!("ui_only used {} UI / {} API", ui.ui_actions, ui.api_actions))?;
    ensure((api.ui_actions, api.api_actions) == (0, 1), || format!("api_first used {} UI / {} API", api.ui_actions, api.api_actions))?;
    ensure(ui.final_digest == api.final_digest, || "final digests differ".into())?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;

    // The CLI golden: steps = 1 in the JSON.
    let out = Command::new(env!("CARGO_BIN_EXE_axis"))
        .args(["run-task", "t_fig1", "--policy", "api_first", "--out", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["steps"] == 1, || format!("CLI reported steps {}", v["steps"]))?;
    Ok(format!("ui_only 3 UI, api_first 1 API, same digest, {took:.0?}"))
}

fn c2_hierarchy(cx: &Ctx) -> Outcome {
    let want = [
        ("activate_dictation", 1),
        ("align_text", 2),
        ("insert_header_footer", 2),
        ("apply_text_style", 3),
    ];
    for (name, h) in want {
        let s = cx.learned.get(name).ok_or_else(|| format!("`{name}` was not learned"))?;
        let again = hierarchy(&s.code, Some(name), &cx.learned).map_err(|e| e.to_string())?;
        ensure(s.hierarchy == h && again == h, || format!("{name}: stored {} recomputed {again}, want {h}", s.hierarchy))?;
    }
    Ok("1, 2, 2, 3".into())
}

fn c3_static(cx: &Ctx) -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/defects");
    let expected: BTreeMap<String, String> =
        serde_json::from_str(&std::fs::read_to_string(dir.join("expected.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let bundled = cx.corpus.load_library(None).map_err(|e| e.to_string())?;
    let mut hits = 0;
    for (file, rule) in &expected {
        let src = std::fs::read_to_string(dir.join(file)).map_err(|e| e.to_string())?;
        let f = validate_static(&src, &bundled, ActionRegistry::standard());
        let got: Vec<String> = f.iter().map(|f| format!("{:?}", f.rule)).collect();
        ensure(got == [rule.clone()], || format!("{file}: expected [{rule}], got {got:?}"))?;
        hits += 1;
    }
    let mut clean = 0;
    for s in bundled.iter() {
        let f = validate_static(&s.source, &bundled, ActionRegistry::standard());
        ensure(f.is_empty(), || format!("false finding on `{}`: {}", s.name, f[0]))?;
        clean += 1;
    }
    Ok(format!("{hits}/{} defects flagged, 0 findings on {clean} clean skills", expected.len()))
}

fn c4_dynamic(cx: &Ctx) -> Outcome {
    let start = EnvSession::load(&cx.corpus.seeds["empty"]).map_err(|e| e.to_string())?.snapshot();
    let hf = cx.learned.get("insert_header_footer").ok_or("insert_header_footer missing")?;
    let t0 = Instant::now();
    let ok = validate_dynamic(hf, &cx.learned, "empty", &start, &mut Planner::scripted(0));
    let t_ok = t0.elapsed();
    ensure(ok.passed(), || format!("insert_header_footer failed: {:?}", ok.verdict))?;

    let src = "skill open_insert_tab() \"\"\"\nSwitch to the Insert tab.\nExample: open_insert_tab()\n\"\"\" {\n    call click_input(control_name: \"Insert\");\n}\n";
    let idle = Skill::compile(src, Provenance::Explorer, &cx.learned).map_err(|e| e.to_string())?;
    let t1 = Instant::now();
    let bad = validate_dynamic(&idle, &cx.learned, "empty", &start, &mut Planner::scripted(0));
    let t_bad = t1.elapsed();
    ensure(!bad.passed(), || "effect-free skill passed".into())?;
    ensure(t_ok < Duration::from_secs(1) && t_bad < Duration::from_secs(1), || format!("slow: {t_ok:?} / {t_bad:?}"))?;
    Ok(format!("pass in {t_ok:.0?}, effect-free fails in {t_bad:.0?}"))
}

fn c5_follower(cx: &Ctx) -> Outcome {
    let r = &cx.report;
    ensure(cx.corpus.helpdocs.len() == 12, || format!("{} scripts", cx.corpus.helpdocs.len()))?;
    ensure(r.skills.len() >= 10, || format!("only {} skills", r.skills.len()))?;
    for e in &r.skills {
        let s = cx.learned.get(&e.name).ok_or_else(|| format!("`{}` not registered", e.name))?;
        let f = validate_static(&s.source, &cx.learned, ActionRegistry::standard());
        ensure(f.is_empty() && e.validation.passed, || format!("`{}` did not validate", e.name))?;
    }
    let deep = r.skills.iter().filter(|e| e.hierarchy >= 2).count();
    let translated = r
        .skills
        .iter()
        .filter(|e| e.kind == SkillKind::CompositeApi && e.translated_from.is_some())
        .count();
    ensure(deep >= 3, || format!("{deep} skills with hierarchy >= 2"))?;
    ensure(translated >= 1, || "no translated CompositeAPI".into())?;
    Ok(format!("{} skills, {deep} with hierarchy >= 2, {translated} translated CompositeAPI", r.skills.len()))
}

fn c6_determinism(_: &Ctx) -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_axis"))
            .args(["explore", "--mode", "explorer", "--max-steps", "200", "--rng-seed", "7", "--out", "json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || String::from_utf8_lossy(&a.stderr).into_owned())?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn example_digest(skill: &Skill, lib: &SkillRegistry, seed: &SeedFile) -> Result<String, String> {
    let ex = skill.usage_examples.first().ok_or("no example")?;
    let inv = parse_invocation(&ex.invocation).map_err(|e| e.to_string())?;
    let mut s = EnvSession::load(seed).map_err(|e| e.to_string())?;
    let r = s.step(lib, &inv).map_err(|e| e.to_string())?;
    ensure(r.ok, || format!("{}: {}", skill.name, r.message))?;
    Ok(s.state().content_digest())
}

fn c7_translation(cx: &Ctx) -> Outcome {
    let canonical = cx.corpus.canonical_seed();
    let proofs = cx.corpus.equivalences.prove_all(canonical);
    for p in &proofs {
        ensure(p.equal, || format!("entry `{}` differs: {:?}", p.id, p.error))?;
    }
    // The bundled library is exactly the one checked here.
    let bundled = cx.corpus.load_library(None).map_err(|e| e.to_string())?;
    ensure(bundled == cx.learned, || "bundled library is stale".into())?;
    let mut pairs = 0;
    for e in cx.report.skills.iter().filter(|e| e.translated_from.is_some()) {
        let ui = cx.learned.get(e.translated_from.as_deref().unwrap()).ok_or("UI form missing")?;
        let api = cx.learned.get(&e.name).ok_or("API form missing")?;
        let (a, b) = (example_digest(ui, &cx.learned, canonical)?, example_digest(api, &cx.learned, canonical)?);
        ensure(a == b, || format!("`{}` and `{}` diverge", ui.name, api.name))?;
        pairs += 1;
    }
    ensure(pairs > 0, || "no translated skills".into())?;
    Ok(format!("{}/{} entries and {pairs}/{pairs} translated skills agree", proofs.len(), proofs.len()))
}

/// Random tree with `n` nodes; each node red with probability `p`.
fn random_tree(rng: &mut ChaCha8Rng, n: usize, p: f64) -> (ControlNode, Vec<String>) {
    let mut parent = vec![usize::MAX];
    for i in 1..n {
        parent.push(rng.random_range(0..i));
    }
    let red: Vec<bool> = (0..n).map(|_| rng.random_bool(p)).collect();
    fn build(i: usize, parent: &[usize]) -> ControlNode {
        let kids = (0..parent.len()).filter(|&j| parent[j] == i).map(|j| build(j, parent)).collect();
        ControlNode::new(format!("n{i}"), format!("node {i}"), ControlType::Button).with_children(kids)
    }
    let ids = (0..n).filter(|&i| red[i]).map(|i| format!("n{i}")).collect();
    (build(0, &parent), ids)
}

/// Independent oracle: enumerate every descendant explicitly.
fn descendants(n: &ControlNode) -> Vec<&ControlNode> {
    let mut out = vec![n];
    for c in &n.children {
        out.extend(descendants(c));
    }
    out
}

fn cover(ids: &[String]) -> ApiCoverageMap {
    ApiCoverageMap {
        entries: ids
            .iter()
            .map(|i| {
                (
                    i.clone(),
                    ApiBinding {
                        skill: "set_highlight".into(),
                        proof_id: "highlight".into(),
                    },
                )
            })
            .collect(),
    }
}

fn c8_non_essential(cx: &Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for round in 0..1000 {
        let n = rng.random_range(1..=200);
        let p = [0.5, 0.8, 0.95, 1.0][round % 4];
        let (tree, red) = random_tree(&mut rng, n, p);
        let report = analyze_tree(&tree, &cover(&red))?;
        let is_red = |id: &str| red.iter().any(|r| r == id);
        let oracle: BTreeMap<&str, bool> = descendants(&tree)
            .into_iter()
            .map(|x| (x.control_id.as_str(), descendants(x).iter().all(|d| is_red(&d.control_id))))
            .collect();
        for node in &report.nodes {
            ensure(oracle[node.control_id.as_str()] == node.non_essential, || format!("round {round}: node {}", node.control_id))?;
        }
        // A root is a non-essential node whose parent is not.
        let mut roots = Vec::new();
        fn walk<'a>(n: &'a ControlNode, parent_ne: bool, o: &BTreeMap<&str, bool>, out: &mut Vec<&'a str>) {
            let ne = o[n.control_id.as_str()];
            if ne && !parent_ne {
                out.push(&n.control_id);
            }
            for c in &n.children {
                walk(c, ne, o, out);
            }
        }
        walk(&tree, false, &oracle, &mut roots);
        ensure(report.non_essential_roots == roots, || format!("round {round}: roots differ"))?;
    }

    let dir = cx.corpus.trees_dir();
    let tree: ControlNode = serde_json::from_str(&std::fs::read_to_string(dir.join("home_tab.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let derived = ApiCoverageMap::from_equivalences(&tree, &cx.corpus.api_docs(), &cx.learned, cx.corpus.canonical_seed());
    let file = ApiCoverageMap::load(&dir.join("home_tab_coverage.json")).map_err(|e| e.to_string())?;
    for cov in [derived, file] {
        let r = analyze_tree(&tree, &cov)?;
        let flag = |id: &str| r.nodes.iter().find(|n| n.control_id == id).map(|n| n.non_essential);
        ensure(flag("2-2") == Some(true), || "Highlight Color not prunable".into())?;
        ensure(flag("1") == Some(false), || "Home root prunable".into())?;
        ensure(r.non_essential_roots.contains(&"2-2".to_string()), || "2-2 is not a listed root".into())?;
    }
    Ok("1000 random trees match the oracle; fixture: 2-2 prunable, Home not".into())
}

fn c9_bench(cx: &Ctx) -> Outcome {
    let t0 = Instant::now();
    let s = run_bench(
        &cx.corpus.tasks,
        &cx.corpus.seeds,
        &cx.learned,
        &cx.corpus.api_docs(),
        RunOptions::default(),
        || Planner::scripted(0),
    )?;
    let took = t0.elapsed();
    let ui = s.row(Policy::UiOnly).ok_or("no ui_only row")?;
    let api = s.row(Policy::ApiFirst).ok_or("no api_first row")?;
    ensure(cx.corpus.tasks.len() == 20, || format!("{} tasks", cx.corpus.tasks.len()))?;
    ensure(api.mean_steps < ui.mean_steps, || format!("steps {} vs {}", api.mean_steps, ui.mean_steps))?;
    ensure(api.api_usage_rate > ui.api_usage_rate, || format!("API rate {} vs {}", api.api_usage_rate, ui.api_usage_rate))?;
    ensure(api.mean_sim_time < ui.mean_sim_time, || format!("time {} vs {}", api.mean_sim_time, ui.mean_sim_time))?;
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!(
        "steps {:.2} < {:.2}, API rate {:.1}% > {:.1}%, sim time {:.1}s < {:.1}s, {took:.0?}",
        api.mean_steps, ui.mean_steps, api.api_usage_rate, ui.api_usage_rate, api.mean_sim_time, ui.mean_sim_time
    ))
}

fn c10_metric_identity(_: &Ctx) -> Outcome {
    let got = rate(9, 9 + 103);
    let exact = 100.0 * 9.0 / 112.0;
    if (got - 8.1).abs() <= 0.05 {
        Ok(format!("{got}%"))
    } else {
        Err(format!("9/112 = {exact:.3}% rounds to {got}%, not 8.1% +/- 0.05"))
    }
}

fn c11_roundtrip(cx: &Ctx) -> Outcome {
    // Follower library extended by the explorer, so composition edges occur.
    let mut full = cx.learned.clone();
    let seeds: Vec<SeedFile> = ["empty", "canonical", "shapes_doc"].iter().map(|id| cx.corpus.seeds[*id].clone()).collect();
    let budget = ExploreBudget { max_steps: 60, rng_seed: 7 };
    explore(&seeds, &mut Planner::scripted(7), &mut full, budget, &cx.corpus.api_docs());

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    full.save(dir.path()).map_err(|e| e.to_string())?;
    let back = SkillRegistry::load(dir.path()).map_err(|e| e.to_string())?;
    ensure(back == full, || "registry differs after reload".into())?;
    ensure(back.edges() == full.edges(), || "DAG edges differ".into())?;
    for s in full.iter() {
        let b = back.get(&s.name).ok_or("skill lost")?;
        ensure((b.kind, b.hierarchy) == (s.kind, s.hierarchy), || format!("`{}` changed class", s.name))?;
    }
    let edges: usize = back.edges().values().map(|s| s.len()).sum();
    Ok(format!("{} skills, {edges} edges identical", back.len()))
}

fn main() {
    let corpus = Corpus::bundled().expect("bundled corpus loads");
    let (learned, report) = corpus.learn_library(&mut Planner::scripted(0));
    let cx = Ctx { corpus, learned, report };

    let criteria: [(u32, &str, fn(&Ctx) -> Outcome); 11] = [
        (1, "one-call equivalence", c1_fig1),
        (2, "hierarchy fixture", c2_hierarchy),
        (3, "static defect suite", c3_static),
        (4, "dynamic validation", c4_dynamic),
        (5, "follower pipeline", c5_follower),
        (6, "explorer determinism", c6_determinism),
        (7, "translation preserves behaviour", c7_translation),
        (8, "non-essential oracle", c8_non_essential),
        (9, "bench directionality", c9_bench),
        (10, "UI-agent API rate identity", c10_metric_identity),
        (11, "registry round-trip", c11_roundtrip),
    ];
    let mut unexpected = 0;
    for (id, name, check) in criteria {
        match check(&cx) {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(why) => {
                let known = EXPECTED_FAIL.contains(&id);
                println!("criterion {id:>2} FAIL  {name}: {why}{}", if known { " (known unattainable)" } else { "" });
                if !known {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criterion/criteria failed");
        std::process::exit(1);
    }
}
