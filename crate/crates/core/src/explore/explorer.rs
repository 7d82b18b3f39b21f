//! Autonomous breadth-first exploration of the ribbon.

use std::collections::BTreeSet;

use crate::env::{ControlNode, ControlType, DocumentModel, EnvSession, Selection, SeedFile};
use crate::planner::{Candidate, CoverageKey, ExploreTarget, ExplorerContext, Planner, QueryContext};
use crate::skill::SkillRegistry;

use super::breakpoints::{place_breakpoints, Recorder, StepOutcome};
use super::equivalence::EquivalenceEntry;
use super::pipeline::Pipeline;
use super::report::{CoverageEntry, ExplorationReport};
use super::trajectory::Origin;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreBudget {
    /// Instructions proposed per seed.
    pub max_steps: usize,
    pub rng_seed: u64,
}

/// Values drawn for editable controls.
fn value_pool(name: &str) -> &'static [&'static str] {
    match name {
        "Font Name" => &["Arial", "Times New Roman", "Courier New", "Verdana"],
        "Font Size" => &["10", "12", "14", "16", "18"],
        "Shape Width" | "Shape Height" => &["1", "1.5", "2", "2.5"],
        "Header Edit" => &["Draft", "Company Report", "Page header"],
        "Footer Edit" => &["Page 1", "Confidential", "Footer note"],
        "Search" => &["table", "watermark", "header", "font"],
        "Document" => &["Hello world", "Meeting notes", "Summary"],
        _ => &["text"],
    }
}

/// Content part of the exploration mode.
pub fn content_mode(doc: &DocumentModel) -> String {
    let sel = match doc.selection {
        Selection::None => "none",
        Selection::Text { .. } => "text",
        Selection::Table { .. } => "table",
    };
    if doc.shapes.is_empty() {
        format!("sel={sel}")
    } else {
        format!("sel={sel},shapes")
    }
}

/// Reachable targets of a refreshed UI tree plus selection probes. A node
/// is reachable when it and all its ancestors are enabled.
pub fn targets(root: &ControlNode, doc: &DocumentModel) -> Vec<ExploreTarget> {
    struct Walk<'a> {
        order: usize,
        out: Vec<ExploreTarget>,
        path: Vec<&'a ControlNode>,
    }
    fn visit<'a>(n: &'a ControlNode, depth: usize, w: &mut Walk<'a>) {
        let order = w.order;
        w.order += 1;
        if !n.enabled {
            return;
        }
        if depth > 0 {
            let tab = w
                .path
                .iter()
                .find(|a| a.control_type == ControlType::TabItem)
                .map(|a| a.control_name.clone());
            let menus: Vec<&ControlNode> = w
                .path
                .iter()
                .filter(|a| !matches!(a.control_type, ControlType::TabItem | ControlType::Window))
                .copied()
                .collect();
            let mut reveal: Vec<String> = tab.iter().map(|t| format!("click {t} tab")).collect();
            reveal.extend(menus.iter().map(|m| format!("click {}", m.control_name)));
            let name = &n.control_name;
            let (action, values) = match n.control_type {
                ControlType::TabItem => (format!("click {name} tab"), Vec::new()),
                ControlType::Document => (format!("type '{{value}}' into {name}"), value_pool(name).to_vec()),
                t if t.is_editable() => (format!("set {name} to '{{value}}'"), value_pool(name).to_vec()),
                _ => (format!("click {name}"), Vec::new()),
            };
            w.out.push(ExploreTarget {
                control_id: n.control_id.clone(),
                control_name: name.clone(),
                depth,
                order,
                reveal,
                action,
                values: values.into_iter().map(str::to_string).collect(),
                tab,
                menu: menus.last().map(|m| m.control_id.clone()),
            });
        }
        w.path.push(n);
        for c in &n.children {
            visit(c, depth + 1, w);
        }
        w.path.pop();
    }
    let mut w = Walk {
        order: 0,
        out: Vec::new(),
        path: Vec::new(),
    };
    visit(root, 0, &mut w);

    let probe = |id: String, name: String, action: String, order: usize| ExploreTarget {
        control_id: id,
        control_name: name,
        depth: 1,
        order,
        reveal: Vec::new(),
        action,
        values: Vec::new(),
        tab: None,
        menu: None,
    };
    let mut order = 10_000;
    for n in 1..=doc.tables.len() {
        w.out.push(probe(
            format!("probe:table:{n}"),
            format!("table {n}"),
            format!("select table {n}"),
            order,
        ));
        order += 1;
    }
    let mut seen = BTreeSet::new();
    for p in &doc.paragraphs {
        let Some(word) = p.text.split_whitespace().next() else {
            continue;
        };
        if word.contains('\'') || !seen.insert(word.to_string()) {
            continue;
        }
        w.out.push(probe(
            format!("probe:text:{word}"),
            format!("text {word}"),
            format!("select text '{word}'"),
            order,
        ));
        order += 1;
    }
    w.out
}

/// Explores every seed in turn. Coverage is shared across seeds so a
/// control already exercised in a content mode is not revisited; each
/// proposed instruction counts as one step of the per-seed budget.
pub fn explore(
    seeds: &[SeedFile],
    planner: &mut Planner,
    registry: &mut SkillRegistry,
    budget: ExploreBudget,
    api_docs: &[EquivalenceEntry],
) -> ExplorationReport {
    let calls_before = planner.meter().calls;
    let mut report = ExplorationReport::new(Origin::Explorer);
    let mut covered: BTreeSet<CoverageKey> = BTreeSet::new();
    for seed in seeds {
        report.sources.push(seed.id.clone());
        let mut recorder = match Recorder::new(seed, Origin::Explorer) {
            Ok(r) => r,
            Err(e) => {
                report.incomplete.push(seed.id.clone());
                report.log.push(format!("{}: cannot load seed: {e}", seed.id));
                continue;
            }
        };
        let mut aborted = false;
        for step in 0..budget.max_steps {
            let session: &EnvSession = recorder.session();
            let state = session.state();
            let mode = content_mode(session.document());
            let available = targets(session.ui().root(), session.document());
            let ctx = QueryContext {
                env_digest: state.digest(),
                observation: Some((&state).into()),
                explorer: Some(ExplorerContext {
                    rng_seed: budget.rng_seed,
                    step,
                    max_steps: budget.max_steps,
                    content_mode: mode.clone(),
                    targets: available.clone(),
                    coverage: covered.iter().cloned().collect(),
                }),
                ..Default::default()
            };
            let (steps, target) = match planner.propose_instruction(ctx) {
                Ok(Some(p)) => p,
                Ok(None) => break,
                Err(e) => {
                    report.log.push(format!("{}: planner aborted: {e}", seed.id));
                    aborted = true;
                    break;
                }
            };
            let target = target.and_then(|id| available.iter().find(|t| t.control_id == id));
            if let Some(t) = target {
                let key = t.coverage_key(&mode);
                if !covered.insert(key.clone()) {
                    report.log.push(format!("{}: `{}` already covered in {}", seed.id, t.control_id, key.mode));
                    continue;
                }
                report.coverage.push(CoverageEntry {
                    seed_id: seed.id.clone(),
                    control_id: t.control_id.clone(),
                    control_name: t.control_name.clone(),
                    mode: key.mode,
                });
            }
            report.instructions += 1;
            let candidates = Candidate::basic();
            for s in &steps {
                match recorder.run_step(planner, step, s, &candidates) {
                    StepOutcome::Done { .. } => {}
                    StepOutcome::Failed { message } => {
                        report.log.push(format!("{}: `{s}` failed: {message}", seed.id));
                        break;
                    }
                    StepOutcome::Aborted(e) => {
                        report.log.push(format!("{}: `{s}` aborted: {e}", seed.id));
                        recorder.abandon(step);
                        break;
                    }
                }
            }
        }
        if aborted {
            report.incomplete.push(seed.id.clone());
        }
        let recording = recorder.into_recording();
        report.actions += recording.trajectory.records.len();
        let segments = place_breakpoints(&recording);
        let mut pipeline = Pipeline {
            planner: &mut *planner,
            registry: &mut *registry,
            api_docs,
        };
        for seg in &segments {
            pipeline.process(&recording, seg, None, &seed.id, &mut report);
        }
    }
    report.planner_calls = planner.meter().calls - calls_before;
    report.recount();
    report
}

#[cfg(test)]
mod tests {
    use std::collections::VecDeque;

    use super::*;
    use crate::env::document::Paragraph;
    use crate::env::UiModel;

    fn bfs_ids(root: &ControlNode) -> Vec<String> {
        let mut q: VecDeque<&ControlNode> = root.children.iter().filter(|c| c.enabled).collect();
        let mut out = Vec::new();
        while let Some(n) = q.pop_front() {
            out.push(n.control_id.clone());
            q.extend(n.children.iter().filter(|c| c.enabled));
        }
        out
    }

    #[test]
    fn explorer_visits_in_breadth_first_order() {
        let seed = SeedFile::new("empty", DocumentModel::default());
        let session = EnvSession::load(&seed).unwrap();
        let all = targets(session.ui().root(), session.document());
        let mut covered = Vec::new();
        let mut seen = Vec::new();
        let mut p = Planner::scripted(0);
        for step in 0..all.len() + 1 {
            let state = session.state();
            let ctx = QueryContext {
                env_digest: state.digest(),
                observation: Some((&state).into()),
                explorer: Some(ExplorerContext {
                    rng_seed: 0,
                    step,
                    max_steps: usize::MAX,
                    content_mode: "sel=none".into(),
                    targets: all.clone(),
                    coverage: covered.clone(),
                }),
                ..Default::default()
            };
            let Some((_, Some(id))) = p.propose_instruction(ctx).unwrap() else {
                break;
            };
            let t = all.iter().find(|t| t.control_id == id).unwrap();
            covered.push(t.coverage_key("sel=none"));
            seen.push(id);
        }
        assert_eq!(seen, bfs_ids(session.ui().root()));
    }

    #[test]
    fn disabled_controls_are_not_targets() {
        let s = EnvSession::load(&SeedFile::new("empty", DocumentModel::default())).unwrap();
        let names: Vec<String> = targets(s.ui().root(), s.document()).into_iter().map(|t| t.control_name).collect();
        assert!(!names.iter().any(|n| n == "Shape Width"));
        assert!(names.iter().any(|n| n == "Header Edit"));
    }

    #[test]
    fn probes_follow_content() {
        let mut doc = DocumentModel::default();
        doc.paragraphs.push(Paragraph::new("Hello there"));
        doc.paragraphs.push(Paragraph::new("Hello again"));
        let ui = UiModel::standard();
        let probes: Vec<String> = targets(ui.root(), &doc)
            .into_iter()
            .filter(|t| t.control_id.starts_with("probe:"))
            .map(|t| t.action)
            .collect();
        assert_eq!(probes, ["select text 'Hello'"]);
        assert_eq!(content_mode(&doc), "sel=none");
    }

    #[test]
    fn zero_budget_explores_nothing() {
        let seed = SeedFile::new("empty", DocumentModel::default());
        let mut reg = crate::skill::builtin::base_library();
        let before = reg.len();
        let r = explore(
            &[seed],
            &mut Planner::scripted(0),
            &mut reg,
            ExploreBudget {
                max_steps: 0,
                rng_seed: 1,
            },
            &[],
        );
        assert!(r.skills.is_empty() && r.coverage.is_empty());
        assert_eq!(reg.len(), before);
    }

    #[test]
    fn short_run_yields_validated_skills() {
        let seed = SeedFile::new("empty", DocumentModel::default());
        let mut reg = crate::skill::builtin::base_library();
        let r = explore(
            &[seed],
            &mut Planner::scripted(0),
            &mut reg,
            ExploreBudget {
                max_steps: 40,
                rng_seed: 7,
            },
            &[],
        );
        assert!(!r.skills.is_empty(), "{}", r.to_text());
        for s in &r.skills {
            assert!(s.validation.passed);
            assert!(reg.contains(&s.name));
        }
        let keys: BTreeSet<_> = r.coverage.iter().map(|c| (&c.control_id, &c.mode)).collect();
        assert_eq!(keys.len(), r.coverage.len());
    }
}
