//! Executed validation: propose a task for a skill, run it in a fresh
//! session, and judge the result by its checker.

use serde::{Deserialize, Serialize};

use crate::env::{EnvSession, SessionSnapshot};
use crate::exec::ExecutionTrace;
use crate::planner::{Observation, Planner, QueryContext, Verdict};
use crate::skill::{parse_invocation, Skill, SkillRegistry};

use super::Checker;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicOutcome {
    pub skill: String,
    pub env_seed: String,
    pub proposed_task: String,
    pub invocation: String,
    pub checker: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<ExecutionTrace>,
    /// Checker-decided verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    /// Verdict returned by the judge role, when it was consulted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judge: Option<Verdict>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub disagreement: bool,
}

impl DynamicOutcome {
    pub fn passed(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.success)
    }

    fn fail(mut self, rationale: impl Into<String>) -> Self {
        self.verdict = Some(Verdict {
            success: false,
            rationale: rationale.into(),
        });
        self
    }
}

/// Validates `skill` starting from `start`. The registry is never
/// modified; an unregistered skill is executed against a private copy.
pub fn validate_dynamic(
    skill: &Skill,
    registry: &SkillRegistry,
    seed_id: &str,
    start: &SessionSnapshot,
    planner: &mut Planner,
) -> DynamicOutcome {
    let out = DynamicOutcome {
        skill: skill.name.clone(),
        env_seed: seed_id.to_string(),
        proposed_task: String::new(),
        invocation: String::new(),
        checker: String::new(),
        trace: None,
        verdict: None,
        judge: None,
        disagreement: false,
    };
    let proposal = match planner.propose_task(QueryContext {
        skill_source: Some(skill.source.clone()),
        ..Default::default()
    }) {
        Ok(p) => p,
        Err(e) => return out.fail(format!("no task: {e}")),
    };
    let mut out = DynamicOutcome {
        proposed_task: proposal.task.clone(),
        invocation: proposal.invocation.clone(),
        checker: proposal.checker.clone(),
        ..out
    };
    let checker = match Checker::parse(&proposal.checker) {
        Ok(c) => c,
        Err(e) => return out.fail(format!("checker: {e}")),
    };
    let invocation = match parse_invocation(&proposal.invocation) {
        Ok(i) if i.target == skill.name => i,
        Ok(i) => return out.fail(format!("task invokes `{}` instead of the skill", i.target)),
        Err(e) => return out.fail(format!("invocation: {e}")),
    };
    let mut session = EnvSession::from_snapshot(seed_id, start).without_xml();
    if checker.eval(session.document(), session.app()) {
        return out.fail("checker already holds before execution");
    }
    let private;
    let lib = if registry.get(&skill.name).is_some_and(|s| s.source == skill.source) {
        registry
    } else {
        let mut r = registry.clone();
        if let Err(e) = r.register_source(&skill.source, skill.provenance) {
            return out.fail(format!("cannot load skill: {e}"));
        }
        private = r;
        &private
    };
    let result = match session.step(lib, &invocation) {
        Ok(r) => r,
        Err(e) => return out.fail(format!("execution: {e}")),
    };
    out.trace = Some(result.trace);
    if !result.ok {
        return out.fail(format!("execution failed: {}", result.message));
    }
    let success = checker.eval(session.document(), session.app());
    let judge = planner
        .judge_completion(QueryContext {
            observation: Some(Observation::from(&session.state())),
            checker: Some(proposal.checker.clone()),
            ..Default::default()
        })
        .ok();
    if let Some(j) = &judge {
        if j.success != success {
            out.disagreement = true;
            planner.note(format!("judge disagrees with checker on `{}`", skill.name));
        }
    }
    out.judge = judge;
    out.verdict = Some(Verdict {
        success,
        rationale: format!(
            "checker `{}` {} after {}",
            proposal.checker,
            if success { "holds" } else { "does not hold" },
            proposal.invocation
        ),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{DocumentModel, SeedFile};
    use crate::skill::builtin::base_library;
    use crate::skill::Provenance;

    fn start() -> SessionSnapshot {
        EnvSession::load(&SeedFile::new("empty", DocumentModel::default()))
            .unwrap()
            .snapshot()
    }

    fn compile(src: &str, lib: &SkillRegistry) -> Skill {
        Skill::compile(src, Provenance::Follower, lib).unwrap()
    }

    #[test]
    fn header_footer_passes() {
        let lib = base_library();
        let s = compile(
            "skill insert_header_footer(header: string, footer: string) \"\"\"Insert a header and footer.\nExample: insert_header_footer(header: \"header\", footer: \"footer\")\nEffect: header == \"header\" && footer == \"footer\"\n\"\"\" {\n call insert_header(text: $header);\n call insert_footer(text: $footer);\n}",
            &lib,
        );
        let before = lib.len();
        let mut p = Planner::scripted(0);
        let o = validate_dynamic(&s, &lib, "empty", &start(), &mut p);
        assert!(o.passed(), "{o:?}");
        assert!(!o.disagreement);
        assert_eq!(lib.len(), before);
    }

    #[test]
    fn tab_click_only_fails() {
        let lib = base_library();
        let s = compile(
            "skill open_insert() \"\"\"Open the Insert tab.\nExample: open_insert()\nEffect: tables.count == 1\"\"\" {\n call click_input(control_name: \"Insert\");\n}",
            &lib,
        );
        let o = validate_dynamic(&s, &lib, "empty", &start(), &mut Planner::scripted(0));
        assert!(!o.passed());
        assert!(o.trace.is_some());
    }

    #[test]
    fn table_skill_passes() {
        let lib = base_library();
        let s = compile(
            "skill add_grid() \"\"\"Add a 2x2 table.\nExample: add_grid()\nEffect: tables.count == 1 && tables[0].rows == 2 && tables[0].cols == 2\"\"\" {\n call tables_add(rows: 2, cols: 2);\n}",
            &lib,
        );
        assert!(validate_dynamic(&s, &lib, "empty", &start(), &mut Planner::scripted(0)).passed());
    }

    #[test]
    fn missing_effect_fails_with_verdict() {
        let lib = base_library();
        let s = compile("skill b() \"\"\"d\nExample: b()\"\"\" {\n call toggle_bold();\n}", &lib);
        let o = validate_dynamic(&s, &lib, "empty", &start(), &mut Planner::scripted(0));
        assert!(o.verdict.is_some() && !o.passed());
    }
}
