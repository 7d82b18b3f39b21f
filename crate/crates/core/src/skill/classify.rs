//! Kind classification, hierarchy and flattening over the composition DAG.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::{Arg, Expr, SkillCode, Statement, StmtKind};
use super::{SkillError, SkillKind, SkillRegistry};
use crate::exec::{ActionKind, ActionRegistry};

/// Walks `use` edges, rejecting unknown targets and cycles. `self_name` is
/// the skill being classified, which may not be registered yet.
fn visit<'r>(
    code: &'r SkillCode,
    self_name: Option<&str>,
    registry: &'r SkillRegistry,
    stack: &mut Vec<String>,
    f: &mut dyn FnMut(&'r Statement) -> Result<(), SkillError>,
) -> Result<(), SkillError> {
    for st in &code.statements {
        match st.kind {
            StmtKind::Call => {
                if ActionRegistry::standard().get(&st.target).is_none() {
                    return Err(SkillError::UnknownTarget(st.target.clone()));
                }
                f(st)?;
            }
            StmtKind::Use => {
                if self_name == Some(st.target.as_str()) || stack.contains(&st.target) {
                    return Err(SkillError::Cycle(st.target.clone()));
                }
                let callee = registry
                    .get(&st.target)
                    .ok_or_else(|| SkillError::UnknownTarget(st.target.clone()))?;
                stack.push(st.target.clone());
                visit(&callee.code, self_name, registry, stack, f)?;
                stack.pop();
            }
        }
    }
    Ok(())
}

/// Action kinds of every transitively reachable leaf.
pub fn leaf_kinds(
    code: &SkillCode,
    self_name: Option<&str>,
    registry: &SkillRegistry,
) -> Result<BTreeSet<ActionKind>, SkillError> {
    let mut kinds = BTreeSet::new();
    let actions = ActionRegistry::standard();
    visit(code, self_name, registry, &mut Vec::new(), &mut |st| {
        kinds.insert(actions.kind_of(&st.target).expect("checked by visit"));
        Ok(())
    })?;
    Ok(kinds)
}

pub fn classify_kind(
    code: &SkillCode,
    self_name: Option<&str>,
    registry: &SkillRegistry,
) -> Result<SkillKind, SkillError> {
    let kinds = leaf_kinds(code, self_name, registry)?;
    let atomic = matches!(code.statements.as_slice(), [st] if st.kind == StmtKind::Call);
    let ui = kinds.contains(&ActionKind::Ui);
    let api = kinds.contains(&ActionKind::Api);
    Ok(match (atomic, ui, api) {
        (_, false, false) => return Err(SkillError::EmptyBody),
        (true, true, _) => SkillKind::AtomicUi,
        (true, false, _) => SkillKind::AtomicApi,
        (false, true, true) => SkillKind::Hybrid,
        (false, true, false) => SkillKind::CompositeUi,
        (false, false, true) => SkillKind::CompositeApi,
    })
}

/// Direct component count; 1 for an atomic skill.
pub fn hierarchy(
    code: &SkillCode,
    self_name: Option<&str>,
    registry: &SkillRegistry,
) -> Result<u32, SkillError> {
    visit(code, self_name, registry, &mut Vec::new(), &mut |_| Ok(()))?;
    if code.statements.is_empty() {
        return Err(SkillError::EmptyBody);
    }
    Ok(code.statements.len() as u32)
}

/// The alternative reading where a `use` contributes the callee's own
/// component count instead of 1.
pub fn nested_hierarchy(code: &SkillCode, registry: &SkillRegistry) -> Result<u32, SkillError> {
    fn go(code: &SkillCode, registry: &SkillRegistry, depth: usize) -> Result<u32, SkillError> {
        if depth > crate::exec::MAX_DEPTH {
            return Err(SkillError::Cycle("depth".into()));
        }
        let mut n = 0;
        for st in &code.statements {
            n += match st.kind {
                StmtKind::Call => 1,
                StmtKind::Use => {
                    let callee = registry
                        .get(&st.target)
                        .ok_or_else(|| SkillError::UnknownTarget(st.target.clone()))?;
                    go(&callee.code, registry, depth + 1)?
                }
            };
        }
        Ok(n)
    }
    go(code, registry, 0)
}

/// Inlines every `use`, substituting callee parameters with the caller's
/// argument expressions. The result contains only `call` statements whose
/// params refer to the outer skill.
pub fn flatten(code: &SkillCode, registry: &SkillRegistry) -> Result<Vec<Statement>, SkillError> {
    fn go(
        code: &SkillCode,
        subst: &BTreeMap<String, Expr>,
        top: bool,
        registry: &SkillRegistry,
        depth: usize,
        out: &mut Vec<Statement>,
    ) -> Result<(), SkillError> {
        if depth > crate::exec::MAX_DEPTH {
            return Err(SkillError::Cycle("depth".into()));
        }
        for st in &code.statements {
            let args: Vec<Arg> = st
                .args
                .iter()
                .flatten()
                .filter_map(|a| match &a.value {
                    Expr::Param(p) if !top => subst.get(p).map(|e| Arg {
                        key: a.key.clone(),
                        value: e.clone(),
                    }),
                    v => Some(Arg {
                        key: a.key.clone(),
                        value: v.clone(),
                    }),
                })
                .collect();
            match st.kind {
                StmtKind::Call => out.push(Statement {
                    args: Some(args),
                    ..st.clone()
                }),
                StmtKind::Use => {
                    let callee = registry
                        .get(&st.target)
                        .ok_or_else(|| SkillError::UnknownTarget(st.target.clone()))?;
                    let inner = args.into_iter().map(|a| (a.key, a.value)).collect();
                    go(&callee.code, &inner, false, registry, depth + 1, out)?;
                }
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(code, &BTreeMap::new(), true, registry, 0, &mut out)?;
    Ok(out)
}
