use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exec::{ActionRegistry, ArgType};
use crate::skill::ast::{Expr, SkillHeader, Statement, StmtKind};
use crate::skill::{parse_skill, parse_syntax, SkillRegistry};

/// Closed set of static rules. `SyntaxError` covers sources that do not
/// parse at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StaticRule {
    SyntaxError,
    MissingMandatoryParams,
    UnknownExecutorCall,
    UnknownSkillImport,
    UndeclaredParamRef,
    ArityMismatch,
    EmptyBody,
    CompositionCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticFinding {
    pub rule: StaticRule,
    /// Index of the offending statement; 0 for skill-level findings.
    pub statement: usize,
    pub message: String,
}

impl fmt::Display for StaticFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at statement {}: {}", self.rule, self.statement, self.message)
    }
}

/// Expected argument shape of a call or use target.
struct TargetSig {
    required: Vec<(String, ArgType)>,
    optional: Vec<(String, ArgType)>,
}

impl TargetSig {
    fn ty(&self, key: &str) -> Option<ArgType> {
        self.required
            .iter()
            .chain(&self.optional)
            .find(|(k, _)| k == key)
            .map(|(_, t)| *t)
    }
}

/// True when `from` reaches `to` through registry `use` edges.
fn reaches(registry: &SkillRegistry, from: &str, to: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = vec![from.to_string()];
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if seen.insert(n.clone()) {
            if let Some(next) = registry.edges().get(&n) {
                stack.extend(next.iter().cloned());
            }
        }
    }
    false
}

fn check_statement(
    idx: usize,
    st: &Statement,
    header: &SkillHeader,
    registry: &SkillRegistry,
    signatures: &ActionRegistry,
    out: &mut Vec<StaticFinding>,
) {
    let mut push = |rule, message: String| {
        out.push(StaticFinding {
            rule,
            statement: idx,
            message,
        })
    };
    for p in st.param_refs() {
        if header.param(p).is_none() {
            push(StaticRule::UndeclaredParamRef, format!("`${p}` is not a declared parameter"));
        }
    }
    let sig = match st.kind {
        StmtKind::Call => match signatures.get(&st.target) {
            Some(s) => TargetSig {
                required: s.required_args.iter().map(|a| (a.key.clone(), a.ty)).collect(),
                optional: s.optional_args.iter().map(|a| (a.key.clone(), a.ty)).collect(),
            },
            None => {
                push(StaticRule::UnknownExecutorCall, format!("`{}` is not an executor action", st.target));
                return;
            }
        },
        StmtKind::Use => {
            if st.target == header.name || reaches(registry, &st.target, &header.name) {
                push(StaticRule::CompositionCycle, format!("`use {}` makes `{}` depend on itself", st.target, header.name));
                return;
            }
            match registry.get(&st.target) {
                Some(s) => TargetSig {
                    required: s.params.iter().filter(|p| !p.optional).map(|p| (p.key.clone(), p.ty)).collect(),
                    optional: s.params.iter().filter(|p| p.optional).map(|p| (p.key.clone(), p.ty)).collect(),
                },
                None => {
                    push(StaticRule::UnknownSkillImport, format!("skill `{}` does not exist", st.target));
                    return;
                }
            }
        }
    };
    let Some(args) = &st.args else {
        push(
            StaticRule::MissingMandatoryParams,
            format!("`{} {}` has no argument list", st.kind.keyword(), st.target),
        );
        return;
    };
    let mut missing = Vec::new();
    for (key, _) in &sig.required {
        match st.arg(key) {
            None => missing.push(key.clone()),
            Some(Expr::Param(p)) if header.param(p).is_some_and(|d| d.optional) => {
                missing.push(format!("{key} (fed by optional ${p})"))
            }
            _ => {}
        }
    }
    if !missing.is_empty() {
        push(
            StaticRule::MissingMandatoryParams,
            format!("`{}` is missing required argument(s) {}", st.target, missing.join(", ")),
        );
    }
    let mut keys = BTreeSet::new();
    for a in args {
        let expected = sig.ty(&a.key);
        let actual = match &a.value {
            Expr::Lit(v) => Some(v.arg_type()),
            Expr::Param(p) => header.param(p).map(|d| d.ty),
        };
        let problem = if !keys.insert(a.key.as_str()) {
            Some(format!("argument `{}` given twice", a.key))
        } else {
            match (expected, actual) {
                (None, _) => Some(format!("`{}` takes no argument `{}`", st.target, a.key)),
                (Some(e), Some(t)) if e != t => {
                    Some(format!("argument `{}` of `{}` expects {e}, got {t}", a.key, st.target))
                }
                _ => None,
            }
        };
        if let Some(m) = problem {
            push(StaticRule::ArityMismatch, m);
        }
    }
}

/// Runs every rule over `source`. Empty result means the skill passes.
pub fn validate_static(
    source: &str,
    registry: &SkillRegistry,
    signatures: &ActionRegistry,
) -> Vec<StaticFinding> {
    let parsed = match parse_syntax(source) {
        Ok(p) => p,
        Err(diags) => {
            return vec![StaticFinding {
                rule: StaticRule::SyntaxError,
                statement: 0,
                message: diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
            }]
        }
    };
    let mut out = Vec::new();
    if let Err(diags) = parse_skill(source) {
        // Undeclared refs and repeated arguments are reported per statement
        // below; a repeated parameter name is structural.
        for d in diags.iter().filter(|d| d.message.starts_with("duplicate parameter")) {
            out.push(StaticFinding {
                rule: StaticRule::SyntaxError,
                statement: 0,
                message: d.to_string(),
            });
        }
    }
    if parsed.code.statements.is_empty() {
        out.push(StaticFinding {
            rule: StaticRule::EmptyBody,
            statement: 0,
            message: "skill body has no statements".into(),
        });
    }
    for (i, st) in parsed.code.statements.iter().enumerate() {
        check_statement(i, st, &parsed.header, registry, signatures, &mut out);
    }
    out.sort_by_key(|f| (f.statement, f.rule));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skill::builtin::base_library;

    fn findings(src: &str) -> Vec<StaticRule> {
        validate_static(src, &base_library(), ActionRegistry::standard())
            .into_iter()
            .map(|f| f.rule)
            .collect()
    }

    const DOC: &str = "\"\"\"d\nExample: s()\"\"\"";

    #[test]
    fn clean_align_text() {
        let src = format!("skill s(text: string, alignment: string) {DOC} {{ call select_text(text: $text); call set_alignment(alignment: $alignment); }}");
        assert!(findings(&src).is_empty());
    }

    #[test]
    fn ghost_import() {
        let src = format!("skill s() {DOC} {{ use ghost_skill(x: 1); }}");
        assert_eq!(findings(&src), vec![StaticRule::UnknownSkillImport]);
    }

    #[test]
    fn missing_args_block() {
        let src = format!("skill s() {DOC} {{ call toggle_bold; }}");
        assert_eq!(findings(&src), vec![StaticRule::MissingMandatoryParams]);
    }

    #[test]
    fn duplicate_argument_is_arity() {
        let src = format!("skill s() {DOC} {{ call insert_header(text: \"a\", text: \"b\"); }}");
        assert_eq!(findings(&src), vec![StaticRule::ArityMismatch]);
    }

    #[test]
    fn optional_param_cannot_feed_required_arg() {
        let src = format!("skill s(t?: string) {DOC} {{ call insert_header(text: $t); }}");
        assert_eq!(findings(&src), vec![StaticRule::MissingMandatoryParams]);
    }

    #[test]
    fn findings_are_ordered() {
        let src = format!("skill s() {DOC} {{ call nope(); call insert_header(text: $x, y: 1); }}");
        let f = validate_static(&src, &base_library(), ActionRegistry::standard());
        let keys: Vec<_> = f.iter().map(|f| (f.statement, f.rule)).collect();
        assert_eq!(
            keys,
            vec![
                (0, StaticRule::UnknownExecutorCall),
                (1, StaticRule::UndeclaredParamRef),
                (1, StaticRule::ArityMismatch),
            ]
        );
    }

    #[test]
    fn unparseable_source() {
        assert_eq!(findings("skill ("), vec![StaticRule::SyntaxError]);
    }
}
