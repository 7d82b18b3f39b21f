//! Replacing runs of statements with `use` of an existing skill whose
//! flattened body unifies with them.

use std::collections::BTreeMap;

use crate::exec::Value;
use crate::planner::Candidate;
use crate::skill::ast::{Arg, Expr, Statement, StmtKind};

/// Unifies a candidate's flattened leaves with `stmts`. Candidate params
/// bind to whole expressions; candidate literals must match literally.
pub fn unify(leaves: &[Statement], stmts: &[Statement]) -> Option<BTreeMap<String, Expr>> {
    if leaves.is_empty() || leaves.len() > stmts.len() {
        return None;
    }
    let mut binds: BTreeMap<String, Expr> = BTreeMap::new();
    for (leaf, st) in leaves.iter().zip(stmts) {
        if st.kind != StmtKind::Call || leaf.target != st.target {
            return None;
        }
        let la = leaf.args.as_deref().unwrap_or(&[]);
        let sa = st.args.as_deref().unwrap_or(&[]);
        if la.len() != sa.len() {
            return None;
        }
        for a in la {
            let ours = st.arg(&a.key)?;
            match &a.value {
                Expr::Lit(v) => {
                    if ours != &Expr::Lit(v.clone()) {
                        return None;
                    }
                }
                Expr::Param(p) => match binds.get(p) {
                    Some(prev) if prev != ours => return None,
                    Some(_) => {}
                    None => {
                        binds.insert(p.clone(), ours.clone());
                    }
                },
            }
        }
    }
    Some(binds)
}

/// `use` statement for a unification result, or `None` when a required
/// parameter stays unbound or a bound literal has the wrong type.
pub fn use_statement(cand: &Candidate, binds: &BTreeMap<String, Expr>) -> Option<Statement> {
    let mut args = Vec::new();
    for p in &cand.params {
        match binds.get(&p.key) {
            Some(Expr::Lit(v)) if v.arg_type() != p.ty => return None,
            Some(e) => args.push(Arg {
                key: p.key.clone(),
                value: e.clone(),
            }),
            None if !p.optional => return None,
            None => {}
        }
    }
    Some(Statement::use_skill(&cand.name, args))
}

/// Literal argument map for invoking a candidate, when every binding is a
/// literal.
pub fn literal_args(cand: &Candidate, binds: &BTreeMap<String, Expr>) -> Option<BTreeMap<String, Value>> {
    let st = use_statement(cand, binds)?;
    st.args
        .unwrap_or_default()
        .into_iter()
        .map(|a| match a.value {
            Expr::Lit(v) => Some((a.key, v)),
            Expr::Param(_) => None,
        })
        .collect()
}

/// Greedily folds runs matching composite candidates (hierarchy >= 2),
/// longest first. `exclude` names a skill that must not fold into itself.
pub fn fold_reuse(stmts: &[Statement], candidates: &[Candidate], exclude: Option<&str>) -> Vec<Statement> {
    let mut pool: Vec<&Candidate> = candidates
        .iter()
        .filter(|c| c.hierarchy >= 2 && !c.leaves.is_empty() && Some(c.name.as_str()) != exclude)
        .collect();
    pool.sort_by(|a, b| b.leaves.len().cmp(&a.leaves.len()).then_with(|| a.name.cmp(&b.name)));
    let mut out = Vec::new();
    let mut i = 0;
    while i < stmts.len() {
        let hit = pool.iter().find_map(|c| {
            let binds = unify(&c.leaves, &stmts[i..])?;
            Some((c.leaves.len(), use_statement(c, &binds)?))
        });
        match hit {
            Some((n, st)) => {
                out.push(st);
                i += n;
            }
            None => {
                out.push(stmts[i].clone());
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skill::ast::Param;
    use crate::exec::ArgType;

    fn call(target: &str, args: &[(&str, Expr)]) -> Statement {
        Statement::call(
            target,
            args.iter()
                .map(|(k, v)| Arg {
                    key: k.to_string(),
                    value: v.clone(),
                })
                .collect(),
        )
    }

    fn p(name: &str) -> Expr {
        Expr::Param(name.into())
    }

    fn hf() -> Candidate {
        Candidate {
            name: "insert_header_footer".into(),
            kind: "CompositeAPI".into(),
            api: true,
            description: String::new(),
            params: ["header", "footer"]
                .iter()
                .map(|k| Param {
                    key: k.to_string(),
                    ty: ArgType::String,
                    optional: false,
                    description: String::new(),
                })
                .collect(),
            hierarchy: 2,
            leaves: vec![
                call("insert_header", &[("text", p("header"))]),
                call("insert_footer", &[("text", p("footer"))]),
            ],
        }
    }

    #[test]
    fn folds_matching_run() {
        let stmts = vec![
            call("select_text", &[("text", p("t"))]),
            call("insert_header", &[("text", p("a"))]),
            call("insert_footer", &[("text", Expr::Lit(Value::from("f")))]),
        ];
        let out = fold_reuse(&stmts, &[hf()], None);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].kind, StmtKind::Use);
        assert_eq!(out[1].arg("footer"), Some(&Expr::Lit(Value::from("f"))));
        assert_eq!(fold_reuse(&stmts, &[hf()], Some("insert_header_footer")).len(), 3);
    }

    #[test]
    fn inconsistent_binding_does_not_fold() {
        let mut c = hf();
        c.leaves[1] = call("insert_footer", &[("text", p("header"))]);
        let stmts = vec![
            call("insert_header", &[("text", p("a"))]),
            call("insert_footer", &[("text", p("b"))]),
        ];
        assert!(unify(&c.leaves, &stmts).is_none());
    }
}
