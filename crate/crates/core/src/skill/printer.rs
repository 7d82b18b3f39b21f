use std::fmt::Write;

use super::ast::{Arg, Expr, SkillCode, SkillHeader, Statement};

fn param_list(header: &SkillHeader) -> String {
    header
        .params
        .iter()
        .map(|p| {
            let mut s = format!("{}{}: {}", p.key, if p.optional { "?" } else { "" }, p.ty);
            if !p.description.is_empty() {
                s.push(' ');
                s.push_str(&serde_json::Value::String(p.description.clone()).to_string());
            }
            s
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn print_args(args: &[Arg]) -> String {
    args.iter()
        .map(|a| match &a.value {
            Expr::Lit(v) => format!("{}: {v}", a.key),
            Expr::Param(p) => format!("{}: ${p}", a.key),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn print_statement(st: &Statement) -> String {
    match &st.args {
        Some(args) => format!("{} {}({});", st.kind.keyword(), st.target, print_args(args)),
        None => format!("{} {};", st.kind.keyword(), st.target),
    }
}

/// Canonical source form.
pub fn print_skill(header: &SkillHeader, code: &SkillCode) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "skill {}({}) \"\"\"", header.name, param_list(header));
    if !header.doc.is_empty() {
        out.push_str(&header.doc);
        out.push('\n');
    }
    out.push_str("\"\"\" {\n");
    for st in &code.statements {
        let _ = writeln!(out, "    {}", print_statement(st));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_skill;
    use super::*;

    #[test]
    fn reprint_is_stable() {
        let src = "skill a(x?: string \"why \\\"\", n: number)\n\"\"\"\n  Doc.\n\"\"\"{call b(k:$x,v:[1,\"s\",true]);use c;}";
        let p = parse_skill(src).unwrap();
        let printed = print_skill(&p.header, &p.code);
        let q = parse_skill(&printed).unwrap();
        assert_eq!(p, q);
        assert_eq!(printed, print_skill(&q.header, &q.code));
        assert!(printed.contains("call b(k: $x, v: [1, \"s\", true]);"));
    }
}
