//! The base library: one atomic skill wrapping each basic and API action.

use super::ast::{Arg, Expr, Param, SkillCode, SkillHeader, Statement};
use super::{print_skill, Provenance, SkillRegistry};
use crate::exec::{ActionRegistry, Value};

/// Example arguments shown in each wrapper's docstring.
fn example_args(action: &str) -> Vec<(&'static str, Value)> {
    let v = |s: &str| Value::from(s);
    match action {
        "click_input" => vec![("control_name", v("Bold"))],
        "set_edit_text" => vec![("control_name", v("Search")), ("text", v("table"))],
        "type_keys" => vec![("text", v("Hello"))],
        "wheel_mouse_input" => vec![("wheel_dist", Value::from(-3)), ("control_name", v("Document"))],
        "select_text" => vec![("text", v("hello"))],
        "select_table" => vec![("number", Value::from(1))],
        "tables_add" => vec![("rows", Value::from(2)), ("cols", Value::from(2))],
        "set_alignment" => vec![("alignment", v("center"))],
        "set_font" => vec![("name", v("Arial"))],
        "set_heading_level" => vec![("level", Value::from(1))],
        "insert_header" => vec![("text", v("header"))],
        "insert_footer" => vec![("text", v("footer"))],
        "set_paper_size" => vec![("size", v("A4"))],
        "set_text_direction" => vec![("direction", v("vertical"))],
        "add_watermark" => vec![("kind", v("draft1"))],
        "insert_shape" => vec![
            ("kind", v("rectangle")),
            ("width", Value::from(1)),
            ("height", Value::from(1)),
            ("color", v("red")),
        ],
        "set_selection_text" => vec![("text", v("new text"))],
        "insert_paragraph" => vec![("text", v("Hello"))],
        "set_highlight" => vec![("color", v("yellow"))],
        _ => vec![],
    }
}

/// DSL sources of the base library, in load order.
pub fn base_sources() -> Vec<String> {
    let actions = ActionRegistry::standard();
    let mut names: Vec<&str> = crate::exec::BASIC_ACTIONS.to_vec();
    names.extend(
        actions
            .iter()
            .map(|s| s.name.as_str())
            .filter(|n| !crate::exec::BASIC_ACTIONS.contains(n)),
    );
    names
        .into_iter()
        .map(|name| {
            let sig = actions.get(name).expect("listed actions exist");
            let params: Vec<Param> = sig
                .required_args
                .iter()
                .map(|a| (a, false))
                .chain(sig.optional_args.iter().map(|a| (a, true)))
                .map(|(a, optional)| Param {
                    key: a.key.clone(),
                    ty: a.ty,
                    optional,
                    description: String::new(),
                })
                .collect();
            let args = params
                .iter()
                .map(|p| Arg {
                    key: p.key.clone(),
                    value: Expr::Param(p.key.clone()),
                })
                .collect();
            let example: Vec<String> = example_args(name)
                .into_iter()
                .map(|(k, v)| format!("{k}: {v}"))
                .collect();
            let header = SkillHeader {
                name: name.to_string(),
                params,
                doc: format!("{}\n\nExample: {name}({})", sig.description, example.join(", ")),
            };
            let code = SkillCode {
                statements: vec![Statement::call(name, args)],
            };
            print_skill(&header, &code)
        })
        .collect()
}

pub fn base_library() -> SkillRegistry {
    let mut reg = SkillRegistry::new();
    for src in base_sources() {
        reg.register_source(&src, Provenance::Builtin)
            .expect("base library is valid");
    }
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skill::SkillKind;

    #[test]
    fn every_action_has_an_atomic_wrapper() {
        let reg = base_library();
        assert_eq!(reg.len(), ActionRegistry::standard().iter().count());
        for s in reg.iter() {
            assert!(s.kind.is_atomic(), "{}", s.name);
            assert_eq!(s.hierarchy, 1);
        }
        assert_eq!(reg.get("click_input").unwrap().kind, SkillKind::AtomicUi);
        assert_eq!(reg.get("tables_add").unwrap().kind, SkillKind::AtomicApi);
    }

    #[test]
    fn examples_invoke_their_own_skill() {
        for s in base_library().iter() {
            let inv = crate::skill::parse_invocation(&s.usage_examples[0].invocation).unwrap();
            assert_eq!(inv.target, s.name);
            s.bind_args(&inv.args).unwrap();
        }
    }
}
