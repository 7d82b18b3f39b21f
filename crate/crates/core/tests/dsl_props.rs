//! Property tests over the skill language and the static validator.

use proptest::prelude::*;

use axis::exec::{ActionRegistry, ArgType, Value};
use axis::skill::ast::{Arg, Expr, Param, SkillCode, SkillHeader, Statement};
use axis::skill::builtin::base_library;
use axis::skill::{parse_skill, print_skill};
use axis::validate::{validate_static, StaticRule};

const RESERVED: &[&str] = &["skill", "call", "use", "true", "false"];

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,10}".prop_filter("reserved", |s| !RESERVED.contains(&s.as_str()))
}

fn scalar() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<bool>().prop_map(Value::Bool),
        (-4000i32..4000).prop_map(|n| Value::Num(n as f64 / 4.0)),
        "[ -~éü]{0,12}".prop_map(Value::Str),
    ]
}

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        4 => scalar(),
        1 => prop::collection::vec(scalar(), 0..4).prop_map(Value::List),
    ]
}

fn arg_type() -> impl Strategy<Value = ArgType> {
    prop_oneof![
        Just(ArgType::String),
        Just(ArgType::Number),
        Just(ArgType::Boolean),
        Just(ArgType::List)
    ]
}

fn skill() -> impl Strategy<Value = (SkillHeader, SkillCode)> {
    let params = prop::collection::btree_map(ident(), (arg_type(), any::<bool>(), "[a-z ]{0,12}"), 0..4);
    (ident(), params, "[A-Z][a-z ]{0,30}[a-z]\\.").prop_flat_map(|(name, params, doc)| {
        let keys: Vec<String> = params.keys().cloned().collect();
        let expr = if keys.is_empty() {
            value().prop_map(Expr::Lit).boxed()
        } else {
            prop_oneof![value().prop_map(Expr::Lit), prop::sample::select(keys).prop_map(Expr::Param)].boxed()
        };
        let args = prop::collection::btree_map(ident(), expr, 0..4)
            .prop_map(|m| m.into_iter().map(|(key, value)| Arg { key, value }).collect::<Vec<_>>());
        let stmt = (any::<bool>(), ident(), prop::option::weighted(0.9, args)).prop_map(|(use_, target, args)| {
            let mut st = if use_ { Statement::use_skill(&target, vec![]) } else { Statement::call(&target, vec![]) };
            st.args = args;
            st
        });
        let header = SkillHeader {
            name,
            params: params
                .into_iter()
                .map(|(key, (ty, optional, description))| Param {
                    key,
                    ty,
                    optional,
                    description: description.trim().to_string(),
                })
                .collect(),
            doc,
        };
        prop::collection::vec(stmt, 0..6).prop_map(move |statements| (header.clone(), SkillCode { statements }))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity((header, code) in skill()) {
        let src = print_skill(&header, &code);
        let parsed = parse_skill(&src).map_err(|d| TestCaseError::fail(format!("{d:?}\n{src}")))?;
        prop_assert_eq!(&parsed.header, &header);
        prop_assert_eq!(&parsed.code, &code);
        prop_assert_eq!(print_skill(&parsed.header, &parsed.code), src);
    }
}

/// Mutations of valid library skills: deletions, duplications, swaps and
/// dropped runs. The validator must never panic, and every finding must point at a
/// statement the source actually has (0-based; whole-skill rules use 0).
fn mutate(src: &str, ops: &[(u8, usize, usize)]) -> String {
    let mut chars: Vec<char> = src.chars().collect();
    for &(op, a, b) in ops {
        if chars.is_empty() {
            break;
        }
        let (i, j) = (a % chars.len(), b % chars.len());
        match op % 4 {
            0 => {
                chars.remove(i);
            }
            1 => {
                let c = chars[i];
                chars.insert(j, c);
            }
            2 => chars.swap(i, j),
            _ => {
                // drop a short run
                let end = (i + 1 + j % 8).min(chars.len());
                chars.drain(i..end);
            }
        }
    }
    chars.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn static_validation_is_total(pick in any::<prop::sample::Index>(), ops in prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>()), 1..4)) {
        let lib = base_library();
        let skills: Vec<_> = lib.iter().collect();
        let original = &skills[pick.index(skills.len())].source;
        let src = mutate(original, &ops);
        let findings = validate_static(&src, &lib, ActionRegistry::standard());
        if let Ok(p) = parse_skill(&src) {
            for f in &findings {
                prop_assert!(f.statement < p.code.statements.len().max(1), "{:?} out of range", f);
            }
        } else {
            prop_assert!(!findings.is_empty(), "unparseable source passed:\n{}", src);
        }
    }

    /// Renaming a call target to an unknown name is always caught.
    #[test]
    fn unknown_targets_are_flagged(pick in any::<prop::sample::Index>(), suffix in "[a-z]{3,6}") {
        let lib = base_library();
        let skills: Vec<_> = lib.iter().filter(|s| !s.code.statements.is_empty()).collect();
        let s = skills[pick.index(skills.len())];
        let mut code = s.code.clone();
        code.statements[0].target = format!("zz_{suffix}");
        let src = print_skill(&s.header(), &code);
        let findings = validate_static(&src, &lib, ActionRegistry::standard());
        prop_assert!(findings.iter().any(|f| f.statement == 0 && matches!(f.rule, StaticRule::UnknownExecutorCall | StaticRule::UnknownSkillImport)), "{:?}", findings);
    }
}
