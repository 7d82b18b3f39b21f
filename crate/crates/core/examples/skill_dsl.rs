//! Parses a hand-written skill, prints its canonical form, classifies it
//! against the base library and runs its usage example.
//!
//!     cargo run --example skill_dsl

use axis::corpus::Corpus;
use axis::env::EnvSession;
use axis::skill::builtin::base_library;
use axis::skill::{parse_invocation, Provenance, Skill};

const SOURCE: &str = r#"
skill shout(text: string "what to write") """
Write a bold, centered line.
Example: shout(text: "Hello")
Effect: paragraphs.count == 1
""" {
    call type_keys(text: $text);
    use toggle_bold();
    call set_alignment(alignment: "center");
}
"#;

fn main() -> anyhow::Result<()> {
    let mut lib = base_library();
    let skill = Skill::compile(SOURCE, Provenance::Follower, &lib)?;
    println!("{}", skill.printed());
    println!("kind {} hierarchy {}", skill.kind.label(), skill.hierarchy);
    lib.register(skill.clone())?;

    let corpus = Corpus::bundled()?;
    let mut s = EnvSession::load(&corpus.seeds["empty"])?;
    let r = s.step(&lib, &parse_invocation(&skill.usage_examples[0].invocation)?)?;
    println!("ok={} ui={} api={}", r.ok, r.trace.ui_actions, r.trace.api_actions);
    for e in r.trace.entries {
        println!("{}{} {}", "  ".repeat(e.depth), e.target, e.message);
    }
    Ok(())
}
