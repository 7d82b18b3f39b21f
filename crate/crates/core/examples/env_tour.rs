//! Drives the simulated word processor by hand: a few UI clicks, then the
//! same edit through one API call, and compares the resulting documents.
//!
//!     cargo run --example env_tour

use axis::corpus::Corpus;
use axis::env::EnvSession;
use axis::skill::{parse_invocation, SkillRegistry};

fn main() -> anyhow::Result<()> {
    let corpus = Corpus::bundled()?;
    let seed = &corpus.seeds["empty"];
    let lib = SkillRegistry::new();

    let mut ui = EnvSession::load(seed)?;
    for step in [
        r#"click_input(control_name: "Insert")"#,
        r#"click_input(control_name: "Table")"#,
        r#"click_input(control_name: "2x2 Table")"#,
    ] {
        let r = ui.step(&lib, &parse_invocation(step)?)?;
        println!("{step:<45} ok={} {}", r.ok, r.message);
    }

    let mut api = EnvSession::load(seed)?;
    let r = api.step(&lib, &parse_invocation("tables_add(rows: 2, cols: 2)")?)?;
    println!("{:<45} ok={} {}", "tables_add(rows: 2, cols: 2)", r.ok, r.message);

    println!("simulated time: ui {:.1}s, api {:.1}s", ui.clock(), api.clock());
    let same = ui.state().content_digest() == api.state().content_digest();
    println!("same document: {same}");

    let visible: Vec<_> = ui.state().controls.iter().take(8).map(|c| c.control_name.clone()).collect();
    println!("first controls on screen: {}", visible.join(", "));
    Ok(())
}
