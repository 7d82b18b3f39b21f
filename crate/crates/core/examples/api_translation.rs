//! Rewrites UI-click skills into API form using the equivalence table,
//! then checks both forms leave the canonical document in the same state.
//!
//!     cargo run --example api_translation

use axis::corpus::Corpus;
use axis::env::EnvSession;
use axis::explore::translate::translate_source;
use axis::planner::Candidate;
use axis::skill::{parse_invocation, Provenance, Skill, SkillRegistry};

fn digest_after(skill: &Skill, lib: &SkillRegistry, corpus: &Corpus) -> anyhow::Result<String> {
    let mut s = EnvSession::load(corpus.canonical_seed())?;
    let r = s.step(lib, &parse_invocation(&skill.usage_examples[0].invocation)?)?;
    anyhow::ensure!(r.ok, "{}: {}", skill.name, r.message);
    Ok(s.state().content_digest())
}

fn main() -> anyhow::Result<()> {
    let corpus = Corpus::bundled()?;
    let lib = corpus.load_library(None)?;
    let docs = corpus.api_docs();
    let candidates: Vec<_> = lib.iter().map(|s| Candidate::from_skill(s, &lib)).collect();

    for ui in lib.iter().filter(|s| s.name.ends_with("_ui")) {
        let t = translate_source(&ui.source, &docs, &candidates).map_err(anyhow::Error::msg)?;
        if !t.changed {
            continue;
        }
        let mut scratch = lib.clone();
        let renamed = axis::explore::translate::rename_source(&t.source, &format!("{}_demo", ui.name))
            .map_err(anyhow::Error::msg)?;
        let api = scratch.register(Skill::compile(&renamed, Provenance::Follower, &lib)?)?.clone();
        let same = digest_after(ui, &scratch, &corpus)? == digest_after(&api, &scratch, &corpus)?;
        println!("{} ({}) -> {} ({}), same result: {same}", ui.name, ui.kind.label(), api.name, api.kind.label());
        println!("{}", api.printed());
    }
    Ok(())
}
