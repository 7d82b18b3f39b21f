//! Static and dynamic validation of a skill source. With no argument it
//! walks the bundled defect files.
//!
//!     cargo run --example validate_skill -- path/to/skill.skill

use std::path::PathBuf;

use axis::corpus::Corpus;
use axis::env::EnvSession;
use axis::exec::ActionRegistry;
use axis::planner::Planner;
use axis::skill::{Provenance, Skill};
use axis::validate::{validate_dynamic, validate_static};

fn main() -> anyhow::Result<()> {
    let corpus = Corpus::bundled()?;
    let lib = corpus.load_library(None)?;
    let files: Vec<PathBuf> = match std::env::args().nth(1) {
        Some(p) => vec![p.into()],
        None => {
            let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/defects");
            let mut v: Vec<_> = std::fs::read_dir(dir)?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            v.retain(|p| p.extension().is_some_and(|e| e == "skill"));
            v.sort();
            v
        }
    };
    let start = EnvSession::load(corpus.canonical_seed())?.snapshot();
    for f in files {
        let src = std::fs::read_to_string(&f)?;
        let findings = validate_static(&src, &lib, ActionRegistry::standard());
        let name = f.file_name().unwrap_or_default().to_string_lossy();
        if !findings.is_empty() {
            for x in findings {
                println!("{name}: {x}");
            }
            continue;
        }
        let skill = Skill::compile(&src, Provenance::Follower, &lib)?;
        let out = validate_dynamic(&skill, &lib, "canonical", &start, &mut Planner::scripted(0));
        println!("{name}: static ok, dynamic {}", if out.passed() { "passed" } else { "failed" });
    }
    Ok(())
}
