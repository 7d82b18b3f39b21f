//! Builds the base skill library, prints it, and saves it to a directory.
//!
//!     cargo run --example skill_library -- /tmp/skills

use std::path::PathBuf;

use axis::skill::builtin::base_library;
use axis::skill::SkillRegistry;

fn main() -> anyhow::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("axis-skills"));
    let lib = base_library();
    for s in lib.iter() {
        println!("{:<20} {:<12} h={} params={}", s.name, s.kind.label(), s.hierarchy, s.params.len());
    }
    lib.save(&dir)?;
    let back = SkillRegistry::load(&dir)?;
    assert_eq!(back, lib);
    println!("saved {} skills to {}", lib.len(), dir.display());
    Ok(())
}
