//! Colours a UI tree by API coverage and lists the subtrees an API-first
//! agent never needs to see.
//!
//!     cargo run --example ui_tree_pruning

use axis::bench::{analyze_tree, ApiCoverageMap};
use axis::corpus::Corpus;
use axis::env::ControlNode;

fn main() -> anyhow::Result<()> {
    let corpus = Corpus::bundled()?;
    let dir = corpus.trees_dir();
    let tree: ControlNode = serde_json::from_str(&std::fs::read_to_string(dir.join("home_tab.json"))?)?;
    let lib = corpus.load_library(None)?;

    // Coverage proved from the equivalence table, then the hand-written map.
    let derived = ApiCoverageMap::from_equivalences(&tree, &corpus.api_docs(), &lib, corpus.canonical_seed());
    let filed = ApiCoverageMap::load(&dir.join("home_tab_coverage.json"))?;
    for (label, cov) in [("derived", derived), ("file", filed)] {
        let report = analyze_tree(&tree, &cov).map_err(anyhow::Error::msg)?;
        println!("== {label} coverage");
        print!("{}", report.to_text());
    }
    Ok(())
}
