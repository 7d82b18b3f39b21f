//! UI-tree pruning analysis: which controls can be replaced by API calls.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{ControlNode, EnvError, SeedFile};
use crate::explore::equivalence::match_text;
use crate::explore::EquivalenceEntry;
use crate::skill::ast::StmtKind;
use crate::skill::{SkillKind, SkillRegistry};

/// The API skill standing in for a control, with the id of the equivalence
/// proof that justifies it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiBinding {
    pub skill: String,
    pub proof_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ApiCoverageMap {
    pub entries: BTreeMap<String, ApiBinding>,
}

impl ApiCoverageMap {
    pub fn load(path: &Path) -> Result<Self, EnvError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| EnvError::Io { path: p.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| EnvError::Json { path: p, source })
    }

    /// Every referenced skill exists and is API-kind.
    pub fn check_skills(&self, registry: &SkillRegistry) -> Result<(), String> {
        for (id, b) in &self.entries {
            match registry.get(&b.skill) {
                None => return Err(format!("control {id}: unknown skill `{}`", b.skill)),
                Some(s) if !s.kind.is_api() => {
                    return Err(format!("control {id}: `{}` is {}, not API", b.skill, s.kind.label()))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Derives coverage for `tree` from proven equivalences. A control is
    /// covered when a mandatory pattern step names it and the entry's
    /// proof holds with the control's name bound into the pattern.
    /// Placeholder steps only match inside the control opened by the
    /// preceding literal step.
    pub fn from_equivalences(
        tree: &ControlNode,
        entries: &[EquivalenceEntry],
        registry: &SkillRegistry,
        seed: &SeedFile,
    ) -> Self {
        let mut out = Self::default();
        for e in entries {
            let Some(skill) = registry.iter().find(|s| {
                s.kind == SkillKind::AtomicApi
                    && matches!(s.code.statements.as_slice(), [st] if st.kind == StmtKind::Call && st.target == e.api_call.action)
            }) else {
                continue;
            };
            if !e.prove(seed).equal {
                continue;
            }
            let mut scope: Option<&ControlNode> = None;
            for step in e.ui_pattern.iter().filter(|s| !s.optional) {
                let Some(tpl) = step.args.get("control_name") else { continue };
                let pool: Vec<&ControlNode> = match (tpl.contains('{'), scope) {
                    (true, Some(parent)) => parent.walk().into_iter().skip(1).collect(),
                    _ => tree.walk(),
                };
                let mut first_literal = None;
                for node in pool {
                    let mut binds = BTreeMap::new();
                    if !match_text(tpl, &node.control_name, &mut binds) {
                        continue;
                    }
                    let proven = if tpl.contains('{') {
                        let mut example = e.example.clone();
                        for (k, v) in binds {
                            if let crate::explore::equivalence::Bound::Text(t) = v {
                                example.insert(k, t);
                            }
                        }
                        e.prove_with(seed, &example).equal
                    } else {
                        first_literal.get_or_insert(node);
                        true
                    };
                    if proven {
                        out.entries.entry(node.control_id.clone()).or_insert(ApiBinding {
                            skill: skill.name.clone(),
                            proof_id: e.id.clone(),
                        });
                    }
                }
                if !tpl.contains('{') {
                    scope = first_literal;
                }
            }
        }
        out
    }
}

/// Copy of `tree` with `api_enabled` set from `coverage`.
pub fn annotate(tree: &ControlNode, coverage: &ApiCoverageMap) -> ControlNode {
    let mut n = tree.clone();
    fn go(n: &mut ControlNode, cov: &ApiCoverageMap) {
        n.api_enabled = cov.entries.contains_key(&n.control_id);
        for c in &mut n.children {
            go(c, cov);
        }
    }
    go(&mut n, coverage);
    n
}

/// True iff the node and every descendant are API-enabled.
pub fn non_essential(node: &ControlNode) -> bool {
    node.api_enabled && node.children.iter().all(non_essential)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeColor {
    Red,
    Blue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeClass {
    pub control_id: String,
    pub control_name: String,
    pub depth: usize,
    pub color: NodeColor,
    pub non_essential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStats {
    pub nodes_total: usize,
    pub prunable: usize,
    pub prunable_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiTreeReport {
    /// Pre-order.
    pub nodes: Vec<NodeClass>,
    /// Maximal non-essential subtree roots, pre-order.
    pub non_essential_roots: Vec<String>,
    pub stats: ReductionStats,
}

impl UiTreeReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let mark = match (&n.color, n.non_essential) {
                (_, true) => "prunable",
                (NodeColor::Red, false) => "red",
                (NodeColor::Blue, false) => "blue",
            };
            out.push_str(&format!("{}{} [{}] {mark}\n", "  ".repeat(n.depth), n.control_name, n.control_id));
        }
        out.push_str(&format!(
            "prunable roots: {}\nnodes: {}, prunable: {} ({:.1}%)\n",
            self.non_essential_roots.join(", "),
            self.stats.nodes_total,
            self.stats.prunable,
            self.stats.prunable_pct
        ));
        out
    }
}

/// Classifies every node and lists the maximal prunable subtrees.
pub fn analyze_tree(tree: &ControlNode, coverage: &ApiCoverageMap) -> Result<UiTreeReport, String> {
    let ids: BTreeSet<&str> = tree.walk().into_iter().map(|n| n.control_id.as_str()).collect();
    if let Some(missing) = coverage.entries.keys().find(|k| !ids.contains(k.as_str())) {
        return Err(format!("coverage names unknown control `{missing}`"));
    }
    let dups = tree.duplicate_ids();
    if !dups.is_empty() {
        return Err(format!("duplicate control ids: {}", dups.join(", ")));
    }
    let tree = annotate(tree, coverage);

    // Post-order pass computing the flag and subtree size once per node.
    fn flags(n: &ControlNode, out: &mut BTreeMap<String, (bool, usize)>) -> (bool, usize) {
        let mut all = n.api_enabled;
        let mut size = 1;
        for c in &n.children {
            let (ne, s) = flags(c, out);
            all &= ne;
            size += s;
        }
        out.insert(n.control_id.clone(), (all, size));
        (all, size)
    }
    let mut info = BTreeMap::new();
    flags(&tree, &mut info);

    let mut nodes = Vec::new();
    let mut roots = Vec::new();
    let mut prunable = 0;
    fn visit(
        n: &ControlNode,
        depth: usize,
        inside: bool,
        info: &BTreeMap<String, (bool, usize)>,
        nodes: &mut Vec<NodeClass>,
        roots: &mut Vec<String>,
        prunable: &mut usize,
    ) {
        let (ne, size) = info[&n.control_id];
        if ne && !inside {
            roots.push(n.control_id.clone());
            *prunable += size;
        }
        nodes.push(NodeClass {
            control_id: n.control_id.clone(),
            control_name: n.control_name.clone(),
            depth,
            color: if n.api_enabled { NodeColor::Red } else { NodeColor::Blue },
            non_essential: ne,
        });
        for c in &n.children {
            visit(c, depth + 1, inside || ne, info, nodes, roots, prunable);
        }
    }
    visit(&tree, 0, false, &info, &mut nodes, &mut roots, &mut prunable);
    let total = nodes.len();
    Ok(UiTreeReport {
        nodes,
        non_essential_roots: roots,
        stats: ReductionStats {
            nodes_total: total,
            prunable,
            prunable_pct: (1000.0 * prunable as f64 / total as f64).round() / 10.0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ControlType;

    fn node(id: &str, red: bool, children: Vec<ControlNode>) -> ControlNode {
        let mut n = ControlNode::new(id, id, ControlType::Button).with_children(children);
        n.api_enabled = red;
        n
    }

    fn cover(ids: &[&str]) -> ApiCoverageMap {
        ApiCoverageMap {
            entries: ids
                .iter()
                .map(|i| {
                    (
                        i.to_string(),
                        ApiBinding {
                            skill: "s".into(),
                            proof_id: "p".into(),
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn red_leaf_is_non_essential() {
        assert!(non_essential(&node("a", true, vec![])));
        assert!(!non_essential(&node("a", false, vec![])));
    }

    #[test]
    fn mixed_root_is_essential() {
        let t = node("1", false, vec![node("2-1", false, vec![]), node("2-2", true, vec![node("3-1", true, vec![])])]);
        let r = analyze_tree(&t, &cover(&["2-2", "3-1"])).unwrap();
        assert_eq!(r.non_essential_roots, ["2-2"]);
        assert_eq!(r.stats.prunable, 2);
        assert_eq!(r.stats.prunable_pct, 50.0);
    }

    #[test]
    fn full_and_empty_coverage() {
        let t = node("r", false, vec![node("a", false, vec![node("b", false, vec![])])]);
        let all = analyze_tree(&t, &cover(&["r", "a", "b"])).unwrap();
        assert_eq!(all.non_essential_roots, ["r"]);
        assert_eq!(all.stats.prunable_pct, 100.0);
        let none = analyze_tree(&t, &ApiCoverageMap::default()).unwrap();
        assert!(none.non_essential_roots.is_empty());
        assert_eq!(none.stats.prunable, 0);
    }

    #[test]
    fn unknown_control_is_an_error() {
        let t = node("r", false, vec![]);
        assert!(analyze_tree(&t, &cover(&["zz"])).is_err());
    }
}
