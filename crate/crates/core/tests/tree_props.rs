//! Properties of the non-essential classification on arbitrary trees.

use proptest::prelude::*;

use axis::bench::{analyze_tree, annotate, non_essential, ApiBinding, ApiCoverageMap};
use axis::env::{ControlNode, ControlType};

/// Tree plus the ids covered by some API.
fn tree() -> impl Strategy<Value = (ControlNode, Vec<String>)> {
    let leaf = any::<bool>().prop_map(|red| Shape(vec![], red));
    let shape = leaf.prop_recursive(5, 120, 6, |inner| {
        (prop::collection::vec(inner, 0..6), any::<bool>()).prop_map(|(kids, red)| Shape(kids, red))
    });
    (shape, 0.0f64..1.0).prop_map(|(shape, bias)| {
        let mut covered = Vec::new();
        let mut next = 0;
        let root = build(&shape, &mut next, &mut covered, bias);
        (root, covered)
    })
}

#[derive(Debug, Clone)]
struct Shape(Vec<Shape>, bool);

// `bias` pushes most nodes red so large prunable subtrees actually occur.
fn build(shape: &Shape, next: &mut usize, covered: &mut Vec<String>, bias: f64) -> ControlNode {
    let id = format!("n{next}");
    *next += 1;
    let Shape(kids, red) = shape;
    let hash = (*next as f64 * 0.618_033_988_75).fract();
    if *red || hash < bias {
        covered.push(id.clone());
    }
    let children = kids.iter().map(|k| build(k, next, covered, bias)).collect();
    ControlNode::new(id.clone(), id, ControlType::Button).with_children(children)
}

fn coverage(ids: &[String]) -> ApiCoverageMap {
    ApiCoverageMap {
        entries: ids
            .iter()
            .map(|i| {
                let b = ApiBinding {
                    skill: "toggle_bold".into(),
                    proof_id: "bold".into(),
                };
                (i.clone(), b)
            })
            .collect(),
    }
}

fn find<'a>(n: &'a ControlNode, id: &str) -> Option<&'a ControlNode> {
    if n.control_id == id {
        return Some(n);
    }
    n.children.iter().find_map(|c| find(c, id))
}

fn collect_ids(n: &ControlNode, out: &mut Vec<String>) {
    out.push(n.control_id.clone());
    n.children.iter().for_each(|c| collect_ids(c, out));
}

fn parent_of<'a>(n: &'a ControlNode, id: &str) -> Option<&'a ControlNode> {
    if n.children.iter().any(|c| c.control_id == id) {
        return Some(n);
    }
    n.children.iter().find_map(|c| parent_of(c, id))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn flags_are_closed_downward((root, covered) in tree()) {
        let report = analyze_tree(&root, &coverage(&covered)).unwrap();
        let annotated = annotate(&root, &coverage(&covered));
        for n in &report.nodes {
            let node = find(&annotated, &n.control_id).unwrap();
            prop_assert_eq!(non_essential(node), n.non_essential);
            if n.non_essential {
                prop_assert!(covered.contains(&n.control_id));
                prop_assert!(node.children.iter().all(non_essential));
            }
        }
    }

    #[test]
    fn roots_are_maximal((root, covered) in tree()) {
        let report = analyze_tree(&root, &coverage(&covered)).unwrap();
        let flag = |id: &str| report.nodes.iter().find(|n| n.control_id == id).unwrap().non_essential;
        for r in &report.non_essential_roots {
            prop_assert!(flag(r));
            if let Some(p) = parent_of(&root, r) {
                prop_assert!(!flag(&p.control_id));
            }
        }
        // Every flagged node lies under exactly one listed root.
        let under: usize = report
            .non_essential_roots
            .iter()
            .map(|r| report.nodes.iter().filter(|n| n.non_essential).filter(|n| find(find(&root, r).unwrap(), &n.control_id).is_some()).count())
            .sum();
        prop_assert_eq!(under, report.stats.prunable);
    }

    #[test]
    fn more_coverage_never_prunes_less((root, covered) in tree(), extra in prop::collection::vec(any::<prop::sample::Index>(), 0..10)) {
        let mut ids = Vec::new();
        collect_ids(&root, &mut ids);
        let mut wider = covered.clone();
        wider.extend(extra.iter().map(|i| ids[i.index(ids.len())].clone()));
        wider.sort();
        wider.dedup();
        let a = analyze_tree(&root, &coverage(&covered)).unwrap();
        let b = analyze_tree(&root, &coverage(&wider)).unwrap();
        prop_assert!(b.stats.prunable >= a.stats.prunable);
    }

    #[test]
    fn unknown_coverage_ids_are_rejected((root, covered) in tree()) {
        let mut bad = covered;
        bad.push("not_a_control".into());
        prop_assert!(analyze_tree(&root, &coverage(&bad)).is_err());
    }
}
