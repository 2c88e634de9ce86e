//! Stable rooted trees by leaf insertion on labelled trees, reduced to unlabelled shapes.

use std::collections::BTreeSet;

#[derive(Debug, Clone)]
enum Labelled {
    Leaf,
    Node(Vec<Labelled>),
}

/// Every way of attaching one more leaf: as a new child of a vertex, or on a new vertex
/// subdividing the edge above any subtree.
fn insertions(t: &Labelled) -> Vec<Labelled> {
    let mut out = vec![Labelled::Node(vec![t.clone(), Labelled::Leaf])];
    if let Labelled::Node(children) = t {
        let mut extra = children.clone();
        extra.push(Labelled::Leaf);
        out.push(Labelled::Node(extra));
        for (i, c) in children.iter().enumerate() {
            for replacement in insertions(c) {
                let mut next = children.clone();
                next[i] = replacement;
                out.push(Labelled::Node(next));
            }
        }
    }
    out
}

fn shape(t: &Labelled) -> String {
    match t {
        Labelled::Leaf => "x".into(),
        Labelled::Node(children) => {
            let mut parts: Vec<String> = children.iter().map(shape).collect();
            parts.sort();
            format!("({})", parts.concat())
        }
    }
}

/// (labelled count, unlabelled count) of stable rooted trees with `n` leaves.
pub fn counts(n: usize) -> (usize, usize) {
    assert!(n >= 2);
    let mut level = vec![Labelled::Node(vec![Labelled::Leaf, Labelled::Leaf])];
    for _ in 2..n {
        level = level.iter().flat_map(insertions).collect();
    }
    let shapes: BTreeSet<String> = level.iter().map(shape).collect();
    (level.len(), shapes.len())
}
