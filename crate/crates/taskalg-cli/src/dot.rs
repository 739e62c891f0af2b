//! Graphviz export of the prefix tree. One graph node per tree node; edge
//! labels carry the event renderings; terminal leaves are double-circled,
//! with success and failure told apart by shape rather than color.

use std::fmt::Write as _;

use taskalg::modelcheck::{NodeLabel, PrefixTree};
use taskalg::semantics::Status;

pub fn tree_to_dot(tree: &PrefixTree) -> String {
    let mut out =
        String::from("digraph traces {\n  rankdir=LR;\n  node [shape=circle, label=\"\"];\n");
    for (id, node) in tree.nodes() {
        let attrs = match &node.label {
            NodeLabel::Root => "shape=point".to_string(),
            NodeLabel::Event(_) => "shape=circle".to_string(),
            NodeLabel::Terminal(Status::Failed) => "shape=doubleoctagon, label=\"phi\"".to_string(),
            NodeLabel::Terminal(_) => "shape=doublecircle, label=\"sigma\"".to_string(),
        };
        let _ = writeln!(out, "  n{id} [{attrs}];");
    }
    for (id, node) in tree.nodes() {
        for &child in &node.children {
            match &tree.node(child).label {
                NodeLabel::Event(event) => {
                    let _ = writeln!(
                        out,
                        "  n{id} -> n{child} [label=\"{}\"];",
                        escape(&event.to_string())
                    );
                }
                _ => {
                    let _ = writeln!(out, "  n{id} -> n{child};");
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}
