//! The prefix tree of a trace set: traces merged on common prefixes, the
//! branching structure CTL is evaluated on.
//!
//! Every trace contributes a root-to-leaf path: one node per event, then
//! an explicit terminal leaf carrying the status. Making terminals their
//! own nodes keeps the tree well-formed when one trace is a prefix of
//! another, or when two traces share all events but end differently.

use crate::semantics::{Status, Trace, TraceSet};
use crate::state::Env;

pub type NodeId = usize;

/// Children are kept in ascending label order, so terminal leaves come
/// before event children and a depth-first walk reproduces the canonical
/// trace order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeLabel {
    Root,
    Terminal(Status),
    Event(crate::semantics::Event),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: NodeLabel,
    /// Environment at this position: the state after this node's event
    /// (for terminals, the trace's final environment).
    pub env: Env,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTree {
    nodes: Vec<TreeNode>,
}

impl PrefixTree {
    pub const ROOT: NodeId = 0;

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate()
    }

    /// The position-0 nodes: one per distinct first step of a trace.
    pub fn initials(&self) -> &[NodeId] {
        &self.nodes[Self::ROOT].children
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Any node contains an assume step somewhere in the tree.
    pub fn has_assume(&self) -> bool {
        self.nodes.iter().any(|n| {
            matches!(
                n.label,
                NodeLabel::Event(crate::semantics::Event::Assume { .. })
            )
        })
    }

    /// Reads the trace ending at a terminal leaf back off the tree.
    pub fn trace_to(&self, leaf: NodeId) -> Trace {
        let NodeLabel::Terminal(status) = self.nodes[leaf].label else {
            panic!("trace_to called on a non-terminal node");
        };
        let mut events = Vec::new();
        let mut cursor = self.nodes[leaf].parent;
        while let Some(id) = cursor {
            if let NodeLabel::Event(event) = &self.nodes[id].label {
                events.push(event.clone());
            }
            cursor = self.nodes[id].parent;
        }
        events.reverse();
        Trace {
            events,
            status,
            final_env: self.nodes[leaf].env.clone(),
        }
    }

    /// Flattens the tree back into the trace set it was built from.
    pub fn flatten(&self) -> Vec<Trace> {
        let mut traces = Vec::new();
        let mut stack = vec![Self::ROOT];
        // children are sorted ascending; a stack wants them reversed
        while let Some(id) = stack.pop() {
            if matches!(self.nodes[id].label, NodeLabel::Terminal(_)) {
                traces.push(self.trace_to(id));
            }
            for child in self.nodes[id].children.iter().rev() {
                stack.push(*child);
            }
        }
        traces
    }
}

/// Builds the prefix tree of a finalized trace set.
pub fn build_prefix_tree(ts: &TraceSet) -> PrefixTree {
    let mut nodes = vec![TreeNode {
        label: NodeLabel::Root,
        env: Env::new(),
        children: Vec::new(),
        parent: None,
    }];

    for trace in ts.iter() {
        debug_assert_ne!(
            trace.status,
            Status::Completed,
            "tree wants finalized traces"
        );
        let mut cursor = PrefixTree::ROOT;
        let mut env = Env::new();
        for event in &trace.events {
            if let crate::semantics::Event::Task { applied, .. } = event {
                for (target, value) in applied {
                    env = env.bind(target, value.clone());
                }
            }
            let label = NodeLabel::Event(event.clone());
            cursor = child_with_label(&mut nodes, cursor, label, &env);
        }
        let label = NodeLabel::Terminal(trace.status);
        child_with_label(&mut nodes, cursor, label, &env);
    }

    PrefixTree { nodes }
}

fn child_with_label(
    nodes: &mut Vec<TreeNode>,
    parent: NodeId,
    label: NodeLabel,
    env: &Env,
) -> NodeId {
    if let Some(&existing) = nodes[parent]
        .children
        .iter()
        .find(|&&c| nodes[c].label == label)
    {
        return existing;
    }
    let id = nodes.len();
    nodes.push(TreeNode {
        label: label.clone(),
        env: env.clone(),
        children: Vec::new(),
        parent: Some(parent),
    });
    let pos = nodes[parent]
        .children
        .iter()
        .position(|&c| nodes[c].label > label)
        .unwrap_or(nodes[parent].children.len());
    nodes[parent].children.insert(pos, id);
    id
}
