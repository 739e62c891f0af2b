//! CTL over the prefix tree, by bottom-up labeling. Path quantifiers range
//! over maximal root-to-leaf paths; on the finite tree `EX` is false at
//! leaves and `AX` vacuously true.
//!
//! A formula with an existential top operator holds when some initial
//! node satisfies it; any other formula must hold at every initial node.
//! This pairing makes `EF p` agree with "some trace eventually satisfies
//! p" while `AG p` agrees with the universal LTL reading.

use super::tree::{NodeId, NodeLabel, PrefixTree};
use super::{eval_ap, AtomicProp, Position, Verdict};
use crate::semantics::{Trace, TraceSet};
use crate::state::EvalError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CtlFormula {
    Atom(AtomicProp),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Box<CtlFormula>, Box<CtlFormula>),
    Ex(Box<CtlFormula>),
    Ax(Box<CtlFormula>),
    Ef(Box<CtlFormula>),
    Af(Box<CtlFormula>),
    Eg(Box<CtlFormula>),
    Ag(Box<CtlFormula>),
    Eu(Box<CtlFormula>, Box<CtlFormula>),
    Au(Box<CtlFormula>, Box<CtlFormula>),
}

impl CtlFormula {
    fn top_is_existential(&self) -> bool {
        matches!(
            self,
            CtlFormula::Ex(_) | CtlFormula::Ef(_) | CtlFormula::Eg(_) | CtlFormula::Eu(_, _)
        )
    }
}

/// Checks the formula against the tree. The verdict carries a witness
/// path for a holding existential claim and a counterexample path for a
/// failing universal claim, both validated against the formula.
pub fn check_ctl(tree: &PrefixTree, formula: &CtlFormula) -> Result<Verdict, EvalError> {
    let mut state_unknown = false;
    let labels = label(tree, formula, &mut state_unknown)?;
    let existential = formula.top_is_existential();
    let initials = tree.initials();

    let holds = if existential {
        initials.iter().any(|&i| labels[i])
    } else {
        initials.iter().all(|&i| labels[i])
    };

    let evidence = if holds && existential {
        initials
            .iter()
            .find(|&&i| labels[i])
            .and_then(|&i| find_path(tree, i, formula, true))
    } else if !holds && !existential {
        initials
            .iter()
            .find(|&&i| !labels[i])
            .and_then(|&i| find_path(tree, i, formula, false))
    } else {
        None
    };

    let assumption_dependent = state_unknown
        || match &evidence {
            Some(trace) => trace.has_assume(),
            None => tree.has_assume(),
        };
    Ok(Verdict {
        holds,
        evidence,
        assumption_dependent,
    })
}

/// Labels every tree node with whether the formula holds there. Children
/// always carry larger ids than their parent, so one reverse sweep
/// suffices for the path operators.
fn label(
    tree: &PrefixTree,
    formula: &CtlFormula,
    state_unknown: &mut bool,
) -> Result<Vec<bool>, EvalError> {
    let n = tree.node_count();
    Ok(match formula {
        CtlFormula::Atom(ap) => {
            let mut out = vec![false; n];
            for (id, node) in tree.nodes() {
                let position = match &node.label {
                    NodeLabel::Root => {
                        // the virtual root is never a trace position; only
                        // closed state queries can be true here
                        Position::Terminal {
                            status: crate::semantics::Status::Completed,
                            env: &node.env,
                        }
                    }
                    NodeLabel::Event(event) => Position::Event {
                        event,
                        env: &node.env,
                    },
                    NodeLabel::Terminal(status) => Position::Terminal {
                        status: *status,
                        env: &node.env,
                    },
                };
                out[id] = eval_ap(ap, position, state_unknown)?;
            }
            out
        }
        CtlFormula::Not(g) => {
            let mut out = label(tree, g, state_unknown)?;
            out.iter_mut().for_each(|b| *b = !*b);
            out
        }
        CtlFormula::And(a, b) => zip(
            label(tree, a, state_unknown)?,
            label(tree, b, state_unknown)?,
            |x, y| x && y,
        ),
        CtlFormula::Or(a, b) => zip(
            label(tree, a, state_unknown)?,
            label(tree, b, state_unknown)?,
            |x, y| x || y,
        ),
        CtlFormula::Implies(a, b) => zip(
            label(tree, a, state_unknown)?,
            label(tree, b, state_unknown)?,
            |x, y| !x || y,
        ),
        CtlFormula::Ex(g) => {
            let lg = label(tree, g, state_unknown)?;
            let mut out = vec![false; n];
            for (id, node) in tree.nodes() {
                out[id] = node.children.iter().any(|&c| lg[c]);
            }
            out
        }
        CtlFormula::Ax(g) => {
            let lg = label(tree, g, state_unknown)?;
            let mut out = vec![false; n];
            for (id, node) in tree.nodes() {
                out[id] = node.children.iter().all(|&c| lg[c]);
            }
            out
        }
        CtlFormula::Ef(g) => {
            let lg = label(tree, g, state_unknown)?;
            let mut out = vec![false; n];
            for id in (0..n).rev() {
                out[id] = lg[id] || tree.node(id).children.iter().any(|&c| out[c]);
            }
            out
        }
        CtlFormula::Af(g) => {
            let lg = label(tree, g, state_unknown)?;
            let mut out = vec![false; n];
            for id in (0..n).rev() {
                let node = tree.node(id);
                out[id] =
                    lg[id] || (!node.children.is_empty() && node.children.iter().all(|&c| out[c]));
            }
            out
        }
        CtlFormula::Eg(g) => {
            let lg = label(tree, g, state_unknown)?;
            let mut out = vec![false; n];
            for id in (0..n).rev() {
                let node = tree.node(id);
                out[id] =
                    lg[id] && (node.children.is_empty() || node.children.iter().any(|&c| out[c]));
            }
            out
        }
        CtlFormula::Ag(g) => {
            let lg = label(tree, g, state_unknown)?;
            let mut out = vec![false; n];
            for id in (0..n).rev() {
                out[id] = lg[id] && tree.node(id).children.iter().all(|&c| out[c]);
            }
            out
        }
        CtlFormula::Eu(a, b) => {
            let la = label(tree, a, state_unknown)?;
            let lb = label(tree, b, state_unknown)?;
            let mut out = vec![false; n];
            for id in (0..n).rev() {
                out[id] = lb[id] || (la[id] && tree.node(id).children.iter().any(|&c| out[c]));
            }
            out
        }
        CtlFormula::Au(a, b) => {
            let la = label(tree, a, state_unknown)?;
            let lb = label(tree, b, state_unknown)?;
            let mut out = vec![false; n];
            for id in (0..n).rev() {
                let node = tree.node(id);
                out[id] = lb[id]
                    || (la[id]
                        && !node.children.is_empty()
                        && node.children.iter().all(|&c| out[c]));
            }
            out
        }
    })
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

const PATH_SEARCH_CAP: usize = 20_000;

/// Searches the maximal paths through `start` for one whose single-path
/// reading agrees with the wanted verdict: a witness must satisfy the
/// formula on its own, a counterexample must violate it. Every returned
/// path is therefore self-validating by construction.
fn find_path(tree: &PrefixTree, start: NodeId, formula: &CtlFormula, want: bool) -> Option<Trace> {
    let mut tried = 0;
    let mut stack = vec![start];
    let mut result = None;
    walk_leaves(tree, &mut stack, &mut tried, &mut |tree, leaf| {
        let trace = tree.trace_to(leaf);
        if path_satisfies(&trace, formula) == Some(want) {
            result = Some(trace);
            true
        } else {
            false
        }
    });
    result
}

fn walk_leaves(
    tree: &PrefixTree,
    path: &mut Vec<NodeId>,
    tried: &mut usize,
    visit: &mut impl FnMut(&PrefixTree, NodeId) -> bool,
) -> bool {
    if *tried >= PATH_SEARCH_CAP {
        return false;
    }
    let current = *path.last().expect("path never empty");
    if tree.is_leaf(current) {
        *tried += 1;
        return visit(tree, current);
    }
    for &child in &tree.node(current).children {
        path.push(child);
        let found = walk_leaves(tree, path, tried, visit);
        path.pop();
        if found {
            return true;
        }
    }
    false
}

/// Evaluates the formula on a single path, degenerating the tree to a
/// chain (E and A quantifiers coincide there).
fn path_satisfies(trace: &Trace, formula: &CtlFormula) -> Option<bool> {
    let singleton = TraceSet::canonical(vec![trace.clone()], Default::default());
    let chain = super::tree::build_prefix_tree(&singleton);
    let mut state_unknown = false;
    let labels = label(&chain, formula, &mut state_unknown).ok()?;
    let initial = *chain.initials().first()?;
    Some(labels[initial])
}
