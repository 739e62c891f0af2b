//! Model checking over enumerated trace sets: LTL on each finite trace,
//! CTL on the prefix tree of the set, and the textual query language.

mod ctl;
mod ltl;
mod query;
mod tree;

pub use ctl::{check_ctl, CtlFormula};
pub use ltl::{check_ltl, ltl_holds_on, LtlFormula};
pub use query::{parse_query, Query, QueryError};
pub use tree::{build_prefix_tree, NodeId, NodeLabel, PrefixTree, TreeNode};

use crate::ast::Expr;
use crate::semantics::{Event, Status, Trace};
use crate::state::{eval_expr, Env, EvalError, UnknownGen, Value};

/// Atomic propositions over observable trace content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomicProp {
    /// This position is an occurrence of the named task.
    Task(String),
    /// The terminal position of a successful trace.
    Succeeded,
    /// The terminal position of a failed trace.
    Failed,
    /// This position assumed the named guard variable with this polarity.
    Assumed {
        var: String,
        polarity: bool,
    },
    /// The state at this position satisfies the expression. An undecided
    /// expression counts as false and marks the verdict
    /// assumption-dependent.
    State(Expr),
    Const(bool),
}

/// Result of a check. `evidence` is a counterexample when a universal
/// claim fails, or a witness when an existential CTL claim holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub evidence: Option<Trace>,
    /// The verdict rests on assumed guard polarities or on undetermined
    /// state: it may change once the unknowns are decided.
    pub assumption_dependent: bool,
}

/// One position of a trace: each event is a position, plus a final
/// terminal position carrying the status.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Position<'a> {
    Event { event: &'a Event, env: &'a Env },
    Terminal { status: Status, env: &'a Env },
}

/// The guard variable an assume event is about, unwrapping negations:
/// `assume(!(v))` is the variable `v` with flipped polarity.
fn assume_subject(guard: &Expr, polarity: bool) -> Option<(&str, bool)> {
    match guard {
        Expr::Var(v) => Some((v, polarity)),
        Expr::Not(inner) => assume_subject(inner, !polarity),
        _ => None,
    }
}

pub(crate) fn eval_ap(
    ap: &AtomicProp,
    position: Position<'_>,
    state_unknown: &mut bool,
) -> Result<bool, EvalError> {
    Ok(match ap {
        AtomicProp::Const(b) => *b,
        AtomicProp::Task(name) => matches!(
            position,
            Position::Event { event: Event::Task { name: n, .. }, .. } if n == name
        ),
        AtomicProp::Succeeded => {
            matches!(
                position,
                Position::Terminal {
                    status: Status::Succeeded,
                    ..
                }
            )
        }
        AtomicProp::Failed => {
            matches!(
                position,
                Position::Terminal {
                    status: Status::Failed,
                    ..
                }
            )
        }
        AtomicProp::Assumed { var, polarity } => match position {
            Position::Event {
                event:
                    Event::Assume {
                        guard,
                        polarity: actual,
                    },
                ..
            } => assume_subject(guard, *actual)
                .map(|(v, p)| v == var && p == *polarity)
                .unwrap_or(false),
            _ => false,
        },
        AtomicProp::State(expr) => {
            let env = match position {
                Position::Event { env, .. } | Position::Terminal { env, .. } => env,
            };
            let mut gen = UnknownGen::new();
            match eval_expr(env, expr, &mut gen)? {
                Value::Bool(b) => b,
                Value::Unknown(_) => {
                    // undetermined state never silently satisfies a property
                    *state_unknown = true;
                    false
                }
                other => {
                    return Err(EvalError::Sort(format!(
                        "state query evaluated to non-boolean {other}"
                    )))
                }
            }
        }
    })
}
