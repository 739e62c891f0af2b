//! LTL over finite traces. A trace of n events has n+1 positions: one per
//! event plus a terminal position carrying the status. `Next` is strong:
//! false at the terminal position.

use super::{eval_ap, AtomicProp, Position, Verdict};
use crate::semantics::{Event, Trace, TraceSet};
use crate::state::{Env, EvalError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LtlFormula {
    Atom(AtomicProp),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Finally(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
}

/// Universal reading over the set: holds iff every trace satisfies the
/// formula at position 0. The counterexample is the first violating trace
/// in canonical order.
pub fn check_ltl(ts: &TraceSet, formula: &LtlFormula) -> Result<Verdict, EvalError> {
    let mut state_unknown = false;
    for trace in ts.iter() {
        if !satisfies(trace, formula, &mut state_unknown)? {
            let assumption_dependent = state_unknown || trace.has_assume();
            return Ok(Verdict {
                holds: false,
                evidence: Some(trace.clone()),
                assumption_dependent,
            });
        }
    }
    let assumption_dependent = state_unknown || ts.iter().any(Trace::has_assume);
    Ok(Verdict {
        holds: true,
        evidence: None,
        assumption_dependent,
    })
}

/// Whether a single trace satisfies the formula at position 0.
pub fn ltl_holds_on(trace: &Trace, formula: &LtlFormula) -> Result<bool, EvalError> {
    let mut state_unknown = false;
    satisfies(trace, formula, &mut state_unknown)
}

fn satisfies(
    trace: &Trace,
    formula: &LtlFormula,
    state_unknown: &mut bool,
) -> Result<bool, EvalError> {
    // env at position i is the state after events[0..=i]
    let mut envs = Vec::with_capacity(trace.events.len() + 1);
    let mut env = Env::new();
    for event in &trace.events {
        if let Event::Task { applied, .. } = event {
            for (target, value) in applied {
                env = env.bind(target, value.clone());
            }
        }
        envs.push(env.clone());
    }
    envs.push(env);
    holds(trace, &envs, formula, 0, state_unknown)
}

fn position_of<'a>(trace: &'a Trace, envs: &'a [Env], i: usize) -> Position<'a> {
    if i < trace.events.len() {
        Position::Event {
            event: &trace.events[i],
            env: &envs[i],
        }
    } else {
        Position::Terminal {
            status: trace.status,
            env: &envs[trace.events.len()],
        }
    }
}

fn holds(
    trace: &Trace,
    envs: &[Env],
    formula: &LtlFormula,
    i: usize,
    state_unknown: &mut bool,
) -> Result<bool, EvalError> {
    let end = trace.events.len();
    Ok(match formula {
        LtlFormula::Atom(ap) => eval_ap(ap, position_of(trace, envs, i), state_unknown)?,
        LtlFormula::Not(g) => !holds(trace, envs, g, i, state_unknown)?,
        LtlFormula::And(a, b) => {
            holds(trace, envs, a, i, state_unknown)? && holds(trace, envs, b, i, state_unknown)?
        }
        LtlFormula::Or(a, b) => {
            holds(trace, envs, a, i, state_unknown)? || holds(trace, envs, b, i, state_unknown)?
        }
        LtlFormula::Implies(a, b) => {
            !holds(trace, envs, a, i, state_unknown)? || holds(trace, envs, b, i, state_unknown)?
        }
        LtlFormula::Next(g) => i < end && holds(trace, envs, g, i + 1, state_unknown)?,
        LtlFormula::Finally(g) => {
            let mut any = false;
            for j in i..=end {
                if holds(trace, envs, g, j, state_unknown)? {
                    any = true;
                    break;
                }
            }
            any
        }
        LtlFormula::Globally(g) => {
            let mut all = true;
            for j in i..=end {
                if !holds(trace, envs, g, j, state_unknown)? {
                    all = false;
                    break;
                }
            }
            all
        }
        LtlFormula::Until(lhs, rhs) => {
            let mut result = false;
            for j in i..=end {
                if holds(trace, envs, rhs, j, state_unknown)? {
                    result = true;
                    break;
                }
                if !holds(trace, envs, lhs, j, state_unknown)? {
                    break;
                }
            }
            result
        }
    })
}
