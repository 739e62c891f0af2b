//! The abstract state layer: typed values with symbolic unknowns, the
//! variable environment threaded along execution paths, and three-valued
//! guard evaluation.
//!
//! External calls and unbound variables evaluate to `Unknown` values, so a
//! guard over them yields the third truth value rather than an error. The
//! connectives follow the Kleene tables.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::{Expr, RelOp};

/// A runtime value. `Unknown` carries a symbol identifying where the value
/// came from: `name` for an unbound variable, `callee#N` for the N-th call
/// of an external function on the current path, or a rendering of the
/// residual expression for a partially evaluated operation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Str(String),
    Unknown(String),
}

impl Value {
    fn symbol(&self) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Str(s) => format!("{s:?}"),
            Value::Unknown(sym) => sym.clone(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Unknown(sym) => write!(f, "?{sym}"),
        }
    }
}

/// The variable environment. Immutable: updates return a new `Env`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Env {
    bindings: BTreeMap<String, Value>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Lookup never invents a default: an unbound name is reported as such.
    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn bind(&self, name: &str, value: Value) -> Env {
        let mut bindings = self.bindings.clone();
        bindings.insert(name.to_string(), value);
        Env { bindings }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.bindings.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

/// Three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl std::ops::Not for Tri {
    type Output = Tri;

    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

impl Tri {
    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        }
    }
}

/// Mints the `callee#N` symbols for external calls. One generator is
/// threaded along each execution path and forked at branch points, so
/// symbol names depend only on the path, never on exploration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnknownGen {
    counters: BTreeMap<String, u64>,
}

impl UnknownGen {
    pub fn new() -> Self {
        UnknownGen::default()
    }

    pub fn fresh(&mut self, callee: &str) -> Value {
        let n = self.counters.entry(callee.to_string()).or_insert(0);
        *n += 1;
        Value::Unknown(format!("{callee}#{n}"))
    }

    pub fn counters(&self) -> &BTreeMap<String, u64> {
        &self.counters
    }

    pub fn count(&self, callee: &str) -> u64 {
        self.counters.get(callee).copied().unwrap_or(0)
    }

    pub fn set_count(&mut self, callee: &str, n: u64) {
        if n > 0 {
            self.counters.insert(callee.to_string(), n);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("sort error: {0}")]
    Sort(String),
    #[error("cannot order {0} against {1}")]
    Comparison(String, String),
}

/// Static sorts for expressions. Variables and calls are `Any`: their sort
/// is only known at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Int,
    Str,
    Any,
}

impl Sort {
    fn admits_bool(self) -> bool {
        matches!(self, Sort::Bool | Sort::Any)
    }
}

/// Infers the sort of an expression, rejecting terms that can never be
/// well-sorted (for example `3 && true`).
pub fn sort_of(expr: &Expr) -> Result<Sort, EvalError> {
    match expr {
        Expr::Int(_) => Ok(Sort::Int),
        Expr::Str(_) => Ok(Sort::Str),
        Expr::Bool(_) => Ok(Sort::Bool),
        Expr::Var(_) => Ok(Sort::Any),
        Expr::Call { args, .. } => {
            for arg in args {
                sort_of(arg)?;
            }
            Ok(Sort::Any)
        }
        Expr::Not(inner) => {
            if !sort_of(inner)?.admits_bool() {
                return Err(EvalError::Sort(format!(
                    "`!` applied to non-boolean `{inner}`"
                )));
            }
            Ok(Sort::Bool)
        }
        Expr::And(a, b) | Expr::Or(a, b) => {
            for side in [a, b] {
                if !sort_of(side)?.admits_bool() {
                    return Err(EvalError::Sort(format!(
                        "boolean operator applied to non-boolean `{side}`"
                    )));
                }
            }
            Ok(Sort::Bool)
        }
        Expr::Rel { op, lhs, rhs } => {
            let ls = sort_of(lhs)?;
            let rs = sort_of(rhs)?;
            if matches!(op, RelOp::Lt | RelOp::Le | RelOp::Gt | RelOp::Ge) {
                if ls == Sort::Bool || rs == Sort::Bool {
                    return Err(EvalError::Sort(format!(
                        "booleans cannot be ordered in `{expr}`"
                    )));
                }
                if ls != Sort::Any && rs != Sort::Any && ls != rs {
                    return Err(EvalError::Comparison(format!("{lhs}"), format!("{rhs}")));
                }
            }
            Ok(Sort::Bool)
        }
    }
}

/// Checks that an expression can serve as a guard.
pub fn check_bool_sorted(expr: &Expr) -> Result<(), EvalError> {
    match sort_of(expr)? {
        Sort::Bool | Sort::Any => Ok(()),
        Sort::Int => Err(EvalError::Sort(format!("guard `{expr}` has integer sort"))),
        Sort::Str => Err(EvalError::Sort(format!("guard `{expr}` has string sort"))),
    }
}

/// Evaluates an expression against the environment. Literals evaluate to
/// themselves, unbound variables to a stable `Unknown` named after the
/// variable, calls to a fresh `Unknown`, and operators fold over values,
/// staying symbolic whenever an operand is symbolic.
pub fn eval_expr(env: &Env, expr: &Expr, gen: &mut UnknownGen) -> Result<Value, EvalError> {
    match expr {
        Expr::Int(i) => Ok(Value::Int(*i)),
        Expr::Str(s) => Ok(Value::Str(s.clone())),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Var(name) => Ok(match env.lookup(name) {
            Some(v) => v.clone(),
            None => Value::Unknown(name.clone()),
        }),
        Expr::Call { callee, args } => {
            // Calls are uninterpreted; arguments are still evaluated so
            // sort errors surface and nested calls advance the counter.
            for arg in args {
                eval_expr(env, arg, gen)?;
            }
            Ok(gen.fresh(callee))
        }
        Expr::Not(inner) => {
            let v = eval_expr(env, inner, gen)?;
            match v {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                Value::Unknown(sym) => Ok(Value::Unknown(format!("!{sym}"))),
                other => Err(EvalError::Sort(format!("`!` applied to {other}"))),
            }
        }
        Expr::And(a, b) => {
            let va = eval_expr(env, a, gen)?;
            let vb = eval_expr(env, b, gen)?;
            kleene_binary(
                va,
                vb,
                "&&",
                |x, y| x && y,
                |x, y| {
                    // false dominates regardless of the other side
                    matches!((x, y), (Some(false), _) | (_, Some(false))).then_some(false)
                },
            )
        }
        Expr::Or(a, b) => {
            let va = eval_expr(env, a, gen)?;
            let vb = eval_expr(env, b, gen)?;
            kleene_binary(
                va,
                vb,
                "||",
                |x, y| x || y,
                |x, y| matches!((x, y), (Some(true), _) | (_, Some(true))).then_some(true),
            )
        }
        Expr::Rel { op, lhs, rhs } => {
            let vl = eval_expr(env, lhs, gen)?;
            let vr = eval_expr(env, rhs, gen)?;
            eval_rel(*op, vl, vr)
        }
    }
}

fn bool_operand(v: &Value, op: &str) -> Result<Option<bool>, EvalError> {
    match v {
        Value::Bool(b) => Ok(Some(*b)),
        Value::Unknown(_) => Ok(None),
        other => Err(EvalError::Sort(format!("`{op}` applied to {other}"))),
    }
}

fn kleene_binary(
    va: Value,
    vb: Value,
    op: &str,
    both: impl Fn(bool, bool) -> bool,
    dominant: impl Fn(Option<bool>, Option<bool>) -> Option<bool>,
) -> Result<Value, EvalError> {
    let a = bool_operand(&va, op)?;
    let b = bool_operand(&vb, op)?;
    if let Some(result) = dominant(a, b) {
        return Ok(Value::Bool(result));
    }
    match (a, b) {
        (Some(x), Some(y)) => Ok(Value::Bool(both(x, y))),
        _ => Ok(Value::Unknown(format!(
            "({} {op} {})",
            va.symbol(),
            vb.symbol()
        ))),
    }
}

fn eval_rel(op: RelOp, vl: Value, vr: Value) -> Result<Value, EvalError> {
    use Value::*;
    let symbolic = |vl: &Value, vr: &Value| {
        Value::Unknown(format!("({} {} {})", vl.symbol(), op.symbol(), vr.symbol()))
    };
    match op {
        RelOp::Eq | RelOp::Ne => {
            let eq = match (&vl, &vr) {
                (Unknown(a), Unknown(b)) if a == b => Some(true),
                (Unknown(_), _) | (_, Unknown(_)) => None,
                (a, b) => Some(a == b),
            };
            match eq {
                Some(eq) => Ok(Value::Bool(if op == RelOp::Eq { eq } else { !eq })),
                None => Ok(symbolic(&vl, &vr)),
            }
        }
        RelOp::Lt | RelOp::Le | RelOp::Gt | RelOp::Ge => {
            if matches!(vl, Bool(_)) || matches!(vr, Bool(_)) {
                return Err(EvalError::Sort(format!(
                    "booleans cannot be ordered ({vl} {} {vr})",
                    op.symbol()
                )));
            }
            let ord = match (&vl, &vr) {
                (Int(a), Int(b)) => Some(a.cmp(b)),
                (Str(a), Str(b)) => Some(a.cmp(b)),
                (Unknown(_), _) | (_, Unknown(_)) => None,
                _ => {
                    return Err(EvalError::Comparison(format!("{vl}"), format!("{vr}")));
                }
            };
            match ord {
                Some(ord) => Ok(Value::Bool(match op {
                    RelOp::Lt => ord.is_lt(),
                    RelOp::Le => ord.is_le(),
                    RelOp::Gt => ord.is_gt(),
                    RelOp::Ge => ord.is_ge(),
                    _ => unreachable!(),
                })),
                None => Ok(symbolic(&vl, &vr)),
            }
        }
    }
}

/// Evaluates a guard to a three-valued verdict.
pub fn eval_guard(env: &Env, guard: &Expr, gen: &mut UnknownGen) -> Result<Tri, EvalError> {
    match eval_expr(env, guard, gen)? {
        Value::Bool(true) => Ok(Tri::True),
        Value::Bool(false) => Ok(Tri::False),
        Value::Unknown(_) => Ok(Tri::Unknown),
        other => Err(EvalError::Sort(format!("guard evaluated to {other}"))),
    }
}

/// Applies a property list left to right: later assignments in the same
/// list see the earlier ones. Returns the new environment and the
/// evaluated pairs in order, ready to be recorded on a trace event.
pub fn apply_assignments(
    env: &Env,
    assigns: &[crate::ast::Assignment],
    gen: &mut UnknownGen,
) -> Result<(Env, Vec<(String, Value)>), EvalError> {
    let mut env = env.clone();
    let mut applied = Vec::with_capacity(assigns.len());
    for assign in assigns {
        let value = eval_expr(&env, &assign.value, gen)?;
        env = env.bind(&assign.target, value.clone());
        applied.push((assign.target.clone(), value));
    }
    Ok((env, applied))
}
