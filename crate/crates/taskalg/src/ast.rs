//! Term types for the task flow algebra, plus name resolution and model
//! validation.
//!
//! A [`Model`] is a list of `let` definitions and a `main` activity. An
//! [`Activity`] is built from the empty activity, success, failure, task
//! references, sequence, guarded selection, parallel composition, the two
//! loop forms and encapsulation. Loops are first-class nodes here: the
//! algebra admits exactly the until/while recursion patterns, so a general
//! recursion binder is never needed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A complete model: zero or more definitions and one main activity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub definitions: Vec<Definition>,
    pub main: Activity,
}

/// One `let` definition, either a compound task (braced activity) or a
/// simple task with a default property list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub body: DefBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefBody {
    /// `let T = { activity }` — an encapsulated sub-flow.
    Compound(Activity),
    /// `let t = [a=expr, ...]` — a simple task with default postconditions.
    Simple(Vec<Assignment>),
}

/// An activity term of the algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Activity {
    /// `eps` — the empty activity.
    Empty,
    /// `sigma` — terminate the enclosing context successfully.
    Succeed,
    /// `phi` — terminate with failure.
    Fail,
    /// A task reference, optionally with usage-site property overrides.
    TaskRef {
        name: String,
        overrides: Option<Vec<Assignment>>,
    },
    /// `{ A }` — encapsulation: a local execution context.
    Encapsulated(Box<Activity>),
    /// `A ; B` — sequential composition.
    Seq(Box<Activity>, Box<Activity>),
    /// `A [g] + [h] B` — selection with optional guards per side.
    Sel {
        left_guard: Option<Guard>,
        left: Box<Activity>,
        right_guard: Option<Guard>,
        right: Box<Activity>,
    },
    /// `A || B` — parallel composition (interleaving).
    Par(Box<Activity>, Box<Activity>),
    /// `until [g] { A }` — run the body, then either exit or repeat.
    Until {
        guard: Option<Guard>,
        body: Box<Activity>,
    },
    /// `while [g] { A }` — either exit or run the body and repeat.
    While {
        guard: Option<Guard>,
        body: Box<Activity>,
    },
}

/// A boolean condition attached to a selection branch or a loop.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    pub expr: Expr,
}

/// One `target = expr` pair in a property list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub target: String,
    pub value: Expr,
}

/// Guard and property expressions: values, variables, external calls,
/// boolean connectives and relational operators. No arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Int(i64),
    Str(String),
    Bool(bool),
    Var(String),
    /// An uninterpreted external call such as `intropwd()`.
    Call {
        callee: String,
        args: Vec<Expr>,
    },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Rel {
        op: RelOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }
}

/// How a task name resolves against the model's definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// The name refers to a `let T = { ... }` definition.
    Compound,
    /// The name refers to a `let t = [...]` definition.
    DeclaredSimple,
    /// The name has no definition; it denotes a simple task with no
    /// default postconditions.
    ImplicitSimple,
}

/// A validated model with every task name resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedModel {
    model: Model,
    resolutions: BTreeMap<String, Resolution>,
}

impl ResolvedModel {
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn resolution(&self, name: &str) -> Resolution {
        self.resolutions
            .get(name)
            .copied()
            .unwrap_or(Resolution::ImplicitSimple)
    }

    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.model.definitions.iter().find(|d| d.name == name)
    }

    pub fn resolutions(&self) -> &BTreeMap<String, Resolution> {
        &self.resolutions
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("duplicate definition of `{0}`")]
    DuplicateDefinition(String),
    #[error("cyclic definition: {}", .0.join(" -> "))]
    CyclicDefinition(Vec<String>),
    #[error("task `{0}` is compound and cannot take a property list")]
    OverrideOnCompound(String),
    #[error("duplicate assignment target `{target}` for task `{task}`")]
    DuplicateAssignmentTarget { task: String, target: String },
    #[error("loop body must not be the empty activity")]
    EmptyLoopBody,
    #[error("guard does not have boolean sort: {0}")]
    GuardSort(String),
}

/// Resolves every task reference in the model and validates the whole
/// term: unique definition names, an acyclic compound reference graph,
/// boolean-sorted guards, non-empty loop bodies and well-formed property
/// lists.
pub fn resolve(model: Model) -> Result<ResolvedModel, ResolveError> {
    let mut by_name: BTreeMap<&str, &Definition> = BTreeMap::new();
    for def in &model.definitions {
        if by_name.insert(&def.name, def).is_some() {
            return Err(ResolveError::DuplicateDefinition(def.name.clone()));
        }
        if let DefBody::Simple(assigns) = &def.body {
            check_unique_targets(&def.name, assigns)?;
        }
    }

    // Compound references may be forward; walk each compound body for a
    // cycle through compound definitions.
    for def in &model.definitions {
        if let DefBody::Compound(_) = def.body {
            let mut stack = vec![def.name.clone()];
            check_cycles(&def.name, &by_name, &mut stack)?;
        }
    }

    let mut resolutions = BTreeMap::new();
    let mut bodies: Vec<&Activity> = vec![&model.main];
    for def in &model.definitions {
        if let DefBody::Compound(body) = &def.body {
            bodies.push(body);
        }
    }
    for body in bodies {
        validate_activity(body, &by_name, &mut resolutions)?;
    }

    Ok(ResolvedModel { model, resolutions })
}

fn check_unique_targets(task: &str, assigns: &[Assignment]) -> Result<(), ResolveError> {
    let mut seen = BTreeSet::new();
    for a in assigns {
        if !seen.insert(&a.target) {
            return Err(ResolveError::DuplicateAssignmentTarget {
                task: task.to_string(),
                target: a.target.clone(),
            });
        }
    }
    Ok(())
}

fn check_cycles(
    name: &str,
    defs: &BTreeMap<&str, &Definition>,
    stack: &mut Vec<String>,
) -> Result<(), ResolveError> {
    let Some(def) = defs.get(name) else {
        return Ok(());
    };
    let DefBody::Compound(body) = &def.body else {
        return Ok(());
    };
    for referenced in free_task_names(body) {
        if stack.contains(&referenced) {
            let start = stack.iter().position(|n| *n == referenced).unwrap();
            let mut cycle: Vec<String> = stack[start..].to_vec();
            cycle.push(referenced);
            return Err(ResolveError::CyclicDefinition(cycle));
        }
        if matches!(defs.get(referenced.as_str()), Some(d) if matches!(d.body, DefBody::Compound(_)))
        {
            stack.push(referenced.clone());
            check_cycles(&referenced, defs, stack)?;
            stack.pop();
        }
    }
    Ok(())
}

fn validate_activity(
    act: &Activity,
    defs: &BTreeMap<&str, &Definition>,
    resolutions: &mut BTreeMap<String, Resolution>,
) -> Result<(), ResolveError> {
    match act {
        Activity::Empty | Activity::Succeed | Activity::Fail => Ok(()),
        Activity::TaskRef { name, overrides } => {
            let resolution = match defs.get(name.as_str()) {
                Some(def) => match def.body {
                    DefBody::Compound(_) => Resolution::Compound,
                    DefBody::Simple(_) => Resolution::DeclaredSimple,
                },
                None => Resolution::ImplicitSimple,
            };
            if let Some(overrides) = overrides {
                if resolution == Resolution::Compound {
                    return Err(ResolveError::OverrideOnCompound(name.clone()));
                }
                check_unique_targets(name, overrides)?;
            }
            resolutions.insert(name.clone(), resolution);
            Ok(())
        }
        Activity::Encapsulated(inner) => validate_activity(inner, defs, resolutions),
        Activity::Seq(a, b) | Activity::Par(a, b) => {
            validate_activity(a, defs, resolutions)?;
            validate_activity(b, defs, resolutions)
        }
        Activity::Sel {
            left_guard,
            left,
            right_guard,
            right,
        } => {
            check_guard(left_guard)?;
            check_guard(right_guard)?;
            validate_activity(left, defs, resolutions)?;
            validate_activity(right, defs, resolutions)
        }
        Activity::Until { guard, body } | Activity::While { guard, body } => {
            if matches!(**body, Activity::Empty) {
                return Err(ResolveError::EmptyLoopBody);
            }
            check_guard(guard)?;
            validate_activity(body, defs, resolutions)
        }
    }
}

fn check_guard(guard: &Option<Guard>) -> Result<(), ResolveError> {
    if let Some(g) = guard {
        crate::state::check_bool_sorted(&g.expr)
            .map_err(|e| ResolveError::GuardSort(e.to_string()))?;
    }
    Ok(())
}

/// Collects every task name referenced in the activity, including names
/// inside loops and encapsulations.
pub fn free_task_names(activity: &Activity) -> BTreeSet<String> {
    fn walk(act: &Activity, out: &mut BTreeSet<String>) {
        match act {
            Activity::Empty | Activity::Succeed | Activity::Fail => {}
            Activity::TaskRef { name, .. } => {
                out.insert(name.clone());
            }
            Activity::Encapsulated(inner) => walk(inner, out),
            Activity::Seq(a, b) | Activity::Par(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Activity::Sel { left, right, .. } => {
                walk(left, out);
                walk(right, out);
            }
            Activity::Until { body, .. } | Activity::While { body, .. } => walk(body, out),
        }
    }
    let mut out = BTreeSet::new();
    walk(activity, &mut out);
    out
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Compound => write!(f, "compound"),
            Resolution::DeclaredSimple => write!(f, "simple"),
            Resolution::ImplicitSimple => write!(f, "implicit simple"),
        }
    }
}
