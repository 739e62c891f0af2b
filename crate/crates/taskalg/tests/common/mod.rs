//! Shared test support: a deliberately naive reference enumerator and
//! proptest generators for models and formulas.
//!
//! The reference enumerator recomputes everything recursively, keeps
//! duplicates, applies no caps and imposes no ordering. It exists to
//! cross-check `semantics::enumerate_traces` path by path.

#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;

use taskalg::ast::{
    Activity, Assignment, DefBody, Expr, Guard, Model, RelOp, Resolution, ResolvedModel,
};
use taskalg::modelcheck::AtomicProp;
use taskalg::semantics::{Event, Status, TraceSet};
use taskalg::state::{apply_assignments, eval_guard, Env, Tri, UnknownGen};

#[derive(Clone)]
struct NState {
    env: Env,
    gen: UnknownGen,
}

#[derive(Clone)]
struct NTrace {
    events: Vec<Event>,
    status: Status,
    state: NState,
}

/// Reference trace set of a model: event sequences and final statuses.
pub fn naive_keys(model: &ResolvedModel, unroll: u32) -> BTreeSet<(Vec<Event>, Status)> {
    let start = NState {
        env: Env::new(),
        gen: UnknownGen::new(),
    };
    denote(model, &model.model().main, &start, unroll)
        .into_iter()
        .map(|t| {
            let status = if t.status == Status::Completed {
                Status::Succeeded
            } else {
                t.status
            };
            (t.events, status)
        })
        .collect()
}

pub fn enumerated_keys(model: &ResolvedModel, unroll: u32) -> BTreeSet<(Vec<Event>, Status)> {
    try_enumerated_keys(model, unroll).expect("enumeration failed")
}

/// None when the enumeration hit a resource cap; random deep models can
/// explode legitimately and should be redrawn rather than failed.
pub fn try_enumerated_keys(
    model: &ResolvedModel,
    unroll: u32,
) -> Option<BTreeSet<(Vec<Event>, Status)>> {
    try_trace_set(model, unroll).map(|set| set.keys())
}

pub fn trace_set(model: &ResolvedModel, unroll: u32) -> TraceSet {
    try_trace_set(model, unroll).expect("enumeration failed")
}

pub fn try_trace_set(model: &ResolvedModel, unroll: u32) -> Option<TraceSet> {
    let config = taskalg::semantics::EnumConfig::with_unroll(unroll);
    taskalg::semantics::enumerate_traces(model, &config)
        .ok()
        .map(|e| e.set)
}

pub fn resolve_text(text: &str) -> ResolvedModel {
    taskalg::resolve(taskalg::parse_model(text).expect("parse failed")).expect("resolve failed")
}

fn denote(model: &ResolvedModel, act: &Activity, st: &NState, unroll: u32) -> Vec<NTrace> {
    match act {
        Activity::Empty => vec![nil(st, Status::Completed)],
        Activity::Succeed => vec![nil(st, Status::Succeeded)],
        Activity::Fail => vec![nil(st, Status::Failed)],

        Activity::TaskRef { name, overrides } => match model.resolution(name) {
            Resolution::Compound => {
                let Some(def) = model.definition(name) else {
                    panic!("unresolved compound {name}")
                };
                let DefBody::Compound(body) = &def.body else {
                    panic!()
                };
                absorb(denote(model, body, st, unroll))
            }
            resolution => {
                let defaults: Vec<Assignment> = match (&overrides, resolution) {
                    (Some(list), _) => list.clone(),
                    (None, Resolution::DeclaredSimple) => {
                        let DefBody::Simple(defaults) = &model.definition(name).unwrap().body
                        else {
                            panic!()
                        };
                        defaults.clone()
                    }
                    _ => vec![],
                };
                let mut gen = st.gen.clone();
                let (env, applied) =
                    apply_assignments(&st.env, &defaults, &mut gen).expect("eval error");
                vec![NTrace {
                    events: vec![Event::Task {
                        name: name.clone(),
                        applied,
                    }],
                    status: Status::Completed,
                    state: NState { env, gen },
                }]
            }
        },

        Activity::Encapsulated(inner) => absorb(denote(model, inner, st, unroll)),

        Activity::Seq(first, second) => {
            let mut out = Vec::new();
            for a in denote(model, first, st, unroll) {
                if a.status != Status::Completed {
                    out.push(a);
                    continue;
                }
                for b in denote(model, second, &a.state, unroll) {
                    out.push(NTrace {
                        events: cat(&a.events, &b.events),
                        status: b.status,
                        state: b.state,
                    });
                }
            }
            out
        }

        Activity::Sel {
            left_guard,
            left,
            right_guard,
            right,
        } => {
            let mut gen = st.gen.clone();
            let lv = tri_of(left_guard, &st.env, &mut gen);
            let rv = tri_of(right_guard, &st.env, &mut gen);
            let branch_state = NState {
                env: st.env.clone(),
                gen,
            };
            let mut out = Vec::new();
            out.extend(branch(model, lv, left_guard, left, &branch_state, unroll));
            out.extend(branch(model, rv, right_guard, right, &branch_state, unroll));
            out
        }

        Activity::Par(left, right) => {
            let mut out = Vec::new();
            for a in denote(model, left, st, unroll) {
                let sibling = NState {
                    env: st.env.clone(),
                    gen: a.state.gen.clone(),
                };
                for b in denote(model, right, &sibling, unroll) {
                    let status = match (a.status, b.status) {
                        (Status::Failed, _) | (_, Status::Failed) => Status::Failed,
                        (Status::Succeeded, _) | (_, Status::Succeeded) => Status::Succeeded,
                        _ => Status::Completed,
                    };
                    for events in weave(&a.events, &b.events) {
                        let env = replay_tasks(&st.env, &events);
                        out.push(NTrace {
                            events,
                            status,
                            state: NState {
                                env,
                                gen: b.state.gen.clone(),
                            },
                        });
                    }
                }
            }
            out
        }

        Activity::Until { guard, body } => {
            if unroll == 0 {
                return vec![];
            }
            until_rec(model, guard, body, st, unroll, unroll)
        }

        Activity::While { guard, body } => while_rec(model, guard, body, st, unroll, unroll),
    }
}

fn until_rec(
    model: &ResolvedModel,
    guard: &Option<Guard>,
    body: &Activity,
    st: &NState,
    remaining: u32,
    unroll: u32,
) -> Vec<NTrace> {
    let mut out = Vec::new();
    for b in denote(model, body, st, unroll) {
        if b.status != Status::Completed {
            out.push(b);
            continue;
        }
        let mut gen = b.state.gen.clone();
        let verdict = tri_of(guard, &b.state.env, &mut gen);
        let decided = NState {
            env: b.state.env.clone(),
            gen,
        };
        // exit unless the guard forces another round
        if verdict != Some(Tri::True) {
            let mut events = b.events.clone();
            if verdict == Some(Tri::Unknown) {
                events.push(assume_of(guard, false));
            }
            out.push(NTrace {
                events,
                status: Status::Completed,
                state: decided.clone(),
            });
        }
        // continue unless the guard forbids it or the budget is spent
        if verdict != Some(Tri::False) && remaining > 1 {
            let mut prefix = b.events.clone();
            if verdict == Some(Tri::Unknown) {
                prefix.push(assume_of(guard, true));
            }
            for rest in until_rec(model, guard, body, &decided, remaining - 1, unroll) {
                out.push(NTrace {
                    events: cat(&prefix, &rest.events),
                    status: rest.status,
                    state: rest.state,
                });
            }
        }
    }
    out
}

fn while_rec(
    model: &ResolvedModel,
    guard: &Option<Guard>,
    body: &Activity,
    st: &NState,
    remaining: u32,
    unroll: u32,
) -> Vec<NTrace> {
    let mut out = Vec::new();
    let mut gen = st.gen.clone();
    let verdict = tri_of(guard, &st.env, &mut gen);
    let decided = NState {
        env: st.env.clone(),
        gen,
    };
    if verdict != Some(Tri::True) {
        let mut events = Vec::new();
        if verdict == Some(Tri::Unknown) {
            events.push(assume_of(guard, false));
        }
        out.push(NTrace {
            events,
            status: Status::Completed,
            state: decided.clone(),
        });
    }
    if verdict != Some(Tri::False) && remaining > 0 {
        let mut prefix = Vec::new();
        if verdict == Some(Tri::Unknown) {
            prefix.push(assume_of(guard, true));
        }
        for b in denote(model, body, &decided, unroll) {
            if b.status != Status::Completed {
                out.push(NTrace {
                    events: cat(&prefix, &b.events),
                    status: b.status,
                    state: b.state,
                });
                continue;
            }
            for rest in while_rec(model, guard, body, &b.state, remaining - 1, unroll) {
                out.push(NTrace {
                    events: cat(&cat(&prefix, &b.events), &rest.events),
                    status: rest.status,
                    state: rest.state,
                });
            }
        }
    }
    out
}

fn branch(
    model: &ResolvedModel,
    verdict: Option<Tri>,
    guard: &Option<Guard>,
    arm: &Activity,
    st: &NState,
    unroll: u32,
) -> Vec<NTrace> {
    match verdict {
        Some(Tri::False) => vec![],
        v => {
            let prefix: Vec<Event> = if v == Some(Tri::Unknown) {
                vec![assume_of(guard, true)]
            } else {
                vec![]
            };
            denote(model, arm, st, unroll)
                .into_iter()
                .map(|t| NTrace {
                    events: cat(&prefix, &t.events),
                    status: t.status,
                    state: t.state,
                })
                .collect()
        }
    }
}

fn tri_of(guard: &Option<Guard>, env: &Env, gen: &mut UnknownGen) -> Option<Tri> {
    guard
        .as_ref()
        .map(|g| eval_guard(env, &g.expr, gen).expect("guard eval error"))
}

fn assume_of(guard: &Option<Guard>, polarity: bool) -> Event {
    Event::Assume {
        guard: guard.as_ref().expect("assume needs a guard").expr.clone(),
        polarity,
    }
}

fn nil(st: &NState, status: Status) -> NTrace {
    NTrace {
        events: vec![],
        status,
        state: st.clone(),
    }
}

fn absorb(traces: Vec<NTrace>) -> Vec<NTrace> {
    traces
        .into_iter()
        .map(|mut t| {
            if t.status == Status::Succeeded {
                t.status = Status::Completed;
            }
            t
        })
        .collect()
}

fn cat(a: &[Event], b: &[Event]) -> Vec<Event> {
    let mut out = a.to_vec();
    out.extend_from_slice(b);
    out
}

fn weave(xs: &[Event], ys: &[Event]) -> Vec<Vec<Event>> {
    if xs.is_empty() {
        return vec![ys.to_vec()];
    }
    if ys.is_empty() {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for mut rest in weave(&xs[1..], ys) {
        rest.insert(0, xs[0].clone());
        out.push(rest);
    }
    for mut rest in weave(xs, &ys[1..]) {
        rest.insert(0, ys[0].clone());
        out.push(rest);
    }
    out
}

fn replay_tasks(initial: &Env, events: &[Event]) -> Env {
    let mut env = initial.clone();
    for event in events {
        if let Event::Task { applied, .. } = event {
            for (target, value) in applied {
                env = env.bind(target, value.clone());
            }
        }
    }
    env
}

// ---------------------------------------------------------------------
// the login worked example

/// A login flow: cancel, direct validation, or a reminder round that asks
/// for the password again and may still fail.
pub const LOGIN_MODEL: &str = "\
-- logging in to a system
main = { phi [cancelled]
       + ( validatePassword(pwdchk=validatepwd()) [password_entered]
         + [remind] ( requestPassword(pwd=intropwd())
                    ; ( validatePassword(pwdchk=validatepwd()) [password_entered]
                      + [!password_entered] phi ) ) ) }
";

/// The complete execution paths of the login flow, validated against the
/// reference enumerator before being frozen here.
pub const LOGIN_TRACES: [&str; 4] = [
    "<assume(cancelled)> => failed",
    "<assume(password_entered), validatePassword(pwdchk=?validatepwd#1)> => succeeded",
    "<assume(remind), requestPassword(pwd=?intropwd#1), assume(password_entered), \
     validatePassword(pwdchk=?validatepwd#1)> => succeeded",
    "<assume(remind), requestPassword(pwd=?intropwd#1), assume(!password_entered)> => failed",
];

// ---------------------------------------------------------------------
// generators

const TASK_NAMES: [&str; 5] = ["a", "b", "c", "t", "u"];
const VAR_NAMES: [&str; 3] = ["go", "stop", "done"];

pub fn arb_task_name() -> impl Strategy<Value = String> {
    proptest::sample::select(&TASK_NAMES[..]).prop_map(str::to_string)
}

fn arb_guard() -> impl Strategy<Value = Guard> {
    let var = proptest::sample::select(&VAR_NAMES[..]).prop_map(|v| Expr::Var(v.to_string()));
    prop_oneof![
        4 => var.clone(),
        1 => var.clone().prop_map(|v| Expr::Not(Box::new(v))),
        1 => Just(Expr::Bool(true)),
        1 => Just(Expr::Bool(false)),
        1 => (var, 0i64..3).prop_map(|(v, n)| Expr::Rel {
            op: RelOp::Lt,
            lhs: Box::new(v),
            rhs: Box::new(Expr::Int(n)),
        }),
    ]
    .prop_map(|expr| Guard { expr })
}

fn arb_assignment() -> impl Strategy<Value = Assignment> {
    let value = prop_oneof![
        (0i64..5).prop_map(Expr::Int),
        Just(Expr::Bool(true)),
        Just(Expr::Str("v".into())),
        Just(Expr::Call {
            callee: "f".into(),
            args: vec![],
        }),
    ];
    (proptest::sample::select(&["x", "y", "z"][..]), value).prop_map(|(target, value)| Assignment {
        target: target.to_string(),
        value,
    })
}

/// Knobs for the activity generator. `guards`/`assigns` switch symbolic
/// features off for laws that require guard-free or state-free terms.
#[derive(Clone, Copy)]
pub struct GenOptions {
    pub guards: bool,
    pub assigns: bool,
    pub loops: bool,
}

impl GenOptions {
    pub fn plain() -> Self {
        GenOptions {
            guards: false,
            assigns: false,
            loops: true,
        }
    }

    pub fn full() -> Self {
        GenOptions {
            guards: true,
            assigns: true,
            loops: true,
        }
    }
}

pub fn arb_activity(depth: u32, options: GenOptions) -> BoxedStrategy<Activity> {
    let task = || {
        arb_task_name().prop_map(|name| Activity::TaskRef {
            name,
            overrides: None,
        })
    };
    let task_with_props = if options.assigns {
        (
            arb_task_name(),
            proptest::collection::vec(arb_assignment(), 0..3),
        )
            .prop_map(|(name, overrides)| Activity::TaskRef {
                name,
                overrides: Some(dedup_targets(overrides)),
            })
            .boxed()
    } else {
        task().boxed()
    };
    let leaf = prop_oneof![
        1 => Just(Activity::Empty),
        1 => Just(Activity::Succeed),
        1 => Just(Activity::Fail),
        4 => task(),
        2 => task_with_props,
    ];
    let opt_guard = if options.guards {
        proptest::option::of(arb_guard()).boxed()
    } else {
        Just(None).boxed()
    };
    leaf.prop_recursive(depth, 16, 2, move |inner| {
        let og = opt_guard.clone();
        let og2 = opt_guard.clone();
        let mut cases = vec![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Activity::Seq(Box::new(a), Box::new(b)))
                .boxed(),
            (og.clone(), inner.clone(), og.clone(), inner.clone())
                .prop_map(|(left_guard, left, right_guard, right)| Activity::Sel {
                    left_guard,
                    left: Box::new(left),
                    right_guard,
                    right: Box::new(right),
                })
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Activity::Par(Box::new(a), Box::new(b)))
                .boxed(),
            inner
                .clone()
                .prop_map(|a| Activity::Encapsulated(Box::new(a)))
                .boxed(),
        ];
        if options.loops {
            cases.push(
                (og2.clone(), inner.clone())
                    .prop_map(|(guard, body)| Activity::Until {
                        guard,
                        body: Box::new(nonempty(body)),
                    })
                    .boxed(),
            );
            cases.push(
                (og2, inner.clone())
                    .prop_map(|(guard, body)| Activity::While {
                        guard,
                        body: Box::new(nonempty(body)),
                    })
                    .boxed(),
            );
        }
        proptest::strategy::Union::new(cases).boxed()
    })
    .boxed()
}

fn dedup_targets(assigns: Vec<Assignment>) -> Vec<Assignment> {
    let mut seen = BTreeSet::new();
    assigns
        .into_iter()
        .filter(|a| seen.insert(a.target.clone()))
        .collect()
}

fn nonempty(body: Activity) -> Activity {
    if matches!(body, Activity::Empty) {
        Activity::Succeed
    } else {
        body
    }
}

pub fn arb_model(depth: u32, options: GenOptions) -> impl Strategy<Value = Model> {
    arb_activity(depth, options).prop_map(|main| Model {
        definitions: vec![],
        main,
    })
}

/// Propositional formulas (no temporal operators) over the generated
/// models' vocabulary, for the LTL/CTL correspondence suites.
#[derive(Debug, Clone)]
pub enum Prop {
    Atom(AtomicProp),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

pub fn arb_prop(depth: u32) -> BoxedStrategy<Prop> {
    let atom = prop_oneof![
        4 => arb_task_name().prop_map(|n| Prop::Atom(AtomicProp::Task(n))),
        2 => Just(Prop::Atom(AtomicProp::Succeeded)),
        2 => Just(Prop::Atom(AtomicProp::Failed)),
        1 => Just(Prop::Atom(AtomicProp::Const(true))),
        1 => Just(Prop::Atom(AtomicProp::Const(false))),
        1 => proptest::sample::select(&VAR_NAMES[..]).prop_map(|v| {
            Prop::Atom(AtomicProp::Assumed {
                var: v.to_string(),
                polarity: true,
            })
        }),
    ];
    atom.prop_recursive(depth, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| Prop::Not(Box::new(p))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Prop::Or(Box::new(a), Box::new(b))),
        ]
    })
    .boxed()
}

impl Prop {
    pub fn to_ltl(&self) -> taskalg::modelcheck::LtlFormula {
        use taskalg::modelcheck::LtlFormula as L;
        match self {
            Prop::Atom(ap) => L::Atom(ap.clone()),
            Prop::Not(p) => L::Not(Box::new(p.to_ltl())),
            Prop::And(a, b) => L::And(Box::new(a.to_ltl()), Box::new(b.to_ltl())),
            Prop::Or(a, b) => L::Or(Box::new(a.to_ltl()), Box::new(b.to_ltl())),
        }
    }

    pub fn to_ctl(&self) -> taskalg::modelcheck::CtlFormula {
        use taskalg::modelcheck::CtlFormula as C;
        match self {
            Prop::Atom(ap) => C::Atom(ap.clone()),
            Prop::Not(p) => C::Not(Box::new(p.to_ctl())),
            Prop::And(a, b) => C::And(Box::new(a.to_ctl()), Box::new(b.to_ctl())),
            Prop::Or(a, b) => C::Or(Box::new(a.to_ctl()), Box::new(b.to_ctl())),
        }
    }
}
