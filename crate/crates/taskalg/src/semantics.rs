//! Trace-set semantics: enumerates every complete execution path of a
//! resolved model under a loop-unroll bound.
//!
//! Each path threads an environment and an unknown-symbol counter. Guards
//! prune branches when they evaluate to false; a guard that cannot be
//! decided explores the branch under a recorded `Assume` event. Loops are
//! unrolled to exact iteration counts (`while`: 0..bound, `until`:
//! 1..bound); a truncated but still-enabled continuation sets
//! `loop_bound_hit`. Encapsulation absorbs local success; failure
//! propagates outwards.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::{Activity, DefBody, Expr, Guard, Resolution, ResolvedModel};
use crate::state::{apply_assignments, eval_guard, Env, EvalError, Tri, UnknownGen, Value};

/// One observable step of an execution path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    /// A simple task occurred; `applied` records its evaluated
    /// postconditions in application order.
    Task {
        name: String,
        applied: Vec<(String, Value)>,
    },
    /// An undetermined guard was taken assuming the given polarity.
    /// Guards that evaluate to a definite truth value never produce this.
    Assume { guard: Expr, polarity: bool },
}

impl Event {
    pub fn task(name: &str) -> Event {
        Event::Task {
            name: name.to_string(),
            applied: vec![],
        }
    }

    pub fn assume(guard: Expr, polarity: bool) -> Event {
        Event::Assume { guard, polarity }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Task { name, applied } => {
                write!(f, "{name}")?;
                if !applied.is_empty() {
                    write!(f, "(")?;
                    for (i, (k, v)) in applied.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{k}={v}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Event::Assume { guard, polarity } => {
                if *polarity {
                    write!(f, "assume({guard})")
                } else {
                    write!(f, "assume(!({guard}))")
                }
            }
        }
    }
}

/// Terminal status of a trace. `Completed` only appears in intermediate
/// values; finalization turns it into `Succeeded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Completed,
    Succeeded,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Completed => write!(f, "completed"),
            Status::Succeeded => write!(f, "succeeded"),
            Status::Failed => write!(f, "failed"),
        }
    }
}

/// One complete execution path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Trace {
    pub events: Vec<Event>,
    pub status: Status,
    pub final_env: Env,
}

impl Trace {
    /// Identity used for deduplication and set comparison: the observable
    /// events plus the terminal status, ignoring the final environment.
    pub fn key(&self) -> (Vec<Event>, Status) {
        (self.events.clone(), self.status)
    }

    pub fn has_assume(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, Event::Assume { .. }))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "> => {}", self.status)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    /// A loop still had an enabled continuation when the unroll bound cut
    /// it off: the set under-approximates the unbounded semantics.
    pub loop_bound_hit: bool,
    /// A resource cap truncated the enumeration.
    pub caps_hit: bool,
}

/// The semantic denotation of a model: deduplicated traces in canonical
/// (lexicographic) order, plus truncation flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    pub traces: Vec<Trace>,
    pub flags: Flags,
}

impl TraceSet {
    /// Canonicalizes: sorts by event sequence then status, and merges
    /// traces whose events and status coincide.
    pub fn canonical(mut traces: Vec<Trace>, flags: Flags) -> TraceSet {
        traces.sort();
        traces.dedup_by(|a, b| a.events == b.events && a.status == b.status);
        TraceSet { traces, flags }
    }

    pub fn keys(&self) -> BTreeSet<(Vec<Event>, Status)> {
        self.traces.iter().map(Trace::key).collect()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Trace> {
        self.traces.iter()
    }
}

/// Bounds that keep the enumeration finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig {
    /// Maximum number of loop-body executions enumerated per loop.
    pub unroll_bound: u32,
    pub max_traces: usize,
    pub max_events_per_trace: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            unroll_bound: 3,
            max_traces: 10_000,
            max_events_per_trace: 1_000,
        }
    }
}

impl EnumConfig {
    pub fn with_unroll(unroll_bound: u32) -> Self {
        EnumConfig {
            unroll_bound,
            ..EnumConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("trace enumeration exceeded resource caps (partial set kept)")]
    TraceExplosion { partial: TraceSet },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Non-fatal findings recorded during enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// Both branches of this selection were pruned every time it was
    /// reached, so it never contributed a trace.
    EmptySelection { selection: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::EmptySelection { selection } => {
                write!(
                    f,
                    "selection `{selection}` had no enabled branch on any path"
                )
            }
        }
    }
}

/// Result of a successful enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub set: TraceSet,
    pub warnings: Vec<Warning>,
}

/// Enumerates the finalized trace set of the model's main activity,
/// starting from an empty environment.
pub fn enumerate_traces(
    model: &ResolvedModel,
    config: &EnumConfig,
) -> Result<Enumeration, SemanticsError> {
    let mut enumerator = Enumerator {
        model,
        config,
        loop_bound_hit: false,
        caps_hit: false,
        sel_stats: Vec::new(),
    };
    let initial = PathState {
        env: Env::new(),
        gen: UnknownGen::new(),
    };
    let partials = enumerator.enumerate(&model.model().main, &initial)?;

    let traces = partials
        .into_iter()
        .map(|p| Trace {
            events: p.events,
            // implicit success on normal completion of `main`
            status: match p.status {
                Status::Completed => Status::Succeeded,
                other => other,
            },
            final_env: p.state.env,
        })
        .collect();

    let flags = Flags {
        loop_bound_hit: enumerator.loop_bound_hit,
        caps_hit: enumerator.caps_hit,
    };
    let set = TraceSet::canonical(traces, flags);
    if flags.caps_hit {
        return Err(SemanticsError::TraceExplosion { partial: set });
    }
    let warnings = enumerator
        .sel_stats
        .iter()
        .filter(|(_, stat)| stat.reached > 0 && stat.nonempty == 0)
        .map(|(_, stat)| Warning::EmptySelection {
            selection: stat.rendering.clone(),
        })
        .collect();
    Ok(Enumeration { set, warnings })
}

/// All order-preserving merges of two event lists, as a set. For distinct
/// events the count is `C(|xs|+|ys|, |xs|)`.
pub fn interleavings(xs: &[Event], ys: &[Event]) -> Vec<Vec<Event>> {
    let mut out = BTreeSet::new();
    let mut acc = Vec::with_capacity(xs.len() + ys.len());
    let mut hit = false;
    merge_into(xs, ys, &mut acc, &mut out, usize::MAX, &mut hit);
    out.into_iter().collect()
}

/// Converts an intermediate trace set to the view seen outside an
/// encapsulation boundary: local success is absorbed, failure propagates.
pub fn encapsulate(ts: TraceSet) -> TraceSet {
    let traces = ts
        .traces
        .into_iter()
        .map(|mut t| {
            if t.status == Status::Succeeded {
                t.status = Status::Completed;
            }
            t
        })
        .collect();
    TraceSet::canonical(traces, ts.flags)
}

fn merge_into(
    xs: &[Event],
    ys: &[Event],
    acc: &mut Vec<Event>,
    out: &mut BTreeSet<Vec<Event>>,
    cap: usize,
    hit: &mut bool,
) {
    if out.len() >= cap {
        *hit = true;
        return;
    }
    match (xs.split_first(), ys.split_first()) {
        (None, None) => {
            out.insert(acc.clone());
        }
        (x, y) => {
            if let Some((head, rest)) = x {
                acc.push(head.clone());
                merge_into(rest, ys, acc, out, cap, hit);
                acc.pop();
            }
            if let Some((head, rest)) = y {
                acc.push(head.clone());
                merge_into(xs, rest, acc, out, cap, hit);
                acc.pop();
            }
        }
    }
}

#[derive(Debug, Clone)]
struct PathState {
    env: Env,
    gen: UnknownGen,
}

#[derive(Debug, Clone)]
struct Partial {
    events: Vec<Event>,
    status: Status,
    state: PathState,
}

struct SelStat {
    reached: u64,
    nonempty: u64,
    rendering: String,
}

struct Enumerator<'a> {
    model: &'a ResolvedModel,
    config: &'a EnumConfig,
    loop_bound_hit: bool,
    caps_hit: bool,
    // keyed by node address; insertion order is first-reach order
    sel_stats: Vec<(usize, SelStat)>,
}

impl<'a> Enumerator<'a> {
    fn push_capped(&mut self, out: &mut Vec<Partial>, partial: Partial) {
        if partial.events.len() > self.config.max_events_per_trace
            || out.len() >= self.config.max_traces
        {
            self.caps_hit = true;
            return;
        }
        out.push(partial);
    }

    fn enumerate(&mut self, act: &Activity, state: &PathState) -> Result<Vec<Partial>, EvalError> {
        match act {
            Activity::Empty => Ok(vec![leaf(state, Status::Completed)]),
            Activity::Succeed => Ok(vec![leaf(state, Status::Succeeded)]),
            Activity::Fail => Ok(vec![leaf(state, Status::Failed)]),

            Activity::TaskRef { name, overrides } => match self.model.resolution(name) {
                Resolution::Compound => {
                    let def = self
                        .model
                        .definition(name)
                        .expect("compound resolution implies a definition");
                    let DefBody::Compound(body) = &def.body else {
                        unreachable!("compound resolution points at a simple body");
                    };
                    let inner = self.enumerate(body, state)?;
                    Ok(absorb_success(inner))
                }
                resolution => {
                    let effective: &[crate::ast::Assignment] = match overrides {
                        Some(assigns) => assigns,
                        None => match resolution {
                            Resolution::DeclaredSimple => {
                                let def = self.model.definition(name).expect("declared simple");
                                let DefBody::Simple(defaults) = &def.body else {
                                    unreachable!();
                                };
                                defaults
                            }
                            _ => &[],
                        },
                    };
                    let mut gen = state.gen.clone();
                    let (env, applied) = apply_assignments(&state.env, effective, &mut gen)?;
                    Ok(vec![Partial {
                        events: vec![Event::Task {
                            name: name.clone(),
                            applied,
                        }],
                        status: Status::Completed,
                        state: PathState { env, gen },
                    }])
                }
            },

            Activity::Encapsulated(inner) => {
                let traces = self.enumerate(inner, state)?;
                Ok(absorb_success(traces))
            }

            Activity::Seq(first, rest) => {
                let firsts = self.enumerate(first, state)?;
                let mut out = Vec::new();
                for fa in firsts {
                    if fa.status != Status::Completed {
                        // early termination: the rest never runs
                        self.push_capped(&mut out, fa);
                        continue;
                    }
                    for fb in self.enumerate(rest, &fa.state)? {
                        let mut events = fa.events.clone();
                        events.extend(fb.events);
                        self.push_capped(
                            &mut out,
                            Partial {
                                events,
                                status: fb.status,
                                state: fb.state,
                            },
                        );
                    }
                }
                Ok(out)
            }

            Activity::Sel {
                left_guard,
                left,
                right_guard,
                right,
            } => {
                let mut gen = state.gen.clone();
                let lv = eval_opt_guard(left_guard, &state.env, &mut gen)?;
                let rv = eval_opt_guard(right_guard, &state.env, &mut gen)?;
                let branch_state = PathState {
                    env: state.env.clone(),
                    gen,
                };

                let mut out = Vec::new();
                for (verdict, guard, branch) in [(lv, left_guard, left), (rv, right_guard, right)] {
                    let prefix = match verdict {
                        Some(Tri::False) => continue,
                        Some(Tri::Unknown) => {
                            let g = guard.as_ref().expect("unknown verdict implies a guard");
                            Some(Event::Assume {
                                guard: g.expr.clone(),
                                polarity: true,
                            })
                        }
                        _ => None,
                    };
                    for sub in self.enumerate(branch, &branch_state)? {
                        let mut events = Vec::with_capacity(sub.events.len() + 1);
                        events.extend(prefix.clone());
                        events.extend(sub.events);
                        self.push_capped(
                            &mut out,
                            Partial {
                                events,
                                status: sub.status,
                                state: sub.state,
                            },
                        );
                    }
                }
                self.record_sel(act, out.is_empty());
                Ok(out)
            }

            Activity::Par(left, right) => {
                let lefts = self.enumerate(left, state)?;
                if lefts.is_empty() {
                    // no pairs can form, but the sibling is still part of
                    // the composition: enumerate it so its flags and
                    // errors surface regardless of operand order
                    self.enumerate(right, state)?;
                    return Ok(Vec::new());
                }
                let mut out = Vec::new();
                for la in &lefts {
                    // the sibling starts from the shared incoming env; the
                    // unknown counter continues past the left trace so
                    // symbols stay unique within each combined trace
                    let sibling_state = PathState {
                        env: state.env.clone(),
                        gen: la.state.gen.clone(),
                    };
                    for rb in self.enumerate(right, &sibling_state)? {
                        let status = join_status(la.status, rb.status);
                        let mut merges = BTreeSet::new();
                        let mut acc = Vec::new();
                        let budget = self.config.max_traces.saturating_sub(out.len()).max(1);
                        let mut hit = false;
                        merge_into(
                            &la.events,
                            &rb.events,
                            &mut acc,
                            &mut merges,
                            budget,
                            &mut hit,
                        );
                        if hit {
                            self.caps_hit = true;
                        }
                        for events in merges {
                            let env = replay(&state.env, &events);
                            self.push_capped(
                                &mut out,
                                Partial {
                                    events,
                                    status,
                                    state: PathState {
                                        env,
                                        gen: rb.state.gen.clone(),
                                    },
                                },
                            );
                        }
                    }
                }
                Ok(out)
            }

            Activity::Until { guard, body } => {
                let bound = self.config.unroll_bound;
                let mut out = Vec::new();
                let mut frontier = vec![leaf(state, Status::Completed)];
                if bound == 0 {
                    // the mandatory first body run is already out of budget
                    self.loop_bound_hit = true;
                    return Ok(out);
                }
                for iteration in 1..=bound {
                    let mut decisions = Vec::new();
                    for fa in std::mem::take(&mut frontier) {
                        for fb in self.enumerate(body, &fa.state)? {
                            let mut events = fa.events.clone();
                            events.extend(fb.events);
                            let partial = Partial {
                                events,
                                status: fb.status,
                                state: fb.state,
                            };
                            if partial.status == Status::Completed {
                                self.push_capped(&mut decisions, partial);
                            } else {
                                self.push_capped(&mut out, partial);
                            }
                        }
                    }
                    for d in decisions {
                        self.loop_decision(guard, d, iteration == bound, &mut out, &mut frontier)?;
                    }
                    if frontier.is_empty() {
                        break;
                    }
                }
                Ok(out)
            }

            Activity::While { guard, body } => {
                let bound = self.config.unroll_bound;
                let mut out = Vec::new();
                let mut frontier = vec![leaf(state, Status::Completed)];
                for iteration in 0..=bound {
                    let mut continuing = Vec::new();
                    for fa in std::mem::take(&mut frontier) {
                        self.loop_decision(
                            guard,
                            fa,
                            iteration == bound,
                            &mut out,
                            &mut continuing,
                        )?;
                    }
                    for c in continuing {
                        for fb in self.enumerate(body, &c.state)? {
                            let mut events = c.events.clone();
                            events.extend(fb.events);
                            let partial = Partial {
                                events,
                                status: fb.status,
                                state: fb.state,
                            };
                            if partial.status == Status::Completed {
                                self.push_capped(&mut frontier, partial);
                            } else {
                                self.push_capped(&mut out, partial);
                            }
                        }
                    }
                    if frontier.is_empty() {
                        break;
                    }
                }
                Ok(out)
            }
        }
    }

    /// One loop decision point: exit to `out` (completing the loop) or
    /// continue into `next`. The guard enables continuing; its negation
    /// enables exiting; an absent guard enables both.
    fn loop_decision(
        &mut self,
        guard: &Option<Guard>,
        partial: Partial,
        at_bound: bool,
        out: &mut Vec<Partial>,
        next: &mut Vec<Partial>,
    ) -> Result<(), EvalError> {
        let mut gen = partial.state.gen.clone();
        let verdict = eval_opt_guard(guard, &partial.state.env, &mut gen)?;
        let state = PathState {
            env: partial.state.env.clone(),
            gen,
        };
        let (exit, cont) = match verdict {
            None => (Some(None), Some(None)),
            Some(Tri::True) => (None, Some(None)),
            Some(Tri::False) => (Some(None), None),
            Some(Tri::Unknown) => {
                let expr = guard.as_ref().expect("unknown verdict implies a guard");
                (
                    Some(Some(Event::Assume {
                        guard: expr.expr.clone(),
                        polarity: false,
                    })),
                    Some(Some(Event::Assume {
                        guard: expr.expr.clone(),
                        polarity: true,
                    })),
                )
            }
        };
        if let Some(assume) = exit {
            let mut events = partial.events.clone();
            events.extend(assume);
            self.push_capped(
                out,
                Partial {
                    events,
                    status: Status::Completed,
                    state: state.clone(),
                },
            );
        }
        if let Some(assume) = cont {
            if at_bound {
                self.loop_bound_hit = true;
            } else {
                let mut events = partial.events;
                events.extend(assume);
                self.push_capped(
                    next,
                    Partial {
                        events,
                        status: Status::Completed,
                        state,
                    },
                );
            }
        }
        Ok(())
    }

    fn record_sel(&mut self, act: &Activity, empty: bool) {
        let key = act as *const Activity as usize;
        let idx = match self.sel_stats.iter().position(|(k, _)| *k == key) {
            Some(idx) => idx,
            None => {
                self.sel_stats.push((
                    key,
                    SelStat {
                        reached: 0,
                        nonempty: 0,
                        rendering: crate::pretty::print_activity(act),
                    },
                ));
                self.sel_stats.len() - 1
            }
        };
        let stat = &mut self.sel_stats[idx].1;
        stat.reached += 1;
        if !empty {
            stat.nonempty += 1;
        }
    }
}

fn leaf(state: &PathState, status: Status) -> Partial {
    Partial {
        events: vec![],
        status,
        state: state.clone(),
    }
}

fn absorb_success(traces: Vec<Partial>) -> Vec<Partial> {
    traces
        .into_iter()
        .map(|mut p| {
            if p.status == Status::Succeeded {
                p.status = Status::Completed;
            }
            p
        })
        .collect()
}

fn join_status(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Failed, _) | (_, Status::Failed) => Status::Failed,
        (Status::Succeeded, _) | (_, Status::Succeeded) => Status::Succeeded,
        _ => Status::Completed,
    }
}

fn eval_opt_guard(
    guard: &Option<Guard>,
    env: &Env,
    gen: &mut UnknownGen,
) -> Result<Option<Tri>, EvalError> {
    match guard {
        None => Ok(None),
        Some(g) => Ok(Some(eval_guard(env, &g.expr, gen)?)),
    }
}

/// Recomputes an environment by re-applying the already-evaluated task
/// postconditions of an event sequence, in order (last writer wins).
pub fn replay(initial: &Env, events: &[Event]) -> Env {
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

/// Binomial coefficient, used by tests validating interleaving counts.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u64 = 1;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}
