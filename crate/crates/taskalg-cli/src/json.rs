//! JSON views of trace sets and verdicts.
//!
//! Schema, version 1:
//!
//! ```json
//! {
//!   "traces": [
//!     { "events": [ {"task": "t", "assigns": {"x": VALUE}}
//!                 | {"assume": "guard rendering", "polarity": true} ],
//!       "status": "succeeded" | "failed" }
//!   ],
//!   "flags": { "loop_bound_hit": false, "caps_hit": false },
//!   "version": 1
//! }
//! ```
//!
//! Values encode as `{"type": "int"|"bool"|"str"|"unknown", "value": ...}`.
//! Assign maps keep application order. `trace_set_from_json` reverses the
//! encoding exactly; assume guards are parsed back from their rendering.

use serde_json::{json, Map, Value as Json};

use taskalg::modelcheck::Verdict;
use taskalg::semantics::{replay, Event, Flags, Status, Trace, TraceSet};
use taskalg::state::{Env, Value};

pub fn trace_set_to_json(ts: &TraceSet) -> Json {
    json!({
        "traces": ts.iter().map(trace_to_json).collect::<Vec<_>>(),
        "flags": {
            "loop_bound_hit": ts.flags.loop_bound_hit,
            "caps_hit": ts.flags.caps_hit,
        },
        "version": 1,
    })
}

pub fn trace_to_json(trace: &Trace) -> Json {
    json!({
        "events": trace.events.iter().map(event_to_json).collect::<Vec<_>>(),
        "status": match trace.status {
            Status::Succeeded => "succeeded",
            Status::Failed => "failed",
            Status::Completed => "completed",
        },
    })
}

fn event_to_json(event: &Event) -> Json {
    match event {
        Event::Task { name, applied } => {
            let mut assigns = Map::new();
            for (target, value) in applied {
                assigns.insert(target.clone(), value_to_json(value));
            }
            json!({ "task": name, "assigns": assigns })
        }
        Event::Assume { guard, polarity } => {
            json!({ "assume": guard.to_string(), "polarity": polarity })
        }
    }
}

fn value_to_json(value: &Value) -> Json {
    match value {
        Value::Int(i) => json!({ "type": "int", "value": i }),
        Value::Bool(b) => json!({ "type": "bool", "value": b }),
        Value::Str(s) => json!({ "type": "str", "value": s }),
        Value::Unknown(sym) => json!({ "type": "unknown", "value": sym }),
    }
}

pub fn verdict_to_json(verdict: &Verdict) -> Json {
    json!({
        "holds": verdict.holds,
        "assumption_dependent": verdict.assumption_dependent,
        "evidence": verdict.evidence.as_ref().map(trace_to_json),
        "version": 1,
    })
}

/// Rebuilds a trace set from its JSON form. Final environments are
/// recovered by replaying the recorded postconditions, which is exactly
/// how the enumerator computes them.
pub fn trace_set_from_json(text: &str) -> Result<TraceSet, String> {
    let root: Json = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let version = root.get("version").and_then(Json::as_u64);
    if version != Some(1) {
        return Err(format!("unsupported trace format version {version:?}"));
    }
    let flags = Flags {
        loop_bound_hit: bool_field(&root, "/flags/loop_bound_hit")?,
        caps_hit: bool_field(&root, "/flags/caps_hit")?,
    };
    let mut traces = Vec::new();
    for entry in root
        .get("traces")
        .and_then(Json::as_array)
        .ok_or("missing traces array")?
    {
        traces.push(trace_from_json(entry)?);
    }
    Ok(TraceSet::canonical(traces, flags))
}

fn bool_field(root: &Json, pointer: &str) -> Result<bool, String> {
    root.pointer(pointer)
        .and_then(Json::as_bool)
        .ok_or_else(|| format!("missing boolean at {pointer}"))
}

fn trace_from_json(entry: &Json) -> Result<Trace, String> {
    let status = match entry.get("status").and_then(Json::as_str) {
        Some("succeeded") => Status::Succeeded,
        Some("failed") => Status::Failed,
        other => return Err(format!("bad status {other:?}")),
    };
    let mut events = Vec::new();
    for raw in entry
        .get("events")
        .and_then(Json::as_array)
        .ok_or("missing events array")?
    {
        events.push(event_from_json(raw)?);
    }
    let final_env = replay(&Env::new(), &events);
    Ok(Trace {
        events,
        status,
        final_env,
    })
}

fn event_from_json(raw: &Json) -> Result<Event, String> {
    if let Some(name) = raw.get("task").and_then(Json::as_str) {
        let mut applied = Vec::new();
        if let Some(assigns) = raw.get("assigns").and_then(Json::as_object) {
            for (target, value) in assigns {
                applied.push((target.clone(), value_from_json(value)?));
            }
        }
        return Ok(Event::Task {
            name: name.to_string(),
            applied,
        });
    }
    if let Some(rendering) = raw.get("assume").and_then(Json::as_str) {
        let polarity = raw
            .get("polarity")
            .and_then(Json::as_bool)
            .ok_or("assume event without polarity")?;
        let guard = parse_guard_expr(rendering)?;
        return Ok(Event::Assume { guard, polarity });
    }
    Err(format!("unrecognized event {raw}"))
}

fn parse_guard_expr(rendering: &str) -> Result<taskalg::ast::Expr, String> {
    // reuse the model grammar: a guard is exactly `[expr]`
    let activity = taskalg::parse_activity(&format!("x[{rendering}] + y"))
        .map_err(|e| format!("bad assume rendering {rendering:?}: {e}"))?;
    match activity {
        taskalg::Activity::Sel {
            left_guard: Some(guard),
            ..
        } => Ok(guard.expr),
        _ => Err(format!("bad assume rendering {rendering:?}")),
    }
}

fn value_from_json(raw: &Json) -> Result<Value, String> {
    let kind = raw.get("type").and_then(Json::as_str);
    let value = raw.get("value").ok_or("value without payload")?;
    match kind {
        Some("int") => value
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| format!("bad int {value}")),
        Some("bool") => value
            .as_bool()
            .map(Value::Bool)
            .ok_or_else(|| format!("bad bool {value}")),
        Some("str") => value
            .as_str()
            .map(|s| Value::Str(s.to_string()))
            .ok_or_else(|| format!("bad str {value}")),
        Some("unknown") => value
            .as_str()
            .map(|s| Value::Unknown(s.to_string()))
            .ok_or_else(|| format!("bad unknown {value}")),
        other => Err(format!("bad value type {other:?}")),
    }
}
