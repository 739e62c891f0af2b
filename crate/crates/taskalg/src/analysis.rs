//! Trace-set comparison between two models: equality, subset and
//! difference, with distinguishing traces as evidence.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::ResolvedModel;
use crate::semantics::{enumerate_traces, EnumConfig, Event, SemanticsError, Status, Trace};
use crate::state::Env;

/// How the two trace sets relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    /// The left set is a strict subset of the right.
    LeftSubset,
    /// The right set is a strict subset of the left.
    RightSubset,
    Incomparable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Equal => write!(f, "equal"),
            Relation::LeftSubset => write!(f, "left-subset"),
            Relation::RightSubset => write!(f, "right-subset"),
            Relation::Incomparable => write!(f, "incomparable"),
        }
    }
}

const SAMPLE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub relation: Relation,
    /// Traces only the left model produces (up to ten, canonical order).
    pub left_only: Vec<Trace>,
    /// Traces only the right model produces (up to ten, canonical order).
    pub right_only: Vec<Trace>,
    /// The two enumerations were truncated differently, so an apparent
    /// equality is not trustworthy.
    pub flags_differ: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompareOptions {
    /// Strip `Assume` events before comparing, so models differing only in
    /// recorded branch assumptions count as equal.
    pub ignore_assumes: bool,
}

/// Enumerates both models under the same configuration and compares the
/// trace sets by event sequence and status. An equality observed under
/// differing truncation flags is downgraded to `Incomparable`.
pub fn compare(
    left: &ResolvedModel,
    right: &ResolvedModel,
    config: &EnumConfig,
    options: CompareOptions,
) -> Result<ComparisonReport, SemanticsError> {
    let lhs = enumerate_traces(left, config)?.set;
    let rhs = enumerate_traces(right, config)?.set;

    let project = |events: &[Event]| -> Vec<Event> {
        if options.ignore_assumes {
            events
                .iter()
                .filter(|e| !matches!(e, Event::Assume { .. }))
                .cloned()
                .collect()
        } else {
            events.to_vec()
        }
    };
    let left_keys: BTreeSet<(Vec<Event>, Status)> =
        lhs.iter().map(|t| (project(&t.events), t.status)).collect();
    let right_keys: BTreeSet<(Vec<Event>, Status)> =
        rhs.iter().map(|t| (project(&t.events), t.status)).collect();

    let flags_differ = lhs.flags != rhs.flags;
    let sample = |only: BTreeSet<&(Vec<Event>, Status)>| -> Vec<Trace> {
        only.into_iter()
            .take(SAMPLE_CAP)
            .map(|(events, status)| Trace {
                events: events.clone(),
                status: *status,
                final_env: Env::new(),
            })
            .collect()
    };
    let left_only = sample(left_keys.difference(&right_keys).collect());
    let right_only = sample(right_keys.difference(&left_keys).collect());

    let relation = match (left_only.is_empty(), right_only.is_empty()) {
        (true, true) if flags_differ => Relation::Incomparable,
        (true, true) => Relation::Equal,
        (true, false) => Relation::LeftSubset,
        (false, true) => Relation::RightSubset,
        (false, false) => Relation::Incomparable,
    };

    Ok(ComparisonReport {
        relation,
        left_only,
        right_only,
        flags_differ,
    })
}
