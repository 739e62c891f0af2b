//! Task flow algebra: a textual DSL for task flow models with a trace-set
//! semantics, LTL/CTL model checking over the generated traces, and
//! trace-set comparison between models.
//!
//! The pipeline is: [`parser::parse_model`] → [`ast::resolve`] →
//! [`semantics::enumerate_traces`], after which the trace set can be
//! checked ([`modelcheck`]) or compared against another model
//! ([`analysis`]).

pub mod analysis;
pub mod ast;
pub mod lexer;
pub mod modelcheck;
pub mod parser;
pub mod pretty;
pub mod semantics;
pub mod state;

pub use ast::{resolve, Activity, Model, ResolvedModel};
pub use parser::{parse_activity, parse_model, ParseDiagnostic};
pub use semantics::{enumerate_traces, EnumConfig, Event, Status, Trace, TraceSet};
pub use state::{Env, Tri, Value};
