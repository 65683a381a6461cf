//! Single-step substitution-model reduction.
//!
//! Two reducers live here. [`reduce_simple`] works on erased trees and
//! serves as the reference relation. [`reduce_step`] performs the same
//! reduction on identity-bearing [`Expr`](crate::syntax::Expr) trees and
//! additionally records, in a [`ProvenanceStore`], which nodes of the result
//! came from which nodes of the input.

mod context;
mod datum;
mod primitives;
mod provenance;
mod simple;
mod step;
mod trace;

use thiserror::Error;

pub use context::{Binding, EvaluationContext, LoadError, PrimitiveFn};
pub use datum::{erase, materialize, Datum};
pub use provenance::{ProvenanceStore, SymmetryViolation};
pub use simple::reduce_simple;
pub use step::{
    apply_primitive, bind_parameters, counterpart, deep_copy, reduce_step, self_evaluating,
    substitute, transfer_heritage, Bound, ParamBinding, StepResult,
};
pub use trace::{reduction_trace, ReductionTrace, Snapshot, TraceError, DEFAULT_MAX_STEPS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("undefined symbol: {0}")]
    UndefinedSymbol(String),
    #[error("{op}: {message}")]
    Primitive { op: String, message: String },
    #[error("Macros not supported (yet): {0}")]
    MacroNotSupported(String),
    #[error("wrong number of arguments: expected {expected}, got {got}")]
    Arity { expected: String, got: usize },
    #[error("malformed {0}")]
    Malformed(String),
}
