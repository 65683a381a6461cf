//! Lazily computed sequences of reduction steps.

use thiserror::Error;

use super::{erase, reduce_step, EvalError, EvaluationContext, ProvenanceStore};
use crate::syntax::Expr;

pub const DEFAULT_MAX_STEPS: usize = 1000;

/// One expression of a trace, with the links from its predecessor.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub expr: Expr,
    /// `None` for the initial expression.
    pub provenance: Option<ProvenanceStore>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {error}")]
pub struct TraceError {
    /// Index of the snapshot that failed to reduce.
    pub step: usize,
    pub error: EvalError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum State {
    Open,
    Fixpoint,
    Truncated,
    Failed(TraceError),
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    ctx: EvaluationContext,
    max_steps: usize,
    snapshots: Vec<Snapshot>,
    state: State,
}

/// Starts a trace at `expr`. Steps are computed on demand.
pub fn reduction_trace(expr: Expr, ctx: &EvaluationContext, max_steps: usize) -> ReductionTrace {
    ReductionTrace {
        ctx: ctx.clone(),
        max_steps,
        snapshots: vec![Snapshot {
            expr,
            provenance: None,
        }],
        state: State::Open,
    }
}

impl ReductionTrace {
    /// Computes one more snapshot. Returns false once the trace has ended.
    fn extend(&mut self) -> bool {
        if self.state != State::Open {
            return false;
        }
        let last = &self.snapshots[self.snapshots.len() - 1].expr;
        let step = self.snapshots.len() - 1;
        match reduce_step(last, &self.ctx) {
            Ok(r) if erase(&r.expr) == erase(last) => {
                self.state = State::Fixpoint;
                false
            }
            Ok(_) if step >= self.max_steps => {
                self.state = State::Truncated;
                false
            }
            Ok(r) => {
                self.snapshots.push(Snapshot {
                    expr: r.expr,
                    provenance: Some(r.provenance),
                });
                true
            }
            Err(_) if step >= self.max_steps => {
                self.state = State::Truncated;
                false
            }
            Err(error) => {
                self.state = State::Failed(TraceError { step, error });
                false
            }
        }
    }

    /// Makes sure snapshot `index` is computed if the trace reaches it.
    pub fn ensure(&mut self, index: usize) -> bool {
        while self.snapshots.len() <= index {
            if !self.extend() {
                return false;
            }
        }
        true
    }

    /// Computes every remaining snapshot.
    pub fn run_to_end(&mut self) {
        while self.extend() {}
    }

    /// Number of snapshots computed so far.
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> Option<&Snapshot> {
        self.snapshots.get(index)
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn last(&self) -> &Snapshot {
        &self.snapshots[self.snapshots.len() - 1]
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn context(&self) -> &EvaluationContext {
        &self.ctx
    }

    /// True once no further snapshots will be produced.
    pub fn is_finished(&self) -> bool {
        self.state != State::Open
    }

    pub fn reached_fixpoint(&self) -> bool {
        self.state == State::Fixpoint
    }

    pub fn is_truncated(&self) -> bool {
        self.state == State::Truncated
    }

    pub fn error(&self) -> Option<&TraceError> {
        match &self.state {
            State::Failed(e) => Some(e),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_all, parse_expr};

    fn factorial_ctx() -> EvaluationContext {
        let mut ctx = EvaluationContext::with_defaults();
        ctx.load_prelude(&parse_all("(define (! n) (if (<= n 1) 1 (* n (! (- n 1)))))").unwrap())
            .unwrap();
        ctx
    }

    fn factorial(n: u64) -> u64 {
        (1..=n).product()
    }

    #[test]
    fn factorial_reaches_its_value() {
        let mut t = reduction_trace(
            parse_expr("(! 5)").unwrap(),
            &factorial_ctx(),
            DEFAULT_MAX_STEPS,
        );
        t.run_to_end();
        assert!(t.reached_fixpoint());
        assert_eq!(t.last().expr.print(), factorial(5).to_string());
        assert!(t.get(0).unwrap().provenance.is_none());
        assert!(t.snapshots()[1..].iter().all(|s| s.provenance.is_some()));
    }

    #[test]
    fn value_is_immediately_a_fixpoint() {
        let mut t = reduction_trace(parse_expr("7").unwrap(), &factorial_ctx(), 10);
        t.run_to_end();
        assert_eq!(t.len(), 1);
        assert!(t.reached_fixpoint());
    }

    #[test]
    fn diverging_term_is_truncated() {
        let mut ctx = factorial_ctx();
        ctx.load_prelude(&parse_all("(define (f x) (f x)) (define (g) (g))").unwrap())
            .unwrap();
        let mut t = reduction_trace(parse_expr("((lambda (x) (f x)) (g))").unwrap(), &ctx, 50);
        t.run_to_end();
        assert!(t.is_truncated());
        assert!(!t.reached_fixpoint());
        assert_eq!(t.len(), 51);
    }

    #[test]
    fn cap_reached_exactly_at_fixpoint_is_not_truncation() {
        let mut t = reduction_trace(parse_expr("(+ 1 2)").unwrap(), &factorial_ctx(), 1);
        t.run_to_end();
        assert_eq!(t.len(), 2);
        assert!(t.reached_fixpoint());
        let mut t = reduction_trace(parse_expr("(+ 1 2)").unwrap(), &factorial_ctx(), 0);
        t.run_to_end();
        assert_eq!(t.len(), 1);
        assert!(t.is_truncated());
    }

    #[test]
    fn errors_carry_the_step() {
        let mut t = reduction_trace(parse_expr("(+ 1 (/ 2 0))").unwrap(), &factorial_ctx(), 10);
        t.run_to_end();
        let e = t.error().unwrap();
        assert_eq!(e.step, 0);
        assert!(matches!(e.error, EvalError::Primitive { .. }));
    }

    #[test]
    fn lazy_extension() {
        let mut t = reduction_trace(parse_expr("(! 3)").unwrap(), &factorial_ctx(), 100);
        assert_eq!(t.len(), 1);
        assert!(t.ensure(2));
        assert_eq!(t.len(), 3);
        assert!(!t.is_finished());
        assert!(!t.ensure(10_000));
        assert!(t.reached_fixpoint());
    }
}
