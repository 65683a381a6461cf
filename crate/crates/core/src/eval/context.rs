use std::collections::HashMap;

use thiserror::Error;

use super::{primitives, Datum};
use crate::syntax::{Atom, Expr, ListNode};

pub type PrimitiveFn = fn(&[Datum]) -> Result<Datum, String>;

#[derive(Debug, Clone)]
pub enum Binding {
    Primitive(PrimitiveFn),
    Definition(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot load {form}: {reason}")]
pub struct LoadError {
    pub form: String,
    pub reason: String,
}

/// Name to definition/primitive environment.
#[derive(Debug, Clone, Default)]
pub struct EvaluationContext {
    definitions: HashMap<String, Binding>,
}

impl EvaluationContext {
    /// An empty context with no bindings at all.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Arithmetic and comparison primitives.
    pub fn with_defaults() -> Self {
        let mut ctx = Self::empty();
        let table: [(&str, PrimitiveFn); 11] = [
            ("+", primitives::add),
            ("-", primitives::sub),
            ("*", primitives::mul),
            ("/", primitives::div),
            ("<", primitives::lt),
            ("<=", primitives::le),
            (">", primitives::gt),
            (">=", primitives::ge),
            ("=", primitives::num_eq),
            ("eq?", primitives::eqv),
            ("eqv?", primitives::eqv),
        ];
        for (name, f) in table {
            ctx.define(name, Binding::Primitive(f));
        }
        ctx
    }

    pub fn define(&mut self, name: &str, binding: Binding) {
        self.definitions.insert(name.to_string(), binding);
    }

    pub fn defines(&self, symbol: &str) -> bool {
        self.definitions.contains_key(symbol)
    }

    pub fn is_primitive(&self, symbol: &str) -> bool {
        matches!(self.definitions.get(symbol), Some(Binding::Primitive(_)))
    }

    pub fn defines_macro(&self, _symbol: &str) -> bool {
        false
    }

    pub fn value(&self, symbol: &str) -> Option<&Binding> {
        self.definitions.get(symbol)
    }

    pub fn primitive(&self, symbol: &str) -> Option<PrimitiveFn> {
        match self.definitions.get(symbol) {
            Some(Binding::Primitive(f)) => Some(*f),
            _ => None,
        }
    }

    pub fn definition(&self, symbol: &str) -> Option<&Expr> {
        match self.definitions.get(symbol) {
            Some(Binding::Definition(e)) => Some(e),
            _ => None,
        }
    }

    /// Installs top-level `define` forms. Later definitions of a name replace earlier ones.
    pub fn load_prelude(&mut self, defs: &[Expr]) -> Result<(), LoadError> {
        for form in defs {
            let (name, value) = parse_define(form).map_err(|reason| LoadError {
                form: form.print(),
                reason,
            })?;
            self.define(&name, Binding::Definition(value));
        }
        Ok(())
    }
}

fn parse_define(form: &Expr) -> Result<(String, Expr), String> {
    let Some([target, value]) = form.special_form("define", 2) else {
        return Err("expected (define name expr) or (define (name args...) body)".to_string());
    };
    match target {
        Expr::Atom(a) => a
            .value()
            .as_symbol()
            .map(|name| (name.to_string(), value.clone()))
            .ok_or_else(|| format!("cannot define non-symbol {}", a.text())),
        Expr::List(head) => {
            let name = head
                .children()
                .first()
                .and_then(Expr::as_symbol)
                .ok_or("function name must be a symbol")?;
            let params = &head.children()[1..];
            let args: Expr = match head.tail() {
                None => ListNode::new(params.to_vec()).into(),
                Some(rest) if params.is_empty() => rest.clone(),
                Some(rest) => ListNode::dotted(params.to_vec(), rest.clone()).into(),
            };
            let lambda = ListNode::new(vec![Atom::symbol("lambda").into(), args, value.clone()]);
            Ok((name.to_string(), lambda.into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::erase;
    use crate::syntax::{parse_all, parse_expr};

    #[test]
    fn defaults() {
        let ctx = EvaluationContext::with_defaults();
        let plus = ctx.primitive("+").unwrap();
        assert_eq!(
            plus(&[
                erase(&parse_expr("2").unwrap()),
                erase(&parse_expr("3").unwrap())
            ]),
            Ok(erase(&parse_expr("5").unwrap()))
        );
        assert!(!ctx.defines("!"));
        assert!(ctx.is_primitive("<="));
        assert!(!ctx.defines_macro("+"));
    }

    #[test]
    fn function_define_becomes_lambda() {
        let mut ctx = EvaluationContext::with_defaults();
        let defs = parse_all("(define (! n) (if (<= n 1) 1 (* n (! (- n 1)))))").unwrap();
        ctx.load_prelude(&defs).unwrap();
        let def = ctx.definition("!").unwrap();
        assert_eq!(
            erase(def).to_string(),
            "(lambda (n) (if (<= n 1) 1 (* n (! (- n 1)))))"
        );
        assert!(ctx.defines("!") && !ctx.is_primitive("!"));
    }

    #[test]
    fn variadic_define() {
        let mut ctx = EvaluationContext::empty();
        ctx.load_prelude(&parse_all("(define (f a . r) r) (define (g . r) r)").unwrap())
            .unwrap();
        assert_eq!(
            erase(ctx.definition("f").unwrap()).to_string(),
            "(lambda (a . r) r)"
        );
        assert_eq!(
            erase(ctx.definition("g").unwrap()).to_string(),
            "(lambda r r)"
        );
    }

    #[test]
    fn value_define_and_redefinition() {
        let mut ctx = EvaluationContext::empty();
        ctx.load_prelude(&parse_all("(define x 5) (define x 6)").unwrap())
            .unwrap();
        assert_eq!(erase(ctx.definition("x").unwrap()).to_string(), "6");
    }

    #[test]
    fn malformed_define_names_the_form() {
        let mut ctx = EvaluationContext::empty();
        let err = ctx
            .load_prelude(&parse_all("(define x)").unwrap())
            .unwrap_err();
        assert_eq!(err.form, "(define x)");
        assert!(ctx.load_prelude(&parse_all("(+ 1 2)").unwrap()).is_err());
        assert!(ctx
            .load_prelude(&parse_all("(define (1 x) x)").unwrap())
            .is_err());
    }
}
