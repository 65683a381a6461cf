//! The reference reducer: one reduction per call on erased trees, no
//! provenance. [`reduce_step`](super::reduce_step) must agree with it.

use super::{Datum, EvalError, EvaluationContext};
use crate::eval::erase;
use crate::syntax::Value;

/// Performs a single leftmost reduction on an erased tree. Returns an equal
/// tree when `expr` is in normal form.
pub fn reduce_simple(expr: &Datum, ctx: &EvaluationContext) -> Result<Datum, EvalError> {
    if let Some([test, then, otherwise]) = expr.special_form("if", 3) {
        if test.is_false() {
            return Ok(otherwise.clone());
        }
        let reduced = reduce_simple(test, ctx)?;
        return Ok(if reduced == *test {
            then.clone()
        } else {
            Datum::list(vec![
                Datum::symbol("if"),
                reduced,
                then.clone(),
                otherwise.clone(),
            ])
        });
    }
    if expr.special_form("lambda", 2).is_some() || expr.special_form("quote", 1).is_some() {
        return Ok(expr.clone());
    }
    match expr {
        Datum::List(items, tail) if !items.is_empty() => {
            reduce_combination(expr, &items[0], &items[1..], tail.as_deref(), ctx)
        }
        Datum::Atom(Value::Symbol(name)) => match ctx.definition(name) {
            Some(def) => Ok(erase(def)),
            None if ctx.is_primitive(name) => Ok(expr.clone()),
            None => Err(EvalError::UndefinedSymbol(name.clone())),
        },
        _ => Ok(expr.clone()),
    }
}

fn reduce_combination(
    expr: &Datum,
    operator: &Datum,
    operands: &[Datum],
    tail: Option<&Datum>,
    ctx: &EvaluationContext,
) -> Result<Datum, EvalError> {
    if let Some(name) = operator.as_symbol() {
        if ctx.defines_macro(name) {
            return Err(EvalError::MacroNotSupported(name.to_string()));
        }
    }
    if let Some((operands, tail)) = reduce_operands(operands, tail, ctx)? {
        let mut items = vec![operator.clone()];
        items.extend(operands);
        return Ok(Datum::List(items, tail.map(Box::new)));
    }
    if let Some(name) = operator.as_symbol() {
        if let Some(f) = ctx.primitive(name) {
            if tail.is_some() {
                return Err(EvalError::Malformed(format!("application {expr}")));
            }
            let args: Vec<Datum> = operands.iter().map(Datum::project).collect();
            return f(&args).map_err(|message| EvalError::Primitive {
                op: name.to_string(),
                message,
            });
        }
        return match ctx.definition(name) {
            Some(def) => {
                let def = erase(def);
                match def.special_form("lambda", 2) {
                    Some([params, body]) => apply_lambda(params, body, operands, tail),
                    _ => {
                        let mut items = vec![def];
                        items.extend_from_slice(operands);
                        Ok(Datum::List(items, tail.cloned().map(Box::new)))
                    }
                }
            }
            None => Ok(expr.clone()),
        };
    }
    if let Some([params, body]) = operator.special_form("lambda", 2) {
        return apply_lambda(params, body, operands, tail);
    }
    match operator {
        Datum::List(items, _) if !items.is_empty() => {
            let mut out = vec![reduce_simple(operator, ctx)?];
            out.extend_from_slice(operands);
            Ok(Datum::List(out, tail.cloned().map(Box::new)))
        }
        _ => Ok(expr.clone()),
    }
}

/// Reduces the first reducible operand, left to right, then the dotted tail.
/// `None` when nothing changed.
#[allow(clippy::type_complexity)]
fn reduce_operands(
    operands: &[Datum],
    tail: Option<&Datum>,
    ctx: &EvaluationContext,
) -> Result<Option<(Vec<Datum>, Option<Datum>)>, EvalError> {
    for (i, operand) in operands.iter().enumerate() {
        let reduced = reduce_simple(operand, ctx)?;
        if reduced != *operand {
            let mut out = operands.to_vec();
            out[i] = reduced;
            return Ok(Some((out, tail.cloned())));
        }
    }
    if let Some(tail) = tail {
        let reduced = reduce_simple(tail, ctx)?;
        if reduced != *tail {
            return Ok(Some((operands.to_vec(), Some(reduced))));
        }
    }
    Ok(None)
}

enum Bound {
    One(Datum),
    Rest(Vec<Datum>),
}

fn apply_lambda(
    params: &Datum,
    body: &Datum,
    operands: &[Datum],
    tail: Option<&Datum>,
) -> Result<Datum, EvalError> {
    if tail.is_some() {
        return Err(EvalError::Malformed("improper argument list".to_string()));
    }
    let bindings = bind(params, operands)?;
    Ok(substitute(&bindings, body))
}

fn bind(params: &Datum, operands: &[Datum]) -> Result<Vec<(String, Bound)>, EvalError> {
    let symbol = |d: &Datum| {
        d.as_symbol()
            .map(str::to_string)
            .ok_or_else(|| EvalError::Malformed(format!("parameter {d}")))
    };
    match params {
        Datum::Atom(_) => Ok(vec![(symbol(params)?, Bound::Rest(operands.to_vec()))]),
        Datum::List(names, rest) => {
            let arity_ok = match rest {
                None => operands.len() == names.len(),
                Some(_) => operands.len() >= names.len(),
            };
            if !arity_ok {
                return Err(EvalError::Arity {
                    expected: format!("{}{}", names.len(), if rest.is_some() { "+" } else { "" }),
                    got: operands.len(),
                });
            }
            let mut out = Vec::with_capacity(names.len() + 1);
            for (name, value) in names.iter().zip(operands) {
                out.push((symbol(name)?, Bound::One(value.clone())));
            }
            if let Some(rest) = rest {
                out.push((symbol(rest)?, Bound::Rest(operands[names.len()..].to_vec())));
            }
            Ok(out)
        }
    }
}

fn param_names(params: &Datum) -> Vec<&str> {
    match params {
        Datum::Atom(v) => v.as_symbol().into_iter().collect(),
        Datum::List(names, rest) => names
            .iter()
            .chain(rest.as_deref())
            .filter_map(Datum::as_symbol)
            .collect(),
    }
}

fn self_evaluating(d: &Datum) -> bool {
    match d {
        Datum::Atom(v) => !matches!(v, Value::Symbol(_)),
        Datum::List(..) => d.special_form("lambda", 2).is_some(),
    }
}

fn quote(d: Datum) -> Datum {
    Datum::list(vec![Datum::symbol("quote"), d])
}

fn substitute(bindings: &[(String, Bound)], expr: &Datum) -> Datum {
    if expr.special_form("quote", 1).is_some() {
        return expr.clone();
    }
    if let Some([params, body]) = expr.special_form("lambda", 2) {
        let shadowed = param_names(params);
        let visible: Vec<_> = bindings
            .iter()
            .filter(|(name, _)| !shadowed.contains(&name.as_str()))
            .map(|(name, b)| {
                let b = match b {
                    Bound::One(v) => Bound::One(v.clone()),
                    Bound::Rest(vs) => Bound::Rest(vs.clone()),
                };
                (name.clone(), b)
            })
            .collect();
        return Datum::list(vec![
            Datum::symbol("lambda"),
            params.clone(),
            substitute(&visible, body),
        ]);
    }
    match expr {
        Datum::List(items, tail) => Datum::List(
            items.iter().map(|d| substitute(bindings, d)).collect(),
            tail.as_ref().map(|t| Box::new(substitute(bindings, t))),
        ),
        Datum::Atom(Value::Symbol(name)) => {
            match bindings.iter().find(|(n, _)| n == name).map(|(_, b)| b) {
                Some(Bound::One(v)) if self_evaluating(v) => v.clone(),
                Some(Bound::One(v)) => quote(v.clone()),
                Some(Bound::Rest(vs)) => quote(Datum::list(vs.clone())),
                None => expr.clone(),
            }
        }
        _ => expr.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_all, parse_expr};

    const FACTORIAL: &str = "(define (! n) (if (<= n 1) 1 (* n (! (- n 1)))))";

    fn ctx() -> EvaluationContext {
        let mut ctx = EvaluationContext::with_defaults();
        ctx.load_prelude(&parse_all(FACTORIAL).unwrap()).unwrap();
        ctx
    }

    fn step(src: &str) -> String {
        reduce_simple(&erase(&parse_expr(src).unwrap()), &ctx())
            .unwrap()
            .to_string()
    }

    #[test]
    fn unfolds_factorial() {
        assert_eq!(step("(! 5)"), "(if (<= 5 1) 1 (* 5 (! (- 5 1))))");
        assert_eq!(
            step("(if (<= 5 1) 1 (* 5 (! (- 5 1))))"),
            "(if #false 1 (* 5 (! (- 5 1))))"
        );
        assert_eq!(step("(if #false 1 (* 5 (! (- 5 1))))"), "(* 5 (! (- 5 1)))");
    }

    #[test]
    fn normal_forms() {
        assert_eq!(step("(quote (a b))"), "(quote (a b))");
        assert_eq!(step("(lambda (x) (+ x 1))"), "(lambda (x) (+ x 1))");
        assert_eq!(step("7"), "7");
        assert_eq!(step("()"), "()");
        assert_eq!(step("(f 1)"), "(f 1)");
    }

    #[test]
    fn operands_reduce_left_to_right() {
        assert_eq!(step("(+ (* 1 2) (* 3 4))"), "(+ 2 (* 3 4))");
        assert_eq!(step("(+ 2 (* 3 4))"), "(+ 2 12)");
    }

    #[test]
    fn true_test_selects_then() {
        assert_eq!(step("(if #t 1 2)"), "1");
        assert_eq!(step("(if 0 1 2)"), "1");
    }

    #[test]
    fn lambda_application_quotes_non_self_evaluating_values() {
        assert_eq!(
            step("((lambda (x) x) (quote (a b)))"),
            "(quote (quote (a b)))"
        );
        assert_eq!(
            step("((lambda (f) (f 1)) (lambda (y) y))"),
            "((lambda (y) y) 1)"
        );
        assert_eq!(step("((lambda (a . r) r) 1 2 3)"), "(quote (2 3))");
        assert_eq!(step("((lambda r r) 1 2)"), "(quote (1 2))");
    }

    #[test]
    fn shadowing() {
        assert_eq!(step("((lambda (x) (lambda (x) x)) 1)"), "(lambda (x) x)");
        assert_eq!(step("((lambda (x) (lambda (y) x)) 1)"), "(lambda (y) 1)");
    }

    #[test]
    fn errors() {
        let c = ctx();
        let run = |s: &str| reduce_simple(&erase(&parse_expr(s).unwrap()), &c);
        assert_eq!(run("y"), Err(EvalError::UndefinedSymbol("y".into())));
        assert!(matches!(run("(/ 1 0)"), Err(EvalError::Primitive { .. })));
        assert!(matches!(
            run("((lambda (x) x))"),
            Err(EvalError::Arity { .. })
        ));
        assert!(matches!(
            run("((lambda (x) x) 1 2)"),
            Err(EvalError::Arity { .. })
        ));
    }
}
