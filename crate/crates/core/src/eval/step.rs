//! The reducer that tracks where every node of the result came from.

use std::collections::HashSet;

use super::{erase, materialize, EvalError, EvaluationContext, ProvenanceStore};
use crate::syntax::{Atom, Expr, ListNode};

/// The outcome of one reduction step.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub expr: Expr,
    pub provenance: ProvenanceStore,
}

/// What a lambda parameter is bound to during substitution.
#[derive(Debug, Clone, Copy)]
pub enum Bound<'a> {
    One(&'a Expr),
    /// A dotted rest parameter takes the remaining operands.
    Rest(&'a [Expr]),
}

#[derive(Debug, Clone, Copy)]
pub struct ParamBinding<'a> {
    pub param: &'a Atom,
    pub value: Bound<'a>,
}

impl ParamBinding<'_> {
    fn name(&self) -> &str {
        self.param.value().as_symbol().unwrap_or_default()
    }
}

/// Pairs the parameter list of a lambda with its operands, checking arity.
pub fn bind_parameters<'a>(
    params: &'a Expr,
    operands: &'a [Expr],
) -> Result<Vec<ParamBinding<'a>>, EvalError> {
    let symbol = |e: &'a Expr| match e {
        Expr::Atom(a) if a.value().as_symbol().is_some() => Ok(a),
        _ => Err(EvalError::Malformed(format!("parameter {e}"))),
    };
    match params {
        Expr::Atom(_) => Ok(vec![ParamBinding {
            param: symbol(params)?,
            value: Bound::Rest(operands),
        }]),
        Expr::List(list) => {
            let names = list.children();
            let rest = list.tail();
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
                out.push(ParamBinding {
                    param: symbol(name)?,
                    value: Bound::One(value),
                });
            }
            if let Some(rest) = rest {
                out.push(ParamBinding {
                    param: symbol(rest)?,
                    value: Bound::Rest(&operands[names.len()..]),
                });
            }
            Ok(out)
        }
    }
}

fn param_names(params: &Expr) -> Vec<&str> {
    match params {
        Expr::Atom(_) => params.as_symbol().into_iter().collect(),
        Expr::List(list) => list
            .children()
            .iter()
            .chain(list.tail())
            .filter_map(Expr::as_symbol)
            .collect(),
    }
}

/// Numbers, booleans, strings and lambda forms. Anything else needs a quote
/// when it is substituted for a variable.
pub fn self_evaluating(e: &Expr) -> bool {
    match e {
        Expr::Atom(a) => a.value().as_symbol().is_none(),
        Expr::List(_) => e.special_form("lambda", 2).is_some(),
    }
}

fn rebuild(list: &ListNode, children: Vec<Expr>, tail: Option<Expr>) -> Expr {
    Expr::List(list.rebuild(children, tail))
}

fn quoted(e: Expr) -> Expr {
    ListNode::new(vec![Atom::symbol("quote").into(), e]).into()
}

/// Copies `e` with fresh identities, marking every copy as originating from its source.
pub fn deep_copy(store: &mut ProvenanceStore, e: &Expr) -> Expr {
    let result = match e {
        Expr::Atom(a) => Expr::Atom(a.fresh_copy()),
        Expr::List(l) => rebuild(
            l,
            l.children().iter().map(|c| deep_copy(store, c)).collect(),
            l.tail().map(|t| deep_copy(store, t)),
        ),
    };
    store.mark_origin(result.id(), e.id());
    result
}

/// Evaluates a primitive on the projected operand values and materializes the result.
pub fn apply_primitive(
    ctx: &EvaluationContext,
    op: &str,
    operands: &[Expr],
) -> Result<Expr, EvalError> {
    let f = ctx
        .primitive(op)
        .ok_or_else(|| EvalError::UndefinedSymbol(op.to_string()))?;
    let args: Vec<_> = operands.iter().map(|e| erase(e).project()).collect();
    let value = f(&args).map_err(|message| EvalError::Primitive {
        op: op.to_string(),
        message,
    })?;
    Ok(materialize(&value))
}

/// The replacement for `variable` under `bindings`, or the variable itself
/// when it is free.
pub fn counterpart(
    store: &mut ProvenanceStore,
    variable: &Expr,
    bindings: &[ParamBinding],
) -> Expr {
    let Some(name) = variable.as_symbol() else {
        return variable.clone();
    };
    let Some(binding) = bindings.iter().find(|b| b.name() == name) else {
        return variable.clone();
    };
    let result = match binding.value {
        Bound::One(value) => {
            let copy = deep_copy(store, value);
            if self_evaluating(&copy) {
                copy
            } else {
                quoted(copy)
            }
        }
        Bound::Rest(values) => {
            let copies = values.iter().map(|v| deep_copy(store, v)).collect();
            quoted(ListNode::new(copies).into())
        }
    };
    store.eradicate_always(&result);
    store.add_origin(result.id(), binding.param.id());
    result
}

/// Replaces free occurrences of the bound parameters in `body`.
pub fn substitute(store: &mut ProvenanceStore, bindings: &[ParamBinding], body: &Expr) -> Expr {
    if body.special_form("quote", 1).is_some() {
        return body.clone();
    }
    let Expr::List(list) = body else {
        return counterpart(store, body, bindings);
    };
    let result = if let Some([params, inner]) = body.special_form("lambda", 2) {
        let shadowed = param_names(params);
        let visible: Vec<_> = bindings
            .iter()
            .filter(|b| !shadowed.contains(&b.name()))
            .copied()
            .collect();
        let inner = substitute(store, &visible, inner);
        rebuild(
            list,
            vec![list.children()[0].clone(), params.clone(), inner],
            None,
        )
    } else {
        rebuild(
            list,
            list.children()
                .iter()
                .map(|c| substitute(store, bindings, c))
                .collect(),
            list.tail().map(|t| substitute(store, bindings, t)),
        )
    };
    store.mark_origin(result.id(), body.id());
    result
}

/// Hands the occurrences recorded on each parameter atom over to the operand
/// it was bound to.
pub fn transfer_heritage(store: &mut ProvenanceStore, bindings: &[ParamBinding]) {
    for binding in bindings {
        let param = binding.param.id();
        let children = store
            .explicit_progeny(param)
            .map(<[_]>::to_vec)
            .unwrap_or_default();
        let operands: Vec<_> = match binding.value {
            Bound::One(v) => vec![v.id()],
            Bound::Rest(vs) => vs.iter().map(Expr::id).collect(),
        };
        for &operand in &operands {
            store.set_progeny(operand, children.clone());
        }
        for &child in &children {
            store.repoint_origin(child, param, &operands);
        }
    }
}

struct Stepper<'c> {
    ctx: &'c EvaluationContext,
    store: ProvenanceStore,
}

impl Stepper<'_> {
    fn reduce(&mut self, e: &Expr) -> Result<Expr, EvalError> {
        if let Some([test, then, otherwise]) = e.special_form("if", 3) {
            return self.reduce_if(e, test, then, otherwise);
        }
        if e.special_form("lambda", 2).is_some() || e.special_form("quote", 1).is_some() {
            return Ok(e.clone());
        }
        match e {
            Expr::List(list) if !list.children().is_empty() => self.reduce_combination(e, list),
            Expr::Atom(atom) => match atom.value().as_symbol() {
                Some(name) => match self.ctx.definition(name) {
                    Some(def) => {
                        let result = deep_copy(&mut self.store, def);
                        self.store.dissolve(e);
                        self.store.mark_origin(result.id(), e.id());
                        Ok(result)
                    }
                    None if self.ctx.is_primitive(name) => Ok(e.clone()),
                    None => Err(EvalError::UndefinedSymbol(name.to_string())),
                },
                None => Ok(e.clone()),
            },
            _ => Ok(e.clone()),
        }
    }

    fn reduce_if(
        &mut self,
        e: &Expr,
        test: &Expr,
        then: &Expr,
        otherwise: &Expr,
    ) -> Result<Expr, EvalError> {
        let branch = if test.as_atom().is_some_and(|a| a.value().is_false()) {
            otherwise
        } else {
            let reduced = self.reduce(test)?;
            if erase(&reduced) != erase(test) {
                let list = e.as_list().expect("if form is a list");
                let head = list.children()[0].clone();
                let result = rebuild(
                    list,
                    vec![head, reduced.clone(), then.clone(), otherwise.clone()],
                    None,
                );
                self.store.mark_origin(result.id(), e.id());
                self.store.mark_origin(reduced.id(), test.id());
                return Ok(result);
            }
            then
        };
        self.store.dissolve(e);
        let result = deep_copy(&mut self.store, branch);
        self.store.mark_origin(result.id(), branch.id());
        Ok(result)
    }

    fn reduce_combination(&mut self, e: &Expr, list: &ListNode) -> Result<Expr, EvalError> {
        let operator = &list.children()[0];
        let operands = &list.children()[1..];
        let tail = list.tail();
        if let Some(name) = operator.as_symbol() {
            if self.ctx.defines_macro(name) {
                return Err(EvalError::MacroNotSupported(name.to_string()));
            }
        }
        if let Some((operands, tail)) = self.reduce_operands(operands, tail)? {
            let head = match operator {
                Expr::Atom(a) => Expr::Atom(a.fresh_copy()),
                Expr::List(l) => rebuild(l, l.children().to_vec(), l.tail().cloned()),
            };
            self.store.mark_origin(head.id(), operator.id());
            let mut children = vec![head];
            children.extend(operands);
            let result = rebuild(list, children, tail);
            self.store.mark_origin(result.id(), e.id());
            return Ok(result);
        }
        if let Some(name) = operator.as_symbol() {
            if self.ctx.is_primitive(name) {
                if tail.is_some() {
                    return Err(EvalError::Malformed(format!("application {}", erase(e))));
                }
                let result = apply_primitive(self.ctx, name, operands)?;
                self.store.mark_origin(result.id(), e.id());
                return Ok(result);
            }
            let Some(def) = self.ctx.definition(name) else {
                return Ok(e.clone());
            };
            // A private copy, so no node of the definition is ever shared by two trees.
            let def = def.fresh_copy();
            return match def.special_form("lambda", 2) {
                Some([params, body]) => {
                    let bindings = self.bind(params, operands, tail)?;
                    let result = substitute(&mut self.store, &bindings, body);
                    transfer_heritage(&mut self.store, &bindings);
                    self.store.dissolve(e);
                    // A body that is just a parameter keeps its link to the operand.
                    let bare_parameter = body
                        .as_symbol()
                        .is_some_and(|s| bindings.iter().any(|b| b.name() == s));
                    if !bare_parameter {
                        self.store.mark_origin(result.id(), operator.id());
                    }
                    Ok(result)
                }
                _ => {
                    let mut children = vec![def.clone()];
                    children.extend(operands.iter().cloned());
                    let result = rebuild(list, children, tail.cloned());
                    self.store.mark_origin(def.id(), operator.id());
                    self.store.mark_origin(result.id(), e.id());
                    Ok(result)
                }
            };
        }
        if let Some([params, body]) = operator.special_form("lambda", 2) {
            let bindings = self.bind(params, operands, tail)?;
            self.dissolve_except(e, body);
            return Ok(substitute(&mut self.store, &bindings, body));
        }
        if let Expr::List(op) = operator {
            if !op.children().is_empty() {
                let reduced = self.reduce(operator)?;
                if erase(&reduced) == erase(operator) {
                    return Ok(e.clone());
                }
                let mut children = vec![reduced.clone()];
                children.extend(operands.iter().cloned());
                let result = rebuild(list, children, tail.cloned());
                self.store.mark_origin(result.id(), e.id());
                self.store.mark_origin(reduced.id(), operator.id());
                return Ok(result);
            }
        }
        Ok(e.clone())
    }

    fn bind<'a>(
        &self,
        params: &'a Expr,
        operands: &'a [Expr],
        tail: Option<&Expr>,
    ) -> Result<Vec<ParamBinding<'a>>, EvalError> {
        if tail.is_some() {
            return Err(EvalError::Malformed("improper argument list".to_string()));
        }
        bind_parameters(params, operands)
    }

    #[allow(clippy::type_complexity)]
    fn reduce_operands(
        &mut self,
        operands: &[Expr],
        tail: Option<&Expr>,
    ) -> Result<Option<(Vec<Expr>, Option<Expr>)>, EvalError> {
        for (i, operand) in operands.iter().enumerate() {
            let reduced = self.reduce(operand)?;
            if erase(&reduced) != erase(operand) {
                let mut out = operands.to_vec();
                out[i] = reduced;
                return Ok(Some((out, tail.cloned())));
            }
        }
        if let Some(tail) = tail {
            let reduced = self.reduce(tail)?;
            if erase(&reduced) != erase(tail) {
                return Ok(Some((operands.to_vec(), Some(reduced))));
            }
        }
        Ok(None)
    }

    /// Dissolves everything in `e` apart from the subtree `keep`, whose
    /// untouched nodes survive into the result.
    fn dissolve_except(&mut self, e: &Expr, keep: &Expr) {
        if e.id() == keep.id() {
            return;
        }
        self.store.dissolve_node(e.id());
        if let Expr::List(l) = e {
            for child in l.children().iter().chain(l.tail()) {
                self.dissolve_except(child, keep);
            }
        }
    }
}

/// Performs one leftmost reduction on `expr`, recording provenance for the
/// nodes of the result. An expression in normal form comes back unchanged
/// with an empty store.
pub fn reduce_step(expr: &Expr, ctx: &EvaluationContext) -> Result<StepResult, EvalError> {
    let mut stepper = Stepper {
        ctx,
        store: ProvenanceStore::new(),
    };
    let result = stepper.reduce(expr)?;
    let input: HashSet<_> = expr.node_ids().into_iter().collect();
    let output: HashSet<_> = result.node_ids().into_iter().collect();
    let mut store = stepper.store;
    store.restrict_to(&input.union(&output).copied().collect());
    for &id in input.intersection(&output) {
        store.keep_identity(id);
    }
    Ok(StepResult {
        expr: result,
        provenance: store,
    })
}
