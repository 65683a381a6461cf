use std::fmt;

use crate::syntax::{Atom, Expr, ListNode, Value};

/// An expression with identities and spacing erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Datum {
    Atom(Value),
    List(Vec<Datum>, Option<Box<Datum>>),
}

impl Datum {
    pub fn list(items: Vec<Datum>) -> Self {
        Datum::List(items, None)
    }

    pub fn symbol(name: &str) -> Self {
        Datum::Atom(Value::symbol(name))
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Datum::Atom(v) => v.as_symbol(),
            Datum::List(..) => None,
        }
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Datum::Atom(v) if v.is_false())
    }

    pub fn proper_items(&self) -> Option<&[Datum]> {
        match self {
            Datum::List(items, None) => Some(items),
            _ => None,
        }
    }

    /// `(keyword a b ...)` with exactly `arity` arguments.
    pub fn special_form(&self, keyword: &str, arity: usize) -> Option<&[Datum]> {
        let items = self.proper_items()?;
        (items.len() == arity + 1 && items[0].as_symbol() == Some(keyword)).then(|| &items[1..])
    }

    /// The value a primitive sees for this operand: `(quote d)` stands for `d`.
    pub fn project(&self) -> Datum {
        match self.special_form("quote", 1) {
            Some([d]) => d.clone(),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Atom(v) => write!(f, "{v}"),
            Datum::List(items, tail) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                if let Some(tail) = tail {
                    write!(f, " . {tail}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Projects an expression to its erased tree.
pub fn erase(expr: &Expr) -> Datum {
    match expr {
        Expr::Atom(a) => Datum::Atom(a.value().clone()),
        Expr::List(l) => Datum::List(
            l.children().iter().map(erase).collect(),
            l.tail().map(|t| Box::new(erase(t))),
        ),
    }
}

/// Builds a fresh expression with canonical spelling and default gaps.
pub fn materialize(datum: &Datum) -> Expr {
    match datum {
        Datum::Atom(v) => Atom::from_value(v.clone()).into(),
        Datum::List(items, None) => ListNode::new(items.iter().map(materialize).collect()).into(),
        Datum::List(items, Some(tail)) if !items.is_empty() => {
            ListNode::dotted(items.iter().map(materialize).collect(), materialize(tail)).into()
        }
        Datum::List(_, Some(tail)) => materialize(tail),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, structural_equal};

    #[test]
    fn erase_ignores_spacing() {
        let a = erase(&parse_expr("(+  1 ;c\n 2)").unwrap());
        assert_eq!(a.to_string(), "(+ 1 2)");
        assert_eq!(
            erase(&parse_expr("(a . b)").unwrap()).to_string(),
            "(a . b)"
        );
        assert_eq!(erase(&parse_expr("#f").unwrap()).to_string(), "#false");
    }

    #[test]
    fn materialize_inverts_erase() {
        let e = parse_expr("(if (<= n 1) \"s\" (a . 3/4))").unwrap();
        assert!(structural_equal(&materialize(&erase(&e)), &e));
    }

    #[test]
    fn project_unwraps_quote() {
        let d = erase(&parse_expr("'a").unwrap());
        assert_eq!(d.project(), Datum::symbol("a"));
    }
}
