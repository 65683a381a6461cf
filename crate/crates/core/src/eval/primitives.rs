//! Host arithmetic and comparison over erased values.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::Datum;
use crate::syntax::Value;

#[derive(Debug, Clone)]
enum Num {
    Exact(BigRational),
    Inexact(f64),
}

impl Num {
    fn from_datum(d: &Datum) -> Result<Num, String> {
        match d {
            Datum::Atom(Value::Integer(i)) => Ok(Num::Exact(BigRational::from_integer(i.clone()))),
            Datum::Atom(Value::Rational(r)) => Ok(Num::Exact(r.clone())),
            Datum::Atom(Value::Float(f)) => Ok(Num::Inexact(*f)),
            other => Err(format!("expected a number, got {other}")),
        }
    }

    fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Num::Inexact(f) => *f,
        }
    }

    fn into_datum(self) -> Datum {
        Datum::Atom(match self {
            Num::Exact(r) => Value::exact(r),
            Num::Inexact(f) => Value::Float(f),
        })
    }

    fn combine(
        self,
        other: Num,
        exact: impl Fn(BigRational, BigRational) -> Result<BigRational, String>,
        inexact: impl Fn(f64, f64) -> f64,
    ) -> Result<Num, String> {
        match (self, other) {
            (Num::Exact(a), Num::Exact(b)) => exact(a, b).map(Num::Exact),
            (a, b) => Ok(Num::Inexact(inexact(a.to_f64(), b.to_f64()))),
        }
    }

    fn compare(&self, other: &Num) -> Option<Ordering> {
        match (self, other) {
            (Num::Exact(a), Num::Exact(b)) => Some(a.cmp(b)),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}

fn numbers(args: &[Datum]) -> Result<Vec<Num>, String> {
    args.iter().map(Num::from_datum).collect()
}

fn zero() -> Num {
    Num::Exact(BigRational::from_integer(BigInt::zero()))
}

fn one() -> Num {
    Num::Exact(BigRational::from_integer(1.into()))
}

fn fold(
    args: &[Datum],
    start: Num,
    exact: impl Fn(BigRational, BigRational) -> Result<BigRational, String> + Copy,
    inexact: impl Fn(f64, f64) -> f64 + Copy,
) -> Result<Datum, String> {
    numbers(args)?
        .into_iter()
        .try_fold(start, |acc, n| acc.combine(n, exact, inexact))
        .map(Num::into_datum)
}

fn divide(a: BigRational, b: BigRational) -> Result<BigRational, String> {
    if b.is_zero() {
        Err("division by zero".to_string())
    } else {
        Ok(a / b)
    }
}

pub fn add(args: &[Datum]) -> Result<Datum, String> {
    fold(args, zero(), |a, b| Ok(a + b), |a, b| a + b)
}

pub fn mul(args: &[Datum]) -> Result<Datum, String> {
    fold(args, one(), |a, b| Ok(a * b), |a, b| a * b)
}

pub fn sub(args: &[Datum]) -> Result<Datum, String> {
    match args {
        [] => Err("expects at least one argument".to_string()),
        [x] => fold(
            std::slice::from_ref(x),
            zero(),
            |a, b| Ok(a - b),
            |a, b| a - b,
        ),
        [first, rest @ ..] => fold(
            rest,
            Num::from_datum(first)?,
            |a, b| Ok(a - b),
            |a, b| a - b,
        ),
    }
}

pub fn div(args: &[Datum]) -> Result<Datum, String> {
    match args {
        [] => Err("expects at least one argument".to_string()),
        [x] => fold(std::slice::from_ref(x), one(), divide, |a, b| a / b),
        [first, rest @ ..] => fold(rest, Num::from_datum(first)?, divide, |a, b| a / b),
    }
}

fn chain(args: &[Datum], holds: impl Fn(Ordering) -> bool) -> Result<Datum, String> {
    let nums = numbers(args)?;
    if nums.is_empty() {
        return Err("expects at least one argument".to_string());
    }
    let result = nums
        .windows(2)
        .all(|w| w[0].compare(&w[1]).is_some_and(&holds));
    Ok(Datum::Atom(Value::Boolean(result)))
}

pub fn lt(args: &[Datum]) -> Result<Datum, String> {
    chain(args, |o| o == Ordering::Less)
}

pub fn le(args: &[Datum]) -> Result<Datum, String> {
    chain(args, |o| o != Ordering::Greater)
}

pub fn gt(args: &[Datum]) -> Result<Datum, String> {
    chain(args, |o| o == Ordering::Greater)
}

pub fn ge(args: &[Datum]) -> Result<Datum, String> {
    chain(args, |o| o != Ordering::Less)
}

pub fn num_eq(args: &[Datum]) -> Result<Datum, String> {
    chain(args, |o| o == Ordering::Equal)
}

/// Identity on atoms: same kind and value. Strings and non-empty lists are
/// distinct objects and never `eqv?`.
fn eqv_datum(a: &Datum, b: &Datum) -> bool {
    match (a, b) {
        (Datum::Atom(Value::Str(_)), _) | (_, Datum::Atom(Value::Str(_))) => false,
        (Datum::Atom(x), Datum::Atom(y)) => x == y,
        (Datum::List(x, None), Datum::List(y, None)) => x.is_empty() && y.is_empty(),
        _ => false,
    }
}

pub fn eqv(args: &[Datum]) -> Result<Datum, String> {
    match args {
        [a, b] => Ok(Datum::Atom(Value::Boolean(eqv_datum(a, b)))),
        _ => Err(format!("expects 2 arguments, got {}", args.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: i64) -> Datum {
        Datum::Atom(Value::Integer(i.into()))
    }

    fn b(v: bool) -> Datum {
        Datum::Atom(Value::Boolean(v))
    }

    #[test]
    fn arithmetic() {
        assert_eq!(add(&[n(2), n(3)]), Ok(n(5)));
        assert_eq!(add(&[]), Ok(n(0)));
        assert_eq!(mul(&[n(5), n(4)]), Ok(n(20)));
        assert_eq!(sub(&[n(5), n(1)]), Ok(n(4)));
        assert_eq!(sub(&[n(5)]), Ok(n(-5)));
        assert_eq!(div(&[n(6), n(3)]), Ok(n(2)));
        assert_eq!(
            div(&[n(1), n(3)]),
            Ok(Datum::Atom(Value::Rational(BigRational::new(
                1.into(),
                3.into()
            ))))
        );
        assert!(div(&[n(1), n(0)]).is_err());
        assert_eq!(
            add(&[n(1), Datum::Atom(Value::Float(0.5))]),
            Ok(Datum::Atom(Value::Float(1.5)))
        );
        assert!(add(&[n(1), Datum::symbol("x")]).is_err());
    }

    #[test]
    fn big_factorial_does_not_overflow() {
        let mut acc = n(1);
        for i in 1..=30 {
            acc = mul(&[acc, n(i)]).unwrap();
        }
        assert_eq!(acc.to_string(), "265252859812191058636308480000000");
    }

    #[test]
    fn comparisons() {
        assert_eq!(le(&[n(5), n(1)]), Ok(b(false)));
        assert_eq!(le(&[n(1), n(1)]), Ok(b(true)));
        assert_eq!(lt(&[n(1), n(2), n(3)]), Ok(b(true)));
        assert_eq!(gt(&[n(3), n(2), n(2)]), Ok(b(false)));
        assert_eq!(ge(&[n(3), n(2), n(2)]), Ok(b(true)));
        assert_eq!(num_eq(&[n(2), Datum::Atom(Value::Float(2.0))]), Ok(b(true)));
        assert!(lt(&[]).is_err());
    }

    #[test]
    fn identity() {
        assert_eq!(eqv(&[Datum::symbol("a"), Datum::symbol("a")]), Ok(b(true)));
        assert_eq!(eqv(&[n(1), Datum::Atom(Value::Float(1.0))]), Ok(b(false)));
        assert_eq!(
            eqv(&[Datum::list(vec![]), Datum::list(vec![])]),
            Ok(b(true))
        );
        assert_eq!(
            eqv(&[Datum::list(vec![n(1)]), Datum::list(vec![n(1)])]),
            Ok(b(false))
        );
        assert!(eqv(&[n(1)]).is_err());
    }
}
