use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The parsed meaning of an atom's source text.
#[derive(Debug, Clone)]
pub enum Value {
    Integer(BigInt),
    Rational(BigRational),
    Float(f64),
    Boolean(bool),
    Str(String),
    Symbol(String),
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        use Value::*;
        match (self, other) {
            (Integer(a), Integer(b)) => a == b,
            (Rational(a), Rational(b)) => a == b,
            // bitwise, so NaN literals still compare equal to themselves
            (Float(a), Float(b)) => a.to_bits() == b.to_bits(),
            (Boolean(a), Boolean(b)) => a == b,
            (Str(a), Str(b)) => a == b,
            (Symbol(a), Symbol(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Value {
    pub fn symbol(name: impl Into<String>) -> Self {
        Value::Symbol(name.into())
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Value::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_number(&self) -> bool {
        matches!(
            self,
            Value::Integer(_) | Value::Rational(_) | Value::Float(_)
        )
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Value::Boolean(false))
    }

    /// Builds an exact number, collapsing integral rationals to integers.
    pub fn exact(r: BigRational) -> Self {
        if r.denom().is_one() {
            Value::Integer(r.numer().clone())
        } else {
            Value::Rational(r)
        }
    }

    /// Parses atom text. Returns `None` for malformed string literals.
    pub fn parse(text: &str) -> Option<Value> {
        if text.starts_with('"') {
            return parse_string(text).map(Value::Str);
        }
        match text {
            "#t" | "#true" => return Some(Value::Boolean(true)),
            "#f" | "#false" => return Some(Value::Boolean(false)),
            "+inf.0" => return Some(Value::Float(f64::INFINITY)),
            "-inf.0" => return Some(Value::Float(f64::NEG_INFINITY)),
            "+nan.0" | "-nan.0" => return Some(Value::Float(f64::NAN)),
            _ => {}
        }
        if is_integer(text) {
            return text.parse::<BigInt>().ok().map(Value::Integer);
        }
        if let Some((num, den)) = text.split_once('/') {
            if is_integer(num) && !den.is_empty() && den.bytes().all(|b| b.is_ascii_digit()) {
                let num: BigInt = num.parse().ok()?;
                let den: BigInt = den.parse().ok()?;
                if !den.is_zero() {
                    return Some(Value::exact(BigRational::new(num, den)));
                }
            }
        }
        if is_decimal(text) {
            if let Ok(f) = text.parse::<f64>() {
                return Some(Value::Float(f));
            }
        }
        Some(Value::Symbol(text.to_string()))
    }

    /// Canonical spelling used when reduction synthesizes an atom.
    pub fn canonical_text(&self) -> String {
        match self {
            Value::Integer(i) => i.to_string(),
            Value::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
            Value::Float(f) => format_float(*f),
            Value::Boolean(true) => "#true".to_string(),
            Value::Boolean(false) => "#false".to_string(),
            Value::Str(s) => {
                let mut out = String::with_capacity(s.len() + 2);
                out.push('"');
                for c in s.chars() {
                    if c == '"' || c == '\\' {
                        out.push('\\');
                    }
                    out.push(c);
                }
                out.push('"');
                out
            }
            Value::Symbol(s) => s.clone(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

fn format_float(f: f64) -> String {
    if f.is_nan() {
        "+nan.0".to_string()
    } else if f.is_infinite() {
        if f > 0.0 { "+inf.0" } else { "-inf.0" }.to_string()
    } else {
        // Debug formatting always keeps a '.' or an exponent, so the text re-reads as a float
        format!("{f:?}")
    }
}

fn is_integer(text: &str) -> bool {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal(text: &str) -> bool {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, Some(b)),
        None => (mantissa, None),
    };
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !frac_part.is_none_or(all_digits) {
        return false;
    }
    let mantissa_digits = int_part.len() + frac_part.map_or(0, str::len);
    if mantissa_digits == 0 {
        return false;
    }
    match exponent {
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && all_digits(e)
        }
        None => frac_part.is_some(),
    }
}

fn parse_string(text: &str) -> Option<String> {
    let inner = text.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next()? {
                '"' => out.push('"'),
                '\\' => out.push('\\'),
                _ => return None,
            },
            '"' => return None,
            c => out.push(c),
        }
    }
    Some(out)
}
