//! Closed-form scalar expressions in the chart coordinates `x0..x3`.
//!
//! Trees serialize as prefix S-expressions: `x2`, `1.5`, `(c 0 -1)` for a
//! complex constant, `(+ a b)`, `(* a b)`, `(/ a b)`, `(- a)`, `(^ a 1.5)`.

use std::fmt;
use std::ops;
use std::sync::Arc;

use nalgebra::{Complex, ComplexField, RealField};

use super::LabError;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64, f64),
    Var(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, f64),
}

impl Expr {
    pub fn real(c: f64) -> Self {
        Expr::Const(c, 0.0)
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Expr::Const(re, im)
    }

    pub fn var(i: usize) -> Self {
        assert!(i < 4, "chart coordinates are x0..x3");
        Expr::Var(i)
    }

    pub fn zero() -> Self {
        Expr::real(0.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(a, b) if *a == 0.0 && *b == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(a, b) if *a == 1.0 && *b == 0.0)
    }

    pub fn pow(self, p: f64) -> Self {
        match self {
            Expr::Const(a, 0.0) if a > 0.0 => Expr::real(a.powf(p)),
            e if p == 1.0 => e,
            e => Expr::Pow(Arc::new(e), p),
        }
    }

    pub fn eval<T: RealField + Copy>(&self, x: &[T; 4]) -> Complex<T> {
        let c = |v: f64| T::from_f64(v).expect("f64 constant");
        match self {
            Expr::Const(a, b) => Complex::new(c(*a), c(*b)),
            Expr::Var(i) => Complex::new(x[*i], T::zero()),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Neg(a) => -a.eval(x),
            Expr::Pow(a, p) => {
                let base = a.eval(x);
                if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
                    ComplexField::powi(base, *p as i32)
                } else {
                    ComplexField::powf(base, c(*p))
                }
            }
        }
    }

    /// Parse the S-expression encoding.
    pub fn parse(s: &str) -> Result<Self, LabError> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let e = parse_at(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(LabError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(e)
    }
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

fn parse_at(tokens: &[String], pos: &mut usize) -> Result<Expr, LabError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| LabError::Parse("unexpected end".into()))?;
    *pos += 1;
    if tok != "(" {
        if let Some(i) = tok.strip_prefix('x') {
            let i: usize = i
                .parse()
                .map_err(|_| LabError::Parse(format!("bad variable {tok}")))?;
            if i >= 4 {
                return Err(LabError::Parse(format!("bad variable {tok}")));
            }
            return Ok(Expr::Var(i));
        }
        let v: f64 = tok
            .parse()
            .map_err(|_| LabError::Parse(format!("bad number {tok}")))?;
        return Ok(Expr::real(v));
    }
    let op = tokens
        .get(*pos)
        .ok_or_else(|| LabError::Parse("missing operator".into()))?
        .clone();
    *pos += 1;
    let number = |pos: &mut usize| -> Result<f64, LabError> {
        let t = tokens
            .get(*pos)
            .ok_or_else(|| LabError::Parse("missing number".into()))?;
        *pos += 1;
        t.parse()
            .map_err(|_| LabError::Parse(format!("bad number {t}")))
    };
    let e = match op.as_str() {
        "c" => {
            let re = number(pos)?;
            let im = number(pos)?;
            Expr::Const(re, im)
        }
        "+" | "*" | "/" => {
            let a = Arc::new(parse_at(tokens, pos)?);
            let b = Arc::new(parse_at(tokens, pos)?);
            match op.as_str() {
                "+" => Expr::Add(a, b),
                "*" => Expr::Mul(a, b),
                _ => Expr::Div(a, b),
            }
        }
        "-" => Expr::Neg(Arc::new(parse_at(tokens, pos)?)),
        "^" => {
            let a = Arc::new(parse_at(tokens, pos)?);
            Expr::Pow(a, number(pos)?)
        }
        _ => return Err(LabError::Parse(format!("unknown operator {op}"))),
    };
    match tokens.get(*pos) {
        Some(t) if t == ")" => {
            *pos += 1;
            Ok(e)
        }
        _ => Err(LabError::Parse(format!("expected ) after {op}"))),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(a, b) if *b == 0.0 => write!(f, "{a:?}"),
            Expr::Const(a, b) => write!(f, "(c {a:?} {b:?})"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => write!(f, "(+ {a} {b})"),
            Expr::Mul(a, b) => write!(f, "(* {a} {b})"),
            Expr::Div(a, b) => write!(f, "(/ {a} {b})"),
            Expr::Neg(a) => write!(f, "(- {a})"),
            Expr::Pow(a, p) => write!(f, "(^ {a} {p:?})"),
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a, b), Expr::Const(c, d)) => Expr::Const(a + c, b + d),
            (a, b) if a.is_zero() => b,
            (a, b) if b.is_zero() => a,
            (a, b) => Expr::Add(Arc::new(a), Arc::new(b)),
        }
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(a, b) => Expr::Const(-a, -b),
            Expr::Neg(a) => (*a).clone(),
            e => Expr::Neg(Arc::new(e)),
        }
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a, b), Expr::Const(c, d)) => Expr::Const(a * c - b * d, a * d + b * c),
            (a, b) if a.is_zero() || b.is_zero() => Expr::zero(),
            (a, b) if a.is_one() => b,
            (a, b) if b.is_one() => a,
            (a, b) => Expr::Mul(Arc::new(a), Arc::new(b)),
        }
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (a, _) if a.is_zero() => Expr::zero(),
            (a, b) if b.is_one() => a,
            (a, b) => Expr::Div(Arc::new(a), Arc::new(b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let e = (Expr::var(0) + Expr::var(1) * Expr::real(2.0)) / Expr::var(3);
        assert_eq!(e.eval(&x), Complex::new(1.25, 0.0));
        let r2 = Expr::var(0) * Expr::var(0) + Expr::real(3.0);
        assert!((r2.pow(-1.5).eval(&x).re - 0.125).abs() < 1e-15);
        assert_eq!(
            (Expr::complex(0.0, 1.0) * Expr::complex(0.0, 1.0)).eval(&x),
            Complex::new(-1.0, 0.0)
        );
    }

    #[test]
    fn s_expression_round_trip() {
        let e = (Expr::var(2) - Expr::complex(0.5, -1.0)) * Expr::var(1).pow(2.0)
            / (Expr::var(0) + Expr::real(1.0));
        let s = e.to_string();
        assert_eq!(Expr::parse(&s).unwrap(), e);
        assert_eq!(
            Expr::parse("(+ x0 (c 0.0 1.0))").unwrap().to_string(),
            "(+ x0 (c 0.0 1.0))"
        );
        assert!(Expr::parse("(+ x0").is_err());
        assert!(Expr::parse("(% x0 x1)").is_err());
        assert!(Expr::parse("x7").is_err());
    }

    #[test]
    fn constant_folding() {
        assert!((Expr::var(0) * Expr::zero()).is_zero());
        assert_eq!(Expr::var(1) * Expr::real(1.0), Expr::var(1));
        assert_eq!(-(-Expr::var(3)), Expr::var(3));
    }
}
