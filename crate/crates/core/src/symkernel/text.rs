//! Fully parenthesized text form.
//!
//! ```text
//! expr   := number | symbol | "$" name | "(" head expr* ")"
//! number := ["-"] digits ["/" digits]
//! symbol := x1 | x2 | x3 | I | identifier        (identifiers are parameters)
//! head   := + | * | - | / | ^ | exp | ln | arctan | sin | cos | sqrt
//!         | cplx re im | fn NAME arg* | d NAME (count*) arg*
//! ```
//!
//! `Display` emits only `+ * ^ cplx fn d` and the function heads, with
//! children verbatim, so `parse(print(e))` rebuilds `e` node for node.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use super::expr::{Expr, ExprKind, Func};
use super::scalar::{fmt_rational, Axis, GaussRat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected `{token}` at offset {offset}")]
    Unexpected { token: String, offset: usize },
    #[error("unknown operator `{0}`")]
    UnknownHead(String),
    #[error("`{head}` expects {expected} arguments, got {got}")]
    Arity {
        head: String,
        expected: String,
        got: usize,
    },
    #[error("bad number `{0}`")]
    Number(String),
    #[error("undefined reference `${0}`")]
    Undefined(String),
    #[error("exponent of `^` must be a rational literal or a symbolic expression, got `{0}`")]
    Exponent(String),
    #[error("trailing input at offset {0}")]
    Trailing(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<(Tok, usize)> {
    let mut out = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == ';' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c == '(' {
            out.push((Tok::Open, i));
            chars.next();
        } else if c == ')' {
            out.push((Tok::Close, i));
            chars.next();
        } else {
            let mut w = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                w.push(c);
                chars.next();
            }
            out.push((Tok::Atom(w), i));
        }
    }
    out
}

/// Parser with an optional table of `$name` definitions.
#[derive(Debug, Clone, Default)]
pub struct Parser {
    defs: BTreeMap<String, Expr>,
}

impl Parser {
    pub fn new() -> Self {
        Parser::default()
    }

    pub fn define(&mut self, name: &str, e: Expr) {
        self.defs.insert(name.to_string(), e);
    }

    pub fn defs(&self) -> &BTreeMap<String, Expr> {
        &self.defs
    }

    pub fn parse(&self, s: &str) -> Result<Expr, ParseError> {
        let toks = tokenize(s);
        let mut pos = 0;
        let e = self.expr(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(ParseError::Trailing(toks[pos].1));
        }
        Ok(e)
    }

    fn expr(&self, toks: &[(Tok, usize)], pos: &mut usize) -> Result<Expr, ParseError> {
        let (t, off) = toks.get(*pos).ok_or(ParseError::Eof)?.clone();
        *pos += 1;
        match t {
            Tok::Close => Err(ParseError::Unexpected {
                token: ")".into(),
                offset: off,
            }),
            Tok::Atom(w) => self.leaf(&w),
            Tok::Open => {
                let (head, hoff) = match toks.get(*pos) {
                    Some((Tok::Atom(h), o)) => (h.clone(), *o),
                    Some((t, o)) => {
                        return Err(ParseError::Unexpected {
                            token: format!("{t:?}"),
                            offset: *o,
                        })
                    }
                    None => return Err(ParseError::Eof),
                };
                *pos += 1;
                let e = match head.as_str() {
                    "fn" => {
                        let name = self.name(toks, pos)?;
                        let args = self.rest(toks, pos)?;
                        Expr::call(&name, args)
                    }
                    "d" => {
                        let name = self.name(toks, pos)?;
                        let counts = self.counts(toks, pos)?;
                        let args = self.rest(toks, pos)?;
                        if counts.len() != args.len() {
                            return Err(ParseError::Arity {
                                head: format!("d {name}"),
                                expected: counts.len().to_string(),
                                got: args.len(),
                            });
                        }
                        Expr::raw(ExprKind::Abstract {
                            name: Arc::from(name.as_str()),
                            deriv: counts,
                            args,
                        })
                    }
                    "cplx" => {
                        let args = self.rest(toks, pos)?;
                        let parts: Vec<Rational> = args
                            .iter()
                            .map(|a| match a.as_num() {
                                Some(g) if g.is_real() => Ok(g.re.clone()),
                                _ => Err(ParseError::Number(a.to_string())),
                            })
                            .collect::<Result<_, _>>()?;
                        if parts.len() != 2 {
                            return Err(arity("cplx", "2", parts.len()));
                        }
                        Expr::num(GaussRat::new(parts[0].clone(), parts[1].clone()))
                    }
                    _ => {
                        let args = self.rest(toks, pos)?;
                        self.apply(&head, args).map_err(|e| match e {
                            ParseError::UnknownHead(_) => ParseError::Unexpected {
                                token: head.clone(),
                                offset: hoff,
                            },
                            e => e,
                        })?
                    }
                };
                Ok(e)
            }
        }
    }

    fn name(&self, toks: &[(Tok, usize)], pos: &mut usize) -> Result<String, ParseError> {
        match toks.get(*pos) {
            Some((Tok::Atom(n), _)) => {
                *pos += 1;
                Ok(n.clone())
            }
            Some((t, o)) => Err(ParseError::Unexpected {
                token: format!("{t:?}"),
                offset: *o,
            }),
            None => Err(ParseError::Eof),
        }
    }

    fn counts(&self, toks: &[(Tok, usize)], pos: &mut usize) -> Result<Vec<u8>, ParseError> {
        match toks.get(*pos) {
            Some((Tok::Open, _)) => *pos += 1,
            Some((t, o)) => {
                return Err(ParseError::Unexpected {
                    token: format!("{t:?}"),
                    offset: *o,
                })
            }
            None => return Err(ParseError::Eof),
        }
        let mut out = Vec::new();
        loop {
            match toks.get(*pos) {
                Some((Tok::Close, _)) => {
                    *pos += 1;
                    return Ok(out);
                }
                Some((Tok::Atom(w), _)) => {
                    out.push(w.parse().map_err(|_| ParseError::Number(w.clone()))?);
                    *pos += 1;
                }
                Some((t, o)) => {
                    return Err(ParseError::Unexpected {
                        token: format!("{t:?}"),
                        offset: *o,
                    })
                }
                None => return Err(ParseError::Eof),
            }
        }
    }

    fn rest(&self, toks: &[(Tok, usize)], pos: &mut usize) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        loop {
            match toks.get(*pos) {
                Some((Tok::Close, _)) => {
                    *pos += 1;
                    return Ok(args);
                }
                Some(_) => args.push(self.expr(toks, pos)?),
                None => return Err(ParseError::Eof),
            }
        }
    }

    fn leaf(&self, w: &str) -> Result<Expr, ParseError> {
        if let Some(name) = w.strip_prefix('$') {
            return self
                .defs
                .get(name)
                .cloned()
                .ok_or_else(|| ParseError::Undefined(name.to_string()));
        }
        let first = w.chars().next().unwrap_or(' ');
        if first.is_ascii_digit() || (first == '-' && w.len() > 1) {
            return parse_number(w).map(Expr::rational);
        }
        Ok(match w {
            "x1" => Expr::var(Axis::X1),
            "x2" => Expr::var(Axis::X2),
            "x3" => Expr::var(Axis::X3),
            "I" => Expr::i(),
            _ => {
                if !w.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
                    return Err(ParseError::Unexpected {
                        token: w.to_string(),
                        offset: 0,
                    });
                }
                Expr::param(w)
            }
        })
    }

    fn apply(&self, head: &str, args: Vec<Expr>) -> Result<Expr, ParseError> {
        let n = args.len();
        let one = |args: Vec<Expr>| -> Result<Expr, ParseError> {
            if n != 1 {
                return Err(arity(head, "1", n));
            }
            Ok(args.into_iter().next().unwrap())
        };
        Ok(match head {
            "+" => Expr::raw(ExprKind::Add(args)),
            "*" => Expr::raw(ExprKind::Mul(args)),
            "-" => match n {
                1 => -&args[0],
                2 => &args[0] - &args[1],
                _ => return Err(arity(head, "1 or 2", n)),
            },
            "/" => {
                if n != 2 {
                    return Err(arity(head, "2", n));
                }
                &args[0] / &args[1]
            }
            "^" => {
                if n != 2 {
                    return Err(arity(head, "2", n));
                }
                match args[1].as_num() {
                    Some(g) if g.is_real() => Expr::raw(ExprKind::Pow(args[0].clone(), g.re.clone())),
                    Some(_) => return Err(ParseError::Exponent(args[1].to_string())),
                    None => args[0].pow_expr(&args[1]),
                }
            }
            "sqrt" => one(args)?.sqrt(),
            _ => match Func::from_name(head) {
                Some(f) => Expr::raw(ExprKind::Func(f, one(args)?)),
                None => return Err(ParseError::UnknownHead(head.to_string())),
            },
        })
    }
}

fn arity(head: &str, expected: &str, got: usize) -> ParseError {
    ParseError::Arity {
        head: head.to_string(),
        expected: expected.to_string(),
        got,
    }
}

fn parse_number(w: &str) -> Result<Rational, ParseError> {
    let bad = || ParseError::Number(w.to_string());
    let (n, d) = match w.split_once('/') {
        Some((n, d)) => (n, d),
        None => (w, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

impl Expr {
    /// Parses the text form without definitions.
    pub fn parse(s: &str) -> Result<Expr, ParseError> {
        Parser::new().parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ExprKind::Num(g) => write!(f, "{g}"),
            ExprKind::Var(a) => write!(f, "{}", a.name()),
            ExprKind::Param(p) => write!(f, "{p}"),
            ExprKind::Add(ts) | ExprKind::Mul(ts) => {
                let op = if matches!(self.kind(), ExprKind::Add(_)) { "+" } else { "*" };
                write!(f, "({op}")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            ExprKind::Pow(b, q) => {
                write!(f, "(^ {b} ")?;
                fmt_rational(q, f)?;
                write!(f, ")")
            }
            ExprKind::Func(k, u) => write!(f, "({} {u})", k.name()),
            ExprKind::Abstract { name, deriv, args } => {
                if deriv.iter().all(|k| *k == 0) {
                    write!(f, "(fn {name}")?;
                } else {
                    write!(f, "(d {name} (")?;
                    for (i, k) in deriv.iter().enumerate() {
                        if i > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "{k}")?;
                    }
                    write!(f, ")")?;
                }
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_structure() {
        let cases = [
            "(+ (* 2 x1 x2) (^ x3 -1) mu)",
            "(* (cplx 0 -3/2) (arctan (* x2 (^ x1 -1))))",
            "(d F (1 0) (+ x1 x2) (^ (+ (^ x1 2) (^ x2 2)) 1/2))",
            "(fn G x3)",
            "(exp (ln x1))",
        ];
        for c in cases {
            let e = Expr::parse(c).unwrap();
            assert_eq!(e.to_string(), c);
            assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn sugar_heads_desugar() {
        let e = Expr::parse("(- (/ x1 x2) (sqrt x3))").unwrap();
        let f = Expr::x(1) / Expr::x(2) - Expr::x(3).sqrt();
        assert!((e - f).normal().unwrap().is_zero());
    }

    #[test]
    fn definitions_resolve() {
        let mut p = Parser::new();
        p.define("r2", Expr::r2());
        let e = p.parse("(- (* 2 (^ x3 2)) $r2)").unwrap();
        assert!((e - Expr::s(3)).normal().unwrap().is_zero());
        assert_eq!(p.parse("$nope"), Err(ParseError::Undefined("nope".into())));
    }

    #[test]
    fn symbolic_exponent_goes_through_log() {
        let e = Expr::parse("(^ x1 alpha)").unwrap();
        assert!(matches!(e.kind(), ExprKind::Func(Func::Exp, _)));
    }

    #[test]
    fn errors_are_reported() {
        assert!(Expr::parse("(+ x1").is_err());
        assert!(Expr::parse("(foo x1)").is_err());
        assert!(Expr::parse("x1 x2").is_err());
        assert!(Expr::parse("(/ 1)").is_err());
    }
}
