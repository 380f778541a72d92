//! Integer expressions used in chain specifications.
//!
//! ```text
//! expr    := product (('+' | '-' | '−') product)*
//! product := unary (('*' | '·') unary)*
//! unary   := ('-' | '−') unary | power
//! power   := atom ('^' unary)?
//! atom    := integer | name | '(' expr ')'
//! ```
//!
//! `^` is right-associative and needs a non-negative exponent.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

/// Parse or evaluation failure at a character offset of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let start = k;
        let tok = match c {
            c if c.is_whitespace() => {
                k += 1;
                continue;
            }
            '0'..='9' => {
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..k].iter().collect();
                out.push((start, Tok::Num(digits.parse().expect("digits"))));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                out.push((start, Tok::Name(chars[start..k].iter().collect())));
                continue;
            }
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::Open,
            ')' => Tok::Close,
            other => {
                return Err(ExprError {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                    expected: vec!["integer", "name", "operator", "`(`", "`)`"],
                })
            }
        };
        out.push((start, tok));
        k += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail(&self, expected: Vec<&'static str>) -> ExprError {
        let message = match self.peek() {
            None => "unexpected end of expression".to_string(),
            Some(t) => format!("unexpected {}", describe(t)),
        };
        ExprError {
            offset: self.offset(),
            message,
            expected,
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Name(s)) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.fail(vec!["`)`", "operator"]));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.fail(vec!["integer", "name", "`(`", "`-`"])),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("integer `{n}`"),
        Tok::Name(s) => format!("name `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Caret => "`^`".into(),
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let mut p = Parser {
            toks: lex(src)?,
            pos: 0,
            end: src.chars().count(),
        };
        let e = p.sum()?;
        if p.pos < p.toks.len() {
            return Err(p.fail(vec!["operator", "end of expression"]));
        }
        Ok(e)
    }

    /// Literal `n`; negative values become `Neg(Num(-n))`, as the parser produces.
    pub fn int(n: impl Into<BigInt>) -> Expr {
        let n = n.into();
        if n.is_negative() {
            Expr::Neg(Box::new(Expr::Num(-n)))
        } else {
            Expr::Num(n)
        }
    }

    /// The value of a literal or a negated literal.
    pub fn as_literal(&self) -> Option<BigInt> {
        match self {
            Expr::Num(n) => Some(n.clone()),
            Expr::Neg(e) => match e.as_ref() {
                Expr::Num(n) if !n.is_zero() => Some(-n),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Neg(e) => e.variables(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Pow(a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }

    /// Evaluate with the given bindings. Errors carry offset 0; callers
    /// attach positions.
    pub fn eval(&self, env: &BTreeMap<String, BigInt>) -> Result<BigInt, ExprError> {
        let err = |message: String| ExprError {
            offset: 0,
            message,
            expected: vec![],
        };
        Ok(match self {
            Expr::Num(n) => n.clone(),
            Expr::Var(v) => env
                .get(v)
                .cloned()
                .ok_or_else(|| err(format!("unknown name `{v}`")))?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Pow(a, b) => {
                let base = a.eval(env)?;
                let exp = b.eval(env)?;
                if exp.is_negative() {
                    return Err(err(format!("negative exponent {exp}")));
                }
                let e = exp
                    .to_u32()
                    .filter(|&e| e <= 4096)
                    .ok_or_else(|| err(format!("exponent {exp} is too large")))?;
                num_traits::pow(base, e as usize)
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) => 5,
        }
    }
}

struct Wrapped<'a>(&'a Expr, u8);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Canonical text: ASCII operators, parentheses only where the tree needs them.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => write!(f, "-{}", Wrapped(e, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Pow(a, b) => write!(f, "{}^{}", Wrapped(a, 5), Wrapped(b, 3)),
        }
    }
}
