//! Parser for the textual grammar shared by cyclotomic constants and linear forms.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | primary
//! primary := integer | 'z' ['^' ['-'] integer] | 'x' integer | '(' expr ')'
//! ```
//!
//! `z` denotes the fixed primitive root of unity. Division is only allowed by
//! nonzero constants, and products of two non-constant factors are rejected.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cyclotomic::{CycNum, Rat};

/// A parse failure at a 1-based column of the input string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(column: usize, message: impl Into<String>) -> Self {
        ParseError {
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Zeta,
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let read_digits = |i: &mut usize| -> Option<String> {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        (*i > start).then(|| chars[start..*i].iter().collect())
    };
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let digits = read_digits(&mut i).expect("at least one digit");
                toks.push((Tok::Int(digits.parse().expect("digits")), col));
                continue;
            }
            'x' => {
                i += 1;
                let digits = read_digits(&mut i)
                    .ok_or_else(|| ParseError::new(col, "expected variable index after 'x'"))?;
                let idx: usize = digits
                    .parse()
                    .map_err(|_| ParseError::new(col, "variable index too large"))?;
                toks.push((Tok::Var(idx), col));
                continue;
            }
            'z' => toks.push((Tok::Zeta, col)),
            '+' => toks.push((Tok::Plus, col)),
            '-' => toks.push((Tok::Minus, col)),
            '*' => toks.push((Tok::Star, col)),
            '/' => toks.push((Tok::Slash, col)),
            '^' => toks.push((Tok::Caret, col)),
            '(' => toks.push((Tok::LParen, col)),
            ')' => toks.push((Tok::RParen, col)),
            other => return Err(ParseError::new(col, format!("unexpected character '{other}'"))),
        }
        i += 1;
    }
    Ok(toks)
}

/// A parsed affine expression: constant plus coefficients of the variables `x<i>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearExpr {
    pub constant: CycNum,
    pub vars: BTreeMap<usize, CycNum>,
}

impl LinearExpr {
    fn constant(c: CycNum) -> Self {
        LinearExpr {
            constant: c,
            vars: BTreeMap::new(),
        }
    }

    fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    fn add(mut self, other: LinearExpr, negate: bool) -> Self {
        let sign = |c: CycNum| if negate { -c } else { c };
        self.constant = &self.constant + &sign(other.constant);
        for (k, v) in other.vars {
            let v = sign(v);
            let entry = self.vars.remove(&k);
            let sum = match entry {
                Some(e) => &e + &v,
                None => v,
            };
            if !sum.is_zero() {
                self.vars.insert(k, sum);
            }
        }
        self
    }

    fn scale(mut self, c: &CycNum) -> Self {
        self.constant = &self.constant * c;
        self.vars = self
            .vars
            .into_iter()
            .map(|(k, v)| (k, &v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        self
    }
}

struct Parser<'a> {
    order: u32,
    toks: &'a [(Tok, usize)],
    pos: usize,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn cyc_int(&self, v: BigInt) -> CycNum {
        CycNum::from_rat(self.order, Rat::from_integer(v)).expect("order already validated")
    }

    fn expr(&mut self) -> Result<LinearExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            let negate = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            acc = acc.add(rhs, negate);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LinearExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let divide = match self.peek() {
                Some(Tok::Star) => false,
                Some(Tok::Slash) => true,
                _ => break,
            };
            self.bump();
            let col = self.col();
            let rhs = self.unary()?;
            acc = if divide {
                if !rhs.is_constant() {
                    return Err(ParseError::new(col, "division by a non-constant"));
                }
                let inv = rhs
                    .constant
                    .inv()
                    .map_err(|_| ParseError::new(col, "division by zero"))?;
                acc.scale(&inv)
            } else if acc.is_constant() {
                rhs.scale(&acc.constant)
            } else if rhs.is_constant() {
                acc.scale(&rhs.constant)
            } else {
                return Err(ParseError::new(col, "product of two variables is not linear"));
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<LinearExpr, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let e = self.unary()?;
                let minus_one = self.cyc_int(BigInt::from(-1));
                Ok(e.scale(&minus_one))
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<LinearExpr, ParseError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Int(v)) => Ok(LinearExpr::constant(self.cyc_int(v))),
            Some(Tok::Zeta) => {
                let mut exp: i64 = 1;
                if self.peek() == Some(&Tok::Caret) {
                    self.bump();
                    let neg = if self.peek() == Some(&Tok::Minus) {
                        self.bump();
                        true
                    } else {
                        false
                    };
                    let col = self.col();
                    match self.bump() {
                        Some(Tok::Int(v)) => {
                            let r = BigInt::from(self.order);
                            let m: BigInt = ((v % &r) + &r) % &r;
                            exp = i64::try_from(m).expect("reduced exponent fits");
                            if neg {
                                exp = -exp;
                            }
                        }
                        _ => return Err(ParseError::new(col, "expected integer exponent after '^'")),
                    }
                }
                let c = CycNum::zeta_pow(self.order, exp).expect("order already validated");
                Ok(LinearExpr::constant(c))
            }
            Some(Tok::Var(i)) => {
                let zero = CycNum::zero(self.order).expect("order already validated");
                let one = CycNum::one(self.order).expect("order already validated");
                let mut vars = BTreeMap::new();
                vars.insert(i, one);
                Ok(LinearExpr {
                    constant: zero,
                    vars,
                })
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                let col = self.col();
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(ParseError::new(col, "expected ')'")),
                }
            }
            Some(_) => Err(ParseError::new(col, "expected a number, 'z', a variable or '('")),
            None => Err(ParseError::new(col, "unexpected end of input")),
        }
    }
}

/// Parses an affine expression over Q(ζ_order). `order` must be positive.
pub fn parse_linear(order: u32, text: &str) -> Result<LinearExpr, ParseError> {
    assert!(order > 0, "root order must be positive");
    let toks = tokenize(text)?;
    let end_col = text.chars().count() + 1;
    if toks.is_empty() {
        return Err(ParseError::new(1, "empty expression"));
    }
    let mut p = Parser {
        order,
        toks: &toks,
        pos: 0,
        end_col,
    };
    let e = p.expr()?;
    if p.pos < toks.len() {
        return Err(ParseError::new(p.col(), "unexpected trailing input"));
    }
    Ok(e)
}

pub(crate) fn parse_constant(order: u32, text: &str) -> Result<CycNum, ParseError> {
    let e = parse_linear(order, text)?;
    if let Some((&i, _)) = e.vars.iter().next() {
        return Err(ParseError::new(1, format!("unexpected variable x{i} in a constant")));
    }
    Ok(e.constant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_forms() {
        let e = parse_linear(2, "x1 - z^1*x2").unwrap();
        assert!(e.constant.is_zero());
        assert_eq!(e.vars[&2], CycNum::one(2).unwrap());
        let e = parse_linear(3, " (1/2) * x3 + 2*z*x1 - x3/2").unwrap();
        assert_eq!(e.vars.len(), 1);
        assert_eq!(e.vars[&1], &CycNum::from_int(3, 2).unwrap() * &CycNum::zeta_pow(3, 1).unwrap());
        let e = parse_linear(4, "-(z^-1)*x2").unwrap();
        assert_eq!(e.vars[&2], -CycNum::zeta_pow(4, 3).unwrap());
    }

    #[test]
    fn error_columns() {
        let err = parse_linear(2, "x1 -").unwrap_err();
        assert_eq!(err.column, 5);
        let err = parse_linear(2, "x1 * x2").unwrap_err();
        assert!(err.message.contains("not linear"));
        let err = parse_linear(2, "x1 # x2").unwrap_err();
        assert_eq!(err.column, 4);
        assert!(parse_linear(2, "x").is_err());
        assert!(parse_linear(2, "x1 / 0").is_err());
        assert!(parse_linear(2, "(x1").is_err());
        assert!(parse_linear(2, "").is_err());
        assert!(parse_linear(2, "x1 x2").is_err());
    }
}
