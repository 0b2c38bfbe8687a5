//! Parsers for the text grammars: polynomial expressions over declared
//! variable names, and exterior elements built from `e(i,j,...)` /
//! `dx(i,j,...)` basis atoms with polynomial coefficients.
//!
//! Grammar (shared): rationals `p/q`, declared variable names, operators
//! `+ - * ^`, parentheses. Basis indices are 1-based in text form.
//! Undeclared variables are rejected.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exterior::{DiffForm, MultiVector};
use crate::ring::{Poly, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Comma,
}

struct Lexer {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '/' => {
                out.push((i, Token::Slash));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            ',' => {
                out.push((i, Token::Comma));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                let n = digits.parse::<BigInt>().map_err(|e| Error::Parse {
                    offset: start,
                    message: format!("bad integer literal: {e}"),
                })?;
                out.push((start, Token::Int(n)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let ch = bytes[i] as char;
                    if ch.is_alphanumeric() || ch == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((start, Token::Ident(input[start..i].to_string())));
            }
            other => {
                return Err(Error::Parse {
                    offset: i,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

impl Lexer {
    fn new(input: &str) -> Result<Self> {
        let tokens = tokenize(input)?;
        Ok(Lexer {
            len: input.len(),
            tokens,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.pos + 1).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Token) -> Result<()> {
        let off = self.offset();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            other => Err(Error::Parse {
                offset: off,
                message: format!("expected {tok:?}, found {other:?}"),
            }),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }
}

/// What an atomic factor may produce: a plain polynomial or a basis element.
#[derive(Debug, Clone)]
enum Value {
    Scalar(Poly),
    Vector(MultiVector),
    Form(DiffForm),
}

struct Parser<'a> {
    lx: Lexer,
    names: &'a [String],
    num_vars: usize,
    allow_exterior: bool,
}

impl<'a> Parser<'a> {
    fn new(input: &str, names: &'a [String], allow_exterior: bool) -> Result<Self> {
        Ok(Parser {
            lx: Lexer::new(input)?,
            names,
            num_vars: names.len(),
            allow_exterior,
        })
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn parse_expr(&mut self) -> Result<Value> {
        let mut acc = match self.lx.peek() {
            Some(Token::Minus) => {
                self.lx.bump();
                let t = self.parse_term()?;
                self.neg(t)
            }
            _ => self.parse_term()?,
        };
        loop {
            match self.lx.peek() {
                Some(Token::Plus) => {
                    self.lx.bump();
                    let rhs = self.parse_term()?;
                    acc = self.add(acc, rhs)?;
                }
                Some(Token::Minus) => {
                    self.lx.bump();
                    let rhs = self.parse_term()?;
                    let rhs = self.neg(rhs);
                    acc = self.add(acc, rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<Value> {
        let mut acc = self.parse_factor()?;
        while let Some(Token::Star) = self.lx.peek() {
            self.lx.bump();
            let rhs = self.parse_factor()?;
            acc = self.mul(acc, rhs)?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Value> {
        if let Some(Token::Minus) = self.lx.peek() {
            self.lx.bump();
            let v = self.parse_factor()?;
            return Ok(self.neg(v));
        }
        let mut base = self.parse_atom()?;
        if let Some(Token::Caret) = self.lx.peek() {
            self.lx.bump();
            let off = self.lx.offset();
            let exp = match self.lx.bump() {
                Some(Token::Int(n)) => u32::try_from(n).map_err(|_| Error::Parse {
                    offset: off,
                    message: "exponent out of range".into(),
                })?,
                other => {
                    return Err(Error::Parse {
                        offset: off,
                        message: format!("expected integer exponent, found {other:?}"),
                    })
                }
            };
            base = match base {
                Value::Scalar(p) => Value::Scalar(p.pow(exp)),
                _ => return self.lx.err("only scalar factors can be raised to a power"),
            };
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Value> {
        let off = self.lx.offset();
        match self.lx.peek().cloned() {
            Some(Token::Int(n)) => {
                self.lx.bump();
                let mut value = Rational::from(n);
                // a directly following `/ int` is a rational literal
                if let (Some(Token::Slash), Some(Token::Int(_))) = (self.lx.peek(), self.lx.peek2())
                {
                    self.lx.bump();
                    if let Some(Token::Int(d)) = self.lx.bump() {
                        if d == BigInt::from(0) {
                            return Err(Error::Parse {
                                offset: off,
                                message: "zero denominator".into(),
                            });
                        }
                        value /= Rational::from(d);
                    }
                }
                Ok(Value::Scalar(Poly::constant(self.num_vars, value)))
            }
            Some(Token::Ident(name)) => {
                // basis atoms require the opening paren immediately after
                if self.allow_exterior
                    && (name == "e" || name == "dx")
                    && matches!(self.lx.peek2(), Some(Token::LParen))
                {
                    self.lx.bump();
                    let indices = self.parse_index_list()?;
                    return if name == "e" {
                        Ok(Value::Vector(MultiVector::basis(self.num_vars, &indices)?))
                    } else {
                        Ok(Value::Form(DiffForm::basis(self.num_vars, &indices)?))
                    };
                }
                self.lx.bump();
                match self.var_index(&name) {
                    Some(i) => Ok(Value::Scalar(
                        Poly::var(self.num_vars, i).expect("declared variable"),
                    )),
                    None => Err(Error::Parse {
                        offset: off,
                        message: format!("undeclared variable '{name}'"),
                    }),
                }
            }
            Some(Token::LParen) => {
                self.lx.bump();
                let v = self.parse_expr()?;
                self.lx.expect(Token::RParen)?;
                Ok(v)
            }
            other => Err(Error::Parse {
                offset: off,
                message: format!("expected a value, found {other:?}"),
            }),
        }
    }

    /// `( i, j, ... )` with 1-based strictly positive indices; an empty list
    /// denotes the degree-0 basis element.
    fn parse_index_list(&mut self) -> Result<Vec<usize>> {
        self.lx.expect(Token::LParen)?;
        let mut out = Vec::new();
        if let Some(Token::RParen) = self.lx.peek() {
            self.lx.bump();
            return Ok(out);
        }
        loop {
            let off = self.lx.offset();
            match self.lx.bump() {
                Some(Token::Int(n)) => {
                    let i = usize::try_from(n.clone()).map_err(|_| Error::Parse {
                        offset: off,
                        message: "index out of range".into(),
                    })?;
                    if i == 0 || i > self.num_vars {
                        return Err(Error::Parse {
                            offset: off,
                            message: format!("basis index {i} out of range 1..={}", self.num_vars),
                        });
                    }
                    out.push(i - 1);
                }
                other => {
                    return Err(Error::Parse {
                        offset: off,
                        message: format!("expected basis index, found {other:?}"),
                    })
                }
            }
            match self.lx.bump() {
                Some(Token::Comma) => continue,
                Some(Token::RParen) => break,
                other => {
                    return Err(Error::Parse {
                        offset: off,
                        message: format!("expected ',' or ')', found {other:?}"),
                    })
                }
            }
        }
        Ok(out)
    }

    fn neg(&self, v: Value) -> Value {
        match v {
            Value::Scalar(p) => Value::Scalar(p.neg()),
            Value::Vector(m) => Value::Vector(m.neg()),
            Value::Form(m) => Value::Form(m.neg()),
        }
    }

    fn add(&self, a: Value, b: Value) -> Result<Value> {
        Ok(match (a, b) {
            (Value::Scalar(p), Value::Scalar(q)) => Value::Scalar(p.add(&q)?),
            (Value::Vector(u), Value::Vector(v)) => Value::Vector(u.add(&v)?),
            (Value::Form(u), Value::Form(v)) => Value::Form(u.add(&v)?),
            (Value::Scalar(p), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(p)) => {
                Value::Vector(MultiVector::from_poly(p).add(&v)?)
            }
            (Value::Scalar(p), Value::Form(v)) | (Value::Form(v), Value::Scalar(p)) => {
                Value::Form(DiffForm::from_poly(p).add(&v)?)
            }
            _ => {
                return self
                    .lx
                    .err("cannot mix e(...) and dx(...) in one expression")
            }
        })
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        Ok(match (a, b) {
            (Value::Scalar(p), Value::Scalar(q)) => Value::Scalar(p.mul(&q)?),
            (Value::Scalar(p), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(p)) => {
                Value::Vector(v.scale_poly(&p)?)
            }
            (Value::Scalar(p), Value::Form(v)) | (Value::Form(v), Value::Scalar(p)) => {
                Value::Form(v.scale_poly(&p)?)
            }
            (Value::Vector(u), Value::Vector(v)) => Value::Vector(u.wedge(&v)?),
            (Value::Form(u), Value::Form(v)) => Value::Form(u.wedge(&v)?),
            _ => {
                return self
                    .lx
                    .err("cannot mix e(...) and dx(...) in one expression")
            }
        })
    }

    fn finish(&self) -> Result<()> {
        if self.lx.pos < self.lx.tokens.len() {
            return Err(Error::Parse {
                offset: self.lx.offset(),
                message: "trailing input".into(),
            });
        }
        Ok(())
    }
}

/// Parse a polynomial over the declared variable names.
pub fn parse_poly(input: &str, names: &[String]) -> Result<Poly> {
    let mut p = Parser::new(input, names, false)?;
    let v = p.parse_expr()?;
    p.finish()?;
    match v {
        Value::Scalar(poly) => Ok(poly),
        _ => unreachable!("exterior atoms disabled"),
    }
}

/// Parse a multivector expression (`e(...)` atoms, polynomial coefficients).
pub fn parse_multivector(input: &str, names: &[String]) -> Result<MultiVector> {
    let mut p = Parser::new(input, names, true)?;
    let v = p.parse_expr()?;
    p.finish()?;
    match v {
        Value::Scalar(poly) => Ok(MultiVector::from_poly(poly)),
        Value::Vector(m) => Ok(m),
        Value::Form(_) => Err(Error::Parse {
            offset: 0,
            message: "expected a multivector, found a differential form".into(),
        }),
    }
}

/// Parse a differential form expression (`dx(...)` atoms).
pub fn parse_form(input: &str, names: &[String]) -> Result<DiffForm> {
    let mut p = Parser::new(input, names, true)?;
    let v = p.parse_expr()?;
    p.finish()?;
    match v {
        Value::Scalar(poly) => Ok(DiffForm::from_poly(poly)),
        Value::Form(m) => Ok(m),
        Value::Vector(_) => Err(Error::Parse {
            offset: 0,
            message: "expected a differential form, found a multivector".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names3() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn rejects_undeclared_variable() {
        let err = parse_poly("3*w", &names3()).unwrap_err();
        match err {
            Error::Parse { message, .. } => assert!(message.contains("undeclared")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rational_literals() {
        let p = parse_poly("3/2*x^2*y - z", &names3()).unwrap();
        assert_eq!(p.num_terms(), 2);
        let q = parse_poly("1/2 + 1/2", &names3()).unwrap();
        assert_eq!(q, Poly::one(3));
    }

    #[test]
    fn parses_multivector_terms() {
        let m = parse_multivector("x*e(1,2) + e(2,3)", &names3()).unwrap();
        assert_eq!(m.terms().count(), 2);
        let swapped = parse_multivector("-e(2,1)", &names3()).unwrap();
        let plain = parse_multivector("e(1,2)", &names3()).unwrap();
        assert_eq!(swapped, plain);
    }

    #[test]
    fn parses_form_terms() {
        let f = parse_form("(x+y)*dx(1,2) - dx(3)", &names3()).unwrap();
        assert_eq!(f.terms().count(), 2);
    }

    #[test]
    fn mixing_flavors_fails() {
        assert!(parse_multivector("e(1) + dx(1)", &names3()).is_err());
    }

    #[test]
    fn index_out_of_range() {
        assert!(parse_multivector("e(4)", &names3()).is_err());
        assert!(parse_multivector("e(0)", &names3()).is_err());
    }

    #[test]
    fn parenthesized_powers() {
        let p = parse_poly("(x + y)^2 - (x^2 + 2*x*y + y^2)", &names3()).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn display_round_trips_through_parser() {
        let mut rng = crate::sampling::rng(157);
        let names = names3();
        for _ in 0..40 {
            let (u, _) = crate::sampling::homogeneous_multivector(&mut rng, 3, 3, 2);
            let reparsed = parse_multivector(&u.display_with(&names), &names).unwrap();
            assert_eq!(u, reparsed);
            let (w, _) = crate::sampling::homogeneous_form(&mut rng, 3, 3, 2);
            let reparsed = parse_form(&w.display_with(&names), &names).unwrap();
            assert_eq!(w, reparsed);
        }
    }
}
