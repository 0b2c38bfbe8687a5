//! Closed-form chart expressions: polynomials in the chart parameters with
//! `sin`/`cos` atoms. Differentiation is symbolic so tangent vectors carry
//! no finite-difference noise.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, params: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Param(i) => params[*i],
            Expr::Neg(e) => -e.eval(params),
            Expr::Add(a, b) => a.eval(params) + b.eval(params),
            Expr::Sub(a, b) => a.eval(params) - b.eval(params),
            Expr::Mul(a, b) => a.eval(params) * b.eval(params),
            Expr::Div(a, b) => a.eval(params) / b.eval(params),
            Expr::Pow(e, k) => e.eval(params).powi(*k as i32),
            Expr::Sin(e) => e.eval(params).sin(),
            Expr::Cos(e) => e.eval(params).cos(),
        }
    }

    /// Symbolic partial derivative with respect to parameter `i`.
    pub fn diff(&self, i: usize) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Param(j) => Expr::Num(if *j == i { 1.0 } else { 0.0 }),
            Expr::Neg(e) => Expr::Neg(Box::new(e.diff(i))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.diff(i)), Box::new(b.diff(i))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.diff(i)), Box::new(b.diff(i))),
            Expr::Mul(a, b) => Expr::Add(
                Box::new(Expr::Mul(Box::new(a.diff(i)), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(b.diff(i)))),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(Expr::Sub(
                    Box::new(Expr::Mul(Box::new(a.diff(i)), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(b.diff(i)))),
                )),
                Box::new(Expr::Pow(b.clone(), 2)),
            ),
            Expr::Pow(e, k) => {
                if *k == 0 {
                    Expr::Num(0.0)
                } else {
                    Expr::Mul(
                        Box::new(Expr::Mul(
                            Box::new(Expr::Num(*k as f64)),
                            Box::new(Expr::Pow(e.clone(), k - 1)),
                        )),
                        Box::new(e.diff(i)),
                    )
                }
            }
            Expr::Sin(e) => Expr::Mul(Box::new(Expr::Cos(e.clone())), Box::new(e.diff(i))),
            Expr::Cos(e) => Expr::Neg(Box::new(Expr::Mul(
                Box::new(Expr::Sin(e.clone())),
                Box::new(e.diff(i)),
            ))),
        }
    }
}

struct Lexer<'a> {
    input: &'a str,
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer { input, pos: 0 }
    }

    fn next_tok(&mut self) -> Result<Option<(usize, Tok)>> {
        let bytes = self.input.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = bytes[self.pos] as char;
        let tok = match c {
            '+' => {
                self.pos += 1;
                Tok::Plus
            }
            '-' => {
                self.pos += 1;
                Tok::Minus
            }
            '*' => {
                self.pos += 1;
                Tok::Star
            }
            '/' => {
                self.pos += 1;
                Tok::Slash
            }
            '^' => {
                self.pos += 1;
                Tok::Caret
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            '0'..='9' | '.' => {
                while self.pos < bytes.len() {
                    let ch = bytes[self.pos] as char;
                    if ch.is_ascii_digit() || ch == '.' || ch == 'e' || ch == 'E' {
                        self.pos += 1;
                        // allow a sign right after an exponent marker
                        if (ch == 'e' || ch == 'E')
                            && self.pos < bytes.len()
                            && matches!(bytes[self.pos] as char, '+' | '-')
                        {
                            self.pos += 1;
                        }
                    } else {
                        break;
                    }
                }
                let text = &self.input[start..self.pos];
                let v = text.parse::<f64>().map_err(|e| Error::Parse {
                    offset: start,
                    message: format!("bad number '{text}': {e}"),
                })?;
                Tok::Num(v)
            }
            c if c.is_alphabetic() || c == '_' => {
                while self.pos < bytes.len() {
                    let ch = bytes[self.pos] as char;
                    if ch.is_alphanumeric() || ch == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                Tok::Ident(self.input[start..self.pos].to_string())
            }
            other => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        Ok(Some((start, tok)))
    }
}

pub struct ExprParser<'a> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    params: &'a [String],
}

impl<'a> ExprParser<'a> {
    pub fn parse(input: &str, params: &'a [String]) -> Result<Expr> {
        let mut lx = Lexer::new(input);
        let mut tokens = Vec::new();
        while let Some(t) = lx.next_tok()? {
            tokens.push(t);
        }
        let mut p = ExprParser {
            tokens,
            pos: 0,
            params,
        };
        let e = p.expr()?;
        if p.pos < p.tokens.len() {
            return Err(Error::Parse {
                offset: p.tokens[p.pos].0,
                message: "trailing input".into(),
            });
        }
        Ok(e)
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(0)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let mut base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let off = self.offset();
            match self.bump() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v >= 0.0 => {
                    base = Expr::Pow(Box::new(base), v as u32);
                }
                other => {
                    return Err(Error::Parse {
                        offset: off,
                        message: format!("expected non-negative integer exponent, found {other:?}"),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) && (name == "sin" || name == "cos") {
                    self.bump();
                    let inner = self.expr()?;
                    match self.bump() {
                        Some(Tok::RParen) => {}
                        other => {
                            return Err(Error::Parse {
                                offset: off,
                                message: format!("expected ')', found {other:?}"),
                            })
                        }
                    }
                    return Ok(if name == "sin" {
                        Expr::Sin(Box::new(inner))
                    } else {
                        Expr::Cos(Box::new(inner))
                    });
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                match self.params.iter().position(|p| p == &name) {
                    Some(i) => Ok(Expr::Param(i)),
                    None => Err(Error::Parse {
                        offset: off,
                        message: format!("undeclared parameter '{name}'"),
                    }),
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    other => Err(Error::Parse {
                        offset: off,
                        message: format!("expected ')', found {other:?}"),
                    }),
                }
            }
            other => Err(Error::Parse {
                offset: off,
                message: format!("expected a value, found {other:?}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Vec<String> {
        vec!["theta".into(), "phi".into()]
    }

    #[test]
    fn parse_and_eval() {
        let e = ExprParser::parse("sin(theta)*cos(phi)", &params()).unwrap();
        let v = e.eval(&[std::f64::consts::FRAC_PI_2, 0.0]);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symbolic_derivative_matches_finite_difference() {
        let e = ExprParser::parse("sin(theta)^2*cos(phi) + theta/2 - 3.5", &params()).unwrap();
        let d = e.diff(0);
        let at = [0.7, 1.3];
        let eps = 1e-6;
        let fd = (e.eval(&[at[0] + eps, at[1]]) - e.eval(&[at[0] - eps, at[1]])) / (2.0 * eps);
        assert!((d.eval(&at) - fd).abs() < 1e-9);
    }

    #[test]
    fn rejects_unknown_parameter() {
        assert!(ExprParser::parse("sin(alpha)", &params()).is_err());
    }

    #[test]
    fn pi_constant() {
        let e = ExprParser::parse("2*pi", &params()).unwrap();
        assert!((e.eval(&[0.0, 0.0]) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }
}
