//! Recursive-descent parser for symbol expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor ('*' factor)* ;
//! factor := base ('^' uint)? ;
//! base   := number | 'x1' | 'x2' | 'x3' | '(' expr ')' | '-' factor ;
//! ```

use num_complex::Complex64;

use super::Symbol;
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolExpr {
    Constant(f64),
    Variable(usize),
    Sum(Box<SymbolExpr>, Box<SymbolExpr>),
    Difference(Box<SymbolExpr>, Box<SymbolExpr>),
    Product(Box<SymbolExpr>, Box<SymbolExpr>),
    Power(Box<SymbolExpr>, u32),
    Negation(Box<SymbolExpr>),
}

impl SymbolExpr {
    /// Evaluates the tree directly at ambient coordinates.
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        match self {
            SymbolExpr::Constant(c) => *c,
            SymbolExpr::Variable(i) => x[*i],
            SymbolExpr::Sum(a, b) => a.eval(x) + b.eval(x),
            SymbolExpr::Difference(a, b) => a.eval(x) - b.eval(x),
            SymbolExpr::Product(a, b) => a.eval(x) * b.eval(x),
            SymbolExpr::Power(a, n) => a.eval(x).powi(*n as i32),
            SymbolExpr::Negation(a) => -a.eval(x),
        }
    }

    pub fn compile(&self) -> Symbol {
        match self {
            SymbolExpr::Constant(c) => Symbol::constant(*c),
            SymbolExpr::Variable(i) => Symbol::coordinate(*i),
            SymbolExpr::Sum(a, b) => &a.compile() + &b.compile(),
            SymbolExpr::Difference(a, b) => &a.compile() - &b.compile(),
            SymbolExpr::Product(a, b) => &a.compile() * &b.compile(),
            SymbolExpr::Power(a, n) => a.compile().pow(*n),
            SymbolExpr::Negation(a) => a.compile().scale(Complex64::new(-1.0, 0.0)),
        }
    }
}

/// Parses and compiles to normal form.
pub fn parse(text: &str) -> Result<Symbol> {
    parse_expr(text).map(|e| e.compile())
}

pub fn parse_expr(text: &str) -> Result<SymbolExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error(format!("unexpected `{}`", p.peek_char().unwrap_or(' '))));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: String) -> Error {
        Error::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn expr(&mut self) -> Result<SymbolExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = SymbolExpr::Sum(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = SymbolExpr::Difference(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<SymbolExpr> {
        let mut lhs = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            lhs = SymbolExpr::Product(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<SymbolExpr> {
        let base = self.base()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.src[start..].bytes().take_while(u8::is_ascii_digit).count();
            if digits == 0 {
                return Err(self.error("expected an unsigned integer exponent".into()));
            }
            self.pos += digits;
            let n: u32 = self.src[start..self.pos].parse().map_err(|_| Error::Syntax {
                offset: start,
                message: "exponent out of range".into(),
            })?;
            if n > MAX_EXPONENT {
                return Err(Error::Capacity {
                    what: "exponent",
                    requested: n as usize,
                    limit: MAX_EXPONENT as usize,
                });
            }
            return Ok(SymbolExpr::Power(Box::new(base), n));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<SymbolExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input".into())),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(SymbolExpr::Negation(Box::new(self.factor()?)))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<SymbolExpr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        let text = &self.src[start..end];
        if text == "." {
            return Err(self.error("malformed number".into()));
        }
        self.pos = end;
        text.parse::<f64>().map(SymbolExpr::Constant).map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }

    fn identifier(&mut self) -> Result<SymbolExpr> {
        let start = self.pos;
        let len: usize = self.src[start..]
            .chars()
            .take_while(|c| c.is_alphanumeric() || *c == '_')
            .map(char::len_utf8)
            .sum();
        self.pos += len;
        match &self.src[start..self.pos] {
            "x1" => Ok(SymbolExpr::Variable(0)),
            "x2" => Ok(SymbolExpr::Variable(1)),
            "x3" => Ok(SymbolExpr::Variable(2)),
            other => Err(Error::UnknownIdentifier {
                name: other.to_string(),
                offset: start,
            }),
        }
    }
}
