//! Bracket expressions: `x INT | [e,e] | qb(e,e)`, whitespace-insensitive.

use std::fmt;

use qborel::coeffring::ScalarDomain;
use qborel::freeword::{Algebra, FreeElem};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketExpr {
    Leaf(u32),
    /// `[a,b]`
    Skew(Box<BracketExpr>, Box<BracketExpr>),
    /// `[[a,b]] = ab - q^-1 p(a,b) ba`
    Qq(Box<BracketExpr>, Box<BracketExpr>),
}

impl BracketExpr {
    /// Build the free-algebra element; letter indices are checked against
    /// the datum here, not while parsing.
    pub fn bind<D: ScalarDomain>(
        &self,
        alg: &Algebra<'_, D>,
    ) -> Result<FreeElem<D::Elem>, CliError> {
        Ok(match self {
            BracketExpr::Leaf(i) => alg.letter(*i)?,
            BracketExpr::Skew(a, b) => alg.skew_bracket(&a.bind(alg)?, &b.bind(alg)?)?,
            BracketExpr::Qq(a, b) => alg.qq_bracket(&a.bind(alg)?, &b.bind(alg)?)?,
        })
    }
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpr::Leaf(i) => write!(f, "x{i}"),
            BracketExpr::Skew(a, b) => write!(f, "[{a},{b}]"),
            BracketExpr::Qq(a, b) => write!(f, "qb({a},{b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::Syntax {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), CliError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.err(format!("expected '{}', found '{}'", c as char, x as char))),
            None => Err(self.err(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn pair(&mut self, close: u8) -> Result<(BracketExpr, BracketExpr), CliError> {
        let a = self.expr()?;
        self.expect(b',')?;
        let b = self.expr()?;
        self.expect(close)?;
        Ok((a, b))
    }

    fn expr(&mut self) -> Result<BracketExpr, CliError> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let (a, b) = self.pair(b']')?;
                Ok(BracketExpr::Skew(Box::new(a), Box::new(b)))
            }
            Some(b'q') => {
                if !self.src[self.pos..].starts_with(b"qb") {
                    return Err(self.err("expected 'qb('"));
                }
                self.pos += 2;
                self.expect(b'(')?;
                let (a, b) = self.pair(b')')?;
                Ok(BracketExpr::Qq(Box::new(a), Box::new(b)))
            }
            Some(b'x') => {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.err("expected a letter index after 'x'"));
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let i = text.parse().map_err(|_| CliError::Syntax {
                    offset: start,
                    msg: "letter index too large".into(),
                })?;
                Ok(BracketExpr::Leaf(i))
            }
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<BracketExpr, CliError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
