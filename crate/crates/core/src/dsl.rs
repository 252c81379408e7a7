//! Line-oriented text format for trend models.
//!
//! ```text
//! # comment
//! var QUA +
//! var TA +
//! rel SUP QUA TA
//! rel SHAPE +- REP PRI
//! eq D(X) + X*Y = 0
//! ```
//!
//! Variables must be declared before they are referenced. `SUP` and `RED`
//! are aliases for `SHAPE +0` and `SHAPE -0`.

use std::collections::HashSet;

use thiserror::Error;

use crate::algebra::Sign;
use crate::lexer::{lex_line, Cursor, Tok};
use crate::model::{Factor, Monomial, Shape, TrendEquation, TrendModel, TrendRelation, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("relation from {0:?} to itself")]
    SelfRelation(String),
    #[error("variable {0:?} declared twice")]
    DuplicateVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, column, kind: ParseErrorKind::Syntax(msg.into()) }
    }
}

pub fn parse_model(text: &str) -> Result<TrendModel, ParseError> {
    let mut model = TrendModel::default();
    let mut declared: HashSet<String> = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex_line(line)
            .map_err(|(col, c)| ParseError::syntax(line_no, col, format!("unexpected character {c:?}")))?;
        if toks.is_empty() {
            continue;
        }
        let mut p = LineParser { cur: Cursor::new(&toks, line), line: line_no, declared: &declared };
        let keyword = p.ident("a keyword")?;
        match keyword.0.as_str() {
            "var" => {
                let var = p.var_decl()?;
                if !declared.insert(var.name.clone()) {
                    return Err(ParseError {
                        line: line_no,
                        column: keyword_arg_col(&toks),
                        kind: ParseErrorKind::DuplicateVariable(var.name),
                    });
                }
                model.variables.push(var);
            }
            "rel" => model.relations.push(p.rel_decl()?),
            "eq" => model.equations.push(p.equation()?),
            other => {
                return Err(ParseError::syntax(
                    line_no,
                    keyword.1,
                    format!("expected 'var', 'rel' or 'eq', found {other:?}"),
                ))
            }
        }
    }
    Ok(model)
}

fn keyword_arg_col(toks: &[crate::lexer::Spanned]) -> usize {
    toks.get(1).map_or(1, |t| t.col)
}

/// Parses a single `eq ...` line against already declared variables.
pub fn parse_equation_line(text: &str, variables: &[Variable]) -> Result<TrendEquation, ParseError> {
    let declared: HashSet<String> = variables.iter().map(|v| v.name.clone()).collect();
    let toks = lex_line(text).map_err(|(col, c)| ParseError::syntax(1, col, format!("unexpected character {c:?}")))?;
    let mut p = LineParser { cur: Cursor::new(&toks, text), line: 1, declared: &declared };
    let (kw, col) = p.ident("'eq'")?;
    if kw != "eq" {
        return Err(ParseError::syntax(1, col, format!("expected 'eq', found {kw:?}")));
    }
    p.equation()
}

struct LineParser<'a> {
    cur: Cursor<'a>,
    line: usize,
    declared: &'a HashSet<String>,
}

impl LineParser<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line, self.cur.col(), msg)
    }

    fn expected(&self, what: &str) -> ParseError {
        self.err(format!("expected {what}, found {}", self.cur.describe_next()))
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let col = self.cur.col();
        match self.cur.peek() {
            Some(Tok::Ident(s)) => {
                self.cur.next();
                Ok((s.clone(), col))
            }
            _ => Err(self.expected(what)),
        }
    }

    fn declared_name(&mut self) -> Result<String, ParseError> {
        let (name, col) = self.ident("a variable name")?;
        if !self.declared.contains(&name) {
            return Err(ParseError { line: self.line, column: col, kind: ParseErrorKind::UnknownVariable(name) });
        }
        Ok(name)
    }

    fn sign(&mut self, allow_zero: bool) -> Option<Sign> {
        let s = match self.cur.peek()? {
            Tok::Plus => Sign::Pos,
            Tok::Minus => Sign::Neg,
            Tok::Number(n) if allow_zero && n == "0" => Sign::Zero,
            _ => return None,
        };
        self.cur.next();
        Some(s)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.cur.at_end() {
            Ok(())
        } else {
            Err(self.expected("end of line"))
        }
    }

    fn var_decl(&mut self) -> Result<Variable, ParseError> {
        let (name, _) = self.ident("a variable name")?;
        let value = if self.cur.at_end() {
            Sign::Pos
        } else {
            self.sign(true).ok_or_else(|| self.expected("a value sign (+, 0 or -)"))?
        };
        self.finish()?;
        Ok(Variable { name, value })
    }

    fn rel_decl(&mut self) -> Result<TrendRelation, ParseError> {
        let (kind, col) = self.ident("SUP, RED or SHAPE")?;
        let shape = match kind.as_str() {
            "SUP" => Shape::SUP,
            "RED" => Shape::RED,
            "SHAPE" => {
                let slope = self.sign(false).ok_or_else(|| self.expected("shape slope sign (+ or -)"))?;
                let curvature = self.sign(true).ok_or_else(|| self.expected("shape curvature sign (+, 0 or -)"))?;
                Shape::new(slope, curvature).expect("slope is never zero here")
            }
            other => {
                return Err(ParseError::syntax(self.line, col, format!("expected SUP, RED or SHAPE, found {other:?}")))
            }
        };
        let source = self.declared_name()?;
        let target_col = self.cur.col();
        let target = self.declared_name()?;
        self.finish()?;
        if source == target {
            return Err(ParseError { line: self.line, column: target_col, kind: ParseErrorKind::SelfRelation(source) });
        }
        Ok(TrendRelation { shape, source, target })
    }

    fn equation(&mut self) -> Result<TrendEquation, ParseError> {
        let lhs = self.sum()?;
        if !self.cur.eat(&Tok::Eq) {
            return Err(self.expected("'='"));
        }
        let rhs = self.sum()?;
        self.finish()?;
        Ok(TrendEquation { lhs, rhs })
    }

    fn sum(&mut self) -> Result<Vec<Monomial>, ParseError> {
        if matches!(self.cur.peek(), Some(Tok::Number(n)) if n == "0")
            && matches!(self.cur.peek_at(1), None | Some(Tok::Eq))
        {
            self.cur.next();
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut sign = if self.cur.eat(&Tok::Minus) { Sign::Neg } else { Sign::Pos };
        loop {
            out.push(Monomial::new(sign, self.monomial()?));
            sign = match self.cur.peek() {
                Some(Tok::Plus) => Sign::Pos,
                Some(Tok::Minus) => Sign::Neg,
                _ => return Ok(out),
            };
            self.cur.next();
        }
    }

    fn monomial(&mut self) -> Result<Vec<Factor>, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.cur.eat(&Tok::Star) {
            factors.push(self.factor()?);
        }
        Ok(factors)
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let is_call = matches!(self.cur.peek(), Some(Tok::Ident(s)) if s == "D" || s == "DD")
            && self.cur.peek_at(1) == Some(&Tok::LParen);
        if !is_call {
            return self.declared_name().map(Factor::Value);
        }
        let (op, _) = self.ident("D or DD")?;
        self.cur.next();
        let name = self.declared_name()?;
        if !self.cur.eat(&Tok::RParen) {
            return Err(self.expected("')'"));
        }
        Ok(if op == "D" { Factor::D1(name) } else { Factor::D2(name) })
    }
}

pub fn render_relation(r: &TrendRelation) -> String {
    format!("rel {} {} {}", r.shape, r.source, r.target)
}

pub fn render_equation(eq: &TrendEquation) -> String {
    format!("eq {eq}")
}

/// Variables first, then relations, then equations, one per line.
pub fn render_model(m: &TrendModel) -> String {
    let mut out = String::new();
    for v in &m.variables {
        out.push_str(&format!("var {} {}\n", v.name, v.value));
    }
    for r in &m.relations {
        out.push_str(&render_relation(r));
        out.push('\n');
    }
    for eq in &m.equations {
        out.push_str(&render_equation(eq));
        out.push('\n');
    }
    out
}
