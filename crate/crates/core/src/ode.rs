//! Translation of polynomial ODE systems into trend equations.
//!
//! Input format, one declaration per line:
//!
//! ```text
//! param alpha pos      # positive constant
//! param phi prop       # proportion in (0, 1)
//! param k neg          # negative constant
//! ode X = -alpha*X*Y/N
//! ode W = (1 - phi)*alpha*X*Y/N - eta*W
//! ```
//!
//! Every right-hand side is expanded into signed monomials, `(1 - p)`
//! included. Positive constants and divisors are then dropped, leaving the
//! sign and the product of states. The equation for state `S` is written
//! with `D(S)` and every negative monomial on the left and every positive
//! monomial on the right. Like terms are never combined.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::Sign;
use crate::dsl::ParseError;
use crate::lexer::{lex_line, Cursor, Tok};
use crate::model::{Factor, Monomial, TrendEquation, TrendModel, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OdeErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("{0:?} is neither a declared parameter nor a state")]
    UndeclaredSymbol(String),
    #[error("parameter {0:?} declared twice")]
    DuplicateParameter(String),
    #[error("state {0:?} has more than one equation")]
    DuplicateState(String),
    #[error("{0:?} is declared both as a parameter and as a state")]
    ParameterIsState(String),
    #[error("unknown parameter kind {0:?} (expected pos, prop or neg)")]
    UnknownParamKind(String),
    #[error("non-polynomial structure: {0}")]
    NonPolynomial(String),
    #[error("mixed-sign constant factor {0}; only (1 - p) with p a proportion is supported")]
    MixedSignCoefficient(String),
    #[error("term {0} has no state factor and cannot be written as a trend monomial")]
    ConstantTerm(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct OdeError {
    pub line: usize,
    pub column: usize,
    pub kind: OdeErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Positive,
    /// Strictly between zero and one; only used inside `(1 - p)` or as a
    /// positive factor.
    Proportion,
    Negative,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64, String),
    Name(String, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateEquation {
    pub state: String,
    pub rhs: Expr,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    pub params: Vec<(String, ParamKind)>,
    pub equations: Vec<StateEquation>,
}

impl OdeSystem {
    pub fn states(&self) -> Vec<String> {
        self.equations.iter().map(|e| e.state.clone()).collect()
    }
}

fn from_parse(e: ParseError) -> OdeError {
    OdeError { line: e.line, column: e.column, kind: OdeErrorKind::Syntax(e.kind.to_string()) }
}

pub fn parse_ode(text: &str) -> Result<OdeSystem, OdeError> {
    let mut params: Vec<(String, ParamKind)> = Vec::new();
    let mut equations: Vec<StateEquation> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |column, kind| OdeError { line: line_no, column, kind };
        let toks =
            lex_line(line).map_err(|(col, c)| err(col, OdeErrorKind::Syntax(format!("unexpected character {c:?}"))))?;
        if toks.is_empty() {
            continue;
        }
        let mut p = ExprParser { cur: Cursor::new(&toks, line), line: line_no };
        let (kw, kw_col) = p.ident("'param' or 'ode'")?;
        match kw.as_str() {
            "param" => {
                let (name, col) = p.ident("a parameter name")?;
                let (kind, kind_col) = p.ident("pos, prop or neg")?;
                p.finish()?;
                let kind = match kind.as_str() {
                    "pos" => ParamKind::Positive,
                    "prop" => ParamKind::Proportion,
                    "neg" => ParamKind::Negative,
                    _ => return Err(err(kind_col, OdeErrorKind::UnknownParamKind(kind))),
                };
                if params.iter().any(|(n, _)| *n == name) {
                    return Err(err(col, OdeErrorKind::DuplicateParameter(name)));
                }
                params.push((name, kind));
            }
            "ode" => {
                let (state, col) = p.ident("a state name")?;
                if equations.iter().any(|e| e.state == state) {
                    return Err(err(col, OdeErrorKind::DuplicateState(state)));
                }
                if !p.cur.eat(&Tok::Eq) {
                    return Err(from_parse(p.expected("'='")));
                }
                let rhs = p.expr()?;
                p.finish()?;
                equations.push(StateEquation { state, rhs, line: line_no });
            }
            other => {
                return Err(err(kw_col, OdeErrorKind::Syntax(format!("expected 'param' or 'ode', found {other:?}"))))
            }
        }
    }
    if let Some((name, _)) = params.iter().find(|(n, _)| equations.iter().any(|e| e.state == *n)) {
        let line = equations.iter().find(|e| e.state == *name).map_or(1, |e| e.line);
        return Err(OdeError { line, column: 5, kind: OdeErrorKind::ParameterIsState(name.clone()) });
    }
    Ok(OdeSystem { params, equations })
}

struct ExprParser<'a> {
    cur: Cursor<'a>,
    line: usize,
}

impl ExprParser<'_> {
    fn expected(&self, what: &str) -> ParseError {
        ParseError::syntax(self.line, self.cur.col(), format!("expected {what}, found {}", self.cur.describe_next()))
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), OdeError> {
        let col = self.cur.col();
        match self.cur.peek() {
            Some(Tok::Ident(s)) => {
                self.cur.next();
                Ok((s.clone(), col))
            }
            _ => Err(from_parse(self.expected(what))),
        }
    }

    fn finish(&self) -> Result<(), OdeError> {
        if self.cur.at_end() {
            Ok(())
        } else {
            Err(from_parse(self.expected("end of line")))
        }
    }

    fn expr(&mut self) -> Result<Expr, OdeError> {
        let mut lhs = self.term()?;
        loop {
            if self.cur.eat(&Tok::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.cur.eat(&Tok::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, OdeError> {
        let mut lhs = self.unary()?;
        loop {
            let col = self.cur.col();
            if self.cur.eat(&Tok::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.cur.eat(&Tok::Slash) {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), col);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, OdeError> {
        if self.cur.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.cur.eat(&Tok::Plus);
        let base = self.atom()?;
        if !self.cur.eat(&Tok::Caret) {
            return Ok(base);
        }
        let col = self.cur.col();
        match self.cur.next().map(|s| &s.tok) {
            Some(Tok::Number(n)) => n.parse::<u32>().map(|k| Expr::Pow(Box::new(base), k)).map_err(|_| OdeError {
                line: self.line,
                column: col,
                kind: OdeErrorKind::NonPolynomial(format!("exponent {n} is not a non-negative integer")),
            }),
            _ => Err(OdeError {
                line: self.line,
                column: col,
                kind: OdeErrorKind::Syntax("expected an integer exponent".into()),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, OdeError> {
        let col = self.cur.col();
        match self.cur.peek() {
            Some(Tok::Number(n)) => {
                self.cur.next();
                let v: f64 = n.parse().map_err(|_| OdeError {
                    line: self.line,
                    column: col,
                    kind: OdeErrorKind::Syntax(format!("bad number {n:?}")),
                })?;
                Ok(Expr::Num(v, n.clone()))
            }
            Some(Tok::Ident(name)) => {
                self.cur.next();
                if self.cur.peek() == Some(&Tok::LParen) {
                    return Err(OdeError {
                        line: self.line,
                        column: col,
                        kind: OdeErrorKind::NonPolynomial(format!("function call {name}(...)")),
                    });
                }
                Ok(Expr::Name(name.clone(), col))
            }
            Some(Tok::LParen) => {
                self.cur.next();
                let inner = self.expr()?;
                if !self.cur.eat(&Tok::RParen) {
                    return Err(from_parse(self.expected("')'")));
                }
                Ok(inner)
            }
            _ => Err(from_parse(self.expected("a number, name or '('"))),
        }
    }
}

/// One expanded term before constant elimination.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    sign: Sign,
    numer: Vec<String>,
    denom: Vec<String>,
    states: Vec<String>,
}

impl Term {
    fn unit() -> Term {
        Term { sign: Sign::Pos, numer: Vec::new(), denom: Vec::new(), states: Vec::new() }
    }

    fn times(&self, other: &Term) -> Term {
        Term {
            sign: self.sign.times(other.sign),
            numer: [self.numer.clone(), other.numer.clone()].concat(),
            denom: [self.denom.clone(), other.denom.clone()].concat(),
            states: [self.states.clone(), other.states.clone()].concat(),
        }
    }

    fn negated(mut self) -> Term {
        self.sign = self.sign.negate();
        self
    }

    fn render(&self) -> String {
        let mut factors: Vec<&str> = self.numer.iter().map(String::as_str).collect();
        factors.extend(self.states.iter().map(String::as_str));
        let mut s = String::new();
        if self.sign == Sign::Neg {
            s.push('-');
        }
        if factors.is_empty() {
            s.push('1');
        } else {
            s.push_str(&factors.join("*"));
        }
        for d in &self.denom {
            s.push('/');
            s.push_str(d);
        }
        s
    }
}

struct Expander<'a> {
    params: HashMap<&'a str, ParamKind>,
    states: HashSet<&'a str>,
    line: usize,
}

impl Expander<'_> {
    fn err(&self, column: usize, kind: OdeErrorKind) -> OdeError {
        OdeError { line: self.line, column, kind }
    }

    fn has_state(&self, e: &Expr) -> bool {
        match e {
            Expr::Num(..) => false,
            Expr::Name(n, _) => self.states.contains(n.as_str()),
            Expr::Neg(a) | Expr::Pow(a, _) => self.has_state(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                self.has_state(a) || self.has_state(b)
            }
        }
    }

    fn first_col(e: &Expr) -> usize {
        match e {
            Expr::Name(_, c) => *c,
            Expr::Num(..) => 0,
            Expr::Neg(a) | Expr::Pow(a, _) => Self::first_col(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => match Self::first_col(a) {
                0 => Self::first_col(b),
                c => c,
            },
        }
    }

    /// A constant sum whose expansion mixes signs is only accepted as
    /// `1 - p` with `p` a proportion.
    fn check_constant_sum(&self, e: &Expr, terms: &[Term]) -> Result<(), OdeError> {
        let mixed = terms.iter().any(|t| t.sign == Sign::Pos) && terms.iter().any(|t| t.sign == Sign::Neg);
        if !mixed || self.has_state(e) {
            return Ok(());
        }
        if let Expr::Sub(a, b) = e {
            if let (Expr::Num(one, _), Expr::Name(p, _)) = (a.as_ref(), b.as_ref()) {
                if *one == 1.0 && self.params.get(p.as_str()) == Some(&ParamKind::Proportion) {
                    return Ok(());
                }
            }
        }
        Err(self.err(Self::first_col(e), OdeErrorKind::MixedSignCoefficient(render_expr(e))))
    }

    fn expand(&self, e: &Expr) -> Result<Vec<Term>, OdeError> {
        Ok(match e {
            Expr::Num(v, text) => {
                if *v == 0.0 {
                    Vec::new()
                } else {
                    let mut t = Term::unit();
                    if *v != 1.0 {
                        t.numer.push(text.clone());
                    }
                    vec![t]
                }
            }
            Expr::Name(n, col) => {
                let mut t = Term::unit();
                if self.states.contains(n.as_str()) {
                    t.states.push(n.clone());
                } else {
                    match self.params.get(n.as_str()) {
                        Some(ParamKind::Positive | ParamKind::Proportion) => t.numer.push(n.clone()),
                        Some(ParamKind::Negative) => {
                            t.numer.push(n.clone());
                            t.sign = Sign::Neg;
                        }
                        None => return Err(self.err(*col, OdeErrorKind::UndeclaredSymbol(n.clone()))),
                    }
                }
                vec![t]
            }
            Expr::Neg(a) => self.expand(a)?.into_iter().map(Term::negated).collect(),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let mut terms = self.expand(a)?;
                let rhs = self.expand(b)?;
                if matches!(e, Expr::Sub(..)) {
                    terms.extend(rhs.into_iter().map(Term::negated));
                } else {
                    terms.extend(rhs);
                }
                self.check_constant_sum(e, &terms)?;
                terms
            }
            Expr::Mul(a, b) => {
                let (ta, tb) = (self.expand(a)?, self.expand(b)?);
                ta.iter().flat_map(|x| tb.iter().map(move |y| x.times(y))).collect()
            }
            Expr::Div(a, b, col) => {
                let divisor = self.expand(b)?;
                let ok = matches!(&divisor[..], [t] if t.sign == Sign::Pos && t.states.is_empty());
                if !ok {
                    return Err(self.err(
                        *col,
                        OdeErrorKind::NonPolynomial(format!(
                            "division by {}; only positive constant divisors are allowed",
                            render_expr(b)
                        )),
                    ));
                }
                let d = &divisor[0];
                self.expand(a)?
                    .into_iter()
                    .map(|mut t| {
                        t.denom.extend(d.numer.iter().cloned());
                        t.numer.extend(d.denom.iter().cloned());
                        t
                    })
                    .collect()
            }
            Expr::Pow(a, k) => {
                let base = self.expand(a)?;
                let mut acc = vec![Term::unit()];
                for _ in 0..*k {
                    acc = acc.iter().flat_map(|x| base.iter().map(move |y| x.times(y))).collect();
                }
                acc
            }
        })
    }
}

fn render_expr(e: &Expr) -> String {
    fn prec(e: &Expr) -> u8 {
        match e {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            _ => 4,
        }
    }
    fn wrap(e: &Expr, min: u8) -> String {
        if prec(e) < min {
            format!("({})", render_expr(e))
        } else {
            render_expr(e)
        }
    }
    match e {
        Expr::Num(_, t) => t.clone(),
        Expr::Name(n, _) => n.clone(),
        Expr::Neg(a) => format!("-{}", wrap(a, 3)),
        Expr::Add(a, b) => format!("{} + {}", wrap(a, 1), wrap(b, 2)),
        Expr::Sub(a, b) => format!("{} - {}", wrap(a, 1), wrap(b, 2)),
        Expr::Mul(a, b) => format!("{}*{}", wrap(a, 2), wrap(b, 3)),
        Expr::Div(a, b, _) => format!("{}/{}", wrap(a, 2), wrap(b, 3)),
        Expr::Pow(a, k) => format!("{}^{k}", wrap(a, 4)),
    }
}

/// How one expanded source term ended up in the output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermProvenance {
    pub state: String,
    /// The expanded term with its constants, e.g. `-phi*alpha*X*Y/N`.
    pub term: String,
    /// The emitted trend monomial, e.g. `X*Y`.
    pub monomial: String,
    pub side: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationReport {
    /// States in equation order; all declared positive.
    pub states: Vec<String>,
    pub equations: Vec<TrendEquation>,
    pub provenance: Vec<TermProvenance>,
    /// Constant factors and divisors removed, in order of first appearance.
    pub eliminated: Vec<String>,
}

impl TranslationReport {
    pub fn to_model(&self) -> TrendModel {
        TrendModel {
            variables: self.states.iter().map(Variable::positive).collect(),
            relations: Vec::new(),
            equations: self.equations.clone(),
        }
    }

    /// `var` and `eq` lines.
    pub fn render(&self) -> String {
        crate::dsl::render_model(&self.to_model())
    }
}

pub fn translate(sys: &OdeSystem) -> Result<TranslationReport, OdeError> {
    let states: Vec<String> = sys.states();
    let mut expander = Expander {
        params: sys.params.iter().map(|(n, k)| (n.as_str(), *k)).collect(),
        states: states.iter().map(String::as_str).collect(),
        line: 0,
    };
    let mut equations = Vec::new();
    let mut provenance = Vec::new();
    let mut eliminated: Vec<String> = Vec::new();
    for eq in &sys.equations {
        expander.line = eq.line;
        let terms = expander.expand(&eq.rhs)?;
        let mut lhs = vec![Monomial::positive(vec![Factor::D1(eq.state.clone())])];
        let mut rhs = Vec::new();
        for t in terms {
            if t.states.is_empty() {
                return Err(OdeError { line: eq.line, column: 1, kind: OdeErrorKind::ConstantTerm(t.render()) });
            }
            for c in t.numer.iter().chain(&t.denom) {
                if !eliminated.contains(c) {
                    eliminated.push(c.clone());
                }
            }
            let mono = Monomial::positive(t.states.iter().cloned().map(Factor::Value).collect());
            let side = if t.sign == Sign::Neg { "lhs" } else { "rhs" };
            provenance.push(TermProvenance {
                state: eq.state.clone(),
                term: t.render(),
                monomial: mono.to_string(),
                side,
            });
            if t.sign == Sign::Neg {
                lhs.push(mono);
            } else {
                rhs.push(mono);
            }
        }
        equations.push(TrendEquation { lhs, rhs });
    }
    Ok(TranslationReport { states, equations, provenance, eliminated })
}

/// Parses and translates an ODE document in one step.
pub fn translate_text(text: &str) -> Result<TranslationReport, OdeError> {
    translate(&parse_ode(text)?)
}
