//! In-memory trend model: variables, pairwise shape relations and trend
//! equations.

use std::fmt;

use crate::algebra::Sign;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub value: Sign,
}

impl Variable {
    pub fn positive(name: impl Into<String>) -> Variable {
        Variable { name: name.into(), value: Sign::Pos }
    }
}

/// Qualitative shape of `Y(X)`: sign of `dY/dX` and of `d²Y/dX²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub slope: Sign,
    pub curvature: Sign,
}

impl Shape {
    /// Supporting effect.
    pub const SUP: Shape = Shape { slope: Sign::Pos, curvature: Sign::Zero };
    /// Reducing effect.
    pub const RED: Shape = Shape { slope: Sign::Neg, curvature: Sign::Zero };

    /// `slope` must be `+` or `-`.
    pub fn new(slope: Sign, curvature: Sign) -> Option<Shape> {
        (slope != Sign::Zero).then_some(Shape { slope, curvature })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Shape::SUP => f.write_str("SUP"),
            Shape::RED => f.write_str("RED"),
            Shape { slope, curvature } => write!(f, "SHAPE {slope}{curvature}"),
        }
    }
}

/// `target` depends on `source` through `shape`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendRelation {
    pub shape: Shape,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    Value(String),
    D1(String),
    D2(String),
}

impl Factor {
    pub fn var(&self) -> &str {
        match self {
            Factor::Value(v) | Factor::D1(v) | Factor::D2(v) => v,
        }
    }

    pub fn order(&self) -> u8 {
        match self {
            Factor::Value(_) => 0,
            Factor::D1(_) => 1,
            Factor::D2(_) => 2,
        }
    }

    /// Time derivative of the factor; `None` past the second derivative.
    pub fn differentiate(&self) -> Option<Factor> {
        match self {
            Factor::Value(v) => Some(Factor::D1(v.clone())),
            Factor::D1(v) => Some(Factor::D2(v.clone())),
            Factor::D2(_) => None,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Value(v) => f.write_str(v),
            Factor::D1(v) => write!(f, "D({v})"),
            Factor::D2(v) => write!(f, "DD({v})"),
        }
    }
}

/// A signed product of factors. Positive constants are already gone, so
/// the coefficient is just `+` or `-`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub sign: Sign,
    pub factors: Vec<Factor>,
}

impl Monomial {
    pub fn new(sign: Sign, factors: Vec<Factor>) -> Monomial {
        debug_assert!(sign != Sign::Zero && !factors.is_empty());
        Monomial { sign, factors }
    }

    pub fn positive(factors: Vec<Factor>) -> Monomial {
        Monomial::new(Sign::Pos, factors)
    }

    pub fn order(&self) -> u8 {
        self.factors.iter().map(Factor::order).max().unwrap_or(0)
    }

    pub fn negated(&self) -> Monomial {
        Monomial { sign: self.sign.negate(), factors: self.factors.clone() }
    }

    /// Product rule. Returns `None` if any factor is already a second
    /// derivative.
    pub fn differentiate(&self) -> Option<Vec<Monomial>> {
        let mut out = Vec::with_capacity(self.factors.len());
        for i in 0..self.factors.len() {
            let mut factors = self.factors.clone();
            factors[i] = factors[i].differentiate()?;
            out.push(Monomial { sign: self.sign, factors });
        }
        Some(out)
    }
}

impl fmt::Display for Monomial {
    /// Renders the factors only; the sign is written by the enclosing sum.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendEquation {
    pub lhs: Vec<Monomial>,
    pub rhs: Vec<Monomial>,
}

impl TrendEquation {
    pub fn order(&self) -> u8 {
        self.lhs.iter().chain(&self.rhs).map(Monomial::order).max().unwrap_or(0)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.lhs.iter().chain(&self.rhs).flat_map(|m| m.factors.iter().map(Factor::var))
    }

    /// One formal time derivative of both sides, or `None` for second-order
    /// equations.
    pub fn differentiate(&self) -> Option<TrendEquation> {
        let side = |ms: &[Monomial]| -> Option<Vec<Monomial>> {
            let mut out = Vec::new();
            for m in ms {
                out.extend(m.differentiate()?);
            }
            Some(out)
        };
        Some(TrendEquation { lhs: side(&self.lhs)?, rhs: side(&self.rhs)? })
    }
}

fn write_sum(f: &mut fmt::Formatter<'_>, side: &[Monomial]) -> fmt::Result {
    if side.is_empty() {
        return f.write_str("0");
    }
    for (i, m) in side.iter().enumerate() {
        match (i, m.sign) {
            (0, Sign::Neg) => f.write_str("-")?,
            (0, _) => {}
            (_, Sign::Neg) => f.write_str(" - ")?,
            _ => f.write_str(" + ")?,
        }
        write!(f, "{m}")?;
    }
    Ok(())
}

impl fmt::Display for TrendEquation {
    /// The equation body without the `eq` keyword, e.g. `D(X) + X*Y = 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, &self.lhs)?;
        f.write_str(" = ")?;
        write_sum(f, &self.rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrendModel {
    pub variables: Vec<Variable>,
    pub relations: Vec<TrendRelation>,
    pub equations: Vec<TrendEquation>,
}

impl TrendModel {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }
}
