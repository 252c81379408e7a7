//! Compilation of relations and equations into sign constraints over the
//! (value, d1, d2) slots of each variable.
//!
//! A shape relation `Y(X)` with slope `s1` and curvature `s2` constrains the
//! chain rule signs
//!
//! ```text
//! dY   = s1 * dX
//! ddY in s2 * dX^2 + s1 * ddX
//! ```
//!
//! An equation holds when zero is among the possible signs of `LHS - RHS`.
//! Sums are never cancelled, so `A = A` is satisfied for any sign of `A` but
//! `A + B = 0` with both positive is not.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::{Sign, SignSet};
use crate::model::{Factor, Monomial, Shape, TrendEquation, TrendModel, Variable};
use crate::scenario::Mode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("relation {relation} touches {var:?}, whose value is not positive")]
    NonPositiveRelation { relation: String, var: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {0:?} declared twice")]
    DuplicateVariable(String),
    #[error("relation from {0:?} to itself")]
    SelfRelation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Value,
    D1,
    D2,
}

/// Anything that can report the possible signs of a variable slot.
pub trait SlotView {
    fn slot(&self, var: usize, slot: Slot) -> SignSet;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledMonomial {
    pub sign: Sign,
    pub factors: Vec<(usize, Slot)>,
}

/// Where a zero-sum constraint came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Equation(usize),
    /// Time derivative of the equation with this index.
    Derived(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Relation {
        shape: Shape,
        source: usize,
        target: usize,
        /// Whether the curvature (second derivative) condition applies.
        curvature: bool,
    },
    ZeroSum {
        terms: Vec<CompiledMonomial>,
        origin: Origin,
        /// The equation as written, used in reports.
        text: String,
    },
}

impl Constraint {
    /// Variables mentioned by the constraint, without duplicates.
    pub fn variables(&self) -> Vec<usize> {
        match self {
            Constraint::Relation { source, target, .. } => vec![*source, *target],
            Constraint::ZeroSum { terms, .. } => {
                let mut seen = HashSet::new();
                terms.iter().flat_map(|t| t.factors.iter().map(|f| f.0)).filter(|v| seen.insert(*v)).collect()
            }
        }
    }

    /// Whether some choice of signs within the view satisfies the
    /// constraint, evaluating each slot occurrence independently. With
    /// singleton slots this is an exact test; with wider sets it is a
    /// sound over-approximation.
    pub fn admits<V: SlotView + ?Sized>(&self, view: &V) -> bool {
        match self {
            Constraint::Relation { shape, source, target, curvature } => {
                let slope = SignSet::single(shape.slope);
                let dx = view.slot(*source, Slot::D1);
                if slope.qmul(dx).intersect(view.slot(*target, Slot::D1)).is_none() {
                    return false;
                }
                if !curvature {
                    return true;
                }
                let dx_sq = SignSet::from_signs(dx.iter().map(Sign::square)).expect("non-empty");
                let bend = SignSet::single(shape.curvature).qmul(dx_sq);
                let carried = slope.qmul(view.slot(*source, Slot::D2));
                bend.qadd(carried).intersect(view.slot(*target, Slot::D2)).is_some()
            }
            Constraint::ZeroSum { terms, .. } => evaluate_sum(terms, view).contains(Sign::Zero),
        }
    }
}

/// Possible signs of a signed sum of products.
pub fn evaluate_sum<V: SlotView + ?Sized>(terms: &[CompiledMonomial], view: &V) -> SignSet {
    terms.iter().fold(SignSet::ZERO, |acc, term| {
        let product =
            term.factors.iter().fold(SignSet::single(term.sign), |p, &(var, slot)| p.qmul(view.slot(var, slot)));
        acc.qadd(product)
    })
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Relation { shape, source, target, .. } => write!(f, "rel {shape} #{source} #{target}"),
            Constraint::ZeroSum { text, origin: Origin::Derived(_), .. } => write!(f, "d/dt: {text}"),
            Constraint::ZeroSum { text, .. } => f.write_str(text),
        }
    }
}

/// A model reduced to index-based constraints, ready for search.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pub variables: Vec<Variable>,
    pub mode: Mode,
    pub constraints: Vec<Constraint>,
}

impl CompiledModel {
    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    /// Constraints that some scenario (as a view) violates.
    pub fn violations<'a, V: SlotView + ?Sized>(&'a self, view: &'a V) -> impl Iterator<Item = &'a Constraint> + 'a {
        self.constraints.iter().filter(move |c| !c.admits(view))
    }

    /// Human-readable form of a constraint with variable names filled in.
    pub fn describe(&self, c: &Constraint) -> String {
        match c {
            Constraint::Relation { shape, source, target, .. } => {
                format!("rel {shape} {} {}", self.variables[*source].name, self.variables[*target].name)
            }
            other => other.to_string(),
        }
    }
}

fn compile_side(m: &TrendModel, side: &[Monomial], negate: bool) -> Result<Vec<CompiledMonomial>, CompileError> {
    side.iter()
        .map(|mono| {
            let factors = mono
                .factors
                .iter()
                .map(|f| {
                    let idx = m.index_of(f.var()).ok_or_else(|| CompileError::UnknownVariable(f.var().into()))?;
                    let slot = match f {
                        Factor::Value(_) => Slot::Value,
                        Factor::D1(_) => Slot::D1,
                        Factor::D2(_) => Slot::D2,
                    };
                    Ok((idx, slot))
                })
                .collect::<Result<_, CompileError>>()?;
            let sign = if negate { mono.sign.negate() } else { mono.sign };
            Ok(CompiledMonomial { sign, factors })
        })
        .collect()
}

fn zero_sum(m: &TrendModel, eq: &TrendEquation, origin: Origin) -> Result<Constraint, CompileError> {
    let mut terms = compile_side(m, &eq.lhs, false)?;
    terms.extend(compile_side(m, &eq.rhs, true)?);
    Ok(Constraint::ZeroSum { terms, origin, text: eq.to_string() })
}

/// Compiles a model. In full mode every equation of order at most one is
/// also differentiated once and the derivative added as a constraint. In
/// first-order mode curvature conditions and second-order equations are
/// dropped.
pub fn compile(m: &TrendModel, mode: Mode) -> Result<CompiledModel, CompileError> {
    let mut seen = HashSet::new();
    for v in &m.variables {
        if !seen.insert(v.name.as_str()) {
            return Err(CompileError::DuplicateVariable(v.name.clone()));
        }
    }
    let mut constraints = Vec::new();
    for r in &m.relations {
        let lookup = |name: &str| m.index_of(name).ok_or_else(|| CompileError::UnknownVariable(name.into()));
        let (source, target) = (lookup(&r.source)?, lookup(&r.target)?);
        if source == target {
            return Err(CompileError::SelfRelation(r.source.clone()));
        }
        for idx in [source, target] {
            if m.variables[idx].value != Sign::Pos {
                return Err(CompileError::NonPositiveRelation {
                    relation: crate::dsl::render_relation(r),
                    var: m.variables[idx].name.clone(),
                });
            }
        }
        constraints.push(Constraint::Relation { shape: r.shape, source, target, curvature: mode == Mode::Full });
    }
    for (i, eq) in m.equations.iter().enumerate() {
        match mode {
            Mode::Full => {
                constraints.push(zero_sum(m, eq, Origin::Equation(i))?);
                // Second-order equations would need third derivatives.
                if let Some(derived) = eq.differentiate() {
                    constraints.push(zero_sum(m, &derived, Origin::Derived(i))?);
                }
            }
            Mode::FirstOrder if eq.order() <= 1 => constraints.push(zero_sum(m, eq, Origin::Equation(i))?),
            Mode::FirstOrder => {}
        }
    }
    Ok(CompiledModel { variables: m.variables.clone(), mode, constraints })
}
