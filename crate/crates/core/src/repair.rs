//! Trend models from correlation matrices, and removal of the weakest
//! coefficients until the model has a non-trivial solution.

use serde::Serialize;

use crate::correlation::CorrelationMatrix;
use crate::model::{Shape, TrendModel, TrendRelation, Variable};
use crate::scenario::{Mode, ScenarioSet};
use crate::solver::{solve, SolveError};

/// `SUP Xi Xj` for each positive upper-triangle entry, `RED Xi Xj` for each
/// negative one. Zeros and the diagonal are skipped.
pub fn derive_relations(c: &CorrelationMatrix) -> TrendModel {
    let n = c.len();
    let mut relations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = c.get(i, j);
            let shape = if v > 0.0 {
                Shape::SUP
            } else if v < 0.0 {
                Shape::RED
            } else {
                continue;
            };
            relations.push(TrendRelation { shape, source: c.names[i].clone(), target: c.names[j].clone() });
        }
    }
    TrendModel { variables: c.names.iter().map(Variable::positive).collect(), relations, equations: Vec::new() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalStep {
    pub pair: [String; 2],
    pub value: f64,
    /// Scenario count after the removal.
    pub scenarios: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairTrace {
    pub steps: Vec<RemovalStep>,
    /// Every coefficient was removed and the solution is still trivial.
    pub exhausted: bool,
    pub model: TrendModel,
    pub scenarios: ScenarioSet,
}

impl RepairTrace {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            steps: &'a [RemovalStep],
            exhausted: bool,
        }
        let mut out = serde_json::to_string_pretty(&Doc { steps: &self.steps, exhausted: self.exhausted })
            .expect("trace serializes");
        out.push('\n');
        out
    }
}

/// Empty, or nothing but the steady state.
pub fn is_trivial(ss: &ScenarioSet) -> bool {
    ss.scenarios.iter().all(|s| s.is_steady_state())
}

/// Smallest nonzero `|c_ij|` above the diagonal; ties go to the first pair
/// in row-major order.
fn weakest(c: &CorrelationMatrix) -> Option<(usize, usize)> {
    let n = c.len();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let mag = c.get(i, j).abs();
            if mag == 0.0 {
                continue;
            }
            if best.is_none_or(|(b, _, _)| mag < b) {
                best = Some((mag, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub fn repair(c: &CorrelationMatrix) -> Result<RepairTrace, SolveError> {
    let mut matrix = c.clone();
    let mut steps: Vec<RemovalStep> = Vec::new();
    loop {
        let model = derive_relations(&matrix);
        let scenarios = solve(&model, Mode::Full)?;
        if let Some(last) = steps.last_mut() {
            last.scenarios = scenarios.len();
        }
        if !is_trivial(&scenarios) {
            return Ok(RepairTrace { steps, exhausted: false, model, scenarios });
        }
        let Some((i, j)) = weakest(&matrix) else {
            return Ok(RepairTrace { steps, exhausted: true, model, scenarios });
        };
        steps.push(RemovalStep {
            pair: [matrix.names[i].clone(), matrix.names[j].clone()],
            value: matrix.get(i, j),
            scenarios: 0,
        });
        matrix.set_symmetric(i, j, 0.0);
    }
}
