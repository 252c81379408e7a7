//! Re-evaluation of given scenarios against a model's constraints.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{SignSet, Triplet};
use crate::constraint::{compile, CompileError, Slot, SlotView};
use crate::dsl::render_model;
use crate::model::TrendModel;
use crate::scenario::ScenarioSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("scenarios lack model variable {0:?}")]
    MissingVariable(String),
}

impl SlotView for [Triplet] {
    fn slot(&self, var: usize, slot: Slot) -> SignSet {
        let t = &self[var];
        match slot {
            Slot::Value => SignSet::single(t.value),
            Slot::D1 => SignSet::single(t.d1),
            Slot::D2 => t.d2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub scenario: usize,
    pub constraint: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub mode: &'static str,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Checks every scenario against the model compiled in the scenario set's
/// mode. Scenario variables are matched by name; extra ones are ignored.
/// A value sign that differs from the declaration counts as a violation.
pub fn check_scenarios(m: &TrendModel, ss: &ScenarioSet) -> Result<CheckReport, CheckError> {
    let compiled = compile(m, ss.mode)?;
    let columns: Vec<usize> = m
        .variables
        .iter()
        .map(|v| ss.index_of(&v.name).ok_or_else(|| CheckError::MissingVariable(v.name.clone())))
        .collect::<Result<_, _>>()?;
    let mut violations = Vec::new();
    for s in &ss.scenarios {
        let row: Vec<Triplet> = columns.iter().map(|&c| s.triplets[c]).collect();
        for (v, t) in m.variables.iter().zip(&row) {
            if t.value != v.value {
                let decl = render_model(&TrendModel { variables: vec![v.clone()], ..Default::default() });
                violations.push(Violation { scenario: s.id, constraint: decl.trim_end().to_string() });
            }
        }
        for c in compiled.violations(row.as_slice()) {
            violations.push(Violation { scenario: s.id, constraint: compiled.describe(c) });
        }
    }
    Ok(CheckReport { mode: ss.mode.as_str(), checked: ss.len(), violations })
}
