//! JSON interchange for scenario sets.
//!
//! ```json
//! {"variables": ["A", "B"],
//!  "scenarios": [{"id": 1, "triplets": {"A": "+++", "B": "+--"}}]}
//! ```
//!
//! Solver output adds a top-level `"mode"` and `"steadyState": true` on
//! steady scenarios; both are optional on input.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Map;
use thiserror::Error;

use crate::algebra::Triplet;
use crate::scenario::{Mode, Scenario, ScenarioSet};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("malformed scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate variable {0:?}")]
    DuplicateVariable(String),
    #[error("duplicate scenario id {0}")]
    DuplicateId(usize),
    #[error("scenario {id}: no triplet for variable {var:?}")]
    MissingTriplet { id: usize, var: String },
    #[error("scenario {id}: variable {var:?} is not listed in \"variables\"")]
    UnknownVariable { id: usize, var: String },
    #[error("scenario {id}: bad triplet {text:?} for {var:?}")]
    BadTriplet { id: usize, var: String, text: String },
    #[error("scenario {id}: {var:?} mixes first-order and full triplets")]
    MixedOrder { id: usize, var: String },
    #[error("bad mode: {0}")]
    BadMode(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    variables: Vec<String>,
    scenarios: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    id: usize,
    triplets: Map<String, serde_json::Value>,
    #[serde(rename = "steadyState", default, skip_serializing_if = "std::ops::Not::not")]
    steady_state: bool,
}

/// Parses a scenario fixture. Scenario ids are kept as given.
pub fn parse_scenarios(text: &str) -> Result<ScenarioSet, FixtureError> {
    let doc: Document = serde_json::from_str(text)?;
    let mut seen = HashSet::new();
    for v in &doc.variables {
        if !seen.insert(v.as_str()) {
            return Err(FixtureError::DuplicateVariable(v.clone()));
        }
    }
    let mut ids = HashSet::new();
    let mut scenarios = Vec::with_capacity(doc.scenarios.len());
    let mut first_order: Option<bool> = None;
    for entry in &doc.scenarios {
        let id = entry.id;
        if !ids.insert(id) {
            return Err(FixtureError::DuplicateId(id));
        }
        if let Some(var) = entry.triplets.keys().find(|k| !seen.contains(k.as_str())) {
            return Err(FixtureError::UnknownVariable { id, var: var.clone() });
        }
        let mut triplets = Vec::with_capacity(doc.variables.len());
        for var in &doc.variables {
            let raw = entry.triplets.get(var).ok_or_else(|| FixtureError::MissingTriplet { id, var: var.clone() })?;
            let bad = || FixtureError::BadTriplet { id, var: var.clone(), text: raw.to_string() };
            let t: Triplet = raw.as_str().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            match first_order {
                None => first_order = Some(t.is_first_order()),
                Some(fo) if fo != t.is_first_order() => return Err(FixtureError::MixedOrder { id, var: var.clone() }),
                _ => {}
            }
            triplets.push(t);
        }
        scenarios.push(Scenario { id, triplets });
    }
    let inferred = if first_order == Some(true) { Mode::FirstOrder } else { Mode::Full };
    let mode = match doc.mode.as_deref() {
        None => inferred,
        Some(m) => {
            let mode: Mode = m.parse().map_err(FixtureError::BadMode)?;
            if first_order.is_some() && mode != inferred {
                return Err(FixtureError::BadMode(format!("{m:?} does not match the triplets")));
            }
            mode
        }
    };
    Ok(ScenarioSet { variables: doc.variables, mode, scenarios })
}

/// Pretty-printed JSON with `"mode"` and `"steadyState"` markers. The output
/// is byte-stable for a given set and ends with a newline.
pub fn render_scenarios(ss: &ScenarioSet) -> String {
    let doc = Document {
        mode: Some(ss.mode.as_str().to_string()),
        variables: ss.variables.clone(),
        scenarios: ss
            .scenarios
            .iter()
            .map(|s| Entry {
                id: s.id,
                triplets: ss
                    .variables
                    .iter()
                    .zip(&s.triplets)
                    .map(|(n, t)| (n.clone(), serde_json::Value::String(t.to_string())))
                    .collect(),
                steady_state: s.is_steady_state(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("scenario document serializes");
    out.push('\n');
    out
}
