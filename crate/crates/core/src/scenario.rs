//! Scenarios: total assignments of trend triplets to a model's variables.

use std::fmt;

use thiserror::Error;

use crate::algebra::{Sign, Triplet, TripletPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Value, first and second derivative.
    Full,
    /// Second derivatives ignored; rendered as `*`.
    FirstOrder,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::FirstOrder => "first-order",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Mode::Full),
            "first-order" => Ok(Mode::FirstOrder),
            other => Err(format!("unknown mode {other:?} (expected full or first-order)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("unknown scenario id {0}")]
    UnknownId(usize),
}

/// One scenario. `triplets` is aligned with the owning set's variable list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub id: usize,
    pub triplets: Vec<Triplet>,
}

impl Scenario {
    /// All first derivatives zero, and all second derivatives zero where
    /// they are specified.
    pub fn is_steady_state(&self) -> bool {
        self.triplets.iter().all(|t| t.d1 == Sign::Zero && t.d2_sign().is_none_or(|d2| d2 == Sign::Zero))
    }
}

pub fn is_steady_state(s: &Scenario) -> bool {
    s.is_steady_state()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSet {
    pub variables: Vec<String>,
    pub mode: Mode,
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn empty(variables: Vec<String>, mode: Mode) -> ScenarioSet {
        ScenarioSet { variables, mode, scenarios: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn get(&self, id: usize) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn ids(&self) -> Vec<usize> {
        self.scenarios.iter().map(|s| s.id).collect()
    }

    pub fn triplet(&self, scenario: &Scenario, name: &str) -> Option<Triplet> {
        self.index_of(name).map(|i| scenario.triplets[i])
    }

    pub fn steady_states(&self) -> impl Iterator<Item = &Scenario> {
        self.scenarios.iter().filter(|s| s.is_steady_state())
    }

    /// Sorts into canonical order and renumbers from 1.
    pub fn canonicalize(&mut self) {
        self.scenarios.sort_by(|a, b| a.triplets.cmp(&b.triplets));
        self.scenarios.dedup_by(|a, b| a.triplets == b.triplets);
        for (i, s) in self.scenarios.iter_mut().enumerate() {
            s.id = i + 1;
        }
    }

    /// True when both sets contain the same triplet assignments, ignoring ids
    /// and order. Variables are matched by name.
    pub fn same_assignments(&self, other: &ScenarioSet) -> bool {
        let Some(mut a) = self.keyed() else { return false };
        let Some(mut b) = other.reordered_like(self).and_then(|o| o.keyed()) else { return false };
        a.sort();
        b.sort();
        a == b
    }

    fn keyed(&self) -> Option<Vec<Vec<Triplet>>> {
        Some(self.scenarios.iter().map(|s| s.triplets.clone()).collect())
    }

    /// This set with its columns permuted into `like`'s variable order.
    pub fn reordered_like(&self, like: &ScenarioSet) -> Option<ScenarioSet> {
        if self.variables.len() != like.variables.len() {
            return None;
        }
        let perm: Vec<usize> = like.variables.iter().map(|n| self.index_of(n)).collect::<Option<_>>()?;
        Some(ScenarioSet {
            variables: like.variables.clone(),
            mode: self.mode,
            scenarios: self
                .scenarios
                .iter()
                .map(|s| Scenario { id: s.id, triplets: perm.iter().map(|&i| s.triplets[i]).collect() })
                .collect(),
        })
    }
}

/// Keeps the scenarios whose triplets match every goal pattern. Ids and
/// order are preserved.
pub fn filter_scenarios(ss: &ScenarioSet, goals: &[(String, TripletPattern)]) -> Result<ScenarioSet, ScenarioError> {
    let resolved: Vec<(usize, TripletPattern)> = goals
        .iter()
        .map(|(name, p)| ss.index_of(name).map(|i| (i, *p)).ok_or_else(|| ScenarioError::UnknownVariable(name.clone())))
        .collect::<Result<_, _>>()?;
    let scenarios =
        ss.scenarios.iter().filter(|s| resolved.iter().all(|(i, p)| p.matches(&s.triplets[*i]))).cloned().collect();
    Ok(ScenarioSet { variables: ss.variables.clone(), mode: ss.mode, scenarios })
}
