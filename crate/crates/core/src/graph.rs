//! Transitional graph over a scenario set.
//!
//! There is an edge `a -> b` when the scenarios differ and every variable
//! either keeps its triplet or moves to one of its permitted successors.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{is_legal_step, Triplet};
use crate::scenario::ScenarioSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("scenario {id}: {var} = {triplet} has no transition rules (values must be positive and d2 definite)")]
    Unsupported { id: usize, var: String, triplet: Triplet },
    #[error("unknown scenario id {0}")]
    UnknownId(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    pub nodes: ScenarioSet,
    /// Sorted ascending, no self-loops.
    pub edges: BTreeSet<(usize, usize)>,
}

fn step_ok(from: &[Triplet], to: &[Triplet]) -> bool {
    from.iter().zip(to).all(|(a, b)| is_legal_step(a, b).unwrap_or(false))
}

pub fn build_graph(ss: &ScenarioSet) -> Result<TransitionGraph, GraphError> {
    for s in &ss.scenarios {
        for (t, var) in s.triplets.iter().zip(&ss.variables) {
            if is_legal_step(t, t).is_err() {
                return Err(GraphError::Unsupported { id: s.id, var: var.clone(), triplet: *t });
            }
        }
    }
    let edges = ss
        .scenarios
        .par_iter()
        .flat_map_iter(|a| {
            ss.scenarios
                .iter()
                .filter(move |b| a.triplets != b.triplets && step_ok(&a.triplets, &b.triplets))
                .map(move |b| (a.id, b.id))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(TransitionGraph { nodes: ss.clone(), edges })
}

impl TransitionGraph {
    pub fn successors(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((id, 0)..=(id, usize::MAX)).map(|&(_, b)| b)
    }

    fn check_id(&self, id: usize) -> Result<(), GraphError> {
        self.nodes.get(id).map(|_| ()).ok_or(GraphError::UnknownId(id))
    }

    /// Ids reachable from `from`, including `from` itself.
    pub fn reachable_set(&self, from: usize) -> Result<BTreeSet<usize>, GraphError> {
        self.check_id(from)?;
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(id) = queue.pop_front() {
            for next in self.successors(id) {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        Ok(seen)
    }

    pub fn reachable(&self, from: usize, to: usize) -> Result<bool, GraphError> {
        self.check_id(to)?;
        Ok(self.reachable_set(from)?.contains(&to))
    }

    /// Graphviz rendering in ascending id order. Each node is labelled with
    /// its id and one `NAME=triplet` line per variable.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        let mut nodes: Vec<_> = self.nodes.scenarios.iter().collect();
        nodes.sort_by_key(|s| s.id);
        for s in nodes {
            let mut label = s.id.to_string();
            for (name, t) in self.nodes.variables.iter().zip(&s.triplets) {
                let _ = write!(label, "\\n{name}={t}");
            }
            let _ = writeln!(out, "  {} [label=\"{label}\"];", s.id);
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  {a} -> {b};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            nodes: Vec<usize>,
            edges: Vec<[usize; 2]>,
        }
        let mut nodes = self.nodes.ids();
        nodes.sort_unstable();
        let doc = Doc { nodes, edges: self.edges.iter().map(|&(a, b)| [a, b]).collect() };
        let mut out = serde_json::to_string(&doc).expect("graph serializes");
        out.push('\n');
        out
    }

    /// Reflexive-transitive closure as a map from id to reachable ids.
    pub fn closure(&self) -> HashMap<usize, BTreeSet<usize>> {
        self.nodes.ids().into_iter().map(|id| (id, self.reachable_set(id).expect("node id"))).collect()
    }
}

pub fn export_dot(g: &TransitionGraph) -> String {
    g.to_dot()
}

pub fn export_json(g: &TransitionGraph) -> String {
    g.to_json()
}

pub fn reachable(g: &TransitionGraph, from: usize, to: usize) -> Result<bool, GraphError> {
    g.reachable(from, to)
}
