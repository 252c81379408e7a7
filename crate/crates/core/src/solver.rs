//! Scenario enumeration.
//!
//! Each variable's unknown is its `(d1, d2)` pair (just `d1` in first-order
//! mode), giving a domain of nine (or three) candidates. The search assigns
//! variables in declaration order and candidates in canonical sign order,
//! pruning domains after every assignment until a fixpoint: a candidate is
//! dropped when a constraint can no longer be satisfied with it, judged by
//! evaluating the constraint over the current domains as sign sets. Complete
//! assignments are re-checked exactly before they are emitted.

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Sign, SignSet, Triplet};
use crate::constraint::{compile, CompileError, CompiledModel, Slot, SlotView};
use crate::model::TrendModel;
use crate::scenario::{Mode, Scenario, ScenarioSet};

/// Largest model `brute_force_solve` accepts by default.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("brute force over {vars} variables exceeds the cap of {cap}")]
    CapExceeded { vars: usize, cap: usize },
}

/// Candidate `(d1, d2)` values for one variable, in canonical order.
fn candidates(mode: Mode) -> Vec<(Sign, SignSet)> {
    match mode {
        Mode::Full => Sign::ALL
            .into_iter()
            .flat_map(|d1| Sign::ALL.into_iter().map(move |d2| (d1, SignSet::single(d2))))
            .collect(),
        Mode::FirstOrder => Sign::ALL.into_iter().map(|d1| (d1, SignSet::ALL)).collect(),
    }
}

fn bits(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |b| mask & (1 << b) != 0)
}

/// Per-variable candidate masks, viewed as sign sets per slot.
struct Domains<'a> {
    values: &'a [Sign],
    candidates: &'a [(Sign, SignSet)],
    masks: Vec<u16>,
}

impl SlotView for Domains<'_> {
    fn slot(&self, var: usize, slot: Slot) -> SignSet {
        match slot {
            Slot::Value => SignSet::single(self.values[var]),
            Slot::D1 => SignSet::from_signs(bits(self.masks[var]).map(|b| self.candidates[b].0)).expect("non-empty"),
            Slot::D2 => bits(self.masks[var]).map(|b| self.candidates[b].1).reduce(SignSet::union).expect("non-empty"),
        }
    }
}

struct Search<'a> {
    model: &'a CompiledModel,
    values: Vec<Sign>,
    candidates: Vec<(Sign, SignSet)>,
    scope: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(model: &'a CompiledModel) -> Search<'a> {
        Search {
            model,
            values: model.variables.iter().map(|v| v.value).collect(),
            candidates: candidates(model.mode),
            scope: model.constraints.iter().map(|c| c.variables()).collect(),
        }
    }

    fn domains(&self, masks: Vec<u16>) -> Domains<'_> {
        Domains { values: &self.values, candidates: &self.candidates, masks }
    }

    /// Narrows domains to a fixpoint. Returns false on a wipe-out.
    fn propagate(&self, doms: &mut Domains<'_>) -> bool {
        loop {
            let mut changed = false;
            for (c, scope) in self.model.constraints.iter().zip(&self.scope) {
                for &var in scope {
                    let before = doms.masks[var];
                    if before.count_ones() < 2 {
                        continue;
                    }
                    let mut keep = 0u16;
                    for b in bits(before) {
                        doms.masks[var] = 1 << b;
                        if c.admits(doms) {
                            keep |= 1 << b;
                        }
                    }
                    doms.masks[var] = keep;
                    if keep == 0 {
                        return false;
                    }
                    changed |= keep != before;
                }
                if !c.admits(doms) {
                    return false;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn descend(&self, var: usize, masks: Vec<u16>, out: &mut Vec<Vec<usize>>) {
        if var == masks.len() {
            let doms = self.domains(masks);
            if self.model.constraints.iter().all(|c| c.admits(&doms)) {
                out.push(doms.masks.iter().map(|m| m.trailing_zeros() as usize).collect());
            }
            return;
        }
        for b in bits(masks[var]) {
            let mut doms = self.domains(masks.clone());
            doms.masks[var] = 1 << b;
            if self.propagate(&mut doms) {
                self.descend(var + 1, doms.masks, out);
            }
        }
    }

    fn run(&self) -> Vec<Vec<usize>> {
        let n = self.values.len();
        let full = (1u16 << self.candidates.len()) - 1;
        let mut root = self.domains(vec![full; n]);
        if !self.propagate(&mut root) {
            return Vec::new();
        }
        if n == 0 {
            let mut out = Vec::new();
            self.descend(0, root.masks, &mut out);
            return out;
        }
        // Split on the first variable; par_iter keeps branch order.
        let first: Vec<usize> = bits(root.masks[0]).collect();
        let masks = root.masks;
        first
            .par_iter()
            .map(|&b| {
                let mut doms = self.domains(masks.clone());
                doms.masks[0] = 1 << b;
                let mut out = Vec::new();
                if self.propagate(&mut doms) {
                    self.descend(1, doms.masks, &mut out);
                }
                out
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    }
}

fn to_set(model: &CompiledModel, rows: Vec<Vec<usize>>) -> ScenarioSet {
    let cands = candidates(model.mode);
    let scenarios = rows
        .into_iter()
        .map(|row| Scenario {
            id: 0,
            triplets: row
                .iter()
                .zip(&model.variables)
                .map(|(&c, v)| {
                    let (d1, d2) = cands[c];
                    match d2.as_single() {
                        Some(d2) => Triplet::new(v.value, d1, d2),
                        None => Triplet::first_order(v.value, d1),
                    }
                })
                .collect(),
        })
        .collect();
    let mut ss = ScenarioSet { variables: model.names(), mode: model.mode, scenarios };
    ss.canonicalize();
    ss
}

/// Enumerates every scenario of a compiled model.
pub fn solve_compiled(model: &CompiledModel) -> ScenarioSet {
    to_set(model, Search::new(model).run())
}

/// All scenarios consistent with the model, in canonical order with ids
/// starting at 1. An unsatisfiable model gives an empty set.
pub fn solve(m: &TrendModel, mode: Mode) -> Result<ScenarioSet, SolveError> {
    Ok(solve_compiled(&compile(m, mode)?))
}

/// Scenario view over one fully specified assignment.
pub(crate) struct Assignment<'a> {
    pub values: &'a [Sign],
    pub pairs: Vec<(Sign, SignSet)>,
}

impl SlotView for Assignment<'_> {
    fn slot(&self, var: usize, slot: Slot) -> SignSet {
        match slot {
            Slot::Value => SignSet::single(self.values[var]),
            Slot::D1 => SignSet::single(self.pairs[var].0),
            Slot::D2 => self.pairs[var].1,
        }
    }
}

/// Exhaustive scan of every assignment. Reference implementation for
/// [`solve`]; refuses models with more than `cap` variables.
pub fn brute_force_solve_capped(m: &TrendModel, mode: Mode, cap: usize) -> Result<ScenarioSet, SolveError> {
    let n = m.variables.len();
    if n > cap {
        return Err(SolveError::CapExceeded { vars: n, cap });
    }
    let model = compile(m, mode)?;
    let cands = candidates(mode);
    let k = cands.len();
    let values: Vec<Sign> = model.variables.iter().map(|v| v.value).collect();
    let total = k.pow(n as u32);
    let mut rows = Vec::new();
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        let view = Assignment { values: &values, pairs: digits.iter().map(|&d| cands[d]).collect() };
        if model.constraints.iter().all(|c| c.admits(&view)) {
            rows.push(digits.clone());
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < k {
                break;
            }
            *d = 0;
        }
    }
    Ok(to_set(&model, rows))
}

pub fn brute_force_solve(m: &TrendModel, mode: Mode) -> Result<ScenarioSet, SolveError> {
    brute_force_solve_capped(m, mode, DEFAULT_BRUTE_FORCE_CAP)
}
