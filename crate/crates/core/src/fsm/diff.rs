//! Set-algebraic comparison of two FSMs.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{require_valid, FsmError, FsmModel, StateName, Transition, ValidationLevel};

/// Element counts for each diff set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffSummary {
    pub states_only_in_a: usize,
    pub states_only_in_b: usize,
    pub transitions_only_in_a: usize,
    pub transitions_only_in_b: usize,
    pub shared_transitions: usize,
}

/// Difference between two FSMs over the same protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmDiff {
    pub states_only_in_a: BTreeSet<StateName>,
    pub states_only_in_b: BTreeSet<StateName>,
    pub transitions_only_in_a: BTreeSet<Transition>,
    pub transitions_only_in_b: BTreeSet<Transition>,
    pub shared_transitions: BTreeSet<Transition>,
    pub summary: DiffSummary,
}

/// Compare two FSMs. Names are already canonical in the model, so this is
/// plain set algebra: the three transition sets partition the union of both
/// sides' transitions, and `diff(a, b)` mirrors `diff(b, a)`.
pub fn diff(a: &FsmModel, b: &FsmModel) -> Result<FsmDiff, FsmError> {
    require_valid(a, ValidationLevel::Lenient)?;
    require_valid(b, ValidationLevel::Lenient)?;

    let states_only_in_a: BTreeSet<StateName> = a.states.difference(&b.states).cloned().collect();
    let states_only_in_b: BTreeSet<StateName> = b.states.difference(&a.states).cloned().collect();
    let transitions_only_in_a: BTreeSet<Transition> =
        a.transitions.difference(&b.transitions).cloned().collect();
    let transitions_only_in_b: BTreeSet<Transition> =
        b.transitions.difference(&a.transitions).cloned().collect();
    let shared_transitions: BTreeSet<Transition> =
        a.transitions.intersection(&b.transitions).cloned().collect();

    let summary = DiffSummary {
        states_only_in_a: states_only_in_a.len(),
        states_only_in_b: states_only_in_b.len(),
        transitions_only_in_a: transitions_only_in_a.len(),
        transitions_only_in_b: transitions_only_in_b.len(),
        shared_transitions: shared_transitions.len(),
    };

    Ok(FsmDiff {
        states_only_in_a,
        states_only_in_b,
        transitions_only_in_a,
        transitions_only_in_b,
        shared_transitions,
        summary,
    })
}
