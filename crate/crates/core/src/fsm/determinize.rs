//! Subset-construction determinization.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{
    require_valid, FsmError, FsmModel, MessageType, StateName, Transition, ValidationLevel,
};

/// Convert a (possibly nondeterministic) FSM into a deterministic one that
/// accepts exactly the same message-sequence language.
///
/// Each output state is a reachable subset of input states, named by the
/// sorted member names joined with `_` so repeated runs serialize
/// identically. The start subset is the whole initial-state set; a subset is
/// final when it contains any input final state. Only reachable subsets are
/// emitted, and each (state, message) pair carries at most one transition.
/// There is no epsilon handling because transitions are always
/// message-driven.
pub fn determinize(fsm: &FsmModel) -> Result<FsmModel, FsmError> {
    require_valid(fsm, ValidationLevel::Lenient)?;

    // Transition function as state -> message -> successor set.
    let mut successors: BTreeMap<&StateName, BTreeMap<&MessageType, BTreeSet<&StateName>>> =
        BTreeMap::new();
    for t in &fsm.transitions {
        successors
            .entry(&t.current_state)
            .or_default()
            .entry(&t.receive_message)
            .or_default()
            .insert(&t.next_state);
    }

    let start: BTreeSet<&StateName> = fsm.initial_states.iter().collect();

    let mut seen: BTreeSet<BTreeSet<&StateName>> = BTreeSet::new();
    let mut queue: VecDeque<BTreeSet<&StateName>> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start.clone());

    let mut result = FsmModel {
        protocol: fsm.protocol.clone(),
        implementation: fsm.implementation.clone(),
        alphabet: fsm.alphabet.clone(),
        ..FsmModel::default()
    };

    let start_name = subset_name(&start);
    result.states.insert(start_name.clone());
    result.initial_states.insert(start_name);

    while let Some(subset) = queue.pop_front() {
        let from_name = subset_name(&subset);
        if subset.iter().any(|s| fsm.final_states.contains(*s)) {
            result.final_states.insert(from_name.clone());
        }
        for message in &fsm.alphabet {
            let mut next: BTreeSet<&StateName> = BTreeSet::new();
            for state in &subset {
                if let Some(on) = successors.get(*state).and_then(|m| m.get(message)) {
                    next.extend(on.iter().copied());
                }
            }
            if next.is_empty() {
                continue;
            }
            let next_name = subset_name(&next);
            result.states.insert(next_name.clone());
            result.transitions.insert(Transition::new(
                from_name.clone(),
                message.clone(),
                next_name,
            ));
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }

    Ok(result)
}

fn subset_name(subset: &BTreeSet<&StateName>) -> StateName {
    let joined: Vec<&str> = subset.iter().map(|s| s.as_str()).collect();
    StateName::new(&joined.join("_")).expect("member names are non-empty")
}
