//! `protofsm diff`

use std::path::Path;

use serde_json::json;

use protofsm::fsm::diff;

use crate::{commands::read_fsm, commands::write_output, CliError};

pub fn run(a_path: &Path, b_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let a = read_fsm(a_path)?;
    let b = read_fsm(b_path)?;
    let d = diff(&a, &b)?;

    let mut listing = format!(
        "states: {} only in a, {} only in b; transitions: {} only in a, {} only in b, {} shared\n",
        d.summary.states_only_in_a,
        d.summary.states_only_in_b,
        d.summary.transitions_only_in_a,
        d.summary.transitions_only_in_b,
        d.summary.shared_transitions,
    );
    for state in &d.states_only_in_a {
        listing.push_str(&format!("  state only in a: {state}\n"));
    }
    for state in &d.states_only_in_b {
        listing.push_str(&format!("  state only in b: {state}\n"));
    }
    // A closed pipe (diff | head) is not an error worth dying over.
    let _ = std::io::Write::write_all(&mut std::io::stdout(), listing.as_bytes());

    if let Some(out_dir) = out {
        let strings = |set: &std::collections::BTreeSet<protofsm::fsm::Transition>| {
            set.iter().map(|t| t.to_string()).collect::<Vec<_>>()
        };
        let body = serde_json::to_string_pretty(&json!({
            "summary": d.summary,
            "states_only_in_a": d.states_only_in_a,
            "states_only_in_b": d.states_only_in_b,
            "transitions_only_in_a": strings(&d.transitions_only_in_a),
            "transitions_only_in_b": strings(&d.transitions_only_in_b),
            "shared_transitions": strings(&d.shared_transitions),
        }))
        .expect("diff serializes");
        write_output(&out_dir.join("diff.json"), &format!("{body}\n"))?;
    }
    Ok(())
}
