//! `protofsm determinize`

use std::path::Path;

use protofsm::fsm::{determinize, serialize};

use crate::{commands::read_fsm, commands::write_output, dot::to_dot, CliError};

pub fn run(fsm_path: &Path, out: Option<&Path>, dot_path: Option<&Path>) -> Result<(), CliError> {
    let fsm = read_fsm(fsm_path)?;
    let dfa = determinize(&fsm)?;
    let document = serialize(&dfa);
    match out {
        Some(path) => write_output(path, &document)?,
        None => {
            let _ = std::io::Write::write_all(&mut std::io::stdout(), document.as_bytes());
        }
    }
    if let Some(path) = dot_path {
        write_output(path, &to_dot(&dfa))?;
    }
    eprintln!(
        "determinized: {} states, {} transitions (input had {} states, {} transitions)",
        dfa.states.len(),
        dfa.transitions.len(),
        fsm.states.len(),
        fsm.transitions.len(),
    );
    Ok(())
}
