//! `protofsm seeds`

use std::path::Path;

use protofsm::seeds::{generate_sequences, render_seeds, PayloadTemplateMap, SeedStrategy};

use crate::{commands::read_fsm, CliError};

pub fn run(fsm_path: &Path, templates_dir: &Path, out_dir: &Path) -> Result<(), CliError> {
    let fsm = read_fsm(fsm_path)?;
    let plan = generate_sequences(&fsm, SeedStrategy::TransitionCover)?;
    for transition in &plan.unreachable {
        log::warn!("transition unreachable from any initial state: {transition}");
    }
    let templates = PayloadTemplateMap::load_dir(templates_dir)?;
    let files = render_seeds(&plan.sequences, &templates, out_dir)?;
    println!(
        "wrote {} seed file(s) to {} ({} unreachable transition(s))",
        files.len(),
        out_dir.display(),
        plan.unreachable.len()
    );
    Ok(())
}
