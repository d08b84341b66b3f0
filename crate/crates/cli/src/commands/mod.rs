pub mod determinize;
pub mod diff;
pub mod eval;
pub mod index;
pub mod infer;
pub mod seeds;

use std::path::Path;

use protofsm::segment::{Segmenter, SeparatorTable};

use crate::{config::RunConfig, CliError};

/// Build the run's segmenter, honoring a custom separator-table file when
/// one is configured.
pub(crate) fn build_segmenter(config: &RunConfig) -> Result<Segmenter, CliError> {
    let result = match &config.separator_file {
        Some(path) => {
            let mut tables =
                SeparatorTable::load_tables(path).map_err(|e| CliError::Config(e.to_string()))?;
            match tables.remove(&config.segmenter.language) {
                Some(table) => Segmenter::with_table(config.segmenter.clone(), table),
                None => Segmenter::new(config.segmenter.clone()),
            }
        }
        None => Segmenter::new(config.segmenter.clone()),
    };
    result.map_err(|e| CliError::Config(e.to_string()))
}

pub(crate) fn read_fsm(path: &Path) -> Result<protofsm::fsm::FsmModel, CliError> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(protofsm::fsm::parse(&content)?)
}

pub(crate) fn write_output(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
