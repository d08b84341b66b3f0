//! `protofsm eval`

use std::path::Path;

use protofsm::eval::{evaluate, GroundTruth};

use crate::table::eval_table;
use crate::{commands::read_fsm, commands::write_output, CliError};

pub fn run(fsm_path: &Path, gt_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let inferred = read_fsm(fsm_path)?;
    let ground_truth = GroundTruth::load(gt_path)?;
    let report = evaluate(&inferred, &ground_truth)?;

    let label = fsm_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "inferred".to_string());
    print!("{}", eval_table(&label, &inferred, &report));

    if let Some(out_dir) = out {
        let body = serde_json::to_string_pretty(&report).expect("report serializes");
        write_output(&out_dir.join("eval.json"), &format!("{body}\n"))?;
    }
    Ok(())
}
