//! Human-readable table rendering.

use protofsm::eval::EvalReport;
use protofsm::filter::ModuleSelection;
use protofsm::fsm::FsmModel;

/// Evaluation row: S, T, C, PC, I, NF, P, R.
pub fn eval_table(label: &str, inferred: &FsmModel, report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:>4} {:>4} {:>4} {:>4} {:>4} {:>4} {:>8} {:>8}\n",
        "Implementation", "S", "T", "C", "PC", "I", "NF", "P(%)", "R(%)"
    ));
    out.push_str(&format!(
        "{:<24} {:>4} {:>4} {:>4} {:>4} {:>4} {:>4} {:>8.2} {:>8.2}\n",
        label,
        inferred.states.len(),
        inferred.transitions.len(),
        report.correct,
        report.partially_correct,
        report.incorrect,
        report.not_found,
        report.precision * 100.0,
        report.recall * 100.0,
    ));
    if report.zero_denominator {
        out.push_str("note: a zero denominator was reported as 0\n");
    }
    out
}

/// Per-directory match-rate table from module selection.
pub fn selection_table(selection: &ModuleSelection) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<40} {:>8} {:>8} {:>8}\n",
        "Directory", "Matched", "Total", "Rate"
    ));
    for row in &selection.table {
        out.push_str(&format!(
            "{:<40} {:>8} {:>8} {:>8.3}\n",
            row.dir, row.matched_docs, row.total_docs, row.rate
        ));
    }
    out.push_str(&format!(
        "selected module: {} (rate {:.3})\n",
        selection.chosen_dir, selection.match_rate
    ));
    out
}
