//! Run report emitted next to every inferred FSM.

use std::collections::BTreeMap;

use serde::Serialize;

/// Per-stage audit record.
#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    /// Stage label; transition stages carry their state, e.g.
    /// `transitions[STATE_IDLE]`.
    pub stage: String,
    pub prompt_digest: String,
    pub iterations: u32,
    pub parse_failures: u32,
    /// Retrieved chunks appended to the prompt after budget truncation.
    pub context_chunks: usize,
    /// Occurrence count per canonical item.
    pub frequencies: BTreeMap<String, u32>,
    pub kept: Vec<String>,
    /// Items seen but below the consensus threshold.
    pub dropped: Vec<String>,
    pub duration_ms: u64,
    /// Estimated at 4 characters per token unless the backend reports
    /// usage.
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// Full pipeline audit record.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub protocol: String,
    pub stages: Vec<StageReport>,
    /// Transitions dropped for referencing states or messages outside the
    /// kept sets.
    pub dropped_transitions: Vec<String>,
    /// How the initial states were chosen: `model-marked` or
    /// `heuristic: states with no incoming transition`.
    pub initial_state_source: String,
    /// How the final states were chosen: `model-marked` or
    /// `heuristic: left empty (lenient validation)`.
    pub final_state_source: String,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut out =
            serde_json::to_string_pretty(self).expect("report serialization is infallible");
        out.push('\n');
        out
    }
}
