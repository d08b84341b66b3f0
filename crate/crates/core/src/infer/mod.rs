//! The staged inference pipeline.
//!
//! Stages run strictly in order: code paths, then states, then messages,
//! then one transitions stage per kept state with the current state
//! substituted into the prompt. Each stage renders one prompt, augments it
//! with retrieved code, runs the configured number of independent
//! completions, and keeps only the items that survive consensus voting.

mod consensus;
mod indexing;
mod parse;
mod prompt;
mod report;

pub use consensus::{vote, ConsensusConfig, VoteOutcome};
pub use indexing::{build_index, ChunkRange, IndexBuildOutcome};
pub use parse::{normalize_rel_path, parse_output, ParseFailure, ParsedOutput};
pub use prompt::{render, PromptSpec, Stage};
pub use report::{RunReport, StageReport};

use std::collections::BTreeSet;
use std::time::Instant;

use thiserror::Error;

use crate::embed::{embed, top_k, EmbedError, EmbeddingBackendSpec, RetrievalResult, VectorIndex};
use crate::filter::FilterError;
use crate::fsm::{FsmModel, ImplementationRef, MessageType, StateName, Transition};
use crate::llm::{ChatClient, ChatConfig, LlmError, SessionLog, Transcript};
use crate::segment::SegmentError;

#[derive(Debug, Error)]
pub enum InferError {
    #[error("invalid inference config: {0}")]
    Config(String),
    #[error("prompt template slot {0:?} is missing")]
    Template(String),
    #[error("stage {stage} produced no parseable response in any iteration")]
    StageFailed {
        stage: String,
        raw_responses: Vec<String>,
        /// Stages completed before the failure, for post-mortems.
        partial_report: Box<RunReport>,
    },
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
}

/// Retrieval parameters for prompt augmentation.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RetrievalConfig {
    /// Chunks requested per stage prompt.
    pub k: usize,
    /// Character budget per model token for window accounting.
    pub chars_per_token: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            k: 8,
            chars_per_token: 4,
        }
    }
}

/// Retrieve the chunks most similar to `query_text` and truncate them to a
/// character budget, dropping the lowest-scored first. An empty index
/// yields an empty context with a warning.
pub fn retrieve_context(
    query_text: &str,
    index: &VectorIndex,
    backend: &EmbeddingBackendSpec,
    k: usize,
    budget_chars: usize,
) -> Result<Vec<RetrievalResult>, InferError> {
    if backend.fingerprint() != index.fingerprint() {
        return Err(InferError::Embed(EmbedError::BackendMismatch {
            expected: backend.fingerprint(),
            found: index.fingerprint().to_string(),
        }));
    }
    if index.is_empty() {
        log::warn!("vector index is empty; inference runs without code context");
        return Ok(Vec::new());
    }
    let query = embed(&[query_text.to_string()], backend)?.remove(0);
    let mut results = top_k(index, &query, k)?;

    let mut used = 0usize;
    let mut keep = 0usize;
    for result in &results {
        let chars = result.text.chars().count();
        if used + chars > budget_chars {
            break;
        }
        used += chars;
        keep += 1;
    }
    if keep < results.len() {
        log::warn!(
            "context over budget: keeping {keep} of {} retrieved chunks",
            results.len()
        );
        results.truncate(keep);
    }
    Ok(results)
}

/// Items kept by one stage.
#[derive(Debug, Clone)]
pub enum StageItems {
    Paths(VoteOutcome<String>),
    Names(VoteOutcome<String>),
    Transitions(VoteOutcome<Transition>),
}

/// Everything a stage run produces.
#[derive(Debug)]
pub struct StageResult {
    pub stage: Stage,
    pub label: String,
    pub raw_responses: Vec<String>,
    pub parse_failures: u32,
    pub items: StageItems,
    /// Model-marked initial states that survived consensus (states stage).
    pub marked_initial: Vec<String>,
    /// Model-marked final states that survived consensus (states stage).
    pub marked_final: Vec<String>,
    pub report: StageReport,
}

/// Run one stage: render, retrieve, complete `iterations` times, parse,
/// vote.
#[allow(clippy::too_many_arguments)]
pub fn run_stage(
    spec: &PromptSpec,
    index: &VectorIndex,
    backend: &EmbeddingBackendSpec,
    client: &ChatClient,
    chat: &ChatConfig,
    consensus_config: &ConsensusConfig,
    retrieval: &RetrievalConfig,
    session: Option<&SessionLog>,
    partial_report: &RunReport,
) -> Result<StageResult, InferError> {
    consensus_config.validate()?;
    let started = Instant::now();

    let rendered = render(spec)?;
    let prompt_chars = rendered.chars().count();
    let window_chars = chat.context_window_tokens as usize * retrieval.chars_per_token;
    let output_chars = chat.max_output_tokens as usize * retrieval.chars_per_token;
    let budget = window_chars.saturating_sub(prompt_chars + output_chars);
    let context = retrieve_context(&rendered, index, backend, retrieval.k, budget)?;

    let mut full_prompt = rendered;
    if !context.is_empty() {
        full_prompt.push_str("\n\nRelevant code from the implementation:\n");
        for chunk in &context {
            full_prompt.push_str(&format!(
                "\n--- {} (chunk {}) ---\n{}\n",
                chunk.chunk.doc_path, chunk.chunk.ordinal, chunk.text
            ));
        }
    }
    let transcript = Transcript::user(full_prompt);

    let label = match spec.slots.get("current_state") {
        Some(state) if spec.stage == Stage::Transitions => {
            format!("{}[{state}]", spec.stage)
        }
        _ => spec.stage.to_string(),
    };

    let mut raw_responses = Vec::with_capacity(consensus_config.iterations as usize);
    let mut parsed_iterations: Vec<ParsedOutput> = Vec::new();
    let mut parse_failures = 0u32;
    let mut completion_chars = 0usize;
    for _ in 0..consensus_config.iterations {
        let response = client.complete(&transcript, chat, session)?;
        completion_chars += response.chars().count();
        match parse_output(spec.stage, &response) {
            Ok(parsed) => parsed_iterations.push(parsed),
            Err(failure) => {
                log::warn!("stage {label}: {failure}");
                parse_failures += 1;
                // Still in the denominator: an unparseable iteration votes
                // for nothing.
                parsed_iterations.push(ParsedOutput::default());
            }
        }
        raw_responses.push(response);
    }

    if parse_failures == consensus_config.iterations {
        return Err(InferError::StageFailed {
            stage: label,
            raw_responses,
            partial_report: Box::new(partial_report.clone()),
        });
    }

    let items = match spec.stage {
        Stage::CodePaths => {
            let per_iter: Vec<Vec<String>> =
                parsed_iterations.iter().map(|p| p.paths.clone()).collect();
            StageItems::Paths(vote(&per_iter, consensus_config))
        }
        Stage::States | Stage::Messages => {
            let per_iter: Vec<Vec<String>> =
                parsed_iterations.iter().map(|p| p.names.clone()).collect();
            StageItems::Names(vote(&per_iter, consensus_config))
        }
        Stage::Transitions => {
            let per_iter: Vec<Vec<Transition>> = parsed_iterations
                .iter()
                .map(|p| p.transitions.clone())
                .collect();
            StageItems::Transitions(vote(&per_iter, consensus_config))
        }
    };

    let marked_initial = vote_names(
        parsed_iterations.iter().map(|p| p.marked_initial.clone()),
        consensus_config,
    );
    let marked_final = vote_names(
        parsed_iterations.iter().map(|p| p.marked_final.clone()),
        consensus_config,
    );

    let transcript_chars = transcript.rendered().chars().count();
    let report = StageReport {
        stage: label.clone(),
        prompt_digest: transcript.digest(),
        iterations: consensus_config.iterations,
        parse_failures,
        context_chunks: context.len(),
        frequencies: frequencies(&items),
        kept: kept_labels(&items),
        dropped: dropped_labels(&items),
        duration_ms: started.elapsed().as_millis() as u64,
        prompt_tokens: (transcript_chars as u64).div_ceil(4)
            * u64::from(consensus_config.iterations),
        completion_tokens: (completion_chars as u64).div_ceil(4),
    };

    Ok(StageResult {
        stage: spec.stage,
        label,
        raw_responses,
        parse_failures,
        items,
        marked_initial,
        marked_final,
        report,
    })
}

fn vote_names<I: Iterator<Item = Vec<String>>>(
    iterations: I,
    config: &ConsensusConfig,
) -> Vec<String> {
    let collected: Vec<Vec<String>> = iterations.collect();
    if collected.iter().all(|names| names.is_empty()) {
        return Vec::new();
    }
    vote(&collected, config)
        .kept
        .into_iter()
        .map(|(name, _)| name)
        .collect()
}

fn frequencies(items: &StageItems) -> std::collections::BTreeMap<String, u32> {
    let pairs: Vec<(String, u32)> = match items {
        StageItems::Paths(v) | StageItems::Names(v) => v
            .kept
            .iter()
            .chain(&v.dropped)
            .map(|(item, count)| (item.clone(), *count))
            .collect(),
        StageItems::Transitions(v) => v
            .kept
            .iter()
            .chain(&v.dropped)
            .map(|(item, count)| (item.to_string(), *count))
            .collect(),
    };
    pairs.into_iter().collect()
}

fn kept_labels(items: &StageItems) -> Vec<String> {
    match items {
        StageItems::Paths(v) | StageItems::Names(v) => {
            v.kept.iter().map(|(item, _)| item.clone()).collect()
        }
        StageItems::Transitions(v) => v.kept.iter().map(|(item, _)| item.to_string()).collect(),
    }
}

fn dropped_labels(items: &StageItems) -> Vec<String> {
    match items {
        StageItems::Paths(v) | StageItems::Names(v) => {
            v.dropped.iter().map(|(item, _)| item.clone()).collect()
        }
        StageItems::Transitions(v) => v.dropped.iter().map(|(item, _)| item.to_string()).collect(),
    }
}

/// Inference parameters above the chat and retrieval layers.
#[derive(Debug, Clone)]
pub struct InferenceConfig {
    pub protocol: String,
    pub consensus: ConsensusConfig,
    pub retrieval: RetrievalConfig,
}

/// A finished inference: the model plus its audit report.
#[derive(Debug)]
pub struct InferenceOutcome {
    pub fsm: FsmModel,
    pub report: RunReport,
}

/// Drive the full pipeline against a built index and return the inferred
/// FSM with its run report.
pub fn infer_fsm(
    index: &VectorIndex,
    backend: &EmbeddingBackendSpec,
    client: &ChatClient,
    chat: &ChatConfig,
    config: &InferenceConfig,
    implementation: ImplementationRef,
    session: Option<&SessionLog>,
) -> Result<InferenceOutcome, InferError> {
    let mut report = RunReport {
        protocol: config.protocol.clone(),
        ..RunReport::default()
    };
    let run = |spec: &PromptSpec, report: &RunReport| {
        run_stage(
            spec,
            index,
            backend,
            client,
            chat,
            &config.consensus,
            &config.retrieval,
            session,
            report,
        )
    };

    // Stage 1: code paths.
    let paths_stage = run(&PromptSpec::code_paths(&config.protocol), &report)?;
    let code_paths: Vec<String> = match &paths_stage.items {
        StageItems::Paths(v) => v.kept.iter().map(|(p, _)| p.clone()).collect(),
        _ => unreachable!("code paths stage yields paths"),
    };
    report.stages.push(paths_stage.report.clone());
    if code_paths.is_empty() {
        report
            .warnings
            .push("no code path survived consensus; later stages run without path hints".into());
    }

    // Stage 2: states.
    let states_stage = run(&PromptSpec::states(&config.protocol, &code_paths), &report)?;
    let state_names: Vec<String> = match &states_stage.items {
        StageItems::Names(v) => v.kept.iter().map(|(n, _)| n.clone()).collect(),
        _ => unreachable!("states stage yields names"),
    };
    report.stages.push(states_stage.report.clone());

    // Stage 3: messages.
    let messages_stage = run(&PromptSpec::messages(&config.protocol, &code_paths), &report)?;
    let message_names: Vec<String> = match &messages_stage.items {
        StageItems::Names(v) => v.kept.iter().map(|(n, _)| n.clone()).collect(),
        _ => unreachable!("messages stage yields names"),
    };
    report.stages.push(messages_stage.report.clone());

    // Stage 4: one transitions prompt per kept state.
    let mut raw_transitions: BTreeSet<Transition> = BTreeSet::new();
    for state in &state_names {
        let spec = PromptSpec::transitions(
            &config.protocol,
            &code_paths,
            &state_names,
            &message_names,
            state,
        );
        let stage = run(&spec, &report)?;
        if let StageItems::Transitions(v) = &stage.items {
            raw_transitions.extend(v.kept.iter().map(|(t, _)| t.clone()));
        }
        report.stages.push(stage.report);
    }

    // Assemble the model. The states stage is the authority: transitions
    // that reference anything outside the kept sets are dropped and logged,
    // never silently kept.
    let states: BTreeSet<StateName> = state_names
        .iter()
        .map(|name| StateName::new(name).expect("kept names are canonical"))
        .collect();
    let alphabet: BTreeSet<MessageType> = message_names
        .iter()
        .map(|name| MessageType::new(name).expect("kept names are canonical"))
        .collect();

    let mut transitions: BTreeSet<Transition> = BTreeSet::new();
    for transition in raw_transitions {
        let closed = states.contains(&transition.current_state)
            && states.contains(&transition.next_state)
            && alphabet.contains(&transition.receive_message);
        if closed {
            transitions.insert(transition);
        } else {
            log::warn!("dropping transition outside kept sets: {transition}");
            report.dropped_transitions.push(transition.to_string());
        }
    }

    // Initial states: trust the model when the states stage marked them;
    // otherwise fall back to states with no incoming transition.
    let marked: BTreeSet<StateName> = states_stage
        .marked_initial
        .iter()
        .filter_map(|name| StateName::new(name).ok())
        .filter(|state| states.contains(state))
        .collect();
    let (initial_states, initial_source) = if !marked.is_empty() {
        (marked, "model-marked".to_string())
    } else {
        let with_incoming: BTreeSet<&StateName> =
            transitions.iter().map(|t| &t.next_state).collect();
        let no_incoming: BTreeSet<StateName> = states
            .iter()
            .filter(|state| !with_incoming.contains(state))
            .cloned()
            .collect();
        (
            no_incoming,
            "heuristic: states with no incoming transition".to_string(),
        )
    };
    if initial_states.is_empty() {
        report
            .warnings
            .push("no initial state could be determined; model fails lenient validation".into());
    }

    let final_states: BTreeSet<StateName> = states_stage
        .marked_final
        .iter()
        .filter_map(|name| StateName::new(name).ok())
        .filter(|state| states.contains(state))
        .collect();
    let final_source = if final_states.is_empty() {
        "heuristic: left empty (lenient validation)".to_string()
    } else {
        "model-marked".to_string()
    };

    report.initial_state_source = initial_source;
    report.final_state_source = final_source;

    let fsm = FsmModel {
        protocol: config.protocol.clone(),
        implementation,
        alphabet,
        states,
        initial_states,
        final_states,
        transitions,
    };
    for violation in crate::fsm::validate(&fsm, crate::fsm::ValidationLevel::Lenient) {
        report.warnings.push(violation.to_string());
    }

    Ok(InferenceOutcome { fsm, report })
}
