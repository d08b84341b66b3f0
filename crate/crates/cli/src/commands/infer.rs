//! `protofsm infer`

use std::path::Path;

use protofsm::embed::VectorIndex;
use protofsm::fsm::{serialize, ImplementationRef};
use protofsm::infer::{build_index, infer_fsm, InferError, InferenceConfig};
use protofsm::llm::{ChatClient, FixtureBook, SessionLog};

use crate::config::{BackendKind, RunConfig};
use crate::{
    commands::{build_segmenter, write_output},
    dot::to_dot,
    CliError, ConfigArgs,
};

#[allow(clippy::too_many_arguments)]
pub fn run(
    args: &ConfigArgs,
    backend_override: Option<&str>,
    fixtures_override: Option<&Path>,
    iterations_override: Option<u32>,
    build_index_first: bool,
    index_override: Option<&Path>,
    dot_path: Option<&Path>,
) -> Result<(), CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if let Some(backend) = backend_override {
        config.backend = match backend {
            "remote" => BackendKind::Remote,
            "fixture" => BackendKind::Fixture,
            other => {
                return Err(CliError::Config(format!(
                    "unknown backend {other:?} (expected remote or fixture)"
                )));
            }
        };
    }
    if let Some(fixtures) = fixtures_override {
        config.fixtures = Some(fixtures.to_path_buf());
    }
    if let Some(iterations) = iterations_override {
        config.consensus.iterations = iterations;
        config
            .consensus
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }

    let client = match config.backend {
        BackendKind::Fixture => {
            let path = config.fixtures.as_ref().ok_or_else(|| {
                CliError::Config("fixture backend needs --fixtures or chat.fixtures".into())
            })?;
            ChatClient::Fixture(FixtureBook::load(path)?)
        }
        BackendKind::Remote => {
            // Fail fast on a missing credential, before any index or
            // network work happens.
            if std::env::var(&config.chat.credential_env).is_err() {
                return Err(CliError::Backend(format!(
                    "credential env var {} is not set",
                    config.chat.credential_env
                )));
            }
            ChatClient::Remote
        }
    };

    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::Input(format!("cannot create output directory: {e}")))?;

    let index_path = index_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.index_path());
    let (index, snapshot_id) = if build_index_first || !index_path.exists() {
        let keywords = super::index::keyword_set(&config)?;
        let segmenter = build_segmenter(&config)?;
        let outcome = build_index(
            &config.repo,
            &keywords,
            &config.filter,
            &segmenter,
            &config.embedding,
        )?;
        outcome.index.save(&index_path)?;
        (outcome.index, outcome.repo_snapshot_id)
    } else {
        let index = VectorIndex::load(&index_path, Some(&config.embedding))?;
        let snapshot = index.manifest().repo_snapshot_id.clone();
        (index, snapshot)
    };

    let session = SessionLog::open(&config.output_dir.join("session.jsonl"), config.log_content)
        .map_err(|e| CliError::Input(format!("cannot open session log: {e}")))?;
    let inference = InferenceConfig {
        protocol: config.protocol.clone(),
        consensus: config.consensus,
        retrieval: config.retrieval.clone(),
    };
    let implementation = ImplementationRef {
        repo: config.repo_raw.clone(),
        commit: snapshot_id.chars().take(12).collect(),
    };

    let outcome = infer_fsm(
        &index,
        &config.embedding,
        &client,
        &config.chat,
        &inference,
        implementation,
        Some(&session),
    );

    match outcome {
        Ok(outcome) => {
            write_output(&config.output_dir.join("fsm.json"), &serialize(&outcome.fsm))?;
            write_output(
                &config.output_dir.join("report.json"),
                &outcome.report.to_json(),
            )?;
            if let Some(dot) = dot_path {
                write_output(dot, &to_dot(&outcome.fsm))?;
            }
            println!(
                "inferred {} states, {} transitions ({} warnings)",
                outcome.fsm.states.len(),
                outcome.fsm.transitions.len(),
                outcome.report.warnings.len()
            );
            Ok(())
        }
        Err(InferError::StageFailed {
            stage,
            raw_responses,
            partial_report,
        }) => {
            // Persist what we have so the failure can be diagnosed.
            write_output(
                &config.output_dir.join("partial_report.json"),
                &partial_report.to_json(),
            )?;
            let raws = serde_json::to_string_pretty(&raw_responses).expect("strings serialize");
            write_output(
                &config.output_dir.join("failed_stage_responses.json"),
                &format!("{raws}\n"),
            )?;
            Err(CliError::Inference(format!(
                "stage {stage} produced no parseable response; partial results written to {}",
                config.output_dir.display()
            )))
        }
        Err(other) => Err(other.into()),
    }
}
