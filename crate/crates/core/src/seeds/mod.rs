//! Seed derivation for stateful fuzzers.
//!
//! The transition-cover strategy computes shortest paths from the initial
//! states and emits, for every reachable transition, the message sequence
//! that walks to its source and then takes it. Sequences that are prefixes
//! of other emitted sequences are dropped; what remains still covers every
//! reachable transition. Rendering turns each sequence into one raw seed
//! file by concatenating per-message payload templates, the replay
//! convention of message-sequence fuzzers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::fsm::{require_valid, FsmError, FsmModel, MessageType, StateName, Transition, ValidationLevel};
use crate::util::sha256_hex;

#[derive(Debug, Error)]
pub enum SeedError {
    #[error(transparent)]
    Fsm(#[from] FsmError),
    #[error("no payload template for message {0}")]
    TemplateMissing(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Sequence derivation strategy. Transition cover is the only shipped
/// strategy; the enum leaves room for state-cover or depth-bounded walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedStrategy {
    TransitionCover,
}

/// One derived message sequence and the walk that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedSequence {
    pub messages: Vec<MessageType>,
    /// Visited states; `path[0]` is an initial state and
    /// `path.len() == messages.len() + 1`.
    pub path: Vec<StateName>,
    /// Transitions this walk traverses.
    pub covered: BTreeSet<Transition>,
}

/// Derivation output: the sequences plus the transitions no walk can reach.
#[derive(Debug, Clone)]
pub struct SeedPlan {
    pub sequences: Vec<SeedSequence>,
    pub unreachable: Vec<Transition>,
}

/// Derive covering sequences from `fsm`.
pub fn generate_sequences(fsm: &FsmModel, strategy: SeedStrategy) -> Result<SeedPlan, SeedError> {
    require_valid(fsm, ValidationLevel::Lenient)?;
    let SeedStrategy::TransitionCover = strategy;

    // Multi-source BFS over the labeled graph; parent pointers give one
    // shortest walk per reachable state.
    let mut parent: BTreeMap<&StateName, &Transition> = BTreeMap::new();
    let mut distance: BTreeMap<&StateName, usize> = BTreeMap::new();
    let mut queue: VecDeque<&StateName> = VecDeque::new();
    for state in &fsm.initial_states {
        distance.insert(state, 0);
        queue.push_back(state);
    }
    let mut outgoing: BTreeMap<&StateName, Vec<&Transition>> = BTreeMap::new();
    for transition in &fsm.transitions {
        outgoing
            .entry(&transition.current_state)
            .or_default()
            .push(transition);
    }
    while let Some(state) = queue.pop_front() {
        let next_distance = distance[state] + 1;
        for transition in outgoing.get(state).into_iter().flatten() {
            if !distance.contains_key(&transition.next_state) {
                distance.insert(&transition.next_state, next_distance);
                parent.insert(&transition.next_state, transition);
                queue.push_back(&transition.next_state);
            }
        }
    }

    let walk_to = |state: &StateName| -> (Vec<MessageType>, Vec<StateName>) {
        let mut messages = Vec::new();
        let mut path = vec![state.clone()];
        let mut cursor = state;
        while let Some(transition) = parent.get(cursor) {
            messages.push(transition.receive_message.clone());
            path.push(transition.current_state.clone());
            cursor = &transition.current_state;
        }
        messages.reverse();
        path.reverse();
        (messages, path)
    };

    let mut sequences = Vec::new();
    let mut unreachable = Vec::new();
    for transition in &fsm.transitions {
        if !distance.contains_key(&transition.current_state) {
            unreachable.push(transition.clone());
            continue;
        }
        let (mut messages, mut path) = walk_to(&transition.current_state);
        messages.push(transition.receive_message.clone());
        path.push(transition.next_state.clone());
        let covered = path
            .windows(2)
            .zip(&messages)
            .map(|(pair, message)| {
                Transition::new(pair[0].clone(), message.clone(), pair[1].clone())
            })
            .collect();
        sequences.push(SeedSequence {
            messages,
            path,
            covered,
        });
    }

    // Prefix deduplication: a walk that is an exact prefix of another
    // (messages and states both) contributes nothing extra.
    let mut kept: Vec<SeedSequence> = Vec::new();
    sequences.sort_by_key(|s| s.messages.len());
    for (i, candidate) in sequences.iter().enumerate() {
        let redundant = sequences.iter().enumerate().any(|(j, other)| {
            i != j
                && other.messages.len() >= candidate.messages.len()
                && (other.messages.len() > candidate.messages.len() || j < i)
                && other.messages.starts_with(&candidate.messages)
                && other.path.starts_with(&candidate.path)
        });
        if !redundant {
            kept.push(candidate.clone());
        }
    }
    kept.sort_by(|a, b| (&a.path, &a.messages).cmp(&(&b.path, &b.messages)));

    Ok(SeedPlan {
        sequences: kept,
        unreachable,
    })
}

/// Payload templates: message type to raw bytes.
///
/// A template may contain the ASCII token `{{LEN}}`, replaced at render
/// time with the decimal byte length of the template content around it.
#[derive(Debug, Clone, Default)]
pub struct PayloadTemplateMap {
    entries: BTreeMap<MessageType, Vec<u8>>,
}

const LEN_TOKEN: &[u8] = b"{{LEN}}";

impl PayloadTemplateMap {
    pub fn insert(&mut self, message: MessageType, template: Vec<u8>) {
        self.entries.insert(message, template);
    }

    /// Load every file in `dir` as a template; the file stem names the
    /// message type (canonicalized).
    pub fn load_dir(dir: &Path) -> Result<Self, SeedError> {
        let io_err = |source| SeedError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut map = Self::default();
        for entry in fs::read_dir(dir).map_err(io_err)? {
            let entry = entry.map_err(io_err)?;
            if !entry.file_type().map_err(io_err)?.is_file() {
                continue;
            }
            let path = entry.path();
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let message = MessageType::new(&stem)?;
            let bytes = fs::read(&path).map_err(|source| SeedError::Io {
                path: path.display().to_string(),
                source,
            })?;
            map.insert(message, bytes);
        }
        Ok(map)
    }

    fn render(&self, message: &MessageType) -> Result<Vec<u8>, SeedError> {
        let template = self
            .entries
            .get(message)
            .ok_or_else(|| SeedError::TemplateMissing(message.to_string()))?;
        Ok(substitute_length(template))
    }
}

fn substitute_length(template: &[u8]) -> Vec<u8> {
    let Some(at) = template
        .windows(LEN_TOKEN.len())
        .position(|window| window == LEN_TOKEN)
    else {
        return template.to_vec();
    };
    let payload_len = template.len() - LEN_TOKEN.len();
    let mut out = Vec::with_capacity(template.len() + 8);
    out.extend_from_slice(&template[..at]);
    out.extend_from_slice(payload_len.to_string().as_bytes());
    out.extend_from_slice(&template[at + LEN_TOKEN.len()..]);
    out
}

/// Manifest row: seed file name and the message sequence inside it.
#[derive(Debug, Clone, Serialize)]
pub struct SeedManifestRow {
    pub file: String,
    pub messages: Vec<String>,
    pub path: Vec<String>,
}

/// Write one raw seed file per sequence into `out_dir` plus a JSON
/// manifest. Returns the written seed file paths.
pub fn render_seeds(
    sequences: &[SeedSequence],
    templates: &PayloadTemplateMap,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, SeedError> {
    fs::create_dir_all(out_dir).map_err(|source| SeedError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    let mut files = Vec::with_capacity(sequences.len());
    let mut manifest = Vec::with_capacity(sequences.len());
    for (index, sequence) in sequences.iter().enumerate() {
        let state_path: Vec<String> = sequence.path.iter().map(|s| s.to_string()).collect();
        let digest = sha256_hex(state_path.join(">").as_bytes());
        let name = format!("seq_{index:03}_{}.raw", &digest[..12]);

        let mut payload = Vec::new();
        for message in &sequence.messages {
            payload.extend_from_slice(&templates.render(message)?);
        }
        let file_path = out_dir.join(&name);
        fs::write(&file_path, payload).map_err(|source| SeedError::Io {
            path: file_path.display().to_string(),
            source,
        })?;
        manifest.push(SeedManifestRow {
            file: name,
            messages: sequence.messages.iter().map(|m| m.to_string()).collect(),
            path: state_path,
        });
        files.push(file_path);
    }

    let manifest_path = out_dir.join("manifest.json");
    let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    body.push('\n');
    fs::write(&manifest_path, body).map_err(|source| SeedError::Io {
        path: manifest_path.display().to_string(),
        source,
    })?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::testutil;

    #[test]
    fn linear_fsm_collapses_to_one_sequence() {
        let fsm = testutil::fsm(&["A"], &["C"], &[("A", "M1", "B"), ("B", "M2", "C")]);
        let plan = generate_sequences(&fsm, SeedStrategy::TransitionCover).unwrap();
        assert_eq!(plan.sequences.len(), 1);
        let seq = &plan.sequences[0];
        assert_eq!(
            seq.messages.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
            vec!["M1", "M2"]
        );
        assert_eq!(seq.covered.len(), 2);
        assert!(plan.unreachable.is_empty());
    }

    #[test]
    fn unreachable_transition_is_reported() {
        let fsm = testutil::fsm(
            &["A"],
            &["B"],
            &[("A", "M", "B"), ("X", "M", "Y")],
        );
        let plan = generate_sequences(&fsm, SeedStrategy::TransitionCover).unwrap();
        assert_eq!(plan.unreachable.len(), 1);
        assert_eq!(plan.unreachable[0].current_state.as_str(), "X");
        for seq in &plan.sequences {
            assert!(!seq.covered.contains(&plan.unreachable[0]));
        }
    }

    #[test]
    fn every_sequence_is_a_valid_walk() {
        let fsm = testutil::fsm(
            &["A"],
            &["D"],
            &[
                ("A", "M1", "B"),
                ("A", "M1", "C"), // nondeterministic fan-out
                ("B", "M2", "D"),
                ("C", "M2", "D"),
                ("D", "M1", "A"),
            ],
        );
        let plan = generate_sequences(&fsm, SeedStrategy::TransitionCover).unwrap();
        let mut covered = BTreeSet::new();
        for seq in &plan.sequences {
            assert_eq!(seq.path.len(), seq.messages.len() + 1);
            assert!(fsm.initial_states.contains(&seq.path[0]));
            for (pair, message) in seq.path.windows(2).zip(&seq.messages) {
                let step = Transition::new(pair[0].clone(), message.clone(), pair[1].clone());
                assert!(fsm.transitions.contains(&step), "invalid step {step}");
                covered.insert(step);
            }
        }
        assert_eq!(covered.len(), fsm.transitions.len());
    }

    #[test]
    fn missing_initial_states_is_invalid() {
        let mut fsm = testutil::fsm(&["A"], &["B"], &[("A", "M", "B")]);
        fsm.initial_states.clear();
        assert!(matches!(
            generate_sequences(&fsm, SeedStrategy::TransitionCover),
            Err(SeedError::Fsm(FsmError::InvalidFsm(_)))
        ));
    }

    #[test]
    fn rendered_seed_is_template_concatenation() {
        let fsm = testutil::fsm(&["A"], &["B"], &[("A", "M1", "B")]);
        let plan = generate_sequences(&fsm, SeedStrategy::TransitionCover).unwrap();
        let mut templates = PayloadTemplateMap::default();
        templates.insert(MessageType::new("M1").unwrap(), b"AB".to_vec());
        let dir = tempfile::tempdir().unwrap();
        let files = render_seeds(&plan.sequences, &templates, dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(fs::read(&files[0]).unwrap(), b"AB");
        let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(manifest.contains("seq_000_"));
    }

    #[test]
    fn missing_template_is_an_error() {
        let fsm = testutil::fsm(&["A"], &["B"], &[("A", "M1", "B")]);
        let plan = generate_sequences(&fsm, SeedStrategy::TransitionCover).unwrap();
        let templates = PayloadTemplateMap::default();
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            render_seeds(&plan.sequences, &templates, dir.path()),
            Err(SeedError::TemplateMissing(m)) if m == "M1"
        ));
    }

    #[test]
    fn length_token_is_substituted() {
        assert_eq!(substitute_length(b"LEN={{LEN}};data"), b"LEN=9;data");
        assert_eq!(substitute_length(b"plain"), b"plain");
    }

    #[test]
    fn two_sequences_give_two_files_and_rows() {
        let fsm = testutil::fsm(
            &["A"],
            &["C"],
            &[("A", "M1", "B"), ("A", "M2", "C")],
        );
        let plan = generate_sequences(&fsm, SeedStrategy::TransitionCover).unwrap();
        assert_eq!(plan.sequences.len(), 2);
        let mut templates = PayloadTemplateMap::default();
        templates.insert(MessageType::new("M1").unwrap(), b"1".to_vec());
        templates.insert(MessageType::new("M2").unwrap(), b"2".to_vec());
        let dir = tempfile::tempdir().unwrap();
        let files = render_seeds(&plan.sequences, &templates, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest.as_array().unwrap().len(), 2);
    }
}
