//! The FSM document format.
//!
//! Documents are UTF-8 JSON with a fixed key layout:
//!
//! ```json
//! {
//!   "protocol": "...",
//!   "implementation": {"repo": "...", "commit": "..."},
//!   "alphabet": ["..."],
//!   "states": ["..."],
//!   "initial_states": ["..."],
//!   "final_states": ["..."],
//!   "transitions": {
//!     "CURRENT_STATE": [{"receive_message": "...", "next_state": "..."}]
//!   }
//! }
//! ```
//!
//! Serialization is deterministic: sets are emitted sorted, transition
//! arrays sorted by (message, next state), and the output always ends with
//! a newline, so identical models produce byte-identical documents.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{FsmError, FsmModel, ImplementationRef, MessageType, StateName, Transition};

/// JSON Schema for the document format, shipped with the repository.
pub const FSM_SCHEMA_JSON: &str = include_str!("../../schemas/fsm.schema.json");

#[derive(Serialize, Deserialize)]
struct TransitionEntry {
    receive_message: String,
    next_state: String,
}

#[derive(Serialize)]
struct FsmDocument<'a> {
    protocol: &'a str,
    implementation: &'a ImplementationRef,
    alphabet: Vec<&'a str>,
    states: Vec<&'a str>,
    initial_states: Vec<&'a str>,
    final_states: Vec<&'a str>,
    transitions: BTreeMap<&'a str, Vec<TransitionEntry>>,
}

/// Render `fsm` as a document string. Deterministic for equal models.
pub fn serialize(fsm: &FsmModel) -> String {
    let mut transitions: BTreeMap<&str, Vec<TransitionEntry>> = BTreeMap::new();
    for t in &fsm.transitions {
        transitions
            .entry(t.current_state.as_str())
            .or_default()
            .push(TransitionEntry {
                receive_message: t.receive_message.as_str().to_string(),
                next_state: t.next_state.as_str().to_string(),
            });
    }
    for entries in transitions.values_mut() {
        entries.sort_by(|a, b| {
            (&a.receive_message, &a.next_state).cmp(&(&b.receive_message, &b.next_state))
        });
    }

    let doc = FsmDocument {
        protocol: &fsm.protocol,
        implementation: &fsm.implementation,
        alphabet: fsm.alphabet.iter().map(|m| m.as_str()).collect(),
        states: fsm.states.iter().map(|s| s.as_str()).collect(),
        initial_states: fsm.initial_states.iter().map(|s| s.as_str()).collect(),
        final_states: fsm.final_states.iter().map(|s| s.as_str()).collect(),
        transitions,
    };

    let mut out = serde_json::to_string_pretty(&doc).expect("document serialization is infallible");
    out.push('\n');
    out
}

/// Parse a document string into a model.
///
/// Names are canonicalized on the way in, so parsing is tolerant of
/// model-output spellings while `parse(serialize(f)) == f` holds for every
/// valid model.
pub fn parse(document: &str) -> Result<FsmModel, FsmError> {
    let value: Value = serde_json::from_str(document).map_err(|e| FsmError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let top = require_object(&value, "document")?;
    check_keys(
        top,
        "document",
        &[
            "protocol",
            "implementation",
            "alphabet",
            "states",
            "initial_states",
            "final_states",
            "transitions",
        ],
    )?;

    let protocol = require_string(top, "protocol", "document")?;

    let implementation_value = &top["implementation"];
    let implementation_obj = require_object(implementation_value, "implementation")?;
    check_keys(implementation_obj, "implementation", &["repo", "commit"])?;
    let implementation = ImplementationRef {
        repo: require_string(implementation_obj, "repo", "implementation")?,
        commit: require_string(implementation_obj, "commit", "implementation")?,
    };

    let alphabet = name_set::<MessageType>(&top["alphabet"], "alphabet")?;
    let states = name_set::<StateName>(&top["states"], "states")?;
    let initial_states = name_set::<StateName>(&top["initial_states"], "initial_states")?;
    let final_states = name_set::<StateName>(&top["final_states"], "final_states")?;
    let transitions = parse_transitions(&top["transitions"])?;

    Ok(FsmModel {
        protocol,
        implementation,
        alphabet,
        states,
        initial_states,
        final_states,
        transitions,
    })
}

/// Parse just a transitions object (the shape the model emits during
/// inference): current state keys mapping to arrays of
/// `{"receive_message", "next_state"}` entries.
pub fn parse_transitions(value: &Value) -> Result<BTreeSet<Transition>, FsmError> {
    let object = require_object(value, "transitions")?;
    let mut transitions = BTreeSet::new();
    for (state_key, entries) in object {
        let current = StateName::new(state_key)?;
        let location = format!("transitions.{state_key}");
        let array = entries.as_array().ok_or_else(|| schema_error(&location, &[], &[]))?;
        for (index, entry) in array.iter().enumerate() {
            let location = format!("{location}[{index}]");
            let entry_obj = require_object(entry, &location)?;
            check_keys(entry_obj, &location, &["receive_message", "next_state"])?;
            let message = require_string(entry_obj, "receive_message", &location)?;
            let next = require_string(entry_obj, "next_state", &location)?;
            transitions.insert(Transition::new(
                current.clone(),
                MessageType::new(&message)?,
                StateName::new(&next)?,
            ));
        }
    }
    Ok(transitions)
}

fn schema_error(location: &str, missing: &[&str], extra: &[String]) -> FsmError {
    FsmError::Schema {
        location: location.to_string(),
        missing: missing.iter().map(|s| s.to_string()).collect(),
        extra: extra.to_vec(),
    }
}

fn require_object<'a>(
    value: &'a Value,
    location: &str,
) -> Result<&'a serde_json::Map<String, Value>, FsmError> {
    value
        .as_object()
        .ok_or_else(|| schema_error(location, &[], &[]))
}

fn check_keys(
    object: &serde_json::Map<String, Value>,
    location: &str,
    required: &[&str],
) -> Result<(), FsmError> {
    let missing: Vec<&str> = required
        .iter()
        .filter(|key| !object.contains_key(**key))
        .copied()
        .collect();
    let extra: Vec<String> = object
        .keys()
        .filter(|key| !required.contains(&key.as_str()))
        .cloned()
        .collect();
    if missing.is_empty() && extra.is_empty() {
        Ok(())
    } else {
        Err(schema_error(location, &missing, &extra))
    }
}

fn require_string(
    object: &serde_json::Map<String, Value>,
    key: &str,
    location: &str,
) -> Result<String, FsmError> {
    object
        .get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| schema_error(location, &[key], &[]))
}

fn name_set<T>(value: &Value, location: &str) -> Result<BTreeSet<T>, FsmError>
where
    T: TryFrom<String, Error = FsmError> + Ord,
{
    let array = value
        .as_array()
        .ok_or_else(|| schema_error(location, &[], &[]))?;
    let mut out = BTreeSet::new();
    for entry in array {
        let name = entry
            .as_str()
            .ok_or_else(|| schema_error(location, &[], &[]))?;
        out.insert(T::try_from(name.to_string())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::testutil;

    #[test]
    fn round_trip_identity() {
        let model = testutil::fsm(
            &["A"],
            &["C"],
            &[("A", "M1", "B"), ("B", "M2", "C"), ("B", "M2", "A")],
        );
        let document = serialize(&model);
        assert_eq!(parse(&document).unwrap(), model);
    }

    #[test]
    fn serialization_is_deterministic() {
        let model = testutil::fsm(&["A"], &["B"], &[("A", "M", "B"), ("A", "N", "A")]);
        assert_eq!(serialize(&model), serialize(&model.clone()));
    }

    #[test]
    fn missing_transition_key_is_schema_error() {
        let document = r#"{
            "protocol": "p",
            "implementation": {"repo": "r", "commit": "c"},
            "alphabet": ["M"],
            "states": ["A", "B"],
            "initial_states": ["A"],
            "final_states": ["B"],
            "transitions": {"A": [{"next_state": "B"}]}
        }"#;
        match parse(document) {
            Err(FsmError::Schema { missing, .. }) => {
                assert_eq!(missing, vec!["receive_message".to_string()]);
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unexpected_top_level_key_is_schema_error() {
        let document = r#"{
            "protocol": "p",
            "implementation": {"repo": "r", "commit": "c"},
            "alphabet": ["M"],
            "states": ["A"],
            "initial_states": ["A"],
            "final_states": ["A"],
            "transitions": {},
            "bogus": 1
        }"#;
        match parse(document) {
            Err(FsmError::Schema { extra, .. }) => assert_eq!(extra, vec!["bogus".to_string()]),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_location() {
        match parse("{\n  \"protocol\": ") {
            Err(FsmError::Parse { line, .. }) => assert!(line >= 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn transitions_object_shape_is_accepted() {
        let value: Value = serde_json::from_str(
            r#"{"IDLE": [{"receive_message": "hello", "next_state": "open"}]}"#,
        )
        .unwrap();
        let transitions = parse_transitions(&value).unwrap();
        assert_eq!(transitions.len(), 1);
        let t = transitions.iter().next().unwrap();
        assert_eq!(t.current_state.as_str(), "IDLE");
        assert_eq!(t.receive_message.as_str(), "HELLO");
        assert_eq!(t.next_state.as_str(), "OPEN");
    }

    #[test]
    fn shipped_schema_is_valid_json_with_the_document_keys() {
        let schema: Value = serde_json::from_str(FSM_SCHEMA_JSON).unwrap();
        let required: Vec<&str> = schema["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap())
            .collect();
        for key in [
            "protocol",
            "implementation",
            "alphabet",
            "states",
            "initial_states",
            "final_states",
            "transitions",
        ] {
            assert!(required.contains(&key), "schema lost key {key}");
        }
    }

    #[test]
    fn names_are_canonicalized_on_parse() {
        let document = r#"{
            "protocol": "p",
            "implementation": {"repo": "r", "commit": "c"},
            "alphabet": ["client hello"],
            "states": ["start state", "Done"],
            "initial_states": ["start state"],
            "final_states": ["Done"],
            "transitions": {"start state": [{"receive_message": "client hello", "next_state": "Done"}]}
        }"#;
        let model = parse(document).unwrap();
        assert!(model.states.contains(&StateName::new("START_STATE").unwrap()));
        assert!(model.alphabet.contains(&MessageType::new("CLIENT_HELLO").unwrap()));
    }
}
