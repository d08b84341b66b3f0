//! Structured-output extraction from chat responses.
//!
//! A response may wrap its JSON in prose or a fenced code block; parsing
//! finds the first balanced JSON value and validates it against the stage's
//! expected shape. A response with no usable block is a [`ParseFailure`],
//! which costs the iteration its vote but never aborts a stage.

use serde_json::Value;

use super::prompt::Stage;
use crate::fsm::{self, canonicalize_name, Transition};

/// A single response could not be interpreted for its stage.
#[derive(Debug, Clone)]
pub struct ParseFailure {
    pub reason: String,
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.reason)
    }
}

/// Canonicalized items extracted from one response.
#[derive(Debug, Clone, Default)]
pub struct ParsedOutput {
    /// Normalized relative paths (code-paths stage).
    pub paths: Vec<String>,
    /// Canonical state or message names (states / messages stages).
    pub names: Vec<String>,
    /// Transition triples (transitions stage).
    pub transitions: Vec<Transition>,
    /// Initial states when the response marked them explicitly.
    pub marked_initial: Vec<String>,
    /// Final states when the response marked them explicitly.
    pub marked_final: Vec<String>,
}

/// Parse one stage response.
pub fn parse_output(stage: Stage, response: &str) -> Result<ParsedOutput, ParseFailure> {
    let value = extract_json(response).ok_or_else(|| ParseFailure {
        reason: "no parseable JSON block in response".to_string(),
    })?;
    match stage {
        Stage::CodePaths => parse_paths(&value),
        Stage::States => parse_names(&value, "states"),
        Stage::Messages => parse_names(&value, "messages"),
        Stage::Transitions => parse_transition_block(&value),
    }
}

fn parse_paths(value: &Value) -> Result<ParsedOutput, ParseFailure> {
    let array = string_array(value).ok_or_else(|| ParseFailure {
        reason: "expected a JSON array of path strings".to_string(),
    })?;
    let mut output = ParsedOutput::default();
    for raw in array {
        if let Some(path) = normalize_rel_path(&raw) {
            output.paths.push(path);
        }
    }
    Ok(output)
}

fn parse_names(value: &Value, list_key: &str) -> Result<ParsedOutput, ParseFailure> {
    let mut output = ParsedOutput::default();
    let names = match value {
        Value::Array(_) => string_array(value),
        // Marked object form: {"states": [...], "initial_states": [...],
        // "final_states": [...]}.
        Value::Object(map) => {
            if let Some(initial) = map.get("initial_states").and_then(string_array) {
                output.marked_initial = canonical_names(&initial);
            }
            if let Some(finals) = map.get("final_states").and_then(string_array) {
                output.marked_final = canonical_names(&finals);
            }
            map.get(list_key).and_then(string_array)
        }
        _ => None,
    };
    let names = names.ok_or_else(|| ParseFailure {
        reason: format!("expected a JSON array of {list_key}"),
    })?;
    output.names = canonical_names(&names);
    Ok(output)
}

fn parse_transition_block(value: &Value) -> Result<ParsedOutput, ParseFailure> {
    // Tolerate a {"transitions": {...}} wrapper around the keyed object.
    let inner = match value {
        Value::Object(map) if map.contains_key("transitions") => &map["transitions"],
        other => other,
    };
    let transitions = fsm::parse_transitions(inner).map_err(|e| ParseFailure {
        reason: format!("bad transitions object: {e}"),
    })?;
    Ok(ParsedOutput {
        transitions: transitions.into_iter().collect(),
        ..ParsedOutput::default()
    })
}

fn canonical_names(raw: &[String]) -> Vec<String> {
    raw.iter()
        .filter_map(|name| match canonicalize_name(name) {
            Ok(canonical) => Some(canonical),
            Err(_) => {
                log::warn!("dropping uncanonicalizable name {name:?}");
                None
            }
        })
        .collect()
}

fn string_array(value: &Value) -> Option<Vec<String>> {
    let array = value.as_array()?;
    array
        .iter()
        .map(|v| v.as_str().map(str::to_string))
        .collect()
}

/// Normalize a model-reported path: forward slashes, no leading `./` or
/// `/`, `..` resolved, empty segments dropped.
pub fn normalize_rel_path(raw: &str) -> Option<String> {
    let cleaned = raw.trim().replace('\\', "/");
    let mut parts: Vec<&str> = Vec::new();
    for segment in cleaned.split('/') {
        match segment {
            "" | "." => {}
            ".." => {
                parts.pop();
            }
            other => parts.push(other),
        }
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts.join("/"))
    }
}

/// Find the first balanced JSON value (object or array) in `text`.
fn extract_json(text: &str) -> Option<Value> {
    let bytes = text.as_bytes();
    for (start, &byte) in bytes.iter().enumerate() {
        if byte != b'{' && byte != b'[' {
            continue;
        }
        if let Some(end) = balanced_end(bytes, start) {
            if let Ok(value) = serde_json::from_str::<Value>(&text[start..end]) {
                return Some(value);
            }
        }
    }
    None
}

/// Scan from an opening bracket to its matching close, respecting string
/// literals. Returns the exclusive end offset.
fn balanced_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, &byte) in bytes[start..].iter().enumerate() {
        if in_string {
            if escaped {
                escaped = false;
            } else if byte == b'\\' {
                escaped = true;
            } else if byte == b'"' {
                in_string = false;
            }
            continue;
        }
        match byte {
            b'"' => in_string = true,
            b'{' | b'[' => depth += 1,
            b'}' | b']' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    return Some(start + offset + 1);
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenced_array_is_extracted() {
        let response = "Here are the states:\n```json\n[\"idle\", \"open state\"]\n```\nDone.";
        let output = parse_output(Stage::States, response).unwrap();
        assert_eq!(output.names, vec!["IDLE", "OPEN_STATE"]);
    }

    #[test]
    fn transitions_object_parses_to_triples() {
        let response = r#"{"IDLE": [{"receive_message": "hello", "next_state": "OPEN"}]}"#;
        let output = parse_output(Stage::Transitions, response).unwrap();
        assert_eq!(output.transitions.len(), 1);
        let t = &output.transitions[0];
        assert_eq!(t.current_state.as_str(), "IDLE");
        assert_eq!(t.receive_message.as_str(), "HELLO");
        assert_eq!(t.next_state.as_str(), "OPEN");
    }

    #[test]
    fn prose_only_response_is_a_parse_failure() {
        assert!(parse_output(Stage::States, "I could not find any states.").is_err());
    }

    #[test]
    fn marked_state_object_is_recognized() {
        let response = r#"{"states": ["A", "B"], "initial_states": ["A"], "final_states": ["B"]}"#;
        let output = parse_output(Stage::States, response).unwrap();
        assert_eq!(output.names, vec!["A", "B"]);
        assert_eq!(output.marked_initial, vec!["A"]);
        assert_eq!(output.marked_final, vec!["B"]);
    }

    #[test]
    fn paths_are_normalized() {
        let response = r#"["./src//fsm.c", "src\\proto\\msg.h", "  "]"#;
        let output = parse_output(Stage::CodePaths, response).unwrap();
        assert_eq!(output.paths, vec!["src/fsm.c", "src/proto/msg.h"]);
    }

    #[test]
    fn only_the_first_block_is_considered() {
        // The first balanced block is extracted and then shape-checked; a
        // later conforming block does not rescue the response.
        let response = "note [1, 2] then [\"REAL\"]";
        assert!(parse_output(Stage::States, response).is_err());
    }

    #[test]
    fn brackets_inside_strings_do_not_confuse_the_scanner() {
        let response = r#"["a[b", "c]d"]"#;
        let output = parse_output(Stage::States, response).unwrap();
        assert_eq!(output.names.len(), 2);
    }
}
