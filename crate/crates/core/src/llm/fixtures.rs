//! Deterministic canned responses for tests and offline runs.
//!
//! A fixture book maps request keys to ordered response lists. A key either
//! matches the SHA-256 digest of the rendered prompt exactly, or is a
//! substring pattern; the first entry (in declaration order) that matches
//! wins, and each call consumes the next response of that entry. Running an
//! entry dry is a hard [`LlmError::FixtureMiss`] so tests can never pass on
//! silently recycled output.

use std::fs;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::LlmError;
use crate::util::sha256_hex;

/// How a fixture entry matches a prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureKey {
    /// Exact SHA-256 hex digest of the rendered prompt.
    Digest,
    /// Substring of the rendered prompt.
    Pattern,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub key_kind: FixtureKey,
    pub key: String,
    pub responses: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct FixtureFile {
    entries: Vec<FixtureEntry>,
}

/// A loaded fixture book with per-entry consumption cursors.
pub struct FixtureBook {
    entries: Vec<FixtureEntry>,
    cursors: Mutex<Vec<usize>>,
}

impl FixtureBook {
    pub fn new(entries: Vec<FixtureEntry>) -> Result<Self, LlmError> {
        for entry in &entries {
            if entry.responses.is_empty() {
                return Err(LlmError::Config(format!(
                    "fixture entry {:?} has no responses",
                    entry.key
                )));
            }
        }
        let cursors = Mutex::new(vec![0; entries.len()]);
        Ok(Self { entries, cursors })
    }

    /// Load a fixture book document: `{"entries": [{"key_kind", "key",
    /// "responses"}]}`.
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let content = fs::read_to_string(path).map_err(|e| {
            LlmError::Config(format!("cannot read fixture file {}: {e}", path.display()))
        })?;
        let file: FixtureFile = serde_json::from_str(&content)
            .map_err(|e| LlmError::Config(format!("bad fixture file: {e}")))?;
        Self::new(file.entries)
    }

    /// Return the next canned response for `rendered_prompt` and advance
    /// the matching entry's cursor.
    pub fn next_response(&self, rendered_prompt: &str) -> Result<String, LlmError> {
        let digest = sha256_hex(rendered_prompt.as_bytes());
        let mut cursors = self.cursors.lock().expect("fixture cursor lock");
        for (entry, cursor) in self.entries.iter().zip(cursors.iter_mut()) {
            let matches = match entry.key_kind {
                FixtureKey::Digest => entry.key == digest,
                FixtureKey::Pattern => rendered_prompt.contains(&entry.key),
            };
            if !matches {
                continue;
            }
            let response = entry.responses.get(*cursor).cloned();
            return match response {
                Some(text) => {
                    *cursor += 1;
                    Ok(text)
                }
                None => Err(LlmError::FixtureMiss {
                    digest,
                    preview: preview(rendered_prompt),
                }),
            };
        }
        Err(LlmError::FixtureMiss {
            digest,
            preview: preview(rendered_prompt),
        })
    }
}

fn preview(prompt: &str) -> String {
    prompt.chars().take(80).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::Transcript;

    fn entry(kind: FixtureKey, key: &str, responses: &[&str]) -> FixtureEntry {
        FixtureEntry {
            key_kind: kind,
            key: key.to_string(),
            responses: responses.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn digest_key_matches_exact_prompt() {
        let transcript = Transcript::user("P");
        let book = FixtureBook::new(vec![entry(
            FixtureKey::Digest,
            &transcript.digest(),
            &["R"],
        )])
        .unwrap();
        assert_eq!(book.next_response(&transcript.rendered()).unwrap(), "R");
    }

    #[test]
    fn exhausted_entry_is_a_fixture_miss() {
        let book =
            FixtureBook::new(vec![entry(FixtureKey::Pattern, "states", &["a", "b", "c"])]).unwrap();
        for expected in ["a", "b", "c"] {
            assert_eq!(book.next_response("list the states").unwrap(), expected);
        }
        assert!(matches!(
            book.next_response("list the states"),
            Err(LlmError::FixtureMiss { .. })
        ));
    }

    #[test]
    fn first_declared_pattern_wins() {
        let book = FixtureBook::new(vec![
            entry(FixtureKey::Pattern, "state", &["first"]),
            entry(FixtureKey::Pattern, "states", &["second"]),
        ])
        .unwrap();
        assert_eq!(book.next_response("all states").unwrap(), "first");
    }

    #[test]
    fn unmatched_prompt_is_a_fixture_miss() {
        let book = FixtureBook::new(vec![entry(FixtureKey::Pattern, "alpha", &["r"])]).unwrap();
        assert!(matches!(
            book.next_response("beta"),
            Err(LlmError::FixtureMiss { .. })
        ));
    }

    #[test]
    fn empty_response_list_is_rejected_at_load() {
        assert!(FixtureBook::new(vec![entry(FixtureKey::Pattern, "x", &[])]).is_err());
    }
}
