//! Append-only session log.
//!
//! One JSON line per completion: prompt digest, latency, and token counts
//! (endpoint-reported when available, otherwise a 4-characters-per-token
//! estimate). Prompt and response text are only written when content
//! logging was explicitly enabled, which keeps proprietary code out of log
//! files by default.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde_json::json;

use super::remote::Usage;
use super::Transcript;

pub struct SessionLog {
    path: PathBuf,
    log_content: bool,
    file: Mutex<File>,
}

impl SessionLog {
    pub fn open(path: &Path, log_content: bool) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self {
            path: path.to_path_buf(),
            log_content,
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub(super) fn record(
        &self,
        digest: &str,
        latency: Duration,
        outcome: Option<&(String, Usage)>,
        transcript: &Transcript,
    ) {
        let prompt_chars = transcript.rendered().chars().count();
        let (prompt_tokens, completion_tokens) = match outcome {
            Some((text, Some((prompt, completion)))) => {
                let _ = text;
                (*prompt, *completion)
            }
            Some((text, None)) => (
                (prompt_chars as u64).div_ceil(4),
                (text.chars().count() as u64).div_ceil(4),
            ),
            None => ((prompt_chars as u64).div_ceil(4), 0),
        };

        let mut line = json!({
            "digest": digest,
            "latency_ms": latency.as_millis() as u64,
            "ok": outcome.is_some(),
            "prompt_tokens": prompt_tokens,
            "completion_tokens": completion_tokens,
        });
        if self.log_content {
            line["prompt"] = json!(transcript.rendered());
            line["response"] = json!(outcome.map(|(text, _)| text.clone()));
        }

        let mut file = self.file.lock().expect("session log lock");
        // Logging failures must not take the pipeline down.
        let _ = writeln!(file, "{line}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{ChatClient, ChatConfig, FixtureBook, FixtureEntry, FixtureKey};

    #[test]
    fn log_omits_content_by_default() {
        let dir = tempfile::tempdir().unwrap();
        let log_path = dir.path().join("session.jsonl");
        let log = SessionLog::open(&log_path, false).unwrap();
        let book = FixtureBook::new(vec![FixtureEntry {
            key_kind: FixtureKey::Pattern,
            key: "secret prompt".to_string(),
            responses: vec!["secret response".to_string()],
        }])
        .unwrap();
        let client = ChatClient::Fixture(book);
        client
            .complete(
                &Transcript::user("secret prompt"),
                &ChatConfig::default(),
                Some(&log),
            )
            .unwrap();

        let content = std::fs::read_to_string(&log_path).unwrap();
        assert_eq!(content.lines().count(), 1);
        assert!(!content.contains("secret"));
        let line: serde_json::Value = serde_json::from_str(content.trim()).unwrap();
        assert_eq!(line["ok"], true);
        assert!(line["prompt_tokens"].as_u64().unwrap() > 0);
    }

    #[test]
    fn opt_in_content_logging_includes_text() {
        let dir = tempfile::tempdir().unwrap();
        let log_path = dir.path().join("session.jsonl");
        let log = SessionLog::open(&log_path, true).unwrap();
        let book = FixtureBook::new(vec![FixtureEntry {
            key_kind: FixtureKey::Pattern,
            key: "hello".to_string(),
            responses: vec!["world".to_string()],
        }])
        .unwrap();
        ChatClient::Fixture(book)
            .complete(&Transcript::user("hello"), &ChatConfig::default(), Some(&log))
            .unwrap();
        let content = std::fs::read_to_string(&log_path).unwrap();
        assert!(content.contains("world"));
    }
}
