//! Chat-completion gateway.
//!
//! One `complete` call works against either a remote OpenAI-compatible
//! endpoint or a deterministic fixture book, so every pipeline above this
//! module can run and be tested offline. Requests are summarized to an
//! optional session log; response content is only logged when explicitly
//! enabled, and the API credential is read from the environment at request
//! time and never stored or serialized.

mod fixtures;
mod remote;
mod session;

pub use fixtures::{FixtureBook, FixtureEntry, FixtureKey};
pub use session::SessionLog;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::sha256_hex;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("invalid chat config: {0}")]
    Config(String),
    #[error("no fixture matches prompt digest {digest} (prompt starts {preview:?})")]
    FixtureMiss { digest: String, preview: String },
    #[error("chat backend error after {attempts} attempt(s): {message}")]
    Backend { message: String, attempts: u32 },
    #[error("chat request timed out after {0} attempt(s)")]
    Timeout(u32),
}

/// Message author role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

/// One conversation turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub content: String,
}

/// An ordered, non-empty conversation whose first turn is system or user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    turns: Vec<Turn>,
}

impl Transcript {
    pub fn new(turns: Vec<Turn>) -> Result<Self, LlmError> {
        match turns.first() {
            None => Err(LlmError::Config("transcript is empty".into())),
            Some(turn) if turn.role == Role::Assistant => Err(LlmError::Config(
                "transcript must open with a system or user turn".into(),
            )),
            Some(_) => Ok(Self { turns }),
        }
    }

    /// Single user message.
    pub fn user(content: impl Into<String>) -> Self {
        Self {
            turns: vec![Turn {
                role: Role::User,
                content: content.into(),
            }],
        }
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    /// Canonical text form used for fixture keys and log digests.
    pub fn rendered(&self) -> String {
        let mut out = String::new();
        for turn in &self.turns {
            let role = match turn.role {
                Role::System => "system",
                Role::User => "user",
                Role::Assistant => "assistant",
            };
            out.push_str(role);
            out.push_str(":\n");
            out.push_str(&turn.content);
            out.push_str("\n\n");
        }
        out
    }

    pub fn digest(&self) -> String {
        sha256_hex(self.rendered().as_bytes())
    }
}

/// Retry policy for the remote backend.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 5,
            base_delay_ms: 1000,
        }
    }
}

/// Chat backend configuration. Holds the credential env var *name*, never
/// the credential value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatConfig {
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub endpoint: String,
    pub credential_env: String,
    pub timeout_secs: u64,
    pub retry: RetryPolicy,
    /// Model context window in tokens; used for retrieval budgeting.
    pub context_window_tokens: u32,
}

impl Default for ChatConfig {
    fn default() -> Self {
        Self {
            model: "gpt-4".to_string(),
            // Low temperature favors factual output.
            temperature: 0.2,
            max_output_tokens: 1024,
            endpoint: "https://api.openai.com/v1".to_string(),
            credential_env: "OPENAI_API_KEY".to_string(),
            timeout_secs: 120,
            retry: RetryPolicy::default(),
            context_window_tokens: 8192,
        }
    }
}

impl ChatConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::Config(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.retry.attempts == 0 {
            return Err(LlmError::Config("retry attempts must be >= 1".into()));
        }
        Ok(())
    }
}

/// A chat backend plus optional session logging.
pub enum ChatClient {
    Remote,
    Fixture(FixtureBook),
}

impl ChatClient {
    /// Run one completion and return the assistant message text.
    pub fn complete(
        &self,
        transcript: &Transcript,
        config: &ChatConfig,
        session: Option<&SessionLog>,
    ) -> Result<String, LlmError> {
        config.validate()?;
        let started = std::time::Instant::now();
        let result = match self {
            ChatClient::Fixture(book) => book
                .next_response(&transcript.rendered())
                .map(|text| (text, None)),
            ChatClient::Remote => remote::complete_remote(transcript, config),
        };
        if let Some(log) = session {
            log.record(
                &transcript.digest(),
                started.elapsed(),
                result.as_ref().ok(),
                transcript,
            );
        }
        result.map(|(text, _)| text)
    }
}
