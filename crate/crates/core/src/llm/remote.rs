//! Remote chat completions.
//!
//! `POST {endpoint}/chat/completions` with `{"model", "temperature",
//! "messages": [{"role", "content"}]}`, reading
//! `choices[0].message.content`. Any server speaking this shape works.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{ChatConfig, LlmError, Role, Transcript};

/// Prompt/completion token counts when the endpoint reports them.
pub(super) type Usage = Option<(u64, u64)>;

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    usage: Option<UsageBody>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct UsageBody {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

pub(super) fn complete_remote(
    transcript: &Transcript,
    config: &ChatConfig,
) -> Result<(String, Usage), LlmError> {
    let credential = std::env::var(&config.credential_env).map_err(|_| LlmError::Backend {
        message: format!("credential env var {} is not set", config.credential_env),
        attempts: 0,
    })?;

    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(config.timeout_secs))
        .build()
        .map_err(|e| LlmError::Backend {
            message: format!("cannot build http client: {e}"),
            attempts: 0,
        })?;
    let url = format!(
        "{}/chat/completions",
        config.endpoint.trim_end_matches('/')
    );
    let messages: Vec<serde_json::Value> = transcript
        .turns()
        .iter()
        .map(|turn| {
            json!({
                "role": match turn.role {
                    Role::System => "system",
                    Role::User => "user",
                    Role::Assistant => "assistant",
                },
                "content": turn.content,
            })
        })
        .collect();
    let body = json!({
        "model": config.model,
        "temperature": config.temperature,
        "max_tokens": config.max_output_tokens,
        "messages": messages,
    });

    let mut delay = Duration::from_millis(config.retry.base_delay_ms);
    let mut last_error = String::new();
    let mut timed_out = false;
    for attempt in 1..=config.retry.attempts {
        match client.post(&url).bearer_auth(&credential).json(&body).send() {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    let parsed: ChatResponse =
                        response.json().map_err(|e| LlmError::Backend {
                            message: format!("bad chat response: {e}"),
                            attempts: attempt,
                        })?;
                    let content = parsed
                        .choices
                        .first()
                        .and_then(|c| c.message.content.clone())
                        .ok_or_else(|| LlmError::Backend {
                            message: "response has no assistant content".to_string(),
                            attempts: attempt,
                        })?;
                    let usage = parsed.usage.and_then(|u| {
                        Some((u.prompt_tokens?, u.completion_tokens.unwrap_or(0)))
                    });
                    return Ok((content, usage));
                }
                last_error = format!("http status {status}");
                timed_out = false;
                if status.is_client_error() && status.as_u16() != 429 {
                    return Err(LlmError::Backend {
                        message: last_error,
                        attempts: attempt,
                    });
                }
            }
            Err(e) => {
                timed_out = e.is_timeout();
                last_error = e.to_string();
            }
        }
        if attempt < config.retry.attempts {
            std::thread::sleep(delay);
            delay *= 2;
        }
    }
    if timed_out {
        Err(LlmError::Timeout(config.retry.attempts))
    } else {
        Err(LlmError::Backend {
            message: last_error,
            attempts: config.retry.attempts,
        })
    }
}
