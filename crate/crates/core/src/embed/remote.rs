//! Remote embeddings over the OpenAI-compatible wire protocol.
//!
//! `POST {endpoint}/embeddings` with `{"model": id, "input": [texts]}`;
//! the response carries `{"data": [{"embedding": [...], "index": n}]}`.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{EmbedError, EmbeddingVector, RemoteEmbeddingSpec};

const BATCH_SIZE: usize = 64;
const ATTEMPTS: u32 = 5;
const BASE_DELAY: Duration = Duration::from_secs(1);

#[derive(Deserialize)]
struct EmbeddingsResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f32>,
    index: usize,
}

pub(super) fn embed_remote(
    texts: &[String],
    dim: usize,
    spec: &RemoteEmbeddingSpec,
) -> Result<Vec<EmbeddingVector>, EmbedError> {
    let credential = std::env::var(&spec.credential_env).map_err(|_| EmbedError::Backend {
        message: format!("credential env var {} is not set", spec.credential_env),
        attempts: 0,
    })?;

    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(120))
        .build()
        .map_err(|e| EmbedError::Backend {
            message: format!("cannot build http client: {e}"),
            attempts: 0,
        })?;
    let url = format!("{}/embeddings", spec.endpoint.trim_end_matches('/'));

    let mut vectors = Vec::with_capacity(texts.len());
    for batch in texts.chunks(BATCH_SIZE) {
        let body = json!({ "model": spec.model, "input": batch });
        let response = request_with_backoff(&client, &url, &credential, &body)?;
        let mut data = response.data;
        if data.len() != batch.len() {
            return Err(EmbedError::Backend {
                message: format!(
                    "endpoint returned {} embeddings for {} inputs",
                    data.len(),
                    batch.len()
                ),
                attempts: 1,
            });
        }
        data.sort_by_key(|d| d.index);
        for datum in data {
            if datum.embedding.len() != dim {
                return Err(EmbedError::Dim {
                    expected: dim,
                    got: datum.embedding.len(),
                });
            }
            vectors.push(EmbeddingVector::normalized(datum.embedding));
        }
    }
    Ok(vectors)
}

fn request_with_backoff(
    client: &reqwest::blocking::Client,
    url: &str,
    credential: &str,
    body: &serde_json::Value,
) -> Result<EmbeddingsResponse, EmbedError> {
    let mut delay = BASE_DELAY;
    let mut last_error = String::new();
    for attempt in 1..=ATTEMPTS {
        match client.post(url).bearer_auth(credential).json(body).send() {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    return response.json().map_err(|e| EmbedError::Backend {
                        message: format!("bad embeddings response: {e}"),
                        attempts: attempt,
                    });
                }
                last_error = format!("http status {status}");
                // Client errors other than rate limiting will not heal.
                if status.is_client_error() && status.as_u16() != 429 {
                    return Err(EmbedError::Backend {
                        message: last_error,
                        attempts: attempt,
                    });
                }
            }
            Err(e) => last_error = e.to_string(),
        }
        if attempt < ATTEMPTS {
            std::thread::sleep(delay);
            delay *= 2;
        }
    }
    Err(EmbedError::Backend {
        message: last_error,
        attempts: ATTEMPTS,
    })
}
