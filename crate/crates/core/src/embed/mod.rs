//! Chunk embedding and top-k cosine retrieval over a persisted index.
//!
//! Two backends share one interface: a remote OpenAI-compatible embeddings
//! endpoint, and a fully deterministic local feature-hashing backend that
//! lets the whole pipeline run and be tested with zero network access. All
//! vectors are L2-normalized, so cosine similarity is a plain dot product.

mod index;
mod remote;

pub use index::{top_k, ChunkRef, IndexEntry, IndexManifest, RetrievalResult, VectorIndex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding backend error: {message}")]
    Backend {
        message: String,
        /// Attempts actually made before giving up.
        attempts: u32,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dim { expected: usize, got: usize },
    #[error("index file format error: {0}")]
    IndexFormat(String),
    #[error("index was built with backend {found} but {expected} is configured")]
    BackendMismatch { expected: String, found: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A unit-norm embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f32>,
}

impl EmbeddingVector {
    /// Normalize `values` to unit L2 norm. All-zero input maps to the first
    /// basis vector so every text embeds to something finite.
    pub fn normalized(mut values: Vec<f32>) -> Self {
        let norm = values.iter().map(|v| (*v as f64) * (*v as f64)).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            for v in &mut values {
                *v = (*v as f64 / norm) as f32;
            }
        } else {
            values.fill(0.0);
            if let Some(first) = values.first_mut() {
                *first = 1.0;
            }
        }
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a as f64) * (*b as f64))
            .sum()
    }
}

/// Remote backend parameters. The credential itself is read from the
/// environment at request time and never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteEmbeddingSpec {
    pub endpoint: String,
    pub model: String,
    pub credential_env: String,
}

impl Default for RemoteEmbeddingSpec {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1".to_string(),
            model: "text-embedding-3-small".to_string(),
            credential_env: "OPENAI_API_KEY".to_string(),
        }
    }
}

/// Local feature-hashing backend parameters: character n-grams hashed into
/// `dim` buckets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalHashSpec {
    pub ngram_len: usize,
    pub hash_seed: u64,
}

impl Default for LocalHashSpec {
    fn default() -> Self {
        Self {
            ngram_len: 3,
            hash_seed: 0,
        }
    }
}

/// Which embedding backend to use, and its output dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EmbeddingBackendSpec {
    Remote {
        dim: usize,
        #[serde(flatten)]
        remote: RemoteEmbeddingSpec,
    },
    LocalHash {
        dim: usize,
        #[serde(flatten)]
        local: LocalHashSpec,
    },
}

impl EmbeddingBackendSpec {
    /// Deterministic test-friendly default: local hashing at 512 buckets.
    pub fn local_default() -> Self {
        Self::LocalHash {
            dim: 512,
            local: LocalHashSpec::default(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Remote { dim, .. } | Self::LocalHash { dim, .. } => *dim,
        }
    }

    /// Identity string stored in index files so an index can never be
    /// queried with vectors from a different backend configuration.
    pub fn fingerprint(&self) -> String {
        match self {
            Self::Remote { dim, remote } => format!("remote:{}:{dim}", remote.model),
            Self::LocalHash { dim, local } => {
                format!("local-hash:n{}:s{}:{dim}", local.ngram_len, local.hash_seed)
            }
        }
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.dim() == 0 {
            return Err(EmbedError::Backend {
                message: "dimension must be > 0".to_string(),
                attempts: 0,
            });
        }
        if let Self::LocalHash { local, .. } = self {
            if local.ngram_len == 0 {
                return Err(EmbedError::Backend {
                    message: "n-gram length must be > 0".to_string(),
                    attempts: 0,
                });
            }
        }
        Ok(())
    }
}

/// Embed `texts` in order, one normalized vector each.
pub fn embed(texts: &[String], spec: &EmbeddingBackendSpec) -> Result<Vec<EmbeddingVector>, EmbedError> {
    spec.validate()?;
    match spec {
        EmbeddingBackendSpec::LocalHash { dim, local } => Ok(texts
            .iter()
            .map(|text| local_hash_embed(text, *dim, local))
            .collect()),
        EmbeddingBackendSpec::Remote { dim, remote } => remote::embed_remote(texts, *dim, remote),
    }
}

/// Feature-hash the character n-grams of `text` into `dim` buckets and
/// normalize. Texts shorter than the n-gram length hash as a single gram.
fn local_hash_embed(text: &str, dim: usize, spec: &LocalHashSpec) -> EmbeddingVector {
    let chars: Vec<char> = text.chars().collect();
    let mut counts = vec![0.0f32; dim];
    let mut add = |gram: &[char]| {
        let mut buf = String::with_capacity(gram.len() * 4);
        buf.extend(gram.iter());
        let bucket = (fnv1a64(buf.as_bytes(), spec.hash_seed) % dim as u64) as usize;
        counts[bucket] += 1.0;
    };
    if chars.len() < spec.ngram_len {
        if !chars.is_empty() {
            add(&chars);
        }
    } else {
        for window in chars.windows(spec.ngram_len) {
            add(window);
        }
    }
    EmbeddingVector::normalized(counts)
}

/// FNV-1a, seeded. Stable across platforms and releases, unlike the
/// standard library hasher.
pub(crate) fn fnv1a64(bytes: &[u8], seed: u64) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET ^ seed;
    for byte in bytes {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}
