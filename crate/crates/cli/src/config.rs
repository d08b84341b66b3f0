//! Run configuration file.
//!
//! One TOML file describes a full run: the repository, the protocol, and
//! the per-module settings. Relative paths inside the file resolve against
//! the file's own directory, so a config checked in next to its fixtures
//! works from any working directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use protofsm::embed::{EmbeddingBackendSpec, LocalHashSpec, RemoteEmbeddingSpec};
use protofsm::filter::FilterConfig;
use protofsm::infer::{ConsensusConfig, RetrievalConfig};
use protofsm::llm::{ChatConfig, RetryPolicy};
use protofsm::segment::SegmenterConfig;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub run: RunSection,
    #[serde(default)]
    pub filter: FilterSection,
    #[serde(default)]
    pub segmenter: SegmenterSection,
    #[serde(default)]
    pub embedding: EmbeddingSection,
    #[serde(default)]
    pub chat: ChatSection,
    #[serde(default)]
    pub consensus: ConsensusSection,
    #[serde(default)]
    pub retrieval: RetrievalSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub repo: String,
    pub protocol: String,
    pub output_dir: String,
    pub keyword_file: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub source_extensions: Option<Vec<String>>,
    pub min_docs: Option<usize>,
    pub rank_by_hits: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmenterSection {
    pub max_chunk_size: Option<usize>,
    pub min_chunk_size: Option<usize>,
    pub overlap: Option<usize>,
    pub language: Option<String>,
    /// JSON file of custom separator tables overriding the built-ins.
    pub separator_file: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSection {
    pub kind: Option<String>,
    pub dim: Option<usize>,
    pub ngram_len: Option<usize>,
    pub hash_seed: Option<u64>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub credential_env: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatSection {
    pub backend: Option<String>,
    pub fixtures: Option<String>,
    pub model: Option<String>,
    pub temperature: Option<f64>,
    pub max_output_tokens: Option<u32>,
    pub endpoint: Option<String>,
    pub credential_env: Option<String>,
    pub timeout_secs: Option<u64>,
    pub retry_attempts: Option<u32>,
    pub retry_base_delay_ms: Option<u64>,
    pub context_window_tokens: Option<u32>,
    pub log_content: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsensusSection {
    pub iterations: Option<u32>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalSection {
    pub k: Option<usize>,
    pub chars_per_token: Option<usize>,
}

/// Which chat backend a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Remote,
    Fixture,
}

/// The resolved run configuration.
#[derive(Debug)]
pub struct RunConfig {
    /// Repository path exactly as written in the config; recorded as the
    /// implementation locator.
    pub repo_raw: String,
    pub repo: PathBuf,
    pub protocol: String,
    pub output_dir: PathBuf,
    pub keyword_file: Option<PathBuf>,
    pub filter: FilterConfig,
    pub segmenter: SegmenterConfig,
    pub separator_file: Option<PathBuf>,
    pub embedding: EmbeddingBackendSpec,
    pub chat: ChatConfig,
    pub backend: BackendKind,
    pub fixtures: Option<PathBuf>,
    pub log_content: bool,
    pub consensus: ConsensusConfig,
    pub retrieval: RetrievalConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let file: RunConfigFile = toml::from_str(&content)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_file(file, base)
    }

    fn from_file(file: RunConfigFile, base: &Path) -> Result<Self, CliError> {
        let resolve = |raw: &str| -> PathBuf {
            let p = Path::new(raw);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };

        let mut filter = FilterConfig::default();
        if let Some(extensions) = file.filter.source_extensions {
            filter.source_extensions = extensions;
        }
        if let Some(min_docs) = file.filter.min_docs {
            filter.min_docs = min_docs;
        }
        if let Some(rank_by_hits) = file.filter.rank_by_hits {
            filter.rank_by_hits = rank_by_hits;
        }

        let mut segmenter = SegmenterConfig::default();
        if let Some(v) = file.segmenter.max_chunk_size {
            segmenter.max_chunk_size = v;
        }
        if let Some(v) = file.segmenter.min_chunk_size {
            segmenter.min_chunk_size = v;
        }
        if let Some(v) = file.segmenter.overlap {
            segmenter.overlap = v;
        }
        if let Some(v) = file.segmenter.language {
            segmenter.language = v;
        }
        let separator_file = file.segmenter.separator_file.as_deref().map(resolve);

        let dim = file.embedding.dim;
        let embedding = match file.embedding.kind.as_deref().unwrap_or("local-hash") {
            "local-hash" => EmbeddingBackendSpec::LocalHash {
                dim: dim.unwrap_or(512),
                local: LocalHashSpec {
                    ngram_len: file.embedding.ngram_len.unwrap_or(3),
                    hash_seed: file.embedding.hash_seed.unwrap_or(0),
                },
            },
            "remote" => {
                let defaults = RemoteEmbeddingSpec::default();
                EmbeddingBackendSpec::Remote {
                    dim: dim.ok_or_else(|| {
                        CliError::Config("embedding.dim is required for the remote backend".into())
                    })?,
                    remote: RemoteEmbeddingSpec {
                        endpoint: file.embedding.endpoint.unwrap_or(defaults.endpoint),
                        model: file.embedding.model.unwrap_or(defaults.model),
                        credential_env: file
                            .embedding
                            .credential_env
                            .unwrap_or(defaults.credential_env),
                    },
                }
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown embedding kind {other:?} (expected local-hash or remote)"
                )));
            }
        };

        let mut chat = ChatConfig::default();
        if let Some(v) = file.chat.model {
            chat.model = v;
        }
        if let Some(v) = file.chat.temperature {
            chat.temperature = v;
        }
        if let Some(v) = file.chat.max_output_tokens {
            chat.max_output_tokens = v;
        }
        if let Some(v) = file.chat.endpoint {
            chat.endpoint = v;
        }
        if let Some(v) = file.chat.credential_env {
            chat.credential_env = v;
        }
        if let Some(v) = file.chat.timeout_secs {
            chat.timeout_secs = v;
        }
        chat.retry = RetryPolicy {
            attempts: file.chat.retry_attempts.unwrap_or(5),
            base_delay_ms: file.chat.retry_base_delay_ms.unwrap_or(1000),
        };
        if let Some(v) = file.chat.context_window_tokens {
            chat.context_window_tokens = v;
        }

        let backend = match file.chat.backend.as_deref().unwrap_or("remote") {
            "remote" => BackendKind::Remote,
            "fixture" => BackendKind::Fixture,
            other => {
                return Err(CliError::Config(format!(
                    "unknown chat backend {other:?} (expected remote or fixture)"
                )));
            }
        };

        let consensus = ConsensusConfig {
            iterations: file.consensus.iterations.unwrap_or(20),
            threshold: file.consensus.threshold.unwrap_or(0.8),
        };
        let retrieval = RetrievalConfig {
            k: file.retrieval.k.unwrap_or(8),
            chars_per_token: file.retrieval.chars_per_token.unwrap_or(4),
        };

        let config = Self {
            repo_raw: file.run.repo.clone(),
            repo: resolve(&file.run.repo),
            protocol: file.run.protocol,
            output_dir: resolve(&file.run.output_dir),
            keyword_file: file.run.keyword_file.as_deref().map(resolve),
            filter,
            segmenter,
            separator_file,
            embedding,
            chat,
            backend,
            fixtures: file.chat.fixtures.as_deref().map(resolve),
            log_content: file.chat.log_content.unwrap_or(false),
            consensus,
            retrieval,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.segmenter
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.embedding
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.chat
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.consensus
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.retrieval.k == 0 {
            return Err(CliError::Config("retrieval.k must be >= 1".into()));
        }
        if self.backend == BackendKind::Fixture && self.fixtures.is_none() {
            return Err(CliError::Config(
                "chat.fixtures is required for the fixture backend".into(),
            ));
        }
        Ok(())
    }

    /// The default index location under the output directory.
    pub fn index_path(&self) -> PathBuf {
        self.output_dir.join("index.fsmidx")
    }
}
