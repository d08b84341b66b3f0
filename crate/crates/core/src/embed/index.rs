//! The on-disk vector index and exact top-k retrieval.
//!
//! File layout: the magic bytes `FSMFIDX1`, a little-endian u64 length
//! prefix, the JSON manifest (fingerprint, chunk metadata, provenance), and
//! then one fixed-width record of little-endian f32 values per entry.
//! Fixed-width float records round-trip bit-exactly across platforms.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingBackendSpec, EmbeddingVector};

const MAGIC: &[u8; 8] = b"FSMFIDX1";

/// Identifies one chunk of one document.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChunkRef {
    pub doc_path: String,
    pub ordinal: usize,
}

/// Index provenance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexManifest {
    /// Unix seconds; zero when built reproducibly.
    pub created_unix: u64,
    /// Digest over the scanned repository snapshot.
    pub repo_snapshot_id: String,
    /// Digest of the segmenter configuration the chunks came from.
    pub segmenter_config_digest: String,
}

/// One indexed chunk: its identity, the text that was embedded (kept so
/// retrieval can hand code back to the prompt without re-reading the
/// repository), and its vector.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub chunk: ChunkRef,
    pub text: String,
    pub vector: EmbeddingVector,
}

/// An immutable embedding index.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    fingerprint: String,
    dim: usize,
    manifest: IndexManifest,
    entries: Vec<IndexEntry>,
}

/// One retrieval hit.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    pub chunk: ChunkRef,
    pub text: String,
    /// Cosine similarity in [-1, 1].
    pub score: f64,
}

impl VectorIndex {
    /// Assemble an index. Every vector must match the backend dimension and
    /// chunk references must be unique.
    pub fn build(
        spec: &EmbeddingBackendSpec,
        manifest: IndexManifest,
        entries: Vec<IndexEntry>,
    ) -> Result<Self, EmbedError> {
        let dim = spec.dim();
        for entry in &entries {
            if entry.vector.dim() != dim {
                return Err(EmbedError::Dim {
                    expected: dim,
                    got: entry.vector.dim(),
                });
            }
        }
        let mut refs: Vec<&ChunkRef> = entries.iter().map(|e| &e.chunk).collect();
        refs.sort();
        if refs.windows(2).any(|w| w[0] == w[1]) {
            return Err(EmbedError::IndexFormat("duplicate chunk reference".into()));
        }
        Ok(Self {
            fingerprint: spec.fingerprint(),
            dim,
            manifest,
            entries,
        })
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn manifest(&self) -> &IndexManifest {
        &self.manifest
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Persist to `path`.
    pub fn save(&self, path: &Path) -> Result<(), EmbedError> {
        let io_err = |source| EmbedError::Io {
            path: path.display().to_string(),
            source,
        };

        #[derive(Serialize)]
        struct Header<'a> {
            fingerprint: &'a str,
            dim: usize,
            manifest: &'a IndexManifest,
            chunks: Vec<HeaderChunk<'a>>,
        }
        #[derive(Serialize)]
        struct HeaderChunk<'a> {
            doc_path: &'a str,
            ordinal: usize,
            text: &'a str,
        }

        let header = Header {
            fingerprint: &self.fingerprint,
            dim: self.dim,
            manifest: &self.manifest,
            chunks: self
                .entries
                .iter()
                .map(|e| HeaderChunk {
                    doc_path: &e.chunk.doc_path,
                    ordinal: e.chunk.ordinal,
                    text: &e.text,
                })
                .collect(),
        };
        let header_json =
            serde_json::to_vec(&header).expect("manifest serialization is infallible");

        let mut file = fs::File::create(path).map_err(io_err)?;
        file.write_all(MAGIC).map_err(io_err)?;
        file.write_all(&(header_json.len() as u64).to_le_bytes())
            .map_err(io_err)?;
        file.write_all(&header_json).map_err(io_err)?;
        for entry in &self.entries {
            for value in entry.vector.values() {
                file.write_all(&value.to_le_bytes()).map_err(io_err)?;
            }
        }
        Ok(())
    }

    /// Load an index written by [`save`](Self::save). When `expected` is
    /// given, a fingerprint difference is rejected so stale indexes cannot
    /// silently serve a reconfigured backend.
    pub fn load(path: &Path, expected: Option<&EmbeddingBackendSpec>) -> Result<Self, EmbedError> {
        let io_err = |source| EmbedError::Io {
            path: path.display().to_string(),
            source,
        };
        let format_err = |message: &str| EmbedError::IndexFormat(message.to_string());

        #[derive(Deserialize)]
        struct Header {
            fingerprint: String,
            dim: usize,
            manifest: IndexManifest,
            chunks: Vec<HeaderChunk>,
        }
        #[derive(Deserialize)]
        struct HeaderChunk {
            doc_path: String,
            ordinal: usize,
            text: String,
        }

        let mut file = fs::File::open(path).map_err(io_err)?;
        let mut magic = [0u8; 8];
        file.read_exact(&mut magic)
            .map_err(|_| format_err("missing magic bytes"))?;
        if &magic != MAGIC {
            return Err(format_err("bad magic bytes"));
        }
        let mut len_bytes = [0u8; 8];
        file.read_exact(&mut len_bytes)
            .map_err(|_| format_err("truncated manifest length"))?;
        let header_len = u64::from_le_bytes(len_bytes) as usize;
        let mut header_json = vec![0u8; header_len];
        file.read_exact(&mut header_json)
            .map_err(|_| format_err("truncated manifest"))?;
        let header: Header = serde_json::from_slice(&header_json)
            .map_err(|e| EmbedError::IndexFormat(format!("bad manifest: {e}")))?;

        if let Some(spec) = expected {
            if spec.fingerprint() != header.fingerprint {
                return Err(EmbedError::BackendMismatch {
                    expected: spec.fingerprint(),
                    found: header.fingerprint,
                });
            }
        }
        if header.dim == 0 {
            return Err(format_err("zero dimension"));
        }

        let mut entries = Vec::with_capacity(header.chunks.len());
        let mut record = vec![0u8; header.dim * 4];
        for chunk in header.chunks {
            file.read_exact(&mut record)
                .map_err(|_| format_err("truncated vector records"))?;
            let values: Vec<f32> = record
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                .collect();
            entries.push(IndexEntry {
                chunk: ChunkRef {
                    doc_path: chunk.doc_path,
                    ordinal: chunk.ordinal,
                },
                text: chunk.text,
                // Bit-exact round trip: values were normalized before save.
                vector: EmbeddingVector { values },
            });
        }
        let mut trailing = [0u8; 1];
        if file.read(&mut trailing).map_err(io_err)? != 0 {
            return Err(format_err("trailing bytes after vector records"));
        }

        Ok(Self {
            fingerprint: header.fingerprint,
            dim: header.dim,
            manifest: header.manifest,
            entries,
        })
    }
}

/// Exact top-k retrieval: score every entry by cosine similarity and return
/// the best `min(k, entries)` in descending order, ties broken by chunk
/// reference so results are stable.
pub fn top_k(
    index: &VectorIndex,
    query: &EmbeddingVector,
    k: usize,
) -> Result<Vec<RetrievalResult>, EmbedError> {
    if query.dim() != index.dim() {
        return Err(EmbedError::Dim {
            expected: index.dim(),
            got: query.dim(),
        });
    }
    let mut scored: Vec<(f64, &IndexEntry)> = index
        .entries
        .iter()
        .map(|entry| (entry.vector.dot(query), entry))
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("cosine scores are finite")
            .then_with(|| a.1.chunk.cmp(&b.1.chunk))
    });
    Ok(scored
        .into_iter()
        .take(k)
        .map(|(score, entry)| RetrievalResult {
            chunk: entry.chunk.clone(),
            text: entry.text.clone(),
            score,
        })
        .collect())
}
