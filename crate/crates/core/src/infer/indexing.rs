//! Index construction: filter, segment, embed, assemble.

use std::fs;
use std::path::Path;

use crate::embed::{
    embed, ChunkRef, EmbeddingBackendSpec, IndexEntry, IndexManifest, VectorIndex,
};
use crate::filter::{locate_module, DocumentMatch, FilterConfig, KeywordSet, ModuleSelection};
use crate::segment::Segmenter;
use crate::util::sha256_hex;

use super::InferError;

/// Chunk geometry, kept for debugging dumps.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChunkRange {
    pub doc_path: String,
    pub ordinal: usize,
    pub byte_start: usize,
    pub byte_end: usize,
    pub overlap_len: usize,
}

/// A built index plus the selection evidence behind it.
pub struct IndexBuildOutcome {
    pub index: VectorIndex,
    pub selection: ModuleSelection,
    pub matches: Vec<DocumentMatch>,
    /// Core byte ranges of every indexed chunk, in index order.
    pub chunk_ranges: Vec<ChunkRange>,
    /// Digest over (path, content digest) pairs of every scanned source
    /// file; doubles as the implementation snapshot identifier.
    pub repo_snapshot_id: String,
}

/// Locate the state-machine module under `repo_root`, segment every source
/// document in its subtree, embed the chunks, and assemble the index.
///
/// Deterministic for an unchanged repository: the manifest timestamp is
/// taken from `SOURCE_DATE_EPOCH` when set and zero otherwise, so repeated
/// builds are byte-identical.
pub fn build_index(
    repo_root: &Path,
    keyword_set: &KeywordSet,
    filter_config: &FilterConfig,
    segmenter: &Segmenter,
    backend: &EmbeddingBackendSpec,
) -> Result<IndexBuildOutcome, InferError> {
    let (matches, selection) = locate_module(repo_root, keyword_set, filter_config)?;

    let in_module = |path: &str| {
        selection.chosen_dir == "."
            || path == selection.chosen_dir
            || path.starts_with(&format!("{}/", selection.chosen_dir))
    };

    let mut snapshot_lines = Vec::new();
    let mut texts = Vec::new();
    let mut refs = Vec::new();
    let mut chunk_ranges = Vec::new();
    for doc in matches.iter().filter(|m| m.is_source) {
        let full = repo_root.join(doc.path.replace('/', std::path::MAIN_SEPARATOR_STR));
        let bytes = fs::read(&full).map_err(|source| crate::filter::FilterError::Io {
            path: full.display().to_string(),
            source,
        })?;
        snapshot_lines.push(format!("{} {}", doc.path, sha256_hex(&bytes)));
        if !in_module(&doc.path) {
            continue;
        }
        let text = String::from_utf8_lossy(&bytes);
        if matches!(text, std::borrow::Cow::Owned(_)) {
            log::warn!("{}: invalid UTF-8 replaced during segmentation", doc.path);
        }
        for chunk in segmenter.segment(&doc.path, &text) {
            chunk_ranges.push(ChunkRange {
                doc_path: chunk.doc_path.clone(),
                ordinal: chunk.ordinal,
                byte_start: chunk.byte_start,
                byte_end: chunk.byte_end,
                overlap_len: chunk.overlap_len,
            });
            refs.push(ChunkRef {
                doc_path: chunk.doc_path,
                ordinal: chunk.ordinal,
            });
            texts.push(chunk.text);
        }
    }
    let repo_snapshot_id = sha256_hex(snapshot_lines.join("\n").as_bytes());

    let vectors = embed(&texts, backend)?;
    let entries: Vec<IndexEntry> = refs
        .into_iter()
        .zip(texts)
        .zip(vectors)
        .map(|((chunk, text), vector)| IndexEntry {
            chunk,
            text,
            vector,
        })
        .collect();

    let created_unix = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0);
    let manifest = IndexManifest {
        created_unix,
        repo_snapshot_id: repo_snapshot_id.clone(),
        segmenter_config_digest: segmenter.config().digest(),
    };
    let index = VectorIndex::build(backend, manifest, entries)?;

    Ok(IndexBuildOutcome {
        index,
        selection,
        matches,
        chunk_ranges,
        repo_snapshot_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{Keyword, KeywordOrigin};
    use crate::segment::SegmenterConfig;

    #[test]
    fn planted_module_is_indexed() {
        let dir = tempfile::tempdir().unwrap();
        let sm = dir.path().join("src/sm");
        std::fs::create_dir_all(&sm).unwrap();
        std::fs::write(sm.join("fsm.c"), "STATE_ALPHA handler\n").unwrap();
        std::fs::write(sm.join("msg.c"), "STATE_BETA handler\n").unwrap();
        let other = dir.path().join("src/util");
        std::fs::create_dir_all(&other).unwrap();
        std::fs::write(other.join("a.c"), "int a;\n").unwrap();
        std::fs::write(other.join("b.c"), "int b;\n").unwrap();

        let keywords = KeywordSet::new(
            "toy",
            vec![Keyword::new("STATE_", KeywordOrigin::Expert).unwrap()],
        )
        .unwrap();
        let segmenter = Segmenter::new(SegmenterConfig::default()).unwrap();
        let backend = EmbeddingBackendSpec::local_default();
        let outcome = build_index(
            dir.path(),
            &keywords,
            &FilterConfig::default(),
            &segmenter,
            &backend,
        )
        .unwrap();

        assert_eq!(outcome.selection.chosen_dir, "src/sm");
        assert_eq!(outcome.index.entries().len(), 2);
        assert!(outcome
            .index
            .entries()
            .iter()
            .all(|e| e.chunk.doc_path.starts_with("src/sm/")));
    }

    #[test]
    fn rebuild_of_unchanged_repo_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.c"), "STATE_ONE\n").unwrap();
        std::fs::write(dir.path().join("b.c"), "STATE_TWO\n").unwrap();
        let keywords = KeywordSet::new(
            "toy",
            vec![Keyword::new("STATE_", KeywordOrigin::Expert).unwrap()],
        )
        .unwrap();
        let segmenter = Segmenter::new(SegmenterConfig::default()).unwrap();
        let backend = EmbeddingBackendSpec::local_default();
        let build = || {
            build_index(
                dir.path(),
                &keywords,
                &FilterConfig::default(),
                &segmenter,
                &backend,
            )
            .unwrap()
        };
        let first = build();
        let second = build();
        assert_eq!(first.index, second.index);
        assert_eq!(first.repo_snapshot_id, second.repo_snapshot_id);
    }
}
