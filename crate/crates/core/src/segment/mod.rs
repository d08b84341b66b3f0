//! Syntax-aware recursive code segmentation.
//!
//! A document is split in three phases. Phase 1 recursively cuts it at the
//! highest-precedence separator available until every piece is at most
//! `max_chunk_size` characters, with a balanced fixed-width split as the
//! terminal rule. Phase 2 merges pieces below `min_chunk_size` into a
//! neighbor. Phase 3 emits the final chunks, prefixing each one with the
//! trailing `overlap` characters of its predecessor so retrieval keeps
//! context across cut points.
//!
//! Chunk core regions tile the document exactly, so segmentation is
//! lossless: [`reconstruct`] rebuilds the input byte for byte.

mod separators;

pub use separators::{Boundary, SeparatorRule, SeparatorTable};

use serde::Serialize;
use thiserror::Error;

use crate::util::sha256_hex;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("invalid segmenter config: {0}")]
    Config(String),
    #[error("chunk list is not a contiguous document cover: {0}")]
    Integrity(String),
}

/// Sizes are measured in characters. At the documented 4:1
/// characters-per-token estimate the defaults come to roughly 1000 tokens
/// per chunk with a 50-token overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SegmenterConfig {
    pub max_chunk_size: usize,
    pub min_chunk_size: usize,
    pub overlap: usize,
    /// Separator table key; unknown keys use the generic text table.
    pub language: String,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            max_chunk_size: 4000,
            min_chunk_size: 400,
            overlap: 200,
            language: "c".to_string(),
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<(), SegmentError> {
        if self.max_chunk_size == 0 {
            return Err(SegmentError::Config("max_chunk_size must be > 0".into()));
        }
        if self.min_chunk_size >= self.max_chunk_size {
            return Err(SegmentError::Config(
                "min_chunk_size must be < max_chunk_size".into(),
            ));
        }
        if self.overlap >= self.max_chunk_size {
            return Err(SegmentError::Config("overlap must be < max_chunk_size".into()));
        }
        Ok(())
    }

    /// Stable digest used to fingerprint indexes built with this config.
    pub fn digest(&self) -> String {
        sha256_hex(
            format!(
                "{}|{}|{}|{}",
                self.max_chunk_size, self.min_chunk_size, self.overlap, self.language
            )
            .as_bytes(),
        )
    }
}

/// One emitted chunk of a document.
///
/// `byte_start..byte_end` is the core (non-overlap) region in the source
/// document; `text` is what gets embedded and may carry `overlap_len`
/// leading characters repeated from the previous chunk's core.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chunk {
    pub doc_path: String,
    pub ordinal: usize,
    pub byte_start: usize,
    pub byte_end: usize,
    pub text: String,
    /// Leading characters of `text` repeated from the previous chunk.
    pub overlap_len: usize,
}

impl Chunk {
    /// The chunk text without the leading overlap.
    pub fn core_text(&self) -> &str {
        let skip = char_prefix_bytes(&self.text, self.overlap_len);
        &self.text[skip..]
    }
}

fn char_prefix_bytes(text: &str, chars: usize) -> usize {
    if chars == 0 {
        return 0;
    }
    text.char_indices()
        .nth(chars)
        .map(|(idx, _)| idx)
        .unwrap_or(text.len())
}

pub struct Segmenter {
    config: SegmenterConfig,
    table: SeparatorTable,
}

impl Segmenter {
    /// Build a segmenter with the built-in separator table for
    /// `config.language`.
    pub fn new(config: SegmenterConfig) -> Result<Self, SegmentError> {
        config.validate()?;
        let table = SeparatorTable::builtin(&config.language)?;
        Ok(Self { config, table })
    }

    /// Build a segmenter with a custom separator table.
    pub fn with_table(config: SegmenterConfig, table: SeparatorTable) -> Result<Self, SegmentError> {
        config.validate()?;
        Ok(Self { config, table })
    }

    pub fn config(&self) -> &SegmenterConfig {
        &self.config
    }

    /// Segment `document` into chunks. Empty input yields an empty list.
    pub fn segment(&self, doc_path: &str, document: &str) -> Vec<Chunk> {
        if document.is_empty() {
            return Vec::new();
        }

        // Byte offset of every char plus the end sentinel.
        let mut char_bytes: Vec<usize> = document.char_indices().map(|(b, _)| b).collect();
        char_bytes.push(document.len());
        let char_count = char_bytes.len() - 1;

        let mut pieces = Vec::new();
        self.split_range(document, &char_bytes, 0, char_count, 0, &mut pieces);
        let pieces = self.merge(pieces);

        let mut chunks = Vec::with_capacity(pieces.len());
        for (ordinal, &(start, end)) in pieces.iter().enumerate() {
            let core = &document[char_bytes[start]..char_bytes[end]];
            let (overlap_len, text) = if ordinal == 0 {
                (0, core.to_string())
            } else {
                let (prev_start, prev_end) = pieces[ordinal - 1];
                let prev_len = prev_end - prev_start;
                let overlap_len = self.config.overlap.min(prev_len);
                let overlap_from = char_bytes[prev_end - overlap_len];
                let mut text =
                    String::with_capacity(core.len() + char_bytes[prev_end] - overlap_from);
                text.push_str(&document[overlap_from..char_bytes[prev_end]]);
                text.push_str(core);
                (overlap_len, text)
            };
            chunks.push(Chunk {
                doc_path: doc_path.to_string(),
                ordinal,
                byte_start: char_bytes[start],
                byte_end: char_bytes[end],
                text,
                overlap_len,
            });
        }
        chunks
    }

    /// Phase 1: recursive separator descent over char ranges.
    fn split_range(
        &self,
        document: &str,
        char_bytes: &[usize],
        start: usize,
        end: usize,
        rule_idx: usize,
        out: &mut Vec<(usize, usize)>,
    ) {
        if end - start <= self.config.max_chunk_size {
            out.push((start, end));
            return;
        }
        if rule_idx >= self.table.rules.len() {
            balanced_windows(start, end, self.config.max_chunk_size, out);
            return;
        }

        let rule = &self.table.rules[rule_idx];
        let slice = &document[char_bytes[start]..char_bytes[end]];
        let mut cuts: Vec<usize> = Vec::new();
        for found in rule.regex.find_iter(slice) {
            let byte_in_slice = match rule.boundary {
                Boundary::Before => found.start(),
                Boundary::After => found.end(),
            };
            let absolute = char_bytes[start] + byte_in_slice;
            // Byte offsets from the regex always land on char boundaries.
            let char_pos = char_bytes[start..=end]
                .binary_search(&absolute)
                .expect("match offset on char boundary")
                + start;
            if char_pos > start && char_pos < end {
                cuts.push(char_pos);
            }
        }
        cuts.dedup();

        if cuts.is_empty() {
            self.split_range(document, char_bytes, start, end, rule_idx + 1, out);
            return;
        }

        let mut piece_start = start;
        for cut in cuts.into_iter().chain(std::iter::once(end)) {
            self.split_range(document, char_bytes, piece_start, cut, rule_idx + 1, out);
            piece_start = cut;
        }
    }

    /// Phase 2: merge pieces below the minimum size.
    ///
    /// A small piece absorbs following neighbors while the result stays
    /// within `max_chunk_size`; a small trailing piece merges backward
    /// instead so license footers stay attached to code. When neither
    /// neighbor fits, the pair is rebalanced into equal fixed-width windows
    /// so both size bounds survive (guaranteed for
    /// `min_chunk_size <= max_chunk_size / 2`).
    fn merge(&self, pieces: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
        let min = self.config.min_chunk_size;
        let max = self.config.max_chunk_size;
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(pieces.len());
        let mut iter = pieces.into_iter().peekable();

        while let Some((start, mut end)) = iter.next() {
            while end - start < min {
                match iter.peek().copied() {
                    Some((_, next_end)) if next_end - start <= max => {
                        iter.next();
                        end = next_end;
                    }
                    Some((_, next_end)) => {
                        // Forward merge would overflow; prefer extending the
                        // previous chunk, else rebalance with the next piece.
                        match out.last().copied() {
                            Some((prev_start, _)) if end - prev_start <= max => {
                                let (prev_start, _) = out.pop().expect("checked non-empty");
                                balanced_windows(prev_start, end, max, &mut out);
                            }
                            _ => {
                                iter.next();
                                balanced_windows(start, next_end, max, &mut out);
                            }
                        }
                        end = start; // consumed; emit nothing below
                        break;
                    }
                    None => {
                        match out.last().copied() {
                            Some((prev_start, _)) if end - prev_start <= max => {
                                let (prev_start, _) = out.pop().expect("checked non-empty");
                                out.push((prev_start, end));
                            }
                            Some((prev_start, _)) => {
                                out.pop();
                                balanced_windows(prev_start, end, max, &mut out);
                            }
                            // Whole document smaller than the minimum.
                            None => out.push((start, end)),
                        }
                        end = start;
                        break;
                    }
                }
            }
            if end > start {
                out.push((start, end));
            }
        }
        out
    }
}

/// Split `[start, end)` into ceil(len/max) windows whose sizes differ by at
/// most one character, so the terminal split never strands a tiny
/// remainder.
fn balanced_windows(start: usize, end: usize, max: usize, out: &mut Vec<(usize, usize)>) {
    let len = end - start;
    let windows = len.div_ceil(max).max(1);
    let base = len / windows;
    let remainder = len % windows;
    let mut cursor = start;
    for i in 0..windows {
        let size = base + usize::from(i < remainder);
        out.push((cursor, cursor + size));
        cursor += size;
    }
    debug_assert_eq!(cursor, end);
}

/// Rebuild the original document from its chunks (in ordinal order).
///
/// Fails with [`SegmentError::Integrity`] when the chunks do not form a
/// contiguous cover starting at byte 0.
pub fn reconstruct(chunks: &[Chunk]) -> Result<String, SegmentError> {
    let mut document = String::new();
    let mut expected_byte = 0;
    for (index, chunk) in chunks.iter().enumerate() {
        if chunk.ordinal != index {
            return Err(SegmentError::Integrity(format!(
                "expected ordinal {index}, found {}",
                chunk.ordinal
            )));
        }
        if index > 0 && chunk.doc_path != chunks[0].doc_path {
            return Err(SegmentError::Integrity(format!(
                "mixed documents: {} and {}",
                chunks[0].doc_path, chunk.doc_path
            )));
        }
        if chunk.byte_start != expected_byte {
            return Err(SegmentError::Integrity(format!(
                "chunk {index} starts at byte {}, expected {expected_byte}",
                chunk.byte_start
            )));
        }
        let core = chunk.core_text();
        if chunk.byte_start + core.len() != chunk.byte_end {
            return Err(SegmentError::Integrity(format!(
                "chunk {index} core length {} disagrees with byte range {}..{}",
                core.len(),
                chunk.byte_start,
                chunk.byte_end
            )));
        }
        document.push_str(core);
        expected_byte = chunk.byte_end;
    }
    Ok(document)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(max: usize, min: usize, overlap: usize) -> SegmenterConfig {
        SegmenterConfig {
            max_chunk_size: max,
            min_chunk_size: min,
            overlap,
            language: "c".to_string(),
        }
    }

    fn core_len(chunk: &Chunk) -> usize {
        chunk.core_text().chars().count()
    }

    #[test]
    fn small_file_is_one_chunk() {
        let segmenter = Segmenter::new(config(4000, 400, 200)).unwrap();
        let doc = "x".repeat(100);
        let chunks = segmenter.segment("a.c", &doc);
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].text, doc);
        assert_eq!(chunks[0].overlap_len, 0);
    }

    #[test]
    fn empty_document_yields_no_chunks() {
        let segmenter = Segmenter::new(config(4000, 400, 200)).unwrap();
        assert!(segmenter.segment("a.c", "").is_empty());
    }

    #[test]
    fn two_function_file_splits_at_second_definition() {
        // Two ~3000-char functions; max 4000 forces a split, and the cut
        // must land exactly where a separator matches.
        let body = format!("  int buffer[4] = {{0}};\n{}  return 0;\n", "  buffer[0] += 1;\n".repeat(160));
        let f1 = format!("int first_handler(int input)\n{{\n{body}}}\n");
        let f2 = format!("int second_handler(int input)\n{{\n{body}}}\n");
        let doc = format!("{f1}{f2}");
        assert!(f1.len() > 2500 && f1.len() < 4000, "f1 is {} chars", f1.len());

        let segmenter = Segmenter::new(config(4000, 500, 0)).unwrap();
        let chunks = segmenter.segment("two.c", &doc);
        assert_eq!(chunks.len(), 2);
        for chunk in &chunks {
            assert!(core_len(chunk) <= 4000);
        }
        assert!(chunks[1].text.starts_with("int second_handler"));
        assert_eq!(reconstruct(&chunks).unwrap(), doc);
    }

    #[test]
    fn trailing_fragment_merges_backward() {
        // Two ~1000-char paragraphs, then a 100-char trailer. The trailer
        // is under min and must be absorbed into the preceding chunk.
        let paragraph = format!("{}\n\n", "word ".repeat(200));
        let trailer = "y".repeat(100);
        let doc = format!("{paragraph}{paragraph}{trailer}");
        let with_merge = Segmenter::new(config(1200, 500, 0)).unwrap();
        let chunks = with_merge.segment("t.c", &doc);
        let no_merge = Segmenter::new(config(1200, 0, 0)).unwrap();
        let unmerged = no_merge.segment("t.c", &doc);
        assert_eq!(chunks.len() + 1, unmerged.len());
        assert_eq!(reconstruct(&chunks).unwrap(), doc);
        assert!(chunks.last().unwrap().text.ends_with(&trailer));
    }

    #[test]
    fn overlap_repeats_previous_core_suffix() {
        let doc = "abcdefghij".repeat(100); // 1000 chars, no separators
        let segmenter = Segmenter::with_table(
            config(400, 100, 50),
            SeparatorTable::builtin("text").unwrap(),
        )
        .unwrap();
        let chunks = segmenter.segment("o.txt", &doc);
        assert!(chunks.len() > 1);
        for window in chunks.windows(2) {
            let prev_core: String = window[0].core_text().chars().collect();
            let overlap: String = window[1]
                .text
                .chars()
                .take(window[1].overlap_len)
                .collect();
            let suffix: String = prev_core
                .chars()
                .skip(prev_core.chars().count() - window[1].overlap_len)
                .collect();
            assert_eq!(overlap, suffix);
        }
        assert_eq!(reconstruct(&chunks).unwrap(), doc);
    }

    #[test]
    fn hard_split_produces_balanced_windows() {
        let doc = "z".repeat(4001);
        let segmenter = Segmenter::new(config(4000, 400, 0)).unwrap();
        let chunks = segmenter.segment("big.c", &doc);
        assert_eq!(chunks.len(), 2);
        assert_eq!(core_len(&chunks[0]), 2001);
        assert_eq!(core_len(&chunks[1]), 2000);
    }

    #[test]
    fn multibyte_text_segments_losslessly() {
        let doc = "état → ÉTABLI\n\n".repeat(120);
        let segmenter = Segmenter::new(config(300, 50, 20)).unwrap();
        let chunks = segmenter.segment("é.c", &doc);
        assert!(chunks.len() > 1);
        for chunk in &chunks {
            assert!(core_len(chunk) <= 300);
        }
        assert_eq!(reconstruct(&chunks).unwrap(), doc);
    }

    #[test]
    fn reconstruct_of_nothing_is_empty() {
        assert_eq!(reconstruct(&[]).unwrap(), "");
    }

    #[test]
    fn reconstruct_detects_missing_chunk() {
        let segmenter = Segmenter::new(config(300, 50, 0)).unwrap();
        let doc = "line one\n\nline two\n\n".repeat(60);
        let mut chunks = segmenter.segment("gap.c", &doc);
        assert!(chunks.len() > 2);
        chunks.remove(1);
        assert!(matches!(
            reconstruct(&chunks),
            Err(SegmentError::Integrity(_))
        ));
    }

    #[test]
    fn invalid_config_is_rejected() {
        assert!(Segmenter::new(config(100, 100, 0)).is_err());
        assert!(Segmenter::new(config(100, 10, 100)).is_err());
        assert!(Segmenter::new(config(0, 0, 0)).is_err());
    }

    #[test]
    fn determinism_same_input_same_chunks() {
        let doc = "struct a {int x;};\n\nint f(void)\n{\nreturn 1;\n}\n".repeat(50);
        let segmenter = Segmenter::new(config(500, 100, 50)).unwrap();
        assert_eq!(segmenter.segment("d.c", &doc), segmenter.segment("d.c", &doc));
    }
}
