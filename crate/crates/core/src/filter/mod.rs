//! Locates the state-machine module inside a protocol implementation.
//!
//! Every source document is matched against a protocol keyword set; the
//! directory whose subtree has the highest fraction of matching source
//! documents is selected as the state-machine module.

mod keywords;

pub use keywords::{builtin_keywords, Keyword, KeywordOrigin, KeywordSet, BUILTIN_PROTOCOLS};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("no built-in keyword set for protocol {0:?} and no keyword file given")]
    UnknownProtocol(String),
    #[error("keyword set for {0:?} has no patterns")]
    EmptyKeywordSet(String),
    #[error("invalid keyword pattern {pattern:?}: {source}")]
    BadPattern {
        pattern: String,
        source: regex::Error,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("repository contains no source files")]
    EmptyRepo,
    #[error("no document matched the keyword set; cannot select a module")]
    NoModuleFound,
}

/// Scan configuration.
#[derive(Debug, Clone)]
pub struct FilterConfig {
    /// Extensions (with leading dot) that count as source documents.
    pub source_extensions: Vec<String>,
    /// Minimum source files a directory subtree needs to be a module
    /// candidate. Two by default so a lone matched file cannot crown a
    /// trivial directory.
    pub min_docs: usize,
    /// Rank candidate directories by keyword hits per source document
    /// instead of the matched-document fraction. Off by default.
    pub rank_by_hits: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            source_extensions: [".c", ".h", ".cc", ".cpp", ".hpp", ".py", ".go", ".rs", ".java"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            min_docs: 2,
            rank_by_hits: false,
        }
    }
}

/// Match result for one repository document.
#[derive(Debug, Clone, Serialize)]
pub struct DocumentMatch {
    /// Repo-relative path, `/`-separated.
    pub path: String,
    pub is_source: bool,
    pub matched: bool,
    /// (pattern, match count) for every keyword with at least one hit.
    pub hits: Vec<(String, usize)>,
}

/// One row of the per-directory match-rate table.
#[derive(Debug, Clone, Serialize)]
pub struct DirStats {
    /// Repo-relative directory; `.` is the repository root.
    pub dir: String,
    pub matched_docs: usize,
    pub total_docs: usize,
    pub keyword_hits: usize,
    /// matched_docs / total_docs over the subtree.
    pub rate: f64,
}

/// The selected module and the table it was chosen from.
#[derive(Debug, Clone, Serialize)]
pub struct ModuleSelection {
    pub chosen_dir: String,
    pub match_rate: f64,
    pub table: Vec<DirStats>,
}

/// Scan every file under `repo_root` against the keyword set.
///
/// Files whose extension is outside the configured source list are reported
/// with `is_source: false` and excluded from match rates, as are binary
/// files (NUL byte within the first 8 KiB), which are skipped with a
/// warning. Results are sorted by path, so the scan is deterministic
/// regardless of directory iteration order.
pub fn scan(
    repo_root: &Path,
    keyword_set: &KeywordSet,
    config: &FilterConfig,
) -> Result<Vec<DocumentMatch>, FilterError> {
    if !repo_root.is_dir() {
        return Err(FilterError::Io {
            path: repo_root.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }

    let mut matches = Vec::new();
    for entry in walkdir::WalkDir::new(repo_root).follow_links(false) {
        let entry = entry.map_err(|e| FilterError::Io {
            path: repo_root.display().to_string(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(repo_root)
            .expect("walkdir yields descendants of the root");
        let rel = rel_path_string(rel);

        if !has_source_extension(&rel, &config.source_extensions) {
            matches.push(DocumentMatch {
                path: rel,
                is_source: false,
                matched: false,
                hits: Vec::new(),
            });
            continue;
        }

        let bytes = fs::read(entry.path()).map_err(|source| FilterError::Io {
            path: entry.path().display().to_string(),
            source,
        })?;
        if bytes[..bytes.len().min(8192)].contains(&0) {
            log::warn!("skipping binary file {rel}");
            matches.push(DocumentMatch {
                path: rel,
                is_source: false,
                matched: false,
                hits: Vec::new(),
            });
            continue;
        }

        let text = String::from_utf8_lossy(&bytes);
        let mut hits = Vec::new();
        for keyword in &keyword_set.keywords {
            let count = keyword.count_matches(&text);
            if count > 0 {
                hits.push((keyword.pattern.clone(), count));
            }
        }
        matches.push(DocumentMatch {
            path: rel,
            is_source: true,
            matched: !hits.is_empty(),
            hits,
        });
    }

    matches.sort_by(|a, b| a.path.cmp(&b.path));
    if !matches.iter().any(|m| m.is_source) {
        return Err(FilterError::EmptyRepo);
    }
    Ok(matches)
}

/// Pick the directory whose subtree has the highest match rate.
///
/// Every directory (at any depth, including the root `.`) whose subtree
/// holds at least `min_docs` source documents is a candidate. Ties break by
/// more matched documents, then shorter path depth, then lexicographic
/// path.
pub fn select_module(
    matches: &[DocumentMatch],
    config: &FilterConfig,
) -> Result<ModuleSelection, FilterError> {
    if !matches.iter().any(|m| m.is_source && m.matched) {
        return Err(FilterError::NoModuleFound);
    }

    #[derive(Default)]
    struct Tally {
        matched: usize,
        total: usize,
        hits: usize,
    }

    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    for doc in matches.iter().filter(|m| m.is_source) {
        let hit_count: usize = doc.hits.iter().map(|(_, n)| n).sum();
        for dir in ancestor_dirs(&doc.path) {
            let tally = tallies.entry(dir).or_default();
            tally.total += 1;
            tally.hits += hit_count;
            if doc.matched {
                tally.matched += 1;
            }
        }
    }

    let mut table: Vec<DirStats> = tallies
        .into_iter()
        .filter(|(_, t)| t.total >= config.min_docs)
        .map(|(dir, t)| DirStats {
            dir,
            matched_docs: t.matched,
            total_docs: t.total,
            keyword_hits: t.hits,
            rate: t.matched as f64 / t.total as f64,
        })
        .collect();
    if table.is_empty() {
        return Err(FilterError::NoModuleFound);
    }

    let score = |row: &DirStats| -> f64 {
        if config.rank_by_hits {
            row.keyword_hits as f64 / row.total_docs as f64
        } else {
            row.rate
        }
    };
    table.sort_by(|a, b| {
        score(b)
            .partial_cmp(&score(a))
            .expect("rates are finite")
            .then(b.matched_docs.cmp(&a.matched_docs))
            .then(path_depth(&a.dir).cmp(&path_depth(&b.dir)))
            .then(a.dir.cmp(&b.dir))
    });

    let winner = &table[0];
    if winner.matched_docs == 0 {
        return Err(FilterError::NoModuleFound);
    }
    Ok(ModuleSelection {
        chosen_dir: winner.dir.clone(),
        match_rate: winner.rate,
        table,
    })
}

/// Scan and select in one step.
pub fn locate_module(
    repo_root: &Path,
    keyword_set: &KeywordSet,
    config: &FilterConfig,
) -> Result<(Vec<DocumentMatch>, ModuleSelection), FilterError> {
    let matches = scan(repo_root, keyword_set, config)?;
    let selection = select_module(&matches, config)?;
    Ok((matches, selection))
}

fn rel_path_string(path: &Path) -> String {
    let parts: Vec<String> = path
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    parts.join("/")
}

fn has_source_extension(path: &str, extensions: &[String]) -> bool {
    let name = path.rsplit('/').next().unwrap_or(path);
    match name.rfind('.') {
        Some(idx) if idx > 0 => extensions.iter().any(|ext| ext == &name[idx..]),
        _ => false,
    }
}

fn path_depth(dir: &str) -> usize {
    if dir == "." {
        0
    } else {
        dir.split('/').count()
    }
}

/// `.` plus every proper ancestor directory of a repo-relative file path.
fn ancestor_dirs(path: &str) -> Vec<String> {
    let mut dirs = vec![".".to_string()];
    let segments: Vec<&str> = path.split('/').collect();
    for i in 1..segments.len() {
        dirs.push(segments[..i].join("/"));
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_repo(files: &[(&str, &str)]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for (path, content) in files {
            let full = dir.path().join(path);
            fs::create_dir_all(full.parent().unwrap()).unwrap();
            fs::write(full, content).unwrap();
        }
        dir
    }

    fn toy_keywords() -> KeywordSet {
        KeywordSet::new(
            "toy",
            vec![Keyword::new("STATE_IKE", KeywordOrigin::RfcDerived).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn literal_keyword_hit_marks_document() {
        let repo = write_repo(&[
            ("src/sm/fsm.c", "int x = STATE_IKE_SA_ESTABLISHED;"),
            ("src/sm/util.c", "/* nothing here */"),
        ]);
        let matches = scan(repo.path(), &toy_keywords(), &FilterConfig::default()).unwrap();
        let fsm = matches.iter().find(|m| m.path.ends_with("fsm.c")).unwrap();
        assert!(fsm.matched);
        assert_eq!(fsm.hits[0].1, 1);
        let util = matches.iter().find(|m| m.path.ends_with("util.c")).unwrap();
        assert!(!util.matched);
    }

    #[test]
    fn non_source_and_binary_files_are_excluded_from_rates() {
        let repo = write_repo(&[
            ("README.md", "STATE_IKE everywhere"),
            ("src/a.c", "STATE_IKE"),
            ("src/b.c", "STATE_IKE"),
        ]);
        fs::write(repo.path().join("src/blob.c"), b"\x00\x01STATE_IKE").unwrap();
        let matches = scan(repo.path(), &toy_keywords(), &FilterConfig::default()).unwrap();
        let readme = matches.iter().find(|m| m.path == "README.md").unwrap();
        assert!(!readme.is_source);
        let blob = matches.iter().find(|m| m.path == "src/blob.c").unwrap();
        assert!(!blob.is_source);
        let selection = select_module(&matches, &FilterConfig::default()).unwrap();
        let src = selection.table.iter().find(|r| r.dir == "src").unwrap();
        assert_eq!(src.total_docs, 2);
    }

    #[test]
    fn empty_repo_is_an_error() {
        let repo = write_repo(&[("notes.txt", "no source here")]);
        assert!(matches!(
            scan(repo.path(), &toy_keywords(), &FilterConfig::default()),
            Err(FilterError::EmptyRepo)
        ));
    }

    #[test]
    fn highest_rate_directory_wins() {
        let repo = write_repo(&[
            ("src/sm/a.c", "STATE_IKE"),
            ("src/sm/b.c", "STATE_IKE"),
            ("src/sm/c.c", "STATE_IKE"),
            ("src/sm/d.c", "STATE_IKE"),
            ("src/sm/e.c", "STATE_IKE"),
            ("src/sm/f.c", "int y;"),
            ("src/crypto/g.c", "int z;"),
            ("src/crypto/h.c", "int z;"),
            ("src/crypto/i.c", "int z;"),
            ("src/crypto/j.c", "int z;"),
        ]);
        let (_, selection) =
            locate_module(repo.path(), &toy_keywords(), &FilterConfig::default()).unwrap();
        assert_eq!(selection.chosen_dir, "src/sm");
        assert!((selection.match_rate - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ties_break_by_depth_then_lexicographic() {
        // Both leaf dirs are 2/2; they lose to nothing deeper, and the
        // shallower candidate "." has rate 4/4 too... so make root diluted.
        let repo = write_repo(&[
            ("x/a.c", "STATE_IKE"),
            ("x/b.c", "STATE_IKE"),
            ("y/c.c", "STATE_IKE"),
            ("y/d.c", "STATE_IKE"),
            ("plain.c", "int x;"),
            ("plain2.c", "int x;"),
        ]);
        let (_, selection) =
            locate_module(repo.path(), &toy_keywords(), &FilterConfig::default()).unwrap();
        // x and y tie at 2/2 with equal depth; lexicographic picks x.
        assert_eq!(selection.chosen_dir, "x");
    }

    #[test]
    fn all_unmatched_is_no_module() {
        let repo = write_repo(&[("src/a.c", "int x;"), ("src/b.c", "int y;")]);
        let matches = scan(repo.path(), &toy_keywords(), &FilterConfig::default()).unwrap();
        assert!(matches!(
            select_module(&matches, &FilterConfig::default()),
            Err(FilterError::NoModuleFound)
        ));
    }

    #[test]
    fn hit_ranking_prefers_dense_keyword_use() {
        let repo = write_repo(&[
            ("dense/a.c", "STATE_IKE STATE_IKE STATE_IKE STATE_IKE STATE_IKE STATE_IKE"),
            ("dense/b.c", "int x;"),
            ("wide/c.c", "STATE_IKE"),
            ("wide/d.c", "STATE_IKE"),
        ]);
        let by_rate =
            locate_module(repo.path(), &toy_keywords(), &FilterConfig::default()).unwrap();
        assert_eq!(by_rate.1.chosen_dir, "wide");
        let config = FilterConfig {
            rank_by_hits: true,
            ..FilterConfig::default()
        };
        let by_hits = locate_module(repo.path(), &toy_keywords(), &config).unwrap();
        assert_eq!(by_hits.1.chosen_dir, "dense");
    }

    #[test]
    fn min_docs_excludes_small_directories() {
        let repo = write_repo(&[
            ("tiny/only.c", "STATE_IKE"),
            ("big/a.c", "STATE_IKE"),
            ("big/b.c", "int x;"),
            ("big/c.c", "int x;"),
        ]);
        let (_, selection) =
            locate_module(repo.path(), &toy_keywords(), &FilterConfig::default()).unwrap();
        // tiny has rate 1.0 but only one doc; min_docs=2 rules it out.
        // Root "." has 2 matched of 4 (rate 0.5); big has 1/3.
        assert_eq!(selection.chosen_dir, ".");
    }
}
