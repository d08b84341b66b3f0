//! Language-specific separator tables.
//!
//! A table is an ordered list of split rules, highest structural level
//! first: type-definition openers, then function-definition heuristics,
//! then blank lines, then newlines. A terminal any-character rule is always
//! appended so splitting can never get stuck, whatever the input looks
//! like.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use super::SegmentError;

/// Which side of a pattern match the cut lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Cut before the match; the matched token opens the next piece
    /// (type and function openers).
    Before,
    /// Cut after the match; the matched text closes the current piece
    /// (blank lines, newlines).
    After,
}

/// One compiled split rule.
#[derive(Debug, Clone)]
pub struct SeparatorRule {
    pub pattern: String,
    pub boundary: Boundary,
    pub(super) regex: Regex,
}

impl SeparatorRule {
    pub fn new(pattern: &str, boundary: Boundary) -> Result<Self, SegmentError> {
        let regex = Regex::new(pattern)
            .map_err(|e| SegmentError::Config(format!("bad separator pattern {pattern:?}: {e}")))?;
        Ok(Self {
            pattern: pattern.to_string(),
            boundary,
            regex,
        })
    }
}

/// Ordered separator rules for one language. The terminal any-character
/// split is implicit and always applies after the listed rules.
#[derive(Debug, Clone)]
pub struct SeparatorTable {
    pub language: String,
    pub rules: Vec<SeparatorRule>,
}

const BLANK_LINE: &str = "\n[ \t]*\n";
const NEWLINE: &str = "\n";

// Heuristic function opener: identifier(...) at line start with the body
// brace on the same or the following line. Not a parser; a missed match
// just defers to the blank-line rule.
const C_FUNCTION: &str = r"(?m)^[A-Za-z_][A-Za-z0-9_ \t\*]*\([^;{}()]*\)[ \t]*(?:\r?\n)?[ \t]*\{";

impl SeparatorTable {
    /// Built-in table for `language` (`c`, `cpp`, `python`, `go`), or the
    /// generic text fallback for anything else.
    pub fn builtin(language: &str) -> Result<Self, SegmentError> {
        let rules: Vec<(&str, Boundary)> = match language.to_ascii_lowercase().as_str() {
            "c" | "h" => vec![
                (r"(?m)^[ \t]*(?:typedef\b|struct\b|enum\b|union\b)", Boundary::Before),
                (C_FUNCTION, Boundary::Before),
                (BLANK_LINE, Boundary::After),
                (NEWLINE, Boundary::After),
            ],
            "cpp" | "cxx" | "cc" | "c++" | "hpp" => vec![
                (
                    r"(?m)^[ \t]*(?:typedef\b|struct\b|enum\b|union\b|class\b|namespace\b|template\b)",
                    Boundary::Before,
                ),
                (C_FUNCTION, Boundary::Before),
                (BLANK_LINE, Boundary::After),
                (NEWLINE, Boundary::After),
            ],
            "python" | "py" => vec![
                (r"(?m)^(?:class|def|async[ \t]+def)\b", Boundary::Before),
                (r"(?m)^[ \t]+(?:class|def|async[ \t]+def)\b", Boundary::Before),
                (BLANK_LINE, Boundary::After),
                (NEWLINE, Boundary::After),
            ],
            "go" => vec![
                (r"(?m)^(?:func|type)\b", Boundary::Before),
                (BLANK_LINE, Boundary::After),
                (NEWLINE, Boundary::After),
            ],
            _ => vec![(BLANK_LINE, Boundary::After), (NEWLINE, Boundary::After)],
        };
        let rules = rules
            .into_iter()
            .map(|(pattern, boundary)| SeparatorRule::new(pattern, boundary))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            language: language.to_string(),
            rules,
        })
    }

    /// Load custom tables from a JSON file mapping language keys to ordered
    /// rule lists:
    ///
    /// ```json
    /// {"c": [{"pattern": "(?m)^struct\\b", "boundary": "before"}]}
    /// ```
    pub fn load_tables(path: &Path) -> Result<BTreeMap<String, SeparatorTable>, SegmentError> {
        #[derive(Deserialize)]
        struct RuleSpec {
            pattern: String,
            boundary: Boundary,
        }

        let content = fs::read_to_string(path)
            .map_err(|e| SegmentError::Config(format!("cannot read {}: {e}", path.display())))?;
        let raw: BTreeMap<String, Vec<RuleSpec>> = serde_json::from_str(&content)
            .map_err(|e| SegmentError::Config(format!("bad separator file: {e}")))?;
        let mut tables = BTreeMap::new();
        for (language, specs) in raw {
            let rules = specs
                .iter()
                .map(|s| SeparatorRule::new(&s.pattern, s.boundary))
                .collect::<Result<Vec<_>, _>>()?;
            tables.insert(
                language.clone(),
                SeparatorTable { language, rules },
            );
        }
        Ok(tables)
    }
}
