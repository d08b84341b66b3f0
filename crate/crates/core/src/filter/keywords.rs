//! Built-in protocol keyword sets and the keyword file format.
//!
//! Keyword files are plain text, one pattern per line; `#` starts a comment
//! and blank lines are ignored. Patterns are case-insensitive regular
//! expressions (plain words work unchanged).

use std::fs;
use std::path::Path;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use super::FilterError;

/// Where a keyword came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeywordOrigin {
    /// Message or state names lifted from the protocol's RFC.
    RfcDerived,
    /// Terms added from implementation experience.
    Expert,
}

/// One compiled, case-insensitive pattern.
#[derive(Debug, Clone)]
pub struct Keyword {
    pub pattern: String,
    pub origin: KeywordOrigin,
    regex: Regex,
}

impl Keyword {
    pub fn new(pattern: &str, origin: KeywordOrigin) -> Result<Self, FilterError> {
        let regex = RegexBuilder::new(pattern)
            .case_insensitive(true)
            .build()
            .map_err(|source| FilterError::BadPattern {
                pattern: pattern.to_string(),
                source,
            })?;
        Ok(Self {
            pattern: pattern.to_string(),
            origin,
            regex,
        })
    }

    /// Number of matches in `text`.
    pub fn count_matches(&self, text: &str) -> usize {
        self.regex.find_iter(text).count()
    }
}

/// The keyword set used to mark state-machine-related documents.
#[derive(Debug, Clone)]
pub struct KeywordSet {
    pub protocol: String,
    pub keywords: Vec<Keyword>,
}

impl KeywordSet {
    pub fn new(protocol: &str, keywords: Vec<Keyword>) -> Result<Self, FilterError> {
        if keywords.is_empty() {
            return Err(FilterError::EmptyKeywordSet(protocol.to_string()));
        }
        Ok(Self {
            protocol: protocol.to_string(),
            keywords,
        })
    }

    /// Load a custom keyword file (one pattern per line, `#` comments).
    /// Every pattern is tagged [`KeywordOrigin::Expert`].
    pub fn from_file(protocol: &str, path: &Path) -> Result<Self, FilterError> {
        let content = fs::read_to_string(path).map_err(|source| FilterError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut keywords = Vec::new();
        for line in content.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            keywords.push(Keyword::new(line, KeywordOrigin::Expert)?);
        }
        Self::new(protocol, keywords)
    }
}

/// Protocols with a shipped keyword set.
pub const BUILTIN_PROTOCOLS: &[&str] = &["ikev2", "tls", "bgp", "rtsp", "l2tp"];

/// Return the shipped keyword set for `protocol` (one of
/// [`BUILTIN_PROTOCOLS`], case-insensitive). Other protocols need a keyword
/// file.
pub fn builtin_keywords(protocol: &str) -> Result<KeywordSet, FilterError> {
    let (rfc, expert): (&[&str], &[&str]) = match protocol.to_ascii_lowercase().as_str() {
        "ikev2" => (
            &[
                "IKE_SA_INIT",
                "IKE_AUTH",
                "CREATE_CHILD_SA",
                "INFORMATIONAL",
                "IKE_SA",
                "CHILD_SA",
                "ESTABLISHED",
                "REKEY",
            ],
            // The SA state effectively is the peer state, so bare "SA"
            // earns its place despite being short.
            &["\\bSA\\b", "state", "transition"],
        ),
        "tls" => (
            &[
                "CLIENT_HELLO",
                "SERVER_HELLO",
                "ENCRYPTED_EXTENSIONS",
                "CERTIFICATE_VERIFY",
                "CERTIFICATE_REQUEST",
                "CHANGE_CIPHER_SPEC",
                "KEY_EXCHANGE",
                "HELLO_RETRY_REQUEST",
                "FINISHED",
                "handshake",
            ],
            &["state", "message_type", "transition"],
        ),
        "bgp" => (
            &[
                "OPEN",
                "UPDATE",
                "NOTIFICATION",
                "KEEPALIVE",
                "ROUTE_REFRESH",
                "IDLE",
                "CONNECT",
                "ACTIVE",
                "OPENSENT",
                "OPENCONFIRM",
                "ESTABLISHED",
            ],
            &["\\bfsm\\b", "session state", "state"],
        ),
        "rtsp" => (
            &[
                "OPTIONS",
                "DESCRIBE",
                "SETUP",
                "PLAY",
                "PAUSE",
                "TEARDOWN",
                "RECORD",
                "ANNOUNCE",
                "READY",
                "PLAYING",
                "RECORDING",
            ],
            &["state", "session", "method"],
        ),
        "l2tp" => (
            &[
                "SCCRQ", "SCCRP", "SCCCN", "STOPCCN", "HELLO", "ICRQ", "ICRP", "ICCN", "OCRQ",
                "OCRP", "OCCN", "CDN",
            ],
            &["tunnel state", "session state", "state", "\\bfsm\\b"],
        ),
        other => {
            return Err(FilterError::UnknownProtocol(other.to_string()));
        }
    };

    let mut keywords = Vec::with_capacity(rfc.len() + expert.len());
    for pattern in rfc {
        keywords.push(Keyword::new(pattern, KeywordOrigin::RfcDerived)?);
    }
    for pattern in expert {
        keywords.push(Keyword::new(pattern, KeywordOrigin::Expert)?);
    }
    KeywordSet::new(protocol, keywords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn ikev2_set_contains_sa_keywords() {
        let set = builtin_keywords("ikev2").unwrap();
        assert!(set.keywords.iter().any(|k| k.pattern.contains("SA")));
        assert!(set
            .keywords
            .iter()
            .any(|k| k.origin == KeywordOrigin::Expert));
    }

    #[test]
    fn tls_set_contains_client_hello() {
        let set = builtin_keywords("tls").unwrap();
        assert!(set.keywords.iter().any(|k| k.pattern == "CLIENT_HELLO"));
        // Identifiers embed RFC terms with prefixes.
        let kw = set
            .keywords
            .iter()
            .find(|k| k.pattern == "CLIENT_HELLO")
            .unwrap();
        assert_eq!(kw.count_matches("s2n_client_hello_recv(conn)"), 1);
    }

    #[test]
    fn unknown_protocol_is_rejected() {
        assert!(matches!(
            builtin_keywords("smtp"),
            Err(FilterError::UnknownProtocol(_))
        ));
    }

    #[test]
    fn keyword_file_parses_comments_and_blanks() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# custom set").unwrap();
        writeln!(file).unwrap();
        writeln!(file, "TOYP_STATE  # session states").unwrap();
        writeln!(file, "hello").unwrap();
        let set = KeywordSet::from_file("toyp", file.path()).unwrap();
        assert_eq!(set.keywords.len(), 2);
        assert_eq!(set.keywords[0].pattern, "TOYP_STATE");
    }

    #[test]
    fn bad_pattern_is_reported() {
        assert!(matches!(
            Keyword::new("(unclosed", KeywordOrigin::Expert),
            Err(FilterError::BadPattern { .. })
        ));
    }

    #[test]
    fn matching_is_case_insensitive() {
        let kw = Keyword::new("established", KeywordOrigin::RfcDerived).unwrap();
        assert_eq!(kw.count_matches("STATE_IKE_SA_ESTABLISHED"), 1);
    }
}
