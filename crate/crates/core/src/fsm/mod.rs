//! Finite state machine data model.
//!
//! An FSM is the quintuple of an alphabet of message types, a state set,
//! initial states, final states, and a transition relation. Transitions map
//! a (state, received message) pair to a next state; the relation may be
//! nondeterministic, in which case [`determinize`] converts it to an
//! equivalent deterministic machine via subset construction.
//!
//! All names are stored in canonical form: uppercase, with every maximal run
//! of non-alphanumeric characters collapsed to a single underscore. One
//! normalization point keeps model output, ground-truth files, and diffing
//! from disagreeing over spelling.

mod determinize;
mod diff;
mod json;

pub use determinize::determinize;
pub use diff::{diff, DiffSummary, FsmDiff};
pub use json::{parse, parse_transitions, serialize, FSM_SCHEMA_JSON};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced by FSM model operations.
#[derive(Debug, Error)]
pub enum FsmError {
    /// A raw name was empty (or canonicalized to empty).
    #[error("invalid name {raw:?}: {reason}")]
    Name { raw: String, reason: String },
    /// An operation required a valid FSM and got one with violations.
    #[error("invalid FSM: {0}")]
    InvalidFsm(ViolationList),
    /// The input document was not well-formed JSON.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// The document was valid JSON but did not match the FSM schema.
    #[error("schema error at {location}: missing keys {missing:?}, unexpected keys {extra:?}")]
    Schema {
        location: String,
        missing: Vec<String>,
        extra: Vec<String>,
    },
}

/// Canonicalize a raw name: uppercase, collapse every maximal run of
/// non-alphanumeric characters to one underscore, strip leading and trailing
/// underscores. Idempotent.
pub fn canonicalize_name(raw: &str) -> Result<String, FsmError> {
    let mut out = String::with_capacity(raw.len());
    let mut pending_sep = false;
    for ch in raw.chars() {
        if ch.is_alphanumeric() {
            // Uppercasing can expand one char into several, including
            // combining marks that are not alphanumeric themselves; those
            // are dropped so a second pass reproduces the first.
            for upper in ch.to_uppercase().filter(|c| c.is_alphanumeric()) {
                if pending_sep && !out.is_empty() {
                    out.push('_');
                }
                pending_sep = false;
                out.push(upper);
            }
        } else {
            pending_sep = true;
        }
    }
    if out.is_empty() {
        return Err(FsmError::Name {
            raw: raw.to_string(),
            reason: "empty after canonicalization".to_string(),
        });
    }
    Ok(out)
}

macro_rules! canonical_name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            /// Canonicalize `raw` and wrap it.
            pub fn new(raw: &str) -> Result<Self, FsmError> {
                Ok(Self(canonicalize_name(raw)?))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = FsmError;
            fn try_from(raw: String) -> Result<Self, FsmError> {
                Self::new(&raw)
            }
        }

        impl From<$name> for String {
            fn from(value: $name) -> String {
                value.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

canonical_name_type! {
    /// A message type in the protocol alphabet.
    MessageType
}

canonical_name_type! {
    /// A protocol state.
    StateName
}

/// One transition: receiving `receive_message` in `current_state` moves the
/// peer to `next_state`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub current_state: StateName,
    pub receive_message: MessageType,
    pub next_state: StateName,
}

impl Transition {
    pub fn new(current: StateName, message: MessageType, next: StateName) -> Self {
        Self {
            current_state: current,
            receive_message: message,
            next_state: next,
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} --{}--> {}",
            self.current_state, self.receive_message, self.next_state
        )
    }
}

/// Identifies the implementation an FSM was inferred from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplementationRef {
    /// Repository locator (URL or local path, recorded as configured).
    pub repo: String,
    /// Commit hash or snapshot digest.
    pub commit: String,
}

/// A protocol finite state machine.
///
/// Nondeterminism is permitted: several transitions may share the same
/// (current state, message) pair. Exact duplicate transitions cannot occur
/// because the relation is a set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FsmModel {
    pub protocol: String,
    pub implementation: ImplementationRef,
    pub alphabet: BTreeSet<MessageType>,
    pub states: BTreeSet<StateName>,
    pub initial_states: BTreeSet<StateName>,
    pub final_states: BTreeSet<StateName>,
    pub transitions: BTreeSet<Transition>,
}

/// How strictly [`validate`] interprets the model invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationLevel {
    /// All invariants are errors. Used for ground-truth files.
    Strict,
    /// An empty final-state set is downgraded to a warning. Model output
    /// routinely omits final states because the inference prompts never ask
    /// for them.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One failed invariant check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    fn error(message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Error => write!(f, "error: {}", self.message),
            Severity::Warning => write!(f, "warning: {}", self.message),
        }
    }
}

/// Newtype so `FsmError::InvalidFsm` can render its violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationList(pub Vec<Violation>);

impl fmt::Display for ViolationList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&rendered.join("; "))
    }
}

/// Check every model invariant and return the violations found.
///
/// Never mutates the input. An FSM is usable by downstream operations when
/// no returned violation [`is_error`](Violation::is_error); at
/// [`ValidationLevel::Lenient`] an empty final-state set is the one check
/// reported as a warning instead of an error.
pub fn validate(fsm: &FsmModel, level: ValidationLevel) -> Vec<Violation> {
    let mut violations = Vec::new();

    if fsm.alphabet.is_empty() {
        violations.push(Violation::error("alphabet empty"));
    }
    if fsm.states.is_empty() {
        violations.push(Violation::error("states empty"));
    }
    if fsm.initial_states.is_empty() {
        violations.push(Violation::error("initial_states empty"));
    }
    if fsm.final_states.is_empty() {
        violations.push(match level {
            ValidationLevel::Strict => Violation::error("final_states empty"),
            ValidationLevel::Lenient => Violation::warning("final_states empty"),
        });
    }

    for state in &fsm.initial_states {
        if !fsm.states.contains(state) {
            violations.push(Violation::error(format!(
                "initial state {state} not in states"
            )));
        }
    }
    for state in &fsm.final_states {
        if !fsm.states.contains(state) {
            violations.push(Violation::error(format!(
                "final state {state} not in states"
            )));
        }
    }

    for transition in &fsm.transitions {
        if !fsm.states.contains(&transition.current_state) {
            violations.push(Violation::error(format!(
                "transition {transition} references unknown state {}",
                transition.current_state
            )));
        }
        if !fsm.states.contains(&transition.next_state) {
            violations.push(Violation::error(format!(
                "transition {transition} references unknown state {}",
                transition.next_state
            )));
        }
        if !fsm.alphabet.contains(&transition.receive_message) {
            violations.push(Violation::error(format!(
                "transition {transition} references unknown message {}",
                transition.receive_message
            )));
        }
    }

    violations
}

/// True when `fsm` has no error-severity violations at `level`.
pub fn is_valid(fsm: &FsmModel, level: ValidationLevel) -> bool {
    validate(fsm, level).iter().all(|v| !v.is_error())
}

/// Return `fsm` unchanged or `FsmError::InvalidFsm` with the error-severity
/// violations found at `level`.
pub fn require_valid(fsm: &FsmModel, level: ValidationLevel) -> Result<(), FsmError> {
    let errors: Vec<Violation> = validate(fsm, level)
        .into_iter()
        .filter(Violation::is_error)
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(FsmError::InvalidFsm(ViolationList(errors)))
    }
}
