//! Prompt assembly for the staged inference.
//!
//! Every stage prompt is `background ++ instruction ++ template`, where the
//! background supplies the protocol framing, the instruction names the task,
//! and the template carries the slots and the desired output format. The
//! template bodies below are shipped verbatim constants; fixture books key
//! off them, so edit with care.
//!
//! Slots use the `<<name>>` placeholder syntax so JSON braces in the
//! desired-format blocks never collide with substitution.

use std::collections::BTreeMap;

use super::InferError;

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    CodePaths,
    States,
    Messages,
    Transitions,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::CodePaths => "code_paths",
            Stage::States => "states",
            Stage::Messages => "messages",
            Stage::Transitions => "transitions",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const BACKGROUND_TEMPLATE: &str = "\
Background: <<protocol>> is a network protocol. Its implementation tracks a \
protocol state machine: the set of states a peer session can be in, the set \
of message types exchanged between peers, and the transitions between states \
that received messages trigger.";

pub const CODE_PATHS_TEMPLATE: &str = "\
Protocol: <<protocol>>

From the implementation code provided in the context, list the \
repository-relative paths of the source files that define the protocol \
states, the message types, and the state transition handling.

Desired format:
<<desired_format>>

Respond with JSON only.";

pub const STATES_TEMPLATE: &str = "\
Protocol: <<protocol>>

The state machine related code lives in these files:
<<code_paths>>

Extract every protocol state defined in the implementation. States are \
typically declared in enumerations, structures, or constant definitions that \
name the phases of a session.

Desired format:
<<desired_format>>

Respond with JSON only.";

pub const MESSAGES_TEMPLATE: &str = "\
Protocol: <<protocol>>

The state machine related code lives in these files:
<<code_paths>>

Extract every message type defined in the implementation. Message types are \
typically declared in enumerations, structures, or constant definitions that \
name the messages peers exchange.

Desired format:
<<desired_format>>

Respond with JSON only.";

pub const TRANSITIONS_TEMPLATE: &str = "\
Protocol: <<protocol>>

The state machine related code lives in these files:
<<code_paths>>

Known protocol states:
<<states>>

Known message types:
<<messages>>

The peer is currently in state \"<<current_state>>\". Summarize all state \
transitions out of this state: for each, give the message type received and \
the next state entered. Use only the known states and message types.

Desired format:
<<desired_format>>

Respond with JSON only.";

pub const DESIRED_FORMAT_CODE_PATHS: &str = "\
a JSON array of file path strings, for example:
[\"src/fsm/state_machine.c\", \"src/fsm/messages.h\"]";

pub const DESIRED_FORMAT_STATES: &str = "\
a JSON array of state name strings, for example:
[\"STATE_IDLE\", \"STATE_ESTABLISHED\"]";

pub const DESIRED_FORMAT_MESSAGES: &str = "\
a JSON array of message type strings, for example:
[\"CLIENT_HELLO\", \"SERVER_HELLO\"]";

pub const DESIRED_FORMAT_TRANSITIONS: &str = "\
a JSON object with a \"<<current_state>>\" key whose value is an array of \
objects, each with \"receive_message\" and \"next_state\" properties, for \
example:
{\"<<current_state>>\": [{\"receive_message\": \"MSG_TYPE\", \"next_state\": \"STATE_NAME\"}]}";

/// Everything needed to render one stage prompt.
#[derive(Debug, Clone)]
pub struct PromptSpec {
    pub stage: Stage,
    pub protocol: String,
    /// Domain background prepended to the instruction.
    pub background: String,
    /// Task instruction concatenated after the background.
    pub instruction: String,
    pub slots: BTreeMap<String, String>,
}

impl PromptSpec {
    fn base(stage: Stage, protocol: &str, instruction: &str) -> Self {
        let mut slots = BTreeMap::new();
        slots.insert("protocol".to_string(), protocol.to_string());
        Self {
            stage,
            protocol: protocol.to_string(),
            background: BACKGROUND_TEMPLATE.to_string(),
            instruction: instruction.to_string(),
            slots,
        }
    }

    pub fn code_paths(protocol: &str) -> Self {
        let mut spec = Self::base(
            Stage::CodePaths,
            protocol,
            "Task: identify the code paths related to the protocol state machine.",
        );
        spec.slots.insert(
            "desired_format".to_string(),
            DESIRED_FORMAT_CODE_PATHS.to_string(),
        );
        spec
    }

    pub fn states(protocol: &str, code_paths: &[String]) -> Self {
        let mut spec = Self::base(
            Stage::States,
            protocol,
            "Task: extract all protocol states defined in the implementation.",
        );
        spec.slots
            .insert("code_paths".to_string(), json_list(code_paths));
        spec.slots.insert(
            "desired_format".to_string(),
            DESIRED_FORMAT_STATES.to_string(),
        );
        spec
    }

    pub fn messages(protocol: &str, code_paths: &[String]) -> Self {
        let mut spec = Self::base(
            Stage::Messages,
            protocol,
            "Task: extract all message types defined in the implementation.",
        );
        spec.slots
            .insert("code_paths".to_string(), json_list(code_paths));
        spec.slots.insert(
            "desired_format".to_string(),
            DESIRED_FORMAT_MESSAGES.to_string(),
        );
        spec
    }

    pub fn transitions(
        protocol: &str,
        code_paths: &[String],
        states: &[String],
        messages: &[String],
        current_state: &str,
    ) -> Self {
        let mut spec = Self::base(
            Stage::Transitions,
            protocol,
            "Task: summarize all state transitions out of the given current state.",
        );
        spec.slots
            .insert("code_paths".to_string(), json_list(code_paths));
        spec.slots.insert("states".to_string(), json_list(states));
        spec.slots
            .insert("messages".to_string(), json_list(messages));
        spec.slots
            .insert("current_state".to_string(), current_state.to_string());
        spec.slots.insert(
            "desired_format".to_string(),
            DESIRED_FORMAT_TRANSITIONS.to_string(),
        );
        spec
    }

    fn template(&self) -> &'static str {
        match self.stage {
            Stage::CodePaths => CODE_PATHS_TEMPLATE,
            Stage::States => STATES_TEMPLATE,
            Stage::Messages => MESSAGES_TEMPLATE,
            Stage::Transitions => TRANSITIONS_TEMPLATE,
        }
    }
}

fn json_list(items: &[String]) -> String {
    serde_json::to_string(items).expect("string lists always serialize")
}

/// Render a stage prompt. Deterministic; missing slots surface as
/// [`InferError::Template`] naming the slot.
pub fn render(spec: &PromptSpec) -> Result<String, InferError> {
    let mut text = format!(
        "{}\n\n{}\n\n{}",
        spec.background,
        spec.instruction,
        spec.template()
    );
    // Two passes: slot values (the desired-format blocks) may themselves
    // carry placeholders such as <<current_state>>.
    for _ in 0..2 {
        for (name, value) in &spec.slots {
            text = text.replace(&format!("<<{name}>>"), value);
        }
    }
    if let Some(start) = text.find("<<") {
        if let Some(len) = text[start..].find(">>") {
            let name = &text[start + 2..start + len];
            return Err(InferError::Template(name.to_string()));
        }
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_render_includes_protocol_and_paths() {
        let paths = vec!["src/fsm.c".to_string(), "src/msg.h".to_string()];
        let spec = PromptSpec::states("TLS 1.3", &paths);
        let text = render(&spec).unwrap();
        assert!(text.contains("TLS 1.3"));
        for path in &paths {
            assert!(text.contains(path.as_str()));
        }
    }

    #[test]
    fn missing_current_state_slot_is_reported() {
        let mut spec = PromptSpec::transitions("x", &[], &[], &[], "A");
        spec.slots.remove("current_state");
        match render(&spec) {
            Err(InferError::Template(slot)) => assert_eq!(slot, "current_state"),
            other => panic!("expected template error, got {other:?}"),
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let spec = PromptSpec::transitions(
            "ikev2",
            &["a.c".to_string()],
            &["A".to_string()],
            &["M".to_string()],
            "A",
        );
        assert_eq!(render(&spec).unwrap(), render(&spec).unwrap());
    }

    #[test]
    fn transitions_render_embeds_current_state_in_format_block() {
        let spec = PromptSpec::transitions("p", &[], &[], &[], "IDLE");
        let text = render(&spec).unwrap();
        assert!(text.contains("{\"IDLE\": [{\"receive_message\""));
    }
}
