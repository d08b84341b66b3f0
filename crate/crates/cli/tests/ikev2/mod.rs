//! In-code definitions of the shipped IKEv2 demo fixtures.
//!
//! Three machines over one protocol: a hand-audited ground truth (8 states,
//! 23 transitions), an inferred strongSwan-style machine (8 states, 20
//! transitions: 19 exact matches, one fabricated transition, four ground
//! truth transitions missed), and an inferred libopenikev2-style machine
//! (22 states, 43 transitions) whose state naming shares nothing with the
//! strongSwan one.

use std::collections::BTreeSet;

use protofsm::fsm::{FsmModel, ImplementationRef, MessageType, StateName, Transition};

fn build(
    protocol: &str,
    repo: &str,
    commit: &str,
    alphabet: &[&str],
    initial: &[&str],
    finals: &[&str],
    transitions: &[(&str, &str, &str)],
) -> FsmModel {
    let mut fsm = FsmModel {
        protocol: protocol.to_string(),
        implementation: ImplementationRef {
            repo: repo.to_string(),
            commit: commit.to_string(),
        },
        ..FsmModel::default()
    };
    for name in alphabet {
        fsm.alphabet.insert(MessageType::new(name).unwrap());
    }
    for (current, message, next) in transitions {
        let current = StateName::new(current).unwrap();
        let next = StateName::new(next).unwrap();
        fsm.states.insert(current.clone());
        fsm.states.insert(next.clone());
        fsm.transitions.insert(Transition::new(
            current,
            MessageType::new(message).unwrap(),
            next,
        ));
    }
    fsm.initial_states = initial.iter().map(|s| StateName::new(s).unwrap()).collect();
    fsm.final_states = finals.iter().map(|s| StateName::new(s).unwrap()).collect();
    fsm.states.extend(fsm.initial_states.iter().cloned());
    fsm.states.extend(fsm.final_states.iter().cloned());
    fsm
}

const IKEV2_ALPHABET: &[&str] = &[
    "IKE_SA_INIT",
    "IKE_AUTH",
    "CREATE_CHILD_SA",
    "INFORMATIONAL",
    "DELETE",
    "REKEY",
    "TIMEOUT",
    "ERROR",
];

const GROUND_TRUTH_TRANSITIONS: &[(&str, &str, &str)] = &[
    ("IKE_CREATED", "IKE_SA_INIT", "IKE_CONNECTING"),
    ("IKE_CREATED", "TIMEOUT", "IKE_DESTROYING"),
    ("IKE_CREATED", "ERROR", "IKE_DESTROYING"),
    ("IKE_CONNECTING", "IKE_AUTH", "IKE_ESTABLISHED"),
    ("IKE_CONNECTING", "TIMEOUT", "IKE_DESTROYING"),
    ("IKE_CONNECTING", "ERROR", "IKE_DESTROYING"),
    ("IKE_CONNECTING", "DELETE", "IKE_DELETING"),
    ("IKE_ESTABLISHED", "CREATE_CHILD_SA", "IKE_ESTABLISHED"),
    ("IKE_ESTABLISHED", "INFORMATIONAL", "IKE_ESTABLISHED"),
    ("IKE_ESTABLISHED", "REKEY", "IKE_REKEYING"),
    ("IKE_ESTABLISHED", "DELETE", "IKE_DELETING"),
    ("IKE_ESTABLISHED", "TIMEOUT", "IKE_PASSIVE"),
    ("IKE_ESTABLISHED", "ERROR", "IKE_DESTROYING"),
    ("IKE_PASSIVE", "IKE_SA_INIT", "IKE_CONNECTING"),
    ("IKE_PASSIVE", "DELETE", "IKE_DELETING"),
    ("IKE_PASSIVE", "ERROR", "IKE_DESTROYING"),
    ("IKE_REKEYING", "CREATE_CHILD_SA", "IKE_REKEYED"),
    ("IKE_REKEYING", "TIMEOUT", "IKE_ESTABLISHED"),
    ("IKE_REKEYING", "ERROR", "IKE_DESTROYING"),
    ("IKE_REKEYED", "DELETE", "IKE_DELETING"),
    ("IKE_REKEYED", "INFORMATIONAL", "IKE_REKEYED"),
    ("IKE_DELETING", "DELETE", "IKE_DESTROYING"),
    ("IKE_DELETING", "TIMEOUT", "IKE_DESTROYING"),
];

/// Ground-truth transitions the inferred strongSwan machine misses.
const STRONGSWAN_NOT_FOUND: &[(&str, &str, &str)] = &[
    ("IKE_CREATED", "TIMEOUT", "IKE_DESTROYING"),
    ("IKE_PASSIVE", "IKE_SA_INIT", "IKE_CONNECTING"),
    ("IKE_REKEYED", "INFORMATIONAL", "IKE_REKEYED"),
    ("IKE_DELETING", "TIMEOUT", "IKE_DESTROYING"),
];

/// The one fabricated transition; shares no element with any missed
/// ground-truth transition, so it scores as incorrect rather than
/// partially correct.
const STRONGSWAN_FABRICATED: (&str, &str, &str) = ("IKE_DESTROYING", "IKE_AUTH", "IKE_CREATED");

pub fn ground_truth() -> FsmModel {
    build(
        "IKEv2",
        "expert-audit",
        "rfc7296",
        IKEV2_ALPHABET,
        &["IKE_CREATED"],
        &["IKE_DESTROYING"],
        GROUND_TRUTH_TRANSITIONS,
    )
}

pub fn strongswan_inferred() -> FsmModel {
    let missed: BTreeSet<_> = STRONGSWAN_NOT_FOUND.iter().collect();
    let mut transitions: Vec<(&str, &str, &str)> = GROUND_TRUTH_TRANSITIONS
        .iter()
        .filter(|t| !missed.contains(t))
        .copied()
        .collect();
    transitions.push(STRONGSWAN_FABRICATED);
    build(
        "IKEv2",
        "https://github.com/strongswan/strongswan",
        "f994e0a",
        IKEV2_ALPHABET,
        &["IKE_CREATED"],
        &["IKE_DESTROYING"],
        &transitions,
    )
}

pub fn libopenikev2_inferred() -> FsmModel {
    let transitions: &[(&str, &str, &str)] = &[
        ("STATE_INITIAL", "IKE_SA_INIT_REQUEST", "STATE_IKE_SA_INIT_RES_SENT"),
        ("STATE_INITIAL", "TIMEOUT", "STATE_CLOSED"),
        ("STATE_INITIAL", "IKE_SA_INIT_REQUEST", "STATE_IKE_SA_INIT_REQ_SENT"),
        ("STATE_IKE_SA_INIT_REQ_SENT", "IKE_SA_INIT_RESPONSE", "STATE_IKE_AUTH_REQ_SENT"),
        ("STATE_IKE_SA_INIT_REQ_SENT", "TIMEOUT", "STATE_CLOSED"),
        ("STATE_IKE_SA_INIT_REQ_SENT", "ERROR", "STATE_CLOSED"),
        ("STATE_IKE_SA_INIT_RES_SENT", "IKE_AUTH_REQUEST", "STATE_IKE_AUTH_RES_SENT"),
        ("STATE_IKE_SA_INIT_RES_SENT", "TIMEOUT", "STATE_HALF_OPEN"),
        ("STATE_IKE_AUTH_REQ_SENT", "IKE_AUTH_RESPONSE", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_IKE_AUTH_REQ_SENT", "ERROR", "STATE_CLOSED"),
        ("STATE_IKE_AUTH_RES_SENT", "INFORMATIONAL_REQUEST", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_IKE_AUTH_RES_SENT", "TIMEOUT", "STATE_CLOSED"),
        ("STATE_HALF_OPEN", "TIMEOUT", "STATE_CLOSED"),
        ("STATE_HALF_OPEN", "IKE_AUTH_REQUEST", "STATE_IKE_AUTH_RES_SENT"),
        ("STATE_IKE_SA_ESTABLISHED", "CREATE_CHILD_SA_REQUEST", "STATE_NEW_CHILD_SA_REQ_SENT"),
        ("STATE_NEW_CHILD_SA_REQ_SENT", "CREATE_CHILD_SA_RESPONSE", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_IKE_SA_ESTABLISHED", "CREATE_CHILD_SA_RESPONSE", "STATE_NEW_CHILD_SA_RES_SENT"),
        ("STATE_NEW_CHILD_SA_RES_SENT", "INFORMATIONAL_REQUEST", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_IKE_SA_ESTABLISHED", "INFORMATIONAL_REQUEST", "STATE_INFORMATIONAL_RES_SENT"),
        ("STATE_INFORMATIONAL_RES_SENT", "INFORMATIONAL_RESPONSE", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_IKE_SA_ESTABLISHED", "INFORMATIONAL_RESPONSE", "STATE_INFORMATIONAL_REQ_SENT"),
        ("STATE_INFORMATIONAL_REQ_SENT", "INFORMATIONAL_RESPONSE", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_INFORMATIONAL_REQ_SENT", "TIMEOUT", "STATE_CLOSED"),
        ("STATE_IKE_SA_ESTABLISHED", "REKEY_REQUEST", "STATE_REKEY_IKE_SA_REQ_SENT"),
        ("STATE_REKEY_IKE_SA_REQ_SENT", "REKEY_RESPONSE", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_REKEY_IKE_SA_REQ_SENT", "ERROR", "STATE_WAITING_FOR_DELETION"),
        ("STATE_IKE_SA_ESTABLISHED", "REKEY_RESPONSE", "STATE_REKEY_IKE_SA_RES_SENT"),
        ("STATE_REKEY_IKE_SA_RES_SENT", "INFORMATIONAL_REQUEST", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_IKE_SA_ESTABLISHED", "REKEY_REQUEST", "STATE_REKEY_CHILD_SA_REQ_SENT"),
        ("STATE_REKEY_CHILD_SA_REQ_SENT", "REKEY_RESPONSE", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_REKEY_CHILD_SA_REQ_SENT", "ERROR", "STATE_REDUNDANT_CHILD_SA"),
        ("STATE_IKE_SA_ESTABLISHED", "REKEY_RESPONSE", "STATE_REKEY_CHILD_SA_RES_SENT"),
        ("STATE_REKEY_CHILD_SA_RES_SENT", "INFORMATIONAL_REQUEST", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_REDUNDANT_CHILD_SA", "DELETE_REQUEST", "STATE_DELETE_CHILD_SA_REQ_SENT"),
        ("STATE_IKE_SA_ESTABLISHED", "DELETE_REQUEST", "STATE_DELETE_CHILD_SA_RES_SENT"),
        ("STATE_DELETE_CHILD_SA_REQ_SENT", "DELETE_RESPONSE", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_DELETE_CHILD_SA_RES_SENT", "INFORMATIONAL_REQUEST", "STATE_IKE_SA_ESTABLISHED"),
        ("STATE_IKE_SA_ESTABLISHED", "ERROR", "STATE_DELETE_IKE_SA_REQ_SENT"),
        ("STATE_DELETE_IKE_SA_REQ_SENT", "DELETE_RESPONSE", "STATE_CLOSED"),
        ("STATE_IKE_SA_ESTABLISHED", "DELETE_REQUEST", "STATE_DELETE_IKE_SA_RES_SENT"),
        ("STATE_DELETE_IKE_SA_RES_SENT", "TIMEOUT", "STATE_CLOSED"),
        ("STATE_WAITING_FOR_DELETION", "DELETE_REQUEST", "STATE_CLOSED"),
        ("STATE_WAITING_FOR_DELETION", "TIMEOUT", "STATE_CLOSED"),
    ];
    build(
        "IKEv2",
        "https://github.com/OpenIKEv2/libopenikev2",
        "aa0e73c",
        &[
            "IKE_SA_INIT_REQUEST",
            "IKE_SA_INIT_RESPONSE",
            "IKE_AUTH_REQUEST",
            "IKE_AUTH_RESPONSE",
            "CREATE_CHILD_SA_REQUEST",
            "CREATE_CHILD_SA_RESPONSE",
            "INFORMATIONAL_REQUEST",
            "INFORMATIONAL_RESPONSE",
            "REKEY_REQUEST",
            "REKEY_RESPONSE",
            "DELETE_REQUEST",
            "DELETE_RESPONSE",
            "TIMEOUT",
            "ERROR",
        ],
        &["STATE_INITIAL"],
        &["STATE_CLOSED"],
        transitions,
    )
}

#[allow(dead_code)]
pub fn shape_check() {
    let gt = ground_truth();
    assert_eq!(gt.states.len(), 8);
    assert_eq!(gt.transitions.len(), 23);
    let ss = strongswan_inferred();
    assert_eq!(ss.states.len(), 8);
    assert_eq!(ss.transitions.len(), 20);
    let lo = libopenikev2_inferred();
    assert_eq!(lo.states.len(), 22);
    assert_eq!(lo.transitions.len(), 43);
}
