//! Graphviz rendering of an FSM.

use protofsm::fsm::FsmModel;

/// Render `fsm` as a DOT digraph: initial states get inbound start arrows,
/// final states double circles, edges carry their message label.
pub fn to_dot(fsm: &FsmModel) -> String {
    let mut out = String::new();
    out.push_str("digraph fsm {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    for (i, state) in fsm.initial_states.iter().enumerate() {
        out.push_str(&format!("  __start{i} [shape=point, style=invis];\n"));
        out.push_str(&format!("  __start{i} -> \"{state}\";\n"));
    }
    for state in &fsm.final_states {
        out.push_str(&format!("  \"{state}\" [shape=doublecircle];\n"));
    }
    for state in &fsm.states {
        if !fsm.final_states.contains(state) {
            out.push_str(&format!("  \"{state}\";\n"));
        }
    }
    for t in &fsm.transitions {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            t.current_state, t.next_state, t.receive_message
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use protofsm::fsm::{parse, serialize, FsmModel, MessageType, StateName, Transition};

    fn sample() -> FsmModel {
        let mut fsm = FsmModel {
            protocol: "demo".into(),
            ..FsmModel::default()
        };
        let a = StateName::new("A").unwrap();
        let b = StateName::new("B").unwrap();
        let m = MessageType::new("M").unwrap();
        fsm.states.extend([a.clone(), b.clone()]);
        fsm.initial_states.insert(a.clone());
        fsm.final_states.insert(b.clone());
        fsm.alphabet.insert(m.clone());
        fsm.transitions.insert(Transition::new(a, m, b));
        fsm
    }

    #[test]
    fn dot_contains_nodes_and_labeled_edges() {
        let rendered = to_dot(&sample());
        assert!(rendered.contains("digraph fsm"));
        assert!(rendered.contains("\"A\" -> \"B\" [label=\"M\"]"));
        assert!(rendered.contains("\"B\" [shape=doublecircle]"));
        assert!(rendered.contains("-> \"A\";"));
    }

    #[test]
    fn dot_round_trips_through_the_document_format() {
        let fsm = sample();
        assert_eq!(to_dot(&parse(&serialize(&fsm)).unwrap()), to_dot(&fsm));
    }
}
