//! Transition-level scoring of an inferred FSM against ground truth.
//!
//! Each inferred transition is judged correct (exact triple match),
//! partially correct (matched on exactly two of source, message, and
//! destination), or incorrect; unmatched ground-truth transitions are not
//! found. Precision is C/(C+PC+IC) and recall C/(C+PC+NF) over those
//! counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::fsm::{
    self, require_valid, FsmError, FsmModel, MessageType, StateName, Transition, ValidationLevel,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Fsm(#[from] FsmError),
    #[error("bad alias map: {0}")]
    Alias(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A strict-validated reference FSM plus optional name aliases.
///
/// Aliases map implementation spellings to the ground truth's canonical
/// names and are applied to both sides before matching; they live in the
/// ground-truth file because naming divergence is a property of the ground
/// truth, not of any particular inference run.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub fsm: FsmModel,
    pub aliases: BTreeMap<String, String>,
}

impl GroundTruth {
    pub fn new(fsm: FsmModel, aliases: BTreeMap<String, String>) -> Result<Self, EvalError> {
        require_valid(&fsm, ValidationLevel::Strict)?;
        let gt = Self { fsm, aliases };
        gt.check_aliases()?;
        Ok(gt)
    }

    /// Load a ground-truth file: an FSM document with an optional top-level
    /// `"aliases"` object.
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let content = fs::read_to_string(path).map_err(|source| EvalError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut value: Value = serde_json::from_str(&content).map_err(|e| FsmError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;

        let mut aliases = BTreeMap::new();
        if let Some(map) = value.as_object_mut() {
            if let Some(alias_value) = map.remove("aliases") {
                let alias_map = alias_value
                    .as_object()
                    .ok_or_else(|| EvalError::Alias("aliases must be an object".into()))?;
                for (from, to) in alias_map {
                    let to = to
                        .as_str()
                        .ok_or_else(|| EvalError::Alias(format!("alias {from:?} not a string")))?;
                    aliases.insert(
                        fsm::canonicalize_name(from)?,
                        fsm::canonicalize_name(to)?,
                    );
                }
            }
        }
        let document = serde_json::to_string(&value).expect("value reserializes");
        Self::new(fsm::parse(&document)?, aliases)
    }

    fn check_aliases(&self) -> Result<(), EvalError> {
        let known: BTreeSet<&str> = self
            .fsm
            .states
            .iter()
            .map(|s| s.as_str())
            .chain(self.fsm.alphabet.iter().map(|m| m.as_str()))
            .collect();
        for from in self.aliases.keys() {
            let target = self.resolve(from)?;
            if !known.contains(target.as_str()) {
                return Err(EvalError::Alias(format!(
                    "alias target {target:?} is not a ground-truth state or message"
                )));
            }
        }
        Ok(())
    }

    /// Follow alias chains to a fixed point, rejecting cycles.
    fn resolve(&self, name: &str) -> Result<String, EvalError> {
        let mut current = name.to_string();
        let mut seen = BTreeSet::new();
        while let Some(next) = self.aliases.get(&current) {
            if !seen.insert(current.clone()) {
                return Err(EvalError::Alias(format!("alias cycle through {name:?}")));
            }
            current = next.clone();
        }
        Ok(current)
    }

    fn apply_aliases(&self, fsm: &FsmModel) -> Result<FsmModel, EvalError> {
        let map_state = |s: &StateName| -> Result<StateName, EvalError> {
            Ok(StateName::new(&self.resolve(s.as_str())?).expect("resolved names are canonical"))
        };
        let map_message = |m: &MessageType| -> Result<MessageType, EvalError> {
            Ok(MessageType::new(&self.resolve(m.as_str())?).expect("resolved names are canonical"))
        };

        let mut out = FsmModel {
            protocol: fsm.protocol.clone(),
            implementation: fsm.implementation.clone(),
            ..FsmModel::default()
        };
        for s in &fsm.states {
            out.states.insert(map_state(s)?);
        }
        for s in &fsm.initial_states {
            out.initial_states.insert(map_state(s)?);
        }
        for s in &fsm.final_states {
            out.final_states.insert(map_state(s)?);
        }
        for m in &fsm.alphabet {
            out.alphabet.insert(map_message(m)?);
        }
        for t in &fsm.transitions {
            out.transitions.insert(Transition::new(
                map_state(&t.current_state)?,
                map_message(&t.receive_message)?,
                map_state(&t.next_state)?,
            ));
        }
        Ok(out)
    }
}

/// Which transition elements disagreed with the matched counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionElement {
    Source,
    Message,
    Destination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    PartiallyCorrect,
    Incorrect,
    NotFound,
}

/// Judgment for one inferred or ground-truth transition.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionJudgment {
    pub inferred: Option<Transition>,
    pub matched_ground_truth: Option<Transition>,
    pub verdict: Verdict,
    /// Populated only for partially correct matches: the one element that
    /// disagreed.
    pub wrong_elements: BTreeSet<TransitionElement>,
}

/// Counts, rates, and the full judgment list.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub correct: u64,
    pub partially_correct: u64,
    pub incorrect: u64,
    pub not_found: u64,
    /// C / (C + PC + IC); zero when the denominator is zero.
    pub precision: f64,
    /// C / (C + PC + NF); zero when the denominator is zero.
    pub recall: f64,
    /// Set when a denominator was zero and the corresponding rate was
    /// reported as 0.
    pub zero_denominator: bool,
    pub judgments: Vec<TransitionJudgment>,
}

/// Precision and recall from raw counts, as exact fractions.
pub fn metrics(correct: u64, partially_correct: u64, incorrect: u64, not_found: u64) -> Metrics {
    let precision_denominator = correct + partially_correct + incorrect;
    let recall_denominator = correct + partially_correct + not_found;
    let fraction = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    Metrics {
        precision: fraction(correct, precision_denominator),
        recall: fraction(correct, recall_denominator),
        zero_denominator: precision_denominator == 0 || recall_denominator == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub zero_denominator: bool,
}

impl Metrics {
    /// Rates as percentages rounded to two decimals, the form results are
    /// usually quoted in.
    pub fn as_percentages(&self) -> (f64, f64) {
        let round2 = |v: f64| (v * 10000.0).round() / 100.0;
        (round2(self.precision), round2(self.recall))
    }
}

fn agreement(a: &Transition, b: &Transition) -> BTreeSet<TransitionElement> {
    let mut wrong = BTreeSet::new();
    if a.current_state != b.current_state {
        wrong.insert(TransitionElement::Source);
    }
    if a.receive_message != b.receive_message {
        wrong.insert(TransitionElement::Message);
    }
    if a.next_state != b.next_state {
        wrong.insert(TransitionElement::Destination);
    }
    wrong
}

/// Deterministic two-pass matching.
///
/// Pass 1 consumes exact triple matches as correct. Pass 2 walks the
/// remaining inferred transitions in canonical order and greedily pairs
/// each with the first remaining ground-truth transition that agrees on
/// exactly two of three elements (partially correct, the odd element
/// recorded). Whatever remains is incorrect (inferred side) or not found
/// (ground-truth side). Greedy assignment is an approximation of optimal
/// bipartite matching; with exact matches consumed first the difference is
/// negligible for realistic machines.
pub fn match_and_classify(
    inferred: &FsmModel,
    ground_truth: &GroundTruth,
) -> Result<Vec<TransitionJudgment>, EvalError> {
    require_valid(inferred, ValidationLevel::Lenient)?;
    require_valid(&ground_truth.fsm, ValidationLevel::Strict)?;

    let inferred = ground_truth.apply_aliases(inferred)?;
    let gt = ground_truth.apply_aliases(&ground_truth.fsm)?;

    let mut judgments = Vec::new();
    let mut remaining_gt: BTreeSet<&Transition> = gt.transitions.iter().collect();
    let mut remaining_inferred: Vec<&Transition> = Vec::new();

    for transition in &inferred.transitions {
        if remaining_gt.remove(transition) {
            judgments.push(TransitionJudgment {
                inferred: Some(transition.clone()),
                matched_ground_truth: Some(transition.clone()),
                verdict: Verdict::Correct,
                wrong_elements: BTreeSet::new(),
            });
        } else {
            remaining_inferred.push(transition);
        }
    }

    for transition in remaining_inferred {
        let partial = remaining_gt
            .iter()
            .find(|candidate| agreement(transition, candidate).len() == 1)
            .copied();
        match partial {
            Some(candidate) => {
                remaining_gt.remove(candidate);
                judgments.push(TransitionJudgment {
                    inferred: Some(transition.clone()),
                    matched_ground_truth: Some(candidate.clone()),
                    verdict: Verdict::PartiallyCorrect,
                    wrong_elements: agreement(transition, candidate),
                });
            }
            None => judgments.push(TransitionJudgment {
                inferred: Some(transition.clone()),
                matched_ground_truth: None,
                verdict: Verdict::Incorrect,
                wrong_elements: BTreeSet::new(),
            }),
        }
    }

    for candidate in remaining_gt {
        judgments.push(TransitionJudgment {
            inferred: None,
            matched_ground_truth: Some(candidate.clone()),
            verdict: Verdict::NotFound,
            wrong_elements: BTreeSet::new(),
        });
    }

    Ok(judgments)
}

/// Full evaluation: classify, count, and compute the rates.
pub fn evaluate(inferred: &FsmModel, ground_truth: &GroundTruth) -> Result<EvalReport, EvalError> {
    let judgments = match_and_classify(inferred, ground_truth)?;
    let count = |verdict: Verdict| judgments.iter().filter(|j| j.verdict == verdict).count() as u64;
    let correct = count(Verdict::Correct);
    let partially_correct = count(Verdict::PartiallyCorrect);
    let incorrect = count(Verdict::Incorrect);
    let not_found = count(Verdict::NotFound);
    let m = metrics(correct, partially_correct, incorrect, not_found);
    Ok(EvalReport {
        correct,
        partially_correct,
        incorrect,
        not_found,
        precision: m.precision,
        recall: m.recall,
        zero_denominator: m.zero_denominator,
        judgments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::testutil;

    fn ground_truth(transitions: &[(&str, &str, &str)]) -> GroundTruth {
        let fsm = testutil::fsm(&["A"], &["Z"], transitions);
        GroundTruth::new(fsm, BTreeMap::new()).unwrap()
    }

    #[test]
    fn identical_fsms_are_all_correct() {
        let gt = ground_truth(&[("A", "M1", "B"), ("B", "M2", "Z"), ("A", "M2", "Z")]);
        let report = evaluate(&gt.fsm.clone(), &gt).unwrap();
        assert_eq!(report.correct, 3);
        assert_eq!(report.partially_correct, 0);
        assert_eq!(report.incorrect, 0);
        assert_eq!(report.not_found, 0);
        assert_eq!(report.precision, 1.0);
        assert_eq!(report.recall, 1.0);
    }

    #[test]
    fn wrong_destination_is_partially_correct() {
        let gt = ground_truth(&[("A", "M1", "B"), ("B", "M2", "Z")]);
        let inferred = testutil::fsm(&["A"], &["Z"], &[("A", "M1", "Z"), ("B", "M2", "Z")]);
        let report = evaluate(&inferred, &gt).unwrap();
        assert_eq!(report.correct, 1);
        assert_eq!(report.partially_correct, 1);
        let pc = report
            .judgments
            .iter()
            .find(|j| j.verdict == Verdict::PartiallyCorrect)
            .unwrap();
        assert_eq!(
            pc.wrong_elements.iter().copied().collect::<Vec<_>>(),
            vec![TransitionElement::Destination]
        );
    }

    #[test]
    fn two_wrong_elements_is_incorrect() {
        let gt = ground_truth(&[("A", "M1", "B")]);
        // Shares only the message with the ground truth.
        let inferred = testutil::fsm(&["X"], &["Y"], &[("X", "M1", "Y")]);
        let report = evaluate(&inferred, &gt).unwrap();
        assert_eq!(report.correct, 0);
        assert_eq!(report.partially_correct, 0);
        assert_eq!(report.incorrect, 1);
        assert_eq!(report.not_found, 1);
    }

    #[test]
    fn counts_conserve_both_sides() {
        let gt = ground_truth(&[("A", "M1", "B"), ("B", "M1", "A"), ("A", "M2", "Z")]);
        let inferred = testutil::fsm(
            &["A"],
            &["Z"],
            &[("A", "M1", "B"), ("B", "M2", "B"), ("Q", "M9", "Q")],
        );
        let report = evaluate(&inferred, &gt).unwrap();
        assert_eq!(
            report.correct + report.partially_correct + report.incorrect,
            inferred.transitions.len() as u64
        );
        assert_eq!(
            report.correct + report.partially_correct + report.not_found,
            gt.fsm.transitions.len() as u64
        );
    }

    #[test]
    fn alias_turns_partial_into_correct() {
        let gt_fsm = testutil::fsm(
            &["STATE_IKE_SA_ESTABLISHED"],
            &["DONE"],
            &[("STATE_IKE_SA_ESTABLISHED", "DELETE", "DONE")],
        );
        let mut aliases = BTreeMap::new();
        aliases.insert(
            "ESTABLISHED".to_string(),
            "STATE_IKE_SA_ESTABLISHED".to_string(),
        );
        let gt = GroundTruth::new(gt_fsm, aliases).unwrap();
        let inferred = testutil::fsm(&["ESTABLISHED"], &["DONE"], &[("ESTABLISHED", "DELETE", "DONE")]);
        let report = evaluate(&inferred, &gt).unwrap();
        assert_eq!(report.correct, 1);
        assert_eq!(report.partially_correct, 0);
    }

    #[test]
    fn alias_cycles_are_rejected() {
        let fsm = testutil::fsm(&["A"], &["B"], &[("A", "M", "B")]);
        let mut aliases = BTreeMap::new();
        aliases.insert("X".to_string(), "Y".to_string());
        aliases.insert("Y".to_string(), "X".to_string());
        assert!(matches!(
            GroundTruth::new(fsm, aliases),
            Err(EvalError::Alias(_))
        ));
    }

    #[test]
    fn alias_target_must_exist() {
        let fsm = testutil::fsm(&["A"], &["B"], &[("A", "M", "B")]);
        let mut aliases = BTreeMap::new();
        aliases.insert("X".to_string(), "NOWHERE".to_string());
        assert!(matches!(
            GroundTruth::new(fsm, aliases),
            Err(EvalError::Alias(_))
        ));
    }

    #[test]
    fn exact_match_addition_never_lowers_correct_count() {
        let gt = ground_truth(&[("A", "M1", "B"), ("B", "M2", "Z"), ("A", "M2", "Z")]);
        let smaller = testutil::fsm(&["A"], &["Z"], &[("A", "M1", "B"), ("Q", "M9", "Q")]);
        let mut larger = smaller.clone();
        larger.alphabet.insert(MessageType::new("M2").unwrap());
        larger.transitions.insert(Transition::new(
            StateName::new("B").unwrap(),
            MessageType::new("M2").unwrap(),
            StateName::new("Z").unwrap(),
        ));
        let before = evaluate(&smaller, &gt).unwrap();
        let after = evaluate(&larger, &gt).unwrap();
        assert!(after.correct > before.correct);
    }

    #[test]
    fn ground_truth_file_with_aliases_loads() {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(
            file.path(),
            r#"{
                "protocol": "demo",
                "implementation": {"repo": "r", "commit": "c"},
                "alphabet": ["OPEN"],
                "states": ["START", "RUNNING"],
                "initial_states": ["START"],
                "final_states": ["RUNNING"],
                "transitions": {"START": [{"receive_message": "OPEN", "next_state": "RUNNING"}]},
                "aliases": {"active": "RUNNING"}
            }"#,
        )
        .unwrap();
        let gt = GroundTruth::load(file.path()).unwrap();
        assert_eq!(gt.aliases.get("ACTIVE").map(String::as_str), Some("RUNNING"));

        let inferred = testutil::fsm(&["START"], &[], &[("START", "OPEN", "ACTIVE")]);
        let report = evaluate(&inferred, &gt).unwrap();
        assert_eq!(report.correct, 1);
    }

    #[test]
    fn metrics_match_published_counts() {
        let cases: &[(u64, u64, u64, u64, f64, f64)] = &[
            (19, 0, 1, 4, 95.00, 82.61),
            (51, 0, 1, 2, 98.08, 96.23),
        ];
        for &(c, pc, ic, nf, precision, recall) in cases {
            let m = metrics(c, pc, ic, nf);
            let (p, r) = m.as_percentages();
            assert!((p - precision).abs() < 0.01, "precision {p} vs {precision}");
            assert!((r - recall).abs() < 0.01, "recall {r} vs {recall}");
        }
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let m = metrics(0, 0, 0, 0);
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.recall, 0.0);
        assert!(m.zero_denominator);
    }
}
