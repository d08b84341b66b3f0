//! Consensus voting over repeated dialogues.
//!
//! The same prompt runs for a configured number of iterations; an item is
//! kept only when it appears in strictly more than `threshold` of them.
//! Unparseable iterations stay in the denominator — a failed parse is
//! evidence of instability, not a free pass.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::InferError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsensusConfig {
    pub iterations: u32,
    /// Strict keep threshold: kept iff count / iterations > threshold.
    pub threshold: f64,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        Self {
            iterations: 20,
            threshold: 0.8,
        }
    }
}

impl ConsensusConfig {
    pub fn validate(&self) -> Result<(), InferError> {
        if self.iterations == 0 {
            return Err(InferError::Config("iterations must be >= 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(InferError::Config(format!(
                "threshold {} outside (0, 1)",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Vote result for one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteOutcome<T: Ord> {
    /// Items above the threshold, with their occurrence counts.
    pub kept: Vec<(T, u32)>,
    /// Items seen but not kept, with their occurrence counts.
    pub dropped: Vec<(T, u32)>,
}

impl<T: Ord> VoteOutcome<T> {
    pub fn kept_items(&self) -> Vec<&T> {
        self.kept.iter().map(|(item, _)| item).collect()
    }
}

/// Count per-iteration presence (duplicates within one response count once)
/// and split items by the strict threshold. Output is sorted, so voting is
/// independent of iteration order.
pub fn vote<T: Ord + Clone>(iterations: &[Vec<T>], config: &ConsensusConfig) -> VoteOutcome<T> {
    let total = config.iterations;
    let mut counts: BTreeMap<T, u32> = BTreeMap::new();
    for items in iterations {
        let mut seen: Vec<&T> = Vec::new();
        for item in items {
            if !seen.contains(&item) {
                seen.push(item);
                *counts.entry(item.clone()).or_insert(0) += 1;
            }
        }
    }

    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (item, count) in counts {
        if f64::from(count) / f64::from(total) > config.threshold {
            kept.push((item, count));
        } else {
            dropped.push((item, count));
        }
    }
    VoteOutcome { kept, dropped }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(iterations: u32) -> ConsensusConfig {
        ConsensusConfig {
            iterations,
            threshold: 0.8,
        }
    }

    fn runs(present: u32, total: u32) -> Vec<Vec<&'static str>> {
        (0..total)
            .map(|i| if i < present { vec!["x"] } else { vec![] })
            .collect()
    }

    #[test]
    fn seventeen_of_twenty_is_kept() {
        let outcome = vote(&runs(17, 20), &config(20));
        assert_eq!(outcome.kept, vec![("x", 17)]);
    }

    #[test]
    fn sixteen_of_twenty_is_dropped() {
        // 16/20 = 0.80 exactly; the threshold is strict.
        let outcome = vote(&runs(16, 20), &config(20));
        assert!(outcome.kept.is_empty());
        assert_eq!(outcome.dropped, vec![("x", 16)]);
    }

    #[test]
    fn duplicates_within_one_iteration_count_once() {
        let iterations = vec![vec!["x", "x", "x"], vec![]];
        let outcome = vote(&iterations, &config(2));
        assert_eq!(outcome.dropped, vec![("x", 1)]);
    }

    #[test]
    fn voting_is_order_independent() {
        let a = vec![vec!["x"], vec!["y"], vec!["x"], vec![]];
        let b = vec![vec![], vec!["x"], vec!["y"], vec!["x"]];
        let cfg = ConsensusConfig {
            iterations: 4,
            threshold: 0.4,
        };
        assert_eq!(vote(&a, &cfg), vote(&b, &cfg));
    }

    #[test]
    fn extra_supporting_response_never_unkeeps_an_item() {
        // Appending one more response containing the item raises both the
        // count and the denominator; kept status is monotone under that.
        for total in 1..=20u32 {
            for present in 0..=total {
                let kept_before = {
                    let outcome = vote(&runs(present, total), &config(total));
                    !outcome.kept.is_empty()
                };
                let mut extended = runs(present, total);
                extended.push(vec!["x"]);
                let kept_after = {
                    let outcome = vote(&extended, &config(total + 1));
                    !outcome.kept.is_empty()
                };
                assert!(
                    !kept_before || kept_after,
                    "{present}/{total} kept but {}/{} dropped",
                    present + 1,
                    total + 1
                );
            }
        }
    }

    #[test]
    fn config_bounds_are_enforced() {
        assert!(config(0).validate().is_err());
        assert!(ConsensusConfig {
            iterations: 1,
            threshold: 1.0
        }
        .validate()
        .is_err());
        assert!(ConsensusConfig {
            iterations: 1,
            threshold: 0.0
        }
        .validate()
        .is_err());
    }
}
