//! Leave-one-subject-out fold planning.

use alloc::string::String;
use alloc::vec::Vec;

use super::LearnError;
use crate::trial::TrialMeta;

/// One fold: every trial of `held_out` is tested, everything else trains.
#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub held_out: String,
    /// Trial indices in the training split.
    pub train: Vec<usize>,
    /// Trial indices of the held-out subject.
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub folds: Vec<Fold>,
}

impl FoldPlan {
    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }
}

/// Round-robin leave-one-subject-out: one fold per distinct subject, in
/// first-appearance order; all of a subject's trials stay together.
pub fn loso_folds(meta: &[TrialMeta]) -> Result<FoldPlan, LearnError> {
    let mut subjects: Vec<&str> = Vec::new();
    for m in meta {
        if !subjects.contains(&m.subject.as_str()) {
            subjects.push(&m.subject);
        }
    }
    if subjects.len() < 2 {
        return Err(LearnError::TooFewSubjects);
    }
    let folds = subjects
        .iter()
        .map(|&held| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..meta.len()).partition(|&i| meta[i].subject == held);
            Fold {
                held_out: String::from(held),
                train,
                test,
            }
        })
        .collect();
    Ok(FoldPlan { folds })
}
