//! Model training and evaluation: L1-regularized linear SVM / SVR via
//! coordinate descent, leave-one-subject-out folds, and report metrics.

mod experiment;
mod folds;
mod matrix;
mod stats;
mod svm;

pub use experiment::{
    aggregate_classification, aggregate_regression, featurize_all, run_classification,
    run_regression, ClassificationMode, ExperimentError, ExperimentReport, FoldOutcome,
    FoldPredictions, FoldRecord, HyperParams, PredValue, PreparedExperiment, RunOptions,
    SubjectRecord, TrialRecord,
};
pub use folds::{loso_folds, Fold, FoldPlan};
pub use matrix::ColMatrix;
pub use stats::{pearson_p_value, pearson_r, peak_velocity_index};
pub use svm::{
    predict, squared_hinge_objective, svr_objective, train_l1_svm, train_one_vs_rest,
    train_squared_hinge, train_svr, LinearModel, Prediction, TaskModel, TrainOptions,
    TrainResult, TrainTargets,
};

/// Errors from training, prediction and statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnError {
    /// Classification input with fewer than two distinct classes.
    DegenerateLabels,
    /// A feature or target is NaN or infinite.
    NonFiniteInput,
    /// Vector length mismatch.
    DimError { expected: usize, got: usize },
    TooFewSubjects,
    TooFewSamples,
    /// Signal too short for the peak velocity index.
    TooShort,
    /// Constant input to a correlation, or zero-variance predictions.
    DegenerateCorrelation,
    /// Correlation outside [-1, 1] or non-finite.
    InvalidCorrelation,
    /// Non-positive C, negative epsilon, or other bad hyperparameter.
    InvalidHyperparameter,
    /// A classification target outside the declared class set.
    InvalidTarget,
}

impl core::fmt::Display for LearnError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LearnError::DegenerateLabels => {
                write!(f, "classification needs at least two distinct classes")
            }
            LearnError::NonFiniteInput => write!(f, "non-finite feature or target"),
            LearnError::DimError { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LearnError::TooFewSubjects => {
                write!(f, "leave-one-subject-out needs at least 2 subjects")
            }
            LearnError::TooFewSamples => write!(f, "too few samples"),
            LearnError::TooShort => write!(f, "signal must contain at least 2 samples"),
            LearnError::DegenerateCorrelation => {
                write!(f, "correlation undefined for constant input")
            }
            LearnError::InvalidCorrelation => {
                write!(f, "correlation must be finite and within [-1, 1]")
            }
            LearnError::InvalidHyperparameter => {
                write!(f, "hyperparameter out of range (C > 0, epsilon >= 0)")
            }
            LearnError::InvalidTarget => write!(f, "target outside the declared class set"),
        }
    }
}
