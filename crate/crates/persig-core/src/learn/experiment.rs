//! Leave-one-subject-out experiments over trial datasets.
//!
//! [`PreparedExperiment`] fixes the fold plan and (in the default mode) the
//! shared feature matrix; each fold then trains and predicts independently,
//! so callers may evaluate folds sequentially or in parallel and aggregate
//! the outcomes in fold order to identical results either way.
//!
//! In `fold_safe` mode the normalizer is refitted on every training split
//! and features are rebuilt per fold, trading speed for a dataset scaling
//! free of test-set leakage. The default mirrors the published procedure:
//! one normalizer over all trials of all subjects.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::folds::{loso_folds, FoldPlan};
use super::matrix::ColMatrix;
use super::stats::{pearson_p_value, pearson_r};
use super::svm::{predict, train_l1_svm, Prediction, TrainOptions, TrainTargets};
use super::LearnError;
use crate::features::{trial_feature_vector, ChannelConfigSet, FeatureError, FeatureVector};
use crate::normalize::{fit_normalizer, normalize_trial, NormalizeError};
use crate::persistence::EssentialPolicy;
use crate::trial::{ClassLabel, TimeSeriesTrial};

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    Normalize(NormalizeError),
    Feature {
        fold: Option<usize>,
        source: FeatureError,
    },
    Learn {
        fold: Option<usize>,
        source: LearnError,
    },
}

impl core::fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExperimentError::Normalize(e) => write!(f, "normalization failed: {e}"),
            ExperimentError::Feature { fold: Some(k), source } => {
                write!(f, "featurization failed in fold {k}: {source}")
            }
            ExperimentError::Feature { fold: None, source } => {
                write!(f, "featurization failed: {source}")
            }
            ExperimentError::Learn { fold: Some(k), source } => {
                write!(f, "training failed in fold {k}: {source}")
            }
            ExperimentError::Learn { fold: None, source } => write!(f, "{source}"),
        }
    }
}

impl From<NormalizeError> for ExperimentError {
    fn from(e: NormalizeError) -> Self {
        ExperimentError::Normalize(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationMode {
    /// Healthy (young + elderly merged) vs Parkinsons.
    Binary,
    /// Healthy-young vs healthy-elderly vs Parkinsons, one-vs-rest.
    ThreeClass,
}

impl ClassificationMode {
    pub fn n_classes(self) -> usize {
        match self {
            ClassificationMode::Binary => 2,
            ClassificationMode::ThreeClass => 3,
        }
    }

    /// Class index of a label under this mode. Binary: Parkinsons is the
    /// positive class 1.
    pub fn class_of(self, label: ClassLabel) -> usize {
        match self {
            ClassificationMode::Binary => usize::from(label == ClassLabel::Parkinsons),
            ClassificationMode::ThreeClass => label.index(),
        }
    }

    pub fn class_name(self, class: usize) -> &'static str {
        match (self, class) {
            (ClassificationMode::Binary, 0) => "H",
            (ClassificationMode::Binary, _) => "PD",
            (ClassificationMode::ThreeClass, 0) => "HY",
            (ClassificationMode::ThreeClass, 1) => "HE",
            (ClassificationMode::ThreeClass, _) => "PD",
        }
    }

    pub fn task_name(self) -> &'static str {
        match self {
            ClassificationMode::Binary => "binary",
            ClassificationMode::ThreeClass => "three-class",
        }
    }
}

/// Knobs shared by every experiment; hyperparameters C and ε are passed per
/// run to match their task-specific defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub policy: EssentialPolicy,
    pub fold_safe: bool,
    pub train: TrainOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            policy: EssentialPolicy::PairWithGlobalMax,
            fold_safe: false,
            train: TrainOptions::default(),
        }
    }
}

/// Per-trial predictions of one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub held_out: String,
    /// Trial indices (into the dataset) of the held-out subject.
    pub test_indices: Vec<usize>,
    pub predictions: FoldPredictions,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FoldPredictions {
    Classes(Vec<usize>),
    Scores(Vec<f64>),
}

/// A dataset with its fold plan and (unless fold-safe) precomputed features.
pub struct PreparedExperiment<'a> {
    trials: &'a [TimeSeriesTrial],
    configs: &'a ChannelConfigSet,
    threshold: f64,
    policy: EssentialPolicy,
    fold_safe: bool,
    folds: FoldPlan,
    shared_features: Option<Vec<FeatureVector>>,
    train_options: TrainOptions,
}

impl<'a> PreparedExperiment<'a> {
    /// Fits the dataset normalizer and featurizes every trial up front
    /// (skipped in fold-safe mode, where that happens per fold).
    pub fn prepare(
        trials: &'a [TimeSeriesTrial],
        configs: &'a ChannelConfigSet,
        threshold: f64,
        policy: EssentialPolicy,
        fold_safe: bool,
    ) -> Result<Self, ExperimentError> {
        let folds = loso_folds_of(trials)?;
        let shared_features = if fold_safe {
            None
        } else {
            Some(featurize_all(trials, configs, threshold, policy, None)?)
        };
        Ok(PreparedExperiment {
            trials,
            configs,
            threshold,
            policy,
            fold_safe,
            folds,
            shared_features,
            train_options: TrainOptions::default(),
        })
    }

    /// Replaces the solver options (epoch cap, tolerance).
    pub fn with_train_options(mut self, train_options: TrainOptions) -> Self {
        self.train_options = train_options;
        self
    }

    /// Uses externally computed features (e.g. from a parallel featurizer)
    /// for the shared (non fold-safe) mode.
    pub fn with_features(
        trials: &'a [TimeSeriesTrial],
        configs: &'a ChannelConfigSet,
        threshold: f64,
        policy: EssentialPolicy,
        features: Vec<FeatureVector>,
    ) -> Result<Self, ExperimentError> {
        let folds = loso_folds_of(trials)?;
        let dim = configs.feature_dim();
        if features.len() != trials.len() {
            return Err(ExperimentError::Learn {
                fold: None,
                source: LearnError::DimError {
                    expected: trials.len(),
                    got: features.len(),
                },
            });
        }
        if let Some(bad) = features.iter().find(|f| f.dim() != dim) {
            return Err(ExperimentError::Feature {
                fold: None,
                source: FeatureError::DimMismatch {
                    expected: dim,
                    got: bad.dim(),
                },
            });
        }
        Ok(PreparedExperiment {
            trials,
            configs,
            threshold,
            policy,
            fold_safe: false,
            folds,
            shared_features: Some(features),
            train_options: TrainOptions::default(),
        })
    }

    pub fn folds(&self) -> &FoldPlan {
        &self.folds
    }

    pub fn fold_safe(&self) -> bool {
        self.fold_safe
    }

    /// Train matrix and test feature rows for one fold.
    fn fold_features(
        &self,
        fold_idx: usize,
    ) -> Result<(ColMatrix, Vec<FeatureVector>), ExperimentError> {
        let fold = &self.folds.folds[fold_idx];
        let dim = self.configs.feature_dim();
        if let Some(shared) = &self.shared_features {
            let train = ColMatrix::from_rows(
                fold.train.iter().map(|&i| shared[i].values.as_slice()),
                dim,
            )
            .map_err(|source| ExperimentError::Learn {
                fold: Some(fold_idx),
                source,
            })?;
            let test = fold.test.iter().map(|&i| shared[i].clone()).collect();
            Ok((train, test))
        } else {
            // Fold-safe: refit scaling on the training subjects only.
            let train_trials: Vec<&TimeSeriesTrial> =
                fold.train.iter().map(|&i| &self.trials[i]).collect();
            let owned: Vec<TimeSeriesTrial> = train_trials.iter().map(|t| (*t).clone()).collect();
            let normalizer = fit_normalizer(&owned)?;
            let featurize_one = |i: usize| -> Result<FeatureVector, ExperimentError> {
                let normalized = normalize_trial(&self.trials[i], &normalizer);
                trial_feature_vector(&normalized, self.configs, self.threshold, self.policy)
                    .map_err(|source| ExperimentError::Feature {
                        fold: Some(fold_idx),
                        source,
                    })
            };
            let train_rows: Vec<FeatureVector> = fold
                .train
                .iter()
                .map(|&i| featurize_one(i))
                .collect::<Result<_, _>>()?;
            let train =
                ColMatrix::from_rows(train_rows.iter().map(|f| f.values.as_slice()), dim)
                    .map_err(|source| ExperimentError::Learn {
                        fold: Some(fold_idx),
                        source,
                    })?;
            let test = fold
                .test
                .iter()
                .map(|&i| featurize_one(i))
                .collect::<Result<_, _>>()?;
            Ok((train, test))
        }
    }

    /// Trains on the fold's training subjects and predicts every held-out
    /// trial's class.
    pub fn classification_fold(
        &self,
        fold_idx: usize,
        mode: ClassificationMode,
        c: f64,
    ) -> Result<FoldOutcome, ExperimentError> {
        let fold = &self.folds.folds[fold_idx];
        let (train_x, test_rows) = self.fold_features(fold_idx)?;
        let labels: Vec<usize> = fold
            .train
            .iter()
            .map(|&i| mode.class_of(self.trials[i].meta.label))
            .collect();
        let targets = match mode {
            ClassificationMode::Binary => TrainTargets::Binary(&labels),
            ClassificationMode::ThreeClass => TrainTargets::MultiClass {
                labels: &labels,
                n_classes: 3,
            },
        };
        let model = train_l1_svm(&train_x, &targets, c, 0.0, &self.options_train())
            .map_err(|source| ExperimentError::Learn {
                fold: Some(fold_idx),
                source,
            })?;
        let classes = test_rows
            .iter()
            .map(|row| match predict(&model, &row.values) {
                Ok(Prediction::Class(k)) => Ok(k),
                Ok(Prediction::Score(_)) => unreachable!("classification model"),
                Err(source) => Err(ExperimentError::Learn {
                    fold: Some(fold_idx),
                    source,
                }),
            })
            .collect::<Result<Vec<usize>, _>>()?;
        Ok(FoldOutcome {
            fold: fold_idx,
            held_out: fold.held_out.clone(),
            test_indices: fold.test.clone(),
            predictions: FoldPredictions::Classes(classes),
        })
    }

    /// Trains the regressor on the fold and predicts every held-out trial's
    /// severity score (clipped at zero).
    pub fn regression_fold(
        &self,
        fold_idx: usize,
        c: f64,
        epsilon: f64,
    ) -> Result<FoldOutcome, ExperimentError> {
        let fold = &self.folds.folds[fold_idx];
        let (train_x, test_rows) = self.fold_features(fold_idx)?;
        let targets: Vec<f64> = fold.train.iter().map(|&i| self.trials[i].meta.updrs).collect();
        let model = train_l1_svm(
            &train_x,
            &TrainTargets::Regression(&targets),
            c,
            epsilon,
            &self.options_train(),
        )
        .map_err(|source| ExperimentError::Learn {
            fold: Some(fold_idx),
            source,
        })?;
        let scores = test_rows
            .iter()
            .map(|row| match predict(&model, &row.values) {
                Ok(Prediction::Score(v)) => Ok(v),
                Ok(Prediction::Class(_)) => unreachable!("regression model"),
                Err(source) => Err(ExperimentError::Learn {
                    fold: Some(fold_idx),
                    source,
                }),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(FoldOutcome {
            fold: fold_idx,
            held_out: fold.held_out.clone(),
            test_indices: fold.test.clone(),
            predictions: FoldPredictions::Scores(scores),
        })
    }

    fn options_train(&self) -> TrainOptions {
        self.train_options.clone()
    }
}

fn loso_folds_of(trials: &[TimeSeriesTrial]) -> Result<FoldPlan, ExperimentError> {
    let meta: Vec<_> = trials.iter().map(|t| t.meta.clone()).collect();
    loso_folds(&meta).map_err(|source| ExperimentError::Learn { fold: None, source })
}

/// Fits the whole-dataset normalizer and featurizes every trial in order.
pub fn featurize_all(
    trials: &[TimeSeriesTrial],
    configs: &ChannelConfigSet,
    threshold: f64,
    policy: EssentialPolicy,
    fold: Option<usize>,
) -> Result<Vec<FeatureVector>, ExperimentError> {
    let normalizer = fit_normalizer(trials)?;
    trials
        .iter()
        .map(|t| {
            let normalized = normalize_trial(t, &normalizer);
            trial_feature_vector(&normalized, configs, threshold, policy)
                .map_err(|source| ExperimentError::Feature { fold, source })
        })
        .collect()
}

/// Truth or prediction in a report: a class code or a numeric score.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum PredValue {
    Label(String),
    Score(f64),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialRecord {
    pub subject: String,
    pub trial: u32,
    pub truth: PredValue,
    pub predicted: PredValue,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldRecord {
    pub fold: usize,
    pub held_out: String,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HyperParams {
    pub c: f64,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub epsilon: Option<f64>,
    pub threshold: f64,
    pub essential: String,
    pub fold_safe: bool,
    pub penalty: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubjectRecord {
    pub subject: String,
    pub updrs: f64,
    pub predicted: f64,
}

/// Aggregated result of one experiment, serialized as the report JSON.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub schema: u32,
    pub task: String,
    pub hyperparameters: HyperParams,
    /// Trial-level accuracy (classification).
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub accuracy: Option<f64>,
    /// Majority-vote accuracy per subject (classification, secondary).
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub subject_accuracy: Option<f64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub pearson_r: Option<f64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub p_value: Option<f64>,
    /// Per-subject averaged predictions (regression).
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub subjects: Option<Vec<SubjectRecord>>,
    pub folds: Vec<FoldRecord>,
}

fn policy_name(policy: EssentialPolicy) -> &'static str {
    match policy {
        EssentialPolicy::PairWithGlobalMax => "pair-max",
        EssentialPolicy::Drop => "drop",
    }
}

fn hyper_params(c: f64, epsilon: Option<f64>, threshold: f64, opts: &RunOptions) -> HyperParams {
    HyperParams {
        c,
        epsilon,
        threshold,
        essential: policy_name(opts.policy).to_string(),
        fold_safe: opts.fold_safe,
        penalty: "l1".to_string(),
    }
}

/// Merges classification fold outcomes into a report. Outcomes must be in
/// fold order.
pub fn aggregate_classification(
    trials: &[TimeSeriesTrial],
    mode: ClassificationMode,
    outcomes: &[FoldOutcome],
    c: f64,
    threshold: f64,
    opts: &RunOptions,
) -> ExperimentReport {
    let mut folds = Vec::with_capacity(outcomes.len());
    let mut correct = 0usize;
    let mut total = 0usize;
    let mut subject_correct = 0usize;
    for outcome in outcomes {
        let classes = match &outcome.predictions {
            FoldPredictions::Classes(c) => c,
            FoldPredictions::Scores(_) => unreachable!("classification outcome"),
        };
        let mut records = Vec::with_capacity(classes.len());
        let mut votes = alloc::vec![0usize; mode.n_classes()];
        let mut truth_class = 0usize;
        for (&trial_idx, &predicted) in outcome.test_indices.iter().zip(classes) {
            let meta = &trials[trial_idx].meta;
            truth_class = mode.class_of(meta.label);
            votes[predicted] += 1;
            total += 1;
            if predicted == truth_class {
                correct += 1;
            }
            records.push(TrialRecord {
                subject: meta.subject.clone(),
                trial: meta.trial,
                truth: PredValue::Label(mode.class_name(truth_class).to_string()),
                predicted: PredValue::Label(mode.class_name(predicted).to_string()),
            });
        }
        // Majority vote; ties resolve to the lowest class index.
        let voted = votes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k)
            .unwrap_or(0);
        if voted == truth_class {
            subject_correct += 1;
        }
        folds.push(FoldRecord {
            fold: outcome.fold,
            held_out: outcome.held_out.clone(),
            trials: records,
        });
    }
    ExperimentReport {
        schema: 1,
        task: mode.task_name().to_string(),
        hyperparameters: hyper_params(c, None, threshold, opts),
        accuracy: Some(correct as f64 / total.max(1) as f64),
        subject_accuracy: Some(subject_correct as f64 / outcomes.len().max(1) as f64),
        pearson_r: None,
        p_value: None,
        subjects: None,
        folds,
    }
}

/// Merges regression fold outcomes: per-subject averages of the clipped
/// trial predictions, then Pearson r and its p-value over subjects.
pub fn aggregate_regression(
    trials: &[TimeSeriesTrial],
    outcomes: &[FoldOutcome],
    c: f64,
    epsilon: f64,
    threshold: f64,
    opts: &RunOptions,
) -> Result<ExperimentReport, ExperimentError> {
    let mut folds = Vec::with_capacity(outcomes.len());
    let mut subjects = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let scores = match &outcome.predictions {
            FoldPredictions::Scores(s) => s,
            FoldPredictions::Classes(_) => unreachable!("regression outcome"),
        };
        let mut records = Vec::with_capacity(scores.len());
        let mut truth = 0.0;
        for (&trial_idx, &score) in outcome.test_indices.iter().zip(scores) {
            let meta = &trials[trial_idx].meta;
            truth = meta.updrs;
            records.push(TrialRecord {
                subject: meta.subject.clone(),
                trial: meta.trial,
                truth: PredValue::Score(meta.updrs),
                predicted: PredValue::Score(score),
            });
        }
        let averaged = crate::normalize::compensated_sum(scores) / scores.len().max(1) as f64;
        subjects.push(SubjectRecord {
            subject: outcome.held_out.clone(),
            updrs: truth,
            predicted: averaged,
        });
        folds.push(FoldRecord {
            fold: outcome.fold,
            held_out: outcome.held_out.clone(),
            trials: records,
        });
    }
    let truths: Vec<f64> = subjects.iter().map(|s| s.updrs).collect();
    let predictions: Vec<f64> = subjects.iter().map(|s| s.predicted).collect();
    let r = pearson_r(&truths, &predictions)
        .map_err(|source| ExperimentError::Learn { fold: None, source })?;
    let p = pearson_p_value(r, truths.len())
        .map_err(|source| ExperimentError::Learn { fold: None, source })?;
    Ok(ExperimentReport {
        schema: 1,
        task: "regression".to_string(),
        hyperparameters: hyper_params(c, Some(epsilon), threshold, opts),
        accuracy: None,
        subject_accuracy: None,
        pearson_r: Some(r),
        p_value: Some(p),
        subjects: Some(subjects),
        folds,
    })
}

/// End-to-end classification experiment: per fold, train an L1 SVM on 59
/// subjects' trials and predict the held-out subject's trials; aggregate
/// trial-level accuracy (subject-level majority vote reported alongside).
pub fn run_classification(
    trials: &[TimeSeriesTrial],
    configs: &ChannelConfigSet,
    threshold: f64,
    c: f64,
    mode: ClassificationMode,
    opts: &RunOptions,
) -> Result<ExperimentReport, ExperimentError> {
    let prepared = PreparedExperiment::prepare(
        trials,
        configs,
        threshold,
        opts.policy,
        opts.fold_safe,
    )?
    .with_train_options(opts.train.clone());
    let outcomes: Vec<FoldOutcome> = (0..prepared.folds().len())
        .map(|k| prepared.classification_fold(k, mode, c))
        .collect::<Result<_, _>>()?;
    Ok(aggregate_classification(trials, mode, &outcomes, c, threshold, opts))
}

/// End-to-end regression experiment: predictions averaged per held-out
/// subject (negatives fixed to zero), reported as Pearson r and p-value
/// against the ground-truth severity scores.
pub fn run_regression(
    trials: &[TimeSeriesTrial],
    configs: &ChannelConfigSet,
    threshold: f64,
    c: f64,
    epsilon: f64,
    opts: &RunOptions,
) -> Result<ExperimentReport, ExperimentError> {
    let prepared = PreparedExperiment::prepare(
        trials,
        configs,
        threshold,
        opts.policy,
        opts.fold_safe,
    )?
    .with_train_options(opts.train.clone());
    let outcomes: Vec<FoldOutcome> = (0..prepared.folds().len())
        .map(|k| prepared.regression_fold(k, c, epsilon))
        .collect::<Result<_, _>>()?;
    aggregate_regression(trials, &outcomes, c, epsilon, threshold, opts)
}
