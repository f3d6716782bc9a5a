//! Core algorithms for turning multi-channel postural time series into
//! topological feature vectors and evaluating them with sparse linear models.
//!
//! The crate is `no_std` (allocation required): every stage is a pure,
//! deterministic function over in-memory data. File formats, parallelism and
//! the command-line front end live in the companion `persig` crate.
//!
//! Pipeline stages, in order:
//!
//! 1. [`normalize`] — per-trial zero-centering and dataset-level
//!    maximal-magnitude scaling into `[-1, 1]`.
//! 2. [`persistence`] — 0-dimensional sublevel-set persistence diagrams of 1D
//!    signals via an elder-rule union-find sweep, plus lifetime thresholding.
//! 3. [`pimage`] — rasterization of diagrams into persistence images with
//!    exact per-cell Gaussian integration.
//! 4. [`features`] — per-channel images concatenated into one flat vector.
//! 5. [`learn`] — L1-regularized linear SVM / SVR, leave-one-subject-out
//!    cross-validation and report metrics.
//! 6. [`synth`] — seeded synthetic dataset generator used as a runnable
//!    stand-in for the (non-public) clinical recordings.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod features;
pub mod learn;
pub mod normalize;
pub mod persistence;
pub mod pimage;
pub mod synth;
pub mod trial;

pub use channel::ChannelId;
pub use features::{
    feature_block, trial_feature_vector, trial_feature_vector_with_stats, ChannelConfigSet,
    ChannelDiagramStats, FeatureError, FeatureVector,
};
pub use learn::{
    loso_folds, pearson_p_value, pearson_r, peak_velocity_index, run_classification,
    run_regression, ClassificationMode, ExperimentError, ExperimentReport, Fold, FoldPlan,
    LearnError, LinearModel, PreparedExperiment, RunOptions, TaskModel, TrainOptions,
};
pub use normalize::{fit_normalizer, normalize_trial, zero_center, NormalizeError, Normalizer};
pub use persistence::{
    sublevel_persistence, sublevel_persistence_bruteforce, threshold_diagram, EssentialPolicy,
    PersistenceDiagram, PersistenceError, PersistencePair,
};
pub use pimage::{
    birth_persistence_transform, gaussian_cell_mass, point_weight, rasterize, PImageError,
    PersistenceImage, PersistenceImageConfig, Weighting,
};
pub use synth::{generate_dataset, ClassParams, SplitMix64, SynthConfig, SynthError};
pub use trial::{ClassLabel, TimeSeriesTrial, TrialError, TrialMeta};
