//! Two-stage normalization: per-signal zero-centering followed by
//! dataset-level maximal-magnitude scaling into `[-1, 1]`.
//!
//! The magnitude ranges are fitted once over every trial of every subject
//! (per channel) and then applied trial by trial, so all subjects end up on
//! the same scale. Trials outside the fitted set may legitimately map
//! outside `[-1, 1]`.

use alloc::vec::Vec;

use crate::channel::ChannelId;
use crate::trial::TimeSeriesTrial;

#[derive(Debug, Clone, PartialEq)]
pub enum NormalizeError {
    EmptySignal,
    EmptyDataset,
    /// A channel is identically zero after centering across the whole fitted
    /// set, so no magnitude scale exists for it.
    DegenerateChannel(ChannelId),
}

impl core::fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NormalizeError::EmptySignal => write!(f, "cannot zero-center an empty signal"),
            NormalizeError::EmptyDataset => write!(f, "cannot fit a normalizer on zero trials"),
            NormalizeError::DegenerateChannel(c) => {
                write!(f, "channel {c} is identically zero after centering")
            }
        }
    }
}

/// Compensated (Neumaier) summation; keeps the residual mean of a centered
/// signal at machine precision even for long inputs.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Subtracts the arithmetic mean from every sample.
pub fn zero_center(signal: &[f64]) -> Result<Vec<f64>, NormalizeError> {
    if signal.is_empty() {
        return Err(NormalizeError::EmptySignal);
    }
    let mean = compensated_sum(signal) / signal.len() as f64;
    Ok(signal.iter().map(|v| v - mean).collect())
}

/// Per-channel maximal magnitude of the zero-centered data, fitted across a
/// whole dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    max_magnitude: [f64; 8],
}

impl Normalizer {
    pub fn max_magnitude(&self, c: ChannelId) -> f64 {
        self.max_magnitude[c.index()]
    }
}

/// Fits the maximal magnitude range per channel over all trials: the scale
/// for channel `c` is `max` over trials of `max |v|` over its zero-centered
/// samples.
pub fn fit_normalizer(trials: &[TimeSeriesTrial]) -> Result<Normalizer, NormalizeError> {
    if trials.is_empty() {
        return Err(NormalizeError::EmptyDataset);
    }
    let mut max_magnitude = [0.0f64; 8];
    for trial in trials {
        for (c, samples) in trial.channels() {
            let centered = zero_center(samples)?;
            let peak = centered.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let slot = &mut max_magnitude[c.index()];
            *slot = slot.max(peak);
        }
    }
    for c in ChannelId::ALL {
        if max_magnitude[c.index()] == 0.0 {
            return Err(NormalizeError::DegenerateChannel(c));
        }
    }
    Ok(Normalizer { max_magnitude })
}

/// Zero-centers every channel and divides by the fitted magnitude range.
/// Metadata is untouched. Trials inside the fitted set land in `[-1, 1]`;
/// unseen trials may exceed it.
pub fn normalize_trial(trial: &TimeSeriesTrial, norm: &Normalizer) -> TimeSeriesTrial {
    trial
        .map_channels(|c, samples| {
            let mean = compensated_sum(samples) / samples.len() as f64;
            let scale = norm.max_magnitude(c);
            samples.iter().map(|v| (v - mean) / scale).collect()
        })
        .expect("normalization preserves trial validity")
}
