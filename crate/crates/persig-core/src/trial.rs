//! Trial data: one multi-channel recording plus its subject metadata.

use alloc::string::String;
use alloc::vec::Vec;

use crate::channel::ChannelId;

/// Cohort class of a subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClassLabel {
    HealthyYoung,
    HealthyElderly,
    Parkinsons,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] = [
        ClassLabel::HealthyYoung,
        ClassLabel::HealthyElderly,
        ClassLabel::Parkinsons,
    ];

    /// Two-letter code used in manifests and reports.
    pub fn code(self) -> &'static str {
        match self {
            ClassLabel::HealthyYoung => "HY",
            ClassLabel::HealthyElderly => "HE",
            ClassLabel::Parkinsons => "PD",
        }
    }

    pub fn from_code(code: &str) -> Option<ClassLabel> {
        ClassLabel::ALL.iter().copied().find(|l| l.code() == code)
    }

    /// Class index in declaration order (`HY` = 0, `HE` = 1, `PD` = 2).
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Subject/trial metadata without the sample data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialMeta {
    pub subject: String,
    pub trial: u32,
    pub label: ClassLabel,
    /// Motor UPDRS severity score; zero for healthy subjects.
    pub updrs: f64,
}

/// Errors rejected at trial construction time.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialError {
    /// A channel has fewer than two samples.
    ChannelTooShort(ChannelId),
    /// A sample is NaN or infinite. Non-finite data is rejected outright
    /// rather than imputed.
    NonFiniteSample { channel: ChannelId, index: usize },
    /// A healthy subject carries a nonzero UPDRS score.
    UpdrsOnHealthy,
    /// Negative or non-finite UPDRS.
    InvalidUpdrs,
}

impl core::fmt::Display for TrialError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TrialError::ChannelTooShort(c) => {
                write!(f, "channel {c} has fewer than 2 samples")
            }
            TrialError::NonFiniteSample { channel, index } => {
                write!(f, "non-finite sample in channel {channel} at row {index}")
            }
            TrialError::UpdrsOnHealthy => {
                write!(f, "nonzero UPDRS score on a healthy-labelled subject")
            }
            TrialError::InvalidUpdrs => write!(f, "UPDRS score must be finite and nonnegative"),
        }
    }
}

/// One recording: all eight channels of sample data plus metadata.
///
/// Channel sequences may have different lengths across trials (the protocol
/// produces variable-length recordings); within one trial all channels share
/// the same length because they come from the same sampled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTrial {
    pub meta: TrialMeta,
    channels: [Vec<f64>; 8],
}

impl TimeSeriesTrial {
    /// Builds a trial, enforcing the data invariants: every channel has at
    /// least two finite samples, and only Parkinsons subjects may carry a
    /// nonzero UPDRS score.
    pub fn new(meta: TrialMeta, channels: [Vec<f64>; 8]) -> Result<Self, TrialError> {
        if !meta.updrs.is_finite() || meta.updrs < 0.0 {
            return Err(TrialError::InvalidUpdrs);
        }
        if meta.label != ClassLabel::Parkinsons && meta.updrs != 0.0 {
            return Err(TrialError::UpdrsOnHealthy);
        }
        for (slot, data) in ChannelId::ALL.iter().zip(channels.iter()) {
            if data.len() < 2 {
                return Err(TrialError::ChannelTooShort(*slot));
            }
            if let Some(index) = data.iter().position(|v| !v.is_finite()) {
                return Err(TrialError::NonFiniteSample {
                    channel: *slot,
                    index,
                });
            }
        }
        Ok(TimeSeriesTrial { meta, channels })
    }

    pub fn channel(&self, c: ChannelId) -> &[f64] {
        &self.channels[c.index()]
    }

    /// Iterates `(channel, samples)` in canonical order.
    pub fn channels(&self) -> impl Iterator<Item = (ChannelId, &[f64])> {
        ChannelId::ALL
            .iter()
            .map(move |c| (*c, self.channel(*c)))
    }

    /// Replaces every channel through `f`, keeping metadata. Used by the
    /// normalization stage; the mapped data is re-validated.
    pub fn map_channels<F>(&self, mut f: F) -> Result<Self, TrialError>
    where
        F: FnMut(ChannelId, &[f64]) -> Vec<f64>,
    {
        let mut mapped: [Vec<f64>; 8] = Default::default();
        for c in ChannelId::ALL {
            mapped[c.index()] = f(c, self.channel(c));
        }
        TimeSeriesTrial::new(self.meta.clone(), mapped)
    }
}
