//! Per-trial feature vectors: one persistence image per used channel,
//! flattened and concatenated in the fixed order
//! `x, y, fx, fy, mx, my, mz`.
//!
//! `fz` is recorded and normalized but never featurized; it stays available
//! for diagnostics only.

use alloc::vec::Vec;

use crate::channel::ChannelId;
use crate::persistence::{
    sublevel_persistence, threshold_diagram, EssentialPolicy, PersistenceError,
};
use crate::pimage::{rasterize, PImageError, PersistenceImage, PersistenceImageConfig};
use crate::trial::TimeSeriesTrial;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureError {
    /// `fz` (or any channel outside the featured seven) was requested.
    ChannelExcluded(ChannelId),
    Persistence {
        channel: ChannelId,
        source: PersistenceError,
    },
    Image {
        channel: ChannelId,
        source: PImageError,
    },
    /// Vector length does not match the config's total dimension.
    DimMismatch { expected: usize, got: usize },
}

impl core::fmt::Display for FeatureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FeatureError::ChannelExcluded(c) => {
                write!(f, "channel {c} is not part of the feature vector")
            }
            FeatureError::Persistence { channel, source } => {
                write!(f, "persistence failed on channel {channel}: {source}")
            }
            FeatureError::Image { channel, source } => {
                write!(f, "rasterization failed on channel {channel}: {source}")
            }
            FeatureError::DimMismatch { expected, got } => {
                write!(f, "feature vector has {got} entries, expected {expected}")
            }
        }
    }
}

/// Per-channel image configs for the seven featured channels.
///
/// Defaults follow the published settings: 50×50 grids, σ = 0.03, birth
/// range `[-0.5, 0.5]` for `fx`, `[-0.75, 0.75]` for `mz` and `[-1.5, 1.5]`
/// for everything else.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfigSet {
    configs: [PersistenceImageConfig; 7],
}

impl Default for ChannelConfigSet {
    fn default() -> Self {
        let mut configs: [PersistenceImageConfig; 7] =
            core::array::from_fn(|_| PersistenceImageConfig::with_birth_range(-1.5, 1.5));
        configs[Self::slot(ChannelId::Fx).unwrap()] =
            PersistenceImageConfig::with_birth_range(-0.5, 0.5);
        configs[Self::slot(ChannelId::Mz).unwrap()] =
            PersistenceImageConfig::with_birth_range(-0.75, 0.75);
        ChannelConfigSet { configs }
    }
}

impl ChannelConfigSet {
    fn slot(channel: ChannelId) -> Option<usize> {
        ChannelId::FEATURED.iter().position(|&c| c == channel)
    }

    /// Same config for every featured channel.
    pub fn uniform(config: PersistenceImageConfig) -> Self {
        ChannelConfigSet {
            configs: core::array::from_fn(|_| config.clone()),
        }
    }

    pub fn config(&self, channel: ChannelId) -> Result<&PersistenceImageConfig, FeatureError> {
        Self::slot(channel)
            .map(|i| &self.configs[i])
            .ok_or(FeatureError::ChannelExcluded(channel))
    }

    pub fn set(
        &mut self,
        channel: ChannelId,
        config: PersistenceImageConfig,
    ) -> Result<(), FeatureError> {
        let i = Self::slot(channel).ok_or(FeatureError::ChannelExcluded(channel))?;
        self.configs[i] = config;
        Ok(())
    }

    /// Total feature dimension: the sum of all grid sizes (17500 under
    /// defaults).
    pub fn feature_dim(&self) -> usize {
        self.configs.iter().map(|c| c.grid_w * c.grid_h).sum()
    }

    /// Flat index range of a channel's image block.
    pub fn block_range(&self, channel: ChannelId) -> Result<core::ops::Range<usize>, FeatureError> {
        let slot = Self::slot(channel).ok_or(FeatureError::ChannelExcluded(channel))?;
        let start: usize = self.configs[..slot].iter().map(|c| c.grid_w * c.grid_h).sum();
        Ok(start..start + self.configs[slot].grid_w * self.configs[slot].grid_h)
    }

    pub fn validate(&self) -> Result<(), PImageError> {
        self.configs.iter().try_for_each(|c| c.validate())
    }
}

/// Flat nonnegative feature vector for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Diagram bookkeeping per channel: points before and after thresholding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDiagramStats {
    pub channel: ChannelId,
    pub total_points: usize,
    pub kept_points: usize,
}

/// Computes the channel image for one (already normalized) channel signal.
pub fn channel_image(
    signal: &[f64],
    channel: ChannelId,
    config: &PersistenceImageConfig,
    threshold: f64,
    policy: EssentialPolicy,
) -> Result<(PersistenceImage, ChannelDiagramStats), FeatureError> {
    let diagram = sublevel_persistence(signal, policy)
        .map_err(|source| FeatureError::Persistence { channel, source })?
        .with_channel(channel);
    let kept = threshold_diagram(&diagram, threshold)
        .map_err(|source| FeatureError::Persistence { channel, source })?;
    let image =
        rasterize(&kept, config).map_err(|source| FeatureError::Image { channel, source })?;
    Ok((
        image,
        ChannelDiagramStats {
            channel,
            total_points: diagram.len(),
            kept_points: kept.len(),
        },
    ))
}

/// Builds the concatenated feature vector of a normalized trial: per featured
/// channel, diagram → lifetime threshold → persistence image → row-major
/// flatten, joined in canonical order.
pub fn trial_feature_vector(
    trial: &TimeSeriesTrial,
    configs: &ChannelConfigSet,
    threshold: f64,
    policy: EssentialPolicy,
) -> Result<FeatureVector, FeatureError> {
    trial_feature_vector_with_stats(trial, configs, threshold, policy).map(|(v, _)| v)
}

/// [`trial_feature_vector`] plus per-channel diagram point counts.
pub fn trial_feature_vector_with_stats(
    trial: &TimeSeriesTrial,
    configs: &ChannelConfigSet,
    threshold: f64,
    policy: EssentialPolicy,
) -> Result<(FeatureVector, Vec<ChannelDiagramStats>), FeatureError> {
    let mut values = Vec::with_capacity(configs.feature_dim());
    let mut stats = Vec::with_capacity(ChannelId::FEATURED.len());
    for channel in ChannelId::FEATURED {
        let config = configs.config(channel)?;
        let (image, s) = channel_image(trial.channel(channel), channel, config, threshold, policy)?;
        values.extend_from_slice(image.pixels());
        stats.push(s);
    }
    Ok((FeatureVector { values }, stats))
}

/// Slice of a feature vector holding one channel's image block.
pub fn feature_block<'a>(
    vector: &'a FeatureVector,
    configs: &ChannelConfigSet,
    channel: ChannelId,
) -> Result<&'a [f64], FeatureError> {
    let expected = configs.feature_dim();
    if vector.dim() != expected {
        return Err(FeatureError::DimMismatch {
            expected,
            got: vector.dim(),
        });
    }
    let range = configs.block_range(channel)?;
    Ok(&vector.values[range])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{fit_normalizer, normalize_trial};
    use crate::trial::{ClassLabel, TrialMeta};
    use alloc::string::ToString;
    use alloc::vec;

    fn ramp_trial() -> TimeSeriesTrial {
        // Every channel a distinct monotone ramp.
        let channels: [Vec<f64>; 8] = core::array::from_fn(|i| {
            let scale = (i + 1) as f64;
            (0..50).map(|k| scale * k as f64 / 49.0).collect()
        });
        TimeSeriesTrial::new(
            TrialMeta {
                subject: "R".to_string(),
                trial: 0,
                label: ClassLabel::HealthyYoung,
                updrs: 0.0,
            },
            channels,
        )
        .unwrap()
    }

    #[test]
    fn default_configs_have_published_dimensions() {
        let configs = ChannelConfigSet::default();
        assert_eq!(configs.feature_dim(), 17500);
        assert_eq!(
            configs.config(ChannelId::Fx).unwrap().birth_range,
            (-0.5, 0.5)
        );
        assert_eq!(
            configs.config(ChannelId::Mz).unwrap().birth_range,
            (-0.75, 0.75)
        );
        assert_eq!(
            configs.config(ChannelId::Y).unwrap().birth_range,
            (-1.5, 1.5)
        );
        assert!(matches!(
            configs.config(ChannelId::Fz),
            Err(FeatureError::ChannelExcluded(ChannelId::Fz))
        ));
    }

    #[test]
    fn default_vector_has_17500_entries() {
        let trial = ramp_trial();
        let norm = fit_normalizer(core::slice::from_ref(&trial)).unwrap();
        let normalized = normalize_trial(&trial, &norm);
        let v = trial_feature_vector(
            &normalized,
            &ChannelConfigSet::default(),
            0.01,
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        assert_eq!(v.dim(), 17500);
        assert!(v.values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn block_offsets_follow_canonical_order() {
        let configs = ChannelConfigSet::default();
        assert_eq!(configs.block_range(ChannelId::X).unwrap(), 0..2500);
        assert_eq!(configs.block_range(ChannelId::Y).unwrap(), 2500..5000);
        assert_eq!(configs.block_range(ChannelId::Mz).unwrap(), 15000..17500);
        assert!(matches!(
            configs.block_range(ChannelId::Fz),
            Err(FeatureError::ChannelExcluded(ChannelId::Fz))
        ));
    }

    #[test]
    fn ramp_trial_yields_one_blob_per_channel() {
        // Uniform wide configs so each channel's single transformed point
        // (-1, 2) sits well inside range.
        let configs = ChannelConfigSet::uniform(PersistenceImageConfig::with_birth_range(
            -1.5, 1.5,
        ));
        let trial = ramp_trial();
        let norm = fit_normalizer(core::slice::from_ref(&trial)).unwrap();
        let normalized = normalize_trial(&trial, &norm);
        let v = trial_feature_vector(
            &normalized,
            &configs,
            0.01,
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        for channel in ChannelId::FEATURED {
            let block = feature_block(&v, &configs, channel).unwrap();
            let cfg = configs.config(channel).unwrap();
            let lit: Vec<usize> = block
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 1e-12)
                .map(|(i, _)| i)
                .collect();
            assert!(!lit.is_empty(), "channel {channel} block is dark");
            assert!(lit.len() < block.len(), "channel {channel} block saturated");
            assert!(
                connected(&lit, cfg.grid_w),
                "channel {channel} has a fragmented blob"
            );
        }
    }

    /// 4-neighbor connectivity of lit pixels within one image block.
    fn connected(lit: &[usize], grid_w: usize) -> bool {
        if lit.is_empty() {
            return true;
        }
        let mut remaining: alloc::collections::BTreeSet<usize> = lit.iter().copied().collect();
        let mut stack = vec![*lit.first().unwrap()];
        remaining.remove(&stack[0]);
        while let Some(p) = stack.pop() {
            let (row, col) = (p / grid_w, p % grid_w);
            let mut try_take = |r: isize, c: isize| {
                if r >= 0 && c >= 0 && (c as usize) < grid_w {
                    let q = r as usize * grid_w + c as usize;
                    if remaining.remove(&q) {
                        stack.push(q);
                    }
                }
            };
            try_take(row as isize - 1, col as isize);
            try_take(row as isize + 1, col as isize);
            try_take(row as isize, col as isize - 1);
            try_take(row as isize, col as isize + 1);
        }
        remaining.is_empty()
    }

    #[test]
    fn constant_channels_with_threshold_zero_vector() {
        // Constant channels give degenerate (c, c) pairs; any positive
        // threshold removes them, leaving an all-zero vector.
        let channels: [Vec<f64>; 8] = core::array::from_fn(|i| vec![i as f64 + 1.0; 10]);
        let trial = TimeSeriesTrial::new(
            TrialMeta {
                subject: "C".to_string(),
                trial: 0,
                label: ClassLabel::HealthyElderly,
                updrs: 0.0,
            },
            channels,
        )
        .unwrap();
        let v = trial_feature_vector(
            &trial,
            &ChannelConfigSet::default(),
            0.01,
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        assert_eq!(v.dim(), 17500);
        assert!(v.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn block_matches_standalone_rasterization() {
        let configs = ChannelConfigSet::default();
        let trial = ramp_trial();
        let norm = fit_normalizer(core::slice::from_ref(&trial)).unwrap();
        let normalized = normalize_trial(&trial, &norm);
        let v = trial_feature_vector(
            &normalized,
            &configs,
            0.01,
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        for channel in ChannelId::FEATURED {
            let (image, _) = channel_image(
                normalized.channel(channel),
                channel,
                configs.config(channel).unwrap(),
                0.01,
                EssentialPolicy::PairWithGlobalMax,
            )
            .unwrap();
            assert_eq!(
                feature_block(&v, &configs, channel).unwrap(),
                image.pixels(),
                "channel {channel}"
            );
        }
    }

    #[test]
    fn swapping_channel_signals_permutes_blocks() {
        let configs = ChannelConfigSet::uniform(PersistenceImageConfig::default());
        let trial = ramp_trial();
        let norm = fit_normalizer(core::slice::from_ref(&trial)).unwrap();
        let normalized = normalize_trial(&trial, &norm);
        // Swap X and Y signals.
        let swapped = normalized
            .map_channels(|c, s| match c {
                ChannelId::X => normalized.channel(ChannelId::Y).to_vec(),
                ChannelId::Y => normalized.channel(ChannelId::X).to_vec(),
                _ => s.to_vec(),
            })
            .unwrap();
        let v0 = trial_feature_vector(&normalized, &configs, 0.01, EssentialPolicy::PairWithGlobalMax)
            .unwrap();
        let v1 = trial_feature_vector(&swapped, &configs, 0.01, EssentialPolicy::PairWithGlobalMax)
            .unwrap();
        assert_eq!(
            feature_block(&v0, &configs, ChannelId::X).unwrap(),
            feature_block(&v1, &configs, ChannelId::Y).unwrap()
        );
        assert_eq!(
            feature_block(&v0, &configs, ChannelId::Y).unwrap(),
            feature_block(&v1, &configs, ChannelId::X).unwrap()
        );
        for untouched in [
            ChannelId::Fx,
            ChannelId::Fy,
            ChannelId::Mx,
            ChannelId::My,
            ChannelId::Mz,
        ] {
            assert_eq!(
                feature_block(&v0, &configs, untouched).unwrap(),
                feature_block(&v1, &configs, untouched).unwrap()
            );
        }
    }

    #[test]
    fn reordering_reach_segments_preserves_interior_diagram() {
        // Concatenating the same segments in a different order only touches
        // the diagram at segment boundaries; with equalized boundary values
        // the multisets agree.
        let seg_a = [0.0, 0.6, 0.2, 0.8, 0.0];
        let seg_b = [0.0, 0.9, 0.1, 0.5, 0.0];
        let seg_c = [0.0, 0.4, 0.05, 0.7, 0.0];
        let glue = |segs: [&[f64]; 3]| -> alloc::vec::Vec<f64> {
            let mut out = alloc::vec::Vec::new();
            for s in segs {
                out.extend_from_slice(s);
            }
            out
        };
        let abc = glue([&seg_a, &seg_b, &seg_c]);
        let cab = glue([&seg_c, &seg_a, &seg_b]);
        let da = sublevel_persistence(&abc, EssentialPolicy::PairWithGlobalMax).unwrap();
        let db = sublevel_persistence(&cab, EssentialPolicy::PairWithGlobalMax).unwrap();
        let key = |d: &crate::persistence::PersistenceDiagram| {
            let mut v: alloc::vec::Vec<(f64, f64)> =
                d.pairs.iter().map(|p| (p.birth, p.death)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            v
        };
        assert_eq!(key(&da), key(&db));
    }
}
