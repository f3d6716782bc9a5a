//! The eight recorded force-platform channels and their canonical ordering.

/// One channel of a recording: center-of-pressure coordinates (`X`, `Y`),
/// forces (`Fx`, `Fy`, `Fz`) and moments (`Mx`, `My`, `Mz`).
///
/// The declaration order is the canonical total order used everywhere a
/// channel sequence matters (file columns, feature blocks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ChannelId {
    X,
    Y,
    Fx,
    Fy,
    Fz,
    Mx,
    My,
    Mz,
}

impl ChannelId {
    /// All eight channels in canonical order.
    pub const ALL: [ChannelId; 8] = [
        ChannelId::X,
        ChannelId::Y,
        ChannelId::Fx,
        ChannelId::Fy,
        ChannelId::Fz,
        ChannelId::Mx,
        ChannelId::My,
        ChannelId::Mz,
    ];

    /// The seven channels that enter the feature vector, in concatenation
    /// order. `Fz` is recorded and normalized but never featurized.
    pub const FEATURED: [ChannelId; 7] = [
        ChannelId::X,
        ChannelId::Y,
        ChannelId::Fx,
        ChannelId::Fy,
        ChannelId::Mx,
        ChannelId::My,
        ChannelId::Mz,
    ];

    /// Position in the canonical order, `0..8`.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Lower-case column name used in trial CSV headers and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            ChannelId::X => "x",
            ChannelId::Y => "y",
            ChannelId::Fx => "fx",
            ChannelId::Fy => "fy",
            ChannelId::Fz => "fz",
            ChannelId::Mx => "mx",
            ChannelId::My => "my",
            ChannelId::Mz => "mz",
        }
    }

    /// Inverse of [`ChannelId::name`], case-insensitive on ASCII.
    pub fn from_name(name: &str) -> Option<ChannelId> {
        ChannelId::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(name))
    }
}

impl core::fmt::Display for ChannelId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_total_and_has_eight_members() {
        assert_eq!(ChannelId::ALL.len(), 8);
        for pair in ChannelId::ALL.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        for (i, c) in ChannelId::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }

    #[test]
    fn featured_channels_exclude_fz() {
        assert_eq!(ChannelId::FEATURED.len(), 7);
        assert!(!ChannelId::FEATURED.contains(&ChannelId::Fz));
    }

    #[test]
    fn name_round_trip() {
        for c in ChannelId::ALL {
            assert_eq!(ChannelId::from_name(c.name()), Some(c));
        }
        assert_eq!(ChannelId::from_name("MZ"), Some(ChannelId::Mz));
        assert_eq!(ChannelId::from_name("bogus"), None);
    }
}
