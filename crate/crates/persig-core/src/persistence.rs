//! 0-dimensional sublevel-set persistence of 1D signals.
//!
//! Sweeping a threshold `α` upward over the graph of a signal, every local
//! minimum births a connected component at its value; when two components
//! meet at an internal local maximum the younger one (larger birth, elder
//! rule) dies there, producing a `(birth, death)` pair. The fast path is a
//! union-find sweep over the samples in value order; a quadratic re-scan of
//! the filtration definition is kept alongside as an independent oracle.
//!
//! Ties: consecutive equal samples are collapsed to one vertex before the
//! sweep, and among distinct vertices of equal value the lower index is
//! processed first and treated as elder. Boundary samples count as local
//! minima iff strictly below their single neighbor.

use alloc::vec::Vec;

use crate::channel::ChannelId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PersistenceError {
    /// Fewer than two samples.
    TooShort,
    /// A sample is NaN or infinite.
    NonFiniteSample(usize),
    /// Negative or non-finite lifetime threshold.
    InvalidThreshold,
}

impl core::fmt::Display for PersistenceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PersistenceError::TooShort => write!(f, "signal must contain at least 2 samples"),
            PersistenceError::NonFiniteSample(i) => {
                write!(f, "non-finite sample at index {i}")
            }
            PersistenceError::InvalidThreshold => {
                write!(f, "lifetime threshold must be finite and nonnegative")
            }
        }
    }
}

/// A trough/peak pair: component born at value `birth`, dead at `death`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(birth: f64, death: f64) -> Self {
        PersistencePair { birth, death }
    }

    /// Lifetime `death - birth` (prominence of the trough/peak pair).
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }
}

/// What to do with the essential component born at the global minimum, which
/// never dies under the filtration proper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EssentialPolicy {
    /// Emit the finite pair `(global minimum, global maximum)`.
    PairWithGlobalMax,
    /// Omit the essential component.
    Drop,
}

/// Multiset of persistence pairs for one signal, sorted by birth then death.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
    /// Channel the signal came from, when known.
    pub channel: Option<ChannelId>,
    pub policy: EssentialPolicy,
}

impl PersistenceDiagram {
    pub fn with_channel(mut self, channel: ChannelId) -> Self {
        self.channel = Some(channel);
        self
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn validate_signal(signal: &[f64]) -> Result<(), PersistenceError> {
    if signal.len() < 2 {
        return Err(PersistenceError::TooShort);
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(PersistenceError::NonFiniteSample(i));
    }
    Ok(())
}

/// Collapses runs of consecutive equal samples to a single vertex.
fn collapse_ties(signal: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(signal.len());
    for &v in signal {
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

fn sort_pairs(pairs: &mut [PersistencePair]) {
    pairs.sort_by(|a, b| {
        a.birth
            .total_cmp(&b.birth)
            .then(a.death.total_cmp(&b.death))
    });
}

/// Disjoint sets over signal vertices with the component birth tracked at
/// the root: `(birth value, birth vertex index)` of its oldest trough.
struct MergeForest {
    parent: Vec<u32>,
    birth_value: Vec<f64>,
    birth_index: Vec<u32>,
}

impl MergeForest {
    fn new(n: usize) -> Self {
        MergeForest {
            parent: (0..n as u32).collect(),
            birth_value: alloc::vec![0.0; n],
            birth_index: alloc::vec![0; n],
        }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn make_component(&mut self, v: u32, value: f64) {
        self.birth_value[v as usize] = value;
        self.birth_index[v as usize] = v;
    }

    /// True when root `a` was born strictly before root `b`: smaller birth
    /// value, ties broken toward the lower vertex index.
    fn is_elder(&self, a: u32, b: u32) -> bool {
        let (va, vb) = (self.birth_value[a as usize], self.birth_value[b as usize]);
        match va.total_cmp(&vb) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Greater => false,
            core::cmp::Ordering::Equal => self.birth_index[a as usize] < self.birth_index[b as usize],
        }
    }
}

/// Computes the 0-dimensional sublevel-set persistence diagram of `signal`
/// by an elder-rule union-find sweep in `O(n log n)`.
///
/// Pairs are sorted by birth ascending, ties by death ascending.
pub fn sublevel_persistence(
    signal: &[f64],
    policy: EssentialPolicy,
) -> Result<PersistenceDiagram, PersistenceError> {
    validate_signal(signal)?;
    let values = collapse_ties(signal);
    let n = values.len();

    let mut pairs = Vec::new();
    let global_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let global_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    if n == 1 {
        // Constant signal: a single degenerate component.
        if policy == EssentialPolicy::PairWithGlobalMax {
            pairs.push(PersistencePair::new(values[0], values[0]));
        }
        return Ok(PersistenceDiagram {
            pairs,
            channel: None,
            policy,
        });
    }

    // Process vertices in increasing (value, index) order. After collapsing,
    // adjacent values differ strictly, so a neighbor has been processed
    // already iff its value is smaller.
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]).then(a.cmp(&b)));

    let mut forest = MergeForest::new(n);
    for &v in &order {
        let value = values[v as usize];
        let left = (v > 0 && values[v as usize - 1] < value).then(|| v - 1);
        let right = ((v as usize) + 1 < n && values[v as usize + 1] < value).then(|| v + 1);
        match (left, right) {
            (None, None) => forest.make_component(v, value),
            (Some(u), None) | (None, Some(u)) => {
                let root = forest.find(u);
                forest.parent[v as usize] = root;
            }
            (Some(l), Some(r)) => {
                // Internal local maximum: two components merge here and the
                // younger one dies.
                let rl = forest.find(l);
                let rr = forest.find(r);
                debug_assert_ne!(rl, rr, "distinct flanks of a local maximum");
                let (elder, younger) = if forest.is_elder(rl, rr) {
                    (rl, rr)
                } else {
                    (rr, rl)
                };
                pairs.push(PersistencePair::new(
                    forest.birth_value[younger as usize],
                    value,
                ));
                forest.parent[younger as usize] = elder;
                forest.parent[v as usize] = elder;
            }
        }
    }

    if policy == EssentialPolicy::PairWithGlobalMax {
        pairs.push(PersistencePair::new(global_min, global_max));
    }
    sort_pairs(&mut pairs);
    Ok(PersistenceDiagram {
        pairs,
        channel: None,
        policy,
    })
}

/// Reference implementation: iterates `α` over the sorted unique sample
/// values and recomputes the connected components of `{i : f(i) <= α}` from
/// scratch each step. Quadratic; intended for inputs up to a few thousand
/// samples and used to cross-check [`sublevel_persistence`].
pub fn sublevel_persistence_bruteforce(
    signal: &[f64],
    policy: EssentialPolicy,
) -> Result<PersistenceDiagram, PersistenceError> {
    validate_signal(signal)?;

    let mut levels = signal.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    // Live component per interval of included samples: (start, end
    // exclusive, birth value, index of the birth argmin).
    #[derive(Clone, Copy)]
    struct Component {
        start: usize,
        end: usize,
        birth: f64,
        birth_at: usize,
    }

    let mut pairs = Vec::new();
    let mut previous: Vec<Component> = Vec::new();
    for &alpha in &levels {
        // Intervals of {i : f(i) <= alpha}.
        let mut intervals: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < signal.len() {
            if signal[i] <= alpha {
                let start = i;
                while i < signal.len() && signal[i] <= alpha {
                    i += 1;
                }
                intervals.push((start, i));
            } else {
                i += 1;
            }
        }

        let mut current: Vec<Component> = Vec::with_capacity(intervals.len());
        let mut prev_iter = previous.iter().peekable();
        for (start, end) in intervals {
            // Old components contained in this interval, left to right.
            let mut absorbed: Vec<Component> = Vec::new();
            while let Some(c) = prev_iter.peek() {
                if c.start >= start && c.end <= end {
                    absorbed.push(**c);
                    prev_iter.next();
                } else {
                    break;
                }
            }
            let rep = if absorbed.is_empty() {
                // Fresh component: born at its minimum value, lowest index
                // winning ties.
                let mut birth = f64::INFINITY;
                let mut birth_at = start;
                for (j, &v) in signal[start..end].iter().enumerate() {
                    if v < birth {
                        birth = v;
                        birth_at = start + j;
                    }
                }
                Component {
                    start,
                    end,
                    birth,
                    birth_at,
                }
            } else {
                // Merge: the component with the earliest (birth, index)
                // survives, the rest die at this level.
                let elder = *absorbed
                    .iter()
                    .min_by(|a, b| {
                        a.birth
                            .total_cmp(&b.birth)
                            .then(a.birth_at.cmp(&b.birth_at))
                    })
                    .expect("nonempty");
                for dead in absorbed.iter().filter(|c| c.birth_at != elder.birth_at) {
                    pairs.push(PersistencePair::new(dead.birth, alpha));
                }
                Component {
                    start,
                    end,
                    birth: elder.birth,
                    birth_at: elder.birth_at,
                }
            };
            current.push(rep);
        }
        previous = current;
    }

    debug_assert_eq!(previous.len(), 1, "one essential component at the top");
    if policy == EssentialPolicy::PairWithGlobalMax {
        let essential = previous[0];
        pairs.push(PersistencePair::new(
            essential.birth,
            *levels.last().expect("nonempty signal"),
        ));
    }
    sort_pairs(&mut pairs);
    Ok(PersistenceDiagram {
        pairs,
        channel: None,
        policy,
    })
}

/// Drops every pair with lifetime strictly below `t`.
pub fn threshold_diagram(
    diagram: &PersistenceDiagram,
    t: f64,
) -> Result<PersistenceDiagram, PersistenceError> {
    if !t.is_finite() || t < 0.0 {
        return Err(PersistenceError::InvalidThreshold);
    }
    Ok(PersistenceDiagram {
        pairs: diagram
            .pairs
            .iter()
            .copied()
            .filter(|p| p.lifetime() >= t)
            .collect(),
        channel: diagram.channel,
        policy: diagram.policy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn pairs_of(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
        d.pairs.iter().map(|p| (p.birth, p.death)).collect()
    }

    /// Strict local minima of the tie-collapsed signal; boundary vertices
    /// count iff strictly below their single neighbor, a lone vertex counts.
    fn local_minima_count(signal: &[f64]) -> usize {
        let v = collapse_ties(signal);
        if v.len() == 1 {
            return 1;
        }
        let mut count = 0;
        for i in 0..v.len() {
            let left_ok = i == 0 || v[i] < v[i - 1];
            let right_ok = i + 1 == v.len() || v[i] < v[i + 1];
            if left_ok && right_ok {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn two_trough_example() {
        let d = sublevel_persistence(
            &[1.0, 0.5, 1.5, 0.2, 2.0],
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        assert_eq!(pairs_of(&d), vec![(0.2, 2.0), (0.5, 1.5)]);
    }

    #[test]
    fn monotone_signal_has_single_component() {
        let up = [0.0, 1.0, 2.0, 3.0];
        let paired = sublevel_persistence(&up, EssentialPolicy::PairWithGlobalMax).unwrap();
        assert_eq!(pairs_of(&paired), vec![(0.0, 3.0)]);
        let dropped = sublevel_persistence(&up, EssentialPolicy::Drop).unwrap();
        assert!(dropped.is_empty());
    }

    #[test]
    fn damped_sinusoid_has_three_pairs() {
        // Three troughs, every one paired with a peak. Ends at t = 2.98,
        // just under the third interior peak, so the boundary sample is a
        // local maximum rather than a fourth trough.
        let n = 299;
        let signal: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / 100.0;
                libm::exp(-0.5 * t) * libm::cos(2.0 * core::f64::consts::PI * t)
            })
            .collect();
        let d = sublevel_persistence(&signal, EssentialPolicy::PairWithGlobalMax).unwrap();
        assert_eq!(d.len(), 3, "pairs: {:?}", d.pairs);
        for p in &d.pairs {
            assert!(p.death >= p.birth);
        }
    }

    #[test]
    fn equal_troughs_break_ties_toward_lower_index() {
        let d =
            sublevel_persistence(&[2.0, 0.0, 2.0, 0.0, 2.0], EssentialPolicy::PairWithGlobalMax)
                .unwrap();
        assert_eq!(pairs_of(&d), vec![(0.0, 2.0), (0.0, 2.0)]);
        let dropped =
            sublevel_persistence(&[2.0, 0.0, 2.0, 0.0, 2.0], EssentialPolicy::Drop).unwrap();
        assert_eq!(pairs_of(&dropped), vec![(0.0, 2.0)]);
    }

    #[test]
    fn constant_signal_degenerates() {
        let d = sublevel_persistence(&[3.0, 3.0, 3.0], EssentialPolicy::PairWithGlobalMax)
            .unwrap();
        assert_eq!(pairs_of(&d), vec![(3.0, 3.0)]);
        let dropped = sublevel_persistence(&[3.0, 3.0], EssentialPolicy::Drop).unwrap();
        assert!(dropped.is_empty());
        let brute =
            sublevel_persistence_bruteforce(&[3.0, 3.0, 3.0], EssentialPolicy::PairWithGlobalMax)
                .unwrap();
        assert_eq!(pairs_of(&brute), vec![(3.0, 3.0)]);
    }

    #[test]
    fn rejects_short_and_non_finite_signals() {
        assert_eq!(
            sublevel_persistence(&[1.0], EssentialPolicy::Drop).unwrap_err(),
            PersistenceError::TooShort
        );
        assert_eq!(
            sublevel_persistence(&[], EssentialPolicy::Drop).unwrap_err(),
            PersistenceError::TooShort
        );
        assert_eq!(
            sublevel_persistence(&[0.0, f64::NAN, 1.0], EssentialPolicy::Drop).unwrap_err(),
            PersistenceError::NonFiniteSample(1)
        );
        assert_eq!(
            sublevel_persistence_bruteforce(&[0.0, f64::INFINITY], EssentialPolicy::Drop)
                .unwrap_err(),
            PersistenceError::NonFiniteSample(1)
        );
    }

    #[test]
    fn bruteforce_two_trough_example() {
        let d = sublevel_persistence_bruteforce(
            &[1.0, 0.5, 1.5, 0.2, 2.0],
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        assert_eq!(pairs_of(&d), vec![(0.2, 2.0), (0.5, 1.5)]);
    }

    #[test]
    fn threshold_keeps_long_lived_pairs() {
        let d = sublevel_persistence(
            &[1.0, 0.5, 1.5, 0.2, 2.0],
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        let kept = threshold_diagram(&d, 1.2).unwrap();
        assert_eq!(pairs_of(&kept), vec![(0.2, 2.0)]);
        let all = threshold_diagram(&d, 0.0).unwrap();
        assert_eq!(all.pairs, d.pairs);
        let empty = PersistenceDiagram {
            pairs: vec![],
            channel: None,
            policy: EssentialPolicy::Drop,
        };
        assert!(threshold_diagram(&empty, 5.0).unwrap().is_empty());
        assert_eq!(
            threshold_diagram(&d, -0.1).unwrap_err(),
            PersistenceError::InvalidThreshold
        );
    }

    #[test]
    fn plateaus_collapse_before_the_sweep() {
        // [1, 0, 0, 1, 1, 0.5, 2]: troughs at the 0-plateau and at 0.5.
        let d = sublevel_persistence(
            &[1.0, 0.0, 0.0, 1.0, 1.0, 0.5, 2.0],
            EssentialPolicy::PairWithGlobalMax,
        )
        .unwrap();
        assert_eq!(pairs_of(&d), vec![(0.0, 2.0), (0.5, 1.0)]);
    }

    #[test]
    fn shift_and_scale_equivariance_is_exact() {
        let signal = [0.3, -0.7, 1.1, 0.2, 0.9, -1.3, 0.4];
        let base = sublevel_persistence(&signal, EssentialPolicy::PairWithGlobalMax).unwrap();
        let c = 2.625;
        let shifted: Vec<f64> = signal.iter().map(|v| v + c).collect();
        let shifted_d =
            sublevel_persistence(&shifted, EssentialPolicy::PairWithGlobalMax).unwrap();
        for (a, b) in base.pairs.iter().zip(&shifted_d.pairs) {
            assert_eq!(a.birth + c, b.birth);
            assert_eq!(a.death + c, b.death);
        }
        let s = 1.75;
        let scaled: Vec<f64> = signal.iter().map(|v| v * s).collect();
        let scaled_d = sublevel_persistence(&scaled, EssentialPolicy::PairWithGlobalMax).unwrap();
        for (a, b) in base.pairs.iter().zip(&scaled_d.pairs) {
            assert_eq!(a.birth * s, b.birth);
            assert_eq!(a.death * s, b.death);
        }
    }

    #[test]
    fn time_reversal_preserves_the_multiset() {
        let signal = [0.3, -0.7, 1.1, 0.2, 0.9, -1.3, 0.4, 0.4, -0.2];
        let forward = sublevel_persistence(&signal, EssentialPolicy::PairWithGlobalMax).unwrap();
        let reversed: Vec<f64> = signal.iter().rev().copied().collect();
        let backward =
            sublevel_persistence(&reversed, EssentialPolicy::PairWithGlobalMax).unwrap();
        assert_eq!(pairs_of(&forward), pairs_of(&backward));
    }

    proptest! {
        #[test]
        fn union_find_matches_bruteforce(
            signal in prop::collection::vec(-4i8..=4, 2..40),
            pair_essential in any::<bool>(),
        ) {
            let signal: Vec<f64> = signal.into_iter().map(f64::from).collect();
            let policy = if pair_essential {
                EssentialPolicy::PairWithGlobalMax
            } else {
                EssentialPolicy::Drop
            };
            let fast = sublevel_persistence(&signal, policy).unwrap();
            let slow = sublevel_persistence_bruteforce(&signal, policy).unwrap();
            prop_assert_eq!(pairs_of(&fast), pairs_of(&slow));
        }

        #[test]
        fn pair_count_equals_local_minima(signal in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            let d = sublevel_persistence(&signal, EssentialPolicy::PairWithGlobalMax).unwrap();
            prop_assert_eq!(d.len(), local_minima_count(&signal));
            for p in &d.pairs {
                prop_assert!(p.death >= p.birth);
            }
        }
    }
}
