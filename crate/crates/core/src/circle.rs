//! Arcs on the unit circle and the uncovered-measure query.
//!
//! Positions are fractions of a slot, so the circle has circumference 1.
//! Arcs are half-open, `[start, start + length)` taken modulo 1: two arcs
//! that only touch at an endpoint do not overlap.

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Absolute tolerance used when merging endpoints.
pub const MERGE_EPS: f64 = 1e-12;

/// Reduces `x` modulo 1 into `[0, 1)`.
///
/// `rem_euclid` can round up to exactly 1.0 for tiny negative inputs; that
/// case is folded back to 0.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// One periodic burst on the normalized slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        let ok = start.is_finite()
            && length.is_finite()
            && (0.0..1.0).contains(&start)
            && length > 0.0
            && length <= 1.0;
        if ok {
            Ok(Self { start, length })
        } else {
            Err(Error::InvalidArc { start, length })
        }
    }

    /// Like [`Arc::new`] but reduces `start` modulo 1 first.
    pub fn wrapped(start: f64, length: f64) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::InvalidArc { start, length });
        }
        Self::new(wrap_unit(start), length)
    }

    /// Caller guarantees the invariants. Used on hot paths where start has
    /// just been wrapped and length is a validated duty cycle.
    #[inline]
    pub(crate) fn new_unchecked(start: f64, length: f64) -> Self {
        debug_assert!((0.0..1.0).contains(&start) && length > 0.0 && length <= 1.0);
        Self { start, length }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Modular membership test. `x` is expected in `[0, 1)`.
    pub fn contains(&self, x: f64) -> bool {
        wrap_unit(x - self.start) < self.length
    }
}

/// Measure of `desired` not covered by the union of `blockers`.
///
/// The circle is unrolled at `desired.start`, each blocker is clipped to
/// `[0, desired.length)` (producing at most two pieces when it wraps), and
/// the pieces are merged by a sweep over sorted endpoints.
pub fn uncovered_measure(desired: &Arc, blockers: &[Arc]) -> f64 {
    let len = desired.length;
    let mut pieces: SmallVec<[(f64, f64); 8]> = SmallVec::new();

    for b in blockers {
        let offset = wrap_unit(b.start - desired.start);
        let end = offset + b.length;
        if offset < len {
            pieces.push((offset, end.min(len)));
        }
        if end > 1.0 {
            let tail = (end - 1.0).min(len);
            if tail > 0.0 {
                pieces.push((0.0, tail));
            }
        }
    }
    if pieces.is_empty() {
        return len;
    }

    pieces.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut covered = 0.0;
    let (mut lo, mut hi) = pieces[0];
    for &(s, e) in &pieces[1..] {
        if s <= hi + MERGE_EPS {
            hi = hi.max(e);
        } else {
            covered += hi - lo;
            lo = s;
            hi = e;
        }
    }
    covered += hi - lo;

    (len - covered).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Midpoint-rule coverage count over the desired arc.
    fn grid_oracle(desired: &Arc, blockers: &[Arc], h: f64) -> f64 {
        let n = (desired.length() / h).round() as usize;
        let step = desired.length() / n as f64;
        let free = (0..n)
            .filter(|&k| {
                let x = wrap_unit(desired.start() + (k as f64 + 0.5) * step);
                !blockers.iter().any(|b| b.contains(x))
            })
            .count();
        free as f64 * step
    }

    fn arc(s: f64, l: f64) -> Arc {
        Arc::new(s, l).unwrap()
    }

    #[test]
    fn contains_wraps() {
        assert!(arc(0.8, 0.5).contains(0.1));
        assert!(!arc(0.8, 0.5).contains(0.5));
        assert!(arc(0.0, 1.0).contains(0.999));
        // half-open end
        assert!(!arc(0.2, 0.3).contains(0.5));
        assert!(arc(0.2, 0.3).contains(0.2));
    }

    #[test]
    fn rejects_bad_arcs() {
        assert!(Arc::new(0.5, 0.0).is_err());
        assert!(Arc::new(1.0, 0.5).is_err());
        assert!(Arc::new(-0.1, 0.5).is_err());
        assert!(Arc::new(0.1, 1.5).is_err());
        assert!(Arc::new(f64::NAN, 0.5).is_err());
        assert_eq!(Arc::wrapped(1.25, 0.5).unwrap().start(), 0.25);
    }

    #[test]
    fn wrap_unit_never_returns_one() {
        assert_eq!(wrap_unit(-1e-17), 0.0);
        assert_eq!(wrap_unit(1.0), 0.0);
        assert_eq!(wrap_unit(2.75), 0.75);
    }

    #[test]
    fn stacked_interference_leaves_desired_free() {
        let got = uncovered_measure(&arc(0.0, 0.5), &[arc(0.5, 0.5), arc(0.5, 0.5)]);
        assert_eq!(got, 0.5);
    }

    #[test]
    fn gap_between_blockers() {
        let desired = arc(0.2, 0.4);
        let blockers = [arc(0.0, 0.4), arc(0.55, 0.4)];
        let oracle = grid_oracle(&desired, &blockers, 1e-5);
        assert!((oracle - 0.15).abs() < 1e-4);
        assert!((uncovered_measure(&desired, &blockers) - 0.15).abs() < 1e-12);
    }

    #[test]
    fn wrapping_desired_arc() {
        let desired = arc(0.8, 0.5);
        let blockers = [arc(0.0, 0.5)];
        let oracle = grid_oracle(&desired, &blockers, 1e-5);
        assert!((oracle - 0.2).abs() < 1e-4);
        assert!((uncovered_measure(&desired, &blockers) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn self_blocking_and_empty() {
        assert_eq!(uncovered_measure(&arc(0.3, 0.4), &[arc(0.3, 0.4)]), 0.0);
        assert_eq!(uncovered_measure(&arc(0.3, 0.4), &[]), 0.4);
    }

    #[test]
    fn touching_arcs_do_not_overlap() {
        // blocker ends exactly where desired starts, another starts where it ends
        let got = uncovered_measure(&arc(0.3, 0.4), &[arc(0.0, 0.3), arc(0.7, 0.3)]);
        assert!((got - 0.4).abs() < 1e-15);
    }

    #[test]
    fn blocker_wrapping_both_ends() {
        // blocker covers [0.9, 1.0) U [0, 0.35); desired [0.3, 0.95)
        let got = uncovered_measure(&arc(0.3, 0.65), &[arc(0.9, 0.45)]);
        assert!((got - 0.55).abs() < 1e-12);
        // full-circle blocker
        assert_eq!(uncovered_measure(&arc(0.3, 0.65), &[arc(0.6, 1.0)]), 0.0);
    }

    fn arc_strategy() -> impl Strategy<Value = Arc> {
        (0.0..1.0f64, 0.01..=1.0f64).prop_map(|(s, l)| Arc::new(s, l).unwrap())
    }

    proptest! {
        #[test]
        fn monotone_in_blockers(d in arc_strategy(), bs in prop::collection::vec(arc_strategy(), 0..5), extra in arc_strategy()) {
            let before = uncovered_measure(&d, &bs);
            let mut more = bs.clone();
            more.push(extra);
            prop_assert!(uncovered_measure(&d, &more) <= before + 1e-12);
        }

        #[test]
        fn bounded(d in arc_strategy(), bs in prop::collection::vec(arc_strategy(), 0..5)) {
            let m = uncovered_measure(&d, &bs);
            let total: f64 = bs.iter().map(|b| b.length()).sum();
            prop_assert!(m >= 0.0 && m <= d.length());
            prop_assert!(m >= d.length() - total - 1e-12);
        }

        #[test]
        fn rotation_invariant(d in arc_strategy(), bs in prop::collection::vec(arc_strategy(), 0..5), c in 0.0..1.0f64) {
            let rot = |a: &Arc| Arc::wrapped(a.start() + c, a.length()).unwrap();
            let rotated: Vec<Arc> = bs.iter().map(rot).collect();
            let a = uncovered_measure(&d, &bs);
            let b = uncovered_measure(&rot(&d), &rotated);
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn agrees_with_grid(d in arc_strategy(), bs in prop::collection::vec(arc_strategy(), 0..4)) {
            let exact = uncovered_measure(&d, &bs);
            let grid = grid_oracle(&d, &bs, 1e-5);
            prop_assert!((exact - grid).abs() <= 2e-5 * (1.0 + bs.len() as f64), "{exact} vs {grid}");
        }
    }
}
