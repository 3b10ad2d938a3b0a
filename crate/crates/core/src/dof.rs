//! Degrees of freedom of a K-user interference network described by its
//! normalized delay matrix.
//!
//! Entry `(i, j)` of every matrix here is the delay from transmitter `j` to
//! receiver `i`. Receiver `i` hears its own burst at `d[i][i]` and the
//! interfering bursts at `d[i][j]`, `j != i`; each burst lasts `rho` of the
//! slot. The pair DoF is the measure of the desired burst that no
//! interfering burst overlaps, fragments included.

use crate::circle::{uncovered_measure, wrap_unit, Arc};
use crate::error::{Error, Result};

/// Fraction of each slot during which a transmitter is active.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DutyCycle(f64);

impl DutyCycle {
    /// Accepts `1/K < rho <= 1/2`.
    pub fn new(rho: f64, users: usize) -> Result<Self> {
        let lower = 1.0 / users.max(1) as f64;
        if users >= 2 && rho.is_finite() && rho > lower && rho <= 0.5 {
            Ok(Self(rho))
        } else {
            Err(Error::InvalidDutyCycle { rho, users })
        }
    }

    /// Also admits `rho = 1/K` (up to rounding), which is the boundary case
    /// used for plotting.
    pub fn permissive(rho: f64, users: usize) -> Result<Self> {
        let lower = 1.0 / users.max(1) as f64;
        if users >= 2 && rho.is_finite() && rho >= lower - 1e-12 && rho <= 0.5 {
            Ok(Self(rho))
        } else {
            Err(Error::InvalidDutyCycle { rho, users })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Physical propagation delays `A` in seconds together with the slot length.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayMatrix {
    users: usize,
    entries: Vec<f64>,
    slot: f64,
}

impl DelayMatrix {
    /// `entries` is row-major, `users * users` long.
    pub fn new(users: usize, entries: Vec<f64>, slot: f64) -> Result<Self> {
        if users < 2 {
            return Err(Error::UnsupportedUsers(users));
        }
        if entries.len() != users * users {
            return Err(Error::DimensionMismatch { expected: users * users, found: entries.len() });
        }
        if !(slot.is_finite() && slot > 0.0) {
            return Err(Error::OutOfDomain { what: "slot length", value: slot });
        }
        if let Some(&bad) = entries.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::OutOfDomain { what: "propagation delay", value: bad });
        }
        let max = entries.iter().cloned().fold(0.0, f64::max);
        if max < 10.0 * slot {
            log::warn!(
                "largest delay {max:e} s is below 10 slots ({slot:e} s each); the long-delay assumption is weak"
            );
        }
        Ok(Self { users, entries, slot })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn slot(&self) -> f64 {
        self.slot
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.users + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Initial transmit delay of each transmitter as a fraction of the slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitDelays(Vec<f64>);

impl TransmitDelays {
    pub fn new(delta: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = delta.iter().find(|d| !(0.0..1.0).contains(*d)) {
            return Err(Error::OutOfDomain { what: "transmit delay", value: bad });
        }
        Ok(Self(delta))
    }

    pub fn zeros(users: usize) -> Self {
        Self(vec![0.0; users])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Delay matrix reduced modulo the slot and divided by it; entries in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDelayMatrix {
    users: usize,
    entries: Vec<f64>,
}

impl NormalizedDelayMatrix {
    /// `entries` is row-major, `users * users` long.
    pub fn new(users: usize, entries: Vec<f64>) -> Result<Self> {
        if users < 2 {
            return Err(Error::UnsupportedUsers(users));
        }
        if entries.len() != users * users {
            return Err(Error::DimensionMismatch { expected: users * users, found: entries.len() });
        }
        if let Some(&bad) = entries.iter().find(|d| !(0.0..1.0).contains(*d)) {
            return Err(Error::OutOfDomain { what: "normalized delay", value: bad });
        }
        Ok(Self { users, entries })
    }

    pub fn from_rows<const K: usize>(rows: [[f64; K]; K]) -> Result<Self> {
        Self::new(K, rows.iter().flatten().copied().collect())
    }

    pub fn users(&self) -> usize {
        self.users
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.users + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.users..(row + 1) * self.users]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Adds `delta[j]` modulo 1 to column `j`.
    pub fn with_transmit_delays(&self, delta: &TransmitDelays) -> Result<Self> {
        if delta.len() != self.users {
            return Err(Error::DimensionMismatch { expected: self.users, found: delta.len() });
        }
        let k = self.users;
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, &b)| wrap_unit(b + delta.0[idx % k]))
            .collect();
        Ok(Self { users: k, entries })
    }
}

/// Per-pair DoF and their sum for one network realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DofResult {
    pub per_pair: Vec<f64>,
    pub sum: f64,
}

/// `d[i][j] = (a[i][j] / T + delta[j]) mod 1`.
pub fn normalize(a: &DelayMatrix, delta: &TransmitDelays) -> Result<NormalizedDelayMatrix> {
    let k = a.users;
    if delta.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: delta.len() });
    }
    let entries = a
        .entries
        .iter()
        .enumerate()
        .map(|(idx, &v)| wrap_unit(v / a.slot + delta.0[idx % k]))
        .collect();
    Ok(NormalizedDelayMatrix { users: k, entries })
}

pub fn pair_dof(d: &NormalizedDelayMatrix, pair: usize, rho: DutyCycle) -> Result<f64> {
    if pair >= d.users {
        return Err(Error::IndexOutOfRange { index: pair, len: d.users });
    }
    Ok(pair_dof_row(d.row(pair), pair, rho.value()))
}

pub fn sum_dof(d: &NormalizedDelayMatrix, rho: DutyCycle) -> DofResult {
    let per_pair: Vec<f64> = (0..d.users).map(|i| pair_dof_row(d.row(i), i, rho.value())).collect();
    let sum = per_pair.iter().sum();
    DofResult { per_pair, sum }
}

/// DoF of the pair whose receiver sees the burst starts in `row`, the
/// desired one at index `own`.
#[inline]
pub(crate) fn pair_dof_row(row: &[f64], own: usize, rho: f64) -> f64 {
    let desired = Arc::new_unchecked(row[own], rho);
    let mut blockers: smallvec::SmallVec<[Arc; 4]> = smallvec::SmallVec::new();
    for (j, &start) in row.iter().enumerate() {
        if j != own {
            blockers.push(Arc::new_unchecked(start, rho));
        }
    }
    uncovered_measure(&desired, &blockers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rho(v: f64) -> DutyCycle {
        DutyCycle::permissive(v, 3).unwrap()
    }

    fn perfect_ia() -> NormalizedDelayMatrix {
        NormalizedDelayMatrix::from_rows([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]]).unwrap()
    }

    /// Per-pair grid oracle, independent of the sweep.
    fn grid_pair(row: &[f64], own: usize, rho: f64) -> f64 {
        let n = 200_000usize;
        let h = rho / n as f64;
        let inside = |start: f64, x: f64| (x - start).rem_euclid(1.0) < rho;
        (0..n)
            .filter(|&k| {
                let x = (row[own] + (k as f64 + 0.5) * h).rem_euclid(1.0);
                !row.iter().enumerate().any(|(j, &s)| j != own && inside(s, x))
            })
            .count() as f64
            * h
    }

    #[test]
    fn duty_cycle_bounds() {
        assert!(DutyCycle::new(1.0 / 3.0, 3).is_err());
        assert!(DutyCycle::permissive(1.0 / 3.0, 3).is_ok());
        assert!(DutyCycle::new(0.5, 3).is_ok());
        assert!(DutyCycle::new(0.51, 3).is_err());
        assert!(DutyCycle::new(0.3, 3).is_err());
        assert!(DutyCycle::new(0.3, 2).is_err());
        assert!(DutyCycle::new(0.3, 4).is_ok());
    }

    #[test]
    fn normalize_modulo() {
        let a = DelayMatrix::new(2, vec![2.5e-4, 2.5e-4, 1e-4, 1e-4], 1e-4).unwrap();
        let b = normalize(&a, &TransmitDelays::zeros(2)).unwrap();
        assert!((b.get(0, 0) - 0.5).abs() < 1e-12);
        assert_eq!(b.get(1, 0), 0.0);
        let d = normalize(&a, &TransmitDelays::new(vec![0.25, 0.0]).unwrap()).unwrap();
        assert!((d.get(0, 0) - 0.75).abs() < 1e-12);
        assert!(normalize(&a, &TransmitDelays::zeros(3)).is_err());
    }

    #[test]
    fn delay_matrix_validation() {
        assert!(DelayMatrix::new(2, vec![1.0, 1.0, 1.0], 1e-3).is_err());
        assert!(DelayMatrix::new(2, vec![1.0, 0.0, 1.0, 1.0], 1e-3).is_err());
        assert!(DelayMatrix::new(2, vec![1.0, f64::INFINITY, 1.0, 1.0], 1e-3).is_err());
        assert!(DelayMatrix::new(2, vec![1.0; 4], 0.0).is_err());
        assert!(TransmitDelays::new(vec![0.0, 1.0]).is_err());
        assert!(NormalizedDelayMatrix::new(2, vec![0.0, 0.1, 0.2, 1.0]).is_err());
    }

    #[test]
    fn perfect_alignment_gives_half_per_pair() {
        let r = sum_dof(&perfect_ia(), rho(0.5));
        assert_eq!(r.per_pair, vec![0.5, 0.5, 0.5]);
        assert_eq!(r.sum, 1.5);
    }

    #[test]
    fn full_overlap_gives_zero() {
        let d = NormalizedDelayMatrix::new(3, vec![0.0; 9]).unwrap();
        let r = sum_dof(&d, rho(0.5));
        assert_eq!(r.per_pair, vec![0.0; 3]);
        assert_eq!(r.sum, 0.0);
    }

    #[test]
    fn fragmented_row() {
        let d = NormalizedDelayMatrix::from_rows([[0.2, 0.0, 0.55], [0.0; 3], [0.0; 3]]).unwrap();
        let got = pair_dof(&d, 0, rho(0.4)).unwrap();
        let oracle = grid_pair(d.row(0), 0, 0.4);
        assert!((oracle - 0.15).abs() < 1e-4);
        assert!((got - 0.15).abs() < 1e-12);
        assert!(matches!(pair_dof(&d, 3, rho(0.4)), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn sum_matches_per_pair_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let d = NormalizedDelayMatrix::new(3, (0..9).map(|_| rng.random::<f64>()).collect()).unwrap();
            let r = sum_dof(&d, rho(0.43));
            let oracle: f64 = (0..3).map(|i| grid_pair(d.row(i), i, 0.43)).sum();
            assert!((r.sum - oracle).abs() < 3e-5, "{} vs {}", r.sum, oracle);
        }
    }

    fn matrix_strategy() -> impl Strategy<Value = NormalizedDelayMatrix> {
        prop::collection::vec(0.0..1.0f64, 9).prop_map(|v| NormalizedDelayMatrix::new(3, v).unwrap())
    }

    proptest! {
        #[test]
        fn row_shift_invariant(d in matrix_strategy(), row in 0usize..3, c in 0.0..1.0f64, r in 0.34..=0.5f64) {
            let mut e = d.entries().to_vec();
            for v in &mut e[row * 3..row * 3 + 3] {
                *v = wrap_unit(*v + c);
            }
            let shifted = NormalizedDelayMatrix::new(3, e).unwrap();
            let a = sum_dof(&d, rho(r));
            let b = sum_dof(&shifted, rho(r));
            for i in 0..3 {
                prop_assert!((a.per_pair[i] - b.per_pair[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn normalize_commutes_with_column_shift(raw in prop::collection::vec(0.01..10.0f64, 9), delta in prop::collection::vec(0.0..1.0f64, 3)) {
            let slot = 0.37;
            let a = DelayMatrix::new(3, raw, slot).unwrap();
            let delta = TransmitDelays::new(delta).unwrap();
            let direct = sum_dof(&normalize(&a, &delta).unwrap(), rho(0.45));
            let b = normalize(&a, &TransmitDelays::zeros(3)).unwrap();
            let via_b = sum_dof(&b.with_transmit_delays(&delta).unwrap(), rho(0.45));
            prop_assert!((direct.sum - via_b.sum).abs() < 1e-9);
        }

        #[test]
        fn global_transmit_shift_invariant(d in matrix_strategy(), delta in prop::collection::vec(0.0..1.0f64, 3), c in 0.0..1.0f64) {
            let base = TransmitDelays::new(delta.clone()).unwrap();
            let moved = TransmitDelays::new(delta.iter().map(|x| wrap_unit(x + c)).collect()).unwrap();
            let a = sum_dof(&d.with_transmit_delays(&base).unwrap(), rho(0.4));
            let b = sum_dof(&d.with_transmit_delays(&moved).unwrap(), rho(0.4));
            for i in 0..3 {
                prop_assert!((a.per_pair[i] - b.per_pair[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn per_pair_bounds(d in matrix_strategy(), r in 0.34..=0.5f64) {
            let res = sum_dof(&d, rho(r));
            let lower = (r - 2.0 * r).max(0.0);
            for &a in &res.per_pair {
                prop_assert!(a >= lower && a <= r);
            }
            prop_assert!((res.sum - res.per_pair.iter().sum::<f64>()).abs() < 1e-15);
            prop_assert!(res.sum <= 3.0 * r + 1e-12);
        }
    }
}
