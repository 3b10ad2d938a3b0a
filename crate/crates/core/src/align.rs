//! Central optimization of the transmit delays of three coordinated
//! transmitters.
//!
//! The sum DoF only depends on delay differences, so the first transmitter
//! is pinned to a gauge value and the other two are searched exhaustively
//! on a coarse grid. The best grid point is then polished by coordinate
//! descent on a finer lattice; moving the pinned transmitter is expressed
//! as a joint move of the other two.

use crate::circle::{wrap_unit, MERGE_EPS};
use crate::dof::{sum_dof, DofResult, DutyCycle, NormalizedDelayMatrix, TransmitDelays};
use crate::error::{Error, Result};
use crate::mc::{run_trials, sample_uncoordinated, trial_rng, EmpiricalDistribution, ExperimentConfig, Mode, OptimizerSettings};

/// Strict-improvement threshold; keeps float noise from breaking ties.
const IMPROVE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub grid: usize,
    pub refine_steps: usize,
    pub evaluations: u64,
    /// Incumbent value after the grid search and after every accepted move.
    pub best_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentSolution {
    pub delta: TransmitDelays,
    pub dof: DofResult,
    pub diagnostics: Diagnostics,
}

/// Uncovered part of a burst `[0, rho)` hit by two bursts of the same
/// length starting at offsets `o1`, `o2` in `[0, 1)`.
///
/// With `rho <= 1/2` an equal-length blocker overlaps the desired burst
/// either in a suffix `[o, rho)` or in a prefix `[0, o + rho - 1)`, never in
/// both, which leaves a handful of cases.
#[inline]
fn equal_bursts_uncovered(rho: f64, o1: f64, o2: f64) -> f64 {
    #[derive(Clone, Copy)]
    enum Hit {
        Suffix(f64),
        Prefix(f64),
        Miss,
    }
    let hit = |o: f64| {
        if o < rho {
            Hit::Suffix(o)
        } else if o + rho > 1.0 {
            Hit::Prefix(o + rho - 1.0)
        } else {
            Hit::Miss
        }
    };
    match (hit(o1), hit(o2)) {
        (Hit::Miss, Hit::Miss) => rho,
        (Hit::Suffix(s), Hit::Miss) | (Hit::Miss, Hit::Suffix(s)) => s,
        (Hit::Prefix(e), Hit::Miss) | (Hit::Miss, Hit::Prefix(e)) => rho - e,
        (Hit::Suffix(a), Hit::Suffix(b)) => a.min(b),
        (Hit::Prefix(a), Hit::Prefix(b)) => rho - a.max(b),
        (Hit::Prefix(e), Hit::Suffix(s)) | (Hit::Suffix(s), Hit::Prefix(e)) => {
            if e >= s - MERGE_EPS {
                0.0
            } else {
                s - e
            }
        }
    }
}

#[inline]
fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Burst offsets relative to each receiver's own burst, `b[i][j] - b[i][i]`.
struct Offsets([[f64; 3]; 3]);

impl Offsets {
    fn new(b: &NormalizedDelayMatrix) -> Self {
        let mut c = [[0.0; 3]; 3];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = b.get(i, j) - b.get(i, i);
            }
        }
        Self(c)
    }

    /// Sum DoF for transmit delays `delta`; requires `rho <= 1/2`.
    #[inline]
    fn objective(&self, rho: f64, delta: &[f64; 3]) -> f64 {
        let c = &self.0;
        let o = |i: usize, j: usize| frac(c[i][j] + delta[j] - delta[i]);
        equal_bursts_uncovered(rho, o(0, 1), o(0, 2))
            + equal_bursts_uncovered(rho, o(1, 0), o(1, 2))
            + equal_bursts_uncovered(rho, o(2, 0), o(2, 1))
    }
}

/// Reference objective through the general sweep.
#[cfg(test)]
fn objective(b: &NormalizedDelayMatrix, rho: f64, delta: &[f64; 3]) -> f64 {
    let d = b.with_transmit_delays(&TransmitDelays::new(delta.to_vec()).unwrap()).unwrap();
    crate::dof::sum_dof(&d, DutyCycle::permissive(rho, 3).unwrap()).sum
}

pub fn optimize_delays(
    b: &NormalizedDelayMatrix,
    rho: DutyCycle,
    settings: &OptimizerSettings,
) -> Result<AlignmentSolution> {
    if b.users() != 3 {
        return Err(Error::UnsupportedUsers(b.users()));
    }
    settings.validate()?;
    let r = rho.value();
    let offsets = Offsets::new(b);
    let g = settings.grid;
    let gauge = settings.gauge;
    let mut evaluations = 0u64;

    // Row-major over (delta2, delta3) with strict improvement keeps the
    // lexicographically smallest maximizer.
    let mut best = [gauge, 0.0, 0.0];
    let mut best_val = f64::NEG_INFINITY;
    for i2 in 0..g {
        let d2 = i2 as f64 / g as f64;
        for i3 in 0..g {
            let d3 = i3 as f64 / g as f64;
            let cand = [gauge, d2, d3];
            let v = offsets.objective(r, &cand);
            evaluations += 1;
            if v > best_val + IMPROVE_EPS {
                best_val = v;
                best = cand;
            }
        }
    }

    let mut history = vec![best_val];
    let h = 1.0 / settings.fine_resolution as f64;
    let radius = settings.fine_resolution.div_ceil(g) as i64;
    let mut refine_steps = 0;
    for _ in 0..settings.refine_iterations {
        let mut improved = false;
        // 0: delta2, 1: delta3, 2: both (i.e. moving the pinned transmitter)
        for axis in 0..3 {
            let origin = best;
            let mut axis_best = best;
            let mut axis_val = best_val;
            for k in -radius..=radius {
                if k == 0 {
                    continue;
                }
                let step = k as f64 * h;
                let mut cand = origin;
                if axis != 1 {
                    cand[1] = wrap_unit(origin[1] + step);
                }
                if axis != 0 {
                    cand[2] = wrap_unit(origin[2] + step);
                }
                let v = offsets.objective(r, &cand);
                evaluations += 1;
                if v > axis_val + IMPROVE_EPS {
                    axis_val = v;
                    axis_best = cand;
                }
            }
            if axis_val > best_val {
                best = axis_best;
                best_val = axis_val;
                history.push(best_val);
                improved = true;
            }
        }
        refine_steps += 1;
        if !improved {
            break;
        }
    }

    let delta = TransmitDelays::new(best.to_vec())?;
    let dof = sum_dof(&b.with_transmit_delays(&delta)?, rho);
    Ok(AlignmentSolution {
        delta,
        dof,
        diagnostics: Diagnostics { grid: g, refine_steps, evaluations, best_history: history },
    })
}

/// Coordinated experiment on i.i.d. uniform matrices.
pub fn run_coordinated(config: &ExperimentConfig) -> Result<EmpiricalDistribution> {
    config.expect_mode(Mode::Coordinated)?;
    let seed = config.master_seed;
    let rho = config.rho;
    let settings = config.optimizer;
    run_trials(config.trials, config.workers, |t| {
        let b = sample_uncoordinated(&mut trial_rng(seed, t));
        optimize_delays(&b, rho, &settings).expect("validated settings").dof.sum
    })
}
