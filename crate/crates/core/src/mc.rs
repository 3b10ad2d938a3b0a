//! Seeded Monte Carlo engine.
//!
//! Trial `t` draws from its own ChaCha8 stream: the generator is seeded from
//! the master seed and `t` selects the stream. A trial's result therefore
//! depends only on `(master_seed, t)`, never on which worker ran it, and the
//! final sort makes aggregation order-insensitive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::MixedDistribution;
use crate::circle::MERGE_EPS;
use crate::dof::{sum_dof, DutyCycle, NormalizedDelayMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_UNCOORDINATED_TRIALS: u64 = 1_000_000;
pub const DEFAULT_COORDINATED_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Uncoordinated,
    Coordinated,
    Satellite,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Uncoordinated => "uncoordinated",
            Mode::Coordinated => "coordinated",
            Mode::Satellite => "satellite",
        }
    }
}

/// Settings of the coordinated-delay search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Coarse grid points per transmit delay.
    pub grid: usize,
    /// Maximum coordinate-descent sweeps after the grid search.
    pub refine_iterations: usize,
    /// Step count per slot of the refinement.
    pub fine_resolution: usize,
    /// Delay pinned on the first transmitter.
    pub gauge: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { grid: 128, refine_iterations: 16, fine_resolution: 4096, gauge: 0.0 }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 8 {
            return Err(Error::InvalidConfig(format!("grid resolution {} is below 8", self.grid)));
        }
        if self.fine_resolution < self.grid {
            return Err(Error::InvalidConfig("fine resolution must not be coarser than the grid".into()));
        }
        if !(0.0..1.0).contains(&self.gauge) {
            return Err(Error::OutOfDomain { what: "gauge", value: self.gauge });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub trials: u64,
    pub rho: DutyCycle,
    pub mode: Mode,
    pub optimizer: OptimizerSettings,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, rho: DutyCycle, trials: u64, master_seed: u64) -> Self {
        Self { master_seed, trials, rho, mode, optimizer: OptimizerSettings::default(), workers: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        self.optimizer.validate()
    }

    pub(crate) fn expect_mode(&self, mode: Mode) -> Result<()> {
        if self.mode != mode {
            return Err(Error::InvalidConfig(format!(
                "expected mode {}, got {}",
                mode.name(),
                self.mode.name()
            )));
        }
        self.validate()
    }
}

/// Generator for one trial.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trial` for every index and collects the sorted results, on a
/// dedicated pool when `workers` is set.
pub fn run_trials<F>(trials: u64, workers: Option<usize>, trial: F) -> Result<EmpiricalDistribution>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    let collect = || (0..trials).into_par_iter().map(&trial).collect::<Vec<f64>>();
    let samples = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {n} workers: {e}")))?
            .install(collect),
        None => collect(),
    };
    EmpiricalDistribution::new(samples)
}

/// Three-user matrix of i.i.d. uniform entries, drawn row-major.
pub fn sample_uncoordinated<R: Rng + ?Sized>(rng: &mut R) -> NormalizedDelayMatrix {
    let entries = (0..9).map(|_| rng.random::<f64>()).collect();
    NormalizedDelayMatrix::new(3, entries).expect("uniform draws lie in [0, 1)")
}

pub fn run_uncoordinated(config: &ExperimentConfig) -> Result<EmpiricalDistribution> {
    config.expect_mode(Mode::Uncoordinated)?;
    let rho = config.rho;
    let seed = config.master_seed;
    run_trials(config.trials, config.workers, |t| {
        let d = sample_uncoordinated(&mut trial_rng(seed, t));
        sum_dof(&d, rho).sum
    })
}

/// Sorted sample set with empirical CCDF and quantile queries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidConfig("empirical distribution needs at least one sample".into()));
        }
        if let Some(&bad) = samples.iter().find(|s| s.is_nan()) {
            return Err(Error::OutOfDomain { what: "sample", value: bad });
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Fraction of samples strictly greater than `x`.
    pub fn ccdf_at(&self, x: f64) -> f64 {
        let below_or_eq = self.samples.partition_point(|&s| s <= x);
        (self.samples.len() - below_or_eq) as f64 / self.samples.len() as f64
    }

    /// Fraction of samples greater than or equal to `x`.
    pub fn fraction_at_least(&self, x: f64) -> f64 {
        let below = self.samples.partition_point(|&s| s < x);
        (self.samples.len() - below) as f64 / self.samples.len() as f64
    }

    /// Lower empirical quantile: smallest sample whose rank fraction reaches `q`.
    pub fn percentile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::OutOfDomain { what: "quantile", value: q });
        }
        let n = self.samples.len() as f64;
        let r = q * n;
        // q * n lands a hair above an integer for e.g. q = 0.9
        let rank = if (r - r.round()).abs() < 1e-9 { r.round() } else { r.ceil() };
        let idx = (rank as usize).clamp(1, self.samples.len()) - 1;
        Ok(self.samples[idx])
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let n = self.samples.len() as f64;
        (self.samples.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt()
    }

    /// `(value, P(X > value))` for every distinct sample value.
    pub fn distinct_ccdf(&self) -> Vec<(f64, f64)> {
        let n = self.samples.len();
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            let v = self.samples[i];
            let mut j = i + 1;
            while j < n && self.samples[j] == v {
                j += 1;
            }
            out.push((v, (n - j) as f64 / n as f64));
            i = j;
        }
        out
    }

    /// Kolmogorov-Smirnov distance to a mixed distribution.
    ///
    /// Samples within 1e-12 of an atom are binned onto it, so an atom hit by
    /// rounding noise does not show up as a spurious jump.
    pub fn ks_distance(&self, dist: &MixedDistribution) -> f64 {
        let snap = |x: f64| {
            dist.atoms()
                .iter()
                .find(|a| (a.location - x).abs() <= MERGE_EPS)
                .map_or(x, |a| a.location)
        };
        let mut values: Vec<f64> = self.samples.iter().map(|&s| snap(s)).collect();
        values.sort_unstable_by(f64::total_cmp);

        let n = values.len();
        let mut sup = 0.0f64;
        let mut i = 0;
        while i < n {
            let v = values[i];
            let mut j = i + 1;
            while j < n && values[j] == v {
                j += 1;
            }
            let below = i as f64 / n as f64;
            let upto = j as f64 / n as f64;
            sup = sup.max((below - dist.cdf_left(v)).abs()).max((upto - dist.cdf(v)).abs());
            i = j;
        }
        sup
    }
}
