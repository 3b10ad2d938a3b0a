//! Geostationary multi-satellite scenario.
//!
//! Satellite `j` transmits to ground station `j`; every station also hears
//! the other satellites. Ground stations sit on a spherical Earth, the
//! satellites on a circular equatorial orbit.

use rand::Rng;

use crate::align::optimize_delays;
use crate::dof::{normalize, DelayMatrix, NormalizedDelayMatrix, TransmitDelays};
use crate::error::{Error, Result};
use crate::mc::{run_trials, trial_rng, EmpiricalDistribution, ExperimentConfig, Mode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoConstants {
    /// Geostationary orbit radius, m.
    pub geo_radius: f64,
    /// Mean Earth radius, m.
    pub earth_radius: f64,
    /// m/s.
    pub light_speed: f64,
}

impl Default for GeoConstants {
    fn default() -> Self {
        Self { geo_radius: 42_164_169.0, earth_radius: 6_371_000.0, light_speed: 299_792_458.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoScenario {
    /// Degrees east.
    pub satellite_longitudes: Vec<f64>,
    /// Degrees north, `(min, max)`.
    pub latitude_range: (f64, f64),
    /// Degrees east, `(min, max)`.
    pub longitude_range: (f64, f64),
    /// Slot length T, s.
    pub slot: f64,
    pub constants: GeoConstants,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStation {
    pub latitude: f64,
    pub longitude: f64,
}

impl GeoScenario {
    /// Three satellites 0.5 degrees apart around 25E serving Europe.
    pub fn europe(slot: f64) -> Self {
        Self {
            satellite_longitudes: vec![24.5, 25.0, 25.5],
            latitude_range: (35.0, 55.0),
            longitude_range: (-10.0, 20.0),
            slot,
            constants: GeoConstants::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lons = &self.satellite_longitudes;
        if lons.len() < 2 {
            return Err(Error::InvalidConfig("at least two satellites are required".into()));
        }
        if lons.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidConfig("satellite longitudes must be finite".into()));
        }
        for (i, a) in lons.iter().enumerate() {
            if lons[i + 1..].contains(a) {
                return Err(Error::InvalidConfig(format!("duplicate satellite longitude {a}")));
            }
        }
        let (la, lb) = self.latitude_range;
        let (oa, ob) = self.longitude_range;
        if !(la < lb && la >= -90.0 && lb <= 90.0) {
            return Err(Error::InvalidConfig(format!("degenerate latitude range [{la}, {lb}]")));
        }
        if !(oa < ob && oa.is_finite() && ob.is_finite()) {
            return Err(Error::InvalidConfig(format!("degenerate longitude range [{oa}, {ob}]")));
        }
        if !(self.slot.is_finite() && self.slot > 0.0) {
            return Err(Error::OutOfDomain { what: "slot length", value: self.slot });
        }
        let c = &self.constants;
        if !(c.geo_radius > c.earth_radius && c.earth_radius > 0.0 && c.light_speed > 0.0) {
            return Err(Error::InvalidConfig("inconsistent physical constants".into()));
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.satellite_longitudes.len()
    }

    /// Smallest and largest one-way delay any box position sees from any
    /// satellite, s. The delay is monotone in `cos(lat) cos(dlon)`, so the
    /// extremes sit on box corners unless a satellite's meridian or the
    /// equator crosses the box.
    pub fn delay_bounds(&self) -> (f64, f64) {
        let (la, lb) = self.latitude_range;
        let (oa, ob) = self.longitude_range;
        let mut lats = vec![la, lb];
        if la < 0.0 && lb > 0.0 {
            lats.push(0.0);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &sat in &self.satellite_longitudes {
            let mut lons = vec![oa, ob];
            if oa < sat && sat < ob {
                lons.push(sat);
            }
            for &lat in &lats {
                for &lon in &lons {
                    let d = slant_delay(GroundStation { latitude: lat, longitude: lon }, sat, &self.constants);
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
            }
        }
        (lo, hi)
    }
}

/// Propagation delay from a GEO satellite at `sat_longitude` to `station`, s.
pub fn slant_delay(station: GroundStation, sat_longitude: f64, c: &GeoConstants) -> f64 {
    let lat = station.latitude.to_radians();
    let dlon = (station.longitude - sat_longitude).to_radians();
    let (re, rg) = (c.earth_radius, c.geo_radius);
    let d2 = re * re + rg * rg - 2.0 * re * rg * lat.cos() * dlon.cos();
    d2.sqrt() / c.light_speed
}

/// One uniformly placed station per satellite; latitude then longitude.
pub fn sample_ground_stations<R: Rng + ?Sized>(rng: &mut R, scenario: &GeoScenario) -> Vec<GroundStation> {
    let (la, lb) = scenario.latitude_range;
    let (oa, ob) = scenario.longitude_range;
    (0..scenario.users())
        .map(|_| {
            let latitude = la + (lb - la) * rng.random::<f64>();
            let longitude = oa + (ob - oa) * rng.random::<f64>();
            GroundStation { latitude, longitude }
        })
        .collect()
}

/// `a[i][j]`: delay from satellite `j` to ground station `i`.
pub fn delay_matrix(stations: &[GroundStation], scenario: &GeoScenario) -> Result<DelayMatrix> {
    let k = scenario.users();
    if stations.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: stations.len() });
    }
    let entries = stations
        .iter()
        .flat_map(|&s| scenario.satellite_longitudes.iter().map(move |&sat| (s, sat)))
        .map(|(s, sat)| slant_delay(s, sat, &scenario.constants))
        .collect();
    DelayMatrix::new(k, entries, scenario.slot)
}

/// Normalized matrix B of trial `t`.
pub fn trial_matrix(master_seed: u64, trial: u64, scenario: &GeoScenario) -> Result<NormalizedDelayMatrix> {
    let stations = sample_ground_stations(&mut trial_rng(master_seed, trial), scenario);
    let a = delay_matrix(&stations, scenario)?;
    normalize(&a, &TransmitDelays::zeros(scenario.users()))
}

pub fn run_satellite(config: &ExperimentConfig, scenario: &GeoScenario) -> Result<EmpiricalDistribution> {
    config.expect_mode(Mode::Satellite)?;
    scenario.validate()?;
    if scenario.users() != 3 {
        return Err(Error::UnsupportedUsers(scenario.users()));
    }
    let seed = config.master_seed;
    let rho = config.rho;
    let settings = config.optimizer;
    run_trials(config.trials, config.workers, |t| {
        let b = trial_matrix(seed, t, scenario).expect("validated scenario");
        optimize_delays(&b, rho, &settings).expect("validated settings").dof.sum
    })
}
