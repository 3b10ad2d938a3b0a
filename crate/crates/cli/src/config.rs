//! Experiment configuration: TOML file, command-line overrides, resolution.
//!
//! ```toml
//! mode = "satellite"
//! rho = 0.43
//! trials = 10000
//! seed = 1
//! grid = 128
//! refine = 16
//! T_seconds = 25e-6
//! sat_longitudes = [24.5, 25.0, 25.5]
//! ground_lat_range = [35.0, 55.0]
//! ground_lon_range = [-10.0, 20.0]
//! workers = 4
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use tia_core::dof::DutyCycle;
use tia_core::geo::GeoScenario;
use tia_core::mc::{ExperimentConfig, Mode, OptimizerSettings, DEFAULT_COORDINATED_TRIALS, DEFAULT_UNCOORDINATED_TRIALS};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SLOT: f64 = 25e-6;
pub const DEFAULT_SATELLITE_RHO: f64 = 0.43;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Uncoordinated,
    Coordinated,
    Satellite,
}

impl From<ModeName> for Mode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Uncoordinated => Mode::Uncoordinated,
            ModeName::Coordinated => Mode::Coordinated,
            ModeName::Satellite => Mode::Satellite,
        }
    }
}

/// Contents of a configuration file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<ModeName>,
    pub rho: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub refine: Option<usize>,
    #[serde(rename = "T_seconds")]
    pub t_seconds: Option<f64>,
    pub sat_longitudes: Option<Vec<f64>>,
    pub ground_lat_range: Option<[f64; 2]>,
    pub ground_lon_range: Option<[f64; 2]>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: cannot read config: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Flag values; anything set here wins over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub rho: Option<f64>,
    pub workers: Option<usize>,
}

/// Fully resolved settings, serialized into the run manifest with the same
/// key names as the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub mode: ModeName,
    pub rho: f64,
    pub trials: u64,
    pub seed: u64,
    pub grid: usize,
    pub refine: usize,
    #[serde(rename = "T_seconds", skip_serializing_if = "Option::is_none")]
    pub t_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sat_longitudes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_lat_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_lon_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {msg}"))
}

pub fn parse_rho(rho: f64) -> Result<DutyCycle, CliError> {
    DutyCycle::permissive(rho, 3).map_err(|_| field_error("rho", format!("{rho} outside [1/3, 1/2]")))
}

impl Resolved {
    /// Merges file and flags for `mode`. A file naming a different mode is
    /// rejected.
    pub fn resolve(mode: ModeName, file: &FileConfig, flags: &Overrides) -> Result<Self, CliError> {
        if let Some(m) = file.mode {
            if m != mode {
                return Err(field_error("mode", format!("{m:?} does not match the {mode:?} command")));
            }
        }
        let satellite = mode == ModeName::Satellite;
        let default_trials = match mode {
            ModeName::Uncoordinated => DEFAULT_UNCOORDINATED_TRIALS,
            _ => DEFAULT_COORDINATED_TRIALS,
        };
        let defaults = OptimizerSettings::default();
        let default_rho = if satellite { Some(DEFAULT_SATELLITE_RHO) } else { None };
        let rho = flags
            .rho
            .or(file.rho)
            .or(default_rho)
            .ok_or_else(|| field_error("rho", "missing (set it in the config or pass --rho)"))?;

        if !satellite {
            let geo_keys = [
                ("T_seconds", file.t_seconds.is_some()),
                ("sat_longitudes", file.sat_longitudes.is_some()),
                ("ground_lat_range", file.ground_lat_range.is_some()),
                ("ground_lon_range", file.ground_lon_range.is_some()),
            ];
            if let Some((key, _)) = geo_keys.iter().find(|(_, set)| *set) {
                return Err(field_error(key, "only valid in satellite mode"));
            }
        }
        let europe = GeoScenario::europe(DEFAULT_SLOT);
        let resolved = Self {
            mode,
            rho,
            trials: flags.trials.or(file.trials).unwrap_or(default_trials),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            grid: file.grid.unwrap_or(defaults.grid),
            refine: file.refine.unwrap_or(defaults.refine_iterations),
            t_seconds: satellite.then(|| file.t_seconds.unwrap_or(DEFAULT_SLOT)),
            sat_longitudes: satellite
                .then(|| file.sat_longitudes.clone().unwrap_or_else(|| europe.satellite_longitudes.clone())),
            ground_lat_range: satellite
                .then(|| file.ground_lat_range.unwrap_or([europe.latitude_range.0, europe.latitude_range.1])),
            ground_lon_range: satellite
                .then(|| file.ground_lon_range.unwrap_or([europe.longitude_range.0, europe.longitude_range.1])),
            workers: flags.workers.or(file.workers),
        };
        resolved.validate()?;
        Ok(resolved)
    }

    fn validate(&self) -> Result<(), CliError> {
        parse_rho(self.rho)?;
        if self.trials == 0 {
            return Err(field_error("trials", "must be at least 1"));
        }
        if self.grid < 8 {
            return Err(field_error("grid", format!("{} is below the minimum of 8", self.grid)));
        }
        if self.grid > OptimizerSettings::default().fine_resolution {
            return Err(field_error("grid", "must not exceed the refinement resolution 4096"));
        }
        if self.workers == Some(0) {
            return Err(field_error("workers", "must be at least 1"));
        }
        if let Some(t) = self.t_seconds {
            if !(t.is_finite() && t > 0.0) {
                return Err(field_error("T_seconds", format!("{t} must be a positive number of seconds")));
            }
        }
        if let Some(lons) = &self.sat_longitudes {
            if lons.len() != 3 {
                return Err(field_error("sat_longitudes", format!("expected 3 satellites, got {}", lons.len())));
            }
        }
        if let Some(scenario) = self.scenario() {
            scenario.validate().map_err(|e| field_error("scenario", e))?;
        }
        Ok(())
    }

    pub fn experiment(&self) -> ExperimentConfig {
        let rho = parse_rho(self.rho).expect("validated");
        let mut cfg = ExperimentConfig::new(self.mode.into(), rho, self.trials, self.seed);
        cfg.optimizer = OptimizerSettings { grid: self.grid, refine_iterations: self.refine, ..OptimizerSettings::default() };
        cfg.workers = self.workers;
        cfg
    }

    /// Satellite scenario, `None` outside satellite mode.
    pub fn scenario(&self) -> Option<GeoScenario> {
        let slot = self.t_seconds?;
        let mut sc = GeoScenario::europe(slot);
        if let Some(l) = &self.sat_longitudes {
            sc.satellite_longitudes = l.clone();
        }
        if let Some([a, b]) = self.ground_lat_range {
            sc.latitude_range = (a, b);
        }
        if let Some([a, b]) = self.ground_lon_range {
            sc.longitude_range = (a, b);
        }
        Some(sc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = r#"
mode = "satellite"
rho = 0.43
trials = 100
seed = 9
grid = 64
refine = 4
T_seconds = 2.5e-4
sat_longitudes = [24.5, 25.0, 25.5]
ground_lat_range = [35.0, 55.0]
ground_lon_range = [-10.0, 20.0]
workers = 2
"#;
        let f = FileConfig::parse(text, "test").unwrap();
        let r = Resolved::resolve(ModeName::Satellite, &f, &Overrides::default()).unwrap();
        assert_eq!(r.t_seconds, Some(2.5e-4));
        assert_eq!(r.grid, 64);
        assert_eq!(r.scenario().unwrap().slot, 2.5e-4);
        assert_eq!(r.experiment().optimizer.refine_iterations, 4);
    }

    #[test]
    fn flags_override_file() {
        let f = FileConfig::parse("rho = 0.4\ntrials = 5\nseed = 3\n", "t").unwrap();
        let flags = Overrides { seed: Some(8), trials: None, rho: Some(0.45), workers: Some(2) };
        let r = Resolved::resolve(ModeName::Coordinated, &f, &flags).unwrap();
        assert_eq!((r.rho, r.trials, r.seed, r.workers), (0.45, 5, 8, Some(2)));
    }

    #[test]
    fn defaults_per_mode() {
        let f = FileConfig::default();
        let flags = Overrides { rho: Some(0.5), ..Overrides::default() };
        let u = Resolved::resolve(ModeName::Uncoordinated, &f, &flags).unwrap();
        assert_eq!(u.trials, 1_000_000);
        assert!(u.scenario().is_none());
        let s = Resolved::resolve(ModeName::Satellite, &f, &Overrides::default()).unwrap();
        assert_eq!(s.rho, 0.43);
        assert_eq!(s.trials, 10_000);
        assert_eq!(s.t_seconds, Some(25e-6));
    }

    #[test]
    fn errors_name_the_field() {
        let err = FileConfig::parse("rho = 0.4\nbogus = 1\n", "cfg.toml").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        assert!(err.to_string().contains("line 2"), "{err}");

        let f = FileConfig::parse("rho = 0.7\n", "t").unwrap();
        let err = Resolved::resolve(ModeName::Coordinated, &f, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("`rho`"));

        let f = FileConfig::parse("mode = \"satellite\"\nrho = 0.4\n", "t").unwrap();
        let err = Resolved::resolve(ModeName::Coordinated, &f, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("`mode`"));

        let f = FileConfig::parse("rho = 0.4\nT_seconds = 1e-5\n", "t").unwrap();
        assert!(Resolved::resolve(ModeName::Coordinated, &f, &Overrides::default()).is_err());

        let f = FileConfig::parse("rho = 0.4\ngrid = 4\n", "t").unwrap();
        let err = Resolved::resolve(ModeName::Coordinated, &f, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("`grid`"));

        let f = FileConfig::parse("sat_longitudes = [25.0, 25.0, 24.0]\n", "t").unwrap();
        assert!(Resolved::resolve(ModeName::Satellite, &f, &Overrides::default()).is_err());

        assert!(Resolved::resolve(ModeName::Uncoordinated, &FileConfig::default(), &Overrides::default()).is_err());
    }

    #[test]
    fn accepts_boundary_rho() {
        assert!(parse_rho(1.0 / 3.0).is_ok());
        assert!(parse_rho(0.3).is_err());
    }
}
