use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use tia_core::align::run_coordinated;
use tia_core::analytic::{pdf_phi, prob_exceeds_one};
use tia_core::geo::run_satellite;
use tia_core::mc::{run_uncoordinated, EmpiricalDistribution};

use crate::config::{parse_rho, FileConfig, ModeName, Overrides, Resolved};
use crate::output::{write_all, CsvFile, RunManifest};
use crate::CliError;

const PHI_STEP: f64 = 1e-3;

fn manifest<C: Serialize>(
    command: &str,
    config: C,
    seed: Option<u64>,
    started: Instant,
    files: &[CsvFile],
    summary: BTreeMap<String, Value>,
) -> RunManifest<C> {
    RunManifest {
        command: command.to_string(),
        config,
        master_seed: seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs: files.iter().map(|f| (f.name.clone(), f.digest())).collect(),
        summary,
    }
}

#[derive(Serialize)]
struct AnalyticConfig {
    rho: f64,
}

/// Closed-form CCDF of the sum DoF on a 1e-3 grid plus its atoms.
pub fn cmd_analytic(rho: f64, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let duty = parse_rho(rho)?;
    let law = pdf_phi(duty);
    let end = 3.0 * rho;

    let last = (end / PHI_STEP + 1e-9).floor() as u64;
    let mut grid: Vec<f64> = (0..=last).map(|k| k as f64 / 1000.0).collect();
    if end - grid[grid.len() - 1] > 1e-12 {
        grid.push(end);
    }
    let ccdf = CsvFile::new(
        "ccdf_analytic.csv",
        &["phi", "ccdf_analytic"],
        grid.iter().map(|&x| vec![Some(x), Some(law.ccdf(x))]),
    );
    let atoms = CsvFile::new(
        "atoms.csv",
        &["location", "weight"],
        law.atoms().iter().map(|a| vec![Some(a.location), Some(a.weight)]),
    );

    let mut summary = BTreeMap::new();
    summary.insert("p_exceed_1".into(), json!(prob_exceeds_one(duty)));
    summary.insert("mean".into(), json!(law.mean()));
    let files = vec![ccdf, atoms];
    let m = manifest("analytic", AnalyticConfig { rho }, None, started, &files, summary);
    write_all(out, &files, &m)
}

fn simulate(cfg: &Resolved) -> Result<EmpiricalDistribution, CliError> {
    let exp = cfg.experiment();
    let res = match cfg.mode {
        ModeName::Uncoordinated => run_uncoordinated(&exp),
        ModeName::Coordinated => run_coordinated(&exp),
        ModeName::Satellite => run_satellite(&exp, &cfg.scenario().expect("satellite mode has a scenario")),
    };
    res.map_err(|e| CliError::Config(e.to_string()))
}

fn optimizer_budget(cfg: &Resolved, summary: &mut BTreeMap<String, Value>) {
    if cfg.mode == ModeName::Uncoordinated {
        return;
    }
    let exp = cfg.experiment();
    let radius = exp.optimizer.fine_resolution.div_ceil(exp.optimizer.grid) as u64;
    summary.insert("grid_evaluations_per_trial".into(), json!((exp.optimizer.grid as u64).pow(2)));
    summary.insert(
        "max_refine_evaluations_per_trial".into(),
        json!(exp.optimizer.refine_iterations as u64 * 3 * 2 * radius),
    );
}

pub fn load_file(config: Option<&Path>) -> Result<FileConfig, CliError> {
    config.map_or_else(|| Ok(FileConfig::default()), FileConfig::load)
}

/// Empirical CCDF of the sum DoF for one experiment mode.
pub fn cmd_empirical(mode: ModeName, file: &FileConfig, flags: &Overrides, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let cfg = Resolved::resolve(mode, file, flags)?;
    let dist = simulate(&cfg)?;

    let csv = CsvFile::new(
        "ccdf_empirical.csv",
        &["phi", "ccdf_empirical"],
        dist.distinct_ccdf().into_iter().map(|(x, p)| vec![Some(x), Some(p)]),
    );
    let mut summary = BTreeMap::new();
    summary.insert("trials".into(), json!(dist.count()));
    summary.insert("p_exceed_1".into(), json!(dist.ccdf_at(1.0)));
    summary.insert("p90".into(), json!(dist.percentile(0.9).expect("0.9 is a valid quantile")));
    summary.insert("mean".into(), json!(dist.mean()));
    summary.insert("min".into(), json!(dist.min()));
    summary.insert("max".into(), json!(dist.max()));
    optimizer_budget(&cfg, &mut summary);

    let files = vec![csv];
    let command = serde_json::to_value(mode).expect("mode serializes");
    let m = manifest(command.as_str().expect("string"), &cfg, Some(cfg.seed), started, &files, summary);
    write_all(out, &files, &m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let bad = |msg: String| CliError::Config(msg);
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(bad(format!("--rho-step {} must be positive", self.step)));
        }
        if self.min > self.max {
            return Err(bad(format!("--rho-min {} exceeds --rho-max {}", self.min, self.max)));
        }
        parse_rho(self.min)?;
        parse_rho(self.max)?;
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        if n > 100_000 {
            return Err(bad("rho sweep has too many points".into()));
        }
        Ok((0..=n).map(|k| (self.min + k as f64 * self.step).min(self.max)).collect())
    }
}

#[derive(Serialize)]
struct SweepConfig<'a> {
    #[serde(flatten)]
    base: &'a Resolved,
    rho_min: f64,
    rho_max: f64,
    rho_step: f64,
}

fn argmax(rows: &[(f64, f64)]) -> Option<(f64, f64)> {
    rows.iter().copied().fold(None, |best, r| match best {
        Some(b) if b.1 >= r.1 => Some(b),
        _ => Some(r),
    })
}

/// `P(phi > 1)` against the duty cycle.
pub fn cmd_rho_sweep(
    mode: ModeName,
    range: SweepRange,
    file: &FileConfig,
    flags: &Overrides,
    out: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let rhos = range.points()?;
    let mut flags = flags.clone();
    flags.rho = Some(range.min);
    let base = Resolved::resolve(mode, file, &flags)?;

    let mut analytic = Vec::new();
    let mut empirical = Vec::new();
    for &rho in &rhos {
        let cfg = Resolved { rho, ..base.clone() };
        let dist = simulate(&cfg)?;
        empirical.push((rho, dist.ccdf_at(1.0)));
        if mode == ModeName::Uncoordinated {
            analytic.push((rho, prob_exceeds_one(parse_rho(rho)?)));
        }
    }

    let csv = CsvFile::new(
        "rho_sweep.csv",
        &["rho", "p_exceed_1_analytic", "p_exceed_1_empirical"],
        empirical
            .iter()
            .enumerate()
            .map(|(i, &(rho, p))| vec![Some(rho), analytic.get(i).map(|a| a.1), Some(p)]),
    );

    let mut summary = BTreeMap::new();
    if let Some((rho, p)) = argmax(&empirical) {
        summary.insert("argmax_rho_empirical".into(), json!(rho));
        summary.insert("max_p_exceed_1_empirical".into(), json!(p));
    }
    if let Some((rho, p)) = argmax(&analytic) {
        summary.insert("argmax_rho_analytic".into(), json!(rho));
        summary.insert("max_p_exceed_1_analytic".into(), json!(p));
    }
    optimizer_budget(&base, &mut summary);

    let files = vec![csv];
    let config = SweepConfig { base: &base, rho_min: range.min, rho_max: range.max, rho_step: range.step };
    let m = manifest("rho-sweep", config, Some(base.seed), started, &files, summary);
    write_all(out, &files, &m)
}
