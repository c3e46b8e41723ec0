//! Turns a [`RunConfig`] into executed trials and persisted run records.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use extra_newton::baselines::{run_baseline, BaselineKind};
use extra_newton::constraints::FeasibleSet;
use extra_newton::data_io::{
    write_run_record, AlgorithmSpec, Preprocessing, RunConfig, RunMeta, RunRecord, SeriesRow,
};
use extra_newton::extra_newton::{ExtraNewton, Init, RunOutput, SolverOptions, StopRule};
use extra_newton::oracles::TaylorFactor;
use extra_newton::problems::{reference_optimum, Objective};
use extra_newton::{Error, Result, Vector};

/// A config instantiated and ready to execute: objective, set, and the
/// reference optimum shared by every trial.
pub struct PreparedRun {
    pub config: RunConfig,
    pub objective: Box<dyn Objective>,
    pub set: FeasibleSet,
    pub preprocessing: Preprocessing,
    pub x_star: Vector,
    pub f_star: f64,
    pub n_samples: Option<u64>,
}

pub fn prepare(config: RunConfig) -> Result<PreparedRun> {
    config.validate()?;
    config.check_paths()?;
    let (objective, preprocessing) = config.problem.build()?;
    let set = config.set.build(objective.dim())?;
    let n_samples = objective.as_finite_sum().map(|fs| fs.num_samples() as u64);
    let (x_star, f_star) = reference_optimum(objective.as_ref(), &set, config.reference_tol)?;
    Ok(PreparedRun {
        config,
        objective,
        set,
        preprocessing,
        x_star,
        f_star,
        n_samples,
    })
}

/// The seed used by trial `k`.
pub fn trial_seed(config: &RunConfig, trial: u64) -> u64 {
    config.seed.wrapping_add(trial)
}

fn initial_point(config: &RunConfig) -> Init {
    match &config.x_init {
        Some(coords) => Init::Point(Vector::from_vec(coords.clone())),
        None => Init::Auto,
    }
}

/// Executes one trial and converts the trace into a persistable record.
pub fn execute_trial(prep: &PreparedRun, trial: u64) -> Result<(RunRecord, RunOutput)> {
    let config = &prep.config;
    let seed = trial_seed(config, trial);
    let oracle_cfg = config.oracle.to_config(seed);
    let stop = config.stop_gap.map(|gap_tol| StopRule {
        f_star: prep.f_star,
        gap_tol,
    });
    let output = match &config.algorithm {
        AlgorithmSpec::ExtraNewton {
            p,
            gamma,
            gamma0,
            taylor_factor,
        } => {
            let opts = SolverOptions {
                p: *p,
                gamma: *gamma,
                gamma0: *gamma0,
                taylor: TaylorFactor::new(*taylor_factor)?,
                ..SolverOptions::default()
            };
            ExtraNewton::new(
                prep.objective.as_ref(),
                &prep.set,
                oracle_cfg,
                opts,
                initial_point(config),
            )?
            .run(config.horizon, stop)?
        }
        other => {
            let kind = baseline_kind(other, &prep.set)?;
            run_baseline(
                &kind,
                prep.objective.as_ref(),
                &prep.set,
                oracle_cfg,
                config.horizon,
                initial_point(config),
            )?
        }
    };
    let series: Vec<SeriesRow> = output
        .trace
        .records
        .iter()
        .map(|rec| SeriesRow {
            t: rec.t,
            f_gap: rec.f_at_xbar - prep.f_star,
            gamma: rec.gamma,
            residual: rec.residual,
            grad_calls: rec.grad_calls,
            hess_calls: rec.hess_calls,
            wall_ms: rec.wall.as_secs_f64() * 1e3,
        })
        .collect();
    let meta = RunMeta {
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        timestamp: utc_timestamp(),
        f_star: prep.f_star,
        x_star: prep.x_star.iter().copied().collect(),
        preprocessing: prep.preprocessing.clone(),
        diverged: output.diverged,
        rows: series.len() as u64,
        n_samples: prep.n_samples,
    };
    let record = RunRecord {
        config: config.clone(),
        meta,
        series,
        checks: Vec::new(),
    };
    Ok((record, output))
}

fn baseline_kind(spec: &AlgorithmSpec, _set: &FeasibleSet) -> Result<BaselineKind> {
    Ok(match spec {
        AlgorithmSpec::ProjGrad { eta } => BaselineKind::ProjGrad { eta: *eta },
        AlgorithmSpec::NesterovAgd { eta } => BaselineKind::NesterovAgd { eta: *eta },
        AlgorithmSpec::AdaptiveExtraGrad { gamma, gamma0 } => BaselineKind::AdaptiveExtraGrad {
            gamma: *gamma,
            gamma0: *gamma0,
        },
        AlgorithmSpec::RegNewton { l_hat } => BaselineKind::RegularizedNewton { l_hat: *l_hat },
        AlgorithmSpec::ExtraNewton { .. } => {
            return Err(Error::InvalidArgument(
                "extra_newton is not a baseline".into(),
            ))
        }
    })
}

/// Resolves the output root: explicit config dir, else `$EXTRA_NEWTON_OUT`,
/// else `./runs`, suffixed with the run name.
pub fn resolve_out_dir(config: &RunConfig, name: &str) -> PathBuf {
    if let Some(dir) = &config.out_dir {
        return dir.clone();
    }
    let root = std::env::var_os("EXTRA_NEWTON_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(name)
}

pub fn trial_dir(out_dir: &Path, trial: u64) -> PathBuf {
    out_dir.join(format!("trial_{trial:03}"))
}

/// Summary of one executed trial.
pub struct TrialOutcome {
    pub dir: PathBuf,
    pub trial: u64,
    pub final_gap: f64,
    pub final_gamma: f64,
    pub diverged: bool,
}

/// Runs every trial (fanning out over `jobs` threads), persisting one record
/// per trial under `out_dir/trial_NNN`.
pub fn run_all(prep: &PreparedRun, out_dir: &Path, jobs: usize) -> Result<Vec<TrialOutcome>> {
    let trials: Vec<u64> = (0..prep.config.trials).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<Result<TrialOutcome>> = pool.install(|| {
        use rayon::prelude::*;
        trials
            .par_iter()
            .map(|&trial| {
                let (record, output) = execute_trial(prep, trial)?;
                let dir = trial_dir(out_dir, trial);
                write_run_record(&record, &dir)?;
                let last = record.series.last();
                Ok(TrialOutcome {
                    dir,
                    trial,
                    final_gap: last.map_or(f64::NAN, |r| r.f_gap),
                    final_gamma: last.map_or(f64::NAN, |r| r.gamma),
                    diverged: output.diverged,
                })
            })
            .collect()
    });
    results.into_iter().collect()
}

/// `YYYY-MM-DDTHH:MM:SSZ` from the system clock (civil-from-days algorithm).
pub fn utc_timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let (h, m, s) = (rem / 3600, (rem / 60) % 60, rem % 60);
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let mon = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if mon <= 2 { y + 1 } else { y };
    format!("{y:04}-{mon:02}-{d:02}T{h:02}:{m:02}:{s:02}Z")
}
