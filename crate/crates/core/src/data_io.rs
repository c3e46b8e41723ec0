//! LIBSVM-format parsing, experiment configuration files, and run-record
//! persistence.
//!
//! A persisted run record is a directory holding three files:
//! `config.json` (config echo + run metadata), `series.csv` (fixed header
//! [`SERIES_HEADER`]), and `checks.json` (reports from the diagnostics
//! checks). All structured files carry a `format_version` field.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constraints::FeasibleSet;
use crate::diagnostics::CheckReport;
use crate::oracles::{OracleConfig, OracleMode};
use crate::problems::{least_squares, logistic_regression, synthetic_quadratic, Dataset, Objective};
use crate::{Error, Matrix, Result, Vector};

pub const FORMAT_VERSION: u32 = 1;

/// Exact column order of `series.csv`.
pub const SERIES_HEADER: &str = "t,f_gap,gamma,residual,grad_calls,hess_calls,wall_ms";

// ---------------------------------------------------------------------------
// LIBSVM format
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct LibsvmOptions {
    /// Map label `0` to `-1` (some binary datasets use 0/1 labels).
    pub map_zero_to_negative: bool,
}

/// Parses LIBSVM text: one sample per line, `<label> <idx>:<val> ...` with
/// 1-based strictly increasing indices. `#` starts a comment; blank lines are
/// skipped. The feature dimension is the largest index seen; missing entries
/// are zero.
pub fn parse_libsvm(reader: impl BufRead, opts: &LibsvmOptions) -> Result<Dataset> {
    let mut labels: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue; // blank or comment-only line
        };
        let mut label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("non-numeric label {label_tok:?}"),
        })?;
        if opts.map_zero_to_negative && label == 0.0 {
            label = -1.0;
        }
        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut prev_index = 0usize;
        for (col, tok) in tokens.enumerate() {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("token {} ({tok:?}) is not <index>:<value>", col + 2),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("non-numeric feature index {idx_str:?} in token {}", col + 2),
            })?;
            let val: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("non-numeric feature value {val_str:?} in token {}", col + 2),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "feature indices are 1-based; found index 0".into(),
                });
            }
            if idx <= prev_index {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!(
                        "feature indices must be strictly increasing; {idx} after {prev_index}"
                    ),
                });
            }
            prev_index = idx;
            dim = dim.max(idx);
            entries.push((idx - 1, val));
        }
        labels.push(label);
        rows.push(entries);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no samples found".into(),
        });
    }
    if dim == 0 {
        return Err(Error::Parse {
            line: 0,
            msg: "no feature entries found".into(),
        });
    }
    let mut features = Matrix::zeros(rows.len(), dim);
    for (i, entries) in rows.iter().enumerate() {
        for &(j, v) in entries {
            features[(i, j)] = v;
        }
    }
    Dataset::new(features, Vector::from_vec(labels))
}

pub fn parse_libsvm_path(path: &Path, opts: &LibsvmOptions) -> Result<Dataset> {
    let file = fs::File::open(path).map_err(|e| {
        Error::InvalidConfig(format!("cannot open dataset {}: {e}", path.display()))
    })?;
    parse_libsvm(std::io::BufReader::new(file), opts)
}

/// Writes a dataset in LIBSVM text form (non-zero entries only, 1-based
/// indices).
pub fn write_libsvm(ds: &Dataset, mut w: impl Write) -> Result<()> {
    for i in 0..ds.n() {
        write!(w, "{}", ds.labels()[i])?;
        for j in 0..ds.dim() {
            let v = ds.features()[(i, j)];
            if v != 0.0 {
                write!(w, " {}:{}", j + 1, v)?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

fn default_format_version() -> u32 {
    FORMAT_VERSION
}

fn default_trials() -> u64 {
    1
}

fn default_true() -> bool {
    true
}

fn default_gamma0() -> f64 {
    1.0
}

fn default_p() -> f64 {
    2.0
}

fn default_taylor() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    pub problem: ProblemSpec,
    pub set: SetSpec,
    pub oracle: OracleSpec,
    pub algorithm: AlgorithmSpec,
    #[serde(rename = "T")]
    pub horizon: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Explicit starting point; omitted means "project the origin".
    #[serde(default)]
    pub x_init: Option<Vec<f64>>,
    /// Optional early stop: gap against the reference optimum.
    #[serde(default)]
    pub stop_gap: Option<f64>,
    /// Tolerance handed to the reference-optimum solver.
    #[serde(default = "default_reference_tol")]
    pub reference_tol: f64,
}

fn default_reference_tol() -> f64 {
    1e-10
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg = Self::from_json(&text)?;
        cfg.check_paths()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.horizon < 1 {
            return Err(Error::InvalidConfig("T must be >= 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        Ok(())
    }

    /// Referenced dataset paths must exist at load time.
    pub fn check_paths(&self) -> Result<()> {
        if let Some(path) = self.problem.dataset_path() {
            if !path.exists() {
                return Err(Error::InvalidConfig(format!(
                    "dataset path {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        dim: usize,
        condition: f64,
        #[serde(default)]
        seed: u64,
    },
    LeastSquares {
        dataset: PathBuf,
        #[serde(default)]
        subset: Option<usize>,
        #[serde(default)]
        map_zero_labels: bool,
    },
    Logistic {
        dataset: PathBuf,
        #[serde(default)]
        subset: Option<usize>,
        #[serde(default)]
        l2: f64,
        #[serde(default)]
        map_zero_labels: bool,
    },
}

impl ProblemSpec {
    pub fn dataset_path(&self) -> Option<&Path> {
        match self {
            ProblemSpec::Quadratic { .. } => None,
            ProblemSpec::LeastSquares { dataset, .. } | ProblemSpec::Logistic { dataset, .. } => {
                Some(dataset)
            }
        }
    }

    /// Instantiates the objective, reporting the preprocessing that was
    /// applied to dataset problems.
    pub fn build(&self) -> Result<(Box<dyn Objective>, Preprocessing)> {
        match self {
            ProblemSpec::Quadratic {
                dim,
                condition,
                seed,
            } => {
                let (obj, _) = synthetic_quadratic(*dim, *condition, *seed)?;
                Ok((Box::new(obj), Preprocessing::none()))
            }
            ProblemSpec::LeastSquares {
                dataset,
                subset,
                map_zero_labels,
            } => {
                let (ds, prep) = load_dataset(dataset, *subset, *map_zero_labels)?;
                Ok((Box::new(least_squares(ds)?), prep))
            }
            ProblemSpec::Logistic {
                dataset,
                subset,
                l2,
                map_zero_labels,
            } => {
                let (ds, prep) = load_dataset(dataset, *subset, *map_zero_labels)?;
                Ok((Box::new(logistic_regression(ds, *l2)?), prep))
            }
        }
    }
}

fn load_dataset(
    path: &Path,
    subset: Option<usize>,
    map_zero_labels: bool,
) -> Result<(Dataset, Preprocessing)> {
    let opts = LibsvmOptions {
        map_zero_to_negative: map_zero_labels,
    };
    let mut ds = parse_libsvm_path(path, &opts)?;
    if let Some(k) = subset {
        ds = ds.take(k)?;
    }
    Ok((
        ds,
        Preprocessing {
            subset,
            feature_scaling: "none".into(),
            intercept: false,
            label_map: if map_zero_labels {
                "0->-1".into()
            } else {
                "none".into()
            },
        },
    ))
}

/// Records what was done to a dataset before optimization; persisted with the
/// run so plots are reproducible.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Preprocessing {
    pub subset: Option<usize>,
    pub feature_scaling: String,
    pub intercept: bool,
    pub label_map: String,
}

impl Preprocessing {
    pub fn none() -> Self {
        Preprocessing {
            subset: None,
            feature_scaling: "none".into(),
            intercept: false,
            label_map: "none".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Ball {
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Box {
        lower: BoundSpec,
        upper: BoundSpec,
    },
    Simplex {
        scale: f64,
    },
    Unconstrained,
}

/// A per-coordinate bound, given either as one scalar broadcast to every
/// coordinate or as a full vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl BoundSpec {
    fn materialize(&self, dim: usize) -> Result<Vector> {
        match self {
            BoundSpec::Scalar(v) => Ok(Vector::from_element(dim, *v)),
            BoundSpec::Vector(vs) => {
                if vs.len() != dim {
                    return Err(Error::InvalidConfig(format!(
                        "bound vector length {} vs problem dim {dim}",
                        vs.len()
                    )));
                }
                Ok(Vector::from_vec(vs.clone()))
            }
        }
    }
}

impl SetSpec {
    pub fn build(&self, dim: usize) -> Result<FeasibleSet> {
        match self {
            SetSpec::Ball { radius, center } => {
                let c = match center {
                    Some(c) => {
                        if c.len() != dim {
                            return Err(Error::InvalidConfig(format!(
                                "ball center length {} vs problem dim {dim}",
                                c.len()
                            )));
                        }
                        Vector::from_vec(c.clone())
                    }
                    None => Vector::zeros(dim),
                };
                FeasibleSet::ball(c, *radius)
            }
            SetSpec::Box { lower, upper } => {
                FeasibleSet::boxed(lower.materialize(dim)?, upper.materialize(dim)?)
            }
            SetSpec::Simplex { scale } => FeasibleSet::simplex(dim, *scale),
            SetSpec::Unconstrained => Ok(FeasibleSet::unconstrained(dim)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    Deterministic,
    AdditiveNoise {
        sigma_g: f64,
        sigma_h: f64,
        #[serde(default = "default_true")]
        psd_repair: bool,
    },
    Minibatch {
        batch_size: usize,
    },
}

impl OracleSpec {
    pub fn to_config(&self, seed: u64) -> OracleConfig {
        let (mode, psd_repair) = match self {
            OracleSpec::Deterministic => (OracleMode::Deterministic, true),
            OracleSpec::AdditiveNoise {
                sigma_g,
                sigma_h,
                psd_repair,
            } => (
                OracleMode::AdditiveNoise {
                    sigma_g: *sigma_g,
                    sigma_h: *sigma_h,
                },
                *psd_repair,
            ),
            OracleSpec::Minibatch { batch_size } => (
                OracleMode::Minibatch {
                    batch_size: *batch_size,
                },
                true,
            ),
        };
        OracleConfig {
            mode,
            psd_repair,
            seed,
        }
    }

    /// Batch size when in minibatch mode (for the epochs axis).
    pub fn batch_size(&self) -> Option<usize> {
        match self {
            OracleSpec::Minibatch { batch_size } => Some(*batch_size),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    ExtraNewton {
        #[serde(default = "default_p")]
        p: f64,
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default = "default_gamma0")]
        gamma0: f64,
        #[serde(default = "default_taylor")]
        taylor_factor: f64,
    },
    ProjGrad {
        eta: f64,
    },
    NesterovAgd {
        eta: f64,
    },
    AdaptiveExtraGrad {
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default = "default_gamma0")]
        gamma0: f64,
    },
    RegNewton {
        l_hat: f64,
    },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::ExtraNewton { .. } => "extra_newton",
            AlgorithmSpec::ProjGrad { .. } => "proj_grad",
            AlgorithmSpec::NesterovAgd { .. } => "nesterov_agd",
            AlgorithmSpec::AdaptiveExtraGrad { .. } => "adaptive_extra_grad",
            AlgorithmSpec::RegNewton { .. } => "reg_newton",
        }
    }
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

/// One row of `series.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: u64,
    pub f_gap: f64,
    pub gamma: f64,
    pub residual: f64,
    pub grad_calls: u64,
    pub hess_calls: u64,
    pub wall_ms: f64,
}

/// Environment and outcome metadata persisted next to the config echo.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMeta {
    pub version: String,
    pub seed: u64,
    pub timestamp: String,
    pub f_star: f64,
    pub x_star: Vec<f64>,
    pub preprocessing: Preprocessing,
    pub diverged: bool,
    pub rows: u64,
    /// Dataset size for finite-sum problems (drives the epochs plot axis).
    pub n_samples: Option<u64>,
}

/// A fully persisted run: config echo, per-iteration series, check reports.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: RunConfig,
    pub meta: RunMeta,
    pub series: Vec<SeriesRow>,
    pub checks: Vec<CheckReport>,
}

#[derive(Serialize, Deserialize)]
struct ConfigEcho {
    format_version: u32,
    config: RunConfig,
    meta: RunMeta,
}

#[derive(Serialize, Deserialize)]
struct ChecksFile {
    format_version: u32,
    checks: Vec<CheckReport>,
}

fn format_float(v: f64) -> String {
    // Shortest representation that round-trips exactly.
    format!("{v}")
}

/// Writes `config.json`, `series.csv` and `checks.json` into `dir`.
pub fn write_run_record(record: &RunRecord, dir: &Path) -> Result<()> {
    if record.meta.rows != record.series.len() as u64 {
        return Err(Error::Integrity(format!(
            "meta.rows = {} but series has {} rows",
            record.meta.rows,
            record.series.len()
        )));
    }
    for row in &record.series {
        for v in [row.f_gap, row.gamma, row.residual, row.wall_ms] {
            if !v.is_finite() {
                return Err(Error::Integrity(format!(
                    "non-finite value in series row t={}",
                    row.t
                )));
            }
        }
    }
    fs::create_dir_all(dir)?;
    let echo = ConfigEcho {
        format_version: FORMAT_VERSION,
        config: record.config.clone(),
        meta: record.meta.clone(),
    };
    fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(&echo)?,
    )?;

    let mut csv = String::with_capacity(64 * (record.series.len() + 1));
    csv.push_str(SERIES_HEADER);
    csv.push('\n');
    for row in &record.series {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.t,
            format_float(row.f_gap),
            format_float(row.gamma),
            format_float(row.residual),
            row.grad_calls,
            row.hess_calls,
            format_float(row.wall_ms),
        ));
    }
    fs::write(dir.join("series.csv"), csv)?;

    let checks = ChecksFile {
        format_version: FORMAT_VERSION,
        checks: record.checks.clone(),
    };
    fs::write(
        dir.join("checks.json"),
        serde_json::to_string_pretty(&checks)?,
    )?;
    Ok(())
}

/// Reads a run record back; the exact inverse of [`write_run_record`].
pub fn read_run_record(dir: &Path) -> Result<RunRecord> {
    let config_path = dir.join("config.json");
    let series_path = dir.join("series.csv");
    let checks_path = dir.join("checks.json");
    for (path, what) in [
        (&config_path, "config.json"),
        (&series_path, "series.csv"),
        (&checks_path, "checks.json"),
    ] {
        if !path.exists() {
            return Err(Error::Integrity(format!(
                "missing {what} in {}",
                dir.display()
            )));
        }
    }
    let echo: ConfigEcho = serde_json::from_str(&fs::read_to_string(&config_path)?)
        .map_err(|e| Error::Integrity(format!("config.json: {e}")))?;
    if echo.format_version != FORMAT_VERSION {
        return Err(Error::Integrity(format!(
            "config.json format_version {} unsupported",
            echo.format_version
        )));
    }
    let checks: ChecksFile = serde_json::from_str(&fs::read_to_string(&checks_path)?)
        .map_err(|e| Error::Integrity(format!("checks.json: {e}")))?;

    let text = fs::read_to_string(&series_path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != SERIES_HEADER {
        return Err(Error::Integrity(format!(
            "series.csv header mismatch: got {header:?}"
        )));
    }
    let mut series = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Integrity(format!(
                "series.csv row {} has {} fields",
                k + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Integrity(format!("series.csv row {}: bad {what} {s:?}", k + 2)))
        };
        let parse_u = |s: &str, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::Integrity(format!("series.csv row {}: bad {what} {s:?}", k + 2)))
        };
        series.push(SeriesRow {
            t: parse_u(fields[0], "t")?,
            f_gap: parse_f(fields[1], "f_gap")?,
            gamma: parse_f(fields[2], "gamma")?,
            residual: parse_f(fields[3], "residual")?,
            grad_calls: parse_u(fields[4], "grad_calls")?,
            hess_calls: parse_u(fields[5], "hess_calls")?,
            wall_ms: parse_f(fields[6], "wall_ms")?,
        });
    }
    if series.len() as u64 != echo.meta.rows {
        return Err(Error::Integrity(format!(
            "series.csv has {} rows but meta.rows = {}",
            series.len(),
            echo.meta.rows
        )));
    }
    Ok(RunRecord {
        config: echo.config,
        meta: echo.meta,
        series,
        checks: checks.checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse_str(s: &str) -> Result<Dataset> {
        parse_libsvm(Cursor::new(s), &LibsvmOptions::default())
    }

    #[test]
    fn parse_single_sparse_row() {
        let ds = parse_str("+1 3:0.5\n").unwrap();
        assert_eq!(ds.n(), 1);
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.labels()[0], 1.0);
        assert_eq!(ds.features()[(0, 0)], 0.0);
        assert_eq!(ds.features()[(0, 1)], 0.0);
        assert_eq!(ds.features()[(0, 2)], 0.5);
    }

    #[test]
    fn parse_dense_row() {
        let ds = parse_str("-1 1:2 2:-1\n").unwrap();
        assert_eq!(ds.labels()[0], -1.0);
        assert_eq!(ds.features()[(0, 0)], 2.0);
        assert_eq!(ds.features()[(0, 1)], -1.0);
    }

    #[test]
    fn parse_rejects_non_increasing_indices() {
        let e = parse_str("1 2:1 2:3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_str("1 3:1 2:3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn parse_rejects_bad_tokens() {
        assert!(matches!(
            parse_str("one 1:2\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_str("1 x:2\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_str("1 1:abc\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_str("1 1\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn parse_skips_comments_and_blank_lines() {
        let ds = parse_str("# header comment\n\n+1 1:1.5 # trailing\n\n-1 2:2\n").unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.dim(), 2);
    }

    #[test]
    fn parse_rejects_empty_input() {
        assert!(parse_str("").is_err());
        assert!(parse_str("# only comments\n").is_err());
    }

    #[test]
    fn zero_label_mapping_flag() {
        let opts = LibsvmOptions {
            map_zero_to_negative: true,
        };
        let ds = parse_libsvm(Cursor::new("0 1:1\n1 1:2\n"), &opts).unwrap();
        assert_eq!(ds.labels()[0], -1.0);
        assert_eq!(ds.labels()[1], 1.0);
    }

    #[test]
    fn libsvm_round_trip() {
        let ds = parse_str("1 1:0.25 3:-2\n-1 2:4\n1 1:1 2:2 3:3\n").unwrap();
        let mut buf = Vec::new();
        write_libsvm(&ds, &mut buf).unwrap();
        let back = parse_libsvm(Cursor::new(buf), &LibsvmOptions::default()).unwrap();
        assert_eq!(back.n(), ds.n());
        assert_eq!(back.dim(), ds.dim());
        assert_eq!(back.labels(), ds.labels());
        assert_eq!(back.features(), ds.features());
    }

    fn sample_config_json() -> String {
        r#"{
            "problem": {"kind": "quadratic", "dim": 4, "condition": 10.0, "seed": 3},
            "set": {"kind": "ball", "radius": 2.0},
            "oracle": {"mode": "deterministic"},
            "algorithm": {"kind": "extra_newton"},
            "T": 16
        }"#
        .to_string()
    }

    #[test]
    fn config_parses_with_defaults() {
        let cfg = RunConfig::from_json(&sample_config_json()).unwrap();
        assert_eq!(cfg.horizon, 16);
        assert_eq!(cfg.trials, 1);
        assert_eq!(cfg.format_version, FORMAT_VERSION);
        match cfg.algorithm {
            AlgorithmSpec::ExtraNewton { p, gamma0, .. } => {
                assert_eq!(p, 2.0);
                assert_eq!(gamma0, 1.0);
            }
            _ => panic!("wrong algorithm"),
        }
    }

    #[test]
    fn config_rejects_unknown_fields_and_bad_values() {
        let bad = r#"{"problem": {"kind": "quadratic", "dim": 2, "condition": 1.0},
                      "set": {"kind": "ball", "radius": 1.0},
                      "oracle": {"mode": "deterministic"},
                      "algorithm": {"kind": "extra_newton"},
                      "T": 4, "bogus": 1}"#;
        assert!(RunConfig::from_json(bad).is_err());

        let zero_t = sample_config_json().replace("\"T\": 16", "\"T\": 0");
        assert!(RunConfig::from_json(&zero_t).is_err());
    }

    #[test]
    fn config_round_trips_losslessly() {
        let cfg = RunConfig::from_json(&sample_config_json()).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(serde_json::to_value(&cfg).unwrap(), serde_json::to_value(&back).unwrap());
    }

    #[test]
    fn set_spec_builds_with_broadcast_bounds() {
        let spec = SetSpec::Box {
            lower: BoundSpec::Scalar(-1.0),
            upper: BoundSpec::Scalar(2.0),
        };
        let set = spec.build(3).unwrap();
        match set {
            FeasibleSet::Box { lower, upper } => {
                assert_eq!(lower, Vector::from_element(3, -1.0));
                assert_eq!(upper, Vector::from_element(3, 2.0));
            }
            _ => panic!("expected box"),
        }
    }

    fn sample_record(dir_rows: u64) -> RunRecord {
        let config = RunConfig::from_json(&sample_config_json()).unwrap();
        let series: Vec<SeriesRow> = (1..=dir_rows)
            .map(|t| SeriesRow {
                t,
                f_gap: 1.0 / t as f64,
                gamma: 0.5,
                residual: 1e-3 * t as f64,
                grad_calls: 2 * t,
                hess_calls: t,
                wall_ms: 0.25 * t as f64,
            })
            .collect();
        RunRecord {
            config,
            meta: RunMeta {
                version: env!("CARGO_PKG_VERSION").into(),
                seed: 3,
                timestamp: "2000-01-01T00:00:00Z".into(),
                f_star: 0.125,
                x_star: vec![0.0; 4],
                preprocessing: Preprocessing::none(),
                diverged: false,
                rows: dir_rows,
                n_samples: None,
            },
            series,
            checks: Vec::new(),
        }
    }

    #[test]
    fn record_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let record = sample_record(8);
        write_run_record(&record, dir.path()).unwrap();
        let back = read_run_record(dir.path()).unwrap();
        assert_eq!(back.series, record.series);
        assert_eq!(back.meta.f_star, record.meta.f_star);
        assert_eq!(back.meta.rows, 8);
        assert_eq!(
            serde_json::to_value(&back.config).unwrap(),
            serde_json::to_value(&record.config).unwrap()
        );
    }

    #[test]
    fn record_csv_header_is_pinned() {
        let dir = tempfile::tempdir().unwrap();
        write_run_record(&sample_record(2), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("series.csv")).unwrap();
        assert!(text.starts_with("t,f_gap,gamma,residual,grad_calls,hess_calls,wall_ms\n"));
    }

    #[test]
    fn record_integrity_errors() {
        let dir = tempfile::tempdir().unwrap();
        let record = sample_record(4);
        write_run_record(&record, dir.path()).unwrap();

        // Missing series.csv.
        fs::remove_file(dir.path().join("series.csv")).unwrap();
        assert!(matches!(
            read_run_record(dir.path()).unwrap_err(),
            Error::Integrity(_)
        ));

        // Row count disagreeing with meta.
        write_run_record(&record, dir.path()).unwrap();
        let series = dir.path().join("series.csv");
        let text = fs::read_to_string(&series).unwrap();
        let truncated: Vec<&str> = text.lines().take(3).collect();
        fs::write(&series, truncated.join("\n")).unwrap();
        assert!(matches!(
            read_run_record(dir.path()).unwrap_err(),
            Error::Integrity(_)
        ));
    }
}
