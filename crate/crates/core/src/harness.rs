//! Multi-seed experiment runner and trace summaries.
//!
//! An [`ExperimentConfig`] names an algorithm, an objective and a starting
//! point. [`run_experiment`] runs every seed on its own oracle and random
//! source (in parallel), writes `seed_<s>.csv` per seed plus `combined.csv`,
//! and [`summarize`] reduces the traces to mean/std/min/max per evaluation
//! checkpoint.
//!
//! Configurations can be read from a flat `key = value` file; the keys are
//! the same as the CLI flag names (`alg`, `obj`, `evals`, `seeds`, `m`, `T`,
//! `eps`, `kappa`, `hess-radius`, `q`, ...).

use std::env;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::baselines::{Baseline, BaselineConfig, BaselineKind};
use crate::dataset::{load_libsvm, synthetic_a3a};
use crate::linesearch::ArmijoConfig;
use crate::optimizer::run;
use crate::oracle::{LogisticRegression, Objective, Rosenbrock};
use crate::trace::{read_traces, write_rows, Trace, CSV_HEADER};
use crate::zosah::{default_subspace_dim, HessianMode, Zosah, ZosahConfig, DEFAULT_PERIOD};
use crate::{cache, estimator, Error, Result};

/// Relative `logistic:<path>` objectives are resolved against this directory
/// when it is set.
pub const DATA_DIR_ENV: &str = "ZOSAH_DATA_DIR";

pub const COMBINED_FILE: &str = "combined.csv";
pub const SUMMARY_HEADER: &str = "checkpoint,n,mean,std,min,max";
pub const DEFAULT_GRID_STEP: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Zosah,
    ZosahDiag,
    ZosahFd,
    Rspg,
    SignSgd,
    Adamm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Zosah,
        Algorithm::ZosahDiag,
        Algorithm::ZosahFd,
        Algorithm::Rspg,
        Algorithm::SignSgd,
        Algorithm::Adamm,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Zosah => "zosah",
            Algorithm::ZosahDiag => "zosah-diag",
            Algorithm::ZosahFd => "zosah-fd",
            Algorithm::Rspg => "rspg",
            Algorithm::SignSgd => "signsgd",
            Algorithm::Adamm => "adamm",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::param(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    Rosenbrock,
    /// Logistic loss on a LIBSVM file.
    Logistic(PathBuf),
    /// Logistic loss on a generated 3186 x 123 dataset with the shape of a3a.
    SyntheticA3a {
        seed: u64,
    },
}

impl ObjectiveSpec {
    /// Builds the objective. Relative dataset paths go through
    /// [`DATA_DIR_ENV`] when it is set.
    pub fn load(&self) -> Result<Arc<dyn Objective>> {
        Ok(match self {
            ObjectiveSpec::Rosenbrock => Arc::new(Rosenbrock),
            ObjectiveSpec::Logistic(path) => {
                let data = load_libsvm(resolve_data_path(path), None)?;
                Arc::new(LogisticRegression::new(Arc::new(data))?)
            }
            ObjectiveSpec::SyntheticA3a { seed } => Arc::new(LogisticRegression::new(Arc::new(synthetic_a3a(*seed)))?),
        })
    }
}

fn resolve_data_path(path: &Path) -> PathBuf {
    match env::var_os(DATA_DIR_ENV) {
        Some(root) if path.is_relative() => Path::new(&root).join(path),
        _ => path.to_path_buf(),
    }
}

impl fmt::Display for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveSpec::Rosenbrock => f.write_str("rosenbrock"),
            ObjectiveSpec::Logistic(p) => write!(f, "logistic:{}", p.display()),
            ObjectiveSpec::SyntheticA3a { seed } => write!(f, "synthetic-a3a:{seed}"),
        }
    }
}

impl FromStr for ObjectiveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "rosenbrock" {
            return Ok(ObjectiveSpec::Rosenbrock);
        }
        if let Some(path) = s.strip_prefix("logistic:") {
            if path.is_empty() {
                return Err(Error::param("logistic objective needs a path"));
            }
            return Ok(ObjectiveSpec::Logistic(PathBuf::from(path)));
        }
        if s == "synthetic-a3a" {
            return Ok(ObjectiveSpec::SyntheticA3a { seed: 0 });
        }
        if let Some(seed) = s.strip_prefix("synthetic-a3a:") {
            return Ok(ObjectiveSpec::SyntheticA3a {
                seed: parse_num("synthetic-a3a seed", seed)?,
            });
        }
        Err(Error::param(format!("unknown objective {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum StartPolicy {
    /// `(-1.2, 1)` for Rosenbrock, zeros otherwise.
    #[default]
    Auto,
    Zeros,
    StandardRosenbrock,
    Explicit(Vec<f64>),
}

impl StartPolicy {
    pub fn resolve(&self, objective: &ObjectiveSpec, d: usize) -> Result<Vec<f64>> {
        let x0 = match self {
            StartPolicy::Auto if *objective == ObjectiveSpec::Rosenbrock => Rosenbrock::STANDARD_START.to_vec(),
            StartPolicy::Auto | StartPolicy::Zeros => vec![0.0; d],
            StartPolicy::StandardRosenbrock => Rosenbrock::STANDARD_START.to_vec(),
            StartPolicy::Explicit(x) => x.clone(),
        };
        if x0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x0.len(),
            });
        }
        Ok(x0)
    }
}

impl FromStr for StartPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(StartPolicy::Auto),
            "zeros" => Ok(StartPolicy::Zeros),
            "standard-rosenbrock" => Ok(StartPolicy::StandardRosenbrock),
            list => list
                .split(',')
                .map(|v| parse_num("x0 entry", v.trim()))
                .collect::<Result<Vec<f64>>>()
                .map(StartPolicy::Explicit),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub objective: ObjectiveSpec,
    pub x0: StartPolicy,
    pub max_evals: u64,
    pub seeds: Vec<u64>,
    /// `None` picks `min(d, 20)` rounded down to even.
    pub m: Option<usize>,
    pub period: u64,
    pub epsilon: f64,
    pub kappa: f64,
    pub hess_radius: f64,
    pub gamma_floor: f64,
    pub q: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub delta: f64,
    pub line_search: ArmijoConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let b = BaselineConfig::default();
        Self {
            algorithm: Algorithm::Zosah,
            objective: ObjectiveSpec::Rosenbrock,
            x0: StartPolicy::Auto,
            max_evals: 2000,
            seeds: vec![0],
            m: None,
            period: DEFAULT_PERIOD,
            epsilon: estimator::DEFAULT_EPSILON,
            kappa: estimator::DEFAULT_KAPPA,
            hess_radius: cache::DEFAULT_HESS_RADIUS,
            gamma_floor: estimator::DEFAULT_GAMMA_FLOOR,
            q: b.q,
            beta1: b.beta1,
            beta2: b.beta2,
            delta: b.delta,
            line_search: ArmijoConfig::default(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(format!("{key}: cannot parse {value:?}")))
}

/// Parses `0,3,7`, `0..10` (end excluded) or `0..=9`, or a mix separated by
/// commas. Duplicates are rejected.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..=") {
            seeds.extend(parse_num::<u64>("seeds", lo)?..=parse_num::<u64>("seeds", hi)?);
        } else if let Some((lo, hi)) = part.split_once("..") {
            seeds.extend(parse_num::<u64>("seeds", lo)?..parse_num::<u64>("seeds", hi)?);
        } else {
            seeds.push(parse_num("seeds", part)?);
        }
    }
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("seeds must be distinct"));
    }
    if seeds.is_empty() {
        return Err(Error::param("seed list is empty"));
    }
    Ok(seeds)
}

impl ExperimentConfig {
    /// Sets one field from its flag name. Unknown keys are usage errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "alg" => self.algorithm = value.parse()?,
            "obj" => self.objective = value.parse()?,
            "x0" => self.x0 = value.parse()?,
            "evals" => self.max_evals = parse_num(key, value)?,
            "seeds" => self.seeds = parse_seeds(value)?,
            "m" => self.m = Some(parse_num(key, value)?),
            "T" => self.period = parse_num(key, value)?,
            "eps" => self.epsilon = parse_num(key, value)?,
            "kappa" => self.kappa = parse_num(key, value)?,
            "hess-radius" => self.hess_radius = parse_num(key, value)?,
            "gamma-floor" => self.gamma_floor = parse_num(key, value)?,
            "q" => self.q = parse_num(key, value)?,
            "beta1" => self.beta1 = parse_num(key, value)?,
            "beta2" => self.beta2 = parse_num(key, value)?,
            "delta" => self.delta = parse_num(key, value)?,
            "c1" => self.line_search.c1 = parse_num(key, value)?,
            "shrink" => self.line_search.shrink = parse_num(key, value)?,
            "rho0" => self.line_search.initial_step = parse_num(key, value)?,
            "rho-min" => self.line_search.min_step = parse_num(key, value)?,
            _ => return Err(Error::param(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` document on top of `self`. Blank lines
    /// and `#` comments are skipped.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::param(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| Error::param(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_kv_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv(&fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn zosah_config(&self, d: usize) -> ZosahConfig {
        ZosahConfig {
            m: self.m.unwrap_or_else(|| default_subspace_dim(d)),
            period: self.period,
            epsilon: self.epsilon,
            kappa: self.kappa,
            hess_radius: self.hess_radius,
            gamma_floor: self.gamma_floor,
            line_search: self.line_search,
            hessian: match self.algorithm {
                Algorithm::ZosahDiag => HessianMode::Diagonal,
                Algorithm::ZosahFd => HessianMode::FiniteDifference,
                _ => HessianMode::Fitted,
            },
        }
    }

    pub fn baseline_config(&self) -> BaselineConfig {
        BaselineConfig {
            q: self.q,
            epsilon: self.epsilon,
            beta1: self.beta1,
            beta2: self.beta2,
            delta: self.delta,
            line_search: self.line_search,
        }
    }

    /// Checks everything that does not need the objective loaded.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::param("seed list is empty"));
        }
        if self.max_evals == 0 {
            return Err(Error::param("max_evals must be positive"));
        }
        match self.algorithm {
            Algorithm::Zosah | Algorithm::ZosahDiag | Algorithm::ZosahFd => {
                // m is checked against d once the objective is known
                let mut probe = self.zosah_config(usize::MAX);
                probe.m = 2;
                probe.validate(usize::MAX)
            }
            _ => self.baseline_config().validate(),
        }
    }
}

/// Runs one seed against an already loaded objective.
pub fn run_seed(cfg: &ExperimentConfig, objective: Arc<dyn Objective>, seed: u64) -> Result<Trace> {
    let d = objective.dim();
    let x0 = cfg.x0.resolve(&cfg.objective, d)?;
    let kind = match cfg.algorithm {
        Algorithm::Zosah | Algorithm::ZosahDiag | Algorithm::ZosahFd => {
            let opt = Zosah::new(objective, x0, cfg.zosah_config(d), seed)?;
            return run(opt, cfg.max_evals);
        }
        Algorithm::Rspg => BaselineKind::Rspg,
        Algorithm::SignSgd => BaselineKind::SignSgd,
        Algorithm::Adamm => BaselineKind::Adamm,
    };
    run(
        Baseline::new(kind, objective, x0, cfg.baseline_config(), seed)?,
        cfg.max_evals,
    )
}

/// Runs every seed in parallel; traces come back in the order of `cfg.seeds`.
pub fn run_traces(cfg: &ExperimentConfig) -> Result<Vec<Trace>> {
    cfg.validate()?;
    let objective = cfg.objective.load()?;
    cfg.seeds
        .par_iter()
        .map(|&seed| run_seed(cfg, objective.clone(), seed))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub traces: Vec<Trace>,
    pub seed_files: Vec<PathBuf>,
    pub combined_file: PathBuf,
}

pub fn seed_file_name(seed: u64) -> String {
    format!("seed_{seed}.csv")
}

/// Runs the experiment and writes one CSV per seed plus [`COMBINED_FILE`]
/// into `out_dir` (created if missing).
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: impl AsRef<Path>) -> Result<ExperimentOutput> {
    let out_dir = out_dir.as_ref();
    let traces = run_traces(cfg)?;
    fs::create_dir_all(out_dir)?;
    let mut combined = String::from(CSV_HEADER);
    combined.push('\n');
    let mut seed_files = Vec::with_capacity(traces.len());
    for (seed, trace) in cfg.seeds.iter().zip(&traces) {
        let path = out_dir.join(seed_file_name(*seed));
        fs::write(&path, trace.to_csv())?;
        write_rows(&mut combined, trace.rows());
        seed_files.push(path);
    }
    let combined_file = out_dir.join(COMBINED_FILE);
    fs::write(&combined_file, combined)?;
    Ok(ExperimentOutput {
        traces,
        seed_files,
        combined_file,
    })
}

/// Reads traces back from a run directory: `combined.csv` when present,
/// otherwise every `seed_*.csv` in name order.
pub fn load_run_dir(dir: impl AsRef<Path>) -> Result<Vec<Trace>> {
    let dir = dir.as_ref();
    let read = |p: &Path| -> Result<Vec<Trace>> {
        let file = fs::File::open(p)?;
        read_traces(std::io::BufReader::new(file)).map_err(|e| Error::Trace(format!("{}: {e}", p.display())))
    };
    let combined = dir.join(COMBINED_FILE);
    if combined.is_file() {
        return read(&combined);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("seed_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    let mut traces = Vec::new();
    for f in files {
        traces.extend(read(&f)?);
    }
    if traces.is_empty() {
        return Err(Error::Trace(format!("no traces found in {}", dir.display())));
    }
    Ok(traces)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub checkpoint: u64,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (zero for a single trace).
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// `step, 2 step, ...` up to and including `max`.
pub fn checkpoint_grid(step: u64, max: u64) -> Result<Vec<u64>> {
    if step == 0 {
        return Err(Error::param("grid step must be positive"));
    }
    Ok((1..=max / step).map(|i| i * step).collect())
}

/// Step-function statistics across traces at each checkpoint. A checkpoint
/// that precedes the first row of any trace is left out.
pub fn summarize(traces: &[Trace], grid: &[u64]) -> Result<Vec<SummaryRow>> {
    if traces.is_empty() {
        return Err(Error::param("nothing to summarize"));
    }
    let mut rows = Vec::new();
    let mut values = Vec::with_capacity(traces.len());
    for &checkpoint in grid {
        values.clear();
        values.extend(traces.iter().map_while(|t| t.value_at(checkpoint)));
        if values.len() < traces.len() {
            continue;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        rows.push(SummaryRow {
            checkpoint,
            n,
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok(rows)
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.checkpoint, r.n, r.mean, r.std, r.min, r.max
        )
        .expect("writing to a String cannot fail");
    }
    out
}
