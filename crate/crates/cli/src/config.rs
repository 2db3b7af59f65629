//! Experiment settings.
//!
//! Settings come as `key=value` pairs, from a config file (one pair per
//! line, `#` starts a comment) and from command-line flags. Both sources go
//! through the same keys; pairs are applied in order, so flags given after
//! the file win.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use paras_core::{EngineParams, ParallelParams, ProblemKind, ProblemSpec, Variant};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Seq,
    Tdo,
    Poc,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::Seq => "seq",
            RunMode::Tdo => "tdo",
            RunMode::Poc => "poc",
        }
    }

    pub fn variant(self) -> Option<Variant> {
        match self {
            RunMode::Seq => None,
            RunMode::Tdo => Some(Variant::Tdo),
            RunMode::Poc => Some(Variant::Poc),
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "seq" | "sequential" => Ok(RunMode::Seq),
            "tdo" => Ok(RunMode::Tdo),
            "poc" => Ok(RunMode::Poc),
            _ => bail!("unknown variant `{s}` (expected seq, tdo or poc)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => bail!("unknown format `{s}` (expected csv or json)"),
        }
    }
}

/// Engine parameters that replace the per-kind defaults when set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EngineOverrides {
    pub tabu_tenure: Option<u64>,
    pub reset_limit: Option<usize>,
    pub reset_fraction: Option<f64>,
    pub max_iterations: Option<u64>,
    pub max_restarts: Option<u32>,
    pub escape_probability: Option<f64>,
}

impl EngineOverrides {
    pub fn apply(&self, params: &mut EngineParams) {
        if let Some(x) = self.tabu_tenure {
            params.tabu_tenure = x;
        }
        if let Some(x) = self.reset_limit {
            params.reset_limit = x;
        }
        if let Some(x) = self.reset_fraction {
            params.reset_fraction = x;
        }
        if let Some(x) = self.max_iterations {
            params.max_iterations = x;
        }
        if let Some(x) = self.max_restarts {
            params.max_restarts = x;
        }
        if let Some(x) = self.escape_probability {
            params.escape_probability = x;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub mode: RunMode,
    pub workers: usize,
    pub arity: usize,
    pub k: u64,
    pub runs: u32,
    /// Run `i` uses seed `seed ^ i`.
    pub seed: u64,
    pub overrides: EngineOverrides,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, n: usize) -> Self {
        ExperimentConfig {
            problem,
            n,
            mode: RunMode::Seq,
            workers: 1,
            arity: 2,
            k: 100,
            runs: 100,
            seed: 0,
            overrides: EngineOverrides::default(),
            format: OutputFormat::Csv,
            output: None,
        }
    }

    pub fn with_mode(mut self, mode: RunMode, workers: usize) -> Self {
        self.mode = mode;
        self.workers = workers;
        self
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k = k;
        self
    }

    pub fn with_runs(mut self, runs: u32) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        Ok(ProblemSpec::new(self.problem, self.n)?)
    }

    pub fn run_seed(&self, run_index: u32) -> u64 {
        self.seed ^ run_index as u64
    }

    /// Engine parameters for one run; for parallel runs this is the master
    /// from which worker parameters derive.
    pub fn engine_params(&self, spec: &ProblemSpec, run_index: u32) -> EngineParams {
        let mut params = EngineParams::defaults_for(spec).with_seed(self.run_seed(run_index));
        self.overrides.apply(&mut params);
        params.comm_interval_k = self.k;
        params
    }

    pub fn parallel_params(&self) -> Option<ParallelParams> {
        self.mode.variant().map(|variant| ParallelParams {
            variant,
            num_workers: self.workers,
            arity: self.arity,
            comm_interval_k: self.k,
        })
    }

    /// Workers column value: 1 for sequential runs.
    pub fn worker_count(&self) -> usize {
        match self.mode {
            RunMode::Seq => 1,
            _ => self.workers,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        let spec = self.spec()?;
        self.engine_params(&spec, 0).validate()?;
        if let Some(pp) = self.parallel_params() {
            pp.validate()?;
        }
        Ok(())
    }
}

/// Splits config file text into `key=value` pairs.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value, got `{}`", lineno + 1, raw.trim()))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            bail!("line {}: missing key", lineno + 1);
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

/// Builds one configuration per value of `k` (a comma-separated list is
/// allowed there). `problem` and `size` are required.
pub fn build_experiments<'a>(pairs: impl IntoIterator<Item = &'a (String, String)>) -> Result<Vec<ExperimentConfig>> {
    let mut problem = None;
    let mut size = None;
    let mut ks = vec![100];
    let mut cfg = ExperimentConfig::new(ProblemKind::CostasArray, 0);
    for (key, value) in pairs {
        let value = value.as_str();
        match key.as_str() {
            "problem" => problem = Some(parse::<ProblemKind>(key, value)?),
            "size" | "n" => size = Some(parse::<usize>(key, value)?),
            "variant" => cfg.mode = parse(key, value)?,
            "workers" => cfg.workers = parse(key, value)?,
            "arity" => cfg.arity = parse(key, value)?,
            "k" => {
                ks = value
                    .split(',')
                    .map(|v| parse::<u64>(key, v.trim()))
                    .collect::<Result<_>>()?;
            }
            "runs" => cfg.runs = parse(key, value)?,
            "seed" => cfg.seed = parse(key, value)?,
            "tabu_tenure" => cfg.overrides.tabu_tenure = Some(parse(key, value)?),
            "reset_limit" => cfg.overrides.reset_limit = Some(parse(key, value)?),
            "reset_fraction" => cfg.overrides.reset_fraction = Some(parse(key, value)?),
            "max_iterations" => cfg.overrides.max_iterations = Some(parse(key, value)?),
            "max_restarts" => cfg.overrides.max_restarts = Some(parse(key, value)?),
            "escape_probability" => cfg.overrides.escape_probability = Some(parse(key, value)?),
            "format" => cfg.format = parse(key, value)?,
            "output" => cfg.output = Some(PathBuf::from(value)),
            other => bail!("unknown setting `{other}`"),
        }
    }
    cfg.problem = problem.context("no problem given")?;
    cfg.n = size.context("no size given")?;
    ks.into_iter()
        .map(|k| {
            let c = cfg.clone().with_k(k);
            c.validate()?;
            Ok(c)
        })
        .collect()
}
