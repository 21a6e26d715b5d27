//! Experiment driver: run configurations, reports and report comparison.
//!
//! A run is a pure function of its [`RunConfig`]; everything a run needs,
//! including every default, is echoed into the [`RunReport`] so repeated
//! invocations are bit-identical. Wall-clock timing is deliberately kept out
//! of the report (it goes to the process log) to preserve that property.

use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::domain::{Alphabet, FreqIndex, TargetFunction};
use crate::error::{Error, Result};
use crate::estimators::{
    collision_decay_experiment, estimate_coefficient, estimate_prefix_energy_crw, estimate_t_ns,
    estimate_t_prime_ns, EstimatorConfig,
};
use crate::fourier::{transform, Spectrum};
use crate::learners::{learn_top_crw, learn_ubox_ns, LearnParams};
use crate::oracles::{default_rejection_budget, Mode, OracleSession};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Transform,
    Estimate,
    Learn,
    Experiment,
}

/// Target construction: either a function file or a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// DNF term count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    /// DNF term width.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    /// TOP parity count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<usize>,
    /// UBOX rectangle count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rectangles: Option<usize>,
    /// Instance-generation seed; defaults to the master seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gen_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// One of `mq`, `uq`, `rw`, `crw`, `ns`.
    pub oracle: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// CRW cycle override; defaults to `(n, n-1, ..., 1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<usize>>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            oracle: "uq".to_string(),
            rho: None,
            cycle: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<usize>,
}

/// Estimation request for the `estimate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EstimateSpec {
    /// One of `coefficient`, `prefix_energy`, `t`, `t_prime`.
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freq: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<usize>>,
}

/// Collision-decay sweep for the `experiment` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub rhos: Vec<f64>,
    pub ns: Vec<usize>,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub target: TargetSpec,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub estimate: Option<EstimateSpec>,
    #[serde(default)]
    pub experiment: Option<ExperimentSpec>,
    pub seed: u64,
    /// Worker count; echoed for the record, results never depend on it.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

/// Deterministic per-stage metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub name: String,
    pub samples: u64,
    pub truncated: bool,
}

/// A reported error value, tagged by how it was measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMeasure {
    pub value: f64,
    /// `exact` (full enumeration) or `estimated`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultPayload {
    Spectrum {
        path: PathBuf,
        entries: usize,
        parseval_mass: f64,
    },
    Estimate {
        quantity: String,
        estimate: f64,
        imaginary: Option<f64>,
        lambda: f64,
        delta: f64,
        samples: u64,
    },
    Hypothesis {
        path: PathBuf,
        terms: usize,
        rounds: usize,
        succeeded: bool,
        error: ErrorMeasure,
        #[serde(skip_serializing_if = "Option::is_none")]
        failure: Option<String>,
    },
    Experiment {
        path: PathBuf,
        rows: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub stages: Vec<StageMetrics>,
    pub result: ResultPayload,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Writes `content` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|f| f.to_string_lossy().to_string())
            .unwrap_or_else(|| "out".to_string())
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Target / session construction
// ---------------------------------------------------------------------------

fn build_target(spec: &TargetSpec, master_seed: u64) -> Result<TargetFunction> {
    if let Some(path) = &spec.file {
        return TargetFunction::load(path);
    }
    let class = spec
        .class
        .as_deref()
        .ok_or_else(|| Error::parameter("target: either `file` or `class` is required"))?;
    let b = spec.b.unwrap_or(2);
    let n = spec
        .n
        .ok_or_else(|| Error::parameter("target: `n` is required for generated instances"))?;
    let alphabet = Alphabet::new(b, n)?;
    let seed = spec.gen_seed.unwrap_or(master_seed);
    match class {
        "parity" => TargetFunction::random_parity(alphabet, seed),
        "dnf" => TargetFunction::random_dnf(
            alphabet,
            spec.terms.unwrap_or(3),
            spec.width.unwrap_or(3),
            seed,
        ),
        "top" => TargetFunction::random_top(alphabet, spec.vectors.unwrap_or(3), seed),
        "ubox" => TargetFunction::random_ubox(alphabet, spec.rectangles.unwrap_or(2), seed),
        other => Err(Error::parameter(format!(
            "target: unknown class '{other}' (expected parity, dnf, top or ubox)"
        ))),
    }
}

fn build_session(
    target: TargetFunction,
    model: &ModelSpec,
    seed: u64,
) -> Result<OracleSession> {
    match model.oracle.as_str() {
        "mq" => OracleSession::new(target, Mode::Mq, seed),
        "uq" => OracleSession::new(target, Mode::Uq, seed),
        "rw" => OracleSession::new(target, Mode::Rw, seed),
        "crw" => {
            let n = target.alphabet().dim();
            let cycle = model
                .cycle
                .clone()
                .unwrap_or_else(|| crate::oracles::descending_cycle(n));
            OracleSession::new_crw(target, cycle, seed)
        }
        "ns" => {
            let rho = model
                .rho
                .ok_or_else(|| Error::parameter("model: `rho` is required for the ns oracle"))?;
            OracleSession::new(target, Mode::Ns(rho), seed)
        }
        other => Err(Error::parameter(format!(
            "model: unknown oracle '{other}' (expected mq, uq, rw, crw or ns)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

/// Executes a run and writes all outputs under `out_dir` atomically.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(out_dir)?;
    let mut stages: Vec<StageMetrics> = Vec::new();
    let result = match config.command {
        Command::Transform => run_transform(config, out_dir, &mut stages)?,
        Command::Estimate => run_estimate(config, &mut stages)?,
        Command::Learn => run_learn(config, out_dir, &mut stages)?,
        Command::Experiment => run_experiment(config, out_dir, &mut stages)?,
    };
    let report = RunReport {
        config: config.clone(),
        stages,
        result,
    };
    write_atomic(&out_dir.join("report.json"), &report.to_json()?)?;
    Ok(report)
}

fn run_transform(
    config: &RunConfig,
    out_dir: &Path,
    stages: &mut Vec<StageMetrics>,
) -> Result<ResultPayload> {
    let target = build_target(&config.target, config.seed)?;
    let spectrum = transform(&target)?;
    let mut csv = Vec::new();
    spectrum.write_csv(&mut csv)?;
    let path = out_dir.join("spectrum.csv");
    write_atomic(&path, &String::from_utf8_lossy(&csv))?;
    stages.push(StageMetrics {
        name: "transform".to_string(),
        samples: target.alphabet().exact_size()?,
        truncated: false,
    });
    Ok(ResultPayload::Spectrum {
        path,
        entries: spectrum.iter().count(),
        parseval_mass: spectrum.parseval_mass(),
    })
}

fn run_estimate(config: &RunConfig, stages: &mut Vec<StageMetrics>) -> Result<ResultPayload> {
    let spec = config
        .estimate
        .as_ref()
        .ok_or_else(|| Error::parameter("estimate: an `estimate` section is required"))?;
    let target = build_target(&config.target, config.seed)?;
    let alphabet = target.alphabet();
    let mut session = build_session(target, &config.model, config.seed)?;
    let lambda = config.algorithm.lambda.unwrap_or(0.05);
    let delta = config.algorithm.delta.unwrap_or(0.05);
    let cfg = EstimatorConfig::unit(lambda, delta)?;
    let (estimate, imaginary) = match spec.quantity.as_str() {
        "coefficient" => {
            let digits = spec
                .freq
                .clone()
                .ok_or_else(|| Error::parameter("estimate: `freq` is required"))?;
            let a = FreqIndex::new(alphabet, digits)?;
            let c = estimate_coefficient(&mut session, &a, &cfg)?;
            (c.re, Some(c.im))
        }
        "prefix_energy" => {
            let prefix = spec
                .prefix
                .clone()
                .ok_or_else(|| Error::parameter("estimate: `prefix` is required"))?;
            (
                estimate_prefix_energy_crw(&mut session, &prefix, &cfg)?,
                None,
            )
        }
        "t" => {
            let coords = spec.coords.clone().unwrap_or_default();
            (estimate_t_ns(&mut session, &coords, &cfg)?, None)
        }
        "t_prime" => {
            let coords = spec.coords.clone().unwrap_or_default();
            let rho = match session.mode() {
                Mode::Ns(rho) => rho,
                _ => return Err(Error::contract("t_prime estimation needs an NS session")),
            };
            let budget = default_rejection_budget(rho, coords.len());
            (
                estimate_t_prime_ns(&mut session, &coords, &cfg, budget)?,
                None,
            )
        }
        other => {
            return Err(Error::parameter(format!(
                "estimate: unknown quantity '{other}'"
            )))
        }
    };
    stages.push(StageMetrics {
        name: "estimate".to_string(),
        samples: session.query_count(),
        truncated: false,
    });
    Ok(ResultPayload::Estimate {
        quantity: spec.quantity.clone(),
        estimate,
        imaginary,
        lambda,
        delta,
        samples: session.query_count(),
    })
}

fn run_learn(
    config: &RunConfig,
    out_dir: &Path,
    stages: &mut Vec<StageMetrics>,
) -> Result<ResultPayload> {
    let target = build_target(&config.target, config.seed)?;
    let epsilon = config.algorithm.epsilon.unwrap_or(0.1);
    let delta = config.algorithm.delta.unwrap_or(0.1);
    let mut params = LearnParams::new(epsilon, delta, config.seed)?;
    params.theta = config.algorithm.theta;
    params.degree_cap = config.algorithm.degree_cap;
    if let Some(r) = config.algorithm.max_rounds {
        params.max_rounds = r;
    }
    let report = match config.model.oracle.as_str() {
        "crw" => learn_top_crw(&target, &params)?,
        "ns" => {
            let rho = config
                .model
                .rho
                .ok_or_else(|| Error::parameter("model: `rho` is required for the ns oracle"))?;
            learn_ubox_ns(&target, rho, &params)?
        }
        other => {
            return Err(Error::parameter(format!(
                "learn: oracle '{other}' has no learning pipeline (use crw or ns)"
            )))
        }
    };
    let path = out_dir.join("hypothesis.txt");
    write_atomic(&path, &report.hypothesis.to_text())?;
    let error = if target.alphabet().is_exact_mode() {
        ErrorMeasure {
            value: report.hypothesis.error_exact(&target)?,
            kind: "exact".to_string(),
            lambda: None,
            delta: None,
        }
    } else {
        ErrorMeasure {
            value: report.estimated_error,
            kind: "estimated".to_string(),
            lambda: Some(epsilon / 4.0),
            delta: Some(delta / 2.0),
        }
    };
    stages.push(StageMetrics {
        name: "learn".to_string(),
        samples: 0,
        truncated: report.truncated,
    });
    Ok(ResultPayload::Hypothesis {
        path,
        terms: report.hypothesis.terms().len(),
        rounds: report.rounds,
        succeeded: report.succeeded,
        error,
        failure: report.failure.clone(),
    })
}

fn run_experiment(
    config: &RunConfig,
    out_dir: &Path,
    stages: &mut Vec<StageMetrics>,
) -> Result<ResultPayload> {
    let spec = config
        .experiment
        .as_ref()
        .ok_or_else(|| Error::parameter("experiment: an `experiment` section is required"))?;
    let mut csv = String::from("rho,n,samples,empirical,analytic\n");
    let mut rows = 0usize;
    let mut total = 0u64;
    for (i, &rho) in spec.rhos.iter().enumerate() {
        for (j, &n) in spec.ns.iter().enumerate() {
            let seed = config
                .seed
                .wrapping_add((i * spec.ns.len() + j) as u64);
            let r = collision_decay_experiment(rho, n, spec.samples, seed);
            csv.push_str(&format!(
                "{},{},{},{:.16e},{:.16e}\n",
                r.rho, r.n, r.samples, r.empirical, r.analytic
            ));
            rows += 1;
            total += spec.samples;
        }
    }
    let path = out_dir.join("experiment.csv");
    write_atomic(&path, &csv)?;
    stages.push(StageMetrics {
        name: "collision_decay".to_string(),
        samples: total,
        truncated: false,
    });
    Ok(ResultPayload::Experiment { path, rows })
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

/// Field-wise diff of two reports of the same command type. Numeric fields
/// compare within `tolerance`; an empty result means the reports agree.
pub fn compare(a: &RunReport, b: &RunReport, tolerance: f64) -> Result<Vec<String>> {
    if a.config.command != b.config.command {
        return Err(Error::contract(
            "cannot compare reports of different command types",
        ));
    }
    let mut diffs = Vec::new();
    match (&a.result, &b.result) {
        (
            ResultPayload::Spectrum { path: pa, entries: ea, parseval_mass: ma },
            ResultPayload::Spectrum { path: pb, entries: eb, parseval_mass: mb },
        ) => {
            if (ma - mb).abs() > tolerance {
                diffs.push(format!("parseval_mass: {ma} vs {mb}"));
            }
            if ea != eb {
                diffs.push(format!("entries: {ea} vs {eb}"));
            }
            if let Some(dev) = max_spectrum_deviation(&a.config, pa, pb)? {
                if dev > tolerance {
                    diffs.push(format!("max coefficient deviation: {dev:.6e}"));
                }
            }
        }
        (
            ResultPayload::Estimate { quantity: qa, estimate: ea, .. },
            ResultPayload::Estimate { quantity: qb, estimate: eb, .. },
        ) => {
            if qa != qb {
                diffs.push(format!("quantity: {qa} vs {qb}"));
            } else if (ea - eb).abs() > tolerance {
                diffs.push(format!("estimate: {ea} vs {eb}"));
            }
        }
        (
            ResultPayload::Hypothesis { error: ea, succeeded: sa, rounds: ra, .. },
            ResultPayload::Hypothesis { error: eb, succeeded: sb, rounds: rb, .. },
        ) => {
            if (ea.value - eb.value).abs() > tolerance {
                diffs.push(format!("error: {} vs {}", ea.value, eb.value));
            }
            if sa != sb {
                diffs.push(format!("succeeded: {sa} vs {sb}"));
            }
            if ra != rb {
                diffs.push(format!("rounds: {ra} vs {rb}"));
            }
        }
        (
            ResultPayload::Experiment { rows: ra, path: pa },
            ResultPayload::Experiment { rows: rb, path: pb },
        ) => {
            if ra != rb {
                diffs.push(format!("rows: {ra} vs {rb}"));
            } else if let Some(dev) = max_csv_deviation(pa, pb)? {
                if dev > tolerance {
                    diffs.push(format!("max cell deviation: {dev:.6e}"));
                }
            }
        }
        _ => {
            return Err(Error::contract(
                "cannot compare reports with different result payloads",
            ))
        }
    }
    Ok(diffs)
}

fn max_spectrum_deviation(
    config: &RunConfig,
    path_a: &Path,
    path_b: &Path,
) -> Result<Option<f64>> {
    if !path_a.exists() || !path_b.exists() {
        return Ok(None);
    }
    let target = build_target(&config.target, config.seed)?;
    let alphabet = target.alphabet();
    let sa = Spectrum::read_csv(alphabet, &std::fs::read_to_string(path_a)?)?;
    let sb = Spectrum::read_csv(alphabet, &std::fs::read_to_string(path_b)?)?;
    let mut dev = 0.0f64;
    for (f, c) in sa.iter() {
        dev = dev.max((c - sb.get(f)).norm());
    }
    for (f, c) in sb.iter() {
        dev = dev.max((c - sa.get(f)).norm());
    }
    Ok(Some(dev))
}

fn max_csv_deviation(path_a: &Path, path_b: &Path) -> Result<Option<f64>> {
    if !path_a.exists() || !path_b.exists() {
        return Ok(None);
    }
    let ta = std::fs::read_to_string(path_a)?;
    let tb = std::fs::read_to_string(path_b)?;
    let mut dev = 0.0f64;
    for (la, lb) in ta.lines().skip(1).zip(tb.lines().skip(1)) {
        for (ca, cb) in la.split(',').zip(lb.split(',')) {
            if let (Ok(va), Ok(vb)) = (ca.parse::<f64>(), cb.parse::<f64>()) {
                dev = dev.max((va - vb).abs());
            }
        }
    }
    Ok(Some(dev))
}

/// Process exit code for a run result, per the documented convention:
/// 0 success, 2 configuration error, 3 learning failure, 4 resource limit.
pub fn exit_code(outcome: &Result<RunReport>) -> i32 {
    match outcome {
        Ok(report) => match &report.result {
            ResultPayload::Hypothesis { succeeded: false, .. } => 3,
            _ => 0,
        },
        Err(Error::Resource(_)) => 4,
        Err(_) => 2,
    }
}
