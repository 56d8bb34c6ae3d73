//! Experiment plumbing for the UAV-VLC planning toolkit: scenario
//! generation, config/scenario/solution files, sweep execution, and result
//! tables.
//!
//! File formats are versioned JSON documents (`uavlc-config/1`,
//! `uavlc-scenario/1`, `uavlc-solution/1`); sweep results land as a flat
//! `results.csv` for plotting, a `results.jsonl` record stream, a
//! `solutions.jsonl` stream with every placement/association for
//! re-validation, and an aggregated `summary.csv`. Everything except the
//! wall-time column is deterministic in the configured seeds.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use uavlc_core::plan::{baseline_fixed_placement, plan};
use uavlc_core::{
    Error, NetworkParams, PlanResult, PlannerConfig, Point2, Scenario, SeededRng, Serve,
};

/// Format tag of experiment configuration files.
pub const CONFIG_FORMAT: &str = "uavlc-config/1";
/// Format tag of scenario files.
pub const SCENARIO_FORMAT: &str = "uavlc-scenario/1";
/// Format tag of solution files.
pub const SOLUTION_FORMAT: &str = "uavlc-solution/1";

/// The sweep axis of an experiment: vary the objective weights, the per-UAV
/// capacity, or nothing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum Sweep {
    /// A single point per seed with the base parameters.
    None,
    /// One point per (weight_rate, weight_d2d) pair.
    Weights(Vec<(f64, f64)>),
    /// One point per capacity value.
    Capacity(Vec<usize>),
}

impl Sweep {
    /// Expands the sweep into `(label, params)` points over `base`.
    pub fn points(&self, base: &NetworkParams) -> Vec<(String, NetworkParams)> {
        match self {
            Sweep::None => vec![("base".to_string(), *base)],
            Sweep::Weights(pairs) => pairs
                .iter()
                .map(|&(a, b)| {
                    let params = NetworkParams { weight_rate: a, weight_d2d: b, ..*base };
                    (format!("a={a},b={b}"), params)
                })
                .collect(),
            Sweep::Capacity(values) => values
                .iter()
                .map(|&k| (format!("k={k}"), NetworkParams { capacity: k, ..*base }))
                .collect(),
        }
    }

    fn validate(&self, base: &NetworkParams) -> Result<(), Error> {
        let points = self.points(base);
        if points.is_empty() {
            return Err(Error::InvalidParameter {
                name: "sweep",
                reason: "sweep axis has no values".into(),
            });
        }
        for (_, params) in points {
            params.validate()?;
        }
        Ok(())
    }
}

/// A complete experiment description, as stored in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Must be [`CONFIG_FORMAT`].
    pub format: String,
    /// Base network parameters; sweep points override single fields.
    pub params: NetworkParams,
    /// Number of users drawn per scenario.
    pub user_count: usize,
    /// Scenario seeds; each seed also seeds the planner for its point.
    pub seeds: Vec<u64>,
    pub sweep: Sweep,
    /// Where `save_results` puts the output tables.
    pub output_dir: PathBuf,
    /// Planner knobs. The `seed` field is ignored during sweeps — each
    /// sweep point runs with its scenario's seed.
    #[serde(default)]
    pub planner: PlannerConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.format != CONFIG_FORMAT {
            return Err(Error::InvalidParameter {
                name: "format",
                reason: format!("expected \"{CONFIG_FORMAT}\", got \"{}\"", self.format),
            });
        }
        self.params.validate()?;
        if self.user_count < 1 {
            return Err(Error::InvalidParameter {
                name: "user_count",
                reason: "must be at least 1".into(),
            });
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter {
                name: "seeds",
                reason: "must list at least one seed".into(),
            });
        }
        self.sweep.validate(&self.params)?;
        self.planner.validate()
    }
}

/// The built-in experiment: reference parameters, 200 users, ten seeds, no
/// sweep, output under `results/`.
pub fn default_spec() -> ExperimentSpec {
    ExperimentSpec {
        format: CONFIG_FORMAT.to_string(),
        params: NetworkParams::default(),
        user_count: 200,
        seeds: (0..10).collect(),
        sweep: Sweep::None,
        output_dir: PathBuf::from("results"),
        planner: PlannerConfig::default(),
    }
}

/// A scenario file: the versioned wrapper around a [`Scenario`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Must be [`SCENARIO_FORMAT`].
    pub format: String,
    pub scenario: Scenario,
}

/// A solution file: everything needed to re-validate one planning result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    /// Must be [`SOLUTION_FORMAT`].
    pub format: String,
    /// Sweep-point label the solution belongs to (`"base"` outside sweeps).
    pub sweep: String,
    /// `"plan"`, `"baseline"`, or `"oracle"`.
    pub solver: String,
    pub scenario: Scenario,
    pub planner: PlannerConfig,
    pub result: PlanResult,
}

/// Draws `n` users uniformly over the parameter area, reproducibly in `seed`.
pub fn generate_scenario(params: NetworkParams, n: usize, seed: u64) -> Result<Scenario, Error> {
    let mut rng = SeededRng::new(seed);
    let users: Vec<Point2> = (0..n)
        .map(|_| {
            Point2::new(rng.uniform(0.0, params.area_width), rng.uniform(0.0, params.area_height))
        })
        .collect();
    Scenario::new(users, params, seed)
}

/// One row of the flat result table. Wall time is the last column and is
/// the only field excluded from determinism comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Sweep-point label (`"base"` when the sweep axis is `none`).
    pub sweep: String,
    /// Scenario seed (also the planner seed for this point).
    pub seed: u64,
    /// `"plan"` or `"baseline"`.
    pub solver: String,
    pub objective: f64,
    pub sum_rate: f64,
    pub d2d_count: usize,
    /// Number of UAV-served (centroid) users.
    pub served_centroids: usize,
    /// Worst illuminance margin (lux above the threshold) over UAV-served
    /// users; empty when nobody is UAV-served.
    pub min_margin: Option<f64>,
    /// Mean illuminance margin over UAV-served users.
    pub mean_margin: Option<f64>,
    /// Outer iterations the planner recorded.
    pub iterations: usize,
    pub feasible: bool,
    /// Failure note when the point could not run; numeric fields are zero
    /// in that case.
    pub error: Option<String>,
    /// Wall-clock time of this solver run, milliseconds.
    pub wall_ms: f64,
}

/// Min and mean illuminance margin (lux above `threshold`) over the
/// UAV-served users of a result; `None` when it serves no one directly.
pub fn illuminance_margins(result: &PlanResult, threshold: f64) -> (Option<f64>, Option<f64>) {
    let margins: Vec<f64> = result
        .association
        .serves
        .iter()
        .zip(&result.per_user_illuminance)
        .filter(|(s, _)| matches!(s, Serve::UavServed(_)))
        .map(|(_, &lux)| lux - threshold)
        .collect();
    if margins.is_empty() {
        return (None, None);
    }
    let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = margins.iter().sum::<f64>() / margins.len() as f64;
    (Some(min), Some(mean))
}

fn result_record(
    sweep: &str,
    seed: u64,
    solver: &str,
    threshold: f64,
    result: &PlanResult,
    wall_ms: f64,
) -> ResultRecord {
    let (min_margin, mean_margin) = illuminance_margins(result, threshold);
    ResultRecord {
        sweep: sweep.to_string(),
        seed,
        solver: solver.to_string(),
        objective: result.objective,
        sum_rate: result.sum_rate,
        d2d_count: result.d2d_count,
        served_centroids: result.association.uav_count(uavlc_core::UavId::Uav1)
            + result.association.uav_count(uavlc_core::UavId::Uav2),
        min_margin,
        mean_margin,
        iterations: result.trace.len(),
        feasible: result.feasible,
        error: None,
        wall_ms,
    }
}

fn error_record(sweep: &str, seed: u64, solver: &str, error: &Error) -> ResultRecord {
    ResultRecord {
        sweep: sweep.to_string(),
        seed,
        solver: solver.to_string(),
        objective: 0.0,
        sum_rate: 0.0,
        d2d_count: 0,
        served_centroids: 0,
        min_margin: None,
        mean_margin: None,
        iterations: 0,
        feasible: false,
        error: Some(error.to_string()),
        wall_ms: 0.0,
    }
}

/// Everything one experiment run produces: the flat records plus the full
/// solutions for re-validation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRun {
    pub records: Vec<ResultRecord>,
    pub solutions: Vec<SolutionFile>,
}

/// Runs one sweep point for one seed: the planner and the fixed-placement
/// baseline, in that order.
pub fn run_sweep_point(
    spec: &ExperimentSpec,
    label: &str,
    params: NetworkParams,
    seed: u64,
) -> (Vec<ResultRecord>, Vec<SolutionFile>) {
    let scenario = match generate_scenario(params, spec.user_count, seed) {
        Ok(s) => s,
        Err(e) => {
            // Record the failure on both solver rows and keep sweeping.
            return (
                vec![error_record(label, seed, "plan", &e), error_record(label, seed, "baseline", &e)],
                Vec::new(),
            );
        }
    };
    let cfg = PlannerConfig { seed, ..spec.planner };

    let mut records = Vec::with_capacity(2);
    let mut solutions = Vec::with_capacity(2);
    let runs: [(&str, fn(&Scenario, &PlannerConfig) -> PlanResult); 2] =
        [("plan", plan), ("baseline", baseline_fixed_placement)];
    for (solver, run) in runs {
        let start = Instant::now();
        let result = run(&scenario, &cfg);
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        records.push(result_record(label, seed, solver, params.illum_threshold, &result, wall_ms));
        solutions.push(SolutionFile {
            format: SOLUTION_FORMAT.to_string(),
            sweep: label.to_string(),
            solver: solver.to_string(),
            scenario: scenario.clone(),
            planner: cfg,
            result,
        });
    }
    (records, solutions)
}

/// Executes the full sweep: every (sweep point × seed), planner and
/// baseline each. Points run in parallel; the output is merged in
/// (sweep point, seed, solver) order, so the tables are independent of
/// scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentRun, Error> {
    spec.validate()?;
    let points = spec.sweep.points(&spec.params);

    let mut tasks = Vec::new();
    for (point_idx, (label, params)) in points.iter().enumerate() {
        for &seed in &spec.seeds {
            tasks.push((point_idx, label.clone(), *params, seed));
        }
    }

    let mut outputs: Vec<(usize, u64, (Vec<ResultRecord>, Vec<SolutionFile>))> = tasks
        .into_par_iter()
        .map(|(point_idx, label, params, seed)| {
            (point_idx, seed, run_sweep_point(spec, &label, params, seed))
        })
        .collect();
    outputs.sort_by_key(|(point_idx, seed, _)| (*point_idx, *seed));

    let mut run = ExperimentRun { records: Vec::new(), solutions: Vec::new() };
    for (_, _, (records, solutions)) in outputs {
        run.records.extend(records);
        run.solutions.extend(solutions);
    }
    Ok(run)
}

/// Aggregated view of one (sweep point, solver) group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub sweep: String,
    pub solver: String,
    pub runs: usize,
    pub feasible_runs: usize,
    pub mean_objective: f64,
    pub min_objective: f64,
    pub mean_sum_rate: f64,
    pub mean_d2d_count: f64,
    /// Mean of the per-run minimum illuminance margins (lux), over runs
    /// that served anyone directly.
    pub mean_min_margin: Option<f64>,
    /// Mean of the per-run mean illuminance margins (lux).
    pub mean_mean_margin: Option<f64>,
}

/// Groups records by (sweep, solver) in first-appearance order and reduces
/// each group to means and minima. Failed rows (with an error note) are
/// excluded from the aggregates but still counted in `runs`.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRecord> {
    let mut groups: Vec<(String, String, Vec<&ResultRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(s, v, _)| *s == r.sweep && *v == r.solver) {
            Some((_, _, rows)) => rows.push(r),
            None => groups.push((r.sweep.clone(), r.solver.clone(), vec![r])),
        }
    }

    groups
        .into_iter()
        .map(|(sweep, solver, rows)| {
            let ok: Vec<&&ResultRecord> = rows.iter().filter(|r| r.error.is_none()).collect();
            let denom = ok.len().max(1) as f64;
            let mean = |f: &dyn Fn(&ResultRecord) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / denom;
            let mins: Vec<f64> = ok.iter().filter_map(|r| r.min_margin).collect();
            let means: Vec<f64> = ok.iter().filter_map(|r| r.mean_margin).collect();
            SummaryRecord {
                sweep,
                solver,
                runs: rows.len(),
                feasible_runs: rows.iter().filter(|r| r.feasible).count(),
                mean_objective: mean(&|r| r.objective),
                min_objective: if ok.is_empty() {
                    0.0
                } else {
                    ok.iter().map(|r| r.objective).fold(f64::INFINITY, f64::min)
                },
                mean_sum_rate: mean(&|r| r.sum_rate),
                mean_d2d_count: mean(&|r| r.d2d_count as f64),
                mean_min_margin: (!mins.is_empty())
                    .then(|| mins.iter().sum::<f64>() / mins.len() as f64),
                mean_mean_margin: (!means.is_empty())
                    .then(|| means.iter().sum::<f64>() / means.len() as f64),
            }
        })
        .collect()
}

/// Reads and validates an experiment config.
///
/// Inside `params`, `noise_power_w` is accepted in place of `noise_sigma`
/// under the power-equals-variance convention: σ_w = √noise_power_w.
pub fn load_config(path: &Path) -> anyhow::Result<ExperimentSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    if let Some(params) = value.get_mut("params").and_then(|p| p.as_object_mut()) {
        if let Some(power) = params.remove("noise_power_w") {
            if params.contains_key("noise_sigma") {
                bail!(
                    "config {}: give either noise_sigma or noise_power_w, not both",
                    path.display()
                );
            }
            let power = power.as_f64().filter(|p| p.is_finite() && *p > 0.0).with_context(
                || format!("config {}: noise_power_w must be a positive number", path.display()),
            )?;
            params.insert("noise_sigma".to_string(), power.sqrt().into());
        }
    }
    let spec: ExperimentSpec = serde_json::from_value(value)
        .with_context(|| format!("parsing config {}", path.display()))?;
    spec.validate()
        .with_context(|| format!("validating config {}", path.display()))?;
    Ok(spec)
}

/// Writes an experiment config as pretty JSON.
pub fn save_config(spec: &ExperimentSpec, path: &Path) -> anyhow::Result<()> {
    write_json(spec, path).with_context(|| format!("writing config {}", path.display()))
}

/// Reads a scenario file and re-checks the scenario invariants.
pub fn load_scenario(path: &Path) -> anyhow::Result<ScenarioFile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing scenario {}", path.display()))?;
    if file.format != SCENARIO_FORMAT {
        bail!(
            "scenario {}: expected format \"{SCENARIO_FORMAT}\", got \"{}\"",
            path.display(),
            file.format
        );
    }
    let checked = Scenario::new(
        file.scenario.users.clone(),
        file.scenario.params,
        file.scenario.seed,
    )
    .with_context(|| format!("validating scenario {}", path.display()))?;
    Ok(ScenarioFile { format: file.format, scenario: checked })
}

pub fn save_scenario(file: &ScenarioFile, path: &Path) -> anyhow::Result<()> {
    write_json(file, path).with_context(|| format!("writing scenario {}", path.display()))
}

/// Reads solutions from a file holding either a single solution object or
/// one solution per line (`solutions.jsonl`).
pub fn load_solutions(path: &Path) -> anyhow::Result<Vec<SolutionFile>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading solutions {}", path.display()))?;
    let solutions: Vec<SolutionFile> = match serde_json::from_str::<SolutionFile>(&text) {
        Ok(single) => vec![single],
        Err(_) => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, line)| {
                serde_json::from_str(line)
                    .with_context(|| format!("parsing solution line {} of {}", i + 1, path.display()))
            })
            .collect::<anyhow::Result<_>>()?,
    };
    if solutions.is_empty() {
        bail!("{} holds no solutions", path.display());
    }
    for (i, s) in solutions.iter().enumerate() {
        if s.format != SOLUTION_FORMAT {
            bail!(
                "solution {} of {}: expected format \"{SOLUTION_FORMAT}\", got \"{}\"",
                i + 1,
                path.display(),
                s.format
            );
        }
    }
    Ok(solutions)
}

pub fn save_solution(file: &SolutionFile, path: &Path) -> anyhow::Result<()> {
    write_json(file, path).with_context(|| format!("writing solution {}", path.display()))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes `results.csv`, `results.jsonl`, `solutions.jsonl`, and
/// `summary.csv` into `dir` (creating it if needed).
pub fn save_results(run: &ExperimentRun, dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let csv_path = dir.join("results.csv");
    let mut w = csv::Writer::from_path(&csv_path)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    for r in &run.records {
        w.serialize(r)?;
    }
    w.flush()?;

    let jsonl_path = dir.join("results.jsonl");
    let mut f = fs::File::create(&jsonl_path)
        .with_context(|| format!("writing {}", jsonl_path.display()))?;
    for r in &run.records {
        writeln!(f, "{}", serde_json::to_string(r)?)?;
    }

    let sols_path = dir.join("solutions.jsonl");
    let mut f = fs::File::create(&sols_path)
        .with_context(|| format!("writing {}", sols_path.display()))?;
    for s in &run.solutions {
        writeln!(f, "{}", serde_json::to_string(s)?)?;
    }

    let summary_path = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&summary_path)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    for s in summarize(&run.records) {
        w.serialize(s)?;
    }
    w.flush()?;

    Ok(())
}
