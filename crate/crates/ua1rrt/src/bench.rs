//! Experiment harness: config files, seeded benchmark runs, statistics
//! and trajectory export.
//!
//! Statistics are split into two files so that repeated runs with the
//! same config and seeds are byte-identical: `stats.json` holds only
//! deterministic quantities, `timings.json` the wall-clock ones.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Duration;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baseline::{self, KnnConfig};
use crate::dynamics::{
    Acrobot, AcrobotParams, PlanarUav, SyntheticParams, SyntheticUa1, SystemModel, UavParams,
};
use crate::env::{BoxObstacle, Environment};
use crate::error::{Error, Result};
use crate::planner::{self, GoalSpec, PlannerConfig, StartState};
use crate::profile::Trajectory;

/// Prefix for environment-variable config overrides; `__` in the
/// variable name descends into nested keys, e.g.
/// `UA1RRT_PLANNER__DS=1e-4` sets `planner.ds`.
pub const ENV_PREFIX: &str = "UA1RRT_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemId {
    Uav,
    Acrobot,
    Synthetic,
}

impl SystemId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uav" => Ok(SystemId::Uav),
            "acrobot" => Ok(SystemId::Acrobot),
            "synthetic" => Ok(SystemId::Synthetic),
            other => Err(Error::Config(format!(
                "system: unknown id {other:?} (expected uav | acrobot | synthetic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerId {
    Ua1rrt,
    Knnrrt,
}

impl PlannerId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ua1rrt" => Ok(PlannerId::Ua1rrt),
            "knnrrt" => Ok(PlannerId::Knnrrt),
            other => Err(Error::Config(format!(
                "planner: unknown id {other:?} (expected ua1rrt | knnrrt)"
            ))),
        }
    }
}

/// Planner knobs as they appear in config files. `d_max` and `gamma`
/// default per system when omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerParams {
    pub max_iterations: usize,
    pub k: usize,
    pub d_max: Option<f64>,
    pub gamma: Option<f64>,
    pub n_rndm: usize,
    pub ds: f64,
    /// Defaults to `5 * ds`.
    pub s_dagger: Option<f64>,
    pub goal_bias_period: usize,
    pub kappa: f64,
    pub collision_resolution: usize,
    /// Baseline simulation step.
    pub dt: f64,
    /// Baseline hold-duration range, in steps of `dt`.
    pub min_steps: usize,
    pub max_steps: usize,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            max_iterations: 1_000_000,
            k: 10,
            d_max: None,
            gamma: None,
            n_rndm: 200,
            ds: 1e-3,
            s_dagger: None,
            goal_bias_period: 10,
            kappa: 3.0,
            collision_resolution: 64,
            dt: 1e-2,
            min_steps: 5,
            max_steps: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartConfig {
    pub q: Vec<f64>,
    #[serde(default)]
    pub qd: Option<Vec<f64>>,
    #[serde(default)]
    pub sdot: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalStateConfig {
    pub q: Vec<f64>,
    #[serde(default)]
    pub qd: Option<Vec<f64>>,
}

fn default_epsilon() -> f64 {
    1e-2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalConfig {
    pub states: Vec<GoalStateConfig>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_budget() -> f64 {
    60.0
}

/// Full benchmark configuration; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemId,
    pub planner: PlannerId,
    #[serde(default)]
    pub planner_params: PlannerParams,
    #[serde(default)]
    pub acrobot: AcrobotParams,
    #[serde(default)]
    pub uav: UavParams,
    #[serde(default)]
    pub synthetic: SyntheticParams,
    /// Overrides the per-system default environment.
    #[serde(default)]
    pub environment: Option<Environment>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Per-run wall-clock budget in seconds.
    #[serde(default = "default_budget")]
    pub budget_s: f64,
    #[serde(default)]
    pub start: Option<StartConfig>,
    #[serde(default)]
    pub goal: Option<GoalConfig>,
}

impl ExperimentConfig {
    pub fn new(system: SystemId, planner: PlannerId) -> Self {
        ExperimentConfig {
            system,
            planner,
            planner_params: PlannerParams::default(),
            acrobot: AcrobotParams::default(),
            uav: UavParams::default(),
            synthetic: SyntheticParams::default(),
            environment: None,
            seeds: Vec::new(),
            budget_s: default_budget(),
            start: None,
            goal: None,
        }
    }

    pub fn build_model(&self) -> Box<dyn SystemModel> {
        match self.system {
            SystemId::Uav => Box::new(PlanarUav::new(self.uav.clone())),
            SystemId::Acrobot => Box::new(Acrobot::new(self.acrobot.clone())),
            SystemId::Synthetic => Box::new(SyntheticUa1::from_params(self.synthetic.clone())),
        }
    }

    pub fn build_environment(&self) -> Environment {
        self.environment
            .clone()
            .unwrap_or_else(|| default_environment(self.system))
    }

    pub fn build_start(&self) -> Result<StartState> {
        match &self.start {
            None => Ok(default_start(self.system)),
            Some(s) => {
                let n = s.q.len();
                let qd = match &s.qd {
                    Some(v) => DVector::from_row_slice(v),
                    None => DVector::zeros(n),
                };
                Ok(StartState {
                    q: DVector::from_row_slice(&s.q),
                    qd,
                    sdot: s.sdot,
                })
            }
        }
    }

    pub fn build_goal(&self) -> Result<GoalSpec> {
        match &self.goal {
            None => Ok(default_goal(self.system)),
            Some(g) => Ok(GoalSpec {
                states: g
                    .states
                    .iter()
                    .map(|s| {
                        let qd = match &s.qd {
                            Some(v) => DVector::from_row_slice(v),
                            None => DVector::zeros(s.q.len()),
                        };
                        (DVector::from_row_slice(&s.q), qd)
                    })
                    .collect(),
                epsilon: g.epsilon,
            }),
        }
    }

    pub fn planner_config(&self) -> PlannerConfig {
        let p = &self.planner_params;
        let (d_max_default, gamma_default) = match self.system {
            SystemId::Acrobot => (2.0, 0.1),
            SystemId::Uav => (1.0, 1.0),
            SystemId::Synthetic => (1.0, 0.5),
        };
        PlannerConfig {
            max_iterations: p.max_iterations,
            k: p.k,
            d_max: p.d_max.unwrap_or(d_max_default),
            gamma: p.gamma.unwrap_or(gamma_default),
            n_rndm: p.n_rndm,
            ds: p.ds,
            s_dagger: p.s_dagger.unwrap_or(5.0 * p.ds),
            goal_bias_period: p.goal_bias_period,
            kappa: p.kappa,
            collision_resolution: p.collision_resolution,
            budget: Duration::from_secs_f64(self.budget_s),
        }
    }

    pub fn knn_config(&self) -> KnnConfig {
        let p = &self.planner_params;
        KnnConfig {
            max_iterations: p.max_iterations,
            k: p.k,
            n_rndm: p.n_rndm,
            dt: p.dt,
            min_steps: p.min_steps,
            max_steps: p.max_steps,
            goal_bias_period: p.goal_bias_period,
            budget: Duration::from_secs_f64(self.budget_s),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.planner_params;
        if !(self.budget_s > 0.0) {
            return Err(Error::Config(format!(
                "budget_s: must be positive, got {}",
                self.budget_s
            )));
        }
        if !(p.ds > 0.0 && p.ds <= 1.0) {
            return Err(Error::Config(format!(
                "planner_params.ds: must be in (0, 1], got {}",
                p.ds
            )));
        }
        if let Some(sd) = p.s_dagger {
            if !(sd > 0.0 && sd <= 1.0) {
                return Err(Error::Config(format!(
                    "planner_params.s_dagger: must be in (0, 1], got {sd}"
                )));
            }
        }
        if p.k == 0 {
            return Err(Error::Config("planner_params.k: must be >= 1".into()));
        }
        if p.n_rndm == 0 {
            return Err(Error::Config("planner_params.n_rndm: must be >= 1".into()));
        }
        if let Some(d) = p.d_max {
            if !(d > 0.0) {
                return Err(Error::Config(format!(
                    "planner_params.d_max: must be positive, got {d}"
                )));
            }
        }
        if let Some(g) = p.gamma {
            if !(g >= 0.0) {
                return Err(Error::Config(format!(
                    "planner_params.gamma: must be non-negative, got {g}"
                )));
            }
        }
        if !(p.kappa > 0.0) {
            return Err(Error::Config(format!(
                "planner_params.kappa: must be positive, got {}",
                p.kappa
            )));
        }
        if p.min_steps == 0 || p.max_steps < p.min_steps {
            return Err(Error::Config(
                "planner_params.min_steps/max_steps: need 1 <= min_steps <= max_steps".into(),
            ));
        }
        let model = self.build_model();
        let n = model.dof();
        let env = self.build_environment();
        env.validate()?;
        if env.dim() != n {
            return Err(Error::Config(format!(
                "environment.sample_lo: dimension {} does not match system dof {n}",
                env.dim()
            )));
        }
        if let Some(s) = &self.start {
            if s.q.len() != n {
                return Err(Error::Config(format!(
                    "start.q: dimension {} does not match system dof {n}",
                    s.q.len()
                )));
            }
            if let Some(qd) = &s.qd {
                if qd.len() != n {
                    return Err(Error::Config(format!(
                        "start.qd: dimension {} does not match system dof {n}",
                        qd.len()
                    )));
                }
            }
            if s.sdot < 0.0 {
                return Err(Error::Config(format!(
                    "start.sdot: must be non-negative, got {}",
                    s.sdot
                )));
            }
        }
        if let Some(g) = &self.goal {
            if g.states.is_empty() {
                return Err(Error::Config("goal.states: must be non-empty".into()));
            }
            if !(g.epsilon > 0.0) {
                return Err(Error::Config(format!(
                    "goal.epsilon: must be positive, got {}",
                    g.epsilon
                )));
            }
            for (i, st) in g.states.iter().enumerate() {
                if st.q.len() != n {
                    return Err(Error::Config(format!(
                        "goal.states[{i}].q: dimension {} does not match system dof {n}",
                        st.q.len()
                    )));
                }
                if let Some(qd) = &st.qd {
                    if qd.len() != n {
                        return Err(Error::Config(format!(
                            "goal.states[{i}].qd: dimension {} does not match system dof {n}",
                            qd.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Default environments. The UAV corridor is a 4 m x 1 m tunnel with
/// three alternating floor/ceiling boxes leaving 0.4 m gaps; the
/// acrobot has its elbow limited to [-pi, pi].
pub fn default_environment(system: SystemId) -> Environment {
    let pi = std::f64::consts::PI;
    match system {
        SystemId::Acrobot => {
            let mut env = Environment::free_space(vec![-4.0 * pi, -pi], vec![4.0 * pi, pi]);
            env.limits = vec![None, Some((-pi, pi))];
            env
        }
        SystemId::Uav => {
            let mut env =
                Environment::free_space(vec![0.0, 0.0, -pi], vec![4.0, 1.0, pi]);
            env.limits = vec![Some((0.0, 4.0)), Some((0.0, 1.0)), None];
            env.obstacles = vec![
                BoxObstacle {
                    coords: vec![0, 1],
                    lo: vec![0.8, 0.0],
                    hi: vec![1.2, 0.6],
                },
                BoxObstacle {
                    coords: vec![0, 1],
                    lo: vec![1.8, 0.4],
                    hi: vec![2.2, 1.0],
                },
                BoxObstacle {
                    coords: vec![0, 1],
                    lo: vec![2.8, 0.0],
                    hi: vec![3.2, 0.6],
                },
            ];
            env
        }
        SystemId::Synthetic => Environment::free_space(vec![-1.0, -1.0], vec![1.0, 1.0]),
    }
}

pub fn default_start(system: SystemId) -> StartState {
    match system {
        SystemId::Acrobot => StartState::at_rest(DVector::from_row_slice(&[0.0, 0.0])),
        SystemId::Uav => StartState::at_rest(DVector::from_row_slice(&[0.2, 0.5, 0.0])),
        SystemId::Synthetic => StartState::at_rest(DVector::from_row_slice(&[0.0, 0.0])),
    }
}

/// Acrobot default: upright goal family `q = (pi + 2 pi p, 0)` for
/// `p = 0, 1, -1, -2`, at rest.
pub fn default_goal(system: SystemId) -> GoalSpec {
    let pi = std::f64::consts::PI;
    match system {
        SystemId::Acrobot => GoalSpec {
            states: [0.0_f64, 1.0, -1.0, -2.0]
                .iter()
                .map(|p| {
                    (
                        DVector::from_row_slice(&[pi + 2.0 * pi * p, 0.0]),
                        DVector::from_row_slice(&[0.0, 0.0]),
                    )
                })
                .collect(),
            epsilon: 1e-2,
        },
        SystemId::Uav => GoalSpec::single(
            DVector::from_row_slice(&[3.8, 0.5, 0.0]),
            DVector::from_row_slice(&[0.0, 0.0, 0.0]),
        ),
        SystemId::Synthetic => GoalSpec::single(
            DVector::from_row_slice(&[0.5, 0.0]),
            DVector::from_row_slice(&[0.0, 0.0]),
        ),
    }
}

/// Applies `KEY=value` overrides to a JSON config value. Keys are
/// lower-cased after the prefix is stripped; `__` separates nesting
/// levels. Values parse as JSON where possible, else as strings.
pub fn apply_overrides<I>(value: &mut Value, prefix: &str, vars: I)
where
    I: IntoIterator<Item = (String, String)>,
{
    for (key, raw) in vars {
        let Some(stripped) = key.strip_prefix(prefix) else {
            continue;
        };
        if stripped.is_empty() {
            continue;
        }
        let path: Vec<String> = stripped.split("__").map(|p| p.to_lowercase()).collect();
        let parsed: Value =
            serde_json::from_str(&raw).unwrap_or_else(|_| Value::String(raw.clone()));
        let mut cursor = &mut *value;
        for (i, part) in path.iter().enumerate() {
            if !cursor.is_object() {
                *cursor = Value::Object(serde_json::Map::new());
            }
            let map = cursor.as_object_mut().unwrap();
            if i + 1 == path.len() {
                map.insert(part.clone(), parsed);
                break;
            }
            cursor = map
                .entry(part.clone())
                .or_insert_with(|| Value::Object(serde_json::Map::new()));
        }
    }
}

/// Loads a JSON config file, applies `UA1RRT_*` environment overrides
/// and validates the result.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    let mut value: Value = serde_json::from_str(&text)?;
    apply_overrides(&mut value, ENV_PREFIX, std::env::vars());
    let cfg: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Per-seed statistics that are a pure function of config and seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunStats {
    pub seed: u64,
    pub success: bool,
    pub iterations: usize,
    pub vertices: usize,
    /// Re-evaluated post hoc, not trusted from the planner.
    pub feasible_edges_pct: f64,
    pub trajectory_duration_s: Option<f64>,
}

/// Per-seed wall-clock measurements (machine-dependent).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTimings {
    pub seed: u64,
    pub run_time_s: f64,
    pub mean_steer_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_pct: f64,
    pub feasible_edges_pct_mean: f64,
    pub feasible_edges_pct_min: f64,
    pub iterations_mean: f64,
    pub vertices_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingsSummary {
    pub run_time_mean_s: f64,
    pub run_time_max_s: f64,
    pub mean_steer_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsFile {
    pub system: SystemId,
    pub planner: PlannerId,
    pub runs: Vec<RunStats>,
    pub summary: StatsSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingsFile {
    pub runs: Vec<RunTimings>,
    pub summary: TimingsSummary,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub stats: RunStats,
    pub timings: RunTimings,
    pub trajectory: Option<Trajectory>,
}

/// Runs one seeded planning attempt under the config.
pub fn run_single(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutcome> {
    let model = cfg.build_model();
    let env = cfg.build_environment();
    let start = cfg.build_start()?;
    let goal = cfg.build_goal()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    match cfg.planner {
        PlannerId::Ua1rrt => {
            let pcfg = cfg.planner_config();
            let report = planner::plan(model.as_ref(), &env, &start, &goal, &pcfg, &mut rng)?;
            let (feasible, total) =
                planner::evaluate_edge_feasibility(model.as_ref(), &report.tree, pcfg.ds, 1e-9);
            let pct = if total == 0 {
                100.0
            } else {
                100.0 * feasible as f64 / total as f64
            };
            let success = report.succeeded();
            Ok(RunOutcome {
                stats: RunStats {
                    seed,
                    success,
                    iterations: report.iterations,
                    vertices: report.tree.len(),
                    feasible_edges_pct: pct,
                    trajectory_duration_s: report.trajectory.as_ref().map(|t| t.duration()),
                },
                timings: RunTimings {
                    seed,
                    run_time_s: if success {
                        report.elapsed.as_secs_f64()
                    } else {
                        cfg.budget_s
                    },
                    mean_steer_ms: report.mean_steer_time_ms(),
                },
                trajectory: report.trajectory,
            })
        }
        PlannerId::Knnrrt => {
            let kcfg = cfg.knn_config();
            let report =
                baseline::knn_rrt_plan(model.as_ref(), &env, &start, &goal, &kcfg, &mut rng)?;
            let pct = knn_feasible_edges_pct(model.as_ref(), &env, &report.vertices, kcfg.dt);
            let success = report.succeeded();
            Ok(RunOutcome {
                stats: RunStats {
                    seed,
                    success,
                    iterations: report.iterations,
                    vertices: report.vertices.len(),
                    feasible_edges_pct: pct,
                    trajectory_duration_s: report.trajectory.as_ref().map(|t| t.duration()),
                },
                timings: RunTimings {
                    seed,
                    run_time_s: if success {
                        report.elapsed.as_secs_f64()
                    } else {
                        cfg.budget_s
                    },
                    mean_steer_ms: 0.0,
                },
                trajectory: report.trajectory,
            })
        }
    }
}

fn knn_feasible_edges_pct(
    model: &dyn SystemModel,
    env: &Environment,
    vertices: &[baseline::KnnVertex],
    dt: f64,
) -> f64 {
    let mut feasible = 0;
    let mut total = 0;
    let bounds = model.bounds();
    for v in vertices {
        let (Some(p), Some((u, steps))) = (v.parent, v.control.as_ref()) else {
            continue;
        };
        total += 1;
        let mut q = vertices[p].q.clone();
        let mut qd = vertices[p].qd.clone();
        let mut ok = true;
        for _ in 0..*steps {
            let (nq, nqd) = baseline::rk4_step(model, &q, &qd, u, dt);
            q = nq;
            qd = nqd;
            let in_box = (0..qd.len())
                .all(|i| qd[i] >= bounds.qd_lower[i] && qd[i] <= bounds.qd_upper[i]);
            if env.in_collision(&q) || !in_box {
                ok = false;
                break;
            }
        }
        if ok && (&q - &v.q).norm() <= 1e-9 && (&qd - &v.qd).norm() <= 1e-9 {
            feasible += 1;
        }
    }
    if total == 0 {
        100.0
    } else {
        100.0 * feasible as f64 / total as f64
    }
}

#[derive(Debug)]
pub struct BenchResult {
    pub stats: StatsFile,
    pub timings: TimingsFile,
    pub trajectories: Vec<(u64, Trajectory)>,
}

impl BenchResult {
    /// Writes stats.json, timings.json and one trajectory CSV per
    /// successful seed into `out_dir`.
    pub fn write(&self, out_dir: &Path) -> Result<()> {
        fs::create_dir_all(out_dir)?;
        fs::write(
            out_dir.join("stats.json"),
            serde_json::to_string_pretty(&self.stats)?,
        )?;
        fs::write(
            out_dir.join("timings.json"),
            serde_json::to_string_pretty(&self.timings)?,
        )?;
        for (seed, traj) in &self.trajectories {
            export_trajectory(traj, &out_dir.join(format!("trajectory_seed{seed}.csv")))?;
        }
        Ok(())
    }
}

/// Runs every seed in the config sequentially (each run is internally
/// parallel over steering candidates) and aggregates the statistics.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<BenchResult> {
    cfg.validate()?;
    let mut stats = Vec::new();
    let mut timings = Vec::new();
    let mut trajectories = Vec::new();
    for &seed in &cfg.seeds {
        let outcome = run_single(cfg, seed)?;
        if let Some(traj) = outcome.trajectory {
            trajectories.push((seed, traj));
        }
        stats.push(outcome.stats);
        timings.push(outcome.timings);
    }
    Ok(BenchResult {
        stats: StatsFile {
            system: cfg.system,
            planner: cfg.planner,
            summary: summarize_stats(&stats),
            runs: stats,
        },
        timings: TimingsFile {
            summary: summarize_timings(&timings),
            runs: timings,
        },
        trajectories,
    })
}

fn summarize_stats(runs: &[RunStats]) -> StatsSummary {
    let n = runs.len();
    if n == 0 {
        return StatsSummary {
            runs: 0,
            successes: 0,
            success_pct: 0.0,
            feasible_edges_pct_mean: 0.0,
            feasible_edges_pct_min: 0.0,
            iterations_mean: 0.0,
            vertices_mean: 0.0,
        };
    }
    let successes = runs.iter().filter(|r| r.success).count();
    let mean = |f: &dyn Fn(&RunStats) -> f64| runs.iter().map(f).sum::<f64>() / n as f64;
    StatsSummary {
        runs: n,
        successes,
        success_pct: 100.0 * successes as f64 / n as f64,
        feasible_edges_pct_mean: mean(&|r| r.feasible_edges_pct),
        feasible_edges_pct_min: runs
            .iter()
            .map(|r| r.feasible_edges_pct)
            .fold(f64::INFINITY, f64::min),
        iterations_mean: mean(&|r| r.iterations as f64),
        vertices_mean: mean(&|r| r.vertices as f64),
    }
}

fn summarize_timings(runs: &[RunTimings]) -> TimingsSummary {
    let n = runs.len();
    if n == 0 {
        return TimingsSummary {
            run_time_mean_s: 0.0,
            run_time_max_s: 0.0,
            mean_steer_ms: 0.0,
        };
    }
    TimingsSummary {
        run_time_mean_s: runs.iter().map(|r| r.run_time_s).sum::<f64>() / n as f64,
        run_time_max_s: runs.iter().map(|r| r.run_time_s).fold(0.0, f64::max),
        mean_steer_ms: runs.iter().map(|r| r.mean_steer_ms).sum::<f64>() / n as f64,
    }
}

/// Writes a trajectory as CSV with columns
/// `t, q_1..q_n, qd_1..qd_n, tau_1..tau_m`, 17 significant digits.
pub fn export_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path)?;
    let n = traj.q.first().map_or(0, |q| q.len());
    let m = traj.tau.first().map_or(0, |t| t.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("q_{i}")));
    header.extend((1..=n).map(|i| format!("qd_{i}")));
    header.extend((1..=m).map(|i| format!("tau_{i}")));
    writeln!(file, "{}", header.join(","))?;
    for i in 0..traj.len() {
        let mut row = vec![format!("{:.16e}", traj.t[i])];
        row.extend(traj.q[i].iter().map(|x| format!("{x:.16e}")));
        row.extend(traj.qd[i].iter().map(|x| format!("{x:.16e}")));
        row.extend(traj.tau[i].iter().map(|x| format!("{x:.16e}")));
        writeln!(file, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a trajectory CSV written by [`export_trajectory`].
pub fn import_trajectory(path: &Path) -> Result<Trajectory> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("trajectory file: missing header".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let n = cols.iter().filter(|c| c.starts_with("q_")).count();
    let m = cols.iter().filter(|c| c.starts_with("tau_")).count();
    let mut traj = Trajectory {
        t: Vec::new(),
        q: Vec::new(),
        qd: Vec::new(),
        tau: Vec::new(),
    };
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    Error::Config(format!("trajectory file: bad number on line {}", lineno + 2))
                })
            })
            .collect::<Result<_>>()?;
        if vals.len() != 1 + 2 * n + m {
            return Err(Error::Config(format!(
                "trajectory file: wrong column count on line {}",
                lineno + 2
            )));
        }
        traj.t.push(vals[0]);
        traj.q.push(DVector::from_row_slice(&vals[1..1 + n]));
        traj.qd
            .push(DVector::from_row_slice(&vals[1 + n..1 + 2 * n]));
        traj.tau.push(DVector::from_row_slice(&vals[1 + 2 * n..]));
    }
    Ok(traj)
}
