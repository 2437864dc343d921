//! The UA1-RRT planner: tree construction, projected nearest-neighbour
//! metric, state-based steering over random cubics, goal testing and
//! final trajectory assembly.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::{pp_coefficients, recover_inputs, CoordinateKind, SystemModel};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::geometry::{generate_path, truncate, PathSegment, PathStart, TangentSampling};
use crate::profile::{
    integrate_path_profile, integrate_path_profile_summary, integrate_path_profile_summary_with,
    time_parameterize, PathDynamics, PathPoint, ProfileResult, ProfileScratch, Termination,
    Trajectory,
};

/// Rates below this are treated as rest for the C1 junction rule.
pub const REST_THETA: f64 = 1e-12;

/// A tree vertex. Configurations live in unwrapped space.
#[derive(Debug, Clone)]
pub struct Vertex {
    pub q: DVector<f64>,
    pub parent: Option<usize>,
    /// Connecting path from the parent, truncated at its s_star.
    /// `None` for the root.
    pub path: Option<PathSegment>,
    /// Squared path rate at the vertex.
    pub theta: f64,
    /// Path tangent at the vertex location.
    pub tangent: DVector<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Tree {
    pub vertices: Vec<Vertex>,
}

impl Tree {
    pub fn with_root(root: Vertex) -> Self {
        Tree {
            vertices: vec![root],
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn add(&mut self, vertex: Vertex) -> usize {
        self.vertices.push(vertex);
        self.vertices.len() - 1
    }

    /// Vertex indices from the root to `idx`, inclusive.
    pub fn branch(&self, idx: usize) -> Vec<usize> {
        let mut chain = vec![idx];
        let mut cur = idx;
        while let Some(p) = self.vertices[cur].parent {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }
}

/// Goal set with acceptance threshold on the combined metric.
#[derive(Debug, Clone)]
pub struct GoalSpec {
    pub states: Vec<(DVector<f64>, DVector<f64>)>,
    pub epsilon: f64,
}

impl GoalSpec {
    pub fn single(q: DVector<f64>, qd: DVector<f64>) -> Self {
        GoalSpec {
            states: vec![(q, qd)],
            epsilon: 1e-2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlannerConfig {
    pub max_iterations: usize,
    /// Nearest-neighbour count.
    pub k: usize,
    /// Maximum extension distance.
    pub d_max: f64,
    /// Projection horizon of the nearest-neighbour metric.
    pub gamma: f64,
    /// Steering candidates per neighbour.
    pub n_rndm: usize,
    /// Profile integration step.
    pub ds: f64,
    /// Minimum accepted truncation point.
    pub s_dagger: f64,
    /// Every this many iterations the extension targets the goal
    /// (with gamma = 0 in the metric). Zero disables goal biasing.
    pub goal_bias_period: usize,
    /// End-tangent sampling scale.
    pub kappa: f64,
    /// Path collision-check samples per segment.
    pub collision_resolution: usize,
    /// Wall-clock budget per run.
    pub budget: Duration,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        let ds = 1e-3;
        PlannerConfig {
            max_iterations: 1_000_000,
            k: 10,
            d_max: 2.0,
            gamma: 0.1,
            n_rndm: 200,
            ds,
            s_dagger: 5.0 * ds,
            goal_bias_period: 5,
            kappa: 3.0,
            collision_resolution: 64,
            budget: Duration::from_secs(60),
        }
    }
}

/// Initial state of a planning query.
#[derive(Debug, Clone)]
pub struct StartState {
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
    /// Initial path rate, `sdot >= 0`; the root tangent is `qd / sdot`
    /// when the start velocity is nonzero.
    pub sdot: f64,
}

impl StartState {
    pub fn at_rest(q: DVector<f64>) -> Self {
        let n = q.len();
        StartState {
            q,
            qd: DVector::zeros(n),
            sdot: 0.0,
        }
    }
}

/// Planner outcome with tree statistics for benchmarking.
#[derive(Debug)]
pub struct PlanReport {
    pub trajectory: Option<Trajectory>,
    pub goal_vertex: Option<usize>,
    pub tree: Tree,
    pub iterations: usize,
    pub steer_calls: usize,
    pub steer_time: Duration,
    pub elapsed: Duration,
}

impl PlanReport {
    pub fn succeeded(&self) -> bool {
        self.trajectory.is_some()
    }

    pub fn mean_steer_time_ms(&self) -> f64 {
        if self.steer_calls == 0 {
            0.0
        } else {
            self.steer_time.as_secs_f64() * 1e3 / self.steer_calls as f64
        }
    }
}

/// Squared normalised distance from `q_r` to the vertex position
/// projected forward along its tangent for a horizon `gamma`.
pub fn projected_distance(
    v_q: &DVector<f64>,
    v_theta: f64,
    v_tangent: &DVector<f64>,
    q_r: &DVector<f64>,
    gamma: f64,
    q_max: &DVector<f64>,
) -> f64 {
    let scale = gamma * v_theta.max(0.0).sqrt();
    let mut d = 0.0;
    for i in 0..v_q.len() {
        let q_p = v_q[i] + scale * v_tangent[i];
        let e = (q_r[i] - q_p) / q_max[i];
        d += e * e;
    }
    d
}

/// Indices of the `k` vertices closest to `q_r` under the projected
/// metric; ties broken by insertion order (older first).
pub fn nearest_k(
    tree: &Tree,
    q_r: &DVector<f64>,
    k: usize,
    gamma: f64,
    q_max: &DVector<f64>,
) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = tree
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            (
                projected_distance(&v.q, v.theta, &v.tangent, q_r, gamma, q_max),
                i,
            )
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.into_iter().map(|(_, i)| i).collect()
}

/// Normalised distance-to-goal combining configuration and velocity
/// error; for a goal set, the minimum over members.
pub fn goal_distance(
    q: &DVector<f64>,
    qd: &DVector<f64>,
    goal: &GoalSpec,
    kinds: &[CoordinateKind],
    q_max: &DVector<f64>,
    qd_max: &DVector<f64>,
) -> f64 {
    goal.states
        .iter()
        .map(|(q_g, qd_g)| state_distance(q, qd, q_g, qd_g, kinds, q_max, qd_max))
        .fold(f64::INFINITY, f64::min)
}

/// Normalised distance between two full states; prismatic coordinates
/// use `|dq| / q_max`, revolute ones `1 - cos(dq)`.
pub fn state_distance(
    q: &DVector<f64>,
    qd: &DVector<f64>,
    q_g: &DVector<f64>,
    qd_g: &DVector<f64>,
    kinds: &[CoordinateKind],
    q_max: &DVector<f64>,
    qd_max: &DVector<f64>,
) -> f64 {
    let n = q.len();
    let mut dq2 = 0.0;
    let mut dv2 = 0.0;
    for i in 0..n {
        let d = match kinds[i] {
            CoordinateKind::Prismatic => (q_g[i] - q[i]).abs() / q_max[i].abs(),
            CoordinateKind::Revolute => 1.0 - (q_g[i] - q[i]).cos(),
        };
        dq2 += d * d;
        let e = (qd_g[i] - qd[i]) / qd_max[i];
        dv2 += e * e;
    }
    (dq2.sqrt() + dv2.sqrt()) / (2.0 * n as f64)
}

/// Clamps the extension target to at most `d_max` from `from` along
/// the straight chord.
pub fn clamp_target(from: &DVector<f64>, q_r: &DVector<f64>, d_max: f64) -> DVector<f64> {
    let delta = q_r - from;
    let dist = delta.norm();
    if dist > d_max {
        from + delta * (d_max / dist)
    } else {
        q_r.clone()
    }
}

/// A successful steering outcome: a truncated feasible path with its
/// terminal rate and tangent.
#[derive(Debug, Clone)]
pub struct SteerCandidate {
    pub parent: usize,
    pub path: PathSegment,
    pub theta: f64,
    pub tangent: DVector<f64>,
    pub endpoint: DVector<f64>,
}

/// Generates `n_rndm` random steering cubics from the vertex towards
/// `target`, integrates each profile, discards those with
/// `s_star < s_dagger` and returns the candidate whose truncated
/// endpoint is Euclidean-closest to `target`.
pub fn steer<R: Rng + ?Sized>(
    model: &dyn SystemModel,
    tree: &Tree,
    from: usize,
    target: &DVector<f64>,
    cfg: &PlannerConfig,
    rng: &mut R,
) -> Option<SteerCandidate> {
    let vertex = &tree.vertices[from];
    let start = PathStart {
        q: &vertex.q,
        tangent: &vertex.tangent,
        theta: vertex.theta,
    };
    let sampling = TangentSampling { kappa: cfg.kappa };
    let paths: Vec<PathSegment> = (0..cfg.n_rndm)
        .map(|_| generate_path(&start, target, sampling, rng))
        .collect();

    let theta0 = vertex.theta;
    let evaluate = |scratch: &mut ProfileScratch<PathPoint>,
                    (idx, path): (usize, &PathSegment)| {
        let profile =
            integrate_path_profile_summary_with(model, path, theta0, cfg.ds, scratch).ok()?;
        if profile.s_star < cfg.s_dagger {
            return None;
        }
        let (endpoint, tangent, _) = path.eval_unchecked(profile.s_star);
        let dist = (target - &endpoint).norm();
        Some((dist, idx, profile, endpoint, tangent))
    };
    let pick = |a: &(f64, usize, _, _, _), b: &(f64, usize, _, _, _)| {
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
    };
    let make_scratch = || ProfileScratch::new(&PathDynamics { model, path: &paths[0] });
    // parallelism only pays off when there are extra cores
    let best = if rayon::current_num_threads() > 1 {
        paths
            .par_iter()
            .enumerate()
            .map_init(make_scratch, |scratch, item| evaluate(scratch, item))
            .flatten()
            .min_by(pick)?
    } else {
        let mut scratch = make_scratch();
        paths
            .iter()
            .enumerate()
            .filter_map(|item| evaluate(&mut scratch, item))
            .min_by(pick)?
    };

    let (_, idx, profile, endpoint, tangent) = best;
    let truncated = truncate(&paths[idx], profile.s_star).expect("s_star in (0, 1]");
    Some(SteerCandidate {
        parent: from,
        path: truncated,
        theta: profile.theta_star,
        tangent,
        endpoint,
    })
}

/// One RRT extension: steer from each of the `k` nearest vertices to
/// the (distance-clamped) target, keep collision-free results, and
/// return the one ending closest to `q_r`.
#[allow(clippy::too_many_arguments)]
pub fn extend<R: Rng + ?Sized>(
    model: &dyn SystemModel,
    env: &Environment,
    tree: &Tree,
    q_r: &DVector<f64>,
    gamma: f64,
    cfg: &PlannerConfig,
    rng: &mut R,
    steer_timer: &mut SteerTimer,
) -> Option<SteerCandidate> {
    let q_max = &model.scales().q_max;
    let neighbours = nearest_k(tree, q_r, cfg.k, gamma, q_max);
    let mut accepted: Vec<SteerCandidate> = Vec::new();
    for idx in neighbours {
        let target = clamp_target(&tree.vertices[idx].q, q_r, cfg.d_max);
        let tick = Instant::now();
        let candidate = steer(model, tree, idx, &target, cfg, rng);
        steer_timer.record(tick.elapsed());
        if let Some(c) = candidate {
            if env.is_obstacle_free(&c.path, cfg.collision_resolution) {
                accepted.push(c);
            }
        }
    }
    accepted
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            let da = (q_r - &a.endpoint).norm();
            let db = (q_r - &b.endpoint).norm();
            da.total_cmp(&db).then(i.cmp(j))
        })
        .map(|(_, c)| c)
}

/// Accumulates wall time spent inside `steer` only.
#[derive(Debug, Default)]
pub struct SteerTimer {
    pub total: Duration,
    pub calls: usize,
}

impl SteerTimer {
    fn record(&mut self, d: Duration) {
        self.total += d;
        self.calls += 1;
    }
}

/// Smallest normalised configuration distance from any tree vertex to `q_g`.
fn config_distance_to_tree(tree: &Tree, q_g: &DVector<f64>, q_max: &DVector<f64>) -> f64 {
    tree.vertices
        .iter()
        .map(|v| projected_distance(&v.q, 0.0, &v.tangent, q_g, 0.0, q_max))
        .fold(f64::INFINITY, f64::min)
}

fn reach_goal(model: &dyn SystemModel, vertex: &Vertex, goal: &GoalSpec) -> bool {
    let qd = &vertex.tangent * vertex.theta.max(0.0).sqrt();
    let d = goal_distance(
        &vertex.q,
        &qd,
        goal,
        model.coordinate_kinds(),
        &model.scales().q_max,
        &model.scales().qd_max,
    );
    d <= goal.epsilon
}

/// Concatenates the root-to-goal edges, re-integrates the profile over
/// the full branch from the root's rate and time-parameterises it.
/// Junction rates must match the stored vertex rates within 1e-6.
pub fn compute_trajectory(
    model: &dyn SystemModel,
    tree: &Tree,
    goal_vertex: usize,
    ds: f64,
) -> Result<Trajectory> {
    let chain = tree.branch(goal_vertex);
    let root = &tree.vertices[chain[0]];

    if chain.len() == 1 {
        return Ok(single_state_trajectory(model, root));
    }

    let mut theta = root.theta;
    let mut combined: Option<Trajectory> = None;
    for &idx in &chain[1..] {
        let vertex = &tree.vertices[idx];
        let path = vertex.path.as_ref().expect("non-root vertex has a path");
        let profile = integrate_path_profile(model, path, theta, ds)?;
        if profile.termination != Termination::Completed {
            return Err(Error::IncompleteProfile(profile.termination.as_str()));
        }
        let terminal = profile.terminal_theta();
        if (terminal - vertex.theta).abs() > 1e-6 {
            return Err(Error::JunctionMismatch {
                vertex: idx,
                stored: vertex.theta,
                computed: terminal,
            });
        }
        let piece = time_parameterize(model, path, &profile)?;
        combined = Some(match combined {
            None => piece,
            Some(mut acc) => {
                let offset = acc.duration();
                // junction sample is shared; keep the earlier edge's
                for i in 1..piece.len() {
                    acc.t.push(offset + piece.t[i]);
                    acc.q.push(piece.q[i].clone());
                    acc.qd.push(piece.qd[i].clone());
                    acc.tau.push(piece.tau[i].clone());
                }
                acc
            }
        });
        theta = terminal;
    }
    Ok(combined.expect("chain has at least one edge"))
}

fn single_state_trajectory(model: &dyn SystemModel, root: &Vertex) -> Trajectory {
    let zero = DVector::zeros(root.q.len());
    let coeffs = pp_coefficients(model, &root.q, &root.tangent, &zero)
        .expect("finite root configuration");
    let rec = recover_inputs(model, &coeffs, &root.q, root.theta, 0.0);
    Trajectory {
        t: vec![0.0],
        q: vec![root.q.clone()],
        qd: vec![&root.tangent * root.theta.max(0.0).sqrt()],
        tau: vec![rec.tau],
    }
}

/// Runs UA1-RRT. On success the report carries the assembled
/// trajectory; on iteration/budget exhaustion it carries the final
/// tree and statistics with `trajectory = None`.
pub fn plan<R: Rng + ?Sized>(
    model: &dyn SystemModel,
    env: &Environment,
    start: &StartState,
    goal: &GoalSpec,
    cfg: &PlannerConfig,
    rng: &mut R,
) -> Result<PlanReport> {
    let begin = Instant::now();
    if env.in_collision(&start.q) {
        return Err(Error::StartInCollision);
    }
    let qd_norm = start.qd.norm();
    let root = if qd_norm > 0.0 {
        if start.sdot <= 0.0 {
            return Err(Error::InvalidRootVelocity);
        }
        Vertex {
            q: start.q.clone(),
            parent: None,
            path: None,
            theta: start.sdot * start.sdot,
            tangent: &start.qd / start.sdot,
        }
    } else {
        Vertex {
            q: start.q.clone(),
            parent: None,
            path: None,
            theta: start.sdot * start.sdot,
            tangent: DVector::zeros(start.q.len()),
        }
    };

    let mut tree = Tree::with_root(root);
    let mut timer = SteerTimer::default();

    if reach_goal(model, &tree.vertices[0], goal) {
        let trajectory = compute_trajectory(model, &tree, 0, cfg.ds)?;
        return Ok(PlanReport {
            trajectory: Some(trajectory),
            goal_vertex: Some(0),
            tree,
            iterations: 0,
            steer_calls: 0,
            steer_time: Duration::ZERO,
            elapsed: begin.elapsed(),
        });
    }

    let mut iterations = 0;
    for i in 1..=cfg.max_iterations {
        if begin.elapsed() >= cfg.budget {
            break;
        }
        iterations = i;

        let goal_biased = cfg.goal_bias_period > 0 && i % cfg.goal_bias_period == 0;
        let (q_r, gamma) = if goal_biased {
            // For a goal set, target the member the tree is currently
            // closest to; extensions towards far-off members are wasted.
            let q_max = &model.scales().q_max;
            let pick = (0..goal.states.len())
                .min_by(|&a, &b| {
                    let da = config_distance_to_tree(&tree, &goal.states[a].0, q_max);
                    let db = config_distance_to_tree(&tree, &goal.states[b].0, q_max);
                    da.total_cmp(&db).then(a.cmp(&b))
                })
                .expect("goal set is non-empty");
            (goal.states[pick].0.clone(), 0.0)
        } else {
            (env.random_configuration(rng)?, cfg.gamma)
        };

        let candidate = extend(model, env, &tree, &q_r, gamma, cfg, rng, &mut timer);
        if let Some(c) = candidate {
            let idx = tree.add(Vertex {
                q: c.endpoint,
                parent: Some(c.parent),
                path: Some(c.path),
                theta: c.theta,
                tangent: c.tangent,
            });
            if reach_goal(model, &tree.vertices[idx], goal) {
                let trajectory = compute_trajectory(model, &tree, idx, cfg.ds)?;
                return Ok(PlanReport {
                    trajectory: Some(trajectory),
                    goal_vertex: Some(idx),
                    tree,
                    iterations: i,
                    steer_calls: timer.calls,
                    steer_time: timer.total,
                    elapsed: begin.elapsed(),
                });
            }
        }
    }

    Ok(PlanReport {
        trajectory: None,
        goal_vertex: None,
        tree,
        iterations,
        steer_calls: timer.calls,
        steer_time: timer.total,
        elapsed: begin.elapsed(),
    })
}

/// Re-integrates every tree edge from its parent's stored rate and
/// checks it completes with the stored terminal rate. Returns
/// `(feasible_edges, total_edges)`.
pub fn evaluate_edge_feasibility(
    model: &dyn SystemModel,
    tree: &Tree,
    ds: f64,
    tolerance: f64,
) -> (usize, usize) {
    let mut feasible = 0;
    let mut total = 0;
    for vertex in &tree.vertices {
        let (parent, path) = match (vertex.parent, &vertex.path) {
            (Some(p), Some(path)) => (p, path),
            _ => continue,
        };
        total += 1;
        let theta0 = tree.vertices[parent].theta;
        if let Ok(profile) = integrate_path_profile_summary(model, path, theta0, ds) {
            if profile.termination == Termination::Completed
                && (profile.theta_star - vertex.theta).abs() <= tolerance
            {
                feasible += 1;
            }
        }
    }
    (feasible, total)
}

/// Re-integrated profile of one edge, for post-hoc verification.
pub fn edge_profile(
    model: &dyn SystemModel,
    tree: &Tree,
    vertex: usize,
    ds: f64,
) -> Result<ProfileResult> {
    let v = &tree.vertices[vertex];
    let parent = v.parent.expect("edge profile requires a non-root vertex");
    let path = v.path.as_ref().expect("non-root vertex has a path");
    integrate_path_profile(model, path, tree.vertices[parent].theta, ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Acrobot, CoordinateKind};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn projected_distance_hand_values() {
        let q_max = dv(&[1.0, 1.0]);
        // projection lands exactly on the target
        let d = projected_distance(
            &dv(&[0.0, 0.0]),
            4.0,
            &dv(&[1.0, 0.0]),
            &dv(&[1.0, 0.0]),
            0.5,
            &q_max,
        );
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        let d2 = projected_distance(
            &dv(&[0.0, 0.0]),
            4.0,
            &dv(&[1.0, 0.0]),
            &dv(&[1.0, 1.0]),
            0.5,
            &q_max,
        );
        assert_abs_diff_eq!(d2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_horizon_reduces_to_normalised_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let q = DVector::from_fn(3, |_, _| rng.gen_range(-5.0..5.0));
            let t = DVector::from_fn(3, |_, _| rng.gen_range(-5.0..5.0));
            let q_r = DVector::from_fn(3, |_, _| rng.gen_range(-5.0..5.0));
            let q_max = DVector::from_fn(3, |_, _| rng.gen_range(0.5..4.0));
            let theta = rng.gen_range(0.0..10.0);
            let d = projected_distance(&q, theta, &t, &q_r, 0.0, &q_max);
            let mut expected = 0.0;
            for i in 0..3 {
                let e = (q_r[i] - q[i]) / q_max[i];
                expected += e * e;
            }
            assert_abs_diff_eq!(d, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn goal_distance_hand_values() {
        let kinds = [CoordinateKind::Revolute];
        let q_max = dv(&[1.0]);
        let qd_max = dv(&[1.0]);
        let goal = GoalSpec::single(dv(&[0.0]), dv(&[0.0]));
        let zero = goal_distance(&dv(&[0.0]), &dv(&[0.0]), &goal, &kinds, &q_max, &qd_max);
        assert_abs_diff_eq!(zero, 0.0, epsilon = 1e-15);
        // opposite phase: d = (1/2) * sqrt((1 - cos(pi))^2) = 1
        let d = goal_distance(
            &dv(&[std::f64::consts::PI]),
            &dv(&[0.0]),
            &goal,
            &kinds,
            &q_max,
            &qd_max,
        );
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn goal_set_takes_the_minimum() {
        let kinds = [CoordinateKind::Prismatic];
        let q_max = dv(&[1.0]);
        let qd_max = dv(&[1.0]);
        let goal = GoalSpec {
            states: vec![
                (dv(&[10.0]), dv(&[0.0])),
                (dv(&[0.5]), dv(&[0.0])),
            ],
            epsilon: 1e-2,
        };
        let d = goal_distance(&dv(&[0.5]), &dv(&[0.0]), &goal, &kinds, &q_max, &qd_max);
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn clamp_target_arithmetic() {
        let from = dv(&[0.0, 0.0]);
        let q_r = dv(&[3.0, 0.0]);
        let t = clamp_target(&from, &q_r, 1.0);
        assert_abs_diff_eq!(t[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t[1], 0.0, epsilon = 1e-12);
        let near = clamp_target(&from, &dv(&[0.5, 0.0]), 1.0);
        assert_abs_diff_eq!(near[0], 0.5, epsilon = 1e-12);
    }

    fn tiny_tree() -> Tree {
        let mut tree = Tree::with_root(Vertex {
            q: dv(&[0.0, 0.0]),
            parent: None,
            path: None,
            theta: 0.0,
            tangent: dv(&[0.0, 0.0]),
        });
        tree.add(Vertex {
            q: dv(&[1.0, 0.0]),
            parent: Some(0),
            path: None,
            theta: 0.0,
            tangent: dv(&[1.0, 0.0]),
        });
        tree
    }

    #[test]
    fn nearest_k_returns_fewer_when_tree_small() {
        let tree = tiny_tree();
        let found = nearest_k(&tree, &dv(&[0.1, 0.1]), 10, 0.0, &dv(&[1.0, 1.0]));
        assert_eq!(found.len(), 2);
    }

    #[test]
    fn nearest_k_tie_break_prefers_older() {
        let mut tree = tiny_tree();
        // same position as vertex 1, added later
        tree.add(Vertex {
            q: dv(&[1.0, 0.0]),
            parent: Some(0),
            path: None,
            theta: 0.0,
            tangent: dv(&[1.0, 0.0]),
        });
        let found = nearest_k(&tree, &dv(&[1.0, 0.0]), 2, 0.0, &dv(&[1.0, 1.0]));
        assert_eq!(found, vec![1, 2]);
    }

    fn acrobot_env() -> Environment {
        let pi = std::f64::consts::PI;
        let mut env = Environment::free_space(vec![-4.0 * pi, -pi], vec![4.0 * pi, pi]);
        env.limits = vec![None, Some((-pi, pi))];
        env
    }

    #[test]
    fn goal_at_start_succeeds_immediately() {
        let model = Acrobot::default_params();
        let env = acrobot_env();
        let start = StartState::at_rest(dv(&[0.0, 0.0]));
        let goal = GoalSpec::single(dv(&[0.0, 0.0]), dv(&[0.0, 0.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let report = plan(
            &model,
            &env,
            &start,
            &goal,
            &PlannerConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(report.succeeded());
        assert_eq!(report.iterations, 0);
        let traj = report.trajectory.unwrap();
        assert_eq!(traj.len(), 1);
        assert_abs_diff_eq!(traj.duration(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_root_velocity_rejected() {
        let model = Acrobot::default_params();
        let env = acrobot_env();
        let start = StartState {
            q: dv(&[0.0, 0.0]),
            qd: dv(&[1.0, 0.0]),
            sdot: 0.0,
        };
        let goal = GoalSpec::single(dv(&[1.0, 0.0]), dv(&[0.0, 0.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            plan(&model, &env, &start, &goal, &PlannerConfig::default(), &mut rng),
            Err(Error::InvalidRootVelocity)
        ));
    }

    #[test]
    fn start_in_collision_rejected() {
        let model = Acrobot::default_params();
        let env = acrobot_env();
        let start = StartState::at_rest(dv(&[0.0, 3.5]));
        let goal = GoalSpec::single(dv(&[0.0, 0.0]), dv(&[0.0, 0.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            plan(&model, &env, &start, &goal, &PlannerConfig::default(), &mut rng),
            Err(Error::StartInCollision)
        ));
    }

    fn short_cfg() -> PlannerConfig {
        PlannerConfig {
            max_iterations: 40,
            n_rndm: 30,
            k: 4,
            budget: Duration::from_secs(30),
            ..PlannerConfig::default()
        }
    }

    #[test]
    fn planning_is_deterministic_under_a_fixed_seed() {
        let model = Acrobot::default_params();
        let env = acrobot_env();
        let start = StartState::at_rest(dv(&[0.0, 0.0]));
        let goal = GoalSpec::single(dv(&[100.0, 0.0]), dv(&[0.0, 0.0]));
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            plan(&model, &env, &start, &goal, &short_cfg(), &mut rng).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.tree.len(), b.tree.len());
        assert_eq!(a.iterations, b.iterations);
        for (va, vb) in a.tree.vertices.iter().zip(&b.tree.vertices) {
            assert_eq!(va.q, vb.q);
            assert_eq!(va.theta.to_bits(), vb.theta.to_bits());
            assert_eq!(va.tangent, vb.tangent);
            assert_eq!(va.parent, vb.parent);
        }
    }

    #[test]
    fn grown_tree_edges_are_feasible_and_c1() {
        let model = Acrobot::default_params();
        let env = acrobot_env();
        let start = StartState::at_rest(dv(&[0.0, 0.0]));
        let goal = GoalSpec::single(dv(&[100.0, 0.0]), dv(&[0.0, 0.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = plan(&model, &env, &start, &goal, &short_cfg(), &mut rng).unwrap();
        assert!(report.tree.len() > 1, "tree did not grow");
        let (feasible, total) =
            evaluate_edge_feasibility(&model, &report.tree, 1e-3, 1e-9);
        assert_eq!(feasible, total);
        for v in &report.tree.vertices {
            if let (Some(p), Some(path)) = (v.parent, &v.path) {
                let parent = &report.tree.vertices[p];
                if parent.theta > REST_THETA {
                    let mismatch = (path.start_tangent() - &parent.tangent).norm();
                    assert!(mismatch <= 1e-12, "C1 junction violated: {mismatch}");
                }
            }
        }
    }
}
