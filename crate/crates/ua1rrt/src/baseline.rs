//! Control-sampling RRT baseline and forward simulation of the full
//! dynamics, also used for closed-loop verification of planned
//! trajectories.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::SystemModel;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::planner::{state_distance, GoalSpec, StartState};
use crate::profile::Trajectory;

/// Acceleration under the full dynamics: `qdd = M^-1 (B u - C qd - G)`.
pub fn acceleration(
    model: &dyn SystemModel,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    u: &DVector<f64>,
) -> DVector<f64> {
    let m = model.mass_matrix(q);
    let rhs = model.input_map(q) * u - model.coriolis_matrix(q, qd) * qd - model.gravity_vector(q);
    m.lu().solve(&rhs).expect("mass matrix is invertible")
}

/// One RK4 step of the second-order dynamics with a zero-order-hold
/// input.
pub fn rk4_step(
    model: &dyn SystemModel,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    u: &DVector<f64>,
    dt: f64,
) -> (DVector<f64>, DVector<f64>) {
    let f = |q: &DVector<f64>, qd: &DVector<f64>| (qd.clone(), acceleration(model, q, qd, u));
    let (k1q, k1v) = f(q, qd);
    let (k2q, k2v) = f(&(q + &k1q * (dt / 2.0)), &(qd + &k1v * (dt / 2.0)));
    let (k3q, k3v) = f(&(q + &k2q * (dt / 2.0)), &(qd + &k2v * (dt / 2.0)));
    let (k4q, k4v) = f(&(q + &k3q * dt), &(qd + &k3v * dt));
    (
        q + (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (dt / 6.0),
        qd + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0),
    )
}

/// Maps actuated-space forces back to a full generalized force: the
/// unique vector with zero component along the annihilator and the
/// given projection onto the actuated basis.
pub fn generalized_force(
    model: &dyn SystemModel,
    q: &DVector<f64>,
    tau: &DVector<f64>,
) -> DVector<f64> {
    let n = model.dof();
    let w = model.annihilator(q);
    let a = model.actuated_basis(q);
    let mut t = DMatrix::zeros(n, n);
    t.row_mut(0).copy_from(&w.transpose());
    for i in 0..n - 1 {
        t.row_mut(i + 1).copy_from(&a.row(i));
    }
    let mut rhs = DVector::zeros(n);
    for i in 0..n - 1 {
        rhs[i + 1] = tau[i];
    }
    t.lu().solve(&rhs).expect("annihilator and actuated basis span")
}

fn rk4_step_forced(
    model: &dyn SystemModel,
    q: &DVector<f64>,
    qd: &DVector<f64>,
    tau: impl Fn(f64) -> DVector<f64>,
    t: f64,
    dt: f64,
) -> (DVector<f64>, DVector<f64>) {
    let f = |t: f64, q: &DVector<f64>, qd: &DVector<f64>| {
        let force = generalized_force(model, q, &tau(t));
        let m = model.mass_matrix(q);
        let rhs = force - model.coriolis_matrix(q, qd) * qd - model.gravity_vector(q);
        (qd.clone(), m.lu().solve(&rhs).expect("invertible mass matrix"))
    };
    let (k1q, k1v) = f(t, q, qd);
    let (k2q, k2v) = f(
        t + dt / 2.0,
        &(q + &k1q * (dt / 2.0)),
        &(qd + &k1v * (dt / 2.0)),
    );
    let (k3q, k3v) = f(
        t + dt / 2.0,
        &(q + &k2q * (dt / 2.0)),
        &(qd + &k2v * (dt / 2.0)),
    );
    let (k4q, k4v) = f(t + dt, &(q + &k3q * dt), &(qd + &k3v * dt));
    (
        q + (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (dt / 6.0),
        qd + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0),
    )
}

/// Replays a planned trajectory open-loop through the full dynamics:
/// the stored actuated forces are linearly interpolated in time and
/// applied to an RK4 simulation from the trajectory's initial state.
/// Returns the simulated states at the requested step.
pub fn replay(
    model: &dyn SystemModel,
    traj: &Trajectory,
    dt: f64,
) -> Result<Vec<(f64, DVector<f64>, DVector<f64>)>> {
    if traj.is_empty() {
        return Err(Error::IncompleteProfile("empty trajectory"));
    }
    let duration = traj.duration();
    let mut q = traj.q[0].clone();
    let mut qd = traj.qd[0].clone();
    let mut out = vec![(0.0, q.clone(), qd.clone())];
    let steps = (duration / dt).round() as usize;
    for k in 0..steps {
        let t = k as f64 * dt;
        let step = dt.min(duration - t);
        let (nq, nqd) = rk4_step_forced(model, &q, &qd, |t| traj.tau_at(t), t, step);
        q = nq;
        qd = nqd;
        out.push((t + step, q.clone(), qd.clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct KnnConfig {
    pub max_iterations: usize,
    pub k: usize,
    /// Control samples per neighbour.
    pub n_rndm: usize,
    /// Simulation step.
    pub dt: f64,
    /// Sampled hold durations, in steps of `dt`.
    pub min_steps: usize,
    pub max_steps: usize,
    pub goal_bias_period: usize,
    pub budget: Duration,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            max_iterations: 1_000_000,
            k: 10,
            n_rndm: 200,
            dt: 1e-2,
            min_steps: 5,
            max_steps: 50,
            goal_bias_period: 10,
            budget: Duration::from_secs(60),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KnnVertex {
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
    pub parent: Option<usize>,
    /// Zero-order-hold input and its duration in steps.
    pub control: Option<(DVector<f64>, usize)>,
}

#[derive(Debug)]
pub struct KnnReport {
    pub trajectory: Option<Trajectory>,
    pub goal_vertex: Option<usize>,
    pub vertices: Vec<KnnVertex>,
    pub iterations: usize,
    pub elapsed: Duration,
}

impl KnnReport {
    pub fn succeeded(&self) -> bool {
        self.trajectory.is_some()
    }
}

fn within_velocity_box(model: &dyn SystemModel, qd: &DVector<f64>) -> bool {
    let b = model.bounds();
    (0..qd.len()).all(|i| qd[i] >= b.qd_lower[i] && qd[i] <= b.qd_upper[i])
}

fn sample_input<R: Rng + ?Sized>(model: &dyn SystemModel, rng: &mut R) -> DVector<f64> {
    let b = model.bounds();
    let (lo, hi) = (
        b.u_lower.as_ref().expect("baseline requires input bounds"),
        b.u_upper.as_ref().expect("baseline requires input bounds"),
    );
    DVector::from_fn(model.num_inputs(), |i, _| rng.gen_range(lo[i]..hi[i]))
}

/// Simulates a zero-order-hold control from a state, rejecting rollouts
/// that collide or leave the velocity box at any sample.
fn rollout(
    model: &dyn SystemModel,
    env: &Environment,
    q0: &DVector<f64>,
    qd0: &DVector<f64>,
    u: &DVector<f64>,
    steps: usize,
    dt: f64,
) -> Option<(DVector<f64>, DVector<f64>)> {
    let mut q = q0.clone();
    let mut qd = qd0.clone();
    for _ in 0..steps {
        let (nq, nqd) = rk4_step(model, &q, &qd, u, dt);
        q = nq;
        qd = nqd;
        if env.in_collision(&q) || !within_velocity_box(model, &qd) {
            return None;
        }
    }
    Some((q, qd))
}

/// Control-sampling kinodynamic RRT over full states: nearest
/// neighbours by the normalised state metric, random piecewise-constant
/// inputs with random hold durations, RK4 rollouts.
pub fn knn_rrt_plan<R: Rng + ?Sized>(
    model: &dyn SystemModel,
    env: &Environment,
    start: &StartState,
    goal: &GoalSpec,
    cfg: &KnnConfig,
    rng: &mut R,
) -> Result<KnnReport> {
    let begin = Instant::now();
    if env.in_collision(&start.q) {
        return Err(Error::StartInCollision);
    }
    let kinds = model.coordinate_kinds();
    let scales = model.scales();
    let metric = |q: &DVector<f64>, qd: &DVector<f64>, q2: &DVector<f64>, qd2: &DVector<f64>| {
        state_distance(q, qd, q2, qd2, kinds, &scales.q_max, &scales.qd_max)
    };
    let goal_dist = |q: &DVector<f64>, qd: &DVector<f64>| {
        goal.states
            .iter()
            .map(|(qg, qdg)| metric(q, qd, qg, qdg))
            .fold(f64::INFINITY, f64::min)
    };

    let mut vertices = vec![KnnVertex {
        q: start.q.clone(),
        qd: start.qd.clone(),
        parent: None,
        control: None,
    }];
    if goal_dist(&start.q, &start.qd) <= goal.epsilon {
        let trajectory = assemble(model, &vertices, 0, cfg.dt);
        return Ok(KnnReport {
            trajectory: Some(trajectory),
            goal_vertex: Some(0),
            vertices,
            iterations: 0,
            elapsed: begin.elapsed(),
        });
    }

    let bounds = model.bounds();
    let mut iterations = 0;
    for i in 1..=cfg.max_iterations {
        if begin.elapsed() >= cfg.budget {
            break;
        }
        iterations = i;

        let goal_biased = cfg.goal_bias_period > 0 && i % cfg.goal_bias_period == 0;
        let (q_r, qd_r) = if goal_biased {
            let pick = if goal.states.len() > 1 {
                rng.gen_range(0..goal.states.len())
            } else {
                0
            };
            goal.states[pick].clone()
        } else {
            let q = env.random_configuration(rng)?;
            let qd = DVector::from_fn(model.dof(), |j, _| {
                rng.gen_range(bounds.qd_lower[j]..bounds.qd_upper[j])
            });
            (q, qd)
        };

        let mut scored: Vec<(f64, usize)> = vertices
            .iter()
            .enumerate()
            .map(|(j, v)| (metric(&v.q, &v.qd, &q_r, &qd_r), j))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored.truncate(cfg.k);

        let mut best: Option<(f64, usize, DVector<f64>, DVector<f64>, DVector<f64>, usize)> = None;
        for &(_, vi) in &scored {
            let controls: Vec<(DVector<f64>, usize)> = (0..cfg.n_rndm)
                .map(|_| {
                    (
                        sample_input(model, rng),
                        rng.gen_range(cfg.min_steps..=cfg.max_steps),
                    )
                })
                .collect();
            let v = &vertices[vi];
            let local = controls
                .par_iter()
                .enumerate()
                .filter_map(|(ci, (u, steps))| {
                    let (q, qd) = rollout(model, env, &v.q, &v.qd, u, *steps, cfg.dt)?;
                    let d = metric(&q, &qd, &q_r, &qd_r);
                    Some((d, ci, q, qd, u.clone(), *steps))
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if let Some(c) = local {
                let better = match &best {
                    None => true,
                    Some(b) => c.0 < b.0,
                };
                if better {
                    best = Some((c.0, vi, c.2, c.3, c.4, c.5));
                }
            }
        }

        if let Some((_, parent, q, qd, u, steps)) = best {
            vertices.push(KnnVertex {
                q: q.clone(),
                qd: qd.clone(),
                parent: Some(parent),
                control: Some((u, steps)),
            });
            if goal_dist(&q, &qd) <= goal.epsilon {
                let idx = vertices.len() - 1;
                let trajectory = assemble(model, &vertices, idx, cfg.dt);
                return Ok(KnnReport {
                    trajectory: Some(trajectory),
                    goal_vertex: Some(idx),
                    vertices,
                    iterations: i,
                    elapsed: begin.elapsed(),
                });
            }
        }
    }

    Ok(KnnReport {
        trajectory: None,
        goal_vertex: None,
        vertices,
        iterations,
        elapsed: begin.elapsed(),
    })
}

/// Re-simulates the root-to-goal branch, recording every RK4 sample.
/// Actuated forces are the projection of the applied input:
/// `tau = (A B) u`.
fn assemble(
    model: &dyn SystemModel,
    vertices: &[KnnVertex],
    goal_vertex: usize,
    dt: f64,
) -> Trajectory {
    let mut chain = vec![goal_vertex];
    let mut cur = goal_vertex;
    while let Some(p) = vertices[cur].parent {
        chain.push(p);
        cur = p;
    }
    chain.reverse();

    let root = &vertices[chain[0]];
    let mut q = root.q.clone();
    let mut qd = root.qd.clone();
    let zero_u = DVector::zeros(model.num_inputs());
    let tau_of = |q: &DVector<f64>, u: &DVector<f64>| model.actuated_basis(q) * model.input_map(q) * u;

    let mut traj = Trajectory {
        t: vec![0.0],
        q: vec![q.clone()],
        qd: vec![qd.clone()],
        tau: vec![tau_of(&root.q, &zero_u)],
    };
    let mut t = 0.0;
    for &idx in &chain[1..] {
        let (u, steps) = vertices[idx].control.as_ref().expect("non-root has control");
        for _ in 0..*steps {
            let (nq, nqd) = rk4_step(model, &q, &qd, u, dt);
            q = nq;
            qd = nqd;
            t += dt;
            traj.t.push(t);
            traj.q.push(q.clone());
            traj.qd.push(qd.clone());
            traj.tau.push(tau_of(&q, u));
        }
    }
    traj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Acrobot, PlanarUav};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn uav_free_fall_acceleration() {
        let model = PlanarUav::default_params();
        let a = acceleration(&model, &dv(&[0.0, 0.5, 0.0]), &dv(&[0.0, 0.0, 0.0]), &dv(&[0.0, 0.0]));
        assert_abs_diff_eq!(a[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1], -9.81, epsilon = 1e-12);
        assert_abs_diff_eq!(a[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn uav_hover_is_an_equilibrium() {
        let model = PlanarUav::default_params();
        let u = dv(&[0.4905, 0.4905]);
        let mut q = dv(&[0.0, 0.5, 0.0]);
        let mut qd = dv(&[0.0, 0.0, 0.0]);
        for _ in 0..100 {
            let (nq, nqd) = rk4_step(&model, &q, &qd, &u, 1e-2);
            q = nq;
            qd = nqd;
        }
        assert_abs_diff_eq!(q[1], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(qd.norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn acrobot_hanging_is_an_equilibrium() {
        let model = Acrobot::default_params();
        let u = dv(&[0.0]);
        let (q, qd) = rk4_step(&model, &dv(&[0.0, 0.0]), &dv(&[0.0, 0.0]), &u, 1e-2);
        assert_abs_diff_eq!(q.norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(qd.norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let model = Acrobot::default_params();
        let u = dv(&[3.0]);
        let q0 = dv(&[0.4, -0.3]);
        let qd0 = dv(&[0.2, 0.1]);
        let simulate = |dt: f64, total: f64| {
            let mut q = q0.clone();
            let mut qd = qd0.clone();
            let n = (total / dt).round() as usize;
            for _ in 0..n {
                let (nq, nqd) = rk4_step(&model, &q, &qd, &u, dt);
                q = nq;
                qd = nqd;
            }
            (q, qd)
        };
        let (q_ref, _) = simulate(1e-5, 0.1);
        let e1 = (simulate(2e-3, 0.1).0 - &q_ref).norm();
        let e2 = (simulate(1e-3, 0.1).0 - &q_ref).norm();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}");
    }

    #[test]
    fn generalized_force_projects_back() {
        let model = PlanarUav::default_params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = DVector::from_fn(3, |_, _| rng.gen_range(-3.0..3.0));
            let tau = DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0));
            let f = generalized_force(&model, &q, &tau);
            let w = model.annihilator(&q);
            assert_abs_diff_eq!(w.dot(&f), 0.0, epsilon = 1e-12);
            let back = model.actuated_basis(&q) * &f;
            assert_abs_diff_eq!((back - &tau).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn replay_of_hover_trajectory_stays_put() {
        let model = PlanarUav::default_params();
        // constant hover forces: total thrust mg, zero pitch torque
        let traj = Trajectory {
            t: vec![0.0, 1.0],
            q: vec![dv(&[0.0, 0.5, 0.0]), dv(&[0.0, 0.5, 0.0])],
            qd: vec![dv(&[0.0, 0.0, 0.0]), dv(&[0.0, 0.0, 0.0])],
            tau: vec![dv(&[0.981, 0.0]), dv(&[0.981, 0.0])],
        };
        let states = replay(&model, &traj, 1e-3).unwrap();
        let (t_end, q_end, qd_end) = states.last().unwrap();
        assert_abs_diff_eq!(*t_end, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!((q_end - dv(&[0.0, 0.5, 0.0])).norm(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(qd_end.norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn knn_rrt_is_deterministic() {
        let model = PlanarUav::default_params();
        let mut env = Environment::free_space(vec![0.0, 0.0, -1.0], vec![2.0, 1.0, 1.0]);
        env.limits = vec![None, Some((0.0, 1.0)), None];
        let start = StartState::at_rest(dv(&[0.2, 0.5, 0.0]));
        let goal = GoalSpec {
            states: vec![(dv(&[1.0, 0.5, 0.0]), dv(&[0.0, 0.0, 0.0]))],
            epsilon: 5e-2,
        };
        let cfg = KnnConfig {
            max_iterations: 25,
            n_rndm: 20,
            k: 3,
            budget: Duration::from_secs(30),
            ..KnnConfig::default()
        };
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            knn_rrt_plan(&model, &env, &start, &goal, &cfg, &mut rng).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.vertices.len(), b.vertices.len());
        assert_eq!(a.iterations, b.iterations);
        for (va, vb) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(va.q, vb.q);
            assert_eq!(va.qd, vb.qd);
            assert_eq!(va.parent, vb.parent);
        }
    }
}
