//! Instruments goal-biased extensions on the acrobot: who wins the
//! nearest-neighbour slots when the sample is a goal state, and what
//! gets inserted. Checks for "flyby pileup": fast vertices parked
//! exactly at a goal configuration that monopolise the k slots.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};
use ua1rrt::bench::{default_environment, default_goal, default_start, SystemId};
use ua1rrt::dynamics::Acrobot;
use ua1rrt::planner::{extend, nearest_k, PlannerConfig, SteerTimer, Tree, Vertex};
use ua1rrt::SystemModel;

fn main() {
    let budget: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(60.0);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);

    let model = Acrobot::default_params();
    let env = default_environment(SystemId::Acrobot);
    let start = default_start(SystemId::Acrobot);
    let goal = default_goal(SystemId::Acrobot);
    let cfg = PlannerConfig {
        budget: Duration::from_secs_f64(budget),
        ..PlannerConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q_max = &model.scales().q_max;

    let mut tree = Tree::with_root(Vertex {
        q: start.q.clone(),
        parent: None,
        path: None,
        theta: 0.0,
        tangent: DVector::zeros(2),
    });
    let mut timer = SteerTimer::default();

    let mut goal_extends = 0usize;
    let mut nn_theta_sum = 0.0;
    let mut nn_rest_slots = 0usize; // slots with theta < 1
    let mut nn_slots = 0usize;
    let mut exact_hits = vec![0usize; goal.states.len()]; // vertices parked at goal configs

    let begin = Instant::now();
    let mut i = 0usize;
    while begin.elapsed().as_secs_f64() < budget {
        i += 1;
        let goal_biased = i % cfg.goal_bias_period == 0;
        let (q_r, gamma) = if goal_biased {
            let pick = rng.gen_range(0..goal.states.len());
            (goal.states[pick].0.clone(), 0.0)
        } else {
            (env.random_configuration(&mut rng).unwrap(), cfg.gamma)
        };
        if goal_biased {
            goal_extends += 1;
            let nn = nearest_k(&tree, &q_r, cfg.k, 0.0, q_max);
            for &idx in &nn {
                let v = &tree.vertices[idx];
                nn_theta_sum += v.theta;
                nn_slots += 1;
                if v.theta < 1.0 {
                    nn_rest_slots += 1;
                }
            }
            if goal_extends % 100 == 0 {
                let thetas: Vec<f64> = nn.iter().map(|&j| tree.vertices[j].theta).collect();
                let dists: Vec<f64> = nn
                    .iter()
                    .map(|&j| (&tree.vertices[j].q - &q_r).norm())
                    .collect();
                println!(
                    "goal extend {goal_extends} (iter {i}): nn theta {:?}",
                    thetas.iter().map(|t| (*t * 10.0).round() / 10.0).collect::<Vec<_>>()
                );
                println!(
                    "    nn config dist {:?}",
                    dists.iter().map(|d| (*d * 1000.0).round() / 1000.0).collect::<Vec<_>>()
                );
            }
        }
        if let Some(c) = extend(&model, &env, &tree, &q_r, gamma, &cfg, &mut rng, &mut timer) {
            for (g, (gq, _)) in goal.states.iter().enumerate() {
                if (&c.endpoint - gq).norm() < 1e-9 {
                    exact_hits[g] += 1;
                }
            }
            tree.add(Vertex {
                q: c.endpoint,
                parent: Some(c.parent),
                path: Some(c.path),
                theta: c.theta,
                tangent: c.tangent,
            });
        }
    }
    println!(
        "iterations {i}, vertices {}, goal extends {goal_extends}",
        tree.len()
    );
    println!(
        "nn slots in goal extends: {} total, {} with theta < 1 ({:.1}%), mean theta {:.1}",
        nn_slots,
        nn_rest_slots,
        100.0 * nn_rest_slots as f64 / nn_slots.max(1) as f64,
        nn_theta_sum / nn_slots.max(1) as f64
    );
    println!("vertices parked exactly at each goal config: {exact_hits:?}");
}
