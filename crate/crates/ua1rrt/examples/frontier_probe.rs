//! Instrumented acrobot planning loop: tracks how often extensions
//! start from low-rate "turning point" vertices at the shoulder
//! amplitude frontier, and whether those extensions ever push the
//! frontier outward.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};
use ua1rrt::bench::{default_environment, default_goal, default_start, SystemId};
use ua1rrt::dynamics::Acrobot;
use ua1rrt::planner::{extend, PlannerConfig, SteerTimer, Tree, Vertex};

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

    let mut tree = Tree::with_root(Vertex {
        q: start.q.clone(),
        parent: None,
        path: None,
        theta: 0.0,
        tangent: DVector::zeros(2),
    });
    let mut timer = SteerTimer::default();

    // running amplitude record among sub-unit-rate vertices
    let mut record = 0.0_f64;
    let mut frontier_parents = 0usize; // extensions from near-record low-rate vertices
    let mut frontier_gains = 0usize; // ... that pushed the record outward
    let mut stalls = 0usize; // iterations where extend returned nothing

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
        match extend(&model, &env, &tree, &q_r, gamma, &cfg, &mut rng, &mut timer) {
            Some(c) => {
                let parent = &tree.vertices[c.parent];
                let parent_frontier =
                    parent.theta < 1.0 && parent.q[0].abs() >= 0.8 * record && record > 0.3;
                let child_q1 = c.endpoint[0].abs();
                let child_theta = c.theta;
                if parent_frontier {
                    frontier_parents += 1;
                }
                tree.add(Vertex {
                    q: c.endpoint,
                    parent: Some(c.parent),
                    path: Some(c.path),
                    theta: c.theta,
                    tangent: c.tangent,
                });
                if child_theta < 1.0 && child_q1 > record {
                    if parent_frontier {
                        frontier_gains += 1;
                    }
                    record = child_q1;
                }
            }
            None => stalls += 1,
        }
        if i % 2000 == 0 {
            println!(
                "iter {i:>6}: vertices={:<6} record amplitude={record:.3} \
                 frontier parents={frontier_parents} frontier gains={frontier_gains} stalls={stalls}",
                tree.len()
            );
        }
    }
    println!(
        "final: iterations={i} vertices={} record={record:.3} \
         frontier parents={frontier_parents} gains={frontier_gains} stalls={stalls}",
        tree.len()
    );

    // where do extensions come from? histogram of parent theta
    let mut theta_hist = [0usize; 5]; // <0.01, <1, <10, <100, >=100
    for v in &tree.vertices {
        if let Some(p) = v.parent {
            let th = tree.vertices[p].theta;
            let b = if th < 0.01 {
                0
            } else if th < 1.0 {
                1
            } else if th < 10.0 {
                2
            } else if th < 100.0 {
                3
            } else {
                4
            };
            theta_hist[b] += 1;
        }
    }
    println!("parent theta histogram (<0.01, <1, <10, <100, >=100): {theta_hist:?}");
}
