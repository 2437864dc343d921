//! Prints tree statistics after a fixed-budget acrobot run: how close
//! the search gets to the goal set and how the tree covers the
//! unwrapped configuration space.

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::bench::{default_environment, default_goal, default_start, SystemId};
use ua1rrt::dynamics::Acrobot;
use ua1rrt::planner::{goal_distance, plan, PlannerConfig};
use ua1rrt::SystemModel;

fn main() {
    let budget: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(30.0);
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
    let report = plan(&model, &env, &start, &goal, &cfg, &mut rng).unwrap();

    println!(
        "success={} iterations={} vertices={} elapsed={:.1}s",
        report.succeeded(),
        report.iterations,
        report.tree.len(),
        report.elapsed.as_secs_f64()
    );

    let kinds = model.coordinate_kinds();
    let scales = model.scales();
    let mut best = f64::INFINITY;
    let mut best_v = 0;
    let mut q1_min = f64::INFINITY;
    let mut q1_max = f64::NEG_INFINITY;
    let mut theta_max = 0.0_f64;
    let mut near_upright = 0usize;
    for (i, v) in report.tree.vertices.iter().enumerate() {
        let qd = &v.tangent * v.theta.max(0.0).sqrt();
        let d = goal_distance(&v.q, &qd, &goal, kinds, &scales.q_max, &scales.qd_max);
        if d < best {
            best = d;
            best_v = i;
        }
        q1_min = q1_min.min(v.q[0]);
        q1_max = q1_max.max(v.q[0]);
        theta_max = theta_max.max(v.theta);
        let up = (v.q[0] - std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI);
        if up.min(2.0 * std::f64::consts::PI - up) < 0.3 {
            near_upright += 1;
        }
    }
    let v = &report.tree.vertices[best_v];
    let qd = &v.tangent * v.theta.max(0.0).sqrt();
    println!("best d_goal = {best:.4} at vertex {best_v}");
    println!(
        "  q = [{:.3}, {:.3}]  qd = [{:.3}, {:.3}]  theta = {:.3}",
        v.q[0], v.q[1], qd[0], qd[1], v.theta
    );
    println!("q1 range: [{q1_min:.2}, {q1_max:.2}]  theta_max = {theta_max:.2}");
    println!("vertices with q1 within 0.3 of upright (mod 2pi): {near_upright}");

    // histogram of goal distances
    let mut buckets = [0usize; 8];
    let edges = [0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8];
    for v in &report.tree.vertices {
        let qd = &v.tangent * v.theta.max(0.0).sqrt();
        let d = goal_distance(&v.q, &qd, &goal, kinds, &scales.q_max, &scales.qd_max);
        let mut b = edges.len();
        for (j, e) in edges.iter().enumerate() {
            if d <= *e {
                b = j;
                break;
            }
        }
        buckets[b] += 1;
    }
    println!("d_goal histogram (<=0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8, >): {buckets:?}");
}
