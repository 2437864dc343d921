//! Runs the UAV corridor scenario and reports tree coverage: best
//! goal distance, progress along the corridor, rest-vertex counts,
//! and the distance profile near the goal.

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::bench::{default_environment, default_goal, default_start, SystemId};
use ua1rrt::dynamics::PlanarUav;
use ua1rrt::planner::{goal_distance, plan, PlannerConfig};
use ua1rrt::SystemModel;

fn main() -> ua1rrt::Result<()> {
    let mut args = std::env::args().skip(1);
    let budget: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let d_max: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let gamma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let n_rndm: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let period: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let kappa: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3.0);

    let model = PlanarUav::default_params();
    let env = default_environment(SystemId::Uav);
    let start = default_start(SystemId::Uav);
    let goal = default_goal(SystemId::Uav);
    let cfg = PlannerConfig {
        d_max,
        gamma,
        k,
        n_rndm,
        goal_bias_period: period,
        kappa,
        budget: Duration::from_secs_f64(budget),
        ..PlannerConfig::default()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = plan(&model, &env, &start, &goal, &cfg, &mut rng)?;
    println!(
        "seed {seed} d_max {d_max} gamma {gamma} k {k} n {n_rndm} period {period}: success={} iters={} vertices={} {:.1}s steer {:.2} ms",
        report.succeeded(),
        report.iterations,
        report.tree.len(),
        report.elapsed.as_secs_f64(),
        report.mean_steer_time_ms(),
    );

    let kinds = model.coordinate_kinds();
    let q_max = &model.scales().q_max;
    let qd_max = &model.scales().qd_max;
    let mut best = f64::INFINITY;
    let mut best_rest = f64::INFINITY;
    let mut max_x: f64 = 0.0;
    let mut rest = 0usize;
    let mut past = [0usize; 3];
    let gates = [1.2, 2.2, 3.2];
    for v in &report.tree.vertices {
        let qd = &v.tangent * v.theta.max(0.0).sqrt();
        let d = goal_distance(&v.q, &qd, &goal, kinds, q_max, qd_max);
        best = best.min(d);
        if v.theta < 1e-12 {
            rest += 1;
            best_rest = best_rest.min(d);
        }
        max_x = max_x.max(v.q[0]);
        for (g, &x) in gates.iter().enumerate() {
            if v.q[0] > x {
                past[g] += 1;
            }
        }
    }
    println!(
        "best d_goal {best:.4} (rest-only {best_rest:.4}), {rest} rest vertices, max x {max_x:.3}, past gates {past:?}"
    );

    // theta distribution among the 20 goal-nearest vertices
    let mut near: Vec<(f64, f64, f64)> = report
        .tree
        .vertices
        .iter()
        .map(|v| {
            let qd = &v.tangent * v.theta.max(0.0).sqrt();
            (
                goal_distance(&v.q, &qd, &goal, kinds, q_max, qd_max),
                v.theta,
                v.q[0],
            )
        })
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    near.truncate(15);
    for (d, th, x) in near {
        println!("  d_goal {d:.4} theta {th:.3} x {x:.3}");
    }
    Ok(())
}
