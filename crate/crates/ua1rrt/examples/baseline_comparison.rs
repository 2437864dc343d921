//! Runs the profile-based planner and the plain state-space KNN-RRT
//! baseline on the same UAV corridor problem and prints the results
//! side by side.
//!
//! Usage: baseline_comparison [budget_s] [seed]

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::baseline::{knn_rrt_plan, KnnConfig};
use ua1rrt::bench::{default_environment, default_goal, default_start, SystemId};
use ua1rrt::dynamics::PlanarUav;
use ua1rrt::planner::{plan, PlannerConfig};

fn main() -> ua1rrt::Result<()> {
    let mut args = std::env::args().skip(1);
    let budget: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let model = PlanarUav::default_params();
    let env = default_environment(SystemId::Uav);
    let start = default_start(SystemId::Uav);
    let goal = default_goal(SystemId::Uav);

    let cfg = PlannerConfig {
        d_max: 1.0,
        gamma: 1.0,
        budget: Duration::from_secs_f64(budget),
        ..PlannerConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = plan(&model, &env, &start, &goal, &cfg, &mut rng)?;
    println!(
        "profile planner : success={} iterations={} vertices={} elapsed={:.1}s{}",
        report.succeeded(),
        report.iterations,
        report.tree.len(),
        report.elapsed.as_secs_f64(),
        report
            .trajectory
            .as_ref()
            .map(|t| format!(" duration={:.2}s", t.duration()))
            .unwrap_or_default()
    );

    let knn_cfg = KnnConfig {
        budget: Duration::from_secs_f64(budget),
        ..KnnConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = knn_rrt_plan(&model, &env, &start, &goal, &knn_cfg, &mut rng)?;
    println!(
        "knn-rrt baseline: success={} iterations={} vertices={} elapsed={:.1}s{}",
        report.succeeded(),
        report.iterations,
        report.vertices.len(),
        report.elapsed.as_secs_f64(),
        report
            .trajectory
            .as_ref()
            .map(|t| format!(" duration={:.2}s", t.duration()))
            .unwrap_or_default()
    );
    Ok(())
}
