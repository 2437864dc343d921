//! Plans a planar UAV flight through the default corridor with three
//! alternating floor/ceiling obstacles, from hover on the left to
//! hover on the right.
//!
//! Usage: uav_corridor [budget_s] [seed] [out.csv]

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::bench::{default_environment, default_goal, default_start, export_trajectory, SystemId};
use ua1rrt::dynamics::PlanarUav;
use ua1rrt::planner::{plan, PlannerConfig};

fn main() -> ua1rrt::Result<()> {
    let mut args = std::env::args().skip(1);
    let budget: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(120.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = args.next();

    let model = PlanarUav::default_params();
    let env = default_environment(SystemId::Uav);
    let start = default_start(SystemId::Uav);
    let goal = default_goal(SystemId::Uav);
    let cfg = PlannerConfig {
        // a tighter chord clamp and full-horizon velocity projection
        // work better in the narrow corridor than the acrobot settings
        d_max: 1.0,
        gamma: 1.0,
        budget: Duration::from_secs_f64(budget),
        ..PlannerConfig::default()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = plan(&model, &env, &start, &goal, &cfg, &mut rng)?;

    println!(
        "seed {seed}: success={} after {} iterations, {} vertices, {:.1}s",
        report.succeeded(),
        report.iterations,
        report.tree.len(),
        report.elapsed.as_secs_f64()
    );

    if let Some(traj) = &report.trajectory {
        let q_end = traj.q.last().unwrap();
        println!(
            "trajectory: {} samples over {:.2} s, final q = [{:.3}, {:.3}, {:.3}]",
            traj.len(),
            traj.duration(),
            q_end[0],
            q_end[1],
            q_end[2]
        );
        if let Some(path) = out {
            export_trajectory(traj, std::path::Path::new(&path))?;
            println!("wrote {path}");
        }
    }
    Ok(())
}
