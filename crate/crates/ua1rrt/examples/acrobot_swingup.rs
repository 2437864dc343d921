//! Plans an acrobot swing-up from the hanging rest state to the
//! upright goal family and exports the resulting trajectory as CSV.
//!
//! Usage: acrobot_swingup [budget_s] [seed] [out.csv]

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::bench::{default_environment, default_goal, default_start, export_trajectory, SystemId};
use ua1rrt::dynamics::Acrobot;
use ua1rrt::planner::{plan, PlannerConfig};

fn main() -> ua1rrt::Result<()> {
    let mut args = std::env::args().skip(1);
    let budget: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(120.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = args.next();

    let model = Acrobot::default_params();
    let env = default_environment(SystemId::Acrobot);
    let start = default_start(SystemId::Acrobot);
    let goal = default_goal(SystemId::Acrobot);
    let cfg = PlannerConfig {
        budget: Duration::from_secs_f64(budget),
        ..PlannerConfig::default()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = plan(&model, &env, &start, &goal, &cfg, &mut rng)?;

    println!(
        "seed {seed}: success={} after {} iterations, {} vertices, {:.1}s \
         (mean steer {:.3} ms)",
        report.succeeded(),
        report.iterations,
        report.tree.len(),
        report.elapsed.as_secs_f64(),
        report.mean_steer_time_ms()
    );

    if let Some(traj) = &report.trajectory {
        let q_end = traj.q.last().unwrap();
        println!(
            "trajectory: {} samples over {:.2} s, final q = [{:.4}, {:.4}]",
            traj.len(),
            traj.duration(),
            q_end[0],
            q_end[1]
        );
        if let Some(path) = out {
            export_trajectory(traj, std::path::Path::new(&path))?;
            println!("wrote {path}");
        }
    }
    Ok(())
}
