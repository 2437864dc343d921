//! Open-loop consistency check: steer a few edges on the acrobot,
//! time-parameterise each and replay the recovered torques through the
//! full dynamics. The simulated configuration should track the planned
//! path closely.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::baseline::replay;
use ua1rrt::dynamics::Acrobot;
use ua1rrt::planner::{steer, PlannerConfig, Tree, Vertex};
use ua1rrt::profile::{integrate_path_profile, time_parameterize, Termination};

fn main() {
    let model = Acrobot::default_params();
    let cfg = PlannerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let tree = Tree::with_root(Vertex {
        q: DVector::from_row_slice(&[0.0, 0.0]),
        parent: None,
        path: None,
        theta: 0.0,
        tangent: DVector::from_row_slice(&[0.0, 0.0]),
    });

    for trial in 0..5 {
        let target = DVector::from_fn(2, |_, _| {
            use rand::Rng;
            rng.gen_range(-2.0..2.0)
        });
        let Some(c) = steer(&model, &tree, 0, &target, &cfg, &mut rng) else {
            println!("trial {trial}: no feasible candidate");
            continue;
        };
        let profile = integrate_path_profile(&model, &c.path, 0.0, cfg.ds).unwrap();
        assert_eq!(profile.termination, Termination::Completed);
        let traj = time_parameterize(&model, &c.path, &profile).unwrap();
        let states = replay(&model, &traj, 1e-4).unwrap();
        let (_, q_end, qd_end) = states.last().unwrap();
        let q_plan = traj.q.last().unwrap();
        let qd_plan = traj.qd.last().unwrap();
        println!(
            "trial {trial}: s_star={:.3} T={:.3}s  |dq|={:.2e}  |dqd|={:.2e}  endpoint=[{:.3},{:.3}] theta_end={:.4}",
            c.path.s_trunc(),
            traj.duration(),
            (q_end - q_plan).norm(),
            (qd_end - qd_plan).norm(),
            q_plan[0], q_plan[1],
            profile.terminal_theta(),
        );
    }
}
