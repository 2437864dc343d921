//! Deeper acrobot tree statistics: mechanical-energy growth, edge
//! displacement and truncation distributions. Useful when the search
//! stalls and it is unclear whether energy injection or exploration
//! is the bottleneck.

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::bench::{default_environment, default_goal, default_start, SystemId};
use ua1rrt::dynamics::{evaluate_terms, Acrobot};
use ua1rrt::planner::{plan, PlannerConfig};

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

    let g = 9.81;
    // potential energy relative to hanging, unit links with midpoint
    // centres of mass
    let potential = |q1: f64, q2: f64| -> f64 {
        let h1 = 0.5 * (1.0 - q1.cos());
        let h2 = (1.0 - q1.cos()) + 0.5 * (1.0 - (q1 + q2).cos());
        g * (h1 + h2)
    };
    let upright = potential(std::f64::consts::PI, 0.0);

    let mut max_e = f64::NEG_INFINITY;
    let mut max_e_v = 0;
    let mut max_qd1 = 0.0_f64;
    let mut max_dq1_edge = 0.0_f64;
    let mut max_strunc = 0.0_f64;
    let mut strunc_hist = [0usize; 6]; // <=0.01, 0.05, 0.1, 0.3, 0.6, <=1
    let mut depth_of_max_e = 0;
    for (i, v) in report.tree.vertices.iter().enumerate() {
        let qd = &v.tangent * v.theta.max(0.0).sqrt();
        let (m, _, _, _) = evaluate_terms(&model, &v.q, &qd).unwrap();
        let ke = 0.5 * (qd.transpose() * &m * &qd)[(0, 0)];
        let e = ke + potential(v.q[0], v.q[1]);
        if e > max_e {
            max_e = e;
            max_e_v = i;
            depth_of_max_e = report.tree.branch(i).len() - 1;
        }
        max_qd1 = max_qd1.max(qd[0].abs());
        if let (Some(p), Some(path)) = (v.parent, &v.path) {
            let dq1 = (v.q[0] - report.tree.vertices[p].q[0]).abs();
            max_dq1_edge = max_dq1_edge.max(dq1);
            max_strunc = max_strunc.max(path.s_trunc());
            let edges = [0.01, 0.05, 0.1, 0.3, 0.6];
            let mut b = edges.len();
            for (j, e) in edges.iter().enumerate() {
                if path.s_trunc() <= *e {
                    b = j;
                    break;
                }
            }
            strunc_hist[b] += 1;
        }
    }
    let v = &report.tree.vertices[max_e_v];
    let qd = &v.tangent * v.theta.max(0.0).sqrt();
    println!("upright potential-energy barrier: {upright:.1} J");
    println!(
        "max energy {max_e:.1} J at vertex {max_e_v} (depth {depth_of_max_e}): \
         q=[{:.2}, {:.2}] qd=[{:.2}, {:.2}] theta={:.2}",
        v.q[0], v.q[1], qd[0], qd[1], v.theta
    );
    println!("max |qd1| over tree: {max_qd1:.2} rad/s");
    println!("max edge |dq1|: {max_dq1_edge:.3} rad, max s_trunc: {max_strunc:.3}");
    println!("s_trunc histogram (<=0.01, 0.05, 0.1, 0.3, 0.6, >): {strunc_hist:?}");

    // energy growth vs insertion index (proxy for time)
    let n = report.tree.len();
    for frac in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let upto = ((n as f64) * frac) as usize;
        let mut best = f64::NEG_INFINITY;
        for v in &report.tree.vertices[..upto.max(1)] {
            let qd = &v.tangent * v.theta.max(0.0).sqrt();
            let (m, _, _, _) = evaluate_terms(&model, &v.q, &qd).unwrap();
            let e = 0.5 * (qd.transpose() * &m * &qd)[(0, 0)] + potential(v.q[0], v.q[1]);
            best = best.max(e);
        }
        println!("max energy in first {:>5.0}% of tree: {best:.1} J", frac * 100.0);
    }
}
