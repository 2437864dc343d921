//! Reproduces a goal-reaching tree and dissects the root-to-goal chain
//! edge by edge: stored terminal rate vs re-integration from the
//! propagated rate and from the stored parent rate, truncation grid
//! alignment, and termination kinds. For chasing junction mismatches.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};
use ua1rrt::bench::{default_environment, default_goal, default_start, SystemId};
use ua1rrt::dynamics::Acrobot;
use ua1rrt::planner::{extend, PlannerConfig, SteerTimer, Tree, Vertex};
use ua1rrt::profile::integrate_path_profile;
use ua1rrt::SystemModel;

fn main() {
    let budget: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(120.0);
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
    let qd_max = &model.scales().qd_max;

    let mut tree = Tree::with_root(Vertex {
        q: start.q.clone(),
        parent: None,
        path: None,
        theta: 0.0,
        tangent: DVector::zeros(2),
    });
    let mut timer = SteerTimer::default();

    let begin = Instant::now();
    let mut i = 0usize;
    let mut goal_vertex = None;
    while begin.elapsed().as_secs_f64() < budget && goal_vertex.is_none() {
        i += 1;
        let goal_biased = cfg.goal_bias_period > 0 && i % cfg.goal_bias_period == 0;
        let (q_r, gamma) = if goal_biased {
            let pick = (0..goal.states.len())
                .min_by(|&a, &b| {
                    let da = tree
                        .vertices
                        .iter()
                        .map(|v| {
                            ua1rrt::planner::projected_distance(
                                &v.q,
                                0.0,
                                &v.tangent,
                                &goal.states[a].0,
                                0.0,
                                q_max,
                            )
                        })
                        .fold(f64::INFINITY, f64::min);
                    let db = tree
                        .vertices
                        .iter()
                        .map(|v| {
                            ua1rrt::planner::projected_distance(
                                &v.q,
                                0.0,
                                &v.tangent,
                                &goal.states[b].0,
                                0.0,
                                q_max,
                            )
                        })
                        .fold(f64::INFINITY, f64::min);
                    da.total_cmp(&db).then(a.cmp(&b))
                })
                .unwrap();
            (goal.states[pick].0.clone(), 0.0)
        } else {
            (env.random_configuration(&mut rng).unwrap(), cfg.gamma)
        };
        if let Some(c) = extend(&model, &env, &tree, &q_r, gamma, &cfg, &mut rng, &mut timer) {
            let idx = tree.add(Vertex {
                q: c.endpoint,
                parent: Some(c.parent),
                path: Some(c.path),
                theta: c.theta,
                tangent: c.tangent,
            });
            let v = &tree.vertices[idx];
            let qd = &v.tangent * v.theta.max(0.0).sqrt();
            let d = ua1rrt::planner::goal_distance(
                &v.q,
                &qd,
                &goal,
                model.coordinate_kinds(),
                q_max,
                qd_max,
            );
            if d <= goal.epsilon {
                goal_vertex = Some(idx);
            }
        }
    }

    let Some(gv) = goal_vertex else {
        println!("no goal vertex reached in {i} iterations; nothing to dissect");
        return;
    };
    println!("goal vertex {gv} after {i} iterations; dissecting chain");

    let chain = tree.branch(gv);
    let ds = cfg.ds;
    let mut theta = tree.vertices[chain[0]].theta;
    for &idx in &chain[1..] {
        let v = &tree.vertices[idx];
        let path = v.path.as_ref().unwrap();
        let parent_stored = tree.vertices[v.parent.unwrap()].theta;
        let from_prop = integrate_path_profile(&model, path, theta, ds);
        let from_stored = integrate_path_profile(&model, path, parent_stored, ds);
        let s_end = path.s_trunc();
        let frac = (s_end / ds).fract();
        match (&from_prop, &from_stored) {
            (Ok(a), Ok(b)) => {
                let ta = a.terminal_theta();
                let tb = b.terminal_theta();
                println!(
                    "edge ->{idx}: s_end={s_end:.9} frac={frac:.6} stored={:.3e} prop={:.3e} (d={:+.3e}, {}) storedθ0={:.3e} (d={:+.3e}, {}) inδ={:+.3e}",
                    v.theta,
                    ta,
                    ta - v.theta,
                    a.termination.as_str(),
                    tb,
                    tb - v.theta,
                    b.termination.as_str(),
                    theta - parent_stored,
                );
                if (ta - v.theta).abs() > 1e-6 {
                    println!("  ^^ MISMATCH beyond 1e-6");
                    // diff the truncated re-integration against the
                    // original full-domain pass, point by point
                    let full = ua1rrt::geometry::truncate(path, 1.0).unwrap();
                    let pf = integrate_path_profile(&model, &full, parent_stored, ds).unwrap();
                    let pt = from_stored.as_ref().unwrap();
                    println!(
                        "  full-domain pass: {} at s_star={:.9}, {} pts, patched={:?}",
                        pf.termination.as_str(),
                        pf.s_star,
                        pf.s.len(),
                        pf.patched,
                    );
                    println!(
                        "  truncated pass:   {} at s_star={:.9}, {} pts, patched={:?}",
                        pt.termination.as_str(),
                        pt.s_star,
                        pt.s.len(),
                        pt.patched,
                    );
                    let n = pf.s.len().min(pt.s.len());
                    let mut first_diff = None;
                    for j in 0..n {
                        if pf.theta[j] != pt.theta[j] || pf.s[j] != pt.s[j] {
                            first_diff = Some(j);
                            break;
                        }
                    }
                    println!("  first differing sample: {first_diff:?} of {n}");
                    if let Some(j0) = first_diff {
                        for j in j0.saturating_sub(3)..(j0 + 3).min(n) {
                            println!(
                                "    j={j}: full (s={:.9}, th={:.9e}, sl={:.6e}) trunc (s={:.9}, th={:.9e}, sl={:.6e})",
                                pf.s[j], pf.theta[j], pf.dtheta[j], pt.s[j], pt.theta[j], pt.dtheta[j],
                            );
                        }
                    }
                    for j in n.saturating_sub(3)..n {
                        println!(
                            "    tail j={j}: full (s={:.9}, th={:.9e}) trunc (s={:.9}, th={:.9e})",
                            pf.s[j], pf.theta[j], pt.s[j], pt.theta[j],
                        );
                    }
                }
                theta = ta;
            }
            _ => {
                println!(
                    "edge ->{idx}: integration error prop={:?} stored={:?}",
                    from_prop.err(),
                    from_stored.err()
                );
                return;
            }
        }
    }
}
