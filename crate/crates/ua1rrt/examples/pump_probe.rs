//! Swing-pumping probe: chains steered edges that follow the shoulder
//! swing, flipping the target direction at each turning point. This
//! emulates an ideal sequence of RRT extensions and separates "the
//! path family cannot express energy pumping" from "the tree search
//! fails to find it".

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ua1rrt::dynamics::{Acrobot, AcrobotParams};
use ua1rrt::planner::{steer, PlannerConfig, Tree, Vertex};

fn main() {
    let n_rndm: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let edges: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let mass: f64 = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.0);
    let length: f64 = std::env::args()
        .nth(4)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.0);

    let model = Acrobot::new(AcrobotParams {
        m1: mass,
        m2: mass,
        l1: length,
        l2: length,
        ..AcrobotParams::default()
    });
    let cfg = PlannerConfig {
        n_rndm,
        ..PlannerConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let root = Vertex {
        q: DVector::zeros(2),
        parent: None,
        path: None,
        theta: 0.0,
        tangent: DVector::zeros(2),
    };
    let mut tree = Tree::with_root(root);
    let mut current = 0usize;
    let mut dir = 1.0_f64;
    let mut max_q1 = 0.0_f64;

    for step in 0..edges {
        let (q1, qd1) = {
            let v = &tree.vertices[current];
            let qd = &v.tangent * v.theta.max(0.0).sqrt();
            (v.q[0], qd[0])
        };
        // follow the swing; flip at turning points
        if qd1.abs() > 0.2 {
            dir = qd1.signum();
        } else if q1.abs() > 0.1 {
            dir = -q1.signum();
        }
        let target = DVector::from_row_slice(&[q1 + dir * cfg.d_max, 0.0]);

        match steer(&model, &tree, current, &target, &cfg, &mut rng) {
            Some(c) => {
                let vertex = Vertex {
                    q: c.endpoint.clone(),
                    parent: Some(c.parent),
                    path: Some(c.path),
                    theta: c.theta,
                    tangent: c.tangent,
                };
                current = tree.add(vertex);
                let v = &tree.vertices[current];
                let qd = &v.tangent * v.theta.max(0.0).sqrt();
                max_q1 = max_q1.max(v.q[0].abs());
                if step % 10 == 0 || step + 1 == edges {
                    println!(
                        "edge {step:>3}: q=[{:+.3}, {:+.3}] qd=[{:+.2}, {:+.2}] theta={:.3} s_trunc={:.3}",
                        v.q[0],
                        v.q[1],
                        qd[0],
                        qd[1],
                        v.theta,
                        v.path.as_ref().unwrap().s_trunc()
                    );
                }
            }
            None => {
                // dead end: back up one vertex and try again
                let v = &tree.vertices[current];
                if let Some(p) = v.parent {
                    println!("edge {step}: dead end, backing up");
                    current = p;
                } else {
                    println!("edge {step}: stuck at root, stopping");
                    break;
                }
            }
        }
    }
    println!("max |q1| reached: {max_q1:.3}");
}
