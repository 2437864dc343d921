//! Microbenchmark for the steering hot path: times path generation
//! and profile integration separately, for short- and long-running
//! candidates.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use ua1rrt::dynamics::Acrobot;
use ua1rrt::geometry::{generate_path, PathStart, TangentSampling};
use ua1rrt::profile::{integrate_path_profile_summary, Termination};
use ua1rrt::SystemModel;

fn main() {
    let model = Acrobot::default_params();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let q0 = DVector::from_row_slice(&[0.4, -0.2]);
    let tangent = DVector::zeros(2);
    let sampling = TangentSampling { kappa: 3.0 };

    // pre-generate candidates from a rest vertex
    let n = 20_000usize;
    let t0 = Instant::now();
    let paths: Vec<_> = (0..n)
        .map(|_| {
            let target =
                DVector::from_row_slice(&[rng.gen_range(-2.0..2.0), rng.gen_range(-1.5..1.5)]);
            let start = PathStart {
                q: &q0,
                tangent: &tangent,
                theta: 0.0,
            };
            generate_path(&start, &target, sampling, &mut rng)
        })
        .collect();
    let gen_time = t0.elapsed();
    println!(
        "generate_path: {:.2} us/candidate",
        gen_time.as_secs_f64() * 1e6 / n as f64
    );

    let t1 = Instant::now();
    let mut total_points = 0usize;
    let mut by_term = [0usize; 4];
    for p in &paths {
        let s = integrate_path_profile_summary(&model, p, 0.0, 1e-3).unwrap();
        total_points += s.points;
        by_term[match s.termination {
            Termination::Completed => 0,
            Termination::ZeroCrossing => 1,
            Termination::BoundViolation => 2,
            Termination::SingularityFailure => 3,
        }] += 1;
    }
    let int_time = t1.elapsed();
    println!(
        "integrate: {:.2} us/candidate, {:.1} ns/step ({} steps avg)",
        int_time.as_secs_f64() * 1e6 / n as f64,
        int_time.as_secs_f64() * 1e9 / total_points as f64,
        total_points / n
    );
    println!("terminations (done/zero/bound/sing): {by_term:?}");

    // long-running case: a near-feasible slow path (straight drop)
    let q1 = DVector::from_row_slice(&[0.6, -0.3]);
    let start = PathStart {
        q: &q0,
        tangent: &tangent,
        theta: 0.0,
    };
    let long_paths: Vec<_> = (0..2000)
        .map(|_| generate_path(&start, &q1, sampling, &mut rng))
        .collect();
    let t2 = Instant::now();
    let mut pts = 0usize;
    for p in &long_paths {
        pts += integrate_path_profile_summary(&model, p, 0.0, 1e-3)
            .unwrap()
            .points;
    }
    let el = t2.elapsed();
    println!(
        "near-target candidates: {:.2} us/candidate, {:.1} ns/step ({} steps avg)",
        el.as_secs_f64() * 1e6 / 2000.0,
        el.as_secs_f64() * 1e9 / pts as f64,
        pts / 2000
    );
    let _ = model.dof();
}
