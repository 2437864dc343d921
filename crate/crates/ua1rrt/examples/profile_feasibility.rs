//! Rate-profile basics on the constant-coefficient test system:
//! forward integration, feasibility classification, truncation at
//! s_star and time reconstruction.

use nalgebra::DVector;
use ua1rrt::dynamics::SyntheticUa1;
use ua1rrt::geometry::make_cubic;
use ua1rrt::profile::{integrate_path_profile, time_parameterize, Termination};
use ua1rrt::truncate;

fn straight_path() -> ua1rrt::PathSegment {
    // P(s) = (s, 0): along this line the synthetic model's
    // underactuated coefficients are exactly its (a, b, c) parameters.
    let q0 = DVector::from_row_slice(&[0.0, 0.0]);
    let q1 = DVector::from_row_slice(&[1.0, 0.0]);
    let t = DVector::from_row_slice(&[1.0, 0.0]);
    make_cubic(&q0, &t, &q1, &t)
}

fn main() {
    let ds = 1e-3;

    // c < 0 pushes the rate up: theta(s) = 1 - exp(-2s), feasible
    // over the whole domain.
    let accel = SyntheticUa1::new(1.0, 1.0, -1.0);
    let path = straight_path();
    let profile = integrate_path_profile(&accel, &path, 0.0, ds).unwrap();
    println!(
        "forcing    : {:?}, s_star = {:.3}, theta(1) = {:.6} (closed form {:.6})",
        profile.termination,
        profile.s_star,
        profile.terminal_theta(),
        1.0 - (-2.0_f64).exp()
    );

    // c > 0 drains the rate: theta(s) = theta0 - 2s hits zero at
    // s = theta0 / 2 and the pass stops there.
    let brake = SyntheticUa1::new(1.0, 0.0, 1.0);
    let profile = integrate_path_profile(&brake, &path, 1.0, ds).unwrap();
    println!(
        "braking    : {:?}, s_star = {:.3} (expected 0.5 - O(ds))",
        profile.termination, profile.s_star
    );

    // the usable prefix is still a perfectly good edge: truncate and
    // reconstruct the time law over it
    let prefix = truncate(&path, 0.45).unwrap();
    let profile = integrate_path_profile(&brake, &prefix, 1.0, ds).unwrap();
    assert_eq!(profile.termination, Termination::Completed);
    let traj = time_parameterize(&brake, &prefix, &profile).unwrap();
    println!(
        "truncated  : T = {:.9} s over s in [0, 0.45] (closed form {:.9})",
        traj.duration(),
        1.0 - 0.1_f64.sqrt()
    );
    println!(
        "             {} samples, final qd = [{:.4}, {:.4}]",
        traj.len(),
        traj.qd.last().unwrap()[0],
        traj.qd.last().unwrap()[1]
    );
}
