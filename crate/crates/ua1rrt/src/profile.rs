//! Forward integration of the squared path rate profile and
//! time-domain reconstruction.
//!
//! The underactuated row of the path-parameterised dynamics is a first
//! order linear ODE in `theta(s) = sdot^2`:
//!
//! ```text
//! a_u(s) theta' + 2 b_u(s) theta + 2 c_u(s) = 0
//! ```
//!
//! A single forward pass from `theta0` classifies the path: reaching
//! the end of the domain with all bounds respected means the path is
//! dynamically feasible, a zero-crossing of `theta` means the system
//! runs out of kinetic energy, and a bound violation caps the usable
//! portion. The largest admissible parameter `s_star` is tracked
//! inside the same pass.

use nalgebra::DVector;

use crate::dynamics::{pp_coefficients, recover_inputs, PointOde, SystemModel};
use crate::error::{Error, Result};
use crate::geometry::PathSegment;

/// Why the forward pass stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    ZeroCrossing,
    BoundViolation,
    SingularityFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::ZeroCrossing => "zero_crossing",
            Termination::BoundViolation => "bound_violation",
            Termination::SingularityFailure => "singularity_failure",
        }
    }
}

/// The integrated profile on the grid `{0, ds, 2 ds, ...}`.
#[derive(Debug, Clone)]
pub struct ProfileResult {
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    pub dtheta: Vec<f64>,
    /// Largest grid parameter that is feasible and admissible.
    pub s_star: f64,
    pub termination: Termination,
    /// Grid indices whose slope came from the zero-inertia patch.
    pub patched: Vec<usize>,
}

impl ProfileResult {
    pub fn terminal_theta(&self) -> f64 {
        *self.theta.last().expect("profile has at least one point")
    }

    /// Theta at the grid point `s_star`. Every stored point is
    /// admissible, so `s_star` is always the last stored point.
    pub fn theta_at_s_star(&self) -> f64 {
        self.terminal_theta()
    }

    /// Slope at the grid point `s_star`.
    pub fn dtheta_at_s_star(&self) -> f64 {
        *self.dtheta.last().expect("profile has at least one point")
    }
}

/// What the integrator needs from a dynamical system at one parameter
/// value. Points are caller-allocated buffers so the inner loop stays
/// free of heap traffic.
pub trait ProfileDynamics {
    type Point;

    fn make_point(&self) -> Self::Point;
    fn eval_point(&self, s: f64, point: &mut Self::Point);
    /// Underactuated coefficients `(a_u, b_u, c_u)` at the point.
    fn coeffs(&self, point: &Self::Point) -> (f64, f64, f64);
    /// Membership test for the admissible-rate set at this point.
    fn admissible(&self, point: &Self::Point, theta: f64, dtheta: f64) -> bool;
}

/// Slope of the rate profile. Below the zero-inertia threshold the
/// slope is extrapolated from the previous resolved grid slopes;
/// `None` means no neighbours exist to patch from.
pub fn theta_slope(
    a_u: f64,
    b_u: f64,
    c_u: f64,
    theta: f64,
    neighbor_slopes: &[f64],
    eps_a: f64,
) -> Option<f64> {
    if a_u.abs() > eps_a {
        return Some(-(2.0 * b_u * theta + 2.0 * c_u) / a_u);
    }
    patch_slope(neighbor_slopes)
}

/// Backward extrapolation of the slope from the previous resolved
/// grid slopes, used across a zero-inertia point.
fn patch_slope(neighbor_slopes: &[f64]) -> Option<f64> {
    match neighbor_slopes {
        [] => None,
        [only] => Some(*only),
        [.., second_last, last] => Some(2.0 * last - second_last),
    }
}

const EPS_A_FLOOR: f64 = 1e-12;
const EPS_A_REL: f64 = 1e-6;

/// Zero-inertia threshold: relative to the median |a_u| seen so far in
/// this pass, floored at an absolute minimum. Borrows its value buffer
/// so repeated passes can reuse one allocation.
struct InertiaScale<'v> {
    abs_values: &'v mut Vec<f64>,
    max: f64,
}

impl<'v> InertiaScale<'v> {
    fn new(buffer: &'v mut Vec<f64>) -> Self {
        buffer.clear();
        InertiaScale {
            abs_values: buffer,
            max: 0.0,
        }
    }

    fn record(&mut self, a_u: f64) {
        let a = a_u.abs();
        self.abs_values.push(a);
        if a > self.max {
            self.max = a;
        }
    }

    fn is_singular(&self, a_u: f64) -> bool {
        let a = a_u.abs();
        // fast path: median <= max
        if a > EPS_A_REL * self.max {
            return a <= EPS_A_FLOOR;
        }
        let mut sorted = self.abs_values.clone();
        sorted.sort_by(|x, y| x.total_cmp(y));
        let median = if sorted.is_empty() {
            0.0
        } else {
            sorted[sorted.len() / 2]
        };
        a <= (EPS_A_REL * median).max(EPS_A_FLOOR)
    }
}

/// Terminal data of a forward pass, without the stored grid arrays.
/// The arithmetic is identical to [`integrate_profile`], so terminal
/// values agree bitwise between the two routes.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSummary {
    pub s_star: f64,
    /// Rate at `s_star`.
    pub theta_star: f64,
    /// Slope at `s_star`.
    pub dtheta_star: f64,
    pub termination: Termination,
    /// Number of accepted grid points.
    pub points: usize,
}

/// Reusable evaluation buffers for repeated forward passes, so a hot
/// loop (one steering call evaluates hundreds of candidates) pays the
/// allocation setup once.
pub struct ProfileScratch<P> {
    point: P,
    mid_point: P,
    end_point: P,
    scale_values: Vec<f64>,
}

impl<P> ProfileScratch<P> {
    pub fn new<D: ProfileDynamics<Point = P>>(dynamics: &D) -> Self {
        ProfileScratch {
            point: dynamics.make_point(),
            mid_point: dynamics.make_point(),
            end_point: dynamics.make_point(),
            scale_values: Vec::new(),
        }
    }
}

/// Integrates the rate profile forward over `[0, domain_end]` with a
/// classic fourth-order one-step scheme, tracking `s_star` in the same
/// pass.
pub fn integrate_profile<D: ProfileDynamics>(
    dynamics: &D,
    theta0: f64,
    ds: f64,
    domain_end: f64,
) -> Result<ProfileResult> {
    let mut store = ProfileStore::default();
    let mut scratch = ProfileScratch::new(dynamics);
    let summary = integrate_core(dynamics, theta0, ds, domain_end, Some(&mut store), &mut scratch)?;
    Ok(ProfileResult {
        s: store.s,
        theta: store.theta,
        dtheta: store.dtheta,
        s_star: summary.s_star,
        termination: summary.termination,
        patched: store.patched,
    })
}

/// Forward pass without storing the grid arrays; the steering loop
/// only needs the terminal values.
pub fn integrate_profile_summary<D: ProfileDynamics>(
    dynamics: &D,
    theta0: f64,
    ds: f64,
    domain_end: f64,
) -> Result<ProfileSummary> {
    let mut scratch = ProfileScratch::new(dynamics);
    integrate_core(dynamics, theta0, ds, domain_end, None, &mut scratch)
}

#[derive(Default)]
struct ProfileStore {
    s: Vec<f64>,
    theta: Vec<f64>,
    dtheta: Vec<f64>,
    patched: Vec<usize>,
}

fn integrate_core<D: ProfileDynamics>(
    dynamics: &D,
    theta0: f64,
    ds: f64,
    domain_end: f64,
    mut store: Option<&mut ProfileStore>,
    scratch: &mut ProfileScratch<D::Point>,
) -> Result<ProfileSummary> {
    if theta0 < 0.0 {
        return Err(Error::NegativeInitialRate(theta0));
    }
    if ds <= 0.0 {
        return Err(Error::InvalidStepSize(ds));
    }

    // Grid points at k * ds; if `domain_end` is off-grid (an edge
    // truncated at an interpolated zero crossing), one extra sample
    // sits at `domain_end` inside the last partial interval.
    let steps_f = domain_end / ds;
    let rounded = steps_f.round();
    let (n_full, partial) = if (steps_f - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        ((rounded as usize).max(1), false)
    } else {
        (steps_f.floor() as usize, true)
    };
    let n_steps = n_full + partial as usize;
    let mut scale = InertiaScale::new(&mut scratch.scale_values);

    let mut s_star = f64::NEG_INFINITY;
    let mut theta = theta0;
    let mut theta_star = theta0;
    let mut dtheta_star = 0.0;
    let mut points = 0usize;
    // two-slope window for the zero-inertia patch
    let mut prev_slope: Option<f64> = None;
    let mut prev_prev_slope: Option<f64> = None;
    // reusable evaluation buffers; `point` carries over from the
    // previous step's end-of-step evaluation
    let point = &mut scratch.point;
    let mid_point = &mut scratch.mid_point;
    let end_point = &mut scratch.end_point;
    dynamics.eval_point(0.0, point);
    // coefficients at `point`, carried over from the previous step's
    // end-of-step evaluation to avoid recomputing them
    let mut carried_coeffs: Option<(f64, f64, f64)> = None;

    let summary = |s_star: f64, theta_star, dtheta_star, termination, points| ProfileSummary {
        s_star: if s_star.is_finite() { s_star } else { 0.0 },
        theta_star,
        dtheta_star,
        termination,
        points,
    };

    for k in 0..=n_steps {
        let s_k = if k == n_steps {
            domain_end
        } else {
            k as f64 * ds
        };

        if theta < 0.0 {
            // The rate crossed zero inside the step from `s_star`.
            // Place the terminal sample at the linearly interpolated
            // crossing so a truncated edge ends at rest (theta = 0 to
            // rounding), which lets the planner restart from it with a
            // free tangent. Re-integrating the truncated edge
            // reproduces this sample via the partial-final-interval
            // rule below.
            if points > 0 && theta_star > 0.0 {
                let t = theta_star / (theta_star - theta);
                let s_zero = s_star + t * (s_k - s_star);
                // keep the crossing safely off-grid: re-integration
                // classifies the truncated domain as grid-aligned or
                // partial by its fractional part, so a crossing within
                // 1e-3 of a grid point falls back to grid truncation
                let interior = t.is_finite() && (1e-3..=1.0 - 1e-3).contains(&t);
                if interior && s_zero > s_star {
                    let theta_zero = (theta_star + t * (theta - theta_star)).max(0.0);
                    dynamics.eval_point(s_zero, end_point);
                    let (a_u, b_u, c_u) = dynamics.coeffs(end_point);
                    scale.record(a_u);
                    let singular = scale.is_singular(a_u);
                    let slope_opt = if singular {
                        patch_slope_window(prev_prev_slope, prev_slope)
                    } else {
                        Some(-(2.0 * b_u * theta_zero + 2.0 * c_u) / a_u)
                    };
                    if let Some(sl) = slope_opt.filter(|sl| sl.is_finite()) {
                        if dynamics.admissible(end_point, theta_zero, sl) {
                            if let Some(store) = store.as_deref_mut() {
                                store.s.push(s_zero);
                                store.theta.push(theta_zero);
                                store.dtheta.push(sl);
                                let idx = store.s.len() - 1;
                                if singular && store.patched.last() != Some(&idx) {
                                    store.patched.push(idx);
                                }
                            }
                            return Ok(summary(
                                s_zero,
                                theta_zero,
                                sl,
                                Termination::ZeroCrossing,
                                points + 1,
                            ));
                        }
                    }
                }
            }
            return Ok(summary(
                s_star,
                theta_star,
                dtheta_star,
                Termination::ZeroCrossing,
                points,
            ));
        }

        let (a_u, b_u, c_u) = match carried_coeffs.take() {
            Some(c) => c,
            None => {
                let c = dynamics.coeffs(point);
                scale.record(c.0);
                c
            }
        };
        let singular = scale.is_singular(a_u);
        let slope_opt = if singular {
            patch_slope_window(prev_prev_slope, prev_slope)
        } else {
            Some(-(2.0 * b_u * theta + 2.0 * c_u) / a_u)
        };
        let slope = match slope_opt {
            Some(sl) if sl.is_finite() => sl,
            _ => {
                return Ok(summary(
                    s_star,
                    theta_star,
                    dtheta_star,
                    Termination::SingularityFailure,
                    points,
                ));
            }
        };

        if !dynamics.admissible(point, theta, slope) {
            return Ok(summary(
                s_star,
                theta_star,
                dtheta_star,
                Termination::BoundViolation,
                points,
            ));
        }

        if let Some(store) = store.as_deref_mut() {
            store.s.push(s_k);
            store.theta.push(theta);
            store.dtheta.push(slope);
            if singular && store.patched.last() != Some(&k) {
                store.patched.push(k);
            }
        }
        s_star = s_k;
        theta_star = theta;
        dtheta_star = slope;
        points += 1;
        prev_prev_slope = prev_slope;
        prev_slope = Some(slope);

        if k == n_steps {
            break;
        }

        // one step of the fourth-order scheme; fall back to an Euler
        // step with the (possibly patched) base slope near a
        // zero-inertia point. When the next sample is the off-grid
        // domain end, take the full virtual step to the next grid
        // point and interpolate linearly — the same arithmetic that
        // placed the interpolated zero crossing in the first pass, so
        // both passes agree there to rounding error.
        let partial_final = partial && k + 1 == n_steps;
        let h = if partial_final {
            ds
        } else {
            (domain_end - s_k).min(ds)
        };
        dynamics.eval_point(s_k + 0.5 * h, mid_point);
        dynamics.eval_point(s_k + h, end_point);
        let (am, bm, cm) = dynamics.coeffs(mid_point);
        let (ae, be, ce) = dynamics.coeffs(end_point);
        scale.record(am);
        scale.record(ae);

        let next_theta = if singular || scale.is_singular(am) || scale.is_singular(ae) {
            if let Some(store) = store.as_deref_mut() {
                if store.patched.last() != Some(&(k + 1)) {
                    store.patched.push(k + 1);
                }
            }
            theta + h * slope
        } else {
            let f_mid = |t: f64| -(2.0 * bm * t + 2.0 * cm) / am;
            let f_end = |t: f64| -(2.0 * be * t + 2.0 * ce) / ae;
            let k1 = slope;
            let k2 = f_mid(theta + 0.5 * h * k1);
            let k3 = f_mid(theta + 0.5 * h * k2);
            let k4 = f_end(theta + h * k3);
            theta + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        };

        if partial_final {
            // When the virtual step crosses zero, the off-grid domain
            // end is (to rounding) the interpolated crossing that
            // truncated this path. Re-derive the interpolation weight
            // from the rate values, exactly as the crossing branch
            // computed it: near-singular profiles can swing by ~1e9
            // across one step, and recovering the weight from s
            // (absolute rounding ~1e-13) would be amplified by that
            // swing far beyond the junction tolerance.
            let t = if next_theta < 0.0 && theta > 0.0 {
                theta / (theta - next_theta)
            } else {
                (domain_end - s_k) / ds
            };
            theta = (theta + t * (next_theta - theta)).max(0.0);
            dynamics.eval_point(domain_end, point);
        } else {
            theta = next_theta;
            std::mem::swap(point, end_point);
            carried_coeffs = Some((ae, be, ce));
        }
    }

    Ok(summary(
        s_star,
        theta_star,
        dtheta_star,
        Termination::Completed,
        points,
    ))
}

fn patch_slope_window(prev_prev: Option<f64>, prev: Option<f64>) -> Option<f64> {
    match (prev_prev, prev) {
        (_, None) => None,
        (None, Some(only)) => Some(only),
        (Some(second_last), Some(last)) => Some(2.0 * last - second_last),
    }
}

/// Constant-coefficient source, for oracle tests and synthetic runs.
#[derive(Debug, Clone, Copy)]
pub struct ConstCoefficients {
    pub a_u: f64,
    pub b_u: f64,
    pub c_u: f64,
}

impl ProfileDynamics for ConstCoefficients {
    type Point = ();

    fn make_point(&self) {}

    fn eval_point(&self, _s: f64, _point: &mut ()) {}

    fn coeffs(&self, _point: &()) -> (f64, f64, f64) {
        (self.a_u, self.b_u, self.c_u)
    }

    fn admissible(&self, _point: &(), _theta: f64, _dtheta: f64) -> bool {
        true
    }
}

/// Coefficient source binding a system model to a geometric path.
pub struct PathDynamics<'a> {
    pub model: &'a dyn SystemModel,
    pub path: &'a PathSegment,
}

/// Evaluation buffers for one path point, including the fused
/// model-side data so coefficients and the admissibility test reuse
/// one evaluation.
pub struct PathPoint {
    pub q: DVector<f64>,
    pub dp: DVector<f64>,
    pub ddp: DVector<f64>,
    pub ode: PointOde,
}

impl ProfileDynamics for PathDynamics<'_> {
    type Point = PathPoint;

    fn make_point(&self) -> PathPoint {
        let n = self.path.dim();
        PathPoint {
            q: DVector::zeros(n),
            dp: DVector::zeros(n),
            ddp: DVector::zeros(n),
            ode: PointOde::default(),
        }
    }

    fn eval_point(&self, s: f64, point: &mut PathPoint) {
        self.path
            .eval_into(s, &mut point.q, &mut point.dp, &mut point.ddp);
        point.ode = self.model.point_ode(&point.q, &point.dp, &point.ddp);
    }

    fn coeffs(&self, point: &PathPoint) -> (f64, f64, f64) {
        (point.ode.a_u, point.ode.b_u, point.ode.c_u)
    }

    fn admissible(&self, point: &PathPoint, theta: f64, dtheta: f64) -> bool {
        point.ode.admissible(theta, dtheta)
    }
}

/// True iff `qd = sqrt(theta) P'` respects the velocity box and the
/// recovered actuator effort respects its boxes.
pub fn admissible_rates(
    model: &dyn SystemModel,
    q: &DVector<f64>,
    dp: &DVector<f64>,
    ddp: &DVector<f64>,
    theta: f64,
    dtheta: f64,
) -> bool {
    model.admissible_rates(q, dp, ddp, theta, dtheta)
}

/// Integrates the profile of `path` over its (possibly truncated)
/// domain under `model`'s dynamics and bounds.
pub fn integrate_path_profile(
    model: &dyn SystemModel,
    path: &PathSegment,
    theta0: f64,
    ds: f64,
) -> Result<ProfileResult> {
    let dynamics = PathDynamics { model, path };
    integrate_profile(&dynamics, theta0, ds, path.s_trunc())
}

/// Summary-only variant reusing caller-provided scratch buffers, for
/// loops that evaluate many candidate paths back to back.
pub fn integrate_path_profile_summary_with(
    model: &dyn SystemModel,
    path: &PathSegment,
    theta0: f64,
    ds: f64,
    scratch: &mut ProfileScratch<PathPoint>,
) -> Result<ProfileSummary> {
    let dynamics = PathDynamics { model, path };
    integrate_core(&dynamics, theta0, ds, path.s_trunc(), None, scratch)
}

/// Summary-only variant of [`integrate_path_profile`] for hot loops.
pub fn integrate_path_profile_summary(
    model: &dyn SystemModel,
    path: &PathSegment,
    theta0: f64,
    ds: f64,
) -> Result<ProfileSummary> {
    let dynamics = PathDynamics { model, path };
    integrate_profile_summary(&dynamics, theta0, ds, path.s_trunc())
}

/// A time-domain trajectory sampled on the profile grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub q: Vec<DVector<f64>>,
    pub qd: Vec<DVector<f64>>,
    pub tau: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        *self.t.last().unwrap_or(&0.0)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Linear interpolation of the generalised actuated force at `t`.
    pub fn tau_at(&self, t: f64) -> DVector<f64> {
        interp(&self.t, &self.tau, t)
    }

    pub fn q_at(&self, t: f64) -> DVector<f64> {
        interp(&self.t, &self.q, t)
    }
}

fn interp(ts: &[f64], values: &[DVector<f64>], t: f64) -> DVector<f64> {
    if t <= ts[0] {
        return values[0].clone();
    }
    if t >= *ts.last().unwrap() {
        return values.last().unwrap().clone();
    }
    let idx = match ts.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => return values[i].clone(),
        Err(i) => i,
    };
    let (t0, t1) = (ts[idx - 1], ts[idx]);
    let alpha = (t - t0) / (t1 - t0);
    &values[idx - 1] * (1.0 - alpha) + &values[idx] * alpha
}

/// Converts a completed profile into a time-domain trajectory.
///
/// Each grid interval contributes `dt = 2 ds / (sqrt(theta_i) +
/// sqrt(theta_{i+1}))`, the exact time of a piecewise-linear rate
/// profile. This stays regular when theta vanishes at a rest endpoint;
/// a zero at an interior point is a structural error (the integration
/// should have terminated there).
pub fn time_parameterize(
    model: &dyn SystemModel,
    path: &PathSegment,
    profile: &ProfileResult,
) -> Result<Trajectory> {
    if profile.termination != Termination::Completed {
        return Err(Error::IncompleteProfile(profile.termination.as_str()));
    }
    let n = profile.s.len();
    assert!(n >= 2, "profile must span at least one interval");
    for i in 1..n - 1 {
        if profile.theta[i] <= 0.0 {
            return Err(Error::InteriorZeroRate(profile.s[i]));
        }
    }

    let mut t = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    let mut qd = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);

    let mut clock = 0.0;
    for i in 0..n {
        if i > 0 {
            let ds = profile.s[i] - profile.s[i - 1];
            let denom = profile.theta[i - 1].max(0.0).sqrt() + profile.theta[i].max(0.0).sqrt();
            if denom <= 0.0 {
                return Err(Error::InteriorZeroRate(profile.s[i]));
            }
            clock += 2.0 * ds / denom;
        }
        t.push(clock);
        let (p, dp, ddp) = path.eval_unchecked(profile.s[i]);
        let theta = profile.theta[i].max(0.0);
        let coeffs = pp_coefficients(model, &p, &dp, &ddp)?;
        let rec = recover_inputs(model, &coeffs, &p, theta, profile.dtheta[i]);
        qd.push(&dp * theta.sqrt());
        q.push(p);
        tau.push(rec.tau);
    }

    Ok(Trajectory { t, q, qd, tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SyntheticUa1;
    use crate::geometry::{make_cubic, truncate};
    use approx::assert_abs_diff_eq;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    fn straight_path() -> PathSegment {
        make_cubic(&dv(&[0.0, 0.0]), &dv(&[1.0, 0.0]), &dv(&[1.0, 0.0]), &dv(&[1.0, 0.0]))
    }

    #[test]
    fn zero_forcing_keeps_theta_constant() {
        let src = ConstCoefficients { a_u: 1.0, b_u: 0.0, c_u: 0.0 };
        let result = integrate_profile(&src, 2.5, 1e-3, 1.0).unwrap();
        assert_eq!(result.termination, Termination::Completed);
        assert_abs_diff_eq!(result.s_star, 1.0, epsilon = 1e-12);
        for &th in &result.theta {
            assert_abs_diff_eq!(th, 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_coefficients_match_closed_form() {
        // theta' = -2 theta + 2, theta(0) = 0  =>  theta(s) = 1 - e^(-2s)
        let src = ConstCoefficients { a_u: 1.0, b_u: 1.0, c_u: -1.0 };
        let result = integrate_profile(&src, 0.0, 1e-3, 1.0).unwrap();
        assert_eq!(result.termination, Termination::Completed);
        let mut max_err: f64 = 0.0;
        for (s, th) in result.s.iter().zip(&result.theta) {
            let exact = 1.0 - (-2.0 * s).exp();
            max_err = max_err.max((th - exact).abs());
        }
        assert!(max_err <= 1e-8, "max error {max_err}");
        assert_abs_diff_eq!(result.terminal_theta(), 1.0 - (-2.0f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn linear_decay_zero_crossing() {
        // theta' = -2, theta(0) = 1  =>  theta(s) = 1 - 2s, root at 0.5
        let src = ConstCoefficients { a_u: 1.0, b_u: 0.0, c_u: 1.0 };
        let ds = 1e-3;
        let result = integrate_profile(&src, 1.0, ds, 1.0).unwrap();
        assert_eq!(result.termination, Termination::ZeroCrossing);
        assert!(result.s_star >= 0.5 - 2.0 * ds && result.s_star <= 0.5 + 1e-12);
    }

    #[test]
    fn interpolated_zero_crossing_reintegrates_consistently() {
        // A zero-crossing edge ends at an off-grid interpolated rest
        // point; truncating there and re-integrating must classify the
        // edge as completed and reproduce the stored terminal rate.
        use crate::dynamics::Acrobot;
        use crate::geometry::{generate_path, PathStart, TangentSampling};
        use rand::{Rng, SeedableRng};
        let model = Acrobot::default_params();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let q0 = dv(&[0.4, -0.2]);
        let tangent = dv(&[0.0, 0.0]);
        let mut off_grid = 0usize;
        for _ in 0..400 {
            let target = dv(&[rng.gen_range(-2.0..2.0), rng.gen_range(-1.5..1.5)]);
            let start = PathStart {
                q: &q0,
                tangent: &tangent,
                theta: 0.0,
            };
            let path = generate_path(&start, &target, TangentSampling { kappa: 3.0 }, &mut rng);
            let summary = integrate_path_profile_summary(&model, &path, 0.0, 1e-3).unwrap();
            if summary.termination != Termination::ZeroCrossing || summary.s_star <= 0.0 {
                continue;
            }
            let frac = (summary.s_star / 1e-3).fract();
            if frac.min(1.0 - frac) > 1e-6 {
                off_grid += 1;
                assert!(summary.theta_star <= 1e-12, "rest rate, got {}", summary.theta_star);
            }
            let truncated = truncate(&path, summary.s_star).unwrap();
            let full = integrate_path_profile(&model, &truncated, 0.0, 1e-3).unwrap();
            assert_eq!(full.termination, Termination::Completed);
            assert!(
                (full.terminal_theta() - summary.theta_star).abs() <= 1e-9,
                "stored {} recomputed {}",
                summary.theta_star,
                full.terminal_theta()
            );
            assert!((full.s_star - summary.s_star).abs() <= 1e-12);
        }
        assert!(off_grid > 50, "only {off_grid} interpolated crossings sampled");
    }

    /// Exponential rate growth for `s < 0.3`, then a huge constant
    /// deceleration forcing a zero crossing with a per-step swing of
    /// ~4e9. Exercises the interpolated-crossing reconstruction when
    /// the crossing weight cannot be recovered from `s` at the needed
    /// precision.
    struct RateBlowup;

    impl ProfileDynamics for RateBlowup {
        type Point = f64;

        fn make_point(&self) -> f64 {
            0.0
        }

        fn eval_point(&self, s: f64, point: &mut f64) {
            *point = s;
        }

        fn coeffs(&self, point: &f64) -> (f64, f64, f64) {
            if *point < 0.3 {
                (1.0, -30.0, -1.0)
            } else {
                (1.0, 0.0, 2e12)
            }
        }

        fn admissible(&self, _point: &f64, _theta: f64, _dtheta: f64) -> bool {
            true
        }
    }

    #[test]
    fn off_grid_crossing_after_rate_blowup_reintegrates_exactly() {
        let dynamics = RateBlowup;
        let full = integrate_profile(&dynamics, 1.0, 1e-3, 1.0).unwrap();
        assert_eq!(full.termination, Termination::ZeroCrossing);
        let frac = (full.s_star / 1e-3).fract();
        assert!(
            frac > 1e-3 && frac < 1.0 - 1e-3,
            "crossing should land off-grid, frac = {frac}"
        );
        let n = full.s.len();
        assert!(
            full.theta[n - 2] > 1e6,
            "rate should blow up before the crossing, got {}",
            full.theta[n - 2]
        );
        // the interpolation rounds at ~eps * theta_star, so the
        // terminal rate is near zero but not rest-threshold small here
        assert!(full.terminal_theta() <= 1e-6);

        let again = integrate_profile(&dynamics, 1.0, 1e-3, full.s_star).unwrap();
        assert_eq!(again.termination, Termination::Completed);
        assert!(
            (again.terminal_theta() - full.terminal_theta()).abs() <= 1e-9,
            "stored {} recomputed {}",
            full.terminal_theta(),
            again.terminal_theta()
        );
    }

    #[test]
    fn synthetic_model_reproduces_const_coefficients() {
        let model = SyntheticUa1::new(1.0, 1.0, -1.0);
        let path = straight_path();
        let result = integrate_path_profile(&model, &path, 0.0, 1e-3).unwrap();
        assert_eq!(result.termination, Termination::Completed);
        assert_abs_diff_eq!(result.terminal_theta(), 1.0 - (-2.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn invalid_arguments_rejected() {
        let src = ConstCoefficients { a_u: 1.0, b_u: 0.0, c_u: 0.0 };
        assert!(integrate_profile(&src, -0.5, 1e-3, 1.0).is_err());
        assert!(integrate_profile(&src, 1.0, 0.0, 1.0).is_err());
        assert!(integrate_profile(&src, 1.0, -1e-3, 1.0).is_err());
    }

    #[test]
    fn theta_slope_direct_and_patched() {
        assert_abs_diff_eq!(
            theta_slope(2.0, 0.0, -1.0, 7.0, &[], 1e-12).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            theta_slope(1.0, 1.0, 0.0, 3.0, &[], 1e-12).unwrap(),
            -6.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            theta_slope(1e-13, 0.0, 1.0, 0.0, &[1.0, 1.0], 1e-12).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(theta_slope(1e-13, 0.0, 1.0, 0.0, &[], 1e-12).is_none());
    }

    #[test]
    fn singularity_at_start_fails() {
        let src = ConstCoefficients { a_u: 0.0, b_u: 0.0, c_u: 1.0 };
        let result = integrate_profile(&src, 1.0, 1e-3, 1.0).unwrap();
        assert_eq!(result.termination, Termination::SingularityFailure);
    }

    #[test]
    fn constant_rate_time() {
        let model = SyntheticUa1::new(1.0, 0.0, 0.0);
        let path = straight_path();
        let profile = integrate_path_profile(&model, &path, 4.0, 1e-3).unwrap();
        let traj = time_parameterize(&model, &path, &profile).unwrap();
        assert_abs_diff_eq!(traj.duration(), 0.5, epsilon = 1e-12);

        let profile1 = integrate_path_profile(&model, &path, 1.0, 1e-3).unwrap();
        let traj1 = time_parameterize(&model, &path, &profile1).unwrap();
        for (t, s) in traj1.t.iter().zip(&profile1.s) {
            assert_abs_diff_eq!(t, s, epsilon = 1e-12);
        }
    }

    #[test]
    fn truncated_linear_decay_time() {
        // T = integral_0^0.45 (1 - 2s)^(-1/2) ds = 1 - sqrt(0.1)
        let model = SyntheticUa1::new(1.0, 0.0, 1.0);
        let path = truncate(&straight_path(), 0.45).unwrap();
        let profile = integrate_path_profile(&model, &path, 1.0, 1e-3).unwrap();
        assert_eq!(profile.termination, Termination::Completed);
        let traj = time_parameterize(&model, &path, &profile).unwrap();
        assert_abs_diff_eq!(traj.duration(), 1.0 - 0.1f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn interior_zero_is_an_error() {
        let model = SyntheticUa1::new(1.0, 0.0, 0.0);
        let path = straight_path();
        let mut profile = integrate_path_profile(&model, &path, 1.0, 1e-3).unwrap();
        profile.theta[500] = 0.0;
        assert!(matches!(
            time_parameterize(&model, &path, &profile),
            Err(Error::InteriorZeroRate(_))
        ));
    }

    #[test]
    fn halving_the_step_improves_the_oracle_error() {
        let src = ConstCoefficients { a_u: 1.0, b_u: 1.0, c_u: -1.0 };
        let err = |ds: f64| {
            let result = integrate_profile(&src, 0.0, ds, 1.0).unwrap();
            result
                .s
                .iter()
                .zip(&result.theta)
                .map(|(s, th)| (th - (1.0 - (-2.0 * s).exp())).abs())
                .fold(0.0f64, f64::max)
        };
        // measured where truncation error still dominates roundoff
        let e1 = err(1e-2);
        let e2 = err(5e-3);
        assert!(e1 / e2 >= 8.0, "ratio {} too small", e1 / e2);
    }

    #[test]
    fn velocity_bound_boundary() {
        use crate::dynamics::PlanarUav;
        let model = PlanarUav::default_params();
        let q = dv(&[0.0, 0.0, 0.0]);
        let dp = dv(&[1.0, 0.0, 0.0]);
        let ddp = dv(&[0.0, 0.0, 0.0]);
        // |qd_y| <= 20  =>  theta = 400 on the boundary, 401 outside
        assert!(admissible_rates(&model, &q, &dp, &ddp, 400.0, 0.0));
        assert!(!admissible_rates(&model, &q, &dp, &ddp, 401.0, 0.0));
    }

    #[test]
    fn torque_bound_enforced() {
        use crate::dynamics::Acrobot;
        let model = Acrobot::default_params();
        let q = dv(&[0.3, 0.2]);
        let dp = dv(&[0.0, 1.0]);
        let ddp = dv(&[0.0, 0.0]);
        // scale dtheta until the recovered elbow torque exceeds 50 Nm
        let coeffs = crate::dynamics::pp_coefficients(&model, &q, &dp, &ddp).unwrap();
        let needed = (50.5 - coeffs.c_a[0]) / (0.5 * coeffs.a_a[0]);
        assert!(!admissible_rates(&model, &q, &dp, &ddp, 0.0, needed));
        let fine = (49.5 - coeffs.c_a[0]) / (0.5 * coeffs.a_a[0]);
        assert!(admissible_rates(&model, &q, &dp, &ddp, 0.0, fine));
    }

    #[test]
    fn rest_admissibility_with_gravity_compensation() {
        use crate::dynamics::Acrobot;
        let model = Acrobot::default_params();
        let q = dv(&[0.4, -0.6]);
        let dp = dv(&[1.0, 0.0]);
        let ddp = dv(&[0.0, 0.0]);
        assert!(admissible_rates(&model, &q, &dp, &ddp, 0.0, 0.0));
    }
}
