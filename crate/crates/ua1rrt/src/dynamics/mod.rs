//! UA1 system models and path-parameterised coefficient computations.
//!
//! An underactuated degree-one (UA1) system has `n` configuration
//! coordinates and `n - 1` independent actuators.  Projecting the
//! manipulator equation onto the annihilator `w(q)` of the input map
//! `B(q)` yields the single scalar constraint that drives the path
//! timing, while the remaining `n - 1` rows recover the actuator
//! effort along a path.

mod acrobot;
mod synthetic;
mod uav;

pub use acrobot::{Acrobot, AcrobotParams};
pub use synthetic::{SyntheticParams, SyntheticUa1};
pub use uav::{PlanarUav, UavParams};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-coordinate kind, driving unwrapping and goal metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateKind {
    Prismatic,
    Revolute,
}

/// Velocity and actuation boxes. `None` means unconstrained.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub qd_lower: DVector<f64>,
    pub qd_upper: DVector<f64>,
    /// Box on the generalised actuated forces (the `n - 1` projected rows).
    pub tau_lower: Option<DVector<f64>>,
    pub tau_upper: Option<DVector<f64>>,
    /// Box on the physical actuator inputs `u`.
    pub u_lower: Option<DVector<f64>>,
    pub u_upper: Option<DVector<f64>>,
}

impl Bounds {
    pub fn unbounded(n: usize) -> Self {
        Bounds {
            qd_lower: DVector::from_element(n, f64::NEG_INFINITY),
            qd_upper: DVector::from_element(n, f64::INFINITY),
            tau_lower: None,
            tau_upper: None,
            u_lower: None,
            u_upper: None,
        }
    }
}

/// Per-coordinate normalisation scales used by the planner metrics.
#[derive(Debug, Clone)]
pub struct Scales {
    pub q_max: DVector<f64>,
    pub qd_max: DVector<f64>,
}

/// One affine input/force constraint `lo <= a sdd + b theta + c <= hi`
/// with `sdd = dtheta / 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AffineRow {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Maximum constraint rows a [`PointOde`] can carry. Kept small so
/// the struct stays cheap to copy in the integrator's inner loop;
/// enough for either an actuated-force box or an input box on systems
/// with up to 2 inputs (raise if a model ever needs both at once).
pub const MAX_ODE_ROWS: usize = 2;

/// Everything the profile integrator needs at one path point, from a
/// single evaluation: the underactuated ODE coefficients and the
/// admissible-rate set in closed form. Along a fixed path the actuated
/// effort is affine in `(theta' / 2, theta)` and the velocity box caps
/// `theta` directly, so admissibility reduces to interval tests.
#[derive(Debug, Clone, Copy)]
pub struct PointOde {
    pub a_u: f64,
    pub b_u: f64,
    pub c_u: f64,
    /// Largest `theta` satisfying the velocity box at this point.
    pub theta_vmax: f64,
    pub n_rows: usize,
    pub rows: [AffineRow; MAX_ODE_ROWS],
}

impl Default for PointOde {
    fn default() -> Self {
        PointOde {
            a_u: 0.0,
            b_u: 0.0,
            c_u: 0.0,
            theta_vmax: f64::INFINITY,
            n_rows: 0,
            rows: [AffineRow::default(); MAX_ODE_ROWS],
        }
    }
}

impl PointOde {
    /// Membership test for the admissible-rate set.
    #[inline]
    pub fn admissible(&self, theta: f64, dtheta: f64) -> bool {
        if theta > self.theta_vmax {
            return false;
        }
        let sdd = 0.5 * dtheta;
        for r in &self.rows[..self.n_rows] {
            let u = r.a * sdd + r.b * theta + r.c;
            if !(r.lo..=r.hi).contains(&u) {
                return false;
            }
        }
        true
    }
}

/// A UA1 mechanical system.
///
/// `annihilator` must return a unit row `w(q)` with `w(q)^T B(q) = 0`,
/// and `actuated_basis` an `(n-1) x n` matrix whose rows complete `w`
/// to a basis of generalised force space.
pub trait SystemModel: Sync + Send {
    fn dof(&self) -> usize;
    fn num_inputs(&self) -> usize;
    fn coordinate_kinds(&self) -> &[CoordinateKind];

    fn mass_matrix(&self, q: &DVector<f64>) -> DMatrix<f64>;
    fn coriolis_matrix(&self, q: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64>;
    fn gravity_vector(&self, q: &DVector<f64>) -> DVector<f64>;
    fn input_map(&self, q: &DVector<f64>) -> DMatrix<f64>;
    fn annihilator(&self, q: &DVector<f64>) -> DVector<f64>;
    fn actuated_basis(&self, q: &DVector<f64>) -> DMatrix<f64>;

    /// Maps the generalised actuated force `tau` back to actuator
    /// inputs `u`. Returns `None` when no physically realisable input
    /// exists (e.g. a thrust split outside the thruster range); the
    /// caller treats this as a bound violation, not a fatal error.
    fn input_recovery(&self, q: &DVector<f64>, tau: &DVector<f64>) -> Option<DVector<f64>>;

    fn bounds(&self) -> &Bounds;
    fn scales(&self) -> &Scales;

    /// Underactuated row `(a_u, b_u, c_u)` of the path-parameterised
    /// dynamics at a path point. The default goes through the full
    /// matrix route; models override it with a closed form since this
    /// sits in the integrator's innermost loop.
    fn rate_ode_coefficients(
        &self,
        q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
    ) -> (f64, f64, f64) {
        let c = pp_coefficients(self, q, dp, ddp).expect("finite path point");
        (c.a_u, c.b_u, c.c_u)
    }

    /// Membership test for the admissible-rate set at a path point:
    /// the velocity `sqrt(theta) P'` must respect the velocity box and
    /// the recovered actuator effort its force/input boxes. Also a hot
    /// path; models override it with a closed form.
    fn admissible_rates(
        &self,
        q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
        theta: f64,
        dtheta: f64,
    ) -> bool {
        debug_assert!(theta >= 0.0);
        let bounds = self.bounds();
        let rate = theta.sqrt();
        for i in 0..dp.len() {
            let qd = rate * dp[i];
            if qd < bounds.qd_lower[i] || qd > bounds.qd_upper[i] {
                return false;
            }
        }
        let coeffs = match pp_coefficients(self, q, dp, ddp) {
            Ok(c) => c,
            Err(_) => return false,
        };
        let rec = recover_inputs(self, &coeffs, q, theta, dtheta);
        if let (Some(lo), Some(hi)) = (&bounds.tau_lower, &bounds.tau_upper) {
            for i in 0..rec.tau.len() {
                if rec.tau[i] < lo[i] || rec.tau[i] > hi[i] {
                    return false;
                }
            }
        }
        if bounds.u_lower.is_some() || bounds.u_upper.is_some() {
            let u = match rec.u {
                Some(u) => u,
                None => return false,
            };
            if let Some(lo) = &bounds.u_lower {
                for i in 0..u.len() {
                    if u[i] < lo[i] {
                        return false;
                    }
                }
            }
            if let Some(hi) = &bounds.u_upper {
                for i in 0..u.len() {
                    if u[i] > hi[i] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Fused per-point evaluation for the integrator's inner loop:
    /// ODE coefficients and the closed-form admissible set in one
    /// pass, sharing the trigonometric evaluations. Models override
    /// this with closed forms; the default derives the affine input
    /// rows from the matrix route, using that `input_recovery` is
    /// linear in `tau` at fixed `q` for a mechanical system.
    fn point_ode(&self, q: &DVector<f64>, dp: &DVector<f64>, ddp: &DVector<f64>) -> PointOde {
        let coeffs = pp_coefficients(self, q, dp, ddp).expect("finite path point");
        let bounds = self.bounds();

        let mut theta_vmax = f64::INFINITY;
        for i in 0..dp.len() {
            let d = dp[i];
            if d != 0.0 {
                let cap = if d > 0.0 {
                    bounds.qd_upper[i] / d
                } else {
                    bounds.qd_lower[i] / d
                };
                theta_vmax = theta_vmax.min(if cap > 0.0 { cap * cap } else { 0.0 });
            }
        }

        let mut rows = [AffineRow::default(); MAX_ODE_ROWS];
        let mut n_rows = 0usize;
        if let (Some(lo), Some(hi)) = (&bounds.tau_lower, &bounds.tau_upper) {
            for i in 0..coeffs.a_a.len() {
                rows[n_rows] = AffineRow {
                    a: coeffs.a_a[i],
                    b: coeffs.b_a[i],
                    c: coeffs.c_a[i],
                    lo: lo[i],
                    hi: hi[i],
                };
                n_rows += 1;
            }
        }
        if bounds.u_lower.is_some() || bounds.u_upper.is_some() {
            // u(sdd, theta) = R a_a sdd + R b_a theta + R c_a with R
            // the (linear) recovery map; a failed recovery marks the
            // point inadmissible for every rate
            let m = self.num_inputs();
            let recovered = (
                self.input_recovery(q, &coeffs.a_a),
                self.input_recovery(q, &coeffs.b_a),
                self.input_recovery(q, &coeffs.c_a),
            );
            let lo = bounds.u_lower.clone().unwrap_or_else(|| {
                DVector::from_element(m, f64::NEG_INFINITY)
            });
            let hi = bounds
                .u_upper
                .clone()
                .unwrap_or_else(|| DVector::from_element(m, f64::INFINITY));
            match recovered {
                (Some(ua), Some(ub), Some(uc)) => {
                    for i in 0..m {
                        rows[n_rows] = AffineRow {
                            a: ua[i],
                            b: ub[i],
                            c: uc[i],
                            lo: lo[i],
                            hi: hi[i],
                        };
                        n_rows += 1;
                    }
                }
                _ => {
                    rows[n_rows] = AffineRow {
                        a: 0.0,
                        b: 0.0,
                        c: f64::NAN,
                        lo: 0.0,
                        hi: 0.0,
                    };
                    n_rows += 1;
                }
            }
        }

        PointOde {
            a_u: coeffs.a_u,
            b_u: coeffs.b_u,
            c_u: coeffs.c_u,
            theta_vmax,
            n_rows,
            rows,
        }
    }
}

/// Coefficient vectors of the path-parameterised dynamics at one path
/// point, together with their annihilator/actuated split.
#[derive(Debug, Clone)]
pub struct PPCoefficients {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub a_u: f64,
    pub b_u: f64,
    pub c_u: f64,
    pub a_a: DVector<f64>,
    pub b_a: DVector<f64>,
    pub c_a: DVector<f64>,
}

/// Result of mapping a path-rate pair back to actuator effort.
#[derive(Debug, Clone)]
pub struct InputRecovery {
    /// Generalised actuated force (the `n - 1` projected rows).
    pub tau: DVector<f64>,
    /// Physical actuator inputs, `None` when recovery is infeasible.
    pub u: Option<DVector<f64>>,
}

fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Evaluates the manipulator-equation terms and the annihilator at `(q, v)`.
pub fn evaluate_terms<M: SystemModel + ?Sized>(
    model: &M,
    q: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>, DVector<f64>)> {
    if !all_finite(q) || !all_finite(v) {
        return Err(Error::InvalidConfiguration);
    }
    Ok((
        model.mass_matrix(q),
        model.coriolis_matrix(q, v),
        model.gravity_vector(q),
        model.annihilator(q),
    ))
}

/// Computes the affine coefficient vectors of the dynamics along a
/// path point `(P, P', P'')` and their annihilator/actuated split:
/// `a = M P'`, `b = M P'' + C(P, P') P'`, `c = G`.
pub fn pp_coefficients<M: SystemModel + ?Sized>(
    model: &M,
    q: &DVector<f64>,
    dp: &DVector<f64>,
    ddp: &DVector<f64>,
) -> Result<PPCoefficients> {
    if !all_finite(q) || !all_finite(dp) || !all_finite(ddp) {
        return Err(Error::InvalidConfiguration);
    }
    let m = model.mass_matrix(q);
    let c_mat = model.coriolis_matrix(q, dp);
    let a = &m * dp;
    let b = &m * ddp + &c_mat * dp;
    let c = model.gravity_vector(q);
    let w = model.annihilator(q);
    let basis = model.actuated_basis(q);
    Ok(PPCoefficients {
        a_u: w.dot(&a),
        b_u: w.dot(&b),
        c_u: w.dot(&c),
        a_a: &basis * &a,
        b_a: &basis * &b,
        c_a: &basis * &c,
        a,
        b,
        c,
    })
}

/// Recovers the generalised actuated force and actuator inputs for a
/// path-rate pair `(theta, theta')`, using `sdd = theta' / 2`.
pub fn recover_inputs<M: SystemModel + ?Sized>(
    model: &M,
    coeffs: &PPCoefficients,
    q: &DVector<f64>,
    theta: f64,
    dtheta: f64,
) -> InputRecovery {
    debug_assert!(theta >= 0.0);
    let sdd = 0.5 * dtheta;
    let tau = &coeffs.a_a * sdd + &coeffs.b_a * theta + &coeffs.c_a;
    let u = model.input_recovery(q, &tau);
    InputRecovery { tau, u }
}
