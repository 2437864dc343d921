use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Bounds, CoordinateKind, Scales, SystemModel};

/// Planar birotor UAV in inertial coordinates `q = (y, z, phi)`.
///
/// Both thrusters push along the body vertical, which makes the body
/// lateral axis the single passive direction: no input produces
/// acceleration along `(cos phi, sin phi)` in the `(y, z)` plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UavParams {
    pub mass: f64,
    pub inertia: f64,
    /// Thruster arm length from the centre of mass.
    pub arm: f64,
    pub gravity: f64,
    /// Per-thruster force range is `[0, thrust_limit]` (uni-directional).
    pub thrust_limit: f64,
    pub translational_velocity_limit: f64,
    pub rotational_velocity_limit: f64,
}

impl Default for UavParams {
    fn default() -> Self {
        UavParams {
            mass: 0.1,
            inertia: 1e-4,
            arm: 0.1,
            gravity: 9.81,
            thrust_limit: 1.0,
            translational_velocity_limit: 20.0,
            rotational_velocity_limit: 50.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanarUav {
    params: UavParams,
    kinds: [CoordinateKind; 3],
    bounds: Bounds,
    scales: Scales,
}

impl PlanarUav {
    pub fn new(params: UavParams) -> Self {
        let vt = params.translational_velocity_limit;
        let vr = params.rotational_velocity_limit;
        let bounds = Bounds {
            qd_lower: DVector::from_row_slice(&[-vt, -vt, -vr]),
            qd_upper: DVector::from_row_slice(&[vt, vt, vr]),
            tau_lower: None,
            tau_upper: None,
            u_lower: Some(DVector::from_element(2, 0.0)),
            u_upper: Some(DVector::from_element(2, params.thrust_limit)),
        };
        let scales = Scales {
            q_max: DVector::from_row_slice(&[4.0, 1.0, std::f64::consts::PI]),
            qd_max: DVector::from_row_slice(&[vt, vt, vr]),
        };
        PlanarUav {
            params,
            kinds: [
                CoordinateKind::Prismatic,
                CoordinateKind::Prismatic,
                CoordinateKind::Revolute,
            ],
            bounds,
            scales,
        }
    }

    pub fn default_params() -> Self {
        PlanarUav::new(UavParams::default())
    }

    pub fn params(&self) -> &UavParams {
        &self.params
    }
}

impl SystemModel for PlanarUav {
    fn dof(&self) -> usize {
        3
    }

    fn num_inputs(&self) -> usize {
        2
    }

    fn coordinate_kinds(&self) -> &[CoordinateKind] {
        &self.kinds
    }

    fn mass_matrix(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(&[
            self.params.mass,
            self.params.mass,
            self.params.inertia,
        ]))
    }

    fn coriolis_matrix(&self, _q: &DVector<f64>, _v: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(3, 3)
    }

    fn gravity_vector(&self, _q: &DVector<f64>) -> DVector<f64> {
        DVector::from_row_slice(&[0.0, self.params.mass * self.params.gravity, 0.0])
    }

    fn input_map(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let (s, c) = q[2].sin_cos();
        let l = self.params.arm;
        DMatrix::from_row_slice(3, 2, &[-s, -s, c, c, -l, l])
    }

    fn annihilator(&self, q: &DVector<f64>) -> DVector<f64> {
        let (s, c) = q[2].sin_cos();
        DVector::from_row_slice(&[c, s, 0.0])
    }

    fn actuated_basis(&self, q: &DVector<f64>) -> DMatrix<f64> {
        // Rows project onto net thrust F and body torque tau_phi.
        let (s, c) = q[2].sin_cos();
        DMatrix::from_row_slice(2, 3, &[-s, c, 0.0, 0.0, 0.0, 1.0])
    }

    fn input_recovery(&self, _q: &DVector<f64>, tau: &DVector<f64>) -> Option<DVector<f64>> {
        let l = self.params.arm;
        let u0 = 0.5 * tau[0] - tau[1] / (2.0 * l);
        let u1 = 0.5 * tau[0] + tau[1] / (2.0 * l);
        Some(DVector::from_row_slice(&[u0, u1]))
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn scales(&self) -> &Scales {
        &self.scales
    }

    // closed forms for the integrator's inner loop

    fn rate_ode_coefficients(
        &self,
        q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
    ) -> (f64, f64, f64) {
        let p = &self.params;
        let (s, c) = q[2].sin_cos();
        let a_u = p.mass * (c * dp[0] + s * dp[1]);
        let b_u = p.mass * (c * ddp[0] + s * ddp[1]);
        let c_u = s * p.mass * p.gravity;
        (a_u, b_u, c_u)
    }

    fn admissible_rates(
        &self,
        q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
        theta: f64,
        dtheta: f64,
    ) -> bool {
        let p = &self.params;
        let rate = theta.max(0.0).sqrt();
        if rate * dp[0].abs() > p.translational_velocity_limit
            || rate * dp[1].abs() > p.translational_velocity_limit
            || rate * dp[2].abs() > p.rotational_velocity_limit
        {
            return false;
        }
        let (s, c) = q[2].sin_cos();
        let sdd = 0.5 * dtheta;
        // net thrust and body torque rows
        let f = p.mass * ((-s * dp[0] + c * dp[1]) * sdd + (-s * ddp[0] + c * ddp[1]) * theta)
            + c * p.mass * p.gravity;
        let t = p.inertia * (dp[2] * sdd + ddp[2] * theta);
        let u0 = 0.5 * f - t / (2.0 * p.arm);
        let u1 = 0.5 * f + t / (2.0 * p.arm);
        (0.0..=p.thrust_limit).contains(&u0) && (0.0..=p.thrust_limit).contains(&u1)
    }

    fn point_ode(
        &self,
        q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
    ) -> super::PointOde {
        let p = &self.params;
        let (s, c) = q[2].sin_cos();

        // body-lateral (passive) row
        let a_u = p.mass * (c * dp[0] + s * dp[1]);
        let b_u = p.mass * (c * ddp[0] + s * ddp[1]);
        let c_u = s * p.mass * p.gravity;

        // net thrust F and body torque T, affine in (sdd, theta)
        let fa = p.mass * (-s * dp[0] + c * dp[1]);
        let fb = p.mass * (-s * ddp[0] + c * ddp[1]);
        let fc = c * p.mass * p.gravity;
        let ta = p.inertia * dp[2];
        let tb = p.inertia * ddp[2];
        let inv2l = 1.0 / (2.0 * p.arm);

        let mut theta_vmax = f64::INFINITY;
        let caps = [
            (dp[0], p.translational_velocity_limit),
            (dp[1], p.translational_velocity_limit),
            (dp[2], p.rotational_velocity_limit),
        ];
        for &(d, v) in &caps {
            if d != 0.0 {
                let cap = v / d.abs();
                theta_vmax = theta_vmax.min(cap * cap);
            }
        }

        let mut out = super::PointOde {
            a_u,
            b_u,
            c_u,
            theta_vmax,
            n_rows: 2,
            ..super::PointOde::default()
        };
        out.rows[0] = super::AffineRow {
            a: 0.5 * fa - ta * inv2l,
            b: 0.5 * fb - tb * inv2l,
            c: 0.5 * fc,
            lo: 0.0,
            hi: p.thrust_limit,
        };
        out.rows[1] = super::AffineRow {
            a: 0.5 * fa + ta * inv2l,
            b: 0.5 * fb + tb * inv2l,
            c: 0.5 * fc,
            lo: 0.0,
            hi: p.thrust_limit,
        };
        out
    }
}
