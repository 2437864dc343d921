use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Bounds, CoordinateKind, Scales, SystemModel};

/// Two-link acrobot with a passive shoulder and an actuated elbow.
///
/// Point masses at the link ends, links of length `l1`, `l2`. Joint
/// angles are measured from the downward vertical, so `q = 0` is the
/// hanging equilibrium and `q1 = pi` is upright.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcrobotParams {
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub gravity: f64,
    pub torque_limit: f64,
    pub velocity_limit: f64,
}

impl Default for AcrobotParams {
    fn default() -> Self {
        AcrobotParams {
            m1: 1.0,
            m2: 1.0,
            l1: 1.0,
            l2: 1.0,
            gravity: 9.81,
            torque_limit: 50.0,
            velocity_limit: 50.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Acrobot {
    params: AcrobotParams,
    kinds: [CoordinateKind; 2],
    bounds: Bounds,
    scales: Scales,
}

impl Acrobot {
    pub fn new(params: AcrobotParams) -> Self {
        let v = params.velocity_limit;
        let bounds = Bounds {
            qd_lower: DVector::from_row_slice(&[-v, -v]),
            qd_upper: DVector::from_row_slice(&[v, v]),
            tau_lower: None,
            tau_upper: None,
            u_lower: Some(DVector::from_element(1, -params.torque_limit)),
            u_upper: Some(DVector::from_element(1, params.torque_limit)),
        };
        // both joints are revolute; weighting them equally keeps the
        // nearest-neighbour pull along the (unbounded) shoulder axis
        // as strong as along the elbow
        let scales = Scales {
            q_max: DVector::from_row_slice(&[std::f64::consts::PI, std::f64::consts::PI]),
            qd_max: DVector::from_row_slice(&[v, v]),
        };
        Acrobot {
            params,
            kinds: [CoordinateKind::Revolute, CoordinateKind::Revolute],
            bounds,
            scales,
        }
    }

    pub fn default_params() -> Self {
        Acrobot::new(AcrobotParams::default())
    }

    pub fn params(&self) -> &AcrobotParams {
        &self.params
    }
}

impl SystemModel for Acrobot {
    fn dof(&self) -> usize {
        2
    }

    fn num_inputs(&self) -> usize {
        1
    }

    fn coordinate_kinds(&self) -> &[CoordinateKind] {
        &self.kinds
    }

    fn mass_matrix(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let p = &self.params;
        let c2 = q[1].cos();
        let m11 = p.m1 * p.l1 * p.l1
            + p.m2 * (p.l1 * p.l1 + p.l2 * p.l2 + 2.0 * p.l1 * p.l2 * c2);
        let m12 = p.m2 * (p.l2 * p.l2 + p.l1 * p.l2 * c2);
        let m22 = p.m2 * p.l2 * p.l2;
        DMatrix::from_row_slice(2, 2, &[m11, m12, m12, m22])
    }

    fn coriolis_matrix(&self, q: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
        // Christoffel-symbol form, so Mdot - 2C is skew-symmetric.
        let p = &self.params;
        let h = -p.m2 * p.l1 * p.l2 * q[1].sin();
        DMatrix::from_row_slice(2, 2, &[h * v[1], h * (v[0] + v[1]), -h * v[0], 0.0])
    }

    fn gravity_vector(&self, q: &DVector<f64>) -> DVector<f64> {
        let p = &self.params;
        let s1 = q[0].sin();
        let s12 = (q[0] + q[1]).sin();
        let g1 = (p.m1 * p.l1 + p.m2 * p.l1) * p.gravity * s1 + p.m2 * p.l2 * p.gravity * s12;
        let g2 = p.m2 * p.l2 * p.gravity * s12;
        DVector::from_row_slice(&[g1, g2])
    }

    fn input_map(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0])
    }

    fn annihilator(&self, _q: &DVector<f64>) -> DVector<f64> {
        DVector::from_row_slice(&[1.0, 0.0])
    }

    fn actuated_basis(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, 2, &[0.0, 1.0])
    }

    fn input_recovery(&self, _q: &DVector<f64>, tau: &DVector<f64>) -> Option<DVector<f64>> {
        Some(tau.clone())
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
        let (s2, c2) = q[1].sin_cos();
        let m11 =
            p.m1 * p.l1 * p.l1 + p.m2 * (p.l1 * p.l1 + p.l2 * p.l2 + 2.0 * p.l1 * p.l2 * c2);
        let m12 = p.m2 * (p.l2 * p.l2 + p.l1 * p.l2 * c2);
        let h = -p.m2 * p.l1 * p.l2 * s2;
        let a_u = m11 * dp[0] + m12 * dp[1];
        let b_u = m11 * ddp[0] + m12 * ddp[1] + h * dp[1] * (2.0 * dp[0] + dp[1]);
        let c_u = (p.m1 * p.l1 + p.m2 * p.l1) * p.gravity * q[0].sin()
            + p.m2 * p.l2 * p.gravity * (q[0] + q[1]).sin();
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
        if rate * dp[0].abs() > p.velocity_limit || rate * dp[1].abs() > p.velocity_limit {
            return false;
        }
        // elbow row: tau = a_a theta'/2 + b_a theta + c_a
        let (s2, c2) = q[1].sin_cos();
        let m12 = p.m2 * (p.l2 * p.l2 + p.l1 * p.l2 * c2);
        let m22 = p.m2 * p.l2 * p.l2;
        let h = -p.m2 * p.l1 * p.l2 * s2;
        let a_a = m12 * dp[0] + m22 * dp[1];
        let b_a = m12 * ddp[0] + m22 * ddp[1] - h * dp[0] * dp[0];
        let c_a = p.m2 * p.l2 * p.gravity * (q[0] + q[1]).sin();
        let tau = 0.5 * a_a * dtheta + b_a * theta + c_a;
        tau.abs() <= p.torque_limit
    }

    fn point_ode(
        &self,
        q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
    ) -> super::PointOde {
        let p = &self.params;
        let (s1, c1) = q[0].sin_cos();
        let (s2, c2) = q[1].sin_cos();
        let s12 = s1 * c2 + c1 * s2;

        let m11 =
            p.m1 * p.l1 * p.l1 + p.m2 * (p.l1 * p.l1 + p.l2 * p.l2 + 2.0 * p.l1 * p.l2 * c2);
        let m12 = p.m2 * (p.l2 * p.l2 + p.l1 * p.l2 * c2);
        let m22 = p.m2 * p.l2 * p.l2;
        let h = -p.m2 * p.l1 * p.l2 * s2;

        // shoulder (passive) row
        let a_u = m11 * dp[0] + m12 * dp[1];
        let b_u = m11 * ddp[0] + m12 * ddp[1] + h * dp[1] * (2.0 * dp[0] + dp[1]);
        let c_u = (p.m1 * p.l1 + p.m2 * p.l1) * p.gravity * s1 + p.m2 * p.l2 * p.gravity * s12;

        // elbow (actuated) row
        let a_a = m12 * dp[0] + m22 * dp[1];
        let b_a = m12 * ddp[0] + m22 * ddp[1] - h * dp[0] * dp[0];
        let c_a = p.m2 * p.l2 * p.gravity * s12;

        let v = p.velocity_limit;
        let mut theta_vmax = f64::INFINITY;
        for &d in &[dp[0], dp[1]] {
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
            n_rows: 1,
            ..super::PointOde::default()
        };
        out.rows[0] = super::AffineRow {
            a: a_a,
            b: b_a,
            c: c_a,
            lo: -p.torque_limit,
            hi: p.torque_limit,
        };
        out
    }
}
