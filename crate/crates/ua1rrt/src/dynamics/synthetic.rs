use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Bounds, CoordinateKind, Scales, SystemModel};

/// Minimal two-coordinate UA1 system with prescribed constant
/// underactuated coefficients along the straight path `P(s) = (s, 0)`:
/// `a_u = a`, `b_u = b`, `c_u = c`. Used for profile-integration
/// oracles where the closed-form solution of the rate ODE is known.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            a: 1.0,
            b: 1.0,
            c: -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticUa1 {
    params: SyntheticParams,
    kinds: [CoordinateKind; 2],
    bounds: Bounds,
    scales: Scales,
}

impl SyntheticUa1 {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self::from_params(SyntheticParams { a, b, c })
    }

    pub fn from_params(params: SyntheticParams) -> Self {
        SyntheticUa1 {
            params,
            kinds: [CoordinateKind::Prismatic, CoordinateKind::Prismatic],
            bounds: Bounds::unbounded(2),
            scales: Scales {
                q_max: DVector::from_element(2, 1.0),
                qd_max: DVector::from_element(2, 1.0),
            },
        }
    }
}

impl SystemModel for SyntheticUa1 {
    fn dof(&self) -> usize {
        2
    }

    fn num_inputs(&self) -> usize {
        1
    }

    fn coordinate_kinds(&self) -> &[CoordinateKind] {
        &self.kinds
    }

    fn mass_matrix(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(&[self.params.a, 1.0]))
    }

    fn coriolis_matrix(&self, _q: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[self.params.b * v[0], 0.0, 0.0, 0.0])
    }

    fn gravity_vector(&self, _q: &DVector<f64>) -> DVector<f64> {
        DVector::from_row_slice(&[self.params.c, 0.0])
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

    fn rate_ode_coefficients(
        &self,
        _q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
    ) -> (f64, f64, f64) {
        let p = &self.params;
        (
            p.a * dp[0],
            p.a * ddp[0] + p.b * dp[0] * dp[0],
            p.c,
        )
    }

    fn point_ode(
        &self,
        q: &DVector<f64>,
        dp: &DVector<f64>,
        ddp: &DVector<f64>,
    ) -> super::PointOde {
        let (a_u, b_u, c_u) = self.rate_ode_coefficients(q, dp, ddp);
        super::PointOde {
            a_u,
            b_u,
            c_u,
            ..super::PointOde::default()
        }
    }
}
