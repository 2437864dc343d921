//! Cubic Hermite path segments, random steering-path generation,
//! truncation and revolute-coordinate unwrapping.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dynamics::CoordinateKind;
use crate::error::{Error, Result};

/// A cubic geometric path `P(s)` on `[0, 1]`, possibly truncated.
///
/// Stored in monomial form `P(s) = c0 + c1 s + c2 s^2 + c3 s^3` so
/// evaluation in the profile integrator stays cheap. Truncation keeps
/// the original parameterisation: the domain simply ends at `s_trunc`.
#[derive(Debug, Clone)]
pub struct PathSegment {
    c0: DVector<f64>,
    c1: DVector<f64>,
    c2: DVector<f64>,
    c3: DVector<f64>,
    s_trunc: f64,
}

impl PathSegment {
    pub fn dim(&self) -> usize {
        self.c0.len()
    }

    /// Effective end of the parameter domain.
    pub fn s_trunc(&self) -> f64 {
        self.s_trunc
    }

    /// Position, first and second parametric derivatives at `s`.
    pub fn eval(&self, s: f64) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        if !(0.0..=self.s_trunc).contains(&s) {
            return Err(Error::ParameterOutOfRange(s));
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let p = &self.c0 + &self.c1 * s + &self.c2 * (s * s) + &self.c3 * (s * s * s);
        let dp = &self.c1 + &self.c2 * (2.0 * s) + &self.c3 * (3.0 * s * s);
        let ddp = &self.c2 * 2.0 + &self.c3 * (6.0 * s);
        (p, dp, ddp)
    }

    /// Allocation-free evaluation into caller-provided buffers, for
    /// the profile integrator's inner loop.
    pub(crate) fn eval_into(
        &self,
        s: f64,
        q: &mut DVector<f64>,
        dp: &mut DVector<f64>,
        ddp: &mut DVector<f64>,
    ) {
        for i in 0..self.c0.len() {
            let (c0, c1, c2, c3) = (self.c0[i], self.c1[i], self.c2[i], self.c3[i]);
            q[i] = ((c3 * s + c2) * s + c1) * s + c0;
            dp[i] = (3.0 * c3 * s + 2.0 * c2) * s + c1;
            ddp[i] = 6.0 * c3 * s + 2.0 * c2;
        }
    }

    /// Endpoint of the (possibly truncated) domain.
    pub fn endpoint(&self) -> DVector<f64> {
        self.eval_unchecked(self.s_trunc).0
    }

    /// Tangent at the end of the (possibly truncated) domain.
    pub fn end_tangent(&self) -> DVector<f64> {
        self.eval_unchecked(self.s_trunc).1
    }

    /// Tangent at `s = 0`.
    pub fn start_tangent(&self) -> DVector<f64> {
        self.c1.clone()
    }

    pub fn start(&self) -> DVector<f64> {
        self.c0.clone()
    }
}

/// Hermite cubic interpolating `P(0) = q0`, `P(1) = q1`, `P'(0) = t0`,
/// `P'(1) = t1`.
pub fn make_cubic(
    q0: &DVector<f64>,
    t0: &DVector<f64>,
    q1: &DVector<f64>,
    t1: &DVector<f64>,
) -> PathSegment {
    let d = q1 - q0;
    PathSegment {
        c0: q0.clone(),
        c1: t0.clone(),
        c2: &d * 3.0 - t0 * 2.0 - t1,
        c3: &d * -2.0 + t0 + t1,
        s_trunc: 1.0,
    }
}

/// Restricts the domain of `path` to `[0, s_star]` without re-scaling
/// the parameter, so stored rate values remain valid.
pub fn truncate(path: &PathSegment, s_star: f64) -> Result<PathSegment> {
    if !(s_star > 0.0 && s_star <= 1.0) {
        return Err(Error::InvalidTruncation(s_star));
    }
    let mut out = path.clone();
    out.s_trunc = s_star;
    Ok(out)
}

/// Displacement from `q_from` to `q_to` in unwrapped space: revolute
/// entries are taken on the real line with no `+-pi` wrapping, so
/// multi-revolution targets stay distinct.
pub fn unwrap_delta(
    q_from: &DVector<f64>,
    q_to: &DVector<f64>,
    _kinds: &[CoordinateKind],
) -> DVector<f64> {
    q_to - q_from
}

/// Initial conditions for a steering path: the source vertex state.
#[derive(Debug, Clone)]
pub struct PathStart<'a> {
    pub q: &'a DVector<f64>,
    pub tangent: &'a DVector<f64>,
    pub theta: f64,
}

/// End-tangent (and, from rest, start-tangent) sampling range scale.
#[derive(Debug, Clone, Copy)]
pub struct TangentSampling {
    /// Tangent components are drawn uniformly from
    /// `[-kappa * |q_r - q0|, +kappa * |q_r - q0|]`.
    pub kappa: f64,
}

impl Default for TangentSampling {
    fn default() -> Self {
        TangentSampling { kappa: 3.0 }
    }
}

const REST_THETA: f64 = 1e-12;

/// Generates a random C1-continuous steering cubic from `start` to `q_r`.
///
/// The initial tangent equals the vertex tangent unless the vertex is
/// at rest (theta ~ 0), in which case its direction is sampled
/// uniformly on the sphere with magnitude from the same range as the
/// end tangent.
pub fn generate_path<R: Rng + ?Sized>(
    start: &PathStart<'_>,
    q_r: &DVector<f64>,
    sampling: TangentSampling,
    rng: &mut R,
) -> PathSegment {
    let n = start.q.len();
    let range = sampling.kappa * (q_r - start.q).norm();
    let t1 = DVector::from_fn(n, |_, _| {
        if range > 0.0 {
            rng.gen_range(-range..range)
        } else {
            0.0
        }
    });
    let t0 = if start.theta > REST_THETA {
        start.tangent.clone()
    } else {
        let mut dir = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = dir.norm();
        if norm > 0.0 {
            dir /= norm;
        }
        let magnitude = if range > 0.0 {
            rng.gen_range(0.0..range)
        } else {
            0.0
        };
        dir * magnitude
    };
    make_cubic(start.q, &t0, q_r, &t1)
}
