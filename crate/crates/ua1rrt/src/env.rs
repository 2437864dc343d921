//! Configuration-space sampling and collision checking against
//! axis-aligned box obstacles and joint limits.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PathSegment;

const MAX_REJECTIONS: usize = 10_000;

/// Axis-aligned box obstacle over a subset of coordinates. Entries
/// outside `[lo, hi]` on any listed coordinate mean no collision.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxObstacle {
    /// Coordinate indices the box constrains.
    pub coords: Vec<usize>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxObstacle {
    pub fn contains(&self, q: &DVector<f64>) -> bool {
        self.coords
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&i, (&lo, &hi))| q[i] >= lo && q[i] <= hi)
    }
}

/// Sampling box plus obstacle set. Joint limits are expressed as the
/// complement of `limits_lo..limits_hi` on selected coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    pub sample_lo: Vec<f64>,
    pub sample_hi: Vec<f64>,
    #[serde(default)]
    pub obstacles: Vec<BoxObstacle>,
    /// Hard limits per coordinate; configurations outside are treated
    /// as collisions. `None` entries are unconstrained.
    #[serde(default)]
    pub limits: Vec<Option<(f64, f64)>>,
}

impl Environment {
    pub fn free_space(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        let n = lo.len();
        Environment {
            sample_lo: lo,
            sample_hi: hi,
            obstacles: Vec::new(),
            limits: vec![None; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.sample_lo.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.sample_hi.len() != n {
            return Err(Error::Config(
                "environment.sample_hi: length mismatch with sample_lo".into(),
            ));
        }
        if !self.limits.is_empty() && self.limits.len() != n {
            return Err(Error::Config(
                "environment.limits: length mismatch with sample_lo".into(),
            ));
        }
        for (i, (lo, hi)) in self.sample_lo.iter().zip(&self.sample_hi).enumerate() {
            if !(lo < hi) {
                return Err(Error::Config(format!(
                    "environment.sample_lo[{i}]: empty sampling interval [{lo}, {hi}]"
                )));
            }
        }
        for (k, obs) in self.obstacles.iter().enumerate() {
            if obs.lo.len() != obs.coords.len() || obs.hi.len() != obs.coords.len() {
                return Err(Error::Config(format!(
                    "environment.obstacles[{k}]: coords/lo/hi length mismatch"
                )));
            }
            if obs.coords.iter().any(|&i| i >= n) {
                return Err(Error::Config(format!(
                    "environment.obstacles[{k}].coords: index out of range"
                )));
            }
        }
        Ok(())
    }

    /// Point collision test.
    pub fn in_collision(&self, q: &DVector<f64>) -> bool {
        for (i, limit) in self.limits.iter().enumerate() {
            if let Some((lo, hi)) = limit {
                if q[i] < *lo || q[i] > *hi {
                    return true;
                }
            }
        }
        self.obstacles.iter().any(|o| o.contains(q))
    }

    /// Uniform collision-free sample from the box.
    pub fn random_configuration<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>> {
        for _ in 0..MAX_REJECTIONS {
            let q = DVector::from_fn(self.dim(), |i, _| {
                rng.gen_range(self.sample_lo[i]..self.sample_hi[i])
            });
            if !self.in_collision(&q) {
                return Ok(q);
            }
        }
        Err(Error::EnvironmentSaturated(MAX_REJECTIONS))
    }

    /// Samples the path at a fixed resolution (plus both endpoints)
    /// and rejects it if any sample collides.
    pub fn is_obstacle_free(&self, path: &PathSegment, resolution: usize) -> bool {
        let end = path.s_trunc();
        for k in 0..=resolution {
            let s = end * k as f64 / resolution as f64;
            let (q, _, _) = path.eval_unchecked(s);
            if self.in_collision(&q) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_cubic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn empty_obstacle_set_accepts_first_sample() {
        let env = Environment::free_space(vec![0.0, 0.0], vec![1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let probe = {
            let mut probe_rng = rng.clone();
            DVector::from_fn(2, |i, _| {
                probe_rng.gen_range(env.sample_lo[i]..env.sample_hi[i])
            })
        };
        let q = env.random_configuration(&mut rng).unwrap();
        assert_eq!(q, probe);
    }

    #[test]
    fn path_through_obstacle_rejected() {
        let mut env = Environment::free_space(vec![0.0, 0.0], vec![4.0, 1.0]);
        env.obstacles.push(BoxObstacle {
            coords: vec![0, 1],
            lo: vec![1.8, 0.0],
            hi: vec![2.2, 1.0],
        });
        let path = make_cubic(
            &dv(&[0.0, 0.5]),
            &dv(&[4.0, 0.0]),
            &dv(&[4.0, 0.5]),
            &dv(&[4.0, 0.0]),
        );
        assert!(!env.is_obstacle_free(&path, 64));
        let clear = make_cubic(
            &dv(&[0.0, 0.5]),
            &dv(&[1.0, 0.0]),
            &dv(&[1.0, 0.5]),
            &dv(&[1.0, 0.0]),
        );
        assert!(env.is_obstacle_free(&clear, 64));
    }

    #[test]
    fn joint_limit_treated_as_collision() {
        let mut env = Environment::free_space(
            vec![-12.0, -std::f64::consts::PI],
            vec![12.0, std::f64::consts::PI],
        );
        env.limits = vec![None, Some((-std::f64::consts::PI, std::f64::consts::PI))];
        assert!(env.in_collision(&dv(&[0.0, 3.15])));
        assert!(!env.in_collision(&dv(&[0.0, 3.14])));
    }

    #[test]
    fn saturated_environment_errors() {
        let mut env = Environment::free_space(vec![0.0], vec![1.0]);
        env.obstacles.push(BoxObstacle {
            coords: vec![0],
            lo: vec![-1.0],
            hi: vec![2.0],
        });
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(matches!(
            env.random_configuration(&mut rng),
            Err(Error::EnvironmentSaturated(_))
        ));
    }
}
