//! Kinodynamic motion planning for underactuated degree-one
//! mechanical systems.
//!
//! The core idea: steer with randomly sampled cubic configuration
//! paths, then decide feasibility by integrating the squared path
//! rate `theta = sdot^2` along each path. For a system with exactly
//! one unactuated degree of freedom the unactuated dynamics pin the
//! rate down to a scalar linear ODE in the path parameter, so each
//! candidate edge is verified (and truncated to its feasible prefix)
//! with a single forward pass instead of a shooting search over
//! controls.
//!
//! Modules:
//! - [`dynamics`]: system models (acrobot, planar UAV, synthetic
//!   constant-coefficient test system) and path-projected dynamics
//!   coefficients.
//! - [`geometry`]: cubic path segments, truncation, tangent sampling.
//! - [`profile`]: rate-profile integration, admissibility, time
//!   parameterisation.
//! - [`env`]: sampling boxes, obstacles, collision checks.
//! - [`planner`]: the tree planner itself.
//! - [`baseline`]: a control-sampling RRT for comparison, plus
//!   forward simulation used for closed-loop verification.
//! - [`bench`]: experiment configuration, batch runs, result export.

pub mod baseline;
pub mod bench;
pub mod dynamics;
pub mod env;
pub mod error;
pub mod geometry;
pub mod planner;
pub mod profile;

pub use dynamics::{Acrobot, PlanarUav, SyntheticUa1, SystemModel};
pub use env::{BoxObstacle, Environment};
pub use error::{Error, Result};
pub use geometry::{make_cubic, truncate, PathSegment};
pub use planner::{plan, GoalSpec, PlanReport, PlannerConfig, StartState, Tree, Vertex};
pub use profile::{integrate_path_profile, time_parameterize, ProfileResult, Trajectory};
