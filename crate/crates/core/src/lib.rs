//! Collision-avoidance driver steering model.
//!
//! The model steers to keep the task difficulty — the positive excess of
//! task demand (inverse time-to-collision) over capability (inverse
//! time-to-avoidance) — at zero. Each control tick it locates candidate
//! collision points between the ego vehicle, moving obstacles, and road
//! edges, computes the motivational signals per obstacle, and applies the
//! smallest steering change that restores a decreasing demand, derived from
//! a bicycle-model steering Jacobian.
//!
//! The crate also ships the planar vehicle plant the controller is exercised
//! against, the benchmark scenarios (tight-gap intrusion, four-obstacle
//! traffic, a 90-degree turn track), a maximum-speed sweep harness, and
//! least-squares identification of three human driver parameters from
//! recorded steering traces.

pub mod driver;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod motivation;
pub mod plant;
pub mod scenario;
pub mod steering;
pub mod vec2;

pub use error::{IdentError, ModelError};
pub use vec2::Vec2;
