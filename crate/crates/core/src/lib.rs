//! Minimum-time Dubins paths for constant-speed vehicles in uniform currents.
//!
//! The closed-form planner solves LSL and RSR paths whose arcs may span up to
//! 4π, which reach every goal pose whenever the current is slower than the
//! vehicle. Around it sit reachability analysis of the 2π-arc subset, a
//! numeric six-type baseline, a kinematic integrator and a replanning
//! simulator.
//!
//! Geometry is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix it to `f64`.

pub mod angle;
pub mod baseline;
pub mod error;
pub mod experiments;
pub mod model;
pub mod planner;
pub mod reach;
pub mod scalar;
pub mod sim;
pub mod trajectory;

pub use angle::{mod_kappa, normalize_angle, Kappa};
pub use error::{Error, Result};
pub use planner::{PathType, PlanMode};
pub use scalar::Scalar;

pub type Pose = model::PoseT<f64>;
pub type VehicleSpec = model::VehicleSpecT<f64>;
pub type CurrentState = model::CurrentStateT<f64>;
pub type CurrentSchedule = model::CurrentScheduleT<f64>;
pub type PathSolution = planner::PathSolutionT<f64>;
pub type ParamInterval = planner::ParamIntervalT<f64>;
pub type RegionDescriptor = reach::RegionDescriptorT<f64>;
pub type ControlSchedule = trajectory::ControlScheduleT<f64>;
pub type SampledTrajectory = trajectory::SampledTrajectoryT<f64>;

pub type Pose32 = model::PoseT<f32>;
pub type CurrentState32 = model::CurrentStateT<f32>;
pub type VehicleSpec32 = model::VehicleSpecT<f32>;
pub type PathSolution32 = planner::PathSolutionT<f32>;
