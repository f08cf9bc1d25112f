//! Poses, vehicles and currents.

use serde::{Deserialize, Serialize};

use crate::angle::wrap_2pi;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "RawPose<S>", bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct PoseT<S> {
    pub x: S,
    pub y: S,
    pub theta: S,
}

#[derive(Deserialize)]
struct RawPose<S> {
    x: S,
    y: S,
    theta: S,
}

impl<S: Scalar> From<RawPose<S>> for PoseT<S> {
    fn from(p: RawPose<S>) -> Self {
        PoseT::new(p.x, p.y, p.theta)
    }
}

impl<S: Scalar> PoseT<S> {
    /// Heading is wrapped into `[0, 2π)`.
    pub fn new(x: S, y: S, theta: S) -> Self {
        PoseT { x, y, theta: wrap_2pi(theta) }
    }

    pub fn origin() -> Self {
        PoseT { x: S::zero(), y: S::zero(), theta: S::zero() }
    }

    pub fn distance_to(&self, other: &Self) -> S {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpecT<S> {
    /// Speed relative to the surrounding medium.
    pub speed: S,
    pub turning_radius: S,
}

impl<S: Scalar> VehicleSpecT<S> {
    pub fn new(speed: S, turning_radius: S) -> Result<Self> {
        let v = VehicleSpecT { speed, turning_radius };
        v.validate()?;
        Ok(v)
    }

    pub fn unit() -> Self {
        VehicleSpecT { speed: S::one(), turning_radius: S::one() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed > S::zero() && self.turning_radius > S::zero())
            || !self.speed.is_finite()
            || !self.turning_radius.is_finite()
        {
            return Err(Error::BadVehicle);
        }
        Ok(())
    }

    pub fn max_turn_rate(&self) -> S {
        self.speed / self.turning_radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "RawCurrent<S>", bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct CurrentStateT<S> {
    pub v_w: S,
    pub theta_w: S,
}

#[derive(Deserialize)]
struct RawCurrent<S> {
    v_w: S,
    theta_w: S,
}

impl<S: Scalar> From<RawCurrent<S>> for CurrentStateT<S> {
    fn from(c: RawCurrent<S>) -> Self {
        CurrentStateT::new(c.v_w, c.theta_w)
    }
}

impl<S: Scalar> CurrentStateT<S> {
    pub fn new(v_w: S, theta_w: S) -> Self {
        CurrentStateT { v_w, theta_w: wrap_2pi(theta_w) }
    }

    pub fn zero() -> Self {
        CurrentStateT { v_w: S::zero(), theta_w: S::zero() }
    }

    /// Builds a current from its velocity components.
    pub fn from_components(wx: S, wy: S) -> Self {
        let v_w = wx.hypot(wy);
        let theta_w = if v_w > S::zero() { wrap_2pi(wy.atan2(wx)) } else { S::zero() };
        CurrentStateT { v_w, theta_w }
    }

    pub fn wx(&self) -> S {
        self.v_w * self.theta_w.cos()
    }

    pub fn wy(&self) -> S {
        self.v_w * self.theta_w.sin()
    }

    pub fn components(&self) -> (S, S) {
        (self.wx(), self.wy())
    }

    /// Errors unless the current is strictly slower than the vehicle.
    pub fn check_against(&self, vehicle: &VehicleSpecT<S>) -> Result<()> {
        if !(self.v_w >= S::zero()) || !self.v_w.is_finite() || self.v_w >= vehicle.speed {
            return Err(Error::CurrentTooStrong { v_w: self.v_w.f64(), v: vehicle.speed.f64() });
        }
        Ok(())
    }
}

/// Piecewise-constant current over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct CurrentScheduleT<S> {
    entries: Vec<(S, CurrentStateT<S>)>,
}

impl<S: Scalar> CurrentScheduleT<S> {
    pub fn new(entries: Vec<(S, CurrentStateT<S>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySchedule);
        }
        if entries[0].0 != S::zero() {
            return Err(Error::BadSchedule);
        }
        if entries.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::BadSchedule);
        }
        Ok(CurrentScheduleT { entries })
    }

    pub fn constant(c: CurrentStateT<S>) -> Self {
        CurrentScheduleT { entries: vec![(S::zero(), c)] }
    }

    pub fn entries(&self) -> &[(S, CurrentStateT<S>)] {
        &self.entries
    }

    /// Epochs after `t` at which the current changes.
    pub fn next_change_after(&self, t: S) -> Option<S> {
        self.entries.iter().map(|e| e.0).find(|&e| e > t)
    }
}

pub fn current_at<S: Scalar>(schedule: &CurrentScheduleT<S>, t: S) -> Result<CurrentStateT<S>> {
    if !(t >= S::zero()) {
        return Err(Error::NegativeTime);
    }
    schedule
        .entries
        .iter()
        .rev()
        .find(|e| e.0 <= t)
        .map(|e| e.1)
        .ok_or(Error::EmptySchedule)
}

/// Expresses `goal` and `current` in the frame where `start` is `(0, 0, 0)`.
pub fn to_start_frame<S: Scalar>(
    start: &PoseT<S>,
    goal: &PoseT<S>,
    current: &CurrentStateT<S>,
) -> (PoseT<S>, CurrentStateT<S>) {
    let (s, c) = start.theta.sin_cos();
    let dx = goal.x - start.x;
    let dy = goal.y - start.y;
    let g = PoseT::new(c * dx + s * dy, -s * dx + c * dy, goal.theta - start.theta);
    let w = CurrentStateT::new(current.v_w, current.theta_w - start.theta);
    (g, w)
}

/// Maps a pose given in the frame of `start` back to the world frame.
pub fn from_start_frame<S: Scalar>(start: &PoseT<S>, local: &PoseT<S>) -> PoseT<S> {
    let (s, c) = start.theta.sin_cos();
    PoseT::new(
        start.x + c * local.x - s * local.y,
        start.y + s * local.x + c * local.y,
        local.theta + start.theta,
    )
}
