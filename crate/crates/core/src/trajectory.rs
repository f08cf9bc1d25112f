//! Control schedules, kinematic integration and sampled paths.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{current_at, CurrentScheduleT, CurrentStateT, PoseT, VehicleSpecT};
use crate::planner::{PathSolutionT, PathType};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlScheduleT<S> {
    /// `(turn rate, duration)` pairs.
    pub segments: Vec<(S, S)>,
}

impl<S: Scalar> ControlScheduleT<S> {
    pub fn duration(&self) -> S {
        self.segments.iter().fold(S::zero(), |acc, s| acc + s.1)
    }

    /// Turn rate in force at time `t` after the schedule starts; zero once exhausted.
    pub fn rate_at(&self, t: S) -> S {
        let mut acc = S::zero();
        for &(u, d) in &self.segments {
            acc = acc + d;
            if t < acc {
                return u;
            }
        }
        S::zero()
    }

    /// Schedule with the first `t` seconds removed.
    pub fn after(&self, t: S) -> Self {
        let mut left = t;
        let mut out = Vec::new();
        for &(u, d) in &self.segments {
            if left >= d {
                left = left - d;
                continue;
            }
            out.push((u, d - left));
            left = S::zero();
        }
        ControlScheduleT { segments: out }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Inertial,
    Current,
}

impl Frame {
    fn name(self) -> &'static str {
        match self {
            Frame::Inertial => "inertial",
            Frame::Current => "current",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + Deserialize<'de>"))]
pub struct SampledTrajectoryT<S> {
    pub frame: Frame,
    pub samples: Vec<(S, PoseT<S>)>,
}

impl<S: Scalar> SampledTrajectoryT<S> {
    pub fn last(&self) -> Option<&(S, PoseT<S>)> {
        self.samples.last()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "x", "y", "theta", "frame"])?;
        for (t, p) in &self.samples {
            wr.write_record([
                t.f64().to_string(),
                p.x.f64().to_string(),
                p.y.f64().to_string(),
                p.theta.f64().to_string(),
                self.frame.name().to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub fn controls_of<S: Scalar>(sol: &PathSolutionT<S>, vehicle: &VehicleSpecT<S>) -> ControlScheduleT<S> {
    let v = vehicle.speed;
    let r = vehicle.turning_radius;
    let u = vehicle.max_turn_rate();
    let sg = sol.path_type.signs();
    let rate = |s: i8| S::c(s as f64) * u;
    let mid = match sol.path_type {
        PathType::LRL | PathType::RLR => r * sol.beta / v,
        _ => sol.beta / v,
    };
    ControlScheduleT {
        segments: vec![(rate(sg[0]), r * sol.alpha / v), (rate(sg[1]), mid), (rate(sg[2]), r * sol.gamma / v)],
    }
}

/// Pose after moving for `dt` at turn rate `u` with no current.
pub fn advance<S: Scalar>(p: &PoseT<S>, u: S, v: S, dt: S) -> PoseT<S> {
    let (s0, c0) = p.theta.sin_cos();
    if u == S::zero() {
        return PoseT { x: p.x + v * dt * c0, y: p.y + v * dt * s0, theta: p.theta };
    }
    let th = p.theta + u * dt;
    let (s1, c1) = th.sin_cos();
    let rho = v / u;
    PoseT::new(p.x + rho * (s1 - s0), p.y - rho * (c1 - c0), th)
}

/// Exact step of the kinematics with a constant current over the step.
pub fn step_exact<S: Scalar>(p: &PoseT<S>, u: S, w: &CurrentStateT<S>, v: S, h: S) -> PoseT<S> {
    let q = advance(p, u, v, h);
    let (wx, wy) = w.components();
    PoseT { x: q.x + wx * h, y: q.y + wy * h, theta: q.theta }
}

/// Classical RK4 step of the kinematics; heading is advanced exactly.
pub fn step_rk4<S: Scalar>(p: &PoseT<S>, u: S, w: &CurrentStateT<S>, v: S, h: S) -> PoseT<S> {
    let (wx, wy) = w.components();
    let two = S::c(2.0);
    let f = |th: S| (v * th.cos() + wx, v * th.sin() + wy);
    let k1 = f(p.theta);
    let k2 = f(p.theta + u * h / two);
    let k4 = f(p.theta + u * h);
    let six = S::c(6.0);
    let x = p.x + h / six * (k1.0 + S::c(4.0) * k2.0 + k4.0);
    let y = p.y + h / six * (k1.1 + S::c(4.0) * k2.1 + k4.1);
    PoseT::new(x, y, p.theta + u * h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    ExactArc,
    Rk4,
}

/// Integrates the vehicle kinematics in the inertial frame under a
/// piecewise-constant current. Steps are split at segment ends and current
/// change epochs.
pub fn integrate_if<S: Scalar>(
    start: &PoseT<S>,
    controls: &ControlScheduleT<S>,
    schedule: &CurrentScheduleT<S>,
    vehicle: &VehicleSpecT<S>,
    h: S,
) -> Result<SampledTrajectoryT<S>> {
    integrate_with(start, controls, schedule, vehicle, h, Integrator::ExactArc)
}

pub fn integrate_with<S: Scalar>(
    start: &PoseT<S>,
    controls: &ControlScheduleT<S>,
    schedule: &CurrentScheduleT<S>,
    vehicle: &VehicleSpecT<S>,
    h: S,
    method: Integrator,
) -> Result<SampledTrajectoryT<S>> {
    if !(h > S::zero()) {
        return Err(crate::error::Error::InvalidArgument("step must be positive".into()));
    }
    let v = vehicle.speed;
    let mut t = S::zero();
    let mut p = *start;
    let mut samples = vec![(t, p)];
    for &(u, d) in &controls.segments {
        let end = t + d;
        while end - t > S::epsilon() * (S::one() + end.abs()) * S::c(4.0) {
            let mut dt = h.min(end - t);
            if let Some(e) = schedule.next_change_after(t) {
                if e < t + dt {
                    dt = e - t;
                }
            }
            let w = current_at(schedule, t)?;
            p = match method {
                Integrator::ExactArc => step_exact(&p, u, &w, v, dt),
                Integrator::Rk4 => step_rk4(&p, u, &w, v, dt),
            };
            t = t + dt;
            samples.push((t, p));
        }
        t = t.max(end);
        if let Some(last) = samples.last_mut() {
            last.0 = t;
        }
    }
    Ok(SampledTrajectoryT { frame: Frame::Inertial, samples })
}

/// Current-frame pose at time `t` along the solution, from the origin.
pub fn cf_pose_at<S: Scalar>(sol: &PathSolutionT<S>, vehicle: &VehicleSpecT<S>, t: S) -> PoseT<S> {
    let c = controls_of(sol, vehicle);
    let mut p = PoseT::origin();
    let mut left = t.max(S::zero());
    for &(u, d) in &c.segments {
        let dt = left.min(d);
        p = advance(&p, u, vehicle.speed, dt);
        left = left - dt;
        if left <= S::zero() {
            break;
        }
    }
    p
}

/// Current-frame endpoint of the solution.
pub fn cf_endpoint<S: Scalar>(sol: &PathSolutionT<S>, vehicle: &VehicleSpecT<S>) -> PoseT<S> {
    cf_pose_at(sol, vehicle, S::infinity())
}

/// Closed-form current-frame samples every `h` seconds plus the endpoint.
pub fn cf_path<S: Scalar>(sol: &PathSolutionT<S>, vehicle: &VehicleSpecT<S>, h: S) -> SampledTrajectoryT<S> {
    let total = controls_of(sol, vehicle).duration();
    let mut samples = vec![(S::zero(), PoseT::origin())];
    let mut i = 1usize;
    loop {
        let t = S::c(i as f64) * h;
        if t >= total {
            break;
        }
        samples.push((t, cf_pose_at(sol, vehicle, t)));
        i += 1;
    }
    if total > S::zero() {
        samples.push((total, cf_endpoint(sol, vehicle)));
    }
    SampledTrajectoryT { frame: Frame::Current, samples }
}

/// Inertial-frame samples of a solution planned from `start`, with drift.
pub fn if_path<S: Scalar>(
    start: &PoseT<S>,
    sol: &PathSolutionT<S>,
    current: &CurrentStateT<S>,
    vehicle: &VehicleSpecT<S>,
    h: S,
) -> Result<SampledTrajectoryT<S>> {
    integrate_if(start, &controls_of(sol, vehicle), &CurrentScheduleT::constant(*current), vehicle, h)
}
