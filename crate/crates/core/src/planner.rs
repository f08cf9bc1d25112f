//! Closed-form LSL/RSR paths in a uniform current.

use serde::{Deserialize, Serialize};

use crate::angle::{wrap_2pi, Kappa};
use crate::error::{Error, Result};
use crate::model::{to_start_frame, CurrentStateT, PoseT, VehicleSpecT};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathType {
    LSL,
    RSR,
    LSR,
    RSL,
    LRL,
    RLR,
}

impl PathType {
    pub const ALL: [PathType; 6] =
        [PathType::LSL, PathType::RSR, PathType::LSR, PathType::RSL, PathType::LRL, PathType::RLR];

    /// Turn direction of each segment: +1 left, −1 right, 0 straight.
    pub fn signs(self) -> [i8; 3] {
        match self {
            PathType::LSL => [1, 0, 1],
            PathType::RSR => [-1, 0, -1],
            PathType::LSR => [1, 0, -1],
            PathType::RSL => [-1, 0, 1],
            PathType::LRL => [1, -1, 1],
            PathType::RLR => [-1, 1, -1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PathType::LSL => "LSL",
            PathType::RSR => "RSR",
            PathType::LSR => "LSR",
            PathType::RSL => "RSL",
            PathType::LRL => "LRL",
            PathType::RLR => "RLR",
        }
    }
}

impl std::fmt::Display for PathType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlanMode {
    #[serde(rename = "2pi")]
    TwoPi,
    #[serde(rename = "4pi")]
    FourPi,
}

impl PlanMode {
    pub fn kappa(self) -> Kappa {
        match self {
            PlanMode::TwoPi => Kappa::TwoPi,
            PlanMode::FourPi => Kappa::FourPi,
        }
    }
}

/// A three-segment path. For CSC types `beta` is the straight length; for
/// CCC types it is the middle arc angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSolutionT<S> {
    pub path_type: PathType,
    pub k: i32,
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub kappa: Kappa,
    pub time: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamIntervalT<S> {
    pub lower: S,
    pub upper: S,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl<S: Scalar> ParamIntervalT<S> {
    fn closed(lower: S, upper: S) -> Self {
        ParamIntervalT { lower, upper, lower_closed: true, upper_closed: true }
    }

    fn open(lower: S, upper: S) -> Self {
        ParamIntervalT { lower, upper, lower_closed: false, upper_closed: false }
    }

    /// Membership with the absolute angular slack of `S`.
    pub fn contains(&self, a: S) -> bool {
        let s = S::angle_slack();
        let lo = if self.lower_closed { a >= self.lower - s } else { a > self.lower + s };
        let hi = if self.upper_closed { a <= self.upper + s } else { a < self.upper - s };
        lo && hi
    }

    pub fn clamp(&self, a: S) -> S {
        a.max(self.lower).min(self.upper)
    }

    pub fn width(&self) -> S {
        self.upper - self.lower
    }
}

fn sign_of(path_type: PathType) -> Result<i32> {
    match path_type {
        PathType::LSL => Ok(1),
        PathType::RSR => Ok(-1),
        other => Err(Error::InvalidArgument(format!("{other} has no closed form"))),
    }
}

/// Signed total turning `2kπ + θ_f`.
fn winding<S: Scalar>(k: i32, theta_f: S) -> S {
    S::c(k as f64) * S::TAU() + theta_f
}

pub fn coeffs_lsl<S: Scalar>(k: i32, goal: &PoseT<S>, current: &CurrentStateT<S>, r: S) -> (S, S) {
    let (wx, wy) = current.components();
    let c = winding(k, goal.theta);
    let a = goal.x - r * goal.theta.sin() - wx * r * c;
    let b = goal.y - r * (S::one() - goal.theta.cos()) - wy * r * c;
    (a, b)
}

pub fn coeffs_rsr<S: Scalar>(k: i32, goal: &PoseT<S>, current: &CurrentStateT<S>, r: S) -> (S, S) {
    let (wx, wy) = current.components();
    let c = winding(k, goal.theta);
    let a = goal.x + r * goal.theta.sin() + wx * r * c;
    let b = goal.y + r * (S::one() - goal.theta.cos()) + wy * r * c;
    (a, b)
}

/// Non-negative root of `(1 − v_w²)β² + 2(A w_x + B w_y)β − (A² + B²) = 0`.
///
/// The current must be normalized by the vehicle speed.
pub fn solve_beta<S: Scalar>(a: S, b: S, current: &CurrentStateT<S>) -> Result<S> {
    if !(current.v_w < S::one()) {
        return Err(Error::CurrentTooStrong { v_w: current.v_w.f64(), v: 1.0 });
    }
    let (wx, wy) = current.components();
    let q = S::one() - current.v_w * current.v_w;
    let m = a * wx + b * wy;
    let n = a * a + b * b;
    if n == S::zero() {
        return Ok(S::zero());
    }
    let d = (m * m + n * q).sqrt();
    // pick the cancellation-free form of the same root
    let beta = if m > S::zero() { n / (m + d) } else { (d - m) / q };
    Ok(beta.max(S::zero()))
}

fn row_error(path_type: PathType, k: i32, kappa: Kappa) -> Error {
    Error::InvalidRow { path_type: path_type.to_string(), k, kappa: kappa.to_string() }
}

pub fn feasible_range<S: Scalar>(
    path_type: PathType,
    k: i32,
    theta_f: S,
    kappa: Kappa,
) -> Result<ParamIntervalT<S>> {
    let tau = S::TAU();
    let t4 = S::c(2.0) * tau;
    let z = S::zero();
    let iv = match (path_type, k, kappa) {
        (PathType::LSL, 0, _) => ParamIntervalT::closed(z, theta_f),
        (PathType::LSL, 1, Kappa::TwoPi) => ParamIntervalT::open(theta_f, tau),
        (PathType::LSL, 1, Kappa::FourPi) => ParamIntervalT::closed(z, tau + theta_f),
        (PathType::LSL, 2, Kappa::FourPi) => ParamIntervalT::open(theta_f, t4),
        (PathType::LSL, 3, Kappa::FourPi) => ParamIntervalT::open(tau + theta_f, t4),
        (PathType::RSR, -1, _) => ParamIntervalT::closed(z, tau - theta_f),
        (PathType::RSR, -2, Kappa::TwoPi) => ParamIntervalT::open(tau - theta_f, tau),
        (PathType::RSR, -2, Kappa::FourPi) => ParamIntervalT::closed(z, t4 - theta_f),
        (PathType::RSR, -3, Kappa::FourPi) => ParamIntervalT::open(tau - theta_f, t4),
        (PathType::RSR, -4, Kappa::FourPi) => ParamIntervalT::open(t4 - theta_f, t4),
        _ => return Err(row_error(path_type, k, kappa)),
    };
    Ok(iv)
}

fn check_inputs<S: Scalar>(goal: &PoseT<S>, current: &CurrentStateT<S>, vehicle: &VehicleSpecT<S>) -> Result<()> {
    vehicle.validate()?;
    current.check_against(vehicle)?;
    if !goal.is_finite() {
        return Err(Error::NonFinite);
    }
    if !(goal.theta >= S::zero() && goal.theta < S::TAU()) {
        return Err(Error::HeadingOutOfRange);
    }
    Ok(())
}

/// Current expressed as a fraction of the vehicle speed.
fn normalized<S: Scalar>(current: &CurrentStateT<S>, vehicle: &VehicleSpecT<S>) -> CurrentStateT<S> {
    CurrentStateT { v_w: current.v_w / vehicle.speed, theta_w: current.theta_w }
}

/// Solves one `(path type, k)` row. `goal` must be in the start frame.
pub fn solve_one<S: Scalar>(
    path_type: PathType,
    k: i32,
    goal: &PoseT<S>,
    current: &CurrentStateT<S>,
    vehicle: &VehicleSpecT<S>,
    kappa: Kappa,
) -> Result<Option<PathSolutionT<S>>> {
    check_inputs(goal, current, vehicle)?;
    let sign = sign_of(path_type)?;
    let range = feasible_range(path_type, k, goal.theta, kappa)?;
    let r = vehicle.turning_radius;
    let w = normalized(current, vehicle);
    let (wx, wy) = w.components();
    let (a, b) = if sign > 0 { coeffs_lsl(k, goal, &w, r) } else { coeffs_rsr(k, goal, &w, r) };
    let beta = solve_beta(a, b, &w)?;
    let a0 = if sign > 0 {
        (b - beta * wy).atan2(a - beta * wx)
    } else {
        (beta * wy - b).atan2(a - beta * wx)
    };
    let a0 = wrap_2pi(a0);
    let cap = kappa.value::<S>();
    let closure = if sign > 0 { winding(k, goal.theta) } else { -winding(k, goal.theta) };
    for cand in [a0 - S::TAU(), a0, a0 + S::TAU()] {
        if cand >= cap || !range.contains(cand) {
            continue;
        }
        let alpha = range.clamp(cand);
        let gamma = (closure - alpha).max(S::zero());
        if !range.contains(gamma) || gamma >= cap {
            continue;
        }
        let time = (r * (alpha + gamma) + beta) / vehicle.speed;
        return Ok(Some(PathSolutionT { path_type, k, alpha, beta, gamma, kappa, time }));
    }
    Ok(None)
}

const PLAN_ROWS: [(PathType, i32); 4] =
    [(PathType::LSL, 0), (PathType::LSL, 1), (PathType::RSR, -1), (PathType::RSR, -2)];

/// Minimum-time candidate among the given rows; ties keep the earlier row.
fn best_of<S: Scalar>(
    rows: &[(PathType, i32)],
    goal: &PoseT<S>,
    current: &CurrentStateT<S>,
    vehicle: &VehicleSpecT<S>,
    kappa: Kappa,
) -> Result<Option<PathSolutionT<S>>> {
    let mut best: Option<PathSolutionT<S>> = None;
    for &(pt, k) in rows {
        if let Some(s) = solve_one(pt, k, goal, current, vehicle, kappa)? {
            if best.map_or(true, |b| s.time < b.time) {
                best = Some(s);
            }
        }
    }
    Ok(best)
}

/// Minimum-time LSL/RSR path from `start` to `goal`.
pub fn plan<S: Scalar>(
    start: &PoseT<S>,
    goal: &PoseT<S>,
    current: &CurrentStateT<S>,
    vehicle: &VehicleSpecT<S>,
    mode: PlanMode,
) -> Result<Option<PathSolutionT<S>>> {
    let (g, w) = to_start_frame(start, goal, current);
    best_of(&PLAN_ROWS, &g, &w, vehicle, mode.kappa())
}

/// Like [`plan`] restricted to a single path type.
pub fn plan_type<S: Scalar>(
    path_type: PathType,
    start: &PoseT<S>,
    goal: &PoseT<S>,
    current: &CurrentStateT<S>,
    vehicle: &VehicleSpecT<S>,
    mode: PlanMode,
) -> Result<Option<PathSolutionT<S>>> {
    let (g, w) = to_start_frame(start, goal, current);
    let rows: Vec<_> = PLAN_ROWS.iter().copied().filter(|r| r.0 == path_type).collect();
    if rows.is_empty() {
        return Err(Error::InvalidArgument(format!("{path_type} has no closed form")));
    }
    best_of(&rows, &g, &w, vehicle, mode.kappa())
}

/// `(r(α+γ) + β)/v` for CSC solutions.
pub fn travel_time<S: Scalar>(sol: &PathSolutionT<S>, vehicle: &VehicleSpecT<S>) -> S {
    let r = vehicle.turning_radius;
    match sol.path_type {
        PathType::LRL | PathType::RLR => r * (sol.alpha + sol.beta + sol.gamma) / vehicle.speed,
        _ => (r * (sol.alpha + sol.gamma) + sol.beta) / vehicle.speed,
    }
}

/// Solutions for every 4π row of one type (`k = 0..3` or `k = −1..−4`),
/// in increasing `|k|`. Infeasible rows are `None`.
pub fn extended_k_solutions<S: Scalar>(
    path_type: PathType,
    goal: &PoseT<S>,
    current: &CurrentStateT<S>,
    vehicle: &VehicleSpecT<S>,
) -> Result<Vec<(i32, Option<PathSolutionT<S>>)>> {
    let ks: [i32; 4] = match sign_of(path_type)? {
        1 => [0, 1, 2, 3],
        _ => [-1, -2, -3, -4],
    };
    ks.iter()
        .map(|&k| Ok((k, solve_one(path_type, k, goal, current, vehicle, Kappa::FourPi)?)))
        .collect()
}

/// Position and heading residuals of the boundary equations.
pub fn endpoint_residual<S: Scalar>(
    sol: &PathSolutionT<S>,
    goal: &PoseT<S>,
    current: &CurrentStateT<S>,
    vehicle: &VehicleSpecT<S>,
) -> (S, S) {
    let end = crate::trajectory::cf_endpoint(sol, vehicle);
    let t = sol.time;
    let (wx, wy) = current.components();
    let ex = end.x + wx * t - goal.x;
    let ey = end.y + wy * t - goal.y;
    (ex.hypot(ey), crate::angle::circular_distance(end.theta, goal.theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type P = PoseT<f64>;
    type C = CurrentStateT<f64>;

    fn unit() -> VehicleSpecT<f64> {
        VehicleSpecT::unit()
    }

    #[test]
    fn coefficient_examples() {
        let z = C::zero();
        assert_eq!(coeffs_lsl(0, &P::new(5.0, 0.0, 0.0), &z, 1.0), (5.0, 0.0));
        let (a, b) = coeffs_lsl(0, &P::new(0.0, 0.0, PI / 2.0), &z, 1.0);
        assert!((a + 1.0).abs() < 1e-15 && (b + 1.0).abs() < 1e-15);
        assert_eq!(coeffs_rsr(-1, &P::new(5.0, 0.0, 0.0), &z, 1.0), (5.0, 0.0));
        let (a, b) = coeffs_rsr(-1, &P::new(0.0, 0.0, PI / 2.0), &z, 1.0);
        assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beta_examples() {
        assert_eq!(solve_beta(5.0, 0.0, &C::zero()).unwrap(), 5.0);
        assert_eq!(solve_beta(0.0, 0.0, &C::new(0.7, 1.0)).unwrap(), 0.0);
        assert!(solve_beta(1.0, 1.0, &C::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn ranges_match_table() {
        let t = 1.0;
        let r = feasible_range(PathType::LSL, 0, t, Kappa::TwoPi).unwrap();
        assert_eq!(r, ParamIntervalT { lower: 0.0, upper: 1.0, lower_closed: true, upper_closed: true });
        let r = feasible_range(PathType::LSL, 1, t, Kappa::FourPi).unwrap();
        assert_eq!(r, ParamIntervalT { lower: 0.0, upper: 2.0 * PI + 1.0, lower_closed: true, upper_closed: true });
        let r = feasible_range(PathType::RSR, -3, t, Kappa::FourPi).unwrap();
        assert_eq!(r, ParamIntervalT { lower: 2.0 * PI - 1.0, upper: 4.0 * PI, lower_closed: false, upper_closed: false });
        assert!(feasible_range::<f64>(PathType::LSL, 2, t, Kappa::TwoPi).is_err());
        assert!(feasible_range::<f64>(PathType::RSR, 0, t, Kappa::FourPi).is_err());
        assert!(feasible_range::<f64>(PathType::LSR, 0, t, Kappa::FourPi).is_err());
    }

    #[test]
    fn straight_line() {
        let s = solve_one(PathType::LSL, 0, &P::new(5.0, 0.0, 0.0), &C::zero(), &unit(), Kappa::TwoPi)
            .unwrap()
            .unwrap();
        assert_eq!((s.alpha, s.beta, s.gamma, s.time), (0.0, 5.0, 0.0, 5.0));
    }

    #[test]
    fn degenerate_goal_at_start() {
        let s = plan(&P::origin(), &P::origin(), &C::new(0.4, 2.0), &unit(), PlanMode::FourPi)
            .unwrap()
            .unwrap();
        assert_eq!((s.path_type, s.k, s.time), (PathType::LSL, 0, 0.0));
    }

    #[test]
    fn input_validation() {
        let g = P::new(1.0, 1.0, 0.5);
        assert!(plan(&P::origin(), &g, &C::new(1.0, 0.0), &unit(), PlanMode::FourPi).is_err());
        let bad = PoseT { x: 1.0, y: 0.0, theta: 7.0 };
        assert_eq!(
            solve_one(PathType::LSL, 0, &bad, &C::zero(), &unit(), Kappa::TwoPi),
            Err(Error::HeadingOutOfRange)
        );
    }

    #[test]
    fn speed_scaling() {
        // doubling v and v_w halves the time and keeps the geometry
        let g = P::new(-2.3, 2.8, PI / 2.0);
        let a = plan(&P::origin(), &g, &C::new(0.5, PI), &unit(), PlanMode::FourPi).unwrap().unwrap();
        let v2 = VehicleSpecT::new(2.0, 1.0).unwrap();
        let b = plan(&P::origin(), &g, &C::new(1.0, PI), &v2, PlanMode::FourPi).unwrap().unwrap();
        assert!((a.time - 2.0 * b.time).abs() < 1e-12);
        assert!((a.beta - b.beta).abs() < 1e-12 && a.k == b.k);
    }

    #[test]
    fn generic_f32_matches_f64() {
        let g = PoseT::<f32>::new(-2.3, 2.8, std::f32::consts::FRAC_PI_2);
        let s = plan(&PoseT::origin(), &g, &CurrentStateT::new(0.5, std::f32::consts::PI), &VehicleSpecT::unit(), PlanMode::FourPi)
            .unwrap()
            .unwrap();
        assert_eq!(s.path_type, PathType::LSL);
        assert!((s.time - 10.5123).abs() < 1e-3);
    }
}
