//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use fourpi::model::{CurrentScheduleT, CurrentStateT, PoseT, VehicleSpecT};
use fourpi::planner::PathType;
use fourpi::trajectory::{controls_of, integrate_if};
use fourpi::{CurrentState, PathSolution, Pose, VehicleSpec};

pub fn m2pi(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub fn cur(v_w: f64, theta_w: f64) -> CurrentState {
    CurrentStateT::new(v_w, theta_w)
}

pub fn pose(x: f64, y: f64, t: f64) -> Pose {
    PoseT::new(x, y, t)
}

pub fn unit() -> VehicleSpec {
    VehicleSpecT::unit()
}

/// Classical no-wind Dubins segment parameters `(t, p, q)` for one type, in
/// units of the turning radius, from the origin with heading 0.
pub fn classical(pt: PathType, goal: (f64, f64, f64), r: f64) -> Option<(f64, f64, f64)> {
    let (dx, dy) = (goal.0, goal.1);
    let dd = dx.hypot(dy);
    let d = dd / r;
    let th = if dd > 0.0 { m2pi(dy.atan2(dx)) } else { 0.0 };
    let a = m2pi(-th);
    let b = m2pi(goal.2 - th);
    let (sa, sb, ca, cb) = (a.sin(), b.sin(), a.cos(), b.cos());
    let cab = (a - b).cos();
    match pt {
        PathType::LSL => {
            let tmp = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb);
            (tmp >= 0.0).then(|| {
                let t0 = (cb - ca).atan2(d + sa - sb);
                (m2pi(-a + t0), tmp.sqrt(), m2pi(b - t0))
            })
        }
        PathType::RSR => {
            let tmp = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa);
            (tmp >= 0.0).then(|| {
                let t0 = (ca - cb).atan2(d - sa + sb);
                (m2pi(a - t0), tmp.sqrt(), m2pi(-b + t0))
            })
        }
        PathType::LSR => {
            let tmp = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb);
            (tmp >= 0.0).then(|| {
                let p = tmp.sqrt();
                let t0 = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
                (m2pi(-a + t0), p, m2pi(-m2pi(b) + t0))
            })
        }
        PathType::RSL => {
            let tmp = d * d - 2.0 + 2.0 * cab - 2.0 * d * (sa + sb);
            (tmp >= 0.0).then(|| {
                let p = tmp.sqrt();
                let t0 = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
                (m2pi(a - t0), p, m2pi(b - t0))
            })
        }
        PathType::RLR => {
            let tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0;
            (tmp.abs() <= 1.0).then(|| {
                let p = m2pi(TAU - tmp.acos());
                let t0 = m2pi(a - (ca - cb).atan2(d - sa + sb) + p / 2.0);
                (t0, p, m2pi(a - b - t0 + p))
            })
        }
        PathType::LRL => {
            let tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0;
            (tmp.abs() <= 1.0).then(|| {
                let p = m2pi(TAU - tmp.acos());
                let t0 = m2pi(-a - (ca - cb).atan2(d + sa - sb) + p / 2.0);
                (t0, p, m2pi(m2pi(b) - a - t0 + p))
            })
        }
    }
}

/// Shortest classical Dubins length over all six types.
pub fn classical_shortest(goal: (f64, f64, f64), r: f64) -> f64 {
    PathType::ALL
        .iter()
        .filter_map(|&pt| classical(pt, goal, r).map(|(t, p, q)| r * (t + p + q)))
        .fold(f64::INFINITY, f64::min)
}

/// Earliest interception time of the drifting goal by one path type: the
/// first sign change of `len(G(T)) − vT`, refined by bisection.
pub fn moving_time(pt: PathType, goal: &Pose, w: &CurrentState, veh: &VehicleSpec, n: usize) -> Option<f64> {
    let (wx, wy) = w.components();
    let r = veh.turning_radius;
    let tmax = 1.5 * (goal.x.hypot(goal.y) + 4.0 * PI * r) / (veh.speed - w.v_w);
    let f = |t: f64| {
        classical(pt, (goal.x - wx * t, goal.y - wy * t, goal.theta), r).map(|(a, p, q)| r * (a + p + q) - veh.speed * t)
    };
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let t = tmax * i as f64 / n as f64;
        let val = f(t);
        if let (Some(v), Some((pt_, pv))) = (val, prev) {
            // a genuine crossing; wrap jumps of 2πr are skipped
            if (v == 0.0 || (pv < 0.0) != (v < 0.0)) && (v - pv).abs() < 0.5 * r {
                let (mut lo, mut hi) = (pt_, t);
                for _ in 0..100 {
                    let m = 0.5 * (lo + hi);
                    match f(m) {
                        Some(fm) if (fm < 0.0) == (pv < 0.0) => lo = m,
                        Some(_) => hi = m,
                        None => break,
                    }
                }
                return Some(0.5 * (lo + hi));
            }
        }
        prev = val.map(|v| (t, v));
    }
    None
}

/// Six-type optimum by the scan oracle.
pub fn moving_best(goal: &Pose, w: &CurrentState, veh: &VehicleSpec, n: usize) -> f64 {
    PathType::ALL
        .iter()
        .filter_map(|&pt| moving_time(pt, goal, w, veh, n))
        .fold(f64::INFINITY, f64::min)
}

/// Integrates a solution from the origin under a constant current and
/// returns the endpoint.
pub fn integrate_end(sol: &PathSolution, w: &CurrentState, veh: &VehicleSpec, h: f64) -> Pose {
    let tr = integrate_if(&PoseT::origin(), &controls_of(sol, veh), &CurrentScheduleT::constant(*w), veh, h).unwrap();
    tr.samples.last().unwrap().1
}

pub fn ang_err(a: f64, b: f64) -> f64 {
    let d = m2pi(a - b);
    d.min(TAU - d)
}

/// Bisection root of `q(β) = (1−v²)β² + 2mβ − n` on `[0, ∞)`.
pub fn beta_bisect(a: f64, b: f64, w: &CurrentState) -> f64 {
    let (wx, wy) = w.components();
    let q = |x: f64| (1.0 - w.v_w * w.v_w) * x * x + 2.0 * (a * wx + b * wy) * x - (a * a + b * b);
    let mut hi = 1.0;
    while q(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if q(m) < 0.0 {
            lo = m
        } else {
            hi = m
        }
    }
    0.5 * (lo + hi)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn vehicle(v: f64, r: f64) -> VehicleSpec {
    VehicleSpecT::new(v, r).unwrap()
}

pub fn schedule(w: CurrentState) -> CurrentScheduleT<f64> {
    CurrentScheduleT::constant(w)
}
