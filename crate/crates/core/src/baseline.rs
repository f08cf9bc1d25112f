//! Six-type minimum-time baseline.
//!
//! LSL and RSR come from the closed-form 2π planner. LSR, RSL, LRL and RLR are
//! found numerically: in the current frame the vehicle flies an ordinary
//! three-segment path while the goal drifts at `−w`, and the unknowns are
//! solved with multi-start damped Newton.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::{wrap_2pi, Kappa};
use crate::error::Result;
use crate::model::{to_start_frame, CurrentStateT, PoseT, VehicleSpecT};
use crate::planner::{plan, PathSolutionT, PathType, PlanMode};
use crate::{CurrentState, PathSolution, Pose, VehicleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_initial_guesses: usize,
    pub residual_tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { n_initial_guesses: 100, residual_tolerance: 1e-10, max_iterations: 60, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayModel {
    /// Mean compute time, used to predict the post-drift pose.
    pub mean: f64,
    /// Relative standard deviation of the realized delay.
    #[serde(default)]
    pub jitter: f64,
    /// Fixed realized delay, overriding the random draw.
    #[serde(default)]
    pub realized: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    pub baseline: DelayModel,
    pub analytic: DelayModel,
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel {
            baseline: DelayModel { mean: 8.72, jitter: 0.1, realized: None },
            analytic: DelayModel { mean: 6.4e-4, jitter: 0.0, realized: None },
        }
    }
}

impl LatencyModel {
    pub fn validate(&self) -> Result<()> {
        for d in [self.baseline, self.analytic] {
            let ok = d.mean >= 0.0 && d.jitter >= 0.0 && d.realized.map_or(true, |r| r >= 0.0);
            if !ok {
                return Err(crate::Error::InvalidArgument("delays must be non-negative".into()));
            }
        }
        Ok(())
    }
}

fn is_ccc(pt: PathType) -> bool {
    matches!(pt, PathType::LRL | PathType::RLR)
}

/// Final arc angle that closes the heading to `theta_f`.
fn closing_arc(pt: PathType, alpha: f64, mid: f64, theta_f: f64) -> f64 {
    let [s0, s1, s2] = pt.signs();
    let turned = s0 as f64 * alpha + if is_ccc(pt) { s1 as f64 * mid } else { 0.0 };
    wrap_2pi((theta_f - turned) * s2 as f64)
}

/// Segments `(α, middle, γ)` implied by the unknowns; the middle entry is a
/// length for CSC types and an angle for CCC types.
fn segments(pt: PathType, x: &[f64], theta_f: f64, vehicle: &VehicleSpec) -> (f64, f64, f64) {
    let r = vehicle.turning_radius;
    match pt {
        PathType::LRL | PathType::RLR => {
            let (alpha, mid) = (x[0], x[1]);
            (alpha, mid, closing_arc(pt, alpha, mid, theta_f))
        }
        _ => {
            let alpha = x[0];
            let t = x[1];
            let gamma = closing_arc(pt, alpha, 0.0, theta_f);
            (alpha, vehicle.speed * t - r * (alpha + gamma), gamma)
        }
    }
}

/// Current-frame endpoint `(x, y)` of a three-segment path from the origin.
fn cf_end(pt: PathType, seg: (f64, f64, f64), vehicle: &VehicleSpec) -> (f64, f64) {
    let r = vehicle.turning_radius;
    let [s0, s1, s2] = pt.signs().map(|s| s as f64);
    // first arc from heading 0
    let th1 = s0 * seg.0;
    let (sn1, cs1) = th1.sin_cos();
    let mut x = s0 * r * sn1;
    let mut y = s0 * r * (1.0 - cs1);
    let (th2, sn2, cs2) = if is_ccc(pt) {
        let th2 = th1 + s1 * seg.1;
        let (sn2, cs2) = th2.sin_cos();
        x += s1 * r * (sn2 - sn1);
        y -= s1 * r * (cs2 - cs1);
        (th2, sn2, cs2)
    } else {
        x += seg.1 * cs1;
        y += seg.1 * sn1;
        (th1, sn1, cs1)
    };
    let (sn3, cs3) = (th2 + s2 * seg.2).sin_cos();
    x += s2 * r * (sn3 - sn2);
    y -= s2 * r * (cs3 - cs2);
    (x, y)
}

fn residual_raw(pt: PathType, x: &[f64], goal: &Pose, current: &CurrentState, vehicle: &VehicleSpec) -> [f64; 3] {
    let t = *x.last().unwrap_or(&0.0);
    let seg = segments(pt, x, goal.theta, vehicle);
    let end = cf_end(pt, seg, vehicle);
    let (wx, wy) = current.components();
    let len = vehicle.turning_radius * (seg.0 + seg.1 + seg.2) - vehicle.speed * t;
    [end.0 - (goal.x - wx * t), end.1 - (goal.y - wy * t), len]
}

/// Boundary residual for one of the four numerically solved types. `goal` is
/// in the start frame. Unknowns are `(α, T)` for LSR/RSL and `(α, middle arc,
/// T)` for LRL/RLR.
pub fn residual(pt: PathType, x: &[f64], goal: &Pose, current: &CurrentState, vehicle: &VehicleSpec) -> Vec<f64> {
    let r = residual_raw(pt, x, goal, current, vehicle);
    if is_ccc(pt) {
        r.to_vec()
    } else {
        r[..2].to_vec()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Solves the small dense system `a x = b` by Gaussian elimination.
fn solve_linear<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for c in col..N {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Shifted Halton points in `bounds`, deterministic in `seed`.
pub fn start_points<const N: usize>(bounds: &[(f64, f64); N], n: usize, seed: u64) -> Vec<[f64; N]> {
    const BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; N] = std::array::from_fn(|_| rng.random::<f64>());
    (1..=n as u64)
        .map(|i| {
            std::array::from_fn(|d| {
                let (lo, hi) = bounds[d];
                let u = (radical_inverse(i, BASES[d % BASES.len()]) + shift[d]).fract();
                lo + u * (hi - lo)
            })
        })
        .collect()
}

/// Multi-start damped Newton. `project` maps iterates back into the domain.
/// Returns deduplicated roots in the order found.
pub fn multi_start_solve<const N: usize, F, P>(f: F, project: P, bounds: &[(f64, f64); N], cfg: &SolverConfig) -> Vec<[f64; N]>
where
    F: Fn(&[f64; N]) -> [f64; N],
    P: Fn(&mut [f64; N]),
{
    let mut roots: Vec<[f64; N]> = Vec::new();
    for x0 in start_points(bounds, cfg.n_initial_guesses.max(1), cfg.seed) {
        if let Some(x) = newton(&f, &project, x0, cfg) {
            let dup = roots.iter().any(|r| norm(&std::array::from_fn::<f64, N, _>(|i| r[i] - x[i])) <= 1e-6);
            if !dup {
                roots.push(x);
            }
        }
    }
    roots
}

fn newton<const N: usize, F, P>(f: &F, project: &P, mut x: [f64; N], cfg: &SolverConfig) -> Option<[f64; N]>
where
    F: Fn(&[f64; N]) -> [f64; N],
    P: Fn(&mut [f64; N]),
{
    let mut fx = f(&x);
    let mut fn0 = norm(&fx);
    let start_norm = fn0;
    for it in 0..cfg.max_iterations {
        if fn0 <= cfg.residual_tolerance {
            return Some(x);
        }
        // iterates that have not come close by now are wandering
        if it == 12 && fn0 > 1e-2 * start_norm.max(1.0) {
            return None;
        }
        let mut jac = [[0.0; N]; N];
        for j in 0..N {
            let h = 1e-7 * (1.0 + x[j].abs());
            let mut xp = x;
            xp[j] += h;
            let mut xm = x;
            xm[j] -= h;
            let (fp, fm) = (f(&xp), f(&xm));
            for i in 0..N {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let dx = solve_linear(jac, fx.map(|v| -v))?;
        let mut lambda = 1.0;
        loop {
            let mut xn: [f64; N] = std::array::from_fn(|i| x[i] + lambda * dx[i]);
            project(&mut xn);
            let fxn = f(&xn);
            let fnn = norm(&fxn);
            if fnn.is_finite() && fnn < fn0 {
                x = xn;
                fx = fxn;
                fn0 = fnn;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return None;
            }
        }
    }
    let _ = fx;
    (fn0 <= cfg.residual_tolerance).then_some(x)
}

/// Upper bound on the travel time used to seed the search.
pub fn time_bound(goal: &Pose, current: &CurrentState, vehicle: &VehicleSpec) -> f64 {
    let d = goal.x.hypot(goal.y);
    (d + 4.0 * std::f64::consts::PI * vehicle.turning_radius) / (vehicle.speed - current.v_w)
}

fn type_seed(seed: u64, pt: PathType) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (pt as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn residual_csc(pt: PathType, x: &[f64; 2], goal: &Pose, current: &CurrentState, vehicle: &VehicleSpec) -> [f64; 2] {
    let r = residual_raw(pt, x, goal, current, vehicle);
    [r[0], r[1]]
}

fn residual_ccc(pt: PathType, x: &[f64; 3], goal: &Pose, current: &CurrentState, vehicle: &VehicleSpec) -> [f64; 3] {
    residual_raw(pt, x, goal, current, vehicle)
}

/// All valid roots of one numerically solved type, as path solutions.
/// `goal` and `current` are in the start frame.
pub fn solve_type(
    pt: PathType,
    goal: &Pose,
    current: &CurrentState,
    vehicle: &VehicleSpec,
    cfg: &SolverConfig,
) -> Vec<PathSolution> {
    let tmax = time_bound(goal, current, vehicle);
    let tau = std::f64::consts::TAU;
    let scale = goal.x.hypot(goal.y).max(1.0);
    let local = SolverConfig { residual_tolerance: cfg.residual_tolerance * scale, seed: type_seed(cfg.seed, pt), ..*cfg };
    let ccc = is_ccc(pt);
    let roots: Vec<Vec<f64>> = if ccc {
        multi_start_solve(
            |x| residual_ccc(pt, x, goal, current, vehicle),
            |x| {
                x[0] = wrap_2pi(x[0]);
                x[1] = wrap_2pi(x[1]);
                x[2] = x[2].max(0.0);
            },
            &[(0.0, tau), (0.0, tau), (0.0, tmax)],
            &local,
        )
        .into_iter()
        .map(|x| x.to_vec())
        .collect()
    } else {
        multi_start_solve(
            |x| residual_csc(pt, x, goal, current, vehicle),
            |x| {
                x[0] = wrap_2pi(x[0]);
                x[1] = x[1].max(0.0);
            },
            &[(0.0, tau), (0.0, tmax)],
            &local,
        )
        .into_iter()
        .map(|x| x.to_vec())
        .collect()
    };
    let r = vehicle.turning_radius;
    let mut out = Vec::new();
    for x in roots {
        let (alpha, mid, gamma) = segments(pt, &x, goal.theta, vehicle);
        let time = *x.last().unwrap();
        let ok_mid = if ccc { (0.0..tau).contains(&mid) } else { mid >= -1e-9 * scale };
        if !ok_mid || time < 0.0 {
            continue;
        }
        let beta = if ccc { mid } else { mid.max(0.0) };
        let time = if ccc { r * (alpha + mid + gamma) / vehicle.speed } else { time };
        out.push(PathSolutionT { path_type: pt, k: 0, alpha, beta, gamma, kappa: Kappa::TwoPi, time });
    }
    out
}

/// Minimum-time path over all six types, with the wall-clock solve time.
pub fn solve_six(
    start: &Pose,
    goal: &Pose,
    current: &CurrentState,
    vehicle: &VehicleSpec,
    cfg: &SolverConfig,
) -> Result<Option<(PathSolution, f64)>> {
    let t0 = Instant::now();
    vehicle.validate()?;
    current.check_against(vehicle)?;
    let mut best = plan(start, goal, current, vehicle, PlanMode::TwoPi)?;
    let (g, w) = to_start_frame(start, goal, current);
    for pt in [PathType::LSR, PathType::RSL, PathType::LRL, PathType::RLR] {
        for s in solve_type(pt, &g, &w, vehicle, cfg) {
            if best.map_or(true, |b| s.time < b.time) {
                best = Some(s);
            }
        }
    }
    Ok(best.map(|b| (b, t0.elapsed().as_secs_f64())))
}

/// Predicted pose after drifting straight for `dt` at the current heading.
pub fn drift_predict(pose: &Pose, heading: f64, current: &CurrentStateT<f64>, dt: f64, vehicle: &VehicleSpecT<f64>) -> Pose {
    let (wx, wy) = current.components();
    PoseT {
        x: pose.x + dt * (vehicle.speed * heading.cos() + wx),
        y: pose.y + dt * (vehicle.speed * heading.sin() + wy),
        theta: pose.theta,
    }
}
