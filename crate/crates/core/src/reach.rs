//! Reachable regions of 2π-arc LSL/RSR paths.
//!
//! Currents here are expressed as a fraction of the vehicle speed.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{circular_distance, wrap_2pi, Kappa};
use crate::error::{Error, Result};
use crate::model::{CurrentStateT, PoseT, VehicleSpecT};
use crate::planner::{feasible_range, plan, PathType, PlanMode};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionDescriptorT<S> {
    pub path_type: PathType,
    pub k: i32,
    pub center: (S, S),
    pub omega_start: S,
    pub omega_end: S,
    pub sweep: Sweep,
    pub covers_full_circle: bool,
    /// Swept angle from `omega_start` to `omega_end` along `sweep`.
    pub extent: S,
    pub start_closed: bool,
    pub end_closed: bool,
}

fn lsl_like(path_type: PathType) -> Result<bool> {
    match path_type {
        PathType::LSL => Ok(true),
        PathType::RSR => Ok(false),
        other => Err(Error::InvalidArgument(format!("no reachable region for {other}"))),
    }
}

pub fn center<S: Scalar>(path_type: PathType, k: i32, theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<(S, S)> {
    let (wx, wy) = current.components();
    let c = S::c(k as f64) * S::TAU() + theta_f;
    let p = r * theta_f.sin() + wx * r * c;
    let q = r * (S::one() - theta_f.cos()) + wy * r * c;
    Ok(if lsl_like(path_type)? { (p, q) } else { (-p, -q) })
}

/// Direction of the reachability ray for arc angle `alpha`.
pub fn omega<S: Scalar>(path_type: PathType, alpha: S, current: &CurrentStateT<S>) -> Result<S> {
    let (wx, wy) = current.components();
    let (s, c) = alpha.sin_cos();
    let a = if lsl_like(path_type)? { (s + wy).atan2(c + wx) } else { (wy - s).atan2(c + wx) };
    Ok(wrap_2pi(a))
}

pub fn opposite<S: Scalar>(delta: S) -> S {
    wrap_2pi(delta + S::PI())
}

pub fn region_span<S: Scalar>(
    path_type: PathType,
    k: i32,
    theta_f: S,
    current: &CurrentStateT<S>,
    r: S,
    kappa: Kappa,
) -> Result<RegionDescriptorT<S>> {
    let lsl = lsl_like(path_type)?;
    let iv = feasible_range(path_type, k, theta_f, kappa)?;
    let os = omega(path_type, iv.lower, current)?;
    let oe = omega(path_type, iv.upper, current)?;
    let full = iv.width() >= S::TAU();
    let extent = if full {
        S::TAU()
    } else if lsl {
        wrap_2pi(oe - os)
    } else {
        wrap_2pi(os - oe)
    };
    Ok(RegionDescriptorT {
        path_type,
        k,
        center: center(path_type, k, theta_f, current, r)?,
        omega_start: os,
        omega_end: oe,
        sweep: if lsl { Sweep::Ccw } else { Sweep::Cw },
        covers_full_circle: full,
        extent,
        start_closed: iv.lower_closed,
        end_closed: iv.upper_closed,
    })
}

impl<S: Scalar> RegionDescriptorT<S> {
    /// Start of the swept arc when read counter-clockwise.
    pub fn ccw_start(&self) -> S {
        match self.sweep {
            Sweep::Ccw => self.omega_start,
            Sweep::Cw => self.omega_end,
        }
    }
}

pub fn contains<S: Scalar>(region: &RegionDescriptorT<S>, point: (S, S)) -> bool {
    if region.covers_full_circle {
        return true;
    }
    let dx = point.0 - region.center.0;
    let dy = point.1 - region.center.1;
    if dx == S::zero() && dy == S::zero() {
        return true;
    }
    let slack = S::angle_slack();
    let psi = wrap_2pi(dy.atan2(dx));
    let mut off = match region.sweep {
        Sweep::Ccw => wrap_2pi(psi - region.omega_start),
        Sweep::Cw => wrap_2pi(region.omega_start - psi),
    };
    if off > S::TAU() - slack {
        off = off - S::TAU();
    }
    let lo = if region.start_closed { off >= -slack } else { off > slack };
    let hi = if region.end_closed { off <= region.extent + slack } else { off < region.extent - slack };
    lo && hi
}

/// The four 2π-arc regions `LSL k=0,1` and `RSR k=−1,−2`.
pub fn regions_2pi<S: Scalar>(theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<[RegionDescriptorT<S>; 4]> {
    Ok([
        region_span(PathType::LSL, 0, theta_f, current, r, Kappa::TwoPi)?,
        region_span(PathType::LSL, 1, theta_f, current, r, Kappa::TwoPi)?,
        region_span(PathType::RSR, -1, theta_f, current, r, Kappa::TwoPi)?,
        region_span(PathType::RSR, -2, theta_f, current, r, Kappa::TwoPi)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaraMira {
    pub mara_k: i32,
    pub mira_k: i32,
}

/// Larger (MaRA) and smaller (MiRA) region of a path type.
///
/// LSL compares the swept extents, a tie going to `k = 0`. RSR is paired with
/// LSL: an LSL MaRA at `k = 0` means an RSR MaRA at `k = −2`.
pub fn classify_mara_mira<S: Scalar>(path_type: PathType, theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<MaraMira> {
    let e0 = region_span(PathType::LSL, 0, theta_f, current, r, Kappa::TwoPi)?.extent;
    let e1 = region_span(PathType::LSL, 1, theta_f, current, r, Kappa::TwoPi)?.extent;
    let lsl0 = e0 >= e1 - S::c(1e-12);
    Ok(match (lsl_like(path_type)?, lsl0) {
        (true, true) => MaraMira { mara_k: 0, mira_k: 1 },
        (true, false) => MaraMira { mara_k: 1, mira_k: 0 },
        (false, true) => MaraMira { mara_k: -2, mira_k: -1 },
        (false, false) => MaraMira { mara_k: -1, mira_k: -2 },
    })
}

/// Rows of the full-reachability table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableCase {
    #[serde(rename = "1.1")]
    C11,
    #[serde(rename = "1.2")]
    C12,
    #[serde(rename = "2.1")]
    C21,
    #[serde(rename = "2.2")]
    C22,
    #[serde(rename = "3.1")]
    C31,
    #[serde(rename = "3.2")]
    C32,
    #[serde(rename = "4.1")]
    C41,
    #[serde(rename = "4.2")]
    C42,
}

impl TableCase {
    pub const ALL: [TableCase; 8] = [
        TableCase::C11,
        TableCase::C12,
        TableCase::C21,
        TableCase::C22,
        TableCase::C31,
        TableCase::C32,
        TableCase::C41,
        TableCase::C42,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TableCase::C11 => "1.1",
            TableCase::C12 => "1.2",
            TableCase::C21 => "2.1",
            TableCase::C22 => "2.2",
            TableCase::C31 => "3.1",
            TableCase::C32 => "3.2",
            TableCase::C41 => "4.1",
            TableCase::C42 => "4.2",
        }
    }

    /// The MaRA whose shadow the row tests.
    fn mara(self) -> (PathType, i32) {
        match self {
            TableCase::C11 | TableCase::C31 => (PathType::LSL, 0),
            TableCase::C12 | TableCase::C32 => (PathType::LSL, 1),
            TableCase::C21 | TableCase::C41 => (PathType::RSR, -1),
            TableCase::C22 | TableCase::C42 => (PathType::RSR, -2),
        }
    }
}

impl std::fmt::Display for TableCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Direction of the segment joining the MaRA center to the MiRA center.
pub fn phi<S: Scalar>(case: TableCase, theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<S> {
    let (wx, wy) = current.components();
    let a = match case {
        TableCase::C11 | TableCase::C21 | TableCase::C12 | TableCase::C22 => {
            if current.v_w == S::zero() {
                return Err(Error::DegenerateCurrent);
            }
            if matches!(case, TableCase::C11 | TableCase::C21) {
                wy.atan2(wx)
            } else {
                (-wy).atan2(-wx)
            }
        }
        _ => {
            let m = S::PI() - theta_f;
            let y = r * (theta_f.cos() - S::one()) + wy * r * m;
            let x = -r * theta_f.sin() + wx * r * m;
            if matches!(case, TableCase::C31 | TableCase::C32) {
                y.atan2(x)
            } else {
                (-y).atan2(-x)
            }
        }
    };
    Ok(wrap_2pi(a))
}

/// `φ` inside the counter-clockwise arc from `a` to `b` (both ends included).
fn in_ccw<S: Scalar>(phi: S, a: S, b: S) -> bool {
    if a < b {
        a <= phi && phi <= b
    } else {
        phi >= a || phi <= b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReachability {
    pub satisfied_cases: Vec<TableCase>,
    pub fully_reachable: bool,
    /// Set when the current is zero and the table does not apply.
    pub degenerate: bool,
}

/// Whether a single table row holds.
pub fn case_holds<S: Scalar>(case: TableCase, theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<bool> {
    let (pt, k) = case.mara();
    let iv = feasible_range(pt, k, theta_f, Kappa::TwoPi)?;
    let o_inf = opposite(omega(pt, iv.lower, current)?);
    let o_sup = opposite(omega(pt, iv.upper, current)?);
    let f = phi(case, theta_f, current, r)?;
    Ok(match pt {
        PathType::LSL => in_ccw(f, o_sup, o_inf),
        _ => in_ccw(f, o_inf, o_sup),
    })
}

/// The four rows that apply under the current MaRA classification.
pub fn applicable_cases<S: Scalar>(theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<[TableCase; 4]> {
    let l = classify_mara_mira(PathType::LSL, theta_f, current, r)?;
    let rr = classify_mara_mira(PathType::RSR, theta_f, current, r)?;
    let l0 = l.mara_k == 0;
    let r1 = rr.mara_k == -1;
    Ok([
        if l0 { TableCase::C11 } else { TableCase::C12 },
        if r1 { TableCase::C21 } else { TableCase::C22 },
        if l0 { TableCase::C31 } else { TableCase::C32 },
        if r1 { TableCase::C41 } else { TableCase::C42 },
    ])
}

pub fn full_reachability_2pi<S: Scalar>(theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<FullReachability> {
    if current.v_w == S::zero() {
        return Ok(FullReachability { satisfied_cases: vec![], fully_reachable: true, degenerate: true });
    }
    if !(current.v_w < S::one()) {
        return Err(Error::CurrentTooStrong { v_w: current.v_w.f64(), v: 1.0 });
    }
    let mut satisfied = Vec::new();
    for case in applicable_cases(theta_f, current, r)? {
        if case_holds(case, theta_f, current, r)? {
            satisfied.push(case);
        }
    }
    satisfied.sort();
    let fully_reachable = !satisfied.is_empty();
    Ok(FullReachability { satisfied_cases: satisfied, fully_reachable, degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaraContainment {
    pub lsl_covers_rsr: bool,
    pub rsr_covers_lsl: bool,
}

/// Whether the wedge with apex `outer` and ccw arc `[start, start+ext]`
/// contains the same-shaped wedge with apex `inner`.
fn wedge_contains<S: Scalar>(outer: (S, S), inner: (S, S), start: S, ext: S) -> bool {
    if ext >= S::TAU() {
        return true;
    }
    let dx = inner.0 - outer.0;
    let dy = inner.1 - outer.1;
    if dx == S::zero() && dy == S::zero() {
        return true;
    }
    if ext <= S::PI() {
        wrap_2pi(dy.atan2(dx) - start) <= ext
    } else {
        let back = wrap_2pi((-dy).atan2(-dx));
        wrap_2pi(back - (start + ext)) <= S::TAU() - ext
    }
}

/// Which MaRA covers the other. When both would (identical regions) LSL is
/// reported.
pub fn mara_containment<S: Scalar>(theta_f: S, current: &CurrentStateT<S>, r: S) -> Result<MaraContainment> {
    let lm = classify_mara_mira(PathType::LSL, theta_f, current, r)?.mara_k;
    let rm = classify_mara_mira(PathType::RSR, theta_f, current, r)?.mara_k;
    let l = region_span(PathType::LSL, lm, theta_f, current, r, Kappa::TwoPi)?;
    let rr = region_span(PathType::RSR, rm, theta_f, current, r, Kappa::TwoPi)?;
    let a = wedge_contains(l.center, rr.center, l.ccw_start(), l.extent);
    let b = wedge_contains(rr.center, l.center, rr.ccw_start(), rr.extent);
    Ok(MaraContainment { lsl_covers_rsr: a, rsr_covers_lsl: b && !a })
}

/// Agreement between two directions, for tests.
pub fn same_direction<S: Scalar>(a: S, b: S, tol: S) -> bool {
    circular_distance(a, b) <= tol
}

// ---------------------------------------------------------------------------
// grids

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn square(half: f64) -> Self {
        Bounds { x_min: -half, x_max: half, y_min: -half, y_max: half }
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
        if !(step > 0.0) || !(hi >= lo) {
            return Err(Error::InvalidArgument("grid step must be positive and bounds ordered".into()));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| lo + i as f64 * step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dominant {
    LSL,
    RSR,
    Unreachable,
}

impl Dominant {
    pub fn name(self) -> &'static str {
        match self {
            Dominant::LSL => "LSL",
            Dominant::RSR => "RSR",
            Dominant::Unreachable => "unreachable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachCell {
    pub x_f: f64,
    pub y_f: f64,
    pub dominant: Dominant,
    pub time: Option<f64>,
}

/// Per-cell planning over a grid, rows of constant `y` in increasing order.
pub fn reachability_map(
    theta_f: f64,
    current: &CurrentStateT<f64>,
    vehicle: &VehicleSpecT<f64>,
    bounds: &Bounds,
    step: f64,
    mode: PlanMode,
) -> Result<Vec<ReachCell>> {
    current.check_against(vehicle)?;
    let xs = Bounds::axis(bounds.x_min, bounds.x_max, step)?;
    let ys = Bounds::axis(bounds.y_min, bounds.y_max, step)?;
    let theta_f = wrap_2pi(theta_f);
    ys.par_iter()
        .flat_map_iter(|&y| {
            xs.iter().map(move |&x| {
                let goal = PoseT::new(x, y, theta_f);
                let sol = plan(&PoseT::origin(), &goal, current, vehicle, mode)?;
                Ok(match sol {
                    Some(s) => ReachCell {
                        x_f: x,
                        y_f: y,
                        dominant: if s.path_type == PathType::LSL { Dominant::LSL } else { Dominant::RSR },
                        time: Some(s.time),
                    },
                    None => ReachCell { x_f: x, y_f: y, dominant: Dominant::Unreachable, time: None },
                })
            })
        })
        .collect()
}

/// Travel time of the dominant path per cell.
pub fn cost_map(
    theta_f: f64,
    current: &CurrentStateT<f64>,
    vehicle: &VehicleSpecT<f64>,
    bounds: &Bounds,
    step: f64,
    mode: PlanMode,
) -> Result<Vec<(f64, f64, Option<f64>)>> {
    Ok(reachability_map(theta_f, current, vehicle, bounds, step, mode)?
        .into_iter()
        .map(|c| (c.x_f, c.y_f, c.time))
        .collect())
}

pub fn write_reach_csv<W: Write>(cells: &[ReachCell], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "y", "dominant", "T"])?;
    for c in cells {
        wr.write_record([
            c.x_f.to_string(),
            c.y_f.to_string(),
            c.dominant.name().to_string(),
            c.time.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_cost_csv<W: Write>(cells: &[(f64, f64, Option<f64>)], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "y", "T"])?;
    for (x, y, t) in cells {
        wr.write_record([x.to_string(), y.to_string(), t.map(|t| t.to_string()).unwrap_or_default()])?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta_f: f64,
    pub theta_w: f64,
    pub v_w: f64,
    pub reachable: bool,
}

/// Evaluates the full-reachability predicate on a `(θ_f, θ_w)` grid for each
/// normalized current speed.
pub fn parametric_scan(theta_f_step: f64, theta_w_step: f64, v_w_values: &[f64]) -> Result<Vec<ScanRow>> {
    if !(theta_f_step > 0.0 && theta_w_step > 0.0) {
        return Err(Error::InvalidArgument("scan steps must be positive".into()));
    }
    if v_w_values.iter().any(|v| !(*v >= 0.0 && *v < 1.0)) {
        return Err(Error::InvalidArgument("normalized current speeds must lie in [0, 1)".into()));
    }
    let tau = std::f64::consts::TAU;
    let nf = (tau / theta_f_step - 1e-9).ceil() as usize;
    let nw = (tau / theta_w_step - 1e-9).ceil() as usize;
    let mut jobs = Vec::with_capacity(v_w_values.len() * nf * nw);
    for &v in v_w_values {
        for i in 0..nf {
            for j in 0..nw {
                jobs.push((i as f64 * theta_f_step, j as f64 * theta_w_step, v));
            }
        }
    }
    jobs.par_iter()
        .map(|&(tf, tw, v)| {
            let fr = full_reachability_2pi(tf, &CurrentStateT::new(v, tw), 1.0)?;
            Ok(ScanRow { theta_f: tf, theta_w: tw, v_w: v, reachable: fr.fully_reachable })
        })
        .collect()
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["theta_f", "theta_w", "v_w", "reachable"])?;
    for r in rows {
        wr.write_record([r.theta_f.to_string(), r.theta_w.to_string(), r.v_w.to_string(), r.reachable.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}
