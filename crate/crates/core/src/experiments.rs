//! Comparison studies: static currents, compute timing and Monte-Carlo runs
//! under changing currents.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{solve_six, LatencyModel, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{CurrentStateT, PoseT, VehicleSpecT};
use crate::planner::{plan, PlanMode};
use crate::sim::{default_headings, default_periods, run_scenario, CurrentProcess, NoiseModel, PlannerKind, Scenario};
use crate::{PathType, VehicleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Naval,
    Aerial,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: ProfileName,
    pub vehicle: VehicleSpec,
    pub v_w: f64,
    pub noise: NoiseModel,
}

impl Profile {
    /// Underwater vehicle: 2.5 m/s in 2 m/s currents.
    pub fn naval() -> Self {
        Profile {
            name: ProfileName::Naval,
            vehicle: VehicleSpecT { speed: 2.5, turning_radius: 1.0 },
            v_w: 2.0,
            noise: NoiseModel {
                sigma_position: 0.3,
                sigma_heading: 0.5f64.to_radians(),
                sigma_vw_relative: 0.0075,
                sigma_thetaw: 0.67f64.to_radians(),
                sample_rate: 1.0,
            },
        }
    }

    /// Small aircraft: 10 m/s in 8 m/s wind.
    pub fn aerial() -> Self {
        Profile {
            name: ProfileName::Aerial,
            vehicle: VehicleSpecT { speed: 10.0, turning_radius: 1.0 },
            v_w: 8.0,
            noise: NoiseModel {
                sigma_position: 0.01,
                sigma_heading: 0.5f64.to_radians(),
                sigma_vw_relative: 0.0125,
                sigma_thetaw: 4f64.to_radians(),
                sample_rate: 10.0,
            },
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "naval" => Ok(Self::naval()),
            "aerial" => Ok(Self::aerial()),
            _ => Err(Error::InvalidArgument(format!("unknown profile {name:?} (expected naval or aerial)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        CurrentStateT::new(self.v_w, 0.0).check_against(&self.vehicle)
    }
}

/// Goal positions on concentric square boundaries: 16 points per square,
/// starting at `(R, 0)` and running counter-clockwise with spacing `R/2`.
pub fn square_points(radius: f64) -> Vec<(f64, f64)> {
    let step = radius / 2.0;
    let mut pts = Vec::with_capacity(16);
    for i in 0..16 {
        let s = i as f64 * step;
        // unfold the perimeter: right edge from y=0 up, top, left, bottom, right edge back to 0
        let (x, y) = if s <= radius {
            (radius, s)
        } else if s <= 3.0 * radius {
            (radius - (s - radius), radius)
        } else if s <= 5.0 * radius {
            (-radius, radius - (s - 3.0 * radius))
        } else if s <= 7.0 * radius {
            (-radius + (s - 5.0 * radius), -radius)
        } else {
            (radius, -radius + (s - 7.0 * radius))
        };
        pts.push((x, y));
    }
    pts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticInstance {
    pub radius: f64,
    pub x: f64,
    pub y: f64,
    pub theta_f: f64,
    pub theta_w: f64,
    pub t_4pi: f64,
    pub t_six: f64,
    pub type_4pi: PathType,
    pub type_six: PathType,
    /// Measured wall-clock compute times.
    pub wall_4pi: f64,
    pub wall_six: f64,
}

impl StaticInstance {
    pub fn gap(&self) -> f64 {
        self.t_4pi - self.t_six
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticSummary {
    pub instances: usize,
    /// Percent of instances, like the fields below.
    pub equal_fraction: f64,
    pub min_gap: f64,
    pub max_gap: f64,
    /// Fraction where path time plus the latency-model mean delay favors 4π.
    pub favor_4pi_simulated_latency: f64,
    /// Same with measured wall-clock compute times.
    pub favor_4pi_measured: f64,
}

pub const EQUAL_TOL: f64 = 1e-6;

/// Unit vehicle, `v_w = 0.5`, 16 goal positions per radius, six goal headings
/// and six current headings.
pub fn static_comparison(radii: &[f64], cfg: &SolverConfig) -> Result<Vec<StaticInstance>> {
    let veh = VehicleSpec::unit();
    let mut jobs = Vec::new();
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument("radii must be positive".into()));
        }
        for (x, y) in square_points(r) {
            for h in 0..6 {
                for c in 0..6 {
                    jobs.push((r, x, y, h as f64 * PI / 3.0, c as f64 * PI / 3.0));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(radius, x, y, theta_f, theta_w)| {
            let start = PoseT::origin();
            let goal = PoseT::new(x, y, theta_f);
            let cur = CurrentStateT::new(0.5, theta_w);
            let t0 = Instant::now();
            let a = plan(&start, &goal, &cur, &veh, PlanMode::FourPi)?.ok_or(Error::InvalidScenario("4π plan missing".into()))?;
            let wall_4pi = t0.elapsed().as_secs_f64();
            let (b, wall_six) =
                solve_six(&start, &goal, &cur, &veh, cfg)?.ok_or(Error::InvalidScenario("no six-type path found".into()))?;
            Ok(StaticInstance {
                radius,
                x,
                y,
                theta_f,
                theta_w,
                t_4pi: a.time,
                t_six: b.time,
                type_4pi: a.path_type,
                type_six: b.path_type,
                wall_4pi,
                wall_six,
            })
        })
        .collect()
}

pub fn summarize_static(rows: &[StaticInstance], latency: &LatencyModel) -> StaticSummary {
    let n = rows.len().max(1) as f64;
    let frac = |f: &dyn Fn(&StaticInstance) -> bool| rows.iter().filter(|r| f(r)).count() as f64 / n * 100.0;
    StaticSummary {
        instances: rows.len(),
        equal_fraction: frac(&|r| r.gap().abs() <= EQUAL_TOL),
        min_gap: rows.iter().map(|r| r.gap()).fold(f64::INFINITY, f64::min),
        max_gap: rows.iter().map(|r| r.gap()).fold(f64::NEG_INFINITY, f64::max),
        favor_4pi_simulated_latency: frac(&|r| {
            r.t_4pi + latency.analytic.mean < r.t_six + latency.baseline.mean
        }),
        favor_4pi_measured: frac(&|r| r.t_4pi + r.wall_4pi < r.t_six + r.wall_six),
    }
}

pub fn write_static_csv<W: Write>(rows: &[StaticInstance], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["radius", "x", "y", "theta_f", "theta_w", "t_4pi", "t_six", "type_4pi", "type_six", "wall_4pi", "wall_six"])?;
    for r in rows {
        out.write_record([
            r.radius.to_string(),
            r.x.to_string(),
            r.y.to_string(),
            r.theta_f.to_string(),
            r.theta_w.to_string(),
            r.t_4pi.to_string(),
            r.t_six.to_string(),
            r.type_4pi.name().to_string(),
            r.type_six.name().to_string(),
            r.wall_4pi.to_string(),
            r.wall_six.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub n_instances: usize,
    pub analytic_mean: f64,
    pub baseline_mean: f64,
    pub ratio: f64,
}

/// Random unit-vehicle instances used by the timing benchmark.
pub fn timing_instances(n: usize, seed: u64) -> Vec<(PoseT<f64>, CurrentStateT<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let g = PoseT::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(0.0..2.0 * PI));
            let c = CurrentStateT::new(rng.random_range(0.0..0.95), rng.random_range(0.0..2.0 * PI));
            (g, c)
        })
        .collect()
}

/// Mean wall-clock time per solve for the 4π planner and the six-type baseline.
/// Runs sequentially so timings are not distorted by contention.
pub fn timing_bench(n_instances: usize, seed: u64, cfg: &SolverConfig) -> Result<TimingReport> {
    if n_instances == 0 {
        return Err(Error::InvalidArgument("n_instances must be at least 1".into()));
    }
    let veh = VehicleSpec::unit();
    let inst = timing_instances(n_instances, seed);
    let start = PoseT::origin();
    let t0 = Instant::now();
    for (g, c) in &inst {
        std::hint::black_box(plan(&start, g, c, &veh, PlanMode::FourPi)?);
    }
    let analytic_mean = t0.elapsed().as_secs_f64() / n_instances as f64;
    let t0 = Instant::now();
    for (g, c) in &inst {
        std::hint::black_box(solve_six(&start, g, c, &veh, cfg)?);
    }
    let baseline_mean = t0.elapsed().as_secs_f64() / n_instances as f64;
    Ok(TimingReport { n_instances, analytic_mean, baseline_mean, ratio: baseline_mean / analytic_mean })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub goal: PoseT<f64>,
    pub analytic_converged: bool,
    pub analytic_time: f64,
    pub analytic_replans: usize,
    pub baseline_converged: bool,
    pub baseline_time: f64,
    pub baseline_replans: usize,
    /// Percent saved by the 4π planner; present when both converged.
    pub savings: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavingsStats {
    pub runs: usize,
    pub both_converged: usize,
    pub mean: f64,
    pub negative_fraction: f64,
    pub non_convergence_rate_baseline: f64,
    pub non_convergence_rate_analytic: f64,
}

pub fn savings_percent(t_dubins: f64, t_4pi: f64) -> f64 {
    (t_dubins - t_4pi) / t_dubins * 100.0
}

pub const MC_GOAL_DISTANCE: f64 = 100.0;

/// Seed of run `i`, mixed so that neighbouring runs get unrelated streams.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    let mut z = seed ^ (run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Goal of run `i`: all 36 position/heading pairs, then repeats.
pub fn mc_goal(run: usize) -> PoseT<f64> {
    let pos = (run % 36) / 6;
    let head = run % 6;
    let b = pos as f64 * PI / 3.0;
    PoseT::new(MC_GOAL_DISTANCE * b.cos(), MC_GOAL_DISTANCE * b.sin(), head as f64 * PI / 3.0)
}

pub fn mc_scenario(profile: &Profile, goal: PoseT<f64>, planner: PlannerKind) -> Scenario {
    Scenario {
        start: PoseT::origin(),
        goal,
        vehicle: profile.vehicle,
        current_process: CurrentProcess::Random {
            v_w: profile.v_w,
            initial_theta_w: Some(0.0),
            headings: default_headings(),
            periods: default_periods(),
        },
        noise: profile.noise,
        precision_radius: 1.5,
        heading_tolerance: 5f64.to_radians(),
        t_max: 1000.0,
        estimation_window: 12.0,
        latency: LatencyModel::default(),
        planner,
        step: 0.02,
        sample_interval: 1.0,
        solver: SolverConfig::default(),
        charge_initial_plan: true,
    }
}

/// Simulates both planners on the same realized current and noise streams for
/// each run.
pub fn dynamic_monte_carlo(profile: &Profile, n_runs: usize, seed: u64) -> Result<(SavingsStats, Vec<RunRecord>)> {
    profile.validate()?;
    let records: Vec<RunRecord> = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let s = run_seed(seed, i);
            let goal = mc_goal(i);
            let a = run_scenario(&mc_scenario(profile, goal, PlannerKind::Analytic4Pi), s)?;
            let b = run_scenario(&mc_scenario(profile, goal, PlannerKind::DubinsSix), s)?;
            Ok(RunRecord {
                run: i,
                seed: s,
                goal,
                analytic_converged: a.converged,
                analytic_time: a.total_time,
                analytic_replans: a.replan_count,
                baseline_converged: b.converged,
                baseline_time: b.total_time,
                baseline_replans: b.replan_count,
                savings: (a.converged && b.converged).then(|| savings_percent(b.total_time, a.total_time)),
            })
        })
        .collect::<Result<_>>()?;
    Ok((savings_stats(&records), records))
}

pub fn savings_stats(records: &[RunRecord]) -> SavingsStats {
    let n = records.len();
    let sav: Vec<f64> = records.iter().filter_map(|r| r.savings).collect();
    let pct = |c: usize, d: usize| if d == 0 { 0.0 } else { c as f64 / d as f64 * 100.0 };
    SavingsStats {
        runs: n,
        both_converged: sav.len(),
        mean: if sav.is_empty() { 0.0 } else { sav.iter().sum::<f64>() / sav.len() as f64 },
        negative_fraction: pct(sav.iter().filter(|s| **s < 0.0).count(), sav.len()),
        non_convergence_rate_baseline: pct(records.iter().filter(|r| !r.baseline_converged).count(), n),
        non_convergence_rate_analytic: pct(records.iter().filter(|r| !r.analytic_converged).count(), n),
    }
}

/// One row per run and planner: run id, seed, planner, converged, total time, savings.
pub fn write_runs_csv<W: Write>(records: &[RunRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["run", "seed", "planner", "converged", "total_time", "savings"])?;
    for r in records {
        let sav = r.savings.map(|s| s.to_string()).unwrap_or_default();
        for (name, conv, t) in [
            ("analytic_4pi", r.analytic_converged, r.analytic_time),
            ("dubins_six", r.baseline_converged, r.baseline_time),
        ] {
            out.write_record([r.run.to_string(), r.seed.to_string(), name.into(), conv.to_string(), t.to_string(), sav.clone()])?;
        }
    }
    out.flush()?;
    Ok(())
}
