//! Mission simulation under changing currents with noisy sensing, compute
//! latency and replanning.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::angle::{circular_distance, wrap_2pi};
use crate::baseline::{drift_predict, solve_six, DelayModel, LatencyModel, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{current_at, CurrentScheduleT, CurrentStateT, PoseT};
use crate::planner::{plan, PlanMode};
use crate::trajectory::{controls_of, step_exact, Frame};
use crate::{ControlSchedule, CurrentSchedule, CurrentState, Pose, SampledTrajectory, VehicleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma_position: f64,
    pub sigma_heading: f64,
    /// Standard deviation of current-speed readings as a fraction of the true speed.
    pub sigma_vw_relative: f64,
    pub sigma_thetaw: f64,
    /// Current readings per second.
    pub sample_rate: f64,
}

impl NoiseModel {
    pub fn none() -> Self {
        NoiseModel { sample_rate: 1.0, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurrentProcess {
    Explicit(CurrentSchedule),
    /// Constant speed; the heading jumps to a random member of `headings` after
    /// a random member of `periods` seconds, repeatedly.
    Random {
        v_w: f64,
        /// Drawn from `headings` when absent.
        #[serde(default)]
        initial_theta_w: Option<f64>,
        #[serde(default = "default_headings")]
        headings: Vec<f64>,
        #[serde(default = "default_periods")]
        periods: Vec<f64>,
    },
}

pub fn default_headings() -> Vec<f64> {
    (0..12).map(|m| m as f64 * std::f64::consts::PI / 6.0).collect()
}

pub fn default_periods() -> Vec<f64> {
    vec![30.0, 45.0, 60.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    #[serde(rename = "analytic_4pi")]
    Analytic4Pi,
    DubinsSix,
}

fn default_tolerance() -> f64 {
    5f64.to_radians()
}
fn default_t_max() -> f64 {
    1000.0
}
fn default_window() -> f64 {
    12.0
}
fn default_step() -> f64 {
    0.02
}
fn default_sample_interval() -> f64 {
    0.1
}
fn default_true() -> bool {
    true
}
fn default_noise() -> NoiseModel {
    NoiseModel::none()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub start: Pose,
    pub goal: Pose,
    pub vehicle: VehicleSpec,
    pub current_process: CurrentProcess,
    #[serde(default = "default_noise")]
    pub noise: NoiseModel,
    pub precision_radius: f64,
    #[serde(default = "default_tolerance")]
    pub heading_tolerance: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_window")]
    pub estimation_window: f64,
    #[serde(default)]
    pub latency: LatencyModel,
    pub planner: PlannerKind,
    /// Integration and termination-check step.
    #[serde(default = "default_step")]
    pub step: f64,
    /// Spacing of recorded trajectory samples.
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Whether the first plan costs the planner's compute delay. When it does,
    /// the vehicle drifts from the start pose while it plans.
    #[serde(default = "default_true")]
    pub charge_initial_plan: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidScenario(m.to_string()));
        self.vehicle.validate()?;
        if !self.start.is_finite() || !self.goal.is_finite() {
            return bad("poses must be finite");
        }
        if !(self.precision_radius > 0.0) {
            return bad("precision_radius must be positive");
        }
        if !(self.heading_tolerance >= 0.0) {
            return bad("heading_tolerance must be non-negative");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("t_max must be positive");
        }
        if !(self.estimation_window >= 0.0) {
            return bad("estimation_window must be non-negative");
        }
        if !(self.step > 0.0) || !(self.sample_interval > 0.0) {
            return bad("step and sample_interval must be positive");
        }
        let n = &self.noise;
        if [n.sigma_position, n.sigma_heading, n.sigma_vw_relative, n.sigma_thetaw].iter().any(|s| !(*s >= 0.0)) {
            return bad("noise deviations must be non-negative");
        }
        if !(n.sample_rate > 0.0) {
            return bad("sample_rate must be positive");
        }
        self.latency.validate().map_err(|e| Error::InvalidScenario(e.to_string()))?;
        match &self.current_process {
            CurrentProcess::Explicit(s) => {
                CurrentScheduleT::new(s.entries().to_vec())?;
                for (_, c) in s.entries() {
                    c.check_against(&self.vehicle)?;
                }
            }
            CurrentProcess::Random { v_w, headings, periods, .. } => {
                CurrentStateT::new(*v_w, 0.0).check_against(&self.vehicle)?;
                if headings.is_empty() || periods.is_empty() || periods.iter().any(|p| !(*p > 0.0)) {
                    return bad("random current needs headings and positive periods");
                }
            }
        }
        if self.solver.n_initial_guesses == 0 {
            return bad("n_initial_guesses must be at least 1");
        }
        Ok(())
    }

    /// Parses a scenario document. Keys ending in `_deg` are converted to
    /// radians under the key without the suffix.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        degrees_to_radians(&mut v)?;
        let s: Scenario = serde_json::from_value(v).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}

/// Rewrites every `"name_deg": x` entry as `"name": x·π/180`, recursively.
pub fn degrees_to_radians(v: &mut serde_json::Value) -> Result<()> {
    match v {
        serde_json::Value::Object(map) => {
            let keys: Vec<String> = map.keys().filter(|k| k.ends_with("_deg")).cloned().collect();
            for k in keys {
                let base = k.trim_end_matches("_deg").to_string();
                if map.contains_key(&base) {
                    return Err(Error::InvalidScenario(format!("both {base} and {k} given")));
                }
                let val = map.remove(&k).unwrap();
                let deg = val.as_f64().ok_or_else(|| Error::InvalidScenario(format!("{k} must be a number")))?;
                map.insert(base, serde_json::json!(deg.to_radians()));
            }
            for (_, child) in map.iter_mut() {
                degrees_to_radians(child)?;
            }
        }
        serde_json::Value::Array(items) => {
            for child in items {
                degrees_to_radians(child)?;
            }
        }
        _ => {}
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSegment {
    pub t: f64,
    pub from: Pose,
    pub to: Pose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub converged: bool,
    pub total_time: f64,
    pub replan_count: usize,
    pub drift_segments: Vec<DriftSegment>,
    pub compute_delays: Vec<f64>,
    pub final_pose: Pose,
    pub trajectory: SampledTrajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    Success,
    Continue,
}

pub fn check_termination(pose: &Pose, goal: &Pose, precision_radius: f64, heading_tolerance: f64) -> Termination {
    let inside = pose.distance_to(goal) <= precision_radius;
    let aligned = circular_distance(pose.theta, goal.theta) <= heading_tolerance;
    if inside && aligned {
        Termination::Success
    } else {
        Termination::Continue
    }
}

/// Circular mean of heading samples.
pub fn estimate_heading_mle(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let (s, c) = samples.iter().fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
    Ok(wrap_2pi(s.atan2(c)))
}

/// Realizes a random current process as an explicit schedule up to `t_max`.
pub fn realize_process(process: &CurrentProcess, t_max: f64, rng: &mut ChaCha8Rng) -> Result<CurrentSchedule> {
    match process {
        CurrentProcess::Explicit(s) => Ok(s.clone()),
        CurrentProcess::Random { v_w, initial_theta_w, headings, periods } => {
            let first = match initial_theta_w {
                Some(h) => *h,
                None => headings[rng.random_range(0..headings.len())],
            };
            let mut entries = vec![(0.0, CurrentStateT::new(*v_w, first))];
            let mut t = 0.0;
            loop {
                t += periods[rng.random_range(0..periods.len())];
                if t > t_max {
                    break;
                }
                let h = headings[rng.random_range(0..headings.len())];
                entries.push((t, CurrentStateT::new(*v_w, h)));
            }
            CurrentScheduleT::new(entries)
        }
    }
}

/// Independent random streams of one run.
struct Streams {
    position: ChaCha8Rng,
    heading: ChaCha8Rng,
    vw: ChaCha8Rng,
    thetaw: ChaCha8Rng,
    latency: ChaCha8Rng,
}

fn stream(seed: u64, channel: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(channel);
    r
}

const PROCESS_STREAM: u64 = 1;

/// Standard normal draw scaled by `sigma` (zero when `sigma` is zero).
fn gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let z: f64 = Normal::new(0.0, 1.0).unwrap().sample(rng);
    sigma * z
}

enum Phase {
    Executing,
    Estimating { since: f64, until: f64 },
    Computing { until: f64, measured: Pose, estimate: CurrentState, from: Pose, started: f64 },
}

struct Runner<'a> {
    sc: &'a Scenario,
    schedule: CurrentSchedule,
    rng: Streams,
    controls: ControlSchedule,
    plan_t0: f64,
}

impl<'a> Runner<'a> {
    fn measure_pose(&mut self, p: &Pose) -> Pose {
        let n = self.sc.noise;
        PoseT::new(
            p.x + gauss(&mut self.rng.position, n.sigma_position),
            p.y + gauss(&mut self.rng.position, n.sigma_position),
            p.theta + gauss(&mut self.rng.heading, n.sigma_heading),
        )
    }

    /// Estimates the current from readings taken over `[from, to]`.
    fn estimate(&mut self, from: f64, to: f64) -> Result<CurrentState> {
        let n = self.sc.noise;
        let dt = 1.0 / n.sample_rate;
        let count = (((to - from) / dt) + 1e-9).floor().max(0.0) as usize + 1;
        let mut speeds = Vec::with_capacity(count);
        let mut heads = Vec::with_capacity(count);
        for i in 0..count {
            let ts = (to - i as f64 * dt).max(0.0);
            let c = current_at(&self.schedule, ts)?;
            speeds.push(c.v_w + gauss(&mut self.rng.vw, n.sigma_vw_relative * c.v_w));
            heads.push(c.theta_w + gauss(&mut self.rng.thetaw, n.sigma_thetaw));
        }
        let v = speeds.iter().sum::<f64>() / count as f64;
        let v = v.clamp(0.0, 0.99 * self.sc.vehicle.speed);
        Ok(CurrentStateT::new(v, estimate_heading_mle(&heads)?))
    }

    fn delay(&mut self) -> (f64, f64) {
        let d: DelayModel = match self.sc.planner {
            PlannerKind::Analytic4Pi => self.sc.latency.analytic,
            PlannerKind::DubinsSix => self.sc.latency.baseline,
        };
        let jitter = gauss(&mut self.rng.latency, d.jitter);
        let realized = d.realized.unwrap_or((d.mean * (1.0 + jitter)).max(0.0));
        (d.mean, realized)
    }

    fn solve(&self, from: &Pose, current: &CurrentState) -> Result<Option<ControlSchedule>> {
        let sc = self.sc;
        let sol = match sc.planner {
            PlannerKind::Analytic4Pi => plan(from, &sc.goal, current, &sc.vehicle, PlanMode::FourPi)?,
            PlannerKind::DubinsSix => solve_six(from, &sc.goal, current, &sc.vehicle, &sc.solver)?.map(|s| s.0),
        };
        Ok(sol.map(|s| controls_of(&s, &sc.vehicle)))
    }
}

/// Runs one mission. Deterministic in `(scenario, seed)`.
pub fn run_scenario(sc: &Scenario, seed: u64) -> Result<RunResult> {
    sc.validate()?;
    let schedule = realize_process(&sc.current_process, sc.t_max, &mut stream(seed, PROCESS_STREAM))?;
    let rng = Streams {
        position: stream(seed, 2),
        heading: stream(seed, 3),
        vw: stream(seed, 4),
        thetaw: stream(seed, 5),
        latency: stream(seed, 6),
    };
    let mut run = Runner { sc, schedule, rng, controls: ControlSchedule { segments: vec![] }, plan_t0: 0.0 };
    let v = sc.vehicle.speed;

    let mut t = 0.0;
    let mut p = sc.start;
    let mut samples = vec![(0.0, p)];
    let mut next_sample = sc.sample_interval;
    let mut drift_segments = Vec::new();
    let mut delays = Vec::new();
    let mut replans = 0usize;

    // the first plan uses readings taken before departure
    let est = run.estimate(0.0, sc.estimation_window)?;
    let m = run.measure_pose(&p);
    let mut initial_pending = sc.charge_initial_plan;
    let mut phase = match (sc.charge_initial_plan, run.solve(&m, &est)?) {
        (false, Some(c)) => {
            run.controls = c;
            Phase::Executing
        }
        _ => {
            initial_pending = true;
            let (_, realized) = run.delay();
            delays.push(realized);
            Phase::Computing { until: realized, measured: m, estimate: est, from: p, started: 0.0 }
        }
    };

    let finish = |converged: bool, t: f64, p: Pose, mut samples: Vec<(f64, Pose)>, drift_segments, delays, replans| {
        if samples.last().map_or(true, |s: &(f64, Pose)| s.0 < t) {
            samples.push((t, p));
        }
        RunResult {
            converged,
            total_time: t,
            replan_count: replans,
            drift_segments,
            compute_delays: delays,
            final_pose: p,
            trajectory: SampledTrajectory { frame: Frame::Inertial, samples },
        }
    };

    if check_termination(&p, &sc.goal, sc.precision_radius, sc.heading_tolerance) == Termination::Success {
        return Ok(finish(true, 0.0, p, samples, drift_segments, delays, replans));
    }

    let eps = 1e-9;
    loop {
        if t >= sc.t_max - eps {
            return Ok(finish(false, sc.t_max, p, samples, drift_segments, delays, replans));
        }
        let plan_end = run.plan_t0 + run.controls.duration();
        let mut next = (t + sc.step).min(sc.t_max);
        if let Some(e) = run.schedule.next_change_after(t) {
            next = next.min(e);
        }
        match &phase {
            Phase::Executing => {
                if plan_end > t + eps {
                    next = next.min(plan_end);
                }
            }
            Phase::Estimating { until, .. } => {
                next = next.min(until.max(t));
                if plan_end > t + eps {
                    next = next.min(plan_end);
                }
            }
            Phase::Computing { until, .. } => next = next.min(until.max(t)),
        }
        // controls are piecewise constant; step inside one piece
        let u = match phase {
            Phase::Computing { .. } => 0.0,
            _ => {
                let local = t - run.plan_t0;
                let mut acc = 0.0;
                let mut rate = 0.0;
                for &(uu, d) in &run.controls.segments {
                    if local < acc + d - eps {
                        rate = uu;
                        next = next.min(run.plan_t0 + acc + d);
                        break;
                    }
                    acc += d;
                }
                rate
            }
        };
        let dt = next - t;
        if dt > 0.0 {
            let w = current_at(&run.schedule, t)?;
            p = step_exact(&p, u, &w, v, dt);
            t = next;
        } else {
            t = next;
        }
        if t >= next_sample - eps {
            samples.push((t, p));
            next_sample = t + sc.sample_interval;
        }
        if check_termination(&p, &sc.goal, sc.precision_radius, sc.heading_tolerance) == Termination::Success {
            return Ok(finish(true, t, p, samples, drift_segments, delays, replans));
        }

        // events at time t
        let changed = run.schedule.entries().iter().any(|e| e.0 > 0.0 && (e.0 - t).abs() <= eps);
        if changed {
            phase = Phase::Estimating { since: t, until: t + sc.estimation_window };
        }
        let start_compute = match &phase {
            Phase::Estimating { since, until } if t >= until - eps => Some((*since, t)),
            Phase::Executing if t >= plan_end - eps => {
                let last_change = run.schedule.entries().iter().map(|e| e.0).filter(|&e| e <= t).fold(0.0, f64::max);
                Some(((t - sc.estimation_window).max(last_change), t))
            }
            _ => None,
        };
        if let Some((from, to)) = start_compute {
            let est = run.estimate(from, to)?;
            let measured = run.measure_pose(&p);
            let (_, realized) = run.delay();
            delays.push(realized);
            phase = Phase::Computing { until: t + realized, measured, estimate: est, from: p, started: t };
        }
        if let Phase::Computing { until, measured, estimate, from, started } = phase {
            if t >= until - eps {
                drift_segments.push(DriftSegment { t: started, from, to: p });
                let mean = run.delay_mean();
                let origin = match sc.planner {
                    PlannerKind::DubinsSix => drift_predict(&measured, measured.theta, &estimate, mean, &sc.vehicle),
                    PlannerKind::Analytic4Pi => measured,
                };
                if initial_pending {
                    initial_pending = false;
                } else {
                    replans += 1;
                }
                match run.solve(&origin, &estimate)? {
                    Some(c) => {
                        run.controls = c;
                        run.plan_t0 = t;
                        phase = Phase::Executing;
                    }
                    None => {
                        let m = run.measure_pose(&p);
                        let (_, realized) = run.delay();
                        delays.push(realized);
                        run.controls = ControlSchedule { segments: vec![] };
                        run.plan_t0 = t;
                        phase = Phase::Computing { until: t + realized, measured: m, estimate, from: p, started: t };
                    }
                }
            }
        }
    }
}

impl Runner<'_> {
    fn delay_mean(&self) -> f64 {
        let d = match self.sc.planner {
            PlannerKind::Analytic4Pi => self.sc.latency.analytic,
            PlannerKind::DubinsSix => self.sc.latency.baseline,
        };
        d.mean
    }
}

/// Replanning example: the current turns at 3.2 s while the first plan is flown.
pub fn replanning_example(planner: PlannerKind) -> Scenario {
    use std::f64::consts::PI;
    let schedule = CurrentScheduleT::new(vec![
        (0.0, CurrentStateT::new(0.5, PI)),
        (3.2, CurrentStateT::new(0.75, 1.5 * PI)),
    ])
    .expect("valid schedule");
    let mut latency = LatencyModel::default();
    latency.baseline.realized = Some(8.0);
    Scenario {
        start: PoseT::origin(),
        goal: PoseT::new(5.0, 8.5, 0.75 * PI),
        vehicle: VehicleSpec::unit(),
        current_process: CurrentProcess::Explicit(schedule),
        noise: NoiseModel::none(),
        precision_radius: 1.0,
        heading_tolerance: default_tolerance(),
        t_max: default_t_max(),
        estimation_window: 0.0,
        latency,
        planner,
        step: default_step(),
        sample_interval: default_sample_interval(),
        solver: SolverConfig::default(),
        charge_initial_plan: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mle_examples() {
        assert!((estimate_heading_mle(&[1.2, 1.2, 1.2]).unwrap() - 1.2).abs() < 1e-12);
        assert!((estimate_heading_mle(&[PI - 0.1, PI + 0.1]).unwrap() - PI).abs() < 1e-12);
        assert!(estimate_heading_mle(&[0.1, 2.0 * PI - 0.1]).unwrap().min(2.0 * PI - estimate_heading_mle(&[0.1, 2.0 * PI - 0.1]).unwrap()) < 1e-12);
        assert_eq!(estimate_heading_mle(&[]), Err(Error::NoSamples));
    }

    #[test]
    fn termination_examples() {
        let g = PoseT::new(1.0, 1.0, 1.0);
        assert_eq!(check_termination(&g, &g, 1.0, 0.1), Termination::Success);
        assert_eq!(check_termination(&PoseT::new(2.0, 1.0, 1.0), &g, 1.0, 0.1), Termination::Success);
        let off = PoseT::new(1.0, 1.0, 1.0 + 6f64.to_radians());
        assert_eq!(check_termination(&off, &g, 1.0, 5f64.to_radians()), Termination::Continue);
    }

    #[test]
    fn degree_keys() {
        let mut v = serde_json::json!({"a_deg": 180.0, "b": [{"c_deg": 90}]});
        degrees_to_radians(&mut v).unwrap();
        assert!((v["a"].as_f64().unwrap() - PI).abs() < 1e-15);
        assert!((v["b"][0]["c"].as_f64().unwrap() - PI / 2.0).abs() < 1e-15);
        let mut v = serde_json::json!({"a_deg": 1.0, "a": 2.0});
        assert!(degrees_to_radians(&mut v).is_err());
    }

    #[test]
    fn random_process_is_seeded() {
        let p = CurrentProcess::Random { v_w: 2.0, initial_theta_w: None, headings: default_headings(), periods: default_periods() };
        let a = realize_process(&p, 1000.0, &mut stream(7, PROCESS_STREAM)).unwrap();
        let b = realize_process(&p, 1000.0, &mut stream(7, PROCESS_STREAM)).unwrap();
        assert_eq!(a, b);
        assert!(a.entries().len() > 10);
        assert!(a.entries().windows(2).all(|w| [30.0, 45.0, 60.0].contains(&(w[1].0 - w[0].0))));
    }
}
