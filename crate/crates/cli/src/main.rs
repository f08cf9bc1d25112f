use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fourpi::baseline::{solve_six, LatencyModel, SolverConfig};
use fourpi::experiments::{self, Profile};
use fourpi::model::{CurrentStateT, PoseT, VehicleSpecT};
use fourpi::planner::{self, PlanMode};
use fourpi::reach::{self, Bounds};
use fourpi::sim::{self, Scenario};
use fourpi::trajectory::{cf_path, if_path};
use fourpi::{CurrentState, Error, Pose, VehicleSpec};

const SCHEMA_VERSION: &str = "1";
/// Relative `--out` paths are resolved against this directory when set.
const OUT_DIR_ENV: &str = "FOURPI_OUT_DIR";

#[derive(Parser)]
#[command(name = "fourpi", version, about = "Minimum-time Dubins paths in uniform currents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one path from start to goal.
    Plan(PlanArgs),
    /// Dominant path type and travel time over a grid of goal positions.
    Reachmap(MapArgs),
    /// Travel time over a grid of goal positions.
    Costmap(MapArgs),
    /// Full-reachability predicate over (theta_f, theta_w) for several current speeds.
    Paramscan(ScanArgs),
    /// Simulate one mission from a scenario file.
    Simulate(SimArgs),
    /// Monte-Carlo comparison of both planners for a vehicle profile.
    Montecarlo(McArgs),
    /// Static-current comparison of the 4pi planner against the six-type baseline.
    Static(StaticArgs),
    /// Compute-time benchmark of both planners.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum Mode {
    #[value(name = "2pi")]
    #[serde(rename = "2pi")]
    TwoPi,
    #[value(name = "4pi")]
    #[serde(rename = "4pi")]
    FourPi,
    #[value(name = "dubins")]
    #[serde(rename = "dubins")]
    Dubins,
}

#[derive(Args)]
struct VehicleArgs {
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CurrentArg {
    /// Current as speed,heading (radians).
    #[arg(long, value_name = "VW,THETAW", allow_hyphen_values = true)]
    current: Option<String>,
    /// Current as speed,heading (degrees).
    #[arg(long, value_name = "VW,THETAW", allow_hyphen_values = true)]
    current_deg: Option<String>,
    /// Current as velocity components.
    #[arg(long, value_name = "WX,WY", allow_hyphen_values = true)]
    current_xy: Option<String>,
}

#[derive(Args)]
struct PlanArgs {
    /// Start pose x,y,theta (radians).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "start_deg", default_value = "0,0,0")]
    start: String,
    /// Start pose x,y,theta (degrees).
    #[arg(long, allow_hyphen_values = true)]
    start_deg: Option<String>,
    /// Goal pose x,y,theta (radians).
    #[arg(long, allow_hyphen_values = true, required_unless_present = "goal_deg", conflicts_with = "goal_deg")]
    goal: Option<String>,
    /// Goal pose x,y,theta (degrees).
    #[arg(long, allow_hyphen_values = true)]
    goal_deg: Option<String>,
    #[command(flatten)]
    current: CurrentArg,
    #[command(flatten)]
    vehicle: VehicleArgs,
    #[arg(long, value_enum, default_value = "4pi")]
    mode: Mode,
    /// Seed of the baseline's start set (mode dubins).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the sampled inertial-frame trajectory to this CSV.
    #[arg(long)]
    traj: Option<PathBuf>,
    /// Also write the current-frame trajectory to this CSV.
    #[arg(long)]
    traj_cf: Option<PathBuf>,
    /// Trajectory sample spacing in seconds.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
}

#[derive(Args)]
struct MapArgs {
    /// Goal heading (radians).
    #[arg(long, allow_hyphen_values = true, required_unless_present = "theta_f_deg", conflicts_with = "theta_f_deg")]
    theta_f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_f_deg: Option<f64>,
    #[command(flatten)]
    current: CurrentArg,
    #[command(flatten)]
    vehicle: VehicleArgs,
    /// Grid covers [-extent, extent] on both axes.
    #[arg(long, default_value_t = 10.0)]
    extent: f64,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, value_enum, default_value = "2pi")]
    mode: Mode,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = std::f64::consts::PI / 50.0)]
    theta_f_step: f64,
    #[arg(long, default_value_t = std::f64::consts::PI / 50.0)]
    theta_w_step: f64,
    /// Normalized current speeds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    vw: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the sampled trajectory to this CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    profile: String,
    #[arg(long, default_value_t = 60)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-run CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StaticArgs {
    /// Square half-widths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "5,10,50,100,200")]
    radii: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(invalid(format!("{what} must be {n} comma-separated finite numbers, got {s:?}"))),
    }
}

fn parse_pose(rad: Option<&str>, deg: Option<&str>, what: &str) -> Result<Pose, Failure> {
    match (rad, deg) {
        (_, Some(d)) => {
            let v = numbers(d, 3, what)?;
            Ok(PoseT::new(v[0], v[1], v[2].to_radians()))
        }
        (Some(r), None) => {
            let v = numbers(r, 3, what)?;
            Ok(PoseT::new(v[0], v[1], v[2]))
        }
        (None, None) => Err(invalid(format!("{what} is required"))),
    }
}

fn parse_current(c: &CurrentArg) -> Result<CurrentState, Failure> {
    let cur = if let Some(s) = &c.current {
        let v = numbers(s, 2, "current")?;
        CurrentStateT::new(v[0], v[1])
    } else if let Some(s) = &c.current_deg {
        let v = numbers(s, 2, "current")?;
        CurrentStateT::new(v[0], v[1].to_radians())
    } else if let Some(s) = &c.current_xy {
        let v = numbers(s, 2, "current")?;
        CurrentStateT::from_components(v[0], v[1])
    } else {
        return Err(invalid("a current is required"));
    };
    if !(cur.v_w >= 0.0) {
        return Err(invalid("current speed must be non-negative"));
    }
    Ok(cur)
}

fn parse_vehicle(v: &VehicleArgs) -> Result<VehicleSpec, Failure> {
    Ok(VehicleSpecT::new(v.speed, v.radius)?)
}

fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn create(p: &Path) -> Result<(BufWriter<File>, String), Failure> {
    let path = out_path(p);
    let f = File::create(&path).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok((BufWriter::new(f), path.display().to_string()))
}

fn pose_json(p: &Pose) -> Value {
    json!({ "x": p.x, "y": p.y, "theta": p.theta })
}

fn cmd_plan(a: &PlanArgs) -> Outcome {
    let start = parse_pose(Some(&a.start), a.start_deg.as_deref(), "start")?;
    let goal = parse_pose(a.goal.as_deref(), a.goal_deg.as_deref(), "goal")?;
    let current = parse_current(&a.current)?;
    let vehicle = parse_vehicle(&a.vehicle)?;
    current.check_against(&vehicle)?;
    if !(a.dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let inputs = json!({
        "start": pose_json(&start),
        "goal": pose_json(&goal),
        "current": { "v_w": current.v_w, "theta_w": current.theta_w },
        "speed": vehicle.speed,
        "radius": vehicle.turning_radius,
        "mode": a.mode,
        "seed": a.seed,
    });
    let sol = match a.mode {
        Mode::TwoPi => planner::plan(&start, &goal, &current, &vehicle, PlanMode::TwoPi)?,
        Mode::FourPi => planner::plan(&start, &goal, &current, &vehicle, PlanMode::FourPi)?,
        Mode::Dubins => {
            let cfg = SolverConfig { seed: a.seed, ..SolverConfig::default() };
            match solve_six(&start, &goal, &current, &vehicle, &cfg)? {
                Some((s, _)) => Some(s),
                None => return Err(Failure::Runtime("baseline found no path".into())),
            }
        }
    };
    let Some(sol) = sol else {
        return Ok(json!({ "inputs": inputs, "results": { "status": "unreachable" } }));
    };
    let mut files = Vec::new();
    if let Some(p) = &a.traj {
        let (w, name) = create(p)?;
        if_path(&start, &sol, &current, &vehicle, a.dt)?.write_csv(w)?;
        files.push(name);
    }
    if let Some(p) = &a.traj_cf {
        let (w, name) = create(p)?;
        cf_path(&sol, &vehicle, a.dt).write_csv(w)?;
        files.push(name);
    }
    Ok(json!({
        "inputs": inputs,
        "results": { "status": "ok", "solution": sol, "T": sol.time, "files": files },
    }))
}

fn map_inputs(a: &MapArgs) -> Result<(f64, CurrentState, VehicleSpec, PlanMode), Failure> {
    let theta_f = match (a.theta_f, a.theta_f_deg) {
        (_, Some(d)) => d.to_radians(),
        (Some(r), None) => r,
        _ => return Err(invalid("theta_f is required")),
    };
    if !theta_f.is_finite() {
        return Err(invalid("theta_f must be finite"));
    }
    let current = parse_current(&a.current)?;
    let vehicle = parse_vehicle(&a.vehicle)?;
    current.check_against(&vehicle)?;
    let mode = match a.mode {
        Mode::TwoPi => PlanMode::TwoPi,
        Mode::FourPi => PlanMode::FourPi,
        Mode::Dubins => return Err(invalid("maps support modes 2pi and 4pi")),
    };
    if !(a.extent > 0.0 && a.step > 0.0) {
        return Err(invalid("extent and step must be positive"));
    }
    Ok((theta_f, current, vehicle, mode))
}

fn cmd_reachmap(a: &MapArgs) -> Outcome {
    let (theta_f, current, vehicle, mode) = map_inputs(a)?;
    let cells = reach::reachability_map(theta_f, &current, &vehicle, &Bounds::square(a.extent), a.step, mode)?;
    let (w, name) = create(&a.out)?;
    reach::write_reach_csv(&cells, w)?;
    let unreachable = cells.iter().filter(|c| c.time.is_none()).count();
    let lsl = cells.iter().filter(|c| c.dominant == reach::Dominant::LSL).count();
    let full = reach::full_reachability_2pi(theta_f, &current, vehicle.turning_radius)?;
    Ok(json!({
        "inputs": { "theta_f": theta_f, "current": current, "vehicle": vehicle, "extent": a.extent, "step": a.step, "mode": a.mode },
        "results": {
            "cells": cells.len(),
            "unreachable": unreachable,
            "lsl": lsl,
            "rsr": cells.len() - unreachable - lsl,
            "fully_reachable_2pi": full.fully_reachable,
            "file": name,
        },
    }))
}

fn cmd_costmap(a: &MapArgs) -> Outcome {
    let (theta_f, current, vehicle, mode) = map_inputs(a)?;
    let cells = reach::cost_map(theta_f, &current, &vehicle, &Bounds::square(a.extent), a.step, mode)?;
    let (w, name) = create(&a.out)?;
    reach::write_cost_csv(&cells, w)?;
    let times: Vec<f64> = cells.iter().filter_map(|c| c.2).collect();
    Ok(json!({
        "inputs": { "theta_f": theta_f, "current": current, "vehicle": vehicle, "extent": a.extent, "step": a.step, "mode": a.mode },
        "results": {
            "cells": cells.len(),
            "reachable": times.len(),
            "max_T": times.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            "file": name,
        },
    }))
}

fn cmd_paramscan(a: &ScanArgs) -> Outcome {
    let rows = reach::parametric_scan(a.theta_f_step, a.theta_w_step, &a.vw)?;
    let (w, name) = create(&a.out)?;
    reach::write_scan_csv(&rows, w)?;
    let counts: Vec<Value> = a
        .vw
        .iter()
        .map(|&v| {
            let n = rows.iter().filter(|r| r.v_w == v && r.reachable).count();
            let total = rows.iter().filter(|r| r.v_w == v).count();
            json!({ "v_w": v, "reachable": n, "total": total })
        })
        .collect();
    Ok(json!({
        "inputs": { "theta_f_step": a.theta_f_step, "theta_w_step": a.theta_w_step, "vw": a.vw },
        "results": { "counts": counts, "file": name },
    }))
}

fn cmd_simulate(a: &SimArgs) -> Outcome {
    let text = std::fs::read_to_string(&a.scenario)
        .map_err(|e| invalid(format!("cannot read {}: {e}", a.scenario.display())))?;
    let sc = Scenario::from_json(&text)?;
    let r = sim::run_scenario(&sc, a.seed)?;
    let file = match &a.out {
        Some(p) => {
            let (w, name) = create(p)?;
            r.trajectory.write_csv(w)?;
            Some(name)
        }
        None => None,
    };
    Ok(json!({
        "inputs": { "scenario": sc, "seed": a.seed },
        "results": {
            "converged": r.converged,
            "total_time": r.total_time,
            "replan_count": r.replan_count,
            "final_pose": r.final_pose,
            "compute_delays": r.compute_delays,
            "drift_segments": r.drift_segments,
            "file": file,
        },
    }))
}

fn cmd_montecarlo(a: &McArgs) -> Outcome {
    let profile = Profile::by_name(&a.profile)?;
    let (stats, records) = experiments::dynamic_monte_carlo(&profile, a.runs, a.seed)?;
    let file = match &a.out {
        Some(p) => {
            let (w, name) = create(p)?;
            experiments::write_runs_csv(&records, w)?;
            Some(name)
        }
        None => None,
    };
    Ok(json!({
        "inputs": { "profile": profile, "runs": a.runs, "seed": a.seed },
        "results": { "stats": stats, "file": file },
    }))
}

fn cmd_static(a: &StaticArgs) -> Outcome {
    let cfg = SolverConfig { seed: a.seed, ..SolverConfig::default() };
    let rows = experiments::static_comparison(&a.radii, &cfg)?;
    let summary = experiments::summarize_static(&rows, &LatencyModel::default());
    let file = match &a.out {
        Some(p) => {
            let (w, name) = create(p)?;
            experiments::write_static_csv(&rows, w)?;
            Some(name)
        }
        None => None,
    };
    Ok(json!({
        "inputs": { "radii": a.radii, "seed": a.seed },
        "results": { "summary": summary, "file": file },
    }))
}

fn cmd_bench(a: &BenchArgs) -> Outcome {
    let report = experiments::timing_bench(a.n, a.seed, &SolverConfig { seed: a.seed, ..SolverConfig::default() })?;
    Ok(json!({ "inputs": { "n": a.n, "seed": a.seed }, "results": report }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, outcome) = match &cli.command {
        Command::Plan(a) => ("plan", cmd_plan(a)),
        Command::Reachmap(a) => ("reachmap", cmd_reachmap(a)),
        Command::Costmap(a) => ("costmap", cmd_costmap(a)),
        Command::Paramscan(a) => ("paramscan", cmd_paramscan(a)),
        Command::Simulate(a) => ("simulate", cmd_simulate(a)),
        Command::Montecarlo(a) => ("montecarlo", cmd_montecarlo(a)),
        Command::Static(a) => ("static", cmd_static(a)),
        Command::Bench(a) => ("bench", cmd_bench(a)),
    };
    match outcome {
        Ok(mut body) => {
            let obj = body.as_object_mut().expect("envelope body is an object");
            obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
            obj.insert("command".into(), json!(name));
            println!("{}", serde_json::to_string_pretty(&body).expect("serializable output"));
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("fourpi {name}: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("fourpi {name}: {msg}");
            ExitCode::from(3)
        }
    }
}
