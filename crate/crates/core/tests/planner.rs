mod common;

use std::f64::consts::{PI, TAU};

use common::*;
use fourpi::angle::Kappa;
use fourpi::model::{from_start_frame, to_start_frame};
use fourpi::planner::{
    endpoint_residual, extended_k_solutions, plan, plan_type, solve_beta, solve_one, PathType,
    PlanMode,
};
use fourpi::{Pose, Pose32, VehicleSpec32};
use proptest::prelude::*;

fn solve(g: Pose, w: fourpi::CurrentState, mode: PlanMode) -> Option<fourpi::PathSolution> {
    plan(&Pose::origin(), &g, &w, &unit(), mode).unwrap()
}

#[test]
fn crosswind_goal_behind_and_left() {
    let (g, w) = (pose(-2.3, 2.8, PI / 2.0), cur(0.5, PI));
    let two = solve(g, w, PlanMode::TwoPi).unwrap();
    assert_eq!(two.path_type, PathType::RSR);
    assert!(rel(two.time, 20.91) < 1e-3, "{}", two.time);
    let four = solve(g, w, PlanMode::FourPi).unwrap();
    assert_eq!((four.path_type, four.k), (PathType::LSL, 1));
    assert!(rel(four.alpha, 0.2368 * PI) < 1e-3);
    assert!(rel(four.beta, 2.6583) < 1e-4);
    assert!(rel(four.gamma, 2.2632 * PI) < 1e-4);
    assert!(rel(four.time, 10.5123) < 1e-4);
}

#[test]
fn goal_outside_two_pi_regions() {
    let (g, w) = (pose(6.0, 3.0, 7.0 * PI / 4.0), cur(0.5, PI / 3.0));
    assert!(solve(g, w, PlanMode::TwoPi).is_none());
    let s = solve(g, w, PlanMode::FourPi).unwrap();
    assert_eq!((s.path_type, s.k), (PathType::RSR, -2));
    assert!(rel(s.alpha, 0.116 * PI) < 5e-3);
    assert!(rel(s.beta, 2.976) < 5e-3);
    assert!(rel(s.gamma, 2.135 * PI) < 5e-3);
    // frozen to more digits than the tolerance above
    assert!((s.time - 10.0442).abs() < 1e-4, "{}", s.time);
}

#[test]
fn head_current_goal_both_modes() {
    let (g, w) = (pose(-1.0, 4.0, PI / 4.0), cur(0.5, PI));
    let two = solve(g, w, PlanMode::TwoPi).unwrap();
    assert_eq!(two.path_type, PathType::RSR);
    for (got, want) in [(two.alpha, 1.890 * PI), (two.beta, 12.691), (two.gamma, 1.860 * PI), (two.time, 24.47)] {
        assert!(rel(got, want) < 1e-3, "{got} vs {want}");
    }
    let four = solve(g, w, PlanMode::FourPi).unwrap();
    assert_eq!(four.path_type, PathType::LSL);
    for (got, want) in [(four.alpha, 0.206 * PI), (four.beta, 6.143), (four.gamma, 2.044 * PI), (four.time, 13.21)] {
        assert!(rel(got, want) < 1e-3, "{got} vs {want}");
    }
}

#[test]
fn endpoint_integrates_to_goal() {
    for (g, w) in [
        (pose(-2.3, 2.8, PI / 2.0), cur(0.5, PI)),
        (pose(6.0, 3.0, 7.0 * PI / 4.0), cur(0.5, PI / 3.0)),
        (pose(-1.0, 4.0, PI / 4.0), cur(0.5, PI)),
    ] {
        let s = solve(g, w, PlanMode::FourPi).unwrap();
        let end = integrate_end(&s, &w, &unit(), 1e-4);
        assert!(end.distance_to(&g) < 1e-4 && ang_err(end.theta, g.theta) < 1e-9);
    }
}

#[test]
fn beta_matches_bisection() {
    for (a, b, w) in [(3.0, -1.0, cur(0.5, 1.0)), (-7.0, 2.0, cur(0.9, 4.0)), (0.1, 0.2, cur(0.0, 0.0))] {
        let got = solve_beta(a, b, &w).unwrap();
        assert!((got - beta_bisect(a, b, &w)).abs() < 1e-9 * got.max(1.0));
    }
}

#[test]
fn degenerate_goal_at_start() {
    let s = solve(pose(0.0, 0.0, 0.0), cur(0.3, 1.0), PlanMode::FourPi).unwrap();
    assert_eq!((s.alpha, s.beta, s.gamma, s.time), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn invalid_inputs_are_rejected() {
    let g = pose(1.0, 1.0, 1.0);
    assert!(plan(&Pose::origin(), &g, &cur(1.0, 0.0), &unit(), PlanMode::FourPi).is_err());
    assert!(plan(&Pose::origin(), &pose(f64::NAN, 0.0, 0.0), &cur(0.1, 0.0), &unit(), PlanMode::FourPi).is_err());
    assert!(solve_one(PathType::LSL, 2, &g, &cur(0.1, 0.0), &unit(), Kappa::TwoPi).is_err());
    assert!(solve_one(PathType::LSR, 0, &g, &cur(0.1, 0.0), &unit(), Kappa::TwoPi).is_err());
}

#[test]
fn single_precision_agrees() {
    let g = Pose32::new(-2.3, 2.8, std::f32::consts::FRAC_PI_2);
    let w = fourpi::CurrentState32::new(0.5, std::f32::consts::PI);
    let s = plan(&Pose32::origin(), &g, &w, &VehicleSpec32::unit(), PlanMode::FourPi).unwrap().unwrap();
    assert!((s.time - 10.5123).abs() < 1e-3);
}

#[test]
fn zero_current_matches_classical_dubins() {
    let goals = [(3.0, 4.0, 1.0), (-5.0, 2.0, 4.0), (0.5, -6.0, 5.5), (8.0, 0.5, 0.3)];
    for goal in goals {
        for pt in [PathType::LSL, PathType::RSR] {
            let Some((a, p, q)) = classical(pt, goal, 1.0) else { continue };
            let g = pose(goal.0, goal.1, goal.2);
            let s = plan_type(pt, &Pose::origin(), &g, &cur(0.0, 0.0), &unit(), PlanMode::TwoPi).unwrap().unwrap();
            assert!((s.time - (a + p + q)).abs() < 1e-9, "{pt} {goal:?} {} vs {}", s.time, a + p + q);
        }
    }
}

fn goal_strategy() -> impl Strategy<Value = (Pose, fourpi::CurrentState)> {
    (-10.0..10.0f64, -10.0..10.0f64, 0.0..TAU, 0.0..0.95f64, 0.0..TAU)
        .prop_map(|(x, y, t, v, h)| (pose(x, y, m2pi(t)), cur(v, h)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn each_type_alone_reaches_everything((g, w) in goal_strategy()) {
        for pt in [PathType::LSL, PathType::RSR] {
            let s = plan_type(pt, &Pose::origin(), &g, &w, &unit(), PlanMode::FourPi).unwrap();
            prop_assert!(s.is_some(), "{pt} {g:?} {w:?}");
            let (e, h) = endpoint_residual(&s.unwrap(), &g, &w, &unit());
            prop_assert!(e < 1e-9 * g.x.hypot(g.y).max(1.0) && h < 1e-9);
        }
    }

    #[test]
    fn four_pi_never_slower((g, w) in goal_strategy()) {
        if let Some(two) = solve(g, w, PlanMode::TwoPi) {
            let four = solve(g, w, PlanMode::FourPi).unwrap();
            prop_assert!(four.time <= two.time + 1e-9);
        }
    }

    #[test]
    fn arcs_stay_below_four_pi((g, w) in goal_strategy()) {
        let s = solve(g, w, PlanMode::FourPi).unwrap();
        prop_assert!(s.alpha + s.gamma < 2.0 * TAU);
    }

    #[test]
    fn consecutive_windings_differ_by_one_loop((g, w) in goal_strategy()) {
        let lo = TAU / (1.0 + w.v_w) - 1e-9;
        let hi = TAU / (1.0 - w.v_w) + 1e-9;
        for pt in [PathType::LSL, PathType::RSR] {
            let sols = extended_k_solutions(pt, &g, &w, &unit()).unwrap();
            for pair in sols.windows(2) {
                if let (Some(a), Some(b)) = (pair[0].1, pair[1].1) {
                    let d = b.time - a.time;
                    prop_assert!(d >= lo && d <= hi, "{pt} {d} not in [{lo}, {hi}]");
                }
            }
        }
    }

    #[test]
    fn extra_windings_never_help((g, w) in goal_strategy()) {
        for pt in [PathType::LSL, PathType::RSR] {
            let sols = extended_k_solutions(pt, &g, &w, &unit()).unwrap();
            let best = |s: &[(i32, Option<fourpi::PathSolution>)]| {
                s.iter().filter_map(|x| x.1.map(|p| p.time)).fold(f64::INFINITY, f64::min)
            };
            prop_assert!(best(&sols[..2]) <= best(&sols[2..]) + 1e-9);
        }
    }

    #[test]
    fn rejected_root_is_not_positive(a in -20.0..20.0f64, b in -20.0..20.0f64, v in 0.0..0.99f64, h in 0.0..TAU) {
        // root product of the quadratic is −(A²+B²)/(1−v²)
        let w = cur(v, h);
        let beta = solve_beta(a, b, &w).unwrap();
        prop_assert!(beta >= 0.0);
        let other = -(a * a + b * b) / (1.0 - v * v) / beta.max(1e-300);
        prop_assert!(beta == 0.0 || other <= 1e-12);
    }

    #[test]
    fn plan_is_frame_equivariant(
        (g, w) in goal_strategy(),
        sx in -5.0..5.0f64, sy in -5.0..5.0f64, st in 0.0..TAU,
    ) {
        let start = pose(sx, sy, m2pi(st));
        let direct = plan(&start, &g, &w, &unit(), PlanMode::FourPi).unwrap().unwrap();
        let (lg, lw) = to_start_frame(&start, &g, &w);
        let local = plan(&Pose::origin(), &lg, &lw, &unit(), PlanMode::FourPi).unwrap().unwrap();
        prop_assert!((direct.time - local.time).abs() < 1e-12);
        let back = from_start_frame(&start, &lg);
        prop_assert!(back.distance_to(&g) < 1e-9 * (1.0 + g.x.hypot(g.y)));
        prop_assert!(ang_err(back.theta, g.theta) < 1e-12);
    }
}
