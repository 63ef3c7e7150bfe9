use cbf_core::*;

fn ex1() -> SafetyController<f64, FirstOrderIntegrator> {
    SafetyController::new(
        FirstOrderIntegrator,
        BaselineLaw::proportional(0.5, 0.0).unwrap(),
        BarrierSpec::Zeroing {
            barrier: AffineBarrier::position_margin(1, 3.0),
            alpha: ClassKFn::linear(3.0).unwrap(),
        },
    )
}

fn ex2() -> SafetyController<f64, DoubleIntegrator> {
    SafetyController::new(
        DoubleIntegrator,
        BaselineLaw::pd(1.0, 2.0, 0.0).unwrap(),
        BarrierSpec::Exponential {
            barrier: AffineBarrier::position_margin(2, 3.0),
            alpha1: ClassKFn::linear(4.5).unwrap(),
            alpha2: ClassKFn::linear(0.5).unwrap(),
        },
    )
}

fn graceful2(zeta: f64) -> SafetyController<f64, DoubleIntegrator> {
    let barrier = GracefulBarrier::new(AffineBarrier::position(2), 1.0, 3.0).unwrap();
    SafetyController::new(
        DoubleIntegrator,
        BaselineLaw::pd(1.0, 2.0, 0.0).unwrap(),
        BarrierSpec::graceful2(barrier, zeta, 2.0).unwrap(),
    )
}

fn walled() -> SimConfig<f64> {
    SimConfig::default().with_wall(1.0)
}

/// Closed-form solution of `ẋ = max(−0.5x, −3(x−3))`.
fn ex1_exact(x0: f64, t: f64) -> f64 {
    if x0 > 3.6 {
        let t1 = 2.0 * (x0 / 3.6).ln();
        if t <= t1 {
            x0 * (-0.5 * t).exp()
        } else {
            3.0 + 0.6 * (-3.0 * (t - t1)).exp()
        }
    } else {
        3.0 + (x0 - 3.0) * (-3.0 * t).exp()
    }
}

#[test]
fn example1_matches_closed_form() {
    for x0 in [2.0, 5.0, 7.0, 10.0] {
        let traj = integrate(&ex1(), &[x0], &walled()).unwrap();
        assert_eq!(traj.len(), 8001);
        let err = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, x)| (x[0] - ex1_exact(x0, t)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "x0 = {x0}: max error {err:e}");
        assert_eq!(traj.events.last().unwrap().kind, EventKind::Finished);
        assert!(!traj.terminated_early);
    }
}

#[test]
fn example1_switch_time() {
    let traj = integrate(&ex1(), &[10.0], &walled()).unwrap();
    let t1 = 2.0 * (10.0f64 / 3.6).ln();
    assert!((t1 - 2.0433).abs() < 1e-4);
    let k = traj.active.iter().position(|&a| a).unwrap();
    assert!(traj.times[k] >= t1 - 1e-3 && traj.times[k - 1] <= t1 + 1e-3);
    assert!(traj.stats.mode_switches >= 1);
}

#[test]
fn example1_equilibrium_on_boundary() {
    let traj = integrate(&ex1(), &[3.0], &walled()).unwrap();
    for x in &traj.states {
        assert!((x[0] - 3.0).abs() < 1e-12);
    }
}

#[test]
fn exponential_barrier_collides() {
    let traj = integrate(&ex2(), &[5.0, -25.0], &walled()).unwrap();
    let event = traj.event(EventKind::Collision).expect("collision");
    assert!(event.time < 8.0);
    assert!(traj.terminated_early);
    assert_eq!(traj.events.len(), 1);
    assert_eq!(*traj.times.last().unwrap(), event.time);
    let x = traj.final_state().unwrap();
    assert!((x[0] - 1.0).abs() < 1e-6);
    // every earlier sample is still above the wall
    assert!(traj.states[..traj.len() - 1].iter().all(|x| x[0] >= 1.0));
}

#[test]
fn collision_free_run_without_wall() {
    let cfg = SimConfig {
        horizon: 1.0,
        ..SimConfig::default()
    };
    let traj = integrate(&ex2(), &[5.0, -25.0], &cfg).unwrap();
    assert!(!traj.collided());
    assert!(traj.states.iter().any(|x| x[0] < 1.0));
}

#[test]
fn times_strictly_increasing_and_aligned() {
    for x0 in [2.0, 5.0] {
        let traj = integrate(&ex2(), &[x0, -25.0], &walled()).unwrap();
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        let n = traj.len();
        assert!(traj.states.len() == n && traj.controls.len() == n);
        assert!(traj.active.len() == n && traj.barrier_values.len() == n);
    }
}

#[test]
fn runs_are_bit_identical() {
    let a = integrate(&graceful2(2.0), &[5.0, -25.0], &walled()).unwrap();
    let b = integrate(&graceful2(2.0), &[5.0, -25.0], &walled()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn graceful_runs_stay_off_the_catastrophe_boundary() {
    for zeta in [2.0, 0.5] {
        for x0 in [2.0, 5.0] {
            let traj = integrate(&graceful2(zeta), &[x0, -25.0], &walled()).unwrap();
            assert!(!traj.collided(), "zeta {zeta}, x0 {x0}");
            assert!(traj.event(EventKind::CatastropheBoundary).is_none());
            assert!(traj.barrier_values.iter().all(|v| v.hg.unwrap() > -1.0));
        }
    }
}

#[test]
fn tolerance_refinement_converges() {
    let base = walled();
    let fine = SimConfig {
        rel_tol: base.rel_tol / 2.0,
        abs_tol: base.abs_tol / 2.0,
        ..base
    };
    let check = |coarse: &Trajectory<f64>, finer: &Trajectory<f64>| {
        let a = coarse.final_state().unwrap();
        let b = finer.final_state().unwrap();
        for (p, q) in a.iter().zip(b) {
            assert!(
                (p - q).abs() < 10.0 * base.rel_tol * p.abs().max(1.0),
                "{p} vs {q}"
            );
        }
    };
    for x0 in [2.0, 5.0, 7.0, 10.0] {
        check(
            &integrate(&ex1(), &[x0], &base).unwrap(),
            &integrate(&ex1(), &[x0], &fine).unwrap(),
        );
        for ctrl in [ex2(), graceful2(2.0), graceful2(0.5)] {
            if x0 > 5.0 && !matches!(ctrl.barrier, BarrierSpec::Exponential { .. }) {
                continue;
            }
            let a = integrate(&ctrl, &[x0, -25.0], &base).unwrap();
            let b = integrate(&ctrl, &[x0, -25.0], &fine).unwrap();
            check(&a, &b);
        }
    }
}

#[test]
fn catastrophe_start_is_rejected() {
    let err = integrate(&graceful2(2.0), &[0.5, 0.0], &walled()).unwrap_err();
    assert!(matches!(err, SimError::ControllerUndefined { .. }));
}

#[test]
fn bad_inputs_are_rejected() {
    assert_eq!(
        integrate(&ex1(), &[f64::NAN], &walled()).unwrap_err(),
        SimError::NonFiniteInitialState
    );
    assert!(matches!(
        integrate(&ex1(), &[1.0, 2.0], &walled()).unwrap_err(),
        SimError::DimensionMismatch {
            expected: 1,
            got: 2
        }
    ));
    let cfg = SimConfig {
        horizon: -1.0,
        ..walled()
    };
    assert!(matches!(
        integrate(&ex1(), &[5.0], &cfg),
        Err(SimError::InvalidConfig(_))
    ));
}

#[test]
fn ragged_horizon_ends_on_the_horizon() {
    let cfg = SimConfig {
        horizon: 0.0105,
        ..walled()
    };
    let traj = integrate(&ex1(), &[5.0], &cfg).unwrap();
    assert_eq!(traj.len(), 11);
    assert_eq!(traj.events[0].time, 0.0105);
}

#[test]
fn single_precision_run() {
    let ctrl = SafetyController::new(
        FirstOrderIntegrator,
        BaselineLaw::proportional(0.5f32, 0.0).unwrap(),
        BarrierSpec::Zeroing {
            barrier: AffineBarrier::position_margin(1, 3.0f32),
            alpha: ClassKFn::linear(3.0f32).unwrap(),
        },
    );
    let cfg = SimConfig::<f32> {
        rel_tol: 1e-5,
        abs_tol: 1e-6,
        min_step: 1e-6,
        ..SimConfig::default()
    };
    let traj = integrate(&ctrl, &[10.0f32], &cfg).unwrap();
    let x = traj.final_state().unwrap()[0] as f64;
    assert!((x - ex1_exact(10.0, 8.0)).abs() < 1e-3);
}
