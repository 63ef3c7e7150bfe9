use cbf_bench::{lookup, registry};
use cbf_core::{BarrierFunction, BarrierSpec64, BaselineLaw64, IntegratorPlant};

#[test]
fn ex1_parameters() {
    let s = lookup("ex1-zeroing").unwrap();
    assert_eq!(s.plant, IntegratorPlant::FirstOrder);
    assert_eq!(
        s.baseline,
        BaselineLaw64::Proportional {
            gain: 0.5,
            target: 0.0
        }
    );
    let BarrierSpec64::Zeroing { barrier, alpha } = &s.barrier else {
        panic!("zeroing")
    };
    assert_eq!(alpha.gain(), 3.0);
    assert_eq!(barrier.value(&[3.0]), 0.0);
    assert_eq!(s.sim.wall_position, Some(1.0));
    let x0: Vec<f64> = s.initial_conditions.iter().map(|ic| ic[0]).collect();
    assert_eq!(x0, [2.0, 5.0, 7.0, 10.0]);
}

#[test]
fn ex2_parameters() {
    let s = lookup("ex2-exponential").unwrap();
    assert_eq!(
        s.baseline,
        BaselineLaw64::Pd {
            position_gain: 1.0,
            velocity_gain: 2.0,
            target: 0.0
        }
    );
    let BarrierSpec64::Exponential {
        barrier,
        alpha1,
        alpha2,
    } = &s.barrier
    else {
        panic!("exponential")
    };
    assert_eq!((alpha1.gain(), alpha2.gain()), (4.5, 0.5));
    assert_eq!(barrier.value(&[3.0, -7.0]), 0.0);
    assert!(s.initial_conditions.iter().all(|ic| ic[1] == -25.0));
}

#[test]
fn graceful_parameters() {
    let s = lookup("sc1-graceful1").unwrap();
    let BarrierSpec64::Graceful1 { barrier, beta } = &s.barrier else {
        panic!("graceful1")
    };
    assert_eq!(beta.gain(), 3.0);
    assert_eq!(
        (barrier.catastrophe_threshold(), barrier.primary_threshold()),
        (1.0, 3.0)
    );

    for (id, zeta) in [("sc2-graceful2-over", 2.0), ("sc2-graceful2-under", 0.5)] {
        let s = lookup(id).unwrap();
        let BarrierSpec64::Graceful2 {
            damping,
            natural_frequency,
            barrier,
        } = &s.barrier
        else {
            panic!("graceful2")
        };
        assert_eq!((*damping, *natural_frequency), (zeta, 2.0));
        assert_eq!(barrier.value(&[2.0, 0.0]), -0.5);
        assert_eq!(
            s.initial_conditions,
            vec![vec![2.0, -25.0], vec![5.0, -25.0]]
        );
    }
}

#[test]
fn simulation_protocol() {
    for s in registry() {
        assert_eq!(s.sim.horizon, 8.0, "{}", s.id);
        assert_eq!(s.sim.output_step, 1e-3, "{}", s.id);
    }
}

#[test]
fn peak_targets() {
    let peaks = |id: &str| -> Vec<f64> {
        let e = lookup(id).unwrap().expectations.unwrap();
        e.per_ic.iter().map(|p| p.peak_abs_u.unwrap()).collect()
    };
    assert_eq!(peaks("sc2-graceful2-over"), [3400.0, 200.0]);
    assert_eq!(peaks("sc2-graceful2-under"), [4500.0, 5500.0]);
    assert_eq!(
        lookup("sc2-graceful2-over")
            .unwrap()
            .expectations
            .unwrap()
            .peak_tolerance,
        0.2
    );
}
