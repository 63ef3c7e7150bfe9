//! Bundled wall-collision scenarios and their expected outcomes.

use cbf_core::{
    characteristic_roots, AffineBarrier, BarrierSpec64, BaselineLaw64, ClassKFn, GracefulBarrier,
    IntegratorPlant, LyapunovCandidate, SafetyController64, SimConfig64,
};

/// Experiment constants.
pub mod params {
    /// Desired position `x_d` (m).
    pub const X_D: f64 = 0.0;
    /// Wall position `x_w` (m).
    pub const X_W: f64 = 1.0;
    /// Safety threshold `x_sf` (m).
    pub const X_SF: f64 = 3.0;
    /// Proportional gain of the first-order baseline.
    pub const K: f64 = 0.5;
    /// Class-K gain of the first-order barriers.
    pub const GAMMA: f64 = 3.0;
    pub const K1: f64 = 1.0;
    pub const K2: f64 = 2.0;
    pub const GAMMA1: f64 = 4.5;
    pub const GAMMA2: f64 = 0.5;
    pub const OMEGA_N: f64 = 2.0;
    pub const ZETA_OVER: f64 = 2.0;
    pub const ZETA_UNDER: f64 = 0.5;
    /// Initial velocity of the double-integrator runs (m/s).
    pub const V0: f64 = -25.0;
    pub const X0_ALL: [f64; 4] = [2.0, 5.0, 7.0, 10.0];
    pub const X0_GRACEFUL2: [f64; 2] = [2.0, 5.0];
    /// Relative tolerance on peak-acceleration targets.
    pub const PEAK_TOLERANCE: f64 = 0.2;
}

use params::*;

/// Expected outcome for one initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct IcExpectation {
    pub x0: f64,
    pub collided: Option<bool>,
    /// Target peak `|u|` (m/s²).
    pub peak_abs_u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectations {
    pub per_ic: Vec<IcExpectation>,
    pub peak_tolerance: f64,
    /// Graceful runs must keep `h_g > −1` with this margin.
    pub failsafe_margin: Option<f64>,
    /// Lyapunov descent check and its tolerance.
    pub descent: Option<(LyapunovCandidate<f64>, f64)>,
    /// Phase-plot slopes `(unfiltered, filtered)` recovered by least squares.
    pub phase_slopes: Option<(f64, f64)>,
    pub slope_tolerance: f64,
}

impl Expectations {
    fn empty() -> Self {
        Self {
            per_ic: Vec::new(),
            peak_tolerance: PEAK_TOLERANCE,
            failsafe_margin: None,
            descent: None,
            phase_slopes: None,
            slope_tolerance: 0.05,
        }
    }

    pub fn for_x0(&self, x0: f64) -> Option<&IcExpectation> {
        self.per_ic.iter().find(|e| e.x0 == x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: &'static str,
    pub description: &'static str,
    pub plant: IntegratorPlant,
    pub baseline: BaselineLaw64,
    pub barrier: BarrierSpec64,
    pub initial_conditions: Vec<Vec<f64>>,
    pub sim: SimConfig64,
    pub expectations: Option<Expectations>,
}

impl Scenario {
    pub fn controller(&self) -> SafetyController64 {
        SafetyController64::new(self.plant, self.baseline, self.barrier.clone())
    }

    pub fn state_dim(&self) -> usize {
        match self.plant {
            IntegratorPlant::FirstOrder => 1,
            IntegratorPlant::DoubleIntegrator => 2,
        }
    }

    /// Initial state for position `x0`, with velocity `v0` on second-order
    /// plants.
    pub fn initial_state(&self, x0: f64, v0: f64) -> Vec<f64> {
        match self.plant {
            IntegratorPlant::FirstOrder => vec![x0],
            IntegratorPlant::DoubleIntegrator => vec![x0, v0],
        }
    }

    pub fn is_graceful(&self) -> bool {
        matches!(
            self.barrier,
            BarrierSpec64::Graceful1 { .. } | BarrierSpec64::Graceful2 { .. }
        )
    }

    /// `(γ₁, γ₂)` of a second-order graceful scenario with real roots.
    pub fn graceful_roots(&self) -> Option<(f64, f64)> {
        match self.barrier {
            BarrierSpec64::Graceful2 {
                damping,
                natural_frequency,
                ..
            } => characteristic_roots(damping, natural_frequency).ok(),
            _ => None,
        }
    }
}

fn gain(value: f64) -> ClassKFn<f64> {
    ClassKFn::linear(value).expect("positive registry gain")
}

fn sim() -> SimConfig64 {
    SimConfig64::default().with_wall(X_W)
}

fn first_order_ics() -> Vec<Vec<f64>> {
    X0_ALL.iter().map(|&x| vec![x]).collect()
}

fn second_order_ics(xs: &[f64]) -> Vec<Vec<f64>> {
    xs.iter().map(|&x| vec![x, V0]).collect()
}

fn graceful(dim: usize) -> GracefulBarrier<f64> {
    GracefulBarrier::new(AffineBarrier::position(dim), X_W, X_SF).expect("x_w < x_sf")
}

fn pd() -> BaselineLaw64 {
    BaselineLaw64::pd(K1, K2, X_D).expect("positive registry gains")
}

fn proportional() -> BaselineLaw64 {
    BaselineLaw64::proportional(K, X_D).expect("positive registry gain")
}

fn graceful2(id: &'static str, description: &'static str, zeta: f64, peaks: [f64; 2]) -> Scenario {
    Scenario {
        id,
        description,
        plant: IntegratorPlant::DoubleIntegrator,
        baseline: pd(),
        barrier: BarrierSpec64::graceful2(graceful(2), zeta, OMEGA_N).expect("positive gains"),
        initial_conditions: second_order_ics(&X0_GRACEFUL2),
        sim: sim(),
        expectations: Some(Expectations {
            per_ic: X0_GRACEFUL2
                .iter()
                .zip(peaks)
                .map(|(&x0, peak)| IcExpectation {
                    x0,
                    collided: Some(false),
                    peak_abs_u: Some(peak),
                })
                .collect(),
            failsafe_margin: Some(1e-6),
            descent: Some((
                LyapunovCandidate::V2 {
                    natural_frequency: OMEGA_N,
                },
                1e-4,
            )),
            ..Expectations::empty()
        }),
    }
}

/// The bundled scenarios.
pub fn registry() -> Vec<Scenario> {
    vec![
        Scenario {
            id: "ex1-zeroing",
            description: "first-order plant, zeroing CBF",
            plant: IntegratorPlant::FirstOrder,
            baseline: proportional(),
            barrier: BarrierSpec64::Zeroing {
                barrier: AffineBarrier::position_margin(1, X_SF),
                alpha: gain(GAMMA),
            },
            initial_conditions: first_order_ics(),
            sim: sim(),
            expectations: Some(Expectations {
                per_ic: X0_ALL
                    .iter()
                    .map(|&x0| IcExpectation {
                        x0,
                        collided: Some(false),
                        peak_abs_u: None,
                    })
                    .collect(),
                phase_slopes: Some((-K, -GAMMA)),
                ..Expectations::empty()
            }),
        },
        Scenario {
            id: "ex2-exponential",
            description: "double integrator, exponential CBF",
            plant: IntegratorPlant::DoubleIntegrator,
            baseline: pd(),
            barrier: BarrierSpec64::Exponential {
                barrier: AffineBarrier::position_margin(2, X_SF),
                alpha1: gain(GAMMA1),
                alpha2: gain(GAMMA2),
            },
            initial_conditions: second_order_ics(&X0_ALL),
            sim: sim(),
            expectations: Some(Expectations {
                per_ic: X0_ALL
                    .iter()
                    .map(|&x0| IcExpectation {
                        x0,
                        collided: Some(x0 < 6.0),
                        peak_abs_u: None,
                    })
                    .collect(),
                ..Expectations::empty()
            }),
        },
        Scenario {
            id: "sc1-graceful1",
            description: "first-order plant, graceful CBF",
            plant: IntegratorPlant::FirstOrder,
            baseline: proportional(),
            barrier: BarrierSpec64::Graceful1 {
                barrier: graceful(1),
                beta: gain(GAMMA),
            },
            initial_conditions: first_order_ics(),
            sim: sim(),
            expectations: Some(Expectations {
                per_ic: X0_ALL
                    .iter()
                    .map(|&x0| IcExpectation {
                        x0,
                        collided: Some(false),
                        peak_abs_u: None,
                    })
                    .collect(),
                failsafe_margin: Some(1e-6),
                descent: Some((LyapunovCandidate::V1, 1e-6)),
                ..Expectations::empty()
            }),
        },
        graceful2(
            "sc2-graceful2-over",
            "double integrator, second-order graceful CBF, overdamped",
            ZETA_OVER,
            [3400.0, 200.0],
        ),
        graceful2(
            "sc2-graceful2-under",
            "double integrator, second-order graceful CBF, underdamped",
            ZETA_UNDER,
            [4500.0, 5500.0],
        ),
    ]
}

pub fn lookup(id: &str) -> Option<Scenario> {
    registry().into_iter().find(|s| s.id == id)
}
