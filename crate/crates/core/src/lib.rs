//! Control barrier function safety filters for control-affine plants.
//!
//! The crate covers the classical zeroing, reciprocal and exponential
//! barrier families and a graceful two-layer barrier that tolerates
//! excursions into a danger region bounded by a catastrophe boundary.
//! A min-norm filter turns a barrier constraint into the applied input, the
//! [`sim`] module integrates the closed loop with event detection, and
//! [`analysis`] checks Lyapunov descent and set invariance on the result.
//!
//! Everything is generic over a [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases fix the scalar to `f64`.

// `!(a > b)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod barrier;
pub mod control;
pub mod filter;
pub mod plant;
mod scalar;
pub mod sim;

pub use analysis::{
    bound_trajectory, check_descent, check_invariance, implicit_bound_time, lyapunov_v1,
    lyapunov_v2, AnalysisError, DescentReport, InvarianceParams, InvarianceReport, InvariantSet,
    LyapunovCandidate,
};
pub use barrier::{
    characteristic_roots, classify_region, layer_transform, AffineBarrier, AffineControlConstraint,
    BarrierError, BarrierFunction, BarrierSpec, ClassKFn, ClassKKind, Family, GracefulBarrier,
    SafetyRegion,
};
pub use control::{BarrierValues, ControlError, Controller, SafetyController};
pub use filter::{
    baseline_control, filter_projection, filter_scalar, BaselineLaw, FilterError, FilterResult,
    ProjectedControl,
};
pub use plant::{ControlAffine, DoubleIntegrator, FirstOrderIntegrator, IntegratorPlant};
pub use scalar::{lit, Scalar};
pub use sim::{
    integrate, locate_event, solve, Event, EventKind, SimConfig, SimError, SolverStats, Trajectory,
};

pub type AffineBarrier64 = AffineBarrier<f64>;
pub type GracefulBarrier64 = GracefulBarrier<f64>;
pub type BarrierSpec64 = BarrierSpec<f64>;
pub type ClassKFn64 = ClassKFn<f64>;
pub type AffineControlConstraint64 = AffineControlConstraint<f64>;
pub type BaselineLaw64 = BaselineLaw<f64>;
pub type FilterResult64 = FilterResult<f64>;
pub type BarrierValues64 = BarrierValues<f64>;
pub type SafetyController64<P = IntegratorPlant> = SafetyController<f64, P>;
pub type SimConfig64 = SimConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
