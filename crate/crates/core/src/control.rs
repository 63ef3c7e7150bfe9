//! Closed-loop safety controller: baseline law, barrier constraint and the
//! min-norm filter, evaluated together at one state.

use crate::analysis::{lyapunov_v1, lyapunov_v2};
use crate::barrier::{high_order_h2, AffineBarrier, BarrierError, BarrierFunction, BarrierSpec};
use crate::filter::{baseline_control, filter_scalar, BaselineLaw, FilterError, FilterResult};
use crate::plant::{lie, ControlAffine};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("constraint bounds the input from above; only lower bounds are supported")]
    UpperBound,
}

impl ControlError {
    pub fn is_catastrophe(&self) -> bool {
        matches!(
            self,
            Self::Barrier(BarrierError::CatastropheBoundary { .. })
        )
    }
}

/// Barrier signals recorded alongside a trajectory. Entries that do not
/// apply to the barrier family are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierValues<T> {
    /// Primary margin `h` (for graceful barriers, `H − b`).
    pub h: Option<T>,
    /// High-order barrier `h₂ = ḣ + γ₁h`.
    pub h2: Option<T>,
    pub hg: Option<T>,
    pub hg_dot: Option<T>,
    /// Lyapunov candidate of the graceful family.
    pub lyapunov: Option<T>,
}

impl<T> Default for BarrierValues<T> {
    fn default() -> Self {
        Self {
            h: None,
            h2: None,
            hg: None,
            hg_dot: None,
            lyapunov: None,
        }
    }
}

/// A state-feedback law producing a filtered scalar input.
pub trait Controller<T: Scalar> {
    fn state_dim(&self) -> usize;

    fn control(&self, x: &[T]) -> Result<FilterResult<T>, ControlError>;

    /// Plant vector field under input `u`.
    fn vector_field(&self, x: &[T], u: T) -> Vec<T>;

    fn barrier_values(&self, _x: &[T], _u: T) -> BarrierValues<T> {
        BarrierValues::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SafetyController<T, P, B = AffineBarrier<T>> {
    pub plant: P,
    pub baseline: BaselineLaw<T>,
    pub barrier: BarrierSpec<T, B>,
}

impl<T, P, B> SafetyController<T, P, B>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    pub fn new(plant: P, baseline: BaselineLaw<T>, barrier: BarrierSpec<T, B>) -> Self {
        Self {
            plant,
            baseline,
            barrier,
        }
    }
}

impl<T, P, B> Controller<T> for SafetyController<T, P, B>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    fn state_dim(&self) -> usize {
        self.plant.state_dim()
    }

    fn control(&self, x: &[T]) -> Result<FilterResult<T>, ControlError> {
        let u_d = baseline_control(x, &self.baseline)?;
        let constraint = self.barrier.constraint(&self.plant, x)?;
        let u_sf = constraint
            .as_lower_bound()
            .ok_or(ControlError::UpperBound)?;
        Ok(filter_scalar(u_d, u_sf))
    }

    fn vector_field(&self, x: &[T], u: T) -> Vec<T> {
        self.plant.vector_field(x, u)
    }

    fn barrier_values(&self, x: &[T], u: T) -> BarrierValues<T> {
        let xdot = self.plant.vector_field(x, u);
        match &self.barrier {
            BarrierSpec::Zeroing { barrier, .. } | BarrierSpec::Reciprocal { barrier, .. } => {
                BarrierValues {
                    h: Some(barrier.value(x)),
                    ..Default::default()
                }
            }
            BarrierSpec::Exponential {
                barrier, alpha1, ..
            } => BarrierValues {
                h: Some(barrier.value(x)),
                h2: high_order_h2(&self.plant, barrier, alpha1, x).ok(),
                ..Default::default()
            },
            BarrierSpec::Graceful1 { barrier, .. } => {
                let hg = barrier.value(x);
                BarrierValues {
                    h: Some(barrier.primary_margin(x)),
                    hg: Some(hg),
                    hg_dot: Some(lie(&barrier.gradient(x), &xdot)),
                    lyapunov: lyapunov_v1(hg).ok(),
                    ..Default::default()
                }
            }
            BarrierSpec::Graceful2 {
                barrier,
                natural_frequency,
                ..
            } => {
                let hg = barrier.value(x);
                let hg_dot = lie(&barrier.gradient(x), &xdot);
                BarrierValues {
                    h: Some(barrier.primary_margin(x)),
                    hg: Some(hg),
                    hg_dot: Some(hg_dot),
                    lyapunov: lyapunov_v2(hg, hg_dot, *natural_frequency).ok(),
                    ..Default::default()
                }
            }
        }
    }
}
