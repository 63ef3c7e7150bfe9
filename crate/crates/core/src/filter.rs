//! Min-norm safety filter.
//!
//! Solves `min ½‖u − u_d‖²  s.t.  a·u ≥ c` in closed form. With a single
//! half-space constraint the KKT conditions give an orthogonal projection,
//! which for a scalar input with unit normal is `max(u_d, u_sf)`.

use crate::barrier::AffineControlConstraint;
use crate::scalar::{dot, to_f64, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("baseline law expects a state of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gain `{name}` must be positive, got {value}")]
    NonPositiveGain { name: &'static str, value: f64 },
    #[error("constraint normal is zero and the constraint is infeasible")]
    ZeroNormal,
}

/// Nominal (performance) controller that the filter minimally modifies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineLaw<T> {
    /// `u_d = −k(x − x_d)` on a first-order plant.
    Proportional { gain: T, target: T },
    /// `u_d = −k₁(x − x_d) − k₂ẋ` on a double integrator.
    Pd {
        position_gain: T,
        velocity_gain: T,
        target: T,
    },
}

impl<T: Scalar> BaselineLaw<T> {
    pub fn proportional(gain: T, target: T) -> Result<Self, FilterError> {
        Ok(Self::Proportional {
            gain: positive("k", gain)?,
            target,
        })
    }

    pub fn pd(position_gain: T, velocity_gain: T, target: T) -> Result<Self, FilterError> {
        Ok(Self::Pd {
            position_gain: positive("k1", position_gain)?,
            velocity_gain: positive("k2", velocity_gain)?,
            target,
        })
    }

    pub fn state_dim(&self) -> usize {
        match self {
            Self::Proportional { .. } => 1,
            Self::Pd { .. } => 2,
        }
    }

    pub fn target(&self) -> T {
        match *self {
            Self::Proportional { target, .. } | Self::Pd { target, .. } => target,
        }
    }
}

fn positive<T: Scalar>(name: &'static str, value: T) -> Result<T, FilterError> {
    if value > T::zero() {
        Ok(value)
    } else {
        Err(FilterError::NonPositiveGain {
            name,
            value: to_f64(value),
        })
    }
}

pub fn baseline_control<T: Scalar>(x: &[T], law: &BaselineLaw<T>) -> Result<T, FilterError> {
    if x.len() != law.state_dim() {
        return Err(FilterError::DimensionMismatch {
            expected: law.state_dim(),
            got: x.len(),
        });
    }
    Ok(match *law {
        BaselineLaw::Proportional { gain, target } => -gain * (x[0] - target),
        BaselineLaw::Pd {
            position_gain,
            velocity_gain,
            target,
        } => -position_gain * (x[0] - target) - velocity_gain * x[1],
    })
}

/// Outcome of filtering a scalar command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterResult<T> {
    /// Applied control `u*`.
    pub u_star: T,
    /// Whether the safety constraint bound the solution.
    pub active: bool,
    /// Baseline command.
    pub u_d: T,
    /// Safe lower bound.
    pub u_sf: T,
}

/// `u* = max(u_d, u_sf)`. A tie counts as inactive.
pub fn filter_scalar<T: Scalar>(u_d: T, u_sf: T) -> FilterResult<T> {
    let active = u_sf > u_d;
    FilterResult {
        u_star: if active { u_sf } else { u_d },
        active,
        u_d,
        u_sf,
    }
}

/// Outcome of projecting a vector command onto a half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedControl<T> {
    pub u_star: Vec<T>,
    pub active: bool,
    pub u_d: Vec<T>,
    /// KKT multiplier `λ = max(0, (c − a·u_d)/(a·a))`.
    pub multiplier: T,
}

/// Projects `u_d` onto `{u : a·u ≥ c}`.
///
/// The active branch is evaluated as `(u_d − (a·u_d/a·a)·a) + (c/a·a)·a`,
/// which is algebraically `u_d + λa` and lands exactly on `c` for a unit
/// scalar normal.
pub fn filter_projection<T: Scalar>(
    u_d: &[T],
    constraint: &AffineControlConstraint<T>,
) -> Result<ProjectedControl<T>, FilterError> {
    let a = &constraint.normal;
    let c = constraint.offset;
    let a_ud = dot(a, u_d);
    let a_a = dot(a, a);
    if a_a == T::zero() {
        return if c > a_ud {
            Err(FilterError::ZeroNormal)
        } else {
            Ok(ProjectedControl {
                u_star: u_d.to_vec(),
                active: false,
                u_d: u_d.to_vec(),
                multiplier: T::zero(),
            })
        };
    }
    if !(c > a_ud) {
        return Ok(ProjectedControl {
            u_star: u_d.to_vec(),
            active: false,
            u_d: u_d.to_vec(),
            multiplier: T::zero(),
        });
    }
    let along = a_ud / a_a;
    let shift = c / a_a;
    let u_star = u_d
        .iter()
        .zip(a)
        .map(|(&ui, &ai)| (ui - along * ai) + shift * ai)
        .collect();
    Ok(ProjectedControl {
        u_star,
        active: true,
        u_d: u_d.to_vec(),
        multiplier: (c - a_ud) / a_a,
    })
}
