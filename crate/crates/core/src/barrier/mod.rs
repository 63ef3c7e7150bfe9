//! Barrier functions, class-K gains, the graceful layer transform and the
//! control-space constraints each barrier family imposes.
//!
//! Every constraint is returned as a half-space `a·u ≥ c` in control space so
//! the safety filter does not need to know which family produced it.

mod constraint;
mod graceful;

pub use constraint::{
    exponential_constraint, graceful1_constraint, graceful2_constraint, high_order_h2,
    reciprocal_constraint, zeroing_constraint, AffineControlConstraint, BarrierSpec, Family,
};
pub use graceful::{
    characteristic_roots, classify_region, layer_transform, GracefulBarrier, SafetyRegion,
};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BarrierError {
    #[error("layer thresholds out of order: catastrophe threshold {catastrophe} must lie below primary threshold {primary}")]
    DegenerateLayers { catastrophe: f64, primary: f64 },
    #[error("barrier input is NaN")]
    NotANumber,
    #[error("gain `{name}` must be positive, got {value}")]
    NonPositiveGain { name: &'static str, value: f64 },
    #[error("input does not enter the constrained derivative at this state")]
    DegenerateConstraint,
    #[error(
        "barrier has relative degree 1 here, a second-order constraint needs relative degree 2"
    )]
    RelativeDegreeMismatch,
    #[error("reciprocal barrier is undefined outside the safe interior (h = {h})")]
    OutsideDomain { h: f64 },
    #[error("state is on or beyond the catastrophe boundary (h_g = {hg})")]
    CatastropheBoundary { hg: f64 },
    #[error("damping ratio {zeta} < 1 gives complex characteristic roots")]
    ComplexRoots { zeta: f64 },
}

/// A continuously differentiable scalar barrier `h(x)`.
///
/// The Hessian is only consulted for relative-degree-2 constraints.
pub trait BarrierFunction<T: Scalar> {
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;
    fn hessian(&self, x: &[T]) -> Vec<Vec<T>>;
}

/// `h(x) = w·x + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBarrier<T> {
    weights: Vec<T>,
    offset: T,
}

impl<T: Scalar> AffineBarrier<T> {
    pub fn new(weights: Vec<T>, offset: T) -> Self {
        Self { weights, offset }
    }

    /// Distance of the position coordinate `x[0]` beyond `threshold`, i.e.
    /// `h(x) = x₀ − threshold` on a state of dimension `dim`.
    pub fn position_margin(dim: usize, threshold: T) -> Self {
        let mut weights = vec![T::zero(); dim];
        weights[0] = T::one();
        Self::new(weights, -threshold)
    }

    /// The raw position `H(x) = x₀`.
    pub fn position(dim: usize) -> Self {
        Self::position_margin(dim, T::zero())
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn offset(&self) -> T {
        self.offset
    }
}

impl<T: Scalar> BarrierFunction<T> for AffineBarrier<T> {
    fn value(&self, x: &[T]) -> T {
        crate::scalar::dot(&self.weights, x) + self.offset
    }

    fn gradient(&self, _x: &[T]) -> Vec<T> {
        self.weights.clone()
    }

    fn hessian(&self, _x: &[T]) -> Vec<Vec<T>> {
        let n = self.weights.len();
        vec![vec![T::zero(); n]; n]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKKind {
    Linear,
}

/// Extended class-K function. Only the linear family `α(r) = γ·r` exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassKFn<T> {
    kind: ClassKKind,
    gain: T,
}

impl<T: Scalar> ClassKFn<T> {
    pub fn linear(gain: T) -> Result<Self, BarrierError> {
        positive("gamma", gain)?;
        Ok(Self {
            kind: ClassKKind::Linear,
            gain,
        })
    }

    pub fn kind(&self) -> ClassKKind {
        self.kind
    }

    pub fn gain(&self) -> T {
        self.gain
    }

    pub fn eval(&self, r: T) -> T {
        match self.kind {
            ClassKKind::Linear => self.gain * r,
        }
    }
}

pub(crate) fn positive<T: Scalar>(name: &'static str, value: T) -> Result<T, BarrierError> {
    if value > T::zero() {
        Ok(value)
    } else {
        Err(BarrierError::NonPositiveGain {
            name,
            value: crate::scalar::to_f64(value),
        })
    }
}

pub(crate) fn finite_input<T: Scalar>(x: &[T]) -> Result<(), BarrierError> {
    if x.iter().any(|v| v.is_nan()) {
        Err(BarrierError::NotANumber)
    } else {
        Ok(())
    }
}
