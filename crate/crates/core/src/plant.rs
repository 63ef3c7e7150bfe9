//! Control-affine plant models `ẋ = f(x) + g(x)·u` with a scalar input.

use crate::scalar::{dot, Scalar};

/// A control-affine system with a single input channel.
///
/// Implementations must be locally Lipschitz on the simulated domain. The
/// drift Jacobian is needed to form second-order Lie derivatives of a
/// barrier when the input only appears in its second time derivative.
pub trait ControlAffine<T: Scalar> {
    fn state_dim(&self) -> usize;

    /// Drift `f(x)`.
    fn drift(&self, x: &[T]) -> Vec<T>;

    /// Input map `g(x)` for the single input.
    fn input_map(&self, x: &[T]) -> Vec<T>;

    /// Row-major Jacobian of the drift, `J[i][j] = ∂f_i/∂x_j`.
    fn drift_jacobian(&self, x: &[T]) -> Vec<Vec<T>>;

    /// Closed-loop vector field for a given input value.
    fn vector_field(&self, x: &[T], u: T) -> Vec<T> {
        let f = self.drift(x);
        let g = self.input_map(x);
        f.iter().zip(&g).map(|(&fi, &gi)| fi + gi * u).collect()
    }
}

/// `ẋ = u`: the input actuates velocity directly (relative degree 1 for
/// position barriers).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FirstOrderIntegrator;

/// `ẍ = u` with state `(x, ẋ)`: the input actuates acceleration (relative
/// degree 2 for position barriers).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleIntegrator;

impl<T: Scalar> ControlAffine<T> for FirstOrderIntegrator {
    fn state_dim(&self) -> usize {
        1
    }

    fn drift(&self, _x: &[T]) -> Vec<T> {
        vec![T::zero()]
    }

    fn input_map(&self, _x: &[T]) -> Vec<T> {
        vec![T::one()]
    }

    fn drift_jacobian(&self, _x: &[T]) -> Vec<Vec<T>> {
        vec![vec![T::zero()]]
    }
}

impl<T: Scalar> ControlAffine<T> for DoubleIntegrator {
    fn state_dim(&self) -> usize {
        2
    }

    fn drift(&self, x: &[T]) -> Vec<T> {
        vec![x[1], T::zero()]
    }

    fn input_map(&self, _x: &[T]) -> Vec<T> {
        vec![T::zero(), T::one()]
    }

    fn drift_jacobian(&self, _x: &[T]) -> Vec<Vec<T>> {
        vec![vec![T::zero(), T::one()], vec![T::zero(), T::zero()]]
    }
}

/// The two plants used by the wall-collision experiments, as one type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegratorPlant {
    FirstOrder,
    DoubleIntegrator,
}

impl<T: Scalar> ControlAffine<T> for IntegratorPlant {
    fn state_dim(&self) -> usize {
        match self {
            Self::FirstOrder => ControlAffine::<T>::state_dim(&FirstOrderIntegrator),
            Self::DoubleIntegrator => ControlAffine::<T>::state_dim(&DoubleIntegrator),
        }
    }

    fn drift(&self, x: &[T]) -> Vec<T> {
        match self {
            Self::FirstOrder => FirstOrderIntegrator.drift(x),
            Self::DoubleIntegrator => DoubleIntegrator.drift(x),
        }
    }

    fn input_map(&self, x: &[T]) -> Vec<T> {
        match self {
            Self::FirstOrder => FirstOrderIntegrator.input_map(x),
            Self::DoubleIntegrator => DoubleIntegrator.input_map(x),
        }
    }

    fn drift_jacobian(&self, x: &[T]) -> Vec<Vec<T>> {
        match self {
            Self::FirstOrder => FirstOrderIntegrator.drift_jacobian(x),
            Self::DoubleIntegrator => DoubleIntegrator.drift_jacobian(x),
        }
    }
}

/// Lie derivative `∇φ · v`.
#[inline]
pub(crate) fn lie<T: Scalar>(gradient: &[T], field: &[T]) -> T {
    dot(gradient, field)
}
