use super::{finite_input, positive, AffineBarrier, BarrierError, BarrierFunction};
use crate::scalar::{to_f64, Scalar};

/// Maps a raw safety measure onto the graceful scale: `b ↦ 0` and `a ↦ −1`.
///
/// Returns `(H − b)/(b − a)`. Requires `a < b`.
pub fn layer_transform<T: Scalar>(raw: T, catastrophe: T, primary: T) -> Result<T, BarrierError> {
    if !(catastrophe < primary) {
        return Err(BarrierError::DegenerateLayers {
            catastrophe: to_f64(catastrophe),
            primary: to_f64(primary),
        });
    }
    if raw.is_nan() {
        return Err(BarrierError::NotANumber);
    }
    Ok((raw - primary) / (primary - catastrophe))
}

/// Which safety layer a graceful barrier value falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SafetyRegion {
    /// `h_g ≥ 0`
    Safe,
    /// `−1 < h_g < 0`
    Danger,
    /// `h_g ≤ −1`
    Catastrophe,
}

impl SafetyRegion {
    pub fn classify<T: Scalar>(hg: T) -> Result<Self, BarrierError> {
        classify_region(hg)
    }
}

pub fn classify_region<T: Scalar>(hg: T) -> Result<SafetyRegion, BarrierError> {
    if hg.is_nan() {
        Err(BarrierError::NotANumber)
    } else if hg >= T::zero() {
        Ok(SafetyRegion::Safe)
    } else if hg > -T::one() {
        Ok(SafetyRegion::Danger)
    } else {
        Ok(SafetyRegion::Catastrophe)
    }
}

/// A raw barrier `H` with a primary threshold `b` and a catastrophe
/// threshold `a < b`. As a [`BarrierFunction`] it evaluates `h_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct GracefulBarrier<T, B = AffineBarrier<T>> {
    raw: B,
    primary: T,
    catastrophe: T,
}

impl<T: Scalar, B: BarrierFunction<T>> GracefulBarrier<T, B> {
    pub fn new(raw: B, catastrophe: T, primary: T) -> Result<Self, BarrierError> {
        // validates the ordering
        layer_transform(primary, catastrophe, primary)?;
        Ok(Self {
            raw,
            primary,
            catastrophe,
        })
    }

    pub fn raw(&self) -> &B {
        &self.raw
    }

    pub fn primary_threshold(&self) -> T {
        self.primary
    }

    pub fn catastrophe_threshold(&self) -> T {
        self.catastrophe
    }

    /// Layer width `b − a`.
    pub fn width(&self) -> T {
        self.primary - self.catastrophe
    }

    /// `H(x) − b`, the primary-layer margin in raw units.
    pub fn primary_margin(&self, x: &[T]) -> T {
        self.raw.value(x) - self.primary
    }

    pub fn region(&self, x: &[T]) -> Result<SafetyRegion, BarrierError> {
        finite_input(x)?;
        classify_region(self.value(x))
    }
}

impl<T: Scalar, B: BarrierFunction<T>> BarrierFunction<T> for GracefulBarrier<T, B> {
    fn value(&self, x: &[T]) -> T {
        (self.raw.value(x) - self.primary) / self.width()
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let w = self.width();
        self.raw.gradient(x).into_iter().map(|g| g / w).collect()
    }

    fn hessian(&self, x: &[T]) -> Vec<Vec<T>> {
        let w = self.width();
        self.raw
            .hessian(x)
            .into_iter()
            .map(|row| row.into_iter().map(|v| v / w).collect())
            .collect()
    }
}

/// Positive gains `(γ₁, γ₂)`, `γ₁ ≤ γ₂`, such that `−γ₁` and `−γ₂` are the
/// roots of `λ² + 2ζω_n·λ + ω_n² = 0`.
///
/// Only the real-root branch (`ζ ≥ 1`) is accepted. The smaller root is
/// formed as `ω_n²/γ₂` so that the product identity holds to rounding.
pub fn characteristic_roots<T: Scalar>(zeta: T, omega_n: T) -> Result<(T, T), BarrierError> {
    positive("omega_n", omega_n)?;
    if zeta.is_nan() {
        return Err(BarrierError::NotANumber);
    }
    if zeta < T::one() {
        return Err(BarrierError::ComplexRoots { zeta: to_f64(zeta) });
    }
    let disc = (zeta * zeta - T::one()).sqrt();
    let fast = omega_n * (zeta + disc);
    let slow = omega_n * omega_n / fast;
    Ok((slow, fast))
}
