use super::{
    finite_input, positive, AffineBarrier, BarrierError, BarrierFunction, ClassKFn, GracefulBarrier,
};
use crate::plant::{lie, ControlAffine};
use crate::scalar::{to_f64, Scalar};

/// Half-space `normal·u ≥ offset` in control space.
///
/// Scalar constraints are normalized so the normal is `±1`; for the plants
/// in this crate it is `+1` and `offset` is the safe lower bound `u_sf`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineControlConstraint<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> AffineControlConstraint<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Self {
        Self { normal, offset }
    }

    /// `u ≥ bound`.
    pub fn lower_bound(bound: T) -> Self {
        Self::new(vec![T::one()], bound)
    }

    /// Builds `a·u ≥ c` for a scalar input and rescales it to a unit normal.
    fn scalar(a: T, c: T) -> Result<Self, BarrierError> {
        if a == T::zero() {
            return Err(BarrierError::DegenerateConstraint);
        }
        let out = if a > T::zero() {
            Self::new(vec![T::one()], c / a)
        } else {
            Self::new(vec![-T::one()], c / -a)
        };
        if out.offset.is_nan() {
            return Err(BarrierError::NotANumber);
        }
        Ok(out)
    }

    /// The bound `u_sf` when this is a scalar lower bound `u ≥ u_sf`.
    pub fn as_lower_bound(&self) -> Option<T> {
        (self.normal.len() == 1 && self.normal[0] == T::one()).then_some(self.offset)
    }

    pub fn is_satisfied(&self, u: &[T]) -> bool {
        crate::scalar::dot(&self.normal, u) >= self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Zeroing,
    Reciprocal,
    Exponential,
    Graceful1,
    Graceful2,
}

/// A barrier together with the gains of one constraint family.
#[derive(Debug, Clone, PartialEq)]
pub enum BarrierSpec<T, B = AffineBarrier<T>> {
    /// `ḣ ≥ −α(h)`
    Zeroing { barrier: B, alpha: ClassKFn<T> },
    /// Canonical `B = 1/h` with `Ḃ ≤ α₃(h)`
    Reciprocal { barrier: B, alpha: ClassKFn<T> },
    /// `ḧ + (γ₁+γ₂)ḣ + γ₁γ₂h ≥ 0`
    Exponential {
        barrier: B,
        alpha1: ClassKFn<T>,
        alpha2: ClassKFn<T>,
    },
    /// `ḣ_g ≥ −β(h_g/(h_g+1))`
    Graceful1 {
        barrier: GracefulBarrier<T, B>,
        beta: ClassKFn<T>,
    },
    /// `ḧ_g ≥ −2ζω_n·ḣ_g − ω_n²·h_g/(h_g+1)`
    Graceful2 {
        barrier: GracefulBarrier<T, B>,
        damping: T,
        natural_frequency: T,
    },
}

impl<T: Scalar, B: BarrierFunction<T>> BarrierSpec<T, B> {
    pub fn graceful2(
        barrier: GracefulBarrier<T, B>,
        damping: T,
        natural_frequency: T,
    ) -> Result<Self, BarrierError> {
        positive("zeta", damping)?;
        positive("omega_n", natural_frequency)?;
        Ok(Self::Graceful2 {
            barrier,
            damping,
            natural_frequency,
        })
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Zeroing { .. } => Family::Zeroing,
            Self::Reciprocal { .. } => Family::Reciprocal,
            Self::Exponential { .. } => Family::Exponential,
            Self::Graceful1 { .. } => Family::Graceful1,
            Self::Graceful2 { .. } => Family::Graceful2,
        }
    }

    /// Control-space constraint of this barrier at state `x`.
    pub fn constraint<P: ControlAffine<T>>(
        &self,
        plant: &P,
        x: &[T],
    ) -> Result<AffineControlConstraint<T>, BarrierError> {
        match self {
            Self::Zeroing { barrier, alpha } => zeroing_constraint(plant, barrier, alpha, x),
            Self::Reciprocal { barrier, alpha } => reciprocal_constraint(plant, barrier, alpha, x),
            Self::Exponential {
                barrier,
                alpha1,
                alpha2,
            } => exponential_constraint(plant, barrier, alpha1.gain(), alpha2.gain(), x),
            Self::Graceful1 { barrier, beta } => graceful1_constraint(plant, barrier, beta, x),
            Self::Graceful2 {
                barrier,
                damping,
                natural_frequency,
            } => graceful2_constraint(plant, barrier, *damping, *natural_frequency, x),
        }
    }
}

/// First-order Lie derivatives `(L_f h, L_g h)`.
fn first_order<T: Scalar, P: ControlAffine<T>, B: BarrierFunction<T>>(
    plant: &P,
    barrier: &B,
    x: &[T],
) -> (T, T) {
    let grad = barrier.gradient(x);
    (lie(&grad, &plant.drift(x)), lie(&grad, &plant.input_map(x)))
}

/// Second-order terms `(L_f h, L_f² h, L_g L_f h)` for a barrier whose first
/// derivative does not depend on the input.
fn second_order<T: Scalar, P: ControlAffine<T>, B: BarrierFunction<T>>(
    plant: &P,
    barrier: &B,
    x: &[T],
) -> Result<(T, T, T), BarrierError> {
    let grad = barrier.gradient(x);
    let f = plant.drift(x);
    let g = plant.input_map(x);
    if lie(&grad, &g) != T::zero() {
        return Err(BarrierError::RelativeDegreeMismatch);
    }
    let hess = barrier.hessian(x);
    let jac = plant.drift_jacobian(x);
    let n = grad.len();
    // ∇(L_f h) = ∇²h·f + J_fᵀ·∇h
    let grad_lf: Vec<T> = (0..n)
        .map(|i| {
            let curvature = lie(&hess[i], &f);
            let transport = (0..n).fold(T::zero(), |acc, k| acc + jac[k][i] * grad[k]);
            curvature + transport
        })
        .collect();
    Ok((lie(&grad, &f), lie(&grad_lf, &f), lie(&grad_lf, &g)))
}

/// Zeroing CBF: `ḣ(x,u) ≥ −α(h(x))`.
pub fn zeroing_constraint<T, P, B>(
    plant: &P,
    barrier: &B,
    alpha: &ClassKFn<T>,
    x: &[T],
) -> Result<AffineControlConstraint<T>, BarrierError>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    finite_input(x)?;
    let h = barrier.value(x);
    let (lf, lg) = first_order(plant, barrier, x);
    AffineControlConstraint::scalar(lg, -alpha.eval(h) - lf)
}

/// Canonical reciprocal CBF `B = 1/h`.
///
/// `Ḃ = −ḣ/h² ≤ α₃(h)` is rearranged to `ḣ ≥ −α₃(h)·h²`, which is affine in
/// `u`. Defined only where `h > 0`.
pub fn reciprocal_constraint<T, P, B>(
    plant: &P,
    barrier: &B,
    alpha: &ClassKFn<T>,
    x: &[T],
) -> Result<AffineControlConstraint<T>, BarrierError>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    finite_input(x)?;
    let h = barrier.value(x);
    if !(h > T::zero()) {
        return Err(BarrierError::OutsideDomain { h: to_f64(h) });
    }
    let (lf, lg) = first_order(plant, barrier, x);
    AffineControlConstraint::scalar(lg, -alpha.eval(h) * h * h - lf)
}

/// Exponential CBF for relative degree 2:
/// `ḧ + (γ₁+γ₂)ḣ + γ₁γ₂h ≥ 0`.
pub fn exponential_constraint<T, P, B>(
    plant: &P,
    barrier: &B,
    gamma1: T,
    gamma2: T,
    x: &[T],
) -> Result<AffineControlConstraint<T>, BarrierError>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    positive("gamma1", gamma1)?;
    positive("gamma2", gamma2)?;
    finite_input(x)?;
    let h = barrier.value(x);
    let (lf, lff, lglf) = second_order(plant, barrier, x)?;
    AffineControlConstraint::scalar(lglf, -lff - (gamma1 + gamma2) * lf - gamma1 * gamma2 * h)
}

/// High-order barrier `h₂(x) = ḣ(x) + α(h(x))`.
pub fn high_order_h2<T, P, B>(
    plant: &P,
    barrier: &B,
    alpha: &ClassKFn<T>,
    x: &[T],
) -> Result<T, BarrierError>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    finite_input(x)?;
    let (lf, lg) = first_order(plant, barrier, x);
    if lg != T::zero() {
        return Err(BarrierError::RelativeDegreeMismatch);
    }
    let h2 = lf + alpha.eval(barrier.value(x));
    if h2.is_nan() {
        return Err(BarrierError::NotANumber);
    }
    Ok(h2)
}

/// `h_g/(h_g+1)`, the stiffening term. Errors at or past the pole.
fn stiffening<T: Scalar>(hg: T) -> Result<T, BarrierError> {
    if hg.is_nan() {
        return Err(BarrierError::NotANumber);
    }
    if !(hg > -T::one()) {
        return Err(BarrierError::CatastropheBoundary { hg: to_f64(hg) });
    }
    Ok(hg / (hg + T::one()))
}

/// First-order graceful constraint `ḣ_g ≥ −β(h_g/(h_g+1))`.
pub fn graceful1_constraint<T, P, B>(
    plant: &P,
    barrier: &GracefulBarrier<T, B>,
    beta: &ClassKFn<T>,
    x: &[T],
) -> Result<AffineControlConstraint<T>, BarrierError>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    finite_input(x)?;
    let r = stiffening(barrier.value(x))?;
    let (lf, lg) = first_order(plant, barrier, x);
    AffineControlConstraint::scalar(lg, -beta.eval(r) - lf)
}

/// Second-order graceful constraint
/// `ḧ_g ≥ −2ζω_n·ḣ_g − ω_n²·h_g/(h_g+1)`.
pub fn graceful2_constraint<T, P, B>(
    plant: &P,
    barrier: &GracefulBarrier<T, B>,
    damping: T,
    natural_frequency: T,
    x: &[T],
) -> Result<AffineControlConstraint<T>, BarrierError>
where
    T: Scalar,
    P: ControlAffine<T>,
    B: BarrierFunction<T>,
{
    positive("zeta", damping)?;
    let wn = positive("omega_n", natural_frequency)?;
    finite_input(x)?;
    let r = stiffening(barrier.value(x))?;
    let (lf, lff, lglf) = second_order(plant, barrier, x)?;
    let two = T::one() + T::one();
    AffineControlConstraint::scalar(lglf, -lff - two * damping * wn * lf - wn * wn * r)
}
