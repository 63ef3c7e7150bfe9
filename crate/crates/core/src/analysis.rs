//! Lyapunov candidates, the implicit return-time bound of the first-order
//! graceful constraint, and post-hoc monitors over recorded trajectories.

use crate::scalar::{lit, to_f64, Scalar};
use crate::sim::Trajectory;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("trajectory does not record `{0}`")]
    MissingSignal(&'static str),
    #[error("set {0:?} needs the characteristic gains (gamma1, gamma2)")]
    MissingGains(InvariantSet),
}

/// `V₁(h_g) = h_g − ln(h_g + 1)`, defined for `h_g > −1`.
pub fn lyapunov_v1<T: Scalar>(hg: T) -> Result<T, AnalysisError> {
    if !(hg > -T::one()) {
        return Err(AnalysisError::Domain(format!(
            "V1 needs h_g > -1, got {}",
            to_f64(hg)
        )));
    }
    Ok(hg - hg.ln_1p())
}

/// `V₂ = ½ḣ_g²(1 − Θ(ḣ_g)) + ω_n²·V₁(h_g)` with `Θ(0) = 1`.
pub fn lyapunov_v2<T: Scalar>(hg: T, hg_dot: T, omega_n: T) -> Result<T, AnalysisError> {
    if !(omega_n > T::zero()) {
        return Err(AnalysisError::Domain(format!(
            "omega_n must be positive, got {}",
            to_f64(omega_n)
        )));
    }
    let potential = omega_n * omega_n * lyapunov_v1(hg)?;
    let kinetic = if hg_dot < T::zero() {
        lit::<T>(0.5) * hg_dot * hg_dot
    } else {
        T::zero()
    };
    Ok(kinetic + potential)
}

/// Time for the equality dynamics `ḣ_g = −γ·h_g/(h_g+1)` to travel from
/// `start` to `end`, with `−1 < start ≤ end < 0`.
pub fn implicit_bound_time<T: Scalar>(start: T, end: T, gamma: T) -> Result<T, AnalysisError> {
    let neg_one = -T::one();
    if !(start > neg_one && start <= end && end < T::zero()) {
        return Err(AnalysisError::Domain(format!(
            "need -1 < start <= end < 0, got start {} end {}",
            to_f64(start),
            to_f64(end)
        )));
    }
    if !(gamma > T::zero()) {
        return Err(AnalysisError::Domain(format!(
            "gamma must be positive, got {}",
            to_f64(gamma)
        )));
    }
    let potential = |h: T| h + h.abs().ln();
    Ok(-(potential(end) - potential(start)) / gamma)
}

/// Lower bound on `h_g(t)` for a first-order graceful run started at
/// `hg0 ∈ (−1, 0)`: the inverse of [`implicit_bound_time`] at each time.
///
/// Solved by bisection on `s = ln(−h_g)`, which keeps full relative precision
/// as the bound approaches zero.
pub fn bound_trajectory<T: Scalar>(hg0: T, times: &[T], gamma: T) -> Result<Vec<T>, AnalysisError> {
    implicit_bound_time(hg0, hg0, gamma)?;
    let s0 = (-hg0).ln();
    let c = hg0 + s0;
    // τ(s) = (e^s − s + c)/γ, decreasing in s on s < 0
    let tau = |s: T| (s.exp() - s + c) / gamma;
    let tol = lit::<T>(1e-12);
    times
        .iter()
        .map(|&t| {
            if t.is_nan() || t < T::zero() {
                return Err(AnalysisError::Domain(format!(
                    "time must be >= 0, got {}",
                    to_f64(t)
                )));
            }
            if t == T::zero() {
                return Ok(hg0);
            }
            // τ(s) ≥ (c − s)/γ, so s = c − γt already overshoots t
            let (mut lo, mut hi) = (c - gamma * t, s0);
            for _ in 0..200 {
                if hi - lo <= tol {
                    break;
                }
                let mid = lo + (hi - lo) / lit(2.0);
                if tau(mid) > t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(-((lo + hi) / lit(2.0)).exp())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LyapunovCandidate<T> {
    /// First-order graceful candidate, checked where `h_g ∈ (−1, 0)`.
    V1,
    /// Second-order candidate, checked where `h_g ∈ (−1, 0)`.
    V2 { natural_frequency: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport<T> {
    /// Largest increase of `V` between consecutive eligible samples, floored
    /// at zero.
    pub max_increase: T,
    pub pairs_checked: usize,
    pub tolerance: T,
    pub holds: bool,
    /// Whether `ḣ_g` came from finite differences rather than the record.
    pub finite_differenced: bool,
}

/// Checks that the Lyapunov candidate does not increase along the danger
/// segments of a trajectory, sample to sample.
pub fn check_descent<T: Scalar>(
    trajectory: &Trajectory<T>,
    candidate: LyapunovCandidate<T>,
    tolerance: T,
) -> Result<DescentReport<T>, AnalysisError> {
    let hg = signal(trajectory, |v| v.hg, "hg")?;
    let (hg_dot, finite_differenced) = match signal(trajectory, |v| v.hg_dot, "hg_dot") {
        Ok(d) => (d, false),
        Err(_) => (central_difference(&trajectory.times, &hg), true),
    };
    let in_danger = |h: T| h > -T::one() && h < T::zero();
    let mut max_increase = T::zero();
    let mut pairs = 0;
    let mut prev: Option<T> = None;
    for (i, &h) in hg.iter().enumerate() {
        if !in_danger(h) {
            prev = None;
            continue;
        }
        let v = match candidate {
            LyapunovCandidate::V1 => lyapunov_v1(h)?,
            LyapunovCandidate::V2 { natural_frequency } => {
                lyapunov_v2(h, hg_dot[i], natural_frequency)?
            }
        };
        if let Some(p) = prev {
            max_increase = max_increase.max(v - p);
            pairs += 1;
        }
        prev = Some(v);
    }
    Ok(DescentReport {
        max_increase,
        pairs_checked: pairs,
        tolerance,
        holds: max_increase <= tolerance,
        finite_differenced,
    })
}

/// Sets whose forward invariance can be monitored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvariantSet {
    /// Primary safe set, `h ≥ 0`.
    Safe,
    /// `S ∪ D`, margin `h_g + 1`.
    Failsafe,
    /// `S ∩ S₂`, margin `min(h, h₂)`.
    SafeHighOrder,
    /// `S_g,1`, margin `min(h_g, ḣ_g + γ₁h_g)`.
    GracefulSlow,
    /// `S_g,2`, margin `min(h_g, ḣ_g + γ₂h_g)`.
    GracefulFast,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceParams<T> {
    pub tolerance: T,
    /// Characteristic gains `(γ₁, γ₂)` for the `S_g` sets.
    pub gains: Option<(T, T)>,
}

impl<T: Scalar> InvarianceParams<T> {
    pub fn new(tolerance: T) -> Self {
        Self {
            tolerance,
            gains: None,
        }
    }

    pub fn with_gains(mut self, gamma1: T, gamma2: T) -> Self {
        self.gains = Some((gamma1, gamma2));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport<T> {
    pub set: InvariantSet,
    pub min_margin: T,
    pub violated: bool,
    pub first_violation_time: Option<T>,
    /// The first sample is already outside the set, so no invariance claim
    /// applies to the run.
    pub starts_outside: bool,
}

pub fn check_invariance<T: Scalar>(
    trajectory: &Trajectory<T>,
    set: InvariantSet,
    params: &InvarianceParams<T>,
) -> Result<InvarianceReport<T>, AnalysisError> {
    let margins: Vec<T> = match set {
        InvariantSet::Safe => match signal(trajectory, |v| v.h, "h") {
            Ok(h) => h,
            Err(_) => signal(trajectory, |v| v.hg, "hg")?,
        },
        InvariantSet::Failsafe => signal(trajectory, |v| v.hg, "hg")?
            .into_iter()
            .map(|h| h + T::one())
            .collect(),
        InvariantSet::SafeHighOrder => {
            let h = signal(trajectory, |v| v.h, "h")?;
            let h2 = signal(trajectory, |v| v.h2, "h2")?;
            h.iter().zip(&h2).map(|(&a, &b)| a.min(b)).collect()
        }
        InvariantSet::GracefulSlow | InvariantSet::GracefulFast => {
            let (g1, g2) = params.gains.ok_or(AnalysisError::MissingGains(set))?;
            let gain = if set == InvariantSet::GracefulSlow {
                g1
            } else {
                g2
            };
            let hg = signal(trajectory, |v| v.hg, "hg")?;
            let hg_dot = signal(trajectory, |v| v.hg_dot, "hg_dot")?;
            hg.iter()
                .zip(&hg_dot)
                .map(|(&h, &d)| h.min(d + gain * h))
                .collect()
        }
    };
    let tol = params.tolerance;
    let min_margin = margins.iter().copied().fold(T::infinity(), T::min);
    let first_violation_time = margins
        .iter()
        .position(|&m| m < -tol)
        .map(|i| trajectory.times[i]);
    Ok(InvarianceReport {
        set,
        min_margin,
        violated: min_margin < -tol,
        first_violation_time,
        starts_outside: margins.first().is_some_and(|&m| m < -tol),
    })
}

fn signal<T: Scalar>(
    trajectory: &Trajectory<T>,
    pick: impl Fn(&crate::control::BarrierValues<T>) -> Option<T>,
    name: &'static str,
) -> Result<Vec<T>, AnalysisError> {
    trajectory
        .barrier_values
        .iter()
        .map(|v| pick(v).ok_or(AnalysisError::MissingSignal(name)))
        .collect()
}

/// Central differences on a possibly non-uniform grid, one-sided at the ends.
pub fn central_difference<T: Scalar>(times: &[T], values: &[T]) -> Vec<T> {
    let n = values.len();
    if n < 2 {
        return vec![T::zero(); n];
    }
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            (values[b] - values[a]) / (times[b] - times[a])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn v1_examples() {
        assert_eq!(lyapunov_v1(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(lyapunov_v1(-0.5).unwrap(), 0.193147, epsilon = 1e-6);
        assert_abs_diff_eq!(lyapunov_v1(1.0).unwrap(), 0.306853, epsilon = 1e-6);
        assert!(lyapunov_v1(-1.0).is_err());
        assert!(lyapunov_v1(f64::NAN).is_err());
    }

    #[test]
    fn v1_positive_with_unique_zero() {
        for i in 0..10_000 {
            // (−1, 0) ∪ (0, 10)
            let hg = -1.0 + 11.0 * (i as f64 + 0.5) / 10_000.0;
            if hg == 0.0 {
                continue;
            }
            assert!(lyapunov_v1(hg).unwrap() > 0.0, "V1({hg}) not positive");
        }
    }

    #[test]
    fn v1_diverges_at_pole() {
        let values: Vec<f64> = (1..=12)
            .map(|k| lyapunov_v1(-1.0 + 10f64.powi(-k)).unwrap())
            .collect();
        for w in values.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(values[11] > 25.0);
    }

    #[test]
    fn v2_examples() {
        assert_eq!(lyapunov_v2(0.0, 5.0, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            lyapunov_v2(-0.5, -1.0, 2.0).unwrap(),
            1.272589,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            lyapunov_v2(-0.5, 0.0, 2.0).unwrap(),
            0.772589,
            epsilon = 1e-6
        );
        assert!(lyapunov_v2(-1.5, 0.0, 2.0).is_err());
        assert!(lyapunov_v2(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn implicit_bound_examples() {
        assert_eq!(implicit_bound_time(-0.5, -0.5, 3.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            implicit_bound_time(-0.5, -0.25, 3.0).unwrap(),
            0.147716,
            epsilon = 1e-6
        );
        let expected = -(0.8 + (1.0f64 / 9.0).ln()) / 3.0;
        assert_abs_diff_eq!(
            implicit_bound_time(-0.9, -0.1, 3.0).unwrap(),
            expected,
            epsilon = 1e-9
        );
        assert!(implicit_bound_time(-0.25, -0.5, 3.0).is_err());
        assert!(implicit_bound_time(-1.0, -0.5, 3.0).is_err());
        assert!(implicit_bound_time(-0.5, 0.0, 3.0).is_err());
        assert!(implicit_bound_time(-0.5, -0.25, 0.0).is_err());
    }

    #[test]
    fn bound_trajectory_examples() {
        let t = implicit_bound_time(-0.5, -0.25, 3.0).unwrap();
        let b = bound_trajectory(-0.5, &[0.0, t, 100.0 / 3.0], 3.0).unwrap();
        assert_eq!(b[0], -0.5);
        assert_abs_diff_eq!(b[1], -0.25, epsilon = 1e-9);
        assert!(b[2] < 0.0 && b[2] > -1e-6);
        assert!(bound_trajectory(0.5, &[1.0], 3.0).is_err());
        assert!(bound_trajectory(-0.5, &[-1.0], 3.0).is_err());
    }

    #[test]
    fn bound_trajectory_strictly_increasing() {
        let times: Vec<f64> = (0..=8000).map(|k| k as f64 * 1e-3).collect();
        for hg0 in [-0.99, -0.5, -0.01] {
            let b = bound_trajectory(hg0, &times, 3.0).unwrap();
            for w in b.windows(2) {
                assert!(w[1] > w[0], "{:?}", w);
            }
            assert!(b.iter().all(|&v| v < 0.0));
        }
    }

    #[test]
    fn bound_trajectory_inverts_the_time_formula() {
        for hg0 in [-0.9, -0.3] {
            let times: Vec<f64> = (1..50).map(|k| k as f64 * 0.02).collect();
            let b = bound_trajectory(hg0, &times, 3.0).unwrap();
            for (t, h) in times.iter().zip(&b) {
                let back = implicit_bound_time(hg0, *h, 3.0).unwrap();
                assert_abs_diff_eq!(back, *t, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn central_difference_of_quadratic() {
        let t: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|v| v * v).collect();
        let d = central_difference(&t, &y);
        for i in 1..10 {
            assert_abs_diff_eq!(d[i], 2.0 * t[i], epsilon = 1e-12);
        }
    }
}
