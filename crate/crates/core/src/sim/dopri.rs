//! Dormand–Prince 5(4) with Hairer's PI step-size controller and the
//! method's native fourth-order continuous extension.

use crate::scalar::{lit, Scalar};

// Butcher tableau.
#[cfg(test)]
const C2: f64 = 1.0 / 5.0;
#[cfg(test)]
const C3: f64 = 3.0 / 10.0;
#[cfg(test)]
const C4: f64 = 4.0 / 5.0;
#[cfg(test)]
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// 5th minus embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Mixed absolute/relative error tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rel: T,
    pub abs: T,
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment<T> {
    pub t0: T,
    pub h: T,
    coeffs: [Vec<T>; 5],
}

impl<T: Scalar> DenseSegment<T> {
    pub fn t1(&self) -> T {
        self.t0 + self.h
    }

    pub fn start_state(&self) -> &[T] {
        &self.coeffs[0]
    }

    /// End state, exactly as produced by the step.
    pub fn end_state(&self) -> Vec<T> {
        self.coeffs[0]
            .iter()
            .zip(&self.coeffs[1])
            .map(|(&a, &b)| a + b)
            .collect()
    }

    /// Interpolated state at `t`; `t` is clamped to the segment.
    pub fn eval(&self, t: T) -> Vec<T> {
        if t >= self.t1() {
            return self.end_state();
        }
        let theta = ((t - self.t0) / self.h).max(T::zero());
        let theta1 = T::one() - theta;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        (0..r1.len())
            .map(|i| r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i]))))
            .collect()
    }
}

/// Piecewise dense solution built from consecutive accepted steps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DenseSolution<T> {
    segments: Vec<DenseSegment<T>>,
}

impl<T: Scalar> DenseSolution<T> {
    pub fn new() -> Self {
        Self {
            segments: Vec::new(),
        }
    }

    pub fn push(&mut self, segment: DenseSegment<T>) {
        self.segments.push(segment);
    }

    pub fn segments(&self) -> &[DenseSegment<T>] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn t_start(&self) -> Option<T> {
        self.segments.first().map(|s| s.t0)
    }

    pub fn t_end(&self) -> Option<T> {
        self.segments.last().map(|s| s.t1())
    }

    pub fn eval(&self, t: T) -> Option<Vec<T>> {
        let idx = self.segments.partition_point(|s| s.t1() < t);
        self.segments
            .get(idx.min(self.segments.len().checked_sub(1)?))
            .map(|s| s.eval(t))
    }

    /// Accepted step end points `(t, x)`, including the initial state.
    pub fn nodes(&self) -> impl Iterator<Item = (T, Vec<T>)> + '_ {
        let first = self
            .segments
            .first()
            .map(|s| (s.t0, s.start_state().to_vec()));
        first
            .into_iter()
            .chain(self.segments.iter().map(|s| (s.t1(), s.end_state())))
    }
}

/// Resamples a dense solution onto the uniform grid `t₀ + k·step` covering
/// the solved interval.
pub fn dense_sample<T: Scalar>(solution: &DenseSolution<T>, output_step: T) -> Vec<(T, Vec<T>)> {
    let (Some(t0), Some(t1)) = (solution.t_start(), solution.t_end()) else {
        return Vec::new();
    };
    if !(output_step > T::zero()) {
        return Vec::new();
    }
    let count = ((t1 - t0) / output_step + lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    let mut out = Vec::with_capacity(count + 1);
    let mut seg = 0;
    let segs = solution.segments();
    for k in 0..=count {
        let t = (t0 + T::from_usize(k).expect("grid index") * output_step).min(t1);
        while seg + 1 < segs.len() && segs[seg].t1() < t {
            seg += 1;
        }
        out.push((t, segs[seg].eval(t)));
    }
    out
}

pub(crate) struct Attempt<T> {
    pub y1: Vec<T>,
    /// Scaled RMS error; the step is acceptable when ≤ 1.
    pub error: T,
    pub segment: DenseSegment<T>,
}

/// One Dormand–Prince step of size `h` from `(t, y)` for an autonomous
/// right-hand side. Right-hand-side failures abort the attempt.
pub(crate) fn attempt<T, E, F>(
    rhs: &mut F,
    t: T,
    y: &[T],
    h: T,
    tol: &Tolerances<T>,
) -> Result<Attempt<T>, E>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<Vec<T>, E>,
{
    let n = y.len();
    let stage = |weights: &[(f64, &Vec<T>)]| -> Vec<T> {
        (0..n)
            .map(|i| {
                y[i] + h * weights
                    .iter()
                    .fold(T::zero(), |acc, (w, k)| acc + lit::<T>(*w) * k[i])
            })
            .collect()
    };
    let k1 = rhs(y)?;
    let k2 = rhs(&stage(&[(A21, &k1)]))?;
    let k3 = rhs(&stage(&[(A31, &k1), (A32, &k2)]))?;
    let k4 = rhs(&stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = rhs(&stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = rhs(&stage(&[
        (A61, &k1),
        (A62, &k2),
        (A63, &k3),
        (A64, &k4),
        (A65, &k5),
    ]))?;
    let y1 = stage(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = rhs(&y1)?;

    let mut sum = T::zero();
    for i in 0..n {
        let e = h
            * (lit::<T>(E1) * k1[i]
                + lit::<T>(E3) * k3[i]
                + lit::<T>(E4) * k4[i]
                + lit::<T>(E5) * k5[i]
                + lit::<T>(E6) * k6[i]
                + lit::<T>(E7) * k7[i]);
        let scale = tol.abs + tol.rel * y[i].abs().max(y1[i].abs());
        sum = sum + (e / scale) * (e / scale);
    }
    let error = (sum / T::from_usize(n.max(1)).expect("dimension")).sqrt();

    let ydiff: Vec<T> = (0..n).map(|i| y1[i] - y[i]).collect();
    let bspl: Vec<T> = (0..n).map(|i| h * k1[i] - ydiff[i]).collect();
    let r4: Vec<T> = (0..n).map(|i| ydiff[i] - h * k7[i] - bspl[i]).collect();
    let r5: Vec<T> = (0..n)
        .map(|i| {
            h * (lit::<T>(D1) * k1[i]
                + lit::<T>(D3) * k3[i]
                + lit::<T>(D4) * k4[i]
                + lit::<T>(D5) * k5[i]
                + lit::<T>(D6) * k6[i]
                + lit::<T>(D7) * k7[i])
        })
        .collect();
    let segment = DenseSegment {
        t0: t,
        h,
        coeffs: [y.to_vec(), ydiff, bspl, r4, r5],
    };
    Ok(Attempt { y1, error, segment })
}

/// Hairer's PI controller (β = 0.04).
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl<T> {
    previous_error: T,
}

impl<T: Scalar> StepControl<T> {
    const SAFETY: f64 = 0.9;
    const BETA: f64 = 0.04;
    const MAX_GROWTH: f64 = 5.0;
    const MAX_SHRINK: f64 = 10.0;

    pub fn new() -> Self {
        Self {
            previous_error: lit(1e-4),
        }
    }

    fn fac11(error: T) -> T {
        error.max(lit(1e-300)).powf(lit(0.2 - Self::BETA * 0.75))
    }

    pub fn accepted(&mut self, h: T, error: T, after_reject: bool) -> T {
        let fac = Self::fac11(error) / self.previous_error.powf(lit(Self::BETA));
        let fac = (fac / lit(Self::SAFETY))
            .min(lit(Self::MAX_SHRINK))
            .max(lit(1.0 / Self::MAX_GROWTH));
        self.previous_error = error.max(lit(1e-4));
        let next = h / fac;
        if after_reject {
            next.min(h)
        } else {
            next
        }
    }

    pub fn rejected(&self, h: T, error: T) -> T {
        h / (Self::fac11(error) / lit(Self::SAFETY)).min(lit(Self::MAX_SHRINK))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError<E> {
    #[error("step size {step} fell below the minimum at t = {time}")]
    StepUnderflow { time: f64, step: f64 },
    #[error("right-hand side failed at t = {time}")]
    Rhs { time: f64, source: E },
    #[error("exceeded {0} steps")]
    TooManySteps(usize),
}

/// Integrates an autonomous ODE `ẏ = f(y)` over `[t0, t_end]` and returns
/// the dense solution.
pub fn solve<T, E, F>(
    mut rhs: F,
    y0: &[T],
    t0: T,
    t_end: T,
    tol: Tolerances<T>,
    min_step: T,
) -> Result<DenseSolution<T>, SolveError<E>>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<Vec<T>, E>,
{
    const MAX_STEPS: usize = 10_000_000;
    let mut solution = DenseSolution::new();
    let mut control = StepControl::new();
    let (mut t, mut y) = (t0, y0.to_vec());
    let mut h = ((t_end - t0) * lit(1e-3)).max(min_step);
    let mut rejected = false;
    let mut steps = 0;
    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(SolveError::TooManySteps(MAX_STEPS));
        }
        let remaining = t_end - t;
        let h_try = h.min(remaining);
        let step = attempt(&mut rhs, t, &y, h_try, &tol).map_err(|source| SolveError::Rhs {
            time: t.to_f64().unwrap_or(f64::NAN),
            source,
        })?;
        if step.error <= T::one() {
            h = control.accepted(h_try, step.error, rejected);
            rejected = false;
            t = if h_try == remaining { t_end } else { t + h_try };
            y = step.y1;
            solution.push(step.segment);
        } else {
            h = control.rejected(h_try, step.error);
            rejected = true;
            if h < min_step {
                return Err(SolveError::StepUnderflow {
                    time: t.to_f64().unwrap_or(f64::NAN),
                    step: h.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn decay() -> DenseSolution<f64> {
        solve(
            |y: &[f64]| Ok::<_, Infallible>(vec![-y[0]]),
            &[1.0],
            0.0,
            8.0,
            Tolerances {
                rel: 1e-10,
                abs: 1e-12,
            },
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn tableau_rows_are_consistent() {
        assert!((A21 - C2).abs() < 1e-15);
        assert!((A31 + A32 - C3).abs() < 1e-15);
        assert!((A41 + A42 + A43 - C4).abs() < 1e-15);
        assert!((A51 + A52 + A53 + A54 - C5).abs() < 1e-14);
        assert!((A61 + A62 + A63 + A64 + A65 - 1.0).abs() < 1e-14);
        assert!((A71 + A73 + A74 + A75 + A76 - 1.0).abs() < 1e-15);
        assert!((E1 + E3 + E4 + E5 + E6 + E7).abs() < 1e-15);
    }

    #[test]
    fn exponential_sampled_on_millisecond_grid() {
        let sol = decay();
        let grid = dense_sample(&sol, 1e-3);
        assert_eq!(grid.len(), 8001);
        let max_err = grid
            .iter()
            .map(|(t, y)| (y[0] - (-t).exp()).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-8, "max error {max_err}");
        assert_eq!(grid.last().unwrap().0, 8.0);
    }

    #[test]
    fn interpolant_is_fourth_order() {
        // Single step of size h; midpoint error should scale like h⁵.
        let tol = Tolerances { rel: 1.0, abs: 1.0 };
        let mut rhs = |y: &[f64]| Ok::<_, Infallible>(vec![-y[0]]);
        let errs: Vec<f64> = [0.2, 0.1]
            .iter()
            .map(|&h| {
                let a = attempt(&mut rhs, 0.0, &[1.0], h, &tol).unwrap();
                (a.segment.eval(0.37 * h)[0] - (-0.37 * h).exp()).abs()
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 4.0, "observed local order {order}");
    }

    #[test]
    fn constant_solution_stays_constant() {
        let sol = solve(
            |_y: &[f64]| Ok::<_, Infallible>(vec![0.0, 0.0]),
            &[3.0, -1.0],
            0.0,
            1.0,
            Tolerances {
                rel: 1e-8,
                abs: 1e-10,
            },
            1e-12,
        )
        .unwrap();
        for (_, y) in dense_sample(&sol, 1e-3) {
            assert_eq!(y, vec![3.0, -1.0]);
        }
    }

    #[test]
    fn empty_solution_samples_nothing() {
        let sol = DenseSolution::<f64>::new();
        assert!(dense_sample(&sol, 1e-3).is_empty());
        assert!(sol.eval(0.5).is_none());
    }

    #[test]
    fn eval_picks_the_right_segment() {
        let sol = decay();
        for t in [0.0, 0.123, 1.0, 4.56789, 8.0] {
            assert!((sol.eval(t).unwrap()[0] - (-t).exp()).abs() < 1e-9);
        }
        assert!(sol.nodes().count() == sol.segments().len() + 1);
    }

    #[test]
    fn rhs_failure_is_reported() {
        let err = solve(
            |y: &[f64]| {
                if y[0] < 0.5 {
                    Err("left domain")
                } else {
                    Ok(vec![-1.0])
                }
            },
            &[1.0],
            0.0,
            1.0,
            Tolerances {
                rel: 1e-8,
                abs: 1e-10,
            },
            1e-12,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SolveError::Rhs {
                source: "left domain",
                ..
            }
        ));
    }
}
