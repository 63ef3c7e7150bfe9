use super::SimError;
use crate::scalar::{lit, Scalar};

/// Width below which [`locate_event`] stops bisecting, in seconds.
pub const EVENT_RESOLUTION: f64 = 1e-9;
pub const MAX_BISECTIONS: usize = 60;

/// Root of a scalar event function on `(t_lo, t_hi)` by bisection. Returns
/// the midpoint of the final bracket, whose width is at most
/// [`EVENT_RESOLUTION`] unless the iteration cap is hit first.
pub fn locate_event<T: Scalar>(
    bracket: (T, T),
    event_fn: impl FnMut(T) -> T,
) -> Result<T, SimError> {
    let (lo, hi) = bisect(bracket, event_fn, lit(EVENT_RESOLUTION), MAX_BISECTIONS)?;
    Ok((lo + hi) / lit(2.0))
}

/// Bisection returning the final bracket. The sign of `f(lo)` is the sign of
/// the function at the original lower end.
pub(crate) fn bisect<T: Scalar>(
    (mut lo, mut hi): (T, T),
    mut f: impl FnMut(T) -> T,
    width: T,
    max_iter: usize,
) -> Result<(T, T), SimError> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(SimError::NoSignChange);
    }
    if f_lo == T::zero() {
        return Ok((lo, lo));
    }
    if f_hi == T::zero() {
        return Ok((hi, hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(SimError::NoSignChange);
    }
    let lo_positive = f_lo > T::zero();
    for _ in 0..max_iter {
        if hi - lo <= width {
            break;
        }
        let mid = (lo + hi) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok((mid, mid));
        }
        if (fm > T::zero()) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_crossing() {
        let t = locate_event((0.5, 1.5), |t: f64| 1.0 - t).unwrap();
        assert!((t - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn quadratic_crossing() {
        let t = locate_event((0.0, 2.0), |t: f64| (t - 2.0).powi(2) - 1.0).unwrap();
        assert!((t - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn no_crossing() {
        assert_eq!(
            locate_event((0.0, 1.0), |t: f64| t + 1.0),
            Err(SimError::NoSignChange)
        );
        assert_eq!(
            locate_event((0.0, 1.0), |_t: f64| f64::NAN),
            Err(SimError::NoSignChange)
        );
    }

    #[test]
    fn exact_zero_at_an_end() {
        assert_eq!(locate_event((0.0, 1.0), |t: f64| t), Ok(0.0));
        assert_eq!(locate_event((0.0, 1.0), |t: f64| 1.0 - t), Ok(1.0));
    }

    #[test]
    fn bracket_width_and_iteration_cap() {
        let mut calls = 0;
        let (lo, hi) = bisect(
            (0.0, 8.0),
            |t: f64| {
                calls += 1;
                t - 3.3
            },
            1e-9,
            60,
        )
        .unwrap();
        assert!(hi - lo <= 1e-9 && lo <= 3.3 && 3.3 <= hi);
        assert!(calls <= 62);
    }
}
