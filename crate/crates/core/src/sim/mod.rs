//! Closed-loop simulation with collision and catastrophe events.

mod dopri;
mod event;

pub use dopri::{dense_sample, solve, DenseSegment, DenseSolution, SolveError, Tolerances};
pub use event::{locate_event, EVENT_RESOLUTION, MAX_BISECTIONS};

use crate::control::{BarrierValues, ControlError, Controller};
use crate::scalar::{lit, to_f64, Scalar};
use dopri::{attempt, StepControl};
use event::bisect;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("step size {step:e} fell below the minimum at t = {time}")]
    StepUnderflow { time: f64, step: f64 },
    #[error("controller undefined at t = {time}: {source}")]
    ControllerUndefined { time: f64, source: ControlError },
    #[error("event function does not change sign on the bracket")]
    NoSignChange,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("initial state is not finite")]
    NonFiniteInitialState,
    #[error("initial state has dimension {got}, plant expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exceeded {0} integrator steps")]
    TooManySteps(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    pub horizon: T,
    pub output_step: T,
    pub rel_tol: T,
    pub abs_tol: T,
    pub min_step: T,
    /// Wall position `x_w`; collision detection is off when `None`.
    pub wall_position: Option<T>,
    pub max_steps: usize,
}

impl<T: Scalar> Default for SimConfig<T> {
    /// 8 s horizon on a 1 ms grid.
    fn default() -> Self {
        Self {
            horizon: lit(8.0),
            output_step: lit(1e-3),
            rel_tol: lit(1e-8),
            abs_tol: lit(1e-10),
            min_step: lit(1e-12),
            wall_position: None,
            max_steps: 5_000_000,
        }
    }
}

impl<T: Scalar> SimConfig<T> {
    pub fn with_wall(mut self, wall: T) -> Self {
        self.wall_position = Some(wall);
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: &str| Err(SimError::InvalidConfig(msg.to_owned()));
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.horizon) {
            return bad("horizon must be positive");
        }
        if !positive(self.output_step) {
            return bad("output_step must be positive");
        }
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return bad("tolerances must be positive");
        }
        if !positive(self.min_step) || self.min_step >= self.output_step {
            return bad("min_step must be positive and below output_step");
        }
        if self.wall_position.is_some_and(|w| !w.is_finite()) {
            return bad("wall_position must be finite");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Collision,
    CatastropheBoundary,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<T> {
    pub time: T,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub mode_switches: usize,
}

/// Sampled closed-loop run. Row `i` of every per-time array belongs to
/// `times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub controls: Vec<T>,
    pub active: Vec<bool>,
    pub barrier_values: Vec<BarrierValues<T>>,
    pub events: Vec<Event<T>>,
    pub terminated_early: bool,
    /// Continuous solution between accepted steps.
    pub dense: DenseSolution<T>,
    pub stats: SolverStats,
}

impl<T: Scalar> Trajectory<T> {
    fn empty() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            controls: Vec::new(),
            active: Vec::new(),
            barrier_values: Vec::new(),
            events: Vec::new(),
            terminated_early: false,
            dense: DenseSolution::new(),
            stats: SolverStats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// State component `i` as a time series.
    pub fn component(&self, i: usize) -> Vec<T> {
        self.states.iter().map(|x| x[i]).collect()
    }

    pub fn final_state(&self) -> Option<&[T]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn event(&self, kind: EventKind) -> Option<&Event<T>> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn collided(&self) -> bool {
        self.event(EventKind::Collision).is_some()
    }

    fn push_row<C: Controller<T>>(
        &mut self,
        controller: &C,
        t: T,
        x: Vec<T>,
    ) -> Result<(), SimError> {
        let r = controller
            .control(&x)
            .map_err(|source| SimError::ControllerUndefined {
                time: to_f64(t),
                source,
            })?;
        self.barrier_values
            .push(controller.barrier_values(&x, r.u_star));
        self.times.push(t);
        self.states.push(x);
        self.controls.push(r.u_star);
        self.active.push(r.active);
        Ok(())
    }
}

enum Stop<T> {
    Horizon,
    Collision(T),
    Catastrophe(T),
}

/// Integrates `ẋ = f(x) + g(x)·u*(x)` from `x0` at `t = 0`.
///
/// Within a step the filter branch is held fixed; a step whose end state
/// would switch branch is cut back to the switching time. Collision with the
/// wall (first downward crossing of `x₀ = x_w`) ends the run, as does the
/// controller reaching its catastrophe boundary.
pub fn integrate<T, C>(
    controller: &C,
    x0: &[T],
    config: &SimConfig<T>,
) -> Result<Trajectory<T>, SimError>
where
    T: Scalar,
    C: Controller<T>,
{
    config.validate()?;
    let n = controller.state_dim();
    if x0.len() != n {
        return Err(SimError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFiniteInitialState);
    }
    let undefined = |t: T, source: ControlError| SimError::ControllerUndefined {
        time: to_f64(t),
        source,
    };

    let t_end = config.horizon;
    let tol = Tolerances {
        rel: config.rel_tol,
        abs: config.abs_tol,
    };
    let mut active = controller
        .control(x0)
        .map_err(|e| undefined(T::zero(), e))?
        .active;
    let mut traj = Trajectory::empty();
    let mut control = StepControl::new();
    let (mut t, mut y) = (T::zero(), x0.to_vec());
    let mut h = config.output_step.min(t_end);
    let mut rejected = false;
    let mut stop = Stop::Horizon;

    while t < t_end {
        if traj.stats.accepted + traj.stats.rejected >= config.max_steps {
            return Err(SimError::TooManySteps(config.max_steps));
        }
        let remaining = t_end - t;
        let h_try = h.min(remaining);
        let mut rhs = |x: &[T]| -> Result<Vec<T>, ControlError> {
            let r = controller.control(x)?;
            Ok(controller.vector_field(x, if active { r.u_sf } else { r.u_d }))
        };
        let step = match attempt(&mut rhs, t, &y, h_try, &tol) {
            Ok(step) => step,
            Err(e) => {
                traj.stats.rejected += 1;
                h = h_try * lit(0.25);
                rejected = true;
                if h < config.min_step {
                    if e.is_catastrophe() {
                        stop = Stop::Catastrophe(t);
                        break;
                    }
                    return Err(undefined(t, e));
                }
                continue;
            }
        };
        if step.error > T::one() {
            traj.stats.rejected += 1;
            h = control.rejected(h_try, step.error);
            rejected = true;
            if h < config.min_step {
                return Err(SimError::StepUnderflow {
                    time: to_f64(t),
                    step: to_f64(h),
                });
            }
            continue;
        }

        // Branch check at the step end.
        let natural = controller
            .control(&step.y1)
            .map_err(|e| undefined(t + h_try, e))?
            .active;
        let mut segment = step.segment;
        let mut y1 = step.y1;
        let mut step_len = h_try;
        let mut next_h = control.accepted(h_try, step.error, rejected);
        if natural != active {
            let switch_fn = |s: T| match controller.control(&segment.eval(s)) {
                Ok(r) => r.u_d - r.u_sf,
                Err(_) => T::nan(),
            };
            let located = bisect(
                (t, t + h_try),
                switch_fn,
                h_try * lit(1e-10),
                MAX_BISECTIONS,
            );
            match located {
                Ok((lo, _)) if lo - t > config.min_step * lit(10.0) && lo < t + h_try => {
                    let cut = lo - t;
                    match attempt(&mut rhs, t, &y, cut, &tol) {
                        Ok(s) if s.error <= T::one() => {
                            segment = s.segment;
                            y1 = s.y1;
                            step_len = cut;
                            next_h = h_try;
                        }
                        Ok(s) => {
                            traj.stats.rejected += 1;
                            h = control.rejected(cut, s.error);
                            rejected = true;
                            continue;
                        }
                        Err(_) => {
                            traj.stats.rejected += 1;
                            h = cut * lit(0.25);
                            rejected = true;
                            continue;
                        }
                    }
                }
                // The switch sits at the step start or is not bracketed:
                // keep the step and adopt the branch at its end.
                _ => {}
            }
            active = !active;
            traj.stats.mode_switches += 1;
        }

        let t1 = if step_len == remaining {
            t_end
        } else {
            t + step_len
        };
        traj.stats.accepted += 1;
        rejected = false;
        h = next_h;

        if let Some(wall) = config.wall_position {
            if y[0] >= wall && y1[0] < wall {
                let tc = locate_event((t, t1), |s| segment.eval(s)[0] - wall)?;
                traj.dense.push(segment);
                stop = Stop::Collision(tc);
                break;
            }
        }
        traj.dense.push(segment);
        t = t1;
        y = y1;
    }

    let t_stop = match stop {
        Stop::Horizon => t_end,
        Stop::Collision(tc) => tc,
        Stop::Catastrophe(tc) => tc,
    };
    let count = (t_stop / config.output_step + lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    for k in 0..=count {
        let tk = (T::from_usize(k).expect("grid index") * config.output_step).min(t_stop);
        if traj.times.last().is_some_and(|&last| tk <= last) {
            break;
        }
        let x = traj.dense.eval(tk).unwrap_or_else(|| x0.to_vec());
        traj.push_row(controller, tk, x)?;
    }
    let kind = match stop {
        Stop::Horizon => EventKind::Finished,
        Stop::Collision(_) => EventKind::Collision,
        Stop::Catastrophe(_) => EventKind::CatastropheBoundary,
    };
    if kind != EventKind::Finished {
        traj.terminated_early = true;
        if traj.times.last().is_some_and(|&last| t_stop > last) {
            let x = traj.dense.eval(t_stop).unwrap_or_else(|| y.clone());
            traj.push_row(controller, t_stop, x)?;
        }
    }
    traj.events.push(Event { time: t_stop, kind });
    Ok(traj)
}
