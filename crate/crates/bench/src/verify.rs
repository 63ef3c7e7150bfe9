//! Expectation checks over a scenario run.

use cbf_core::analysis::central_difference;
use cbf_core::{check_descent, BarrierSpec64, LyapunovCandidate, Trajectory64};

use crate::registry::Scenario;
use crate::runner::{run, Overrides, RunSummary};
use crate::BenchError;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub scenario: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Phase-plot slopes `(unfiltered, filtered)` of first-order runs, from
/// finite-differenced velocity. Samples next to a branch switch are skipped.
pub fn phase_slopes<'a>(
    runs: impl Iterator<Item = &'a Trajectory64>,
) -> (Option<f64>, Option<f64>) {
    let (mut free, mut held) = ((vec![], vec![]), (vec![], vec![]));
    for traj in runs {
        let x = traj.component(0);
        let xdot = central_difference(&traj.times, &x);
        let n = x.len();
        for i in 1..n.saturating_sub(1) {
            if traj.active[i - 1] != traj.active[i] || traj.active[i + 1] != traj.active[i] {
                continue;
            }
            let bucket = if traj.active[i] { &mut held } else { &mut free };
            bucket.0.push(x[i]);
            bucket.1.push(xdot[i]);
        }
    }
    (fit_slope(&free.0, &free.1), fit_slope(&held.0, &held.1))
}

fn label(x0: &[f64]) -> String {
    match x0 {
        [x] => format!("x0={x}"),
        [x, v, ..] => format!("x0={x},v0={v}"),
        [] => "x0=?".into(),
    }
}

fn check(checks: &mut Vec<Check>, name: String, passed: bool, detail: String) {
    checks.push(Check {
        name,
        passed,
        detail,
    });
}

/// Evaluates every applicable expectation of the scenario against a run.
pub fn evaluate(summary: &RunSummary) -> VerifyReport {
    let scenario: &Scenario = &summary.scenario;
    let mut checks = Vec::new();
    let Some(exp) = &scenario.expectations else {
        return VerifyReport {
            scenario: scenario.id.into(),
            checks,
        };
    };
    for r in &summary.runs {
        let tag = label(&r.initial_state);
        let outcome = match &r.result {
            Ok(o) => o,
            Err(e) => {
                check(
                    &mut checks,
                    format!("{tag} integration"),
                    false,
                    e.to_string(),
                );
                continue;
            }
        };
        let s = &outcome.summary;
        let ic = exp.for_x0(r.initial_state[0]);
        if let Some(expected) = ic.and_then(|e| e.collided) {
            check(
                &mut checks,
                format!("{tag} collision"),
                s.collided == expected,
                format!("expected collided={expected}, got {}", s.collided),
            );
        }
        if let Some(target) = ic.and_then(|e| e.peak_abs_u) {
            let rel = (s.peak_abs_u - target) / target;
            check(
                &mut checks,
                format!("{tag} peak |u|"),
                rel.abs() <= exp.peak_tolerance,
                format!(
                    "target {target}, grid peak {:.1} ({:+.1}%), continuous peak {:.4e}",
                    s.peak_abs_u,
                    100.0 * rel,
                    s.peak_abs_u_continuous
                ),
            );
        }
        if let Some(margin) = exp.failsafe_margin {
            let min_hg = s.min_hg.unwrap_or(f64::NAN);
            check(
                &mut checks,
                format!("{tag} failsafe"),
                !s.catastrophe && !s.collided && min_hg > -1.0 + margin,
                format!("min h_g = {min_hg:.9}, h_g + 1 = {:.3e}", min_hg + 1.0),
            );
        }
        if let Some((candidate, tol)) = exp.descent {
            let mut traj = outcome.trajectory.clone();
            if matches!(candidate, LyapunovCandidate::V2 { .. }) {
                for v in &mut traj.barrier_values {
                    v.hg_dot = None;
                }
            }
            let (passed, detail) = match check_descent(&traj, candidate, tol) {
                Ok(d) => (
                    d.holds,
                    format!(
                        "max increase {:.3e} over {} pairs (tol {tol:e})",
                        d.max_increase, d.pairs_checked
                    ),
                ),
                Err(e) => (false, e.to_string()),
            };
            check(
                &mut checks,
                format!("{tag} Lyapunov descent"),
                passed,
                detail,
            );
        }
        if let BarrierSpec64::Zeroing { .. } = scenario.barrier {
            let h0 = outcome.trajectory.barrier_values[0].h.unwrap_or(f64::NAN);
            let h_end = outcome
                .trajectory
                .barrier_values
                .last()
                .and_then(|v| v.h)
                .unwrap_or(f64::NAN);
            if h0 >= 0.0 {
                let min_h = s.min_h.unwrap_or(f64::NAN);
                check(
                    &mut checks,
                    format!("{tag} safe set invariance"),
                    min_h >= -1e-6,
                    format!("min h = {min_h:e}"),
                );
            } else {
                check(
                    &mut checks,
                    format!("{tag} convergence to safe set"),
                    h_end > -1e-2,
                    format!("h(T) = {h_end:e}"),
                );
            }
        }
    }
    let bundled_ics = crate::registry::lookup(scenario.id)
        .is_some_and(|s| s.initial_conditions == scenario.initial_conditions);
    if let (Some((free, held)), true) = (exp.phase_slopes, bundled_ics) {
        let trajs = summary
            .runs
            .iter()
            .filter_map(|r| r.result.as_ref().ok())
            .map(|o| &o.trajectory);
        let (fitted_free, fitted_held) = phase_slopes(trajs);
        for (name, want, got) in [
            ("unfiltered", free, fitted_free),
            ("filtered", held, fitted_held),
        ] {
            let passed = got.is_some_and(|g| (g - want).abs() <= exp.slope_tolerance);
            let detail = match got {
                Some(g) => format!("expected {want}, fitted {g:.6}"),
                None => "not enough samples".into(),
            };
            check(&mut checks, format!("phase slope {name}"), passed, detail);
        }
    }
    VerifyReport {
        scenario: scenario.id.into(),
        checks,
    }
}

/// Runs a scenario and checks it.
pub fn verify(
    scenario: &Scenario,
    overrides: &Overrides,
) -> Result<(RunSummary, VerifyReport), BenchError> {
    let summary = run(scenario, overrides, None)?;
    let report = evaluate(&summary);
    Ok((summary, report))
}
