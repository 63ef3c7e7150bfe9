//! Scenario execution and per-run summaries.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use cbf_core::{integrate, Controller, EventKind, SimError, Trajectory64};
use serde::Deserialize;

use crate::csv_io::emit_csv;
use crate::registry::{params, Scenario};
use crate::BenchError;

/// Permitted changes to a bundled scenario.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Replaces the bundled initial positions.
    pub x0: Option<Vec<f64>>,
    pub v0: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub horizon: Option<f64>,
}

impl Overrides {
    /// Fields set in `other` win.
    pub fn merged(&self, other: &Overrides) -> Overrides {
        Overrides {
            x0: other.x0.clone().or_else(|| self.x0.clone()),
            v0: other.v0.or(self.v0),
            rtol: other.rtol.or(self.rtol),
            atol: other.atol.or(self.atol),
            horizon: other.horizon.or(self.horizon),
        }
    }

    pub fn apply(&self, scenario: &Scenario) -> Scenario {
        let mut s = scenario.clone();
        let v0 = self.v0.unwrap_or(params::V0);
        if let Some(xs) = &self.x0 {
            s.initial_conditions = xs.iter().map(|&x| s.initial_state(x, v0)).collect();
        } else if self.v0.is_some() {
            s.initial_conditions = scenario
                .initial_conditions
                .iter()
                .map(|ic| s.initial_state(ic[0], v0))
                .collect();
        }
        if let Some(r) = self.rtol {
            s.sim.rel_tol = r;
        }
        if let Some(a) = self.atol {
            s.sim.abs_tol = a;
        }
        if let Some(h) = self.horizon {
            s.sim.horizon = h;
        }
        s
    }
}

/// Outcome of one initial condition.
#[derive(Debug, Clone)]
pub struct IcRun {
    pub initial_state: Vec<f64>,
    pub result: Result<IcOutcome, SimError>,
    pub wall_clock: Duration,
}

#[derive(Debug, Clone)]
pub struct IcOutcome {
    pub trajectory: Trajectory64,
    pub summary: IcSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcSummary {
    pub collided: bool,
    pub catastrophe: bool,
    pub terminated_early: bool,
    /// Peak `|u*|` on the output grid.
    pub peak_abs_u: f64,
    /// Peak `|u*|` over output samples and accepted integrator steps.
    pub peak_abs_u_continuous: f64,
    /// Minimum `h_g` over output samples and accepted steps.
    pub min_hg: Option<f64>,
    /// Minimum primary margin `h` on the output grid.
    pub min_h: Option<f64>,
    pub min_h2: Option<f64>,
    pub final_time: f64,
    pub final_x: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub runs: Vec<IcRun>,
    pub csv_paths: Vec<PathBuf>,
}

fn min_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values
        .flatten()
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
}

pub fn summarize<C: Controller<f64>>(controller: &C, traj: &Trajectory64) -> IcSummary {
    let peak_abs_u = traj.controls.iter().fold(0.0_f64, |m, u| m.max(u.abs()));
    let mut peak_continuous = peak_abs_u;
    let mut node_hg = Vec::new();
    for (_, x) in traj.dense.nodes() {
        if let Ok(r) = controller.control(&x) {
            peak_continuous = peak_continuous.max(r.u_star.abs());
            node_hg.push(controller.barrier_values(&x, r.u_star).hg);
        }
    }
    let grid_hg = traj.barrier_values.iter().map(|v| v.hg);
    IcSummary {
        collided: traj.collided(),
        catastrophe: traj.event(EventKind::CatastropheBoundary).is_some(),
        terminated_early: traj.terminated_early,
        peak_abs_u,
        peak_abs_u_continuous: peak_continuous,
        min_hg: min_of(grid_hg.chain(node_hg)),
        min_h: min_of(traj.barrier_values.iter().map(|v| v.h)),
        min_h2: min_of(traj.barrier_values.iter().map(|v| v.h2)),
        final_time: traj.times.last().copied().unwrap_or(0.0),
        final_x: traj.final_state().map_or(f64::NAN, |x| x[0]),
        accepted_steps: traj.stats.accepted,
        rejected_steps: traj.stats.rejected,
    }
}

fn run_one(scenario: &Scenario, x0: &[f64]) -> IcRun {
    let controller = scenario.controller();
    let start = Instant::now();
    let result = integrate(&controller, x0, &scenario.sim).map(|trajectory| IcOutcome {
        summary: summarize(&controller, &trajectory),
        trajectory,
    });
    IcRun {
        initial_state: x0.to_vec(),
        result,
        wall_clock: start.elapsed(),
    }
}

/// Runs every initial condition of `scenario`, one thread each.
pub fn execute(scenario: &Scenario) -> Vec<IcRun> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenario
            .initial_conditions
            .iter()
            .map(|x0| scope.spawn(move || run_one(scenario, x0)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

/// File name of the CSV for one initial condition.
pub fn csv_name(scenario: &Scenario, x0: &[f64]) -> String {
    let mut name = format!("{}_x0_{}", scenario.id, x0[0]);
    if let Some(v) = x0.get(1) {
        name.push_str(&format!("_v0_{v}"));
    }
    name.push_str(".csv");
    name
}

/// Runs a scenario with overrides and, when `out` is given, writes one CSV
/// per successful initial condition into it.
pub fn run(
    scenario: &Scenario,
    overrides: &Overrides,
    out: Option<&Path>,
) -> Result<RunSummary, BenchError> {
    let scenario = overrides.apply(scenario);
    scenario.sim.validate().map_err(BenchError::Sim)?;
    let runs = execute(&scenario);
    let mut csv_paths = Vec::new();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
        for r in &runs {
            if let Ok(outcome) = &r.result {
                let path = dir.join(csv_name(&scenario, &r.initial_state));
                emit_csv(&outcome.trajectory, &path)?;
                csv_paths.push(path);
            }
        }
    }
    Ok(RunSummary {
        scenario,
        runs,
        csv_paths,
    })
}
