//! Plain-text summary report.

use std::fmt::Write as _;

use crate::runner::RunSummary;
use crate::verify::VerifyReport;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.9}"))
}

/// One block per initial condition.
pub fn summary_text(summary: &RunSummary) -> String {
    let s = &summary.scenario;
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {} ({})", s.id, s.description);
    let _ = writeln!(
        out,
        "horizon: {} s, output step: {} s, rtol: {:e}, atol: {:e}",
        s.sim.horizon, s.sim.output_step, s.sim.rel_tol, s.sim.abs_tol
    );
    for r in &summary.runs {
        let _ = writeln!(out);
        let _ = writeln!(out, "initial state: {:?}", r.initial_state);
        match &r.result {
            Ok(o) => {
                let m = &o.summary;
                let _ = writeln!(out, "  collided: {}", m.collided);
                let _ = writeln!(out, "  catastrophe: {}", m.catastrophe);
                let _ = writeln!(out, "  terminated_early: {}", m.terminated_early);
                let _ = writeln!(out, "  peak_abs_u: {:.6}", m.peak_abs_u);
                let _ = writeln!(
                    out,
                    "  peak_abs_u_continuous: {:.6}",
                    m.peak_abs_u_continuous
                );
                let _ = writeln!(out, "  min_h: {}", opt(m.min_h));
                let _ = writeln!(out, "  min_h2: {}", opt(m.min_h2));
                let _ = writeln!(out, "  min_h_g: {}", opt(m.min_hg));
                let _ = writeln!(out, "  final_time: {}", m.final_time);
                let _ = writeln!(out, "  final_x: {:.9}", m.final_x);
                let _ = writeln!(
                    out,
                    "  steps: {} accepted, {} rejected",
                    m.accepted_steps, m.rejected_steps
                );
            }
            Err(e) => {
                let _ = writeln!(out, "  error: {e}");
            }
        }
        let _ = writeln!(
            out,
            "  wall_clock: {:.3} ms",
            r.wall_clock.as_secs_f64() * 1e3
        );
    }
    out
}

pub fn verify_text(report: &VerifyReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "[{tag}] {}: {}: {}", report.scenario, c.name, c.detail);
    }
    let verdict = if report.passed() { "passed" } else { "FAILED" };
    let _ = writeln!(
        out,
        "{}: {verdict} ({} checks)",
        report.scenario,
        report.checks.len()
    );
    out
}
