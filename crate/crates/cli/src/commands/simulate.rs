//! Dynamics runs: explicit-Euler line motion with reconnection checks after
//! every step, plus the transversality scan of the Magnus force over
//! velocity directions.

use std::io::Write;

use cartan_core::dynamics::{
    magnus_force, step_lines, write_trajectory_csv, ClipEvent, DisclinationField, DislocationLine,
    Domain, ForceLaw, NodeDiagnostic, Vec3,
};
use cartan_core::network::{detect_and_reconnect, ledger_total, write_events_jsonl, DefectNetwork, ReconnectionEvent, Screening};
use serde::Serialize;

use super::Geometry;
use crate::error::CliError;
use crate::output::OutputDir;
use crate::scenario::{Product, Scenario};

/// Velocity directions in the transversality scan.
pub const SCAN_DIRECTIONS: usize = 64;
const SCREENING_SAMPLES: usize = 32;
/// Reconnection threshold without any configured core, in domain units.
const FALLBACK_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Ledger {
    pub initial: Vec3,
    #[serde(rename = "final")]
    pub final_total: Vec3,
    /// Net Burgers vector added by boundary clipping (lines leaving the
    /// domain, or split into pieces that each keep their Burgers vector).
    pub boundary_exchange: Vec3,
    pub discrepancy: f64,
    pub events: usize,
    pub annihilations: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub lines: Vec<DislocationLine>,
    pub diagnostics: Vec<NodeDiagnostic>,
    pub clips: Vec<ClipEvent>,
    pub events: Vec<ReconnectionEvent>,
    pub ledger: Ledger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    pub line_id: u64,
    pub direction: usize,
    pub phi: f64,
    pub velocity: Vec3,
    pub force: Vec3,
    pub abs_dot: f64,
    pub normalized: f64,
}

/// Unit vectors spanning the plane normal to `t`.
fn normal_plane(t: &Vec3) -> (Vec3, Vec3) {
    let helper = if t.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u1 = t.cross(&helper).normalize();
    (u1, t.cross(&u1))
}

/// `|F_magnus . v|` for unit velocities at `SCAN_DIRECTIONS` angles in the
/// plane normal to each line's first tangent, at its first node.
pub fn transversality_scan(
    lines: &[DislocationLine],
    disclinations: &DisclinationField,
    gamma: f64,
    law: ForceLaw,
) -> Vec<ScanRow> {
    let mut rows = Vec::with_capacity(lines.len() * SCAN_DIRECTIONS);
    for line in lines {
        let t = line.tangent(0);
        let theta = disclinations.local_theta(&line.nodes[0]);
        let (u1, u2) = normal_plane(&t);
        for k in 0..SCAN_DIRECTIONS {
            let phi = std::f64::consts::TAU * k as f64 / SCAN_DIRECTIONS as f64;
            let v = u1 * phi.cos() + u2 * phi.sin();
            let f = magnus_force(&theta, &line.burgers, &v, gamma, law, &t);
            let abs_dot = f.dot(&v).abs();
            let scale = f.norm() * v.norm();
            rows.push(ScanRow {
                line_id: line.id,
                direction: k,
                phi,
                velocity: v,
                force: f,
                abs_dot,
                normalized: if scale > 0.0 { abs_dot / scale } else { 0.0 },
            });
        }
    }
    rows
}

fn write_scan<W: Write>(mut w: W, rows: &[ScanRow]) -> Result<(), CliError> {
    writeln!(w, "line_id,direction,phi,vx,vy,vz,fx,fy,fz,abs_dot,normalized")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.line_id, r.direction, r.phi, r.velocity.x, r.velocity.y, r.velocity.z, r.force.x, r.force.y,
            r.force.z, r.abs_dot, r.normalized
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn run_dynamics(scenario: &Scenario) -> Result<(RunResult, DisclinationField, Domain), CliError> {
    let block = scenario
        .dynamics
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a `dynamics` block".into()))?;
    let params = block.params();
    let disclinations = scenario.disclinations()?;
    let domain = Domain::from_grid(&scenario.grid)?;
    let threshold = block
        .reconnection_threshold
        .unwrap_or_else(|| scenario.smallest_core_radius().map_or(FALLBACK_THRESHOLD, |e| 2.0 * e));
    let geometry = Geometry::build(scenario)?;
    let screening = Screening {
        curvature: &geometry.curvature,
        coframe: &geometry.coframe,
        samples: SCREENING_SAMPLES,
    };
    // skip the quadrature entirely when nothing can screen
    let screening = (geometry.curvature.max_abs() > 0.0).then_some(&screening);

    let mut lines = block.lines.clone();
    let initial = ledger_total(&lines, &[]);
    let mut next_id = lines.iter().map(|l| l.id).max().unwrap_or(0);
    let (mut diagnostics, mut clips, mut events) = (Vec::new(), Vec::new(), Vec::new());
    let mut boundary_exchange = Vec3::zeros();
    for step in 0..params.steps {
        let (moved, outcome) = step_lines(&lines, &disclinations, &params, &domain, step, &mut next_id)?;
        if !outcome.clips.is_empty() {
            boundary_exchange += ledger_total(&moved, &[]) - ledger_total(&lines, &[]);
        }
        diagnostics.extend(outcome.diagnostics);
        clips.extend(outcome.clips);
        let (merged, new_events) = detect_and_reconnect(moved, threshold, screening, &domain, step)?;
        lines = merged;
        events.extend(new_events);
        if lines.is_empty() {
            break;
        }
    }
    let final_total = ledger_total(&lines, &events) - boundary_exchange;
    let ledger = Ledger {
        initial,
        final_total,
        boundary_exchange,
        discrepancy: (final_total - initial).norm(),
        events: events.len(),
        annihilations: events.iter().filter(|e| e.annihilated()).count(),
    };
    Ok((RunResult { lines, diagnostics, clips, events, ledger }, disclinations, domain))
}

pub fn run(scenario: &Scenario, out: &mut OutputDir) -> Result<RunResult, CliError> {
    let block = scenario
        .dynamics
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a `dynamics` block".into()))?;
    let (result, disclinations, domain) = run_dynamics(scenario)?;
    if scenario.wants(Product::Trajectories) {
        let mut w = out.create("trajectory.csv")?;
        write_trajectory_csv(&mut w, &result.diagnostics)?;
        w.flush()?;
        let scan = transversality_scan(&block.lines, &disclinations, block.gamma, block.force_law);
        write_scan(out.create("magnus_scan.csv")?, &scan)?;
        out.json("clips.json", &result.clips)?;
    }
    if scenario.wants(Product::Events) {
        let mut w = out.create("events.jsonl")?;
        write_events_jsonl(&mut w, &result.events)?;
        w.flush()?;
        out.json("ledger.json", &result.ledger)?;
    }
    out.json("network.json", &DefectNetwork::snapshot(&result.lines, &disclinations, &domain))?;
    out.json("final_lines.json", &result.lines)?;
    Ok(result)
}
