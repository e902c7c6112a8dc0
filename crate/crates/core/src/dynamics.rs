//! Overdamped motion of dislocation lines under the curvature-induced
//! transverse (Magnus-like) force.
//!
//! Each node solves `v = M (F_ext + F_magnus(v))`. The Magnus force is
//! `Gamma c x v` for an axis `c` fixed by the force law, so the solve is the
//! 3x3 system `(I - M Gamma [c]x) v = M F_ext`; the operator `[c]x` is
//! antisymmetric, which makes the system always solvable and guarantees
//! `|v| <= M |F_ext|`. Positions then advance by explicit Euler.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::defects::{core_density, DefectConfiguration};
use crate::error::{Error, Result};
use crate::field_theory::{InteriorRegion, Residual};
use crate::forms::{exterior_derivative, hodge_star, interior_product, FormField, Interpolator, ValueType, VectorField};
use crate::grid::GridSpec;

pub type Vec3 = Vector3<f64>;

/// Time steps must keep `dt * M * max|F_ext|` below this fraction of the
/// smallest domain extent.
pub const STEP_BOUND_FACTOR: f64 = 0.1;

fn default_mobility() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DislocationLine {
    pub id: u64,
    pub nodes: Vec<Vec3>,
    pub burgers: Vec3,
    #[serde(default)]
    pub closed: bool,
    #[serde(default = "default_mobility")]
    pub mobility: f64,
}

impl DislocationLine {
    /// Straight open line of `n` nodes from `start` to `end`.
    pub fn straight(id: u64, start: Vec3, end: Vec3, n: usize, burgers: Vec3, mobility: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidLine { id, reason: "needs at least 2 nodes".into() });
        }
        let nodes = (0..n)
            .map(|i| start + (end - start) * (i as f64 / (n - 1) as f64))
            .collect();
        let line = DislocationLine { id, nodes, burgers, closed: false, mobility };
        line.validate()?;
        Ok(line)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::InvalidLine { id: self.id, reason: reason.into() });
        let min = if self.closed { 3 } else { 2 };
        if self.nodes.len() < min {
            return bad(&format!("needs at least {min} nodes"));
        }
        if !self.nodes.iter().all(|p| p.iter().all(|v| v.is_finite())) {
            return bad("non-finite node");
        }
        let n = self.nodes.len();
        let pairs = if self.closed { n } else { n - 1 };
        if (0..pairs).any(|i| self.nodes[i] == self.nodes[(i + 1) % n]) {
            return bad("consecutive nodes coincide");
        }
        if !self.burgers.iter().all(|v| v.is_finite()) || self.burgers.norm() == 0.0 {
            return bad("Burgers vector must be finite and nonzero");
        }
        if !(self.mobility > 0.0 && self.mobility.is_finite()) {
            return bad("mobility must be positive");
        }
        Ok(())
    }

    /// Unit tangent at node `i`: normalised central difference of the
    /// neighbours, one-sided at the ends of an open line.
    pub fn tangent(&self, i: usize) -> Vec3 {
        let n = self.nodes.len();
        let (a, b) = if self.closed {
            ((i + n - 1) % n, (i + 1) % n)
        } else {
            (i.saturating_sub(1), (i + 1).min(n - 1))
        };
        let d = self.nodes[b] - self.nodes[a];
        d / d.norm()
    }

    pub fn length(&self) -> f64 {
        let n = self.nodes.len();
        let segs = if self.closed { n } else { n - 1 };
        (0..segs).map(|i| (self.nodes[(i + 1) % n] - self.nodes[i]).norm()).sum()
    }
}

/// A straight disclination along `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Disclination {
    pub axis_point: [f64; 2],
    /// Axial Frank vector, e.g. `(0, 0, Theta)`.
    pub theta: Vec3,
    pub core_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DisclinationField {
    pub frank_vectors: Vec<Disclination>,
}

impl DisclinationField {
    /// The wedge disclinations of a defect configuration.
    pub fn from_configuration(cfg: &DefectConfiguration) -> Self {
        DisclinationField {
            frank_vectors: cfg
                .wedges()
                .map(|d| Disclination {
                    axis_point: d.axis_point,
                    theta: Vec3::new(0.0, 0.0, d.charge),
                    core_radius: d.core_radius,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for d in &self.frank_vectors {
            if !d.theta.iter().all(|v| v.is_finite()) || !(d.core_radius > 0.0) {
                return Err(Error::InvalidDefect("disclination needs finite Theta and positive core radius".into()));
            }
        }
        Ok(())
    }

    /// Local Frank vector felt at `p`: each `Theta` weighted by
    /// `pi eps^2 g_eps(r)`, i.e. `exp(-r^2 / 2 eps^2) / 2`.
    pub fn local_theta(&self, p: &Vec3) -> Vec3 {
        self.frank_vectors.iter().fold(Vec3::zeros(), |acc, d| {
            let r = (p.x - d.axis_point[0]).hypot(p.y - d.axis_point[1]);
            let eps = d.core_radius;
            acc + d.theta * (PI * eps * eps * core_density(r, eps))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ForceLaw {
    /// `F = Gamma (Theta x b) x v`.
    #[default]
    CrossProduct,
    /// `F = Gamma (Theta.t)(b.t) (t x v)`.
    DerivationConsistent,
}

/// Force per unit length applied to every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExternalForce {
    Uniform(Vec3),
    /// Frame-vector 0-form with three slots on a 3D grid.
    #[serde(skip)]
    Sampled(FormField),
}

impl ExternalForce {
    pub fn validate(&self) -> Result<()> {
        match self {
            ExternalForce::Uniform(f) if f.iter().all(|v| v.is_finite()) => Ok(()),
            ExternalForce::Uniform(_) => Err(Error::InvalidParams("non-finite external force".into())),
            ExternalForce::Sampled(f) => {
                if f.degree() != 0 || f.value_type() != ValueType::FrameVector(3) || f.dim() != 3 {
                    return Err(Error::InvalidParams("sampled force must be a 3-vector 0-form in 3D".into()));
                }
                Ok(())
            }
        }
    }

    pub fn at(&self, p: &Vec3) -> Result<Vec3> {
        match self {
            ExternalForce::Uniform(f) => Ok(*f),
            ExternalForce::Sampled(field) => {
                let mut out = [0.0; 3];
                Interpolator::new(field).eval(p.as_slice(), &mut out)?;
                Ok(Vec3::from(out))
            }
        }
    }

    pub fn max_norm(&self) -> f64 {
        match self {
            ExternalForce::Uniform(f) => f.norm(),
            ExternalForce::Sampled(field) => {
                let np = field.n_points();
                let d = field.data();
                (0..np)
                    .map(|p| (d[p].powi(2) + d[np + p].powi(2) + d[2 * np + p].powi(2)).sqrt())
                    .fold(0.0, f64::max)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsParams {
    pub gamma: f64,
    pub force_law: ForceLaw,
    pub external_force: ExternalForce,
    pub time_step: f64,
    pub steps: usize,
}

impl DynamicsParams {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(Error::InvalidParams("Gamma must be finite".into()));
        }
        if !(self.time_step > 0.0 && self.time_step.is_finite()) {
            return Err(Error::InvalidParams("time step must be positive".into()));
        }
        self.external_force.validate()
    }
}

/// Axis `c` with `F_magnus = Gamma c x v` for the chosen law.
pub fn magnus_axis(theta: &Vec3, b: &Vec3, t: &Vec3, law: ForceLaw) -> Vec3 {
    match law {
        ForceLaw::CrossProduct => theta.cross(b),
        ForceLaw::DerivationConsistent => t * (theta.dot(t) * b.dot(t)),
    }
}

/// Transverse force on a line element with tangent `t` moving at `v`.
pub fn magnus_force(theta: &Vec3, b: &Vec3, v: &Vec3, gamma: f64, law: ForceLaw, t: &Vec3) -> Vec3 {
    magnus_axis(theta, b, t, law).cross(v) * gamma
}

/// Velocity solving `v = M (F_ext + Gamma c x v)`.
pub fn solve_velocity(f_ext: &Vec3, c: &Vec3, gamma: f64, mobility: f64) -> Result<Vec3> {
    if !(mobility > 0.0) {
        return Err(Error::InvalidParams("mobility must be positive".into()));
    }
    let a = Matrix3::identity() - (c * (mobility * gamma)).cross_matrix();
    let lu = a.lu();
    let det = lu.determinant();
    if !det.is_finite() || det.abs() < 1e-300 {
        return Err(Error::SingularSystem(det));
    }
    lu.solve(&(f_ext * mobility)).ok_or(Error::SingularSystem(det))
}

/// `|v - M (F_ext + Gamma c x v)|`.
pub fn velocity_residual(v: &Vec3, f_ext: &Vec3, c: &Vec3, gamma: f64, mobility: f64) -> f64 {
    (v - (f_ext + c.cross(v) * gamma) * mobility).norm()
}

/// `|F . v| / (|F| |v|)`, guarded for zero vectors.
pub fn transversality_defect(f: &Vec3, v: &Vec3) -> f64 {
    f.dot(v).abs() / (f.norm() * v.norm() + f64::MIN_POSITIVE)
}

/// Axis-aligned box nodes must stay inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Domain {
    pub fn from_grid(grid: &GridSpec) -> Result<Self> {
        if grid.dim() < 3 {
            return Err(Error::WrongDimension { expected: ">= 3", found: grid.dim() });
        }
        let e = &grid.extents;
        Ok(Domain {
            lo: Vec3::new(e[0][0], e[1][0], e[2][0]),
            hi: Vec3::new(e[0][1], e[1][1], e[2][1]),
        })
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    pub fn min_extent(&self) -> f64 {
        (self.hi - self.lo).min()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeDiagnostic {
    pub step: usize,
    pub line_id: u64,
    pub node: usize,
    pub position: Vec3,
    pub velocity: Vec3,
    pub f_ext: Vec3,
    pub f_magnus: Vec3,
    pub f_total: Vec3,
    pub transversality: f64,
}

/// Nodes that left the domain during a step and what remained of the line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClipEvent {
    pub step: usize,
    pub line_id: u64,
    pub removed_nodes: usize,
    pub surviving_ids: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepOutcome {
    pub diagnostics: Vec<NodeDiagnostic>,
    pub clips: Vec<ClipEvent>,
}

fn check_time_step(lines: &[DislocationLine], params: &DynamicsParams, domain: &Domain) -> Result<()> {
    let m = lines.iter().map(|l| l.mobility).fold(0.0, f64::max);
    let travel = params.time_step * m * params.external_force.max_norm();
    let limit = STEP_BOUND_FACTOR * domain.min_extent();
    if travel > limit {
        return Err(Error::InvalidParams(format!(
            "time step moves nodes up to {travel:.3e} per step, above {limit:.3e}"
        )));
    }
    Ok(())
}

/// Split a moved line into the runs of nodes still inside the domain.
fn clip(line: DislocationLine, domain: &Domain, step: usize, next_id: &mut u64) -> (Vec<DislocationLine>, Option<ClipEvent>) {
    let inside: Vec<bool> = line.nodes.iter().map(|p| domain.contains(p)).collect();
    let removed = inside.iter().filter(|&&i| !i).count();
    if removed == 0 {
        return (vec![line], None);
    }
    let n = line.nodes.len();
    // for closed lines start scanning just after an outside node so that
    // runs never wrap
    let offset = if line.closed {
        (inside.iter().position(|&i| !i).expect("some node outside") + 1) % n
    } else {
        0
    };
    let mut runs: Vec<Vec<Vec3>> = Vec::new();
    let mut current = Vec::new();
    for k in 0..n {
        let i = (offset + k) % n;
        if inside[i] {
            current.push(line.nodes[i]);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    let mut out = Vec::new();
    for run in runs.into_iter().filter(|r| r.len() >= 2) {
        let id = if out.is_empty() {
            line.id
        } else {
            *next_id += 1;
            *next_id
        };
        out.push(DislocationLine {
            id,
            nodes: run,
            burgers: line.burgers,
            closed: false,
            mobility: line.mobility,
        });
    }
    let event = ClipEvent {
        step,
        line_id: line.id,
        removed_nodes: removed,
        surviving_ids: out.iter().map(|l| l.id).collect(),
    };
    (out, Some(event))
}

/// Advance every line by one explicit-Euler step.
///
/// `next_id` is the largest line id in use; clipped pieces get fresh ids
/// above it.
pub fn step_lines(
    lines: &[DislocationLine],
    disclinations: &DisclinationField,
    params: &DynamicsParams,
    domain: &Domain,
    step: usize,
    next_id: &mut u64,
) -> Result<(Vec<DislocationLine>, StepOutcome)> {
    params.validate()?;
    disclinations.validate()?;
    check_time_step(lines, params, domain)?;
    let mut outcome = StepOutcome::default();
    let mut moved = Vec::with_capacity(lines.len());
    for line in lines {
        line.validate()?;
        let mut next = line.clone();
        for (i, x) in line.nodes.iter().enumerate() {
            let t = line.tangent(i);
            let theta = disclinations.local_theta(x);
            let c = magnus_axis(&theta, &line.burgers, &t, params.force_law);
            let f_ext = params.external_force.at(x)?;
            let v = solve_velocity(&f_ext, &c, params.gamma, line.mobility)?;
            let f_magnus = c.cross(&v) * params.gamma;
            outcome.diagnostics.push(NodeDiagnostic {
                step,
                line_id: line.id,
                node: i,
                position: *x,
                velocity: v,
                f_ext,
                f_magnus,
                f_total: f_ext + f_magnus,
                transversality: transversality_defect(&f_magnus, &v),
            });
            next.nodes[i] = x + v * params.time_step;
        }
        let (pieces, event) = clip(next, domain, step, next_id);
        outcome.clips.extend(event);
        moved.extend(pieces);
    }
    Ok((moved, outcome))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub lines: Vec<DislocationLine>,
    pub diagnostics: Vec<NodeDiagnostic>,
    pub clips: Vec<ClipEvent>,
}

/// Run `params.steps` steps from `lines`.
pub fn simulate(
    lines: Vec<DislocationLine>,
    disclinations: &DisclinationField,
    params: &DynamicsParams,
    domain: &Domain,
) -> Result<Trajectory> {
    let mut next_id = lines.iter().map(|l| l.id).max().unwrap_or(0);
    let mut traj = Trajectory { lines, ..Default::default() };
    for step in 0..params.steps {
        let (lines, outcome) = step_lines(&traj.lines, disclinations, params, domain, step, &mut next_id)?;
        traj.lines = lines;
        traj.diagnostics.extend(outcome.diagnostics);
        traj.clips.extend(outcome.clips);
    }
    Ok(traj)
}

pub const TRAJECTORY_COLUMNS: [&str; 16] = [
    "step", "line_id", "node", "x", "y", "z", "vx", "vy", "vz", "fext_x", "fext_y", "fext_z", "fmag_x",
    "fmag_y", "fmag_z", "transversality",
];

pub fn write_trajectory_csv<W: Write>(w: W, diagnostics: &[NodeDiagnostic]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_COLUMNS)?;
    for d in diagnostics {
        let mut row = vec![d.step.to_string(), d.line_id.to_string(), d.node.to_string()];
        for v in [&d.position, &d.velocity, &d.f_ext, &d.f_magnus] {
            row.extend(v.iter().map(|c| c.to_string()));
        }
        row.push(d.transversality.to_string());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Comparison of the measured torsion transport rate with `b v_perp / A`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    /// `t.(d/dt + L_v)(*T)` projected on the Burgers direction; vanishes for
    /// rigid transport up to discretisation error.
    pub balance: Residual,
    /// Peak of `|t.d(*T)/dt|` from the two snapshots.
    pub rate_peak: f64,
    /// `|b| v_perp / (pi eps^2)`.
    pub estimate: f64,
    /// `|rate_peak - estimate| / estimate`, zero when both vanish.
    pub relative_discrepancy: f64,
}

/// Scalar `bhat_a t^mu (*T^a)_mu` of a frame-vector 1-form.
fn project(star_t: &FormField, bhat: &Vec3, t: &Vec3) -> Vec<f64> {
    let np = star_t.n_points();
    let mut out = vec![0.0; np];
    for a in 0..3 {
        for mu in 0..3 {
            let w = bhat[a] * t[mu];
            if w != 0.0 {
                for (o, &v) in out.iter_mut().zip(star_t.component(a, mu)) {
                    *o += w * v;
                }
            }
        }
    }
    out
}

/// Two-snapshot estimate of how torsion flux is carried along with a line
/// moving at uniform `velocity` over `dt`.
pub fn transport_residual(
    line: &DislocationLine,
    torsion_now: &FormField,
    torsion_next: &FormField,
    velocity: &Vec3,
    dt: f64,
    core_radius: f64,
) -> Result<TransportReport> {
    line.validate()?;
    if !(dt > 0.0) || !(core_radius > 0.0) {
        return Err(Error::InvalidParams("dt and core radius must be positive".into()));
    }
    for t in [torsion_now, torsion_next] {
        if t.degree() != 2 || t.value_type() != ValueType::FrameVector(3) || t.dim() != 3 {
            return Err(Error::FramePairing("torsion must be a 3-vector 2-form in 3D".into()));
        }
    }
    let grid = torsion_now.grid();
    if !grid.approx_eq(torsion_next.grid()) {
        return Err(Error::GridMismatch);
    }
    let t = line.tangent(0);
    let bhat = line.burgers / line.burgers.norm();
    let star_now = hodge_star(torsion_now)?;
    let star_next = hodge_star(torsion_next)?;
    let s_now = project(&star_now, &bhat, &t);
    let s_next = project(&star_next, &bhat, &t);
    let rate: Vec<f64> = s_next.iter().zip(&s_now).map(|(b, a)| (b - a) / dt).collect();

    // L_v = i_v d + d i_v, on the midpoint snapshot
    let mid = star_now.add(&star_next)?.scaled(0.5);
    let v = VectorField::uniform(grid, velocity.as_slice())?;
    let lie = interior_product(&v, &exterior_derivative(&mid)?)?.add(&exterior_derivative(&interior_product(&v, &mid)?)?)?;
    let lie_s = project(&lie, &bhat, &t);
    let balance: Vec<f64> = rate.iter().zip(&lie_s).map(|(r, l)| r + l).collect();
    let balance = FormField::from_data(grid, 0, ValueType::Scalar, balance)?;
    let region = InteriorRegion::boundary(3, 2).with_layers(vec![2, 2, 0]);
    let balance = Residual::measure(balance, Some(&region))?;

    let rate_peak = rate.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
    let v_perp = (velocity - t * velocity.dot(&t)).norm();
    let estimate = line.burgers.norm() * v_perp / (PI * core_radius * core_radius);
    let relative_discrepancy = if estimate > 0.0 {
        (rate_peak - estimate).abs() / estimate
    } else if rate_peak == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(TransportReport {
        balance,
        rate_peak,
        estimate,
        relative_discrepancy,
    })
}
