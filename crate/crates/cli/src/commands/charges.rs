//! Topological charges of every defect: Burgers vector from the torsion
//! flux, Frank vector from the curvature flux, and the coframe holonomy
//! around loops of several radii.

use cartan_core::defects::{burgers_vector, core_disk, frank_vector, DefectConfiguration, DefectKind};
use cartan_core::forms::{exterior_derivative, integrate_over_loop, Circle};
use serde::Serialize;

use super::Geometry;
use crate::error::CliError;
use crate::output::OutputDir;
use crate::scenario::Scenario;

pub const DISK_SAMPLES: usize = 256;
pub const LOOP_SAMPLES: usize = 512;
pub const MAX_DISK_RADIUS: f64 = 1.0;
/// Loop radii as fractions of the disk radius.
pub const LOOP_FRACTIONS: [f64; 3] = [0.3, 0.6, 0.9];

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Holonomy {
    pub radius: f64,
    pub value: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DefectCharges {
    pub index: usize,
    pub kind: DefectKind,
    pub axis_point: [f64; 2],
    pub core_radius: f64,
    pub disk_radius: f64,
    /// Torsion flux.
    pub burgers: [f64; 3],
    /// Flux of `de` alone, i.e. without the `w ^ e` torsion that nearby
    /// disclinations thread through the disk.
    pub coframe_burgers: [f64; 3],
    pub expected_burgers: [f64; 3],
    pub burgers_error: f64,
    pub coframe_burgers_error: f64,
    pub frank: [f64; 3],
    pub expected_frank: [f64; 3],
    pub frank_error: f64,
    pub holonomy: Vec<Holonomy>,
}

/// Largest disk around defect `k` that stays clear of the other cores and
/// of the boundary stencils.
pub fn disk_radius(config: &DefectConfiguration, k: usize) -> f64 {
    let d = &config.defects[k];
    let g = &config.grid;
    let mut r = MAX_DISK_RADIUS.min(g.boundary_clearance(&pad(d.axis_point, g.dim()), &[0, 1]) - 2.0 * g.min_spacing());
    for (j, other) in config.defects.iter().enumerate() {
        if j != k {
            let sep = (d.axis_point[0] - other.axis_point[0]).hypot(d.axis_point[1] - other.axis_point[1]);
            r = r.min(0.5 * sep);
        }
    }
    r
}

fn pad(p: [f64; 2], dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[..2].copy_from_slice(&p);
    v
}

fn first3(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn compute(geometry: &Geometry) -> Result<Vec<DefectCharges>, CliError> {
    let config = &geometry.config;
    let dim = config.grid.dim();
    let z = geometry.mid_height();
    let de = exterior_derivative(geometry.coframe.form())?;
    let mut out = Vec::with_capacity(config.defects.len());
    for (index, d) in config.defects.iter().enumerate() {
        let radius = disk_radius(config, index);
        let disk = core_disk(&config.grid, d.axis_point, radius);
        let burgers = first3(&burgers_vector(&geometry.torsion, &disk, (DISK_SAMPLES, DISK_SAMPLES))?);
        let coframe_burgers = first3(&burgers_vector(&de, &disk, (DISK_SAMPLES, DISK_SAMPLES))?);
        let frank = frank_vector(&geometry.curvature, &disk, (DISK_SAMPLES, DISK_SAMPLES))?.axial;
        let holonomy = LOOP_FRACTIONS
            .iter()
            .map(|f| {
                let circle = Circle::xy(dim, d.axis_point[0], d.axis_point[1], z, f * radius);
                let v = integrate_over_loop(geometry.coframe.form(), &circle, LOOP_SAMPLES)?;
                Ok(Holonomy { radius: f * radius, value: first3(&v) })
            })
            .collect::<Result<Vec<_>, cartan_core::Error>>()?;
        let (expected_burgers, expected_frank) = (d.burgers(), d.frank_flux());
        out.push(DefectCharges {
            index,
            kind: d.kind,
            axis_point: d.axis_point,
            core_radius: d.core_radius,
            disk_radius: radius,
            burgers_error: distance(&burgers, &expected_burgers),
            coframe_burgers_error: distance(&coframe_burgers, &expected_burgers),
            frank_error: distance(&frank, &expected_frank),
            burgers,
            coframe_burgers,
            expected_burgers,
            frank,
            expected_frank,
            holonomy,
        });
    }
    Ok(out)
}

pub fn run(scenario: &Scenario, out: &mut OutputDir) -> Result<(), CliError> {
    let geometry = Geometry::build(scenario)?;
    let charges = compute(&geometry)?;
    out.json("charges.json", &charges)
}
