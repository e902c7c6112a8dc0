//! Field dumps: binary field files for torsion, curvature, coframe
//! perturbation and connection, CSV exports of their mid-height plane, and
//! per-defect figure data (screw torsion peak, edge quiver and radial
//! profile, wedge circulation).

use cartan_core::defects::{angular_form, DefectKind, DefectSpec};
use cartan_core::forms::io::{write_csv_slice, write_field};
use cartan_core::forms::{antisym_slot, Coframe, FormField, Interpolator};
use serde::Serialize;

use super::charges::disk_radius;
use super::Geometry;
use crate::error::CliError;
use crate::output::OutputDir;
use crate::scenario::Scenario;

/// Arrows per axis in quiver exports.
const QUIVER_POINTS: usize = 32;
const PROFILE_SAMPLES: usize = 64;

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct FieldSummary {
    name: String,
    file: String,
    csv: String,
    max_abs: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ScrewPeak {
    index: usize,
    axis_point: [f64; 2],
    /// Grid sample of largest `|T^3_xy|` in the mid-height plane.
    peak_at: [f64; 2],
    peak_value: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct FieldsReport {
    slice_height: f64,
    fields: Vec<FieldSummary>,
    screw_peaks: Vec<ScrewPeak>,
    figure_files: Vec<String>,
}

fn mid_index(geometry: &Geometry) -> usize {
    geometry.config.grid.resolution[2] / 2
}

/// Grid samples of the mid plane, thinned to about `QUIVER_POINTS` per axis.
fn quiver_points(geometry: &Geometry) -> Vec<usize> {
    let g = &geometry.config.grid;
    let strides = g.strides();
    let k = mid_index(geometry);
    let step = |n: usize| (n / QUIVER_POINTS).max(1);
    let (sx, sy) = (step(g.resolution[0]), step(g.resolution[1]));
    let mut out = Vec::new();
    for i in (0..g.resolution[0]).step_by(sx) {
        for j in (0..g.resolution[1]).step_by(sy) {
            // remaining axes beyond z sit at index 0
            out.push(i * strides[0] + j * strides[1] + k * strides[2]);
        }
    }
    out
}

/// Rows start with the header; every cell is a plain number, so no quoting.
fn with_header(header: &[&str]) -> Vec<Vec<String>> {
    vec![header.iter().map(|s| s.to_string()).collect()]
}

fn flush_rows(out: &mut OutputDir, name: &str, rows: Vec<Vec<String>>) -> Result<(), CliError> {
    use std::io::Write;
    let mut w = out.create(name)?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// `u_mu = sum_a d_a (e^a_mu - delta^a_mu)` for `mu` in `{x, y}`.
fn in_plane_perturbation(e: &[f64], dim: usize, d: [f64; 2]) -> [f64; 2] {
    let mut u = [0.0; 2];
    for (a, da) in d.iter().enumerate() {
        for (mu, um) in u.iter_mut().enumerate() {
            let delta = if a == mu { 1.0 } else { 0.0 };
            *um += da * (e[a * dim + mu] - delta);
        }
    }
    u
}

fn edge_figures(
    geometry: &Geometry,
    index: usize,
    d: &DefectSpec,
    out: &mut OutputDir,
) -> Result<Vec<String>, CliError> {
    let g = &geometry.config.grid;
    let dim = g.dim();
    let e = geometry.coframe.form();
    let np = g.n_points();
    let dir = d.burgers_direction.unwrap_or([1.0, 0.0]);
    let mut channels = vec![0.0; e.channels()];

    let quiver = format!("edge_{index}_quiver.csv");
    let mut rows = with_header(&["x", "y", "ux", "uy"]);
    for p in quiver_points(geometry) {
        for (ch, v) in channels.iter_mut().enumerate() {
            *v = e.data()[ch * np + p];
        }
        let x = g.point(p);
        let u = in_plane_perturbation(&channels, dim, dir);
        rows.push(vec![x[0].to_string(), x[1].to_string(), u[0].to_string(), u[1].to_string()]);
    }
    flush_rows(out, &quiver, rows)?;

    // radial profile perpendicular to the Burgers direction
    let profile = format!("edge_{index}_profile.csv");
    let mut rows = with_header(&["r", "ux", "uy", "magnitude", "r_times_magnitude", "analytic"]);
    let interp = Interpolator::new(e);
    let ray = [-dir[1], dir[0]];
    let (r0, r1) = (2.0 * d.core_radius, disk_radius(&geometry.config, index).max(3.0 * d.core_radius));
    let mut point: Vec<f64> = g.extents.iter().map(|ex| 0.5 * (ex[0] + ex[1])).collect();
    for s in 0..PROFILE_SAMPLES {
        let r = r0 + (r1 - r0) * s as f64 / (PROFILE_SAMPLES - 1) as f64;
        point[0] = d.axis_point[0] + r * ray[0];
        point[1] = d.axis_point[1] + r * ray[1];
        interp.eval(&point, &mut channels)?;
        let u = in_plane_perturbation(&channels, dim, dir);
        let mag = u[0].hypot(u[1]);
        let (ax, ay) = angular_form(r * ray[0], r * ray[1], d.core_radius);
        let analytic = d.charge / std::f64::consts::TAU * ax.hypot(ay);
        rows.push(vec![
            r.to_string(),
            u[0].to_string(),
            u[1].to_string(),
            mag.to_string(),
            (r * mag).to_string(),
            analytic.to_string(),
        ]);
    }
    flush_rows(out, &profile, rows)?;
    Ok(vec![quiver, profile])
}

fn wedge_circulation(geometry: &Geometry, out: &mut OutputDir) -> Result<String, CliError> {
    let g = &geometry.config.grid;
    let w = geometry.connection.form();
    let np = g.n_points();
    let n_comp = w.n_components();
    // stored slot (2,1) holds w^2_1 = -w^1_2
    let slot = antisym_slot(1, 0);
    let name = "wedge_circulation.csv".to_string();
    let mut rows = with_header(&["x", "y", "w12_x", "w12_y"]);
    for p in quiver_points(geometry) {
        let x = g.point(p);
        let wx = -w.data()[(slot * n_comp) * np + p];
        let wy = -w.data()[(slot * n_comp + 1) * np + p];
        rows.push(vec![x[0].to_string(), x[1].to_string(), wx.to_string(), wy.to_string()]);
    }
    flush_rows(out, &name, rows)?;
    Ok(name)
}

fn screw_peaks(geometry: &Geometry) -> Vec<ScrewPeak> {
    let g = &geometry.config.grid;
    let np = g.n_points();
    let t = &geometry.torsion;
    // T^3, component dx^dy (first in the lexicographic 2-form basis)
    let t3 = &t.data()[(2 * t.n_components()) * np..(2 * t.n_components() + 1) * np];
    let strides = g.strides();
    let k = mid_index(geometry);
    geometry
        .config
        .defects
        .iter()
        .enumerate()
        .filter(|(_, d)| d.kind == DefectKind::Screw)
        .map(|(index, d)| {
            // search the cells within the disk around this core
            let radius = disk_radius(&geometry.config, index);
            let mut best = (0usize, 0.0f64);
            for i in 0..g.resolution[0] {
                for j in 0..g.resolution[1] {
                    let p = i * strides[0] + j * strides[1] + k * strides[2];
                    let (x, y) = (g.coord(0, i), g.coord(1, j));
                    if (x - d.axis_point[0]).hypot(y - d.axis_point[1]) <= radius && t3[p].abs() > best.1.abs() {
                        best = (p, t3[p]);
                    }
                }
            }
            let x = g.point(best.0);
            ScrewPeak { index, axis_point: d.axis_point, peak_at: [x[0], x[1]], peak_value: best.1 }
        })
        .collect()
}

fn dump(out: &mut OutputDir, name: &str, prefix: &str, f: &FormField, k: usize) -> Result<FieldSummary, CliError> {
    let file = format!("{name}.cff");
    let mut w = out.create(&file)?;
    write_field(&mut w, name, f)?;
    let csv = format!("{name}_slice.csv");
    write_csv_slice(out.create(&csv)?, prefix, f, 2, k)?;
    Ok(FieldSummary { name: name.into(), file, csv, max_abs: f.max_abs() })
}

pub fn run(scenario: &Scenario, out: &mut OutputDir) -> Result<(), CliError> {
    let geometry = Geometry::build(scenario)?;
    let k = mid_index(&geometry);
    let identity = Coframe::identity(&geometry.config.grid)?;
    let perturbation = geometry.coframe.form().sub(identity.form())?;
    let fields = vec![
        dump(out, "torsion", "T", &geometry.torsion, k)?,
        dump(out, "curvature", "R", &geometry.curvature, k)?,
        dump(out, "coframe_perturbation", "de", &perturbation, k)?,
        dump(out, "connection", "w", geometry.connection.form(), k)?,
    ];
    let mut figure_files = Vec::new();
    for (index, d) in geometry.config.defects.iter().enumerate() {
        if d.kind == DefectKind::Edge {
            figure_files.extend(edge_figures(&geometry, index, d, out)?);
        }
    }
    if geometry.config.wedges().next().is_some() {
        figure_files.push(wedge_circulation(&geometry, out)?);
    }
    let report = FieldsReport {
        slice_height: geometry.config.grid.coord(2, k),
        fields,
        screw_peaks: screw_peaks(&geometry),
        figure_files,
    };
    out.json("fields.json", &report)
}
