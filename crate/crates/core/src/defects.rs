//! Canonical screw, edge and wedge defects as regularised fields, and the
//! extraction of their Burgers and Frank charges.
//!
//! All defect lines run along `z` through `axis_point` in the xy-plane.
//! Singular cores are smoothed with a Gaussian of radius `eps`:
//!
//! ```text
//! dtheta_eps = (1 - exp(-r^2 / 2 eps^2)) (-y dx + x dy) / r^2
//! d(dtheta_eps) = 2 pi g_eps(r) dx^dy,   g_eps = exp(-r^2 / 2 eps^2) / (2 pi eps^2)
//! ```
//!
//! so `d(dtheta_eps)` is exactly the normalised Gaussian core density.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{
    antisym_slot, covariant_derivative, curvature_of, integrate_over_surface, Coframe,
    ConnectionField, Disk, FormField, Surface, ValueType,
};
use crate::grid::GridSpec;

/// Minimum distance between a core and the grid boundary, in core radii.
pub const CORE_MARGIN: f64 = 5.0;

/// `1 - exp(-r^2 / 2 eps^2)` divided by `r^2`, finite at the axis.
#[inline]
fn smoothing_over_r2(r2: f64, eps: f64) -> f64 {
    let t = r2 / (2.0 * eps * eps);
    if t < 1e-8 {
        // series of (1 - e^-t) / r^2
        (1.0 - 0.5 * t) / (2.0 * eps * eps)
    } else {
        -(-t).exp_m1() / r2
    }
}

/// Components `(a_x, a_y)` of the regularised angular form `dtheta_eps`
/// at offset `(x, y)` from the core.
#[inline]
pub fn angular_form(x: f64, y: f64, eps: f64) -> (f64, f64) {
    let k = smoothing_over_r2(x * x + y * y, eps);
    (-y * k, x * k)
}

/// Normalised Gaussian core density `g_eps(r)`; integrates to 1 over the plane.
#[inline]
pub fn core_density(r: f64, eps: f64) -> f64 {
    (-(r * r) / (2.0 * eps * eps)).exp() / (TAU * eps * eps)
}

/// Fraction of the core density inside the square `|x|, |y| <= half`
/// centred on the core.
pub fn core_mass_in_square(half: f64, eps: f64) -> f64 {
    let m = libm::erf(half / (eps * std::f64::consts::SQRT_2));
    m * m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    Screw,
    Edge,
    Wedge,
}

/// How an edge dislocation perturbs the coframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeProfile {
    /// `e^a = dx^a + (b^a / 2 pi) dtheta`: in-plane Burgers vector carried by
    /// the multivalued angle, 1/r distortion.
    #[default]
    Multivalued,
    /// `e^1 = dx + (b/2pi)(y/r^2) dtheta`, `e^2 = dy - (b/2pi)(x/r^2) dtheta`.
    /// Its circulation vanishes on every loop, so it carries no net Burgers
    /// flux; kept for comparison.
    MixedInverseSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DefectSpec {
    pub kind: DefectKind,
    /// Core position in the xy-plane.
    pub axis_point: [f64; 2],
    /// Burgers magnitude for dislocations, Frank angle for wedges.
    pub charge: f64,
    /// Unit in-plane Burgers direction; edge dislocations only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burgers_direction: Option<[f64; 2]>,
    pub core_radius: f64,
    #[serde(default, skip_serializing_if = "is_default_profile")]
    pub edge_profile: EdgeProfile,
}

fn is_default_profile(p: &EdgeProfile) -> bool {
    *p == EdgeProfile::Multivalued
}

impl DefectSpec {
    pub fn screw(x: f64, y: f64, b: f64, eps: f64) -> Self {
        DefectSpec {
            kind: DefectKind::Screw,
            axis_point: [x, y],
            charge: b,
            burgers_direction: None,
            core_radius: eps,
            edge_profile: EdgeProfile::Multivalued,
        }
    }

    pub fn edge(x: f64, y: f64, b: f64, direction: [f64; 2], eps: f64) -> Self {
        DefectSpec {
            kind: DefectKind::Edge,
            axis_point: [x, y],
            charge: b,
            burgers_direction: Some(direction),
            core_radius: eps,
            edge_profile: EdgeProfile::Multivalued,
        }
    }

    pub fn wedge(x: f64, y: f64, frank_angle: f64, eps: f64) -> Self {
        DefectSpec {
            kind: DefectKind::Wedge,
            axis_point: [x, y],
            charge: frank_angle,
            burgers_direction: None,
            core_radius: eps,
            edge_profile: EdgeProfile::Multivalued,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.core_radius > 0.0 && self.core_radius.is_finite()) {
            return Err(Error::InvalidDefect(format!(
                "core radius {} must be positive",
                self.core_radius
            )));
        }
        if !self.charge.is_finite() || !self.axis_point.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidDefect("non-finite charge or position".into()));
        }
        match (self.kind, self.burgers_direction) {
            (DefectKind::Edge, Some([dx, dy])) => {
                if ((dx * dx + dy * dy).sqrt() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidDefect(format!(
                        "edge Burgers direction ({dx}, {dy}) is not unit length"
                    )));
                }
                if self.edge_profile == EdgeProfile::MixedInverseSquare && (dx != 1.0 || dy != 0.0) {
                    return Err(Error::InvalidDefect(
                        "mixed inverse-square edge profile is defined for direction (1, 0) only".into(),
                    ));
                }
            }
            (DefectKind::Edge, None) => {
                return Err(Error::InvalidDefect("edge dislocation needs burgersDirection".into()))
            }
            (_, Some(_)) => {
                return Err(Error::InvalidDefect(
                    "burgersDirection is only meaningful for edge dislocations".into(),
                ))
            }
            _ => {}
        }
        Ok(())
    }

    /// Burgers vector `(b_x, b_y, b_z)`; zero for wedges.
    pub fn burgers(&self) -> [f64; 3] {
        match self.kind {
            DefectKind::Screw => [0.0, 0.0, self.charge],
            DefectKind::Edge => {
                let d = self.burgers_direction.unwrap_or([1.0, 0.0]);
                [self.charge * d[0], self.charge * d[1], 0.0]
            }
            DefectKind::Wedge => [0.0; 3],
        }
    }

    /// Axial Frank vector `(0, 0, 2 pi Theta)` expected from the curvature flux.
    pub fn frank_flux(&self) -> [f64; 3] {
        match self.kind {
            DefectKind::Wedge => [0.0, 0.0, TAU * self.charge],
            _ => [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectConfiguration {
    pub defects: Vec<DefectSpec>,
    pub grid: GridSpec,
}

impl DefectConfiguration {
    pub fn new(grid: GridSpec, defects: Vec<DefectSpec>) -> Result<Self> {
        let cfg = DefectConfiguration { defects, grid };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.grid.dim() < 3 {
            return Err(Error::WrongDimension {
                expected: ">= 3",
                found: self.grid.dim(),
            });
        }
        for d in &self.defects {
            d.validate()?;
            let margin = CORE_MARGIN * d.core_radius;
            let clearance = self.grid.boundary_clearance(&[d.axis_point[0], d.axis_point[1]], &[0, 1]);
            if !(clearance >= margin) {
                return Err(Error::CoreOutsideMargin {
                    x: d.axis_point[0],
                    y: d.axis_point[1],
                    margin,
                });
            }
        }
        Ok(())
    }

    /// Same defects on another grid (refinement or 4D extrusion).
    pub fn on_grid(&self, grid: GridSpec) -> Result<Self> {
        Self::new(grid, self.defects.clone())
    }

    pub fn dislocations(&self) -> impl Iterator<Item = &DefectSpec> {
        self.defects.iter().filter(|d| d.kind != DefectKind::Wedge)
    }

    pub fn wedges(&self) -> impl Iterator<Item = &DefectSpec> {
        self.defects.iter().filter(|d| d.kind == DefectKind::Wedge)
    }
}

/// Coframe: identity plus every dislocation's regularised perturbation.
pub fn build_coframe(config: &DefectConfiguration) -> Result<Coframe> {
    config.validate()?;
    let dim = config.grid.dim();
    let dislocations: Vec<&DefectSpec> = config.dislocations().collect();
    let e = FormField::from_fn(&config.grid, 1, ValueType::FrameVector(dim), |p, out| {
        // out[a * dim + mu] = e^a_mu
        for a in 0..dim {
            out[a * dim + a] = 1.0;
        }
        for d in &dislocations {
            let (x, y) = (p[0] - d.axis_point[0], p[1] - d.axis_point[1]);
            let eps = d.core_radius;
            let (ax, ay) = angular_form(x, y, eps);
            let k = d.charge / TAU;
            match (d.kind, d.edge_profile) {
                (DefectKind::Screw, _) => {
                    out[2 * dim] += k * ax;
                    out[2 * dim + 1] += k * ay;
                }
                (DefectKind::Edge, EdgeProfile::Multivalued) => {
                    let dir = d.burgers_direction.expect("validated edge direction");
                    for (a, &da) in dir.iter().enumerate() {
                        out[a * dim] += k * da * ax;
                        out[a * dim + 1] += k * da * ay;
                    }
                }
                (DefectKind::Edge, EdgeProfile::MixedInverseSquare) => {
                    let inv_r2 = smoothing_over_r2(x * x + y * y, eps);
                    out[0] += k * y * inv_r2 * ax;
                    out[1] += k * y * inv_r2 * ay;
                    out[dim] -= k * x * inv_r2 * ax;
                    out[dim + 1] -= k * x * inv_r2 * ay;
                }
                (DefectKind::Wedge, _) => unreachable!("filtered out"),
            }
        }
    })?;
    Coframe::new(e)
}

/// Spin connection: sum of the wedge disclinations' `w^1_2 = Theta dtheta_eps`.
pub fn build_connection(config: &DefectConfiguration) -> Result<ConnectionField> {
    config.validate()?;
    let dim = config.grid.dim();
    let wedges: Vec<&DefectSpec> = config.wedges().collect();
    // stored slot (2,1) holds w^2_1 = -w^1_2
    let slot = antisym_slot(1, 0);
    let omega = FormField::from_fn(&config.grid, 1, ValueType::FrameMatrixAntisym(dim), |p, out| {
        for d in &wedges {
            let (ax, ay) = angular_form(p[0] - d.axis_point[0], p[1] - d.axis_point[1], d.core_radius);
            out[slot * dim] -= d.charge * ax;
            out[slot * dim + 1] -= d.charge * ay;
        }
    })?;
    ConnectionField::new(omega)
}

/// Smooth, generic (non-abelian) coframe perturbation and connection of
/// size `amplitude`. The canonical fields are so symmetric that several
/// identities hold exactly on the grid; adding this background gives
/// refinement studies a genuine truncation error to measure.
pub fn smooth_background(grid: &GridSpec, amplitude: f64) -> Result<(FormField, FormField)> {
    let dim = grid.dim();
    let wave = |p: &[f64], k: usize| {
        let k = k as f64;
        let mut v = (0.9 * p[0] + 0.37 * k).sin() * (0.7 * p[1] - 0.21 * k).cos();
        for (i, x) in p.iter().enumerate().skip(2) {
            v *= 1.0 + 0.3 * (x + 0.1 * (k + i as f64)).sin();
        }
        amplitude * v
    };
    let e = FormField::from_fn(grid, 1, ValueType::FrameVector(dim), |p, out| {
        out.iter_mut().enumerate().for_each(|(k, v)| *v = wave(p, k));
    })?;
    let slots = ValueType::FrameMatrixAntisym(dim).slots();
    let w = FormField::from_fn(grid, 1, ValueType::FrameMatrixAntisym(dim), |p, out| {
        out.iter_mut().enumerate().for_each(|(k, v)| *v = wave(p, k + 7 * slots));
    })?;
    Ok((e, w))
}

/// Canonical fields with [`smooth_background`] superposed.
pub fn with_background(e: &Coframe, omega: &ConnectionField, amplitude: f64) -> Result<(Coframe, ConnectionField)> {
    let (de, dw) = smooth_background(e.form().grid(), amplitude)?;
    Ok((Coframe::new(e.form().add(&de)?)?, ConnectionField::new(omega.form().add(&dw)?)?))
}

/// `T = De = de + w ^ e`.
pub fn torsion(e: &Coframe, omega: &ConnectionField) -> Result<FormField> {
    if !e.form().grid().approx_eq(omega.form().grid()) {
        return Err(Error::GridMismatch);
    }
    covariant_derivative(e.form(), omega)
}

/// `R = dw + w ^ w`.
pub fn curvature(omega: &ConnectionField) -> Result<FormField> {
    curvature_of(omega)
}

fn check_charge_surface(samples: (usize, usize)) -> Result<()> {
    if samples.0 == 0 || samples.1 == 0 {
        return Err(Error::Degenerate("no quadrature samples".into()));
    }
    Ok(())
}

/// Per-frame-component torsion flux through `surface`.
pub fn burgers_vector(t: &FormField, surface: &dyn Surface, samples: (usize, usize)) -> Result<Vec<f64>> {
    check_charge_surface(samples)?;
    if !matches!(t.value_type(), ValueType::FrameVector(_)) {
        return Err(Error::FramePairing("torsion must be frame-vector valued".into()));
    }
    integrate_over_surface(t, surface, samples)
}

/// Curvature flux `Omega^a_b` through a surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrankCharge {
    /// Full antisymmetric matrix, `matrix[a][b] = Omega^a_b`.
    pub matrix: Vec<Vec<f64>>,
    /// `(Omega^2_3, Omega^3_1, Omega^1_2)`.
    pub axial: [f64; 3],
}

pub fn frank_vector(r: &FormField, surface: &dyn Surface, samples: (usize, usize)) -> Result<FrankCharge> {
    check_charge_surface(samples)?;
    let n = match r.value_type() {
        ValueType::FrameMatrixAntisym(n) if n >= 3 => n,
        other => {
            return Err(Error::FramePairing(format!(
                "curvature must be so(n>=3) valued, got {other:?}"
            )))
        }
    };
    let flux = integrate_over_surface(r, surface, samples)?;
    let mut matrix = vec![vec![0.0; n]; n];
    for a in 1..n {
        for b in 0..a {
            let v = flux[antisym_slot(a, b)];
            matrix[a][b] = v;
            matrix[b][a] = -v;
        }
    }
    let axial = [matrix[1][2], matrix[2][0], matrix[0][1]];
    Ok(FrankCharge { matrix, axial })
}

/// Disk in the xy-plane around a defect core, at mid-height of the grid.
pub fn core_disk(grid: &GridSpec, center: [f64; 2], radius: f64) -> Disk {
    let mut c: Vec<f64> = grid.extents.iter().map(|e| 0.5 * (e[0] + e[1])).collect();
    c[0] = center[0];
    c[1] = center[1];
    Disk::in_plane(c, radius, 0, 1)
}
