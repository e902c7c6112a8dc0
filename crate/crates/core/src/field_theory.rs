//! Action density, field-equation residuals, Bianchi identities and the
//! U(1) source forms, evaluated as diagnostics on sampled configurations.
//!
//! Nothing here solves an equation: each function takes a coframe and a
//! connection, builds the relevant combination of forms and reports how far
//! it is from zero. The field equations need `D(*T)` and `R ^ e` to be of the
//! same degree, which only happens in four dimensions; static 3D
//! configurations are embedded on a thin 4D grid for that (see
//! [`embed_thin_4d`]).

use serde::{Deserialize, Serialize};

use crate::defects::{DefectConfiguration, CORE_MARGIN};
use crate::error::{Error, Result};
use crate::forms::{
    covariant_derivative, curvature_of, exterior_derivative, hodge_star, integrate_over_box, wedge,
    AxisBox, Coframe, ConnectionField, FormField, Pairing, ValueType,
};
use crate::grid::GridSpec;

/// Norms below this are treated as identically zero when forming
/// refinement ratios.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Couplings {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(default)]
    pub kappa_u1: f64,
    #[serde(default)]
    pub lambda_u1: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            kappa_u1: 1.0,
            lambda_u1: 1.0,
        }
    }
}

impl Couplings {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} = {v} must be positive")));
            }
        }
        if !self.kappa_u1.is_finite() || !self.lambda_u1.is_finite() {
            return Err(Error::InvalidParams("non-finite U(1) coupling".into()));
        }
        Ok(())
    }

    /// `Gamma = gamma / alpha`, the coupling of curvature in the coframe equation.
    pub fn gamma_ratio(&self) -> f64 {
        self.gamma / self.alpha
    }

    /// `kappa = gamma / (2 beta)`, the coupling of torsion in the connection equation.
    pub fn kappa_el(&self) -> f64 {
        self.gamma / (2.0 * self.beta)
    }
}

/// Straight core tube along the line axis, excluded from residual norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreTube {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Which grid points count when forming residual norms.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorRegion {
    /// Boundary layers dropped on each axis.
    pub layers: Vec<usize>,
    pub tubes: Vec<CoreTube>,
}

impl InteriorRegion {
    /// Drop `layers` cells at both ends of every axis.
    pub fn boundary(dim: usize, layers: usize) -> Self {
        InteriorRegion {
            layers: vec![layers; dim],
            tubes: Vec::new(),
        }
    }

    /// Region used for canonical configurations: two boundary layers across
    /// the transverse plane (where one-sided stencils feed a second
    /// derivative) and a tube of `5 eps` around every core. The canonical
    /// fields are constant along the line axis, so nothing is trimmed there.
    pub fn for_configuration(config: &DefectConfiguration) -> Self {
        let mut layers = vec![0; config.grid.dim()];
        layers[0] = 2;
        layers[1] = 2;
        InteriorRegion {
            layers,
            tubes: config
                .defects
                .iter()
                .map(|d| CoreTube {
                    center: d.axis_point,
                    radius: CORE_MARGIN * d.core_radius,
                })
                .collect(),
        }
    }

    pub fn with_layers(mut self, layers: Vec<usize>) -> Self {
        self.layers = layers;
        self
    }

    pub fn mask(&self, grid: &GridSpec) -> Result<Vec<bool>> {
        if self.layers.len() != grid.dim() {
            return Err(Error::GridMismatch);
        }
        let mut idx = vec![0; grid.dim()];
        Ok((0..grid.n_points())
            .map(|p| {
                grid.unflatten(p, &mut idx);
                let inside = idx
                    .iter()
                    .zip(&self.layers)
                    .zip(&grid.resolution)
                    .all(|((&i, &l), &n)| i >= l && i + l < n);
                inside
                    && self.tubes.iter().all(|t| {
                        let dx = grid.coord(0, idx[0]) - t.center[0];
                        let dy = grid.coord(1, idx[1]) - t.center[1];
                        dx * dx + dy * dy > t.radius * t.radius
                    })
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub field: FormField,
    /// `sqrt(sum |coefficients|^2 * cell volume)` over the counted points.
    pub l2_norm: f64,
    pub max_norm: f64,
    pub interior_only: bool,
}

impl Residual {
    pub fn measure(field: FormField, region: Option<&InteriorRegion>) -> Result<Self> {
        let np = field.n_points();
        let mask = match region {
            Some(r) => Some(r.mask(field.grid())?),
            None => None,
        };
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        for ch in field.data().chunks_exact(np) {
            for (p, &v) in ch.iter().enumerate() {
                if mask.as_ref().is_none_or(|m| m[p]) {
                    sum += v * v;
                    max = max.max(v.abs());
                }
            }
        }
        let l2_norm = (sum * field.grid().cell_volume()).sqrt();
        Ok(Residual {
            field,
            l2_norm,
            max_norm: max,
            interior_only: region.is_some(),
        })
    }

    pub fn record(&self, term: &str, core_radius: Option<f64>, couplings: Option<Couplings>) -> ResidualRecord {
        ResidualRecord {
            term: term.to_string(),
            l2_norm: self.l2_norm,
            max_norm: self.max_norm,
            interior_only: self.interior_only,
            resolution: self.field.grid().resolution.clone(),
            core_radius,
            couplings,
        }
    }
}

/// One line of a residual report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualRecord {
    pub term: String,
    pub l2_norm: f64,
    pub max_norm: f64,
    pub interior_only: bool,
    pub resolution: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Couplings>,
}

/// Outcome of comparing a norm at spacing `h` with the one at `h/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "ratio")]
pub enum Refinement {
    /// Both norms are at the roundoff floor: the discrete quantity vanishes.
    IdenticallyZero,
    Ratio(f64),
}

impl Refinement {
    pub fn compare(coarse: f64, fine: f64) -> Self {
        if coarse <= ROUNDOFF_FLOOR && fine <= ROUNDOFF_FLOOR {
            Refinement::IdenticallyZero
        } else {
            Refinement::Ratio(coarse / fine)
        }
    }

    /// Second-order behaviour: ratio in `[3, 5]`, or exact vanishing.
    pub fn is_second_order(self) -> bool {
        match self {
            Refinement::IdenticallyZero => true,
            Refinement::Ratio(r) => (3.0..=5.0).contains(&r),
        }
    }
}

/// Integral of a scalar top-degree form, by the cell-centred midpoint rule.
pub fn integrate_top_form(f: &FormField) -> Result<f64> {
    if f.degree() != f.dim() || f.value_type() != ValueType::Scalar {
        return Err(Error::WrongDegree {
            expected: f.dim(),
            found: f.degree(),
        });
    }
    Ok(f.data().iter().sum::<f64>() * f.grid().cell_volume())
}

fn check_pair(e: &Coframe, omega: &ConnectionField) -> Result<()> {
    if !e.form().grid().approx_eq(omega.form().grid()) {
        return Err(Error::GridMismatch);
    }
    if e.frame_dim() != omega.frame_dim() {
        return Err(Error::FramePairing(format!(
            "coframe has {} legs, connection acts on {}",
            e.frame_dim(),
            omega.frame_dim()
        )));
    }
    Ok(())
}

fn require_dim4(e: &Coframe) -> Result<()> {
    match e.form().dim() {
        4 => Ok(()),
        found => Err(Error::WrongDimension { expected: "4", found }),
    }
}

/// The three densities of the action and their integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDensity {
    /// `alpha T^a ^ *T_a`.
    pub torsion: FormField,
    /// `beta R^a_b ^ *R^b_a`.
    pub curvature: FormField,
    /// `gamma e^a ^ R_ab ^ e^b`; `None` below four dimensions, where it
    /// cannot be a top form and vanishes identically.
    pub mixed: Option<FormField>,
    pub total: FormField,
    pub integrals: ActionIntegrals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ActionIntegrals {
    pub torsion: f64,
    pub curvature: f64,
    pub mixed: f64,
    pub action: f64,
}

pub fn action_density(e: &Coframe, omega: &ConnectionField, c: &Couplings) -> Result<ActionDensity> {
    check_pair(e, omega)?;
    c.validate()?;
    let t = covariant_derivative(e.form(), omega)?;
    let r = curvature_of(omega)?;
    let torsion = wedge(&t, &hodge_star(&t)?, Pairing::Contract)?.scaled(c.alpha);
    let curvature = wedge(&r, &hodge_star(&r)?, Pairing::Trace)?.scaled(c.beta);
    let mixed = if e.form().dim() == 4 {
        let er = wedge(e.form(), &r, Pairing::VectorMatrix)?;
        Some(wedge(&er, e.form(), Pairing::Contract)?.scaled(c.gamma))
    } else {
        None
    };
    let mut total = torsion.add(&curvature)?;
    if let Some(m) = &mixed {
        total = total.add(m)?;
    }
    let integrals = ActionIntegrals {
        torsion: integrate_top_form(&torsion)?,
        curvature: integrate_top_form(&curvature)?,
        mixed: mixed.as_ref().map(integrate_top_form).transpose()?.unwrap_or(0.0),
        action: integrate_top_form(&total)?,
    };
    Ok(ActionDensity {
        torsion,
        curvature,
        mixed,
        total,
        integrals,
    })
}

/// `D(*T_a) + Gamma R_ab ^ e^b`.
pub fn el_coframe_residual(
    e: &Coframe,
    omega: &ConnectionField,
    c: &Couplings,
    region: Option<&InteriorRegion>,
) -> Result<Residual> {
    check_pair(e, omega)?;
    require_dim4(e)?;
    c.validate()?;
    let t = covariant_derivative(e.form(), omega)?;
    let dst = covariant_derivative(&hodge_star(&t)?, omega)?;
    let r = curvature_of(omega)?;
    let re = wedge(&r, e.form(), Pairing::MatrixVector)?;
    Residual::measure(dst.axpy(c.gamma_ratio(), &re)?, region)
}

/// `D(*R_ab) + kappa (e^a ^ *T_b - e^b ^ *T_a)`.
pub fn el_connection_residual(
    e: &Coframe,
    omega: &ConnectionField,
    c: &Couplings,
    region: Option<&InteriorRegion>,
) -> Result<Residual> {
    check_pair(e, omega)?;
    require_dim4(e)?;
    c.validate()?;
    let t = covariant_derivative(e.form(), omega)?;
    let r = curvature_of(omega)?;
    let dsr = covariant_derivative(&hodge_star(&r)?, omega)?;
    let source = wedge(e.form(), &hodge_star(&t)?, Pairing::AntisymOuter)?;
    Residual::measure(dsr.axpy(c.kappa_el(), &source)?, region)
}

/// `(DR, DT - R ^ e)`.
pub fn bianchi_residuals(
    e: &Coframe,
    omega: &ConnectionField,
    region: Option<&InteriorRegion>,
) -> Result<(Residual, Residual)> {
    check_pair(e, omega)?;
    let r = curvature_of(omega)?;
    let dr = covariant_derivative(&r, omega)?;
    let t = covariant_derivative(e.form(), omega)?;
    let dt = covariant_derivative(&t, omega)?;
    let re = wedge(&r, e.form(), Pairing::MatrixVector)?;
    Ok((Residual::measure(dr, region)?, Residual::measure(dt.sub(&re)?, region)?))
}

/// Geometric sources of the U(1) field.
#[derive(Debug, Clone, PartialEq)]
pub struct U1Sources {
    /// `kappa T^a ^ e_a`, a 3-form.
    pub j1: FormField,
    /// `lambda e^a ^ R_ab ^ e^b`, a 4-form; `None` in three dimensions,
    /// where it vanishes identically.
    pub j2: Option<FormField>,
    /// `dJ1`; `None` in three dimensions (no 4-forms exist).
    pub dj1: Option<Residual>,
    /// `dJ2`; `None` up to four dimensions (J2 is already top degree).
    pub dj2: Option<Residual>,
}

pub fn u1_sources(
    e: &Coframe,
    omega: &ConnectionField,
    c: &Couplings,
    region: Option<&InteriorRegion>,
) -> Result<U1Sources> {
    check_pair(e, omega)?;
    let dim = e.form().dim();
    if dim < 3 {
        return Err(Error::WrongDimension { expected: ">= 3", found: dim });
    }
    let t = covariant_derivative(e.form(), omega)?;
    let j1 = wedge(&t, e.form(), Pairing::Contract)?.scaled(c.kappa_u1);
    let j2 = if dim >= 4 {
        let r = curvature_of(omega)?;
        let er = wedge(e.form(), &r, Pairing::VectorMatrix)?;
        Some(wedge(&er, e.form(), Pairing::Contract)?.scaled(c.lambda_u1))
    } else {
        None
    };
    let dj1 = if dim > 3 {
        Some(Residual::measure(exterior_derivative(&j1)?, region)?)
    } else {
        None
    };
    let dj2 = match &j2 {
        Some(j) if j.degree() < dim => Some(Residual::measure(exterior_derivative(j)?, region)?),
        _ => None,
    };
    Ok(U1Sources { j1, j2, dj1, dj2 })
}

/// Net U(1) charge sourced inside `volume`: `int_V J1`.
pub fn u1_flux_balance(j1: &FormField, volume: &AxisBox, samples: usize) -> Result<f64> {
    if j1.value_type() != ValueType::Scalar {
        return Err(Error::FramePairing("J1 must be scalar valued".into()));
    }
    Ok(integrate_over_box(j1, volume, samples)?[0])
}

/// Embed a static 3D pair on a 4D grid with `cells` layers along `w`:
/// fields are constant in `w`, `e^4 = dw` and the connection has no
/// fourth-leg components.
pub fn embed_thin_4d(
    e: &Coframe,
    omega: &ConnectionField,
    extent: [f64; 2],
    cells: usize,
) -> Result<(Coframe, ConnectionField)> {
    check_pair(e, omega)?;
    if e.form().dim() != 3 || e.frame_dim() != 3 {
        return Err(Error::WrongDimension {
            expected: "3",
            found: e.form().dim(),
        });
    }
    let g4 = e.form().grid().extruded(extent, cells)?;
    let mut e4 = e.form().extrude(&g4)?.with_frame_dim(4)?;
    // slot 3, component dw (index 3 in the 1-form basis of 4D)
    e4.component_mut(3, 3).iter_mut().for_each(|v| *v = 1.0);
    let w4 = omega.form().extrude(&g4)?.with_frame_dim(4)?;
    Ok((Coframe::new(e4)?, ConnectionField::new(w4)?))
}
