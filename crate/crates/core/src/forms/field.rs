use serde::{Deserialize, Serialize};

use super::basis::{binomial, Basis};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Internal (frame) index structure carried by a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum ValueType {
    Scalar,
    /// One form per frame index `a = 1..n`.
    FrameVector(usize),
    /// `so(n)`-valued: entries `c[a][b] = -c[b][a]`, only `a > b` stored.
    FrameMatrixAntisym(usize),
}

impl ValueType {
    /// Number of stored frame slots.
    pub fn slots(self) -> usize {
        match self {
            ValueType::Scalar => 1,
            ValueType::FrameVector(n) => n,
            ValueType::FrameMatrixAntisym(n) => n * n.saturating_sub(1) / 2,
        }
    }

    pub fn frame_dim(self) -> Option<usize> {
        match self {
            ValueType::Scalar => None,
            ValueType::FrameVector(n) | ValueType::FrameMatrixAntisym(n) => Some(n),
        }
    }

    /// Slot labels used in files: `""`, `"1".."n"`, or `"21","31","32",...`.
    pub fn slot_labels(self) -> Vec<String> {
        match self {
            ValueType::Scalar => vec![String::new()],
            ValueType::FrameVector(n) => (1..=n).map(|a| a.to_string()).collect(),
            ValueType::FrameMatrixAntisym(n) => (1..n)
                .flat_map(|a| (0..a).map(move |b| format!("{}{}", a + 1, b + 1)))
                .collect(),
        }
    }
}

/// Storage slot of the lower-triangle entry `(a, b)`, `a > b` (0-based).
#[inline]
pub fn antisym_slot(a: usize, b: usize) -> usize {
    debug_assert!(a > b);
    a * (a - 1) / 2 + b
}

/// Slot and sign of matrix entry `(a, b)`; `None` on the diagonal.
#[inline]
pub fn matrix_entry(a: usize, b: usize) -> Option<(usize, f64)> {
    use std::cmp::Ordering::*;
    match a.cmp(&b) {
        Greater => Some((antisym_slot(a, b), 1.0)),
        Less => Some((antisym_slot(b, a), -1.0)),
        Equal => None,
    }
}

/// A k-form field sampled on a regular grid.
///
/// Coefficients are laid out frame slot outermost, then basis component in
/// lexicographic multi-index order, then grid samples in C order.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    grid: GridSpec,
    degree: usize,
    value_type: ValueType,
    data: Vec<f64>,
}

impl FormField {
    pub fn zeros(grid: &GridSpec, degree: usize, value_type: ValueType) -> Result<Self> {
        let dim = grid.dim();
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let len = value_type.slots() * binomial(dim, degree) * grid.n_points();
        Ok(FormField {
            grid: grid.clone(),
            degree,
            value_type,
            data: vec![0.0; len],
        })
    }

    /// Build from raw coefficients in storage order, checking length and finiteness.
    pub fn from_data(
        grid: &GridSpec,
        degree: usize,
        value_type: ValueType,
        data: Vec<f64>,
    ) -> Result<Self> {
        let mut f = Self::zeros(grid, degree, value_type)?;
        if data.len() != f.data.len() {
            return Err(Error::Format(format!(
                "expected {} coefficients, got {}",
                f.data.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("coefficient array".into()));
        }
        f.data = data;
        Ok(f)
    }

    /// Sample a field pointwise. `f(point, out)` fills `out[slot * n_comp + comp]`.
    pub fn from_fn<F>(grid: &GridSpec, degree: usize, value_type: ValueType, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let mut field = Self::zeros(grid, degree, value_type)?;
        let n_comp = field.n_components();
        let channels = value_type.slots() * n_comp;
        let np = grid.n_points();
        let mut buf = vec![0.0; channels];
        for p in 0..np {
            let x = grid.point(p);
            buf.iter_mut().for_each(|v| *v = 0.0);
            f(&x, &mut buf);
            for (ch, &v) in buf.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("sample at {x:?}")));
                }
                field.data[ch * np + p] = v;
            }
        }
        Ok(field)
    }

    /// Spatially constant field with the given per-channel coefficients.
    pub fn constant(
        grid: &GridSpec,
        degree: usize,
        value_type: ValueType,
        coeffs: &[f64],
    ) -> Result<Self> {
        Self::from_fn(grid, degree, value_type, |_, out| {
            out.copy_from_slice(coeffs);
        })
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn value_type(&self) -> ValueType {
        self.value_type
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn basis(&self) -> Basis {
        Basis::new(self.dim(), self.degree)
    }

    #[inline]
    pub fn n_components(&self) -> usize {
        binomial(self.dim(), self.degree)
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.value_type.slots() * self.n_components()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Coefficient array of one (slot, component).
    pub fn component(&self, slot: usize, comp: usize) -> &[f64] {
        let np = self.n_points();
        let ch = slot * self.n_components() + comp;
        &self.data[ch * np..(ch + 1) * np]
    }

    pub(crate) fn component_mut(&mut self, slot: usize, comp: usize) -> &mut [f64] {
        let np = self.n_points();
        let ch = slot * self.n_components() + comp;
        &mut self.data[ch * np..(ch + 1) * np]
    }

    /// Matrix entry `c[a][b]` (0-based) of an antisymmetric field, reflected from storage.
    pub fn matrix_value(&self, a: usize, b: usize, comp: usize, point: usize) -> f64 {
        match matrix_entry(a, b) {
            Some((slot, sign)) => sign * self.component(slot, comp)[point],
            None => 0.0,
        }
    }

    pub fn same_shape(&self, other: &FormField) -> bool {
        self.degree == other.degree
            && self.value_type == other.value_type
            && self.grid.approx_eq(&other.grid)
    }

    fn check_shape(&self, other: &FormField) -> Result<()> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if !self.same_shape(other) {
            return Err(Error::FramePairing(format!(
                "cannot combine {:?} {}-form with {:?} {}-form",
                self.value_type, self.degree, other.value_type, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FormField) -> Result<FormField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &FormField) -> Result<FormField> {
        self.axpy(-1.0, other)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &FormField) -> Result<FormField> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (o, &v) in out.data.iter_mut().zip(&other.data) {
            *o += s * v;
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> FormField {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Same coefficients reinterpreted with a different frame dimension,
    /// padding new slots with zeros (e.g. embedding an `so(3)` field in `so(4)`).
    pub fn with_frame_dim(&self, n: usize) -> Result<FormField> {
        let value_type = match self.value_type {
            ValueType::Scalar => return Ok(self.clone()),
            ValueType::FrameVector(m) if n >= m => ValueType::FrameVector(n),
            ValueType::FrameMatrixAntisym(m) if n >= m => ValueType::FrameMatrixAntisym(n),
            _ => {
                return Err(Error::FramePairing(format!(
                    "cannot shrink {:?} to frame dimension {n}",
                    self.value_type
                )))
            }
        };
        let mut out = FormField::zeros(&self.grid, self.degree, value_type)?;
        let len = self.data.len();
        // slot numbering is prefix-stable in both layouts
        out.data[..len].copy_from_slice(&self.data);
        Ok(out)
    }

    /// Embed into a grid with one extra trailing axis, constant along it.
    ///
    /// Components keep their multi-index; components involving the new
    /// axis are zero.
    pub fn extrude(&self, grid: &GridSpec) -> Result<FormField> {
        let dim = self.dim();
        if grid.dim() != dim + 1
            || grid.extents[..dim] != self.grid.extents[..]
            || grid.resolution[..dim] != self.grid.resolution[..]
        {
            return Err(Error::GridMismatch);
        }
        let mut out = FormField::zeros(grid, self.degree, self.value_type)?;
        let src_basis = self.basis();
        let dst_basis = out.basis();
        let layers = grid.resolution[dim];
        for slot in 0..self.value_type.slots() {
            for (ci, &mask) in src_basis.masks.iter().enumerate() {
                let di = dst_basis.index(mask).expect("mask present in larger basis");
                let src = self.component(slot, ci).to_vec();
                let dst = out.component_mut(slot, di);
                for (p, &v) in src.iter().enumerate() {
                    dst[p * layers..(p + 1) * layers].iter_mut().for_each(|d| *d = v);
                }
            }
        }
        Ok(out)
    }
}

/// A tangent vector field given by its coordinate components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: GridSpec,
    /// `dim` arrays of length `n_points`, component-major.
    data: Vec<f64>,
}

impl VectorField {
    pub fn uniform(grid: &GridSpec, v: &[f64]) -> Result<Self> {
        Self::from_fn(grid, |_, out| out.copy_from_slice(v))
    }

    pub fn from_fn<F>(grid: &GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let dim = grid.dim();
        let np = grid.n_points();
        let mut data = vec![0.0; dim * np];
        let mut buf = vec![0.0; dim];
        for p in 0..np {
            let x = grid.point(p);
            f(&x, &mut buf);
            for (a, &v) in buf.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("vector field at {x:?}")));
                }
                data[a * np + p] = v;
            }
        }
        Ok(VectorField {
            grid: grid.clone(),
            data,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        let np = self.grid.n_points();
        &self.data[axis * np..(axis + 1) * np]
    }
}

/// The coframe `e^a`: a frame-vector-valued 1-form.
#[derive(Debug, Clone, PartialEq)]
pub struct Coframe(FormField);

impl Coframe {
    pub fn new(e: FormField) -> Result<Self> {
        if e.degree() != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                found: e.degree(),
            });
        }
        match e.value_type() {
            ValueType::FrameVector(_) => Ok(Coframe(e)),
            other => Err(Error::FramePairing(format!(
                "coframe must be frame-vector valued, got {other:?}"
            ))),
        }
    }

    /// `e^a = dx^a` with frame dimension equal to the grid dimension.
    pub fn identity(grid: &GridSpec) -> Result<Self> {
        let dim = grid.dim();
        let mut coeffs = vec![0.0; dim * dim];
        for a in 0..dim {
            coeffs[a * dim + a] = 1.0;
        }
        Coframe::new(FormField::constant(
            grid,
            1,
            ValueType::FrameVector(dim),
            &coeffs,
        )?)
    }

    /// Spatially constant coframe `e^a = m[a][mu] dx^mu`.
    pub fn affine(grid: &GridSpec, m: &[Vec<f64>]) -> Result<Self> {
        let dim = grid.dim();
        if m.len() != dim || m.iter().any(|row| row.len() != dim) {
            return Err(Error::FramePairing("affine coframe matrix shape".into()));
        }
        let coeffs: Vec<f64> = m.iter().flatten().copied().collect();
        Coframe::new(FormField::constant(
            grid,
            1,
            ValueType::FrameVector(dim),
            &coeffs,
        )?)
    }

    pub fn form(&self) -> &FormField {
        &self.0
    }

    pub fn into_form(self) -> FormField {
        self.0
    }

    pub fn frame_dim(&self) -> usize {
        self.0.value_type().frame_dim().unwrap_or(0)
    }
}

/// The spin connection `omega^a_b`: an antisymmetric-matrix-valued 1-form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionField(FormField);

impl ConnectionField {
    pub fn new(omega: FormField) -> Result<Self> {
        if omega.degree() != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                found: omega.degree(),
            });
        }
        match omega.value_type() {
            ValueType::FrameMatrixAntisym(_) => Ok(ConnectionField(omega)),
            other => Err(Error::FramePairing(format!(
                "connection must be so(n) valued, got {other:?}"
            ))),
        }
    }

    pub fn zero(grid: &GridSpec, n: usize) -> Result<Self> {
        ConnectionField::new(FormField::zeros(
            grid,
            1,
            ValueType::FrameMatrixAntisym(n),
        )?)
    }

    pub fn form(&self) -> &FormField {
        &self.0
    }

    pub fn into_form(self) -> FormField {
        self.0
    }

    pub fn frame_dim(&self) -> usize {
        self.0.value_type().frame_dim().unwrap_or(0)
    }
}
