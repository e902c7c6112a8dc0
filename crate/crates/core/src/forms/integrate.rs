//! Pull-back quadrature of sampled forms over parametrised curves, surfaces
//! and axis-aligned 3-boxes.
//!
//! Fields are reconstructed between samples by tensor-product cubic
//! Lagrange interpolation (4 samples per axis, stencils shifted inward at
//! the boundary), then integrated with the midpoint rule in parameter space.

use std::f64::consts::TAU;

use super::basis::Basis;
use super::field::FormField;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub const DEFAULT_LOOP_SAMPLES: usize = 512;
pub const DEFAULT_SURFACE_SAMPLES: usize = 256;
pub const DEFAULT_VOLUME_SAMPLES: usize = 96;

const STENCIL: usize = 4;

/// Evaluates every coefficient channel of a field at arbitrary points.
pub struct Interpolator<'a> {
    field: &'a FormField,
    strides: Vec<usize>,
}

impl<'a> Interpolator<'a> {
    pub fn new(field: &'a FormField) -> Self {
        Interpolator {
            field,
            strides: field.grid().strides(),
        }
    }

    fn axis_stencil(grid: &GridSpec, axis: usize, x: f64) -> (usize, [f64; STENCIL]) {
        let n = grid.resolution[axis];
        let u = (x - grid.extents[axis][0]) / grid.spacing(axis) - 0.5;
        let start = (u.floor() as isize - 1).clamp(0, (n - STENCIL) as isize) as usize;
        let mut w = [0.0; STENCIL];
        for (j, wj) in w.iter_mut().enumerate() {
            let xj = (start + j) as f64;
            let mut l = 1.0;
            for m in 0..STENCIL {
                if m != j {
                    let xm = (start + m) as f64;
                    l *= (u - xm) / (xj - xm);
                }
            }
            *wj = l;
        }
        (start, w)
    }

    /// All channels (`slot * n_comp + comp`) at `p`.
    pub fn eval(&self, p: &[f64], out: &mut [f64]) -> Result<()> {
        let grid = self.field.grid();
        if !grid.contains(p) {
            return Err(Error::OutsideGrid { point: p.to_vec() });
        }
        let dim = grid.dim();
        let mut starts = [0usize; 4];
        let mut weights = [[0.0; STENCIL]; 4];
        for a in 0..dim {
            let (s, w) = Self::axis_stencil(grid, a, p[a]);
            starts[a] = s;
            weights[a] = w;
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        let np = grid.n_points();
        let data = self.field.data();
        let total = STENCIL.pow(dim as u32);
        for t in 0..total {
            let mut rem = t;
            let mut flat = 0;
            let mut w = 1.0;
            for a in (0..dim).rev() {
                let j = rem % STENCIL;
                rem /= STENCIL;
                flat += (starts[a] + j) * self.strides[a];
                w *= weights[a][j];
            }
            if w == 0.0 {
                continue;
            }
            for (ch, o) in out.iter_mut().enumerate() {
                *o += w * data[ch * np + flat];
            }
        }
        Ok(())
    }
}

/// A parametrised 2-surface `X(u, v)`, `(u, v)` in the unit square.
pub trait Surface {
    /// Point and the two tangent vectors `dX/du`, `dX/dv`.
    fn eval(&self, u: f64, v: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>);
}

/// A parametrised closed curve `X(t)`, `t` in `[0, 1]`.
pub trait Curve {
    /// Point and tangent `dX/dt`.
    fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>);
}

/// Flat disk spanned by two orthonormal in-plane directions; oriented by `e1 ^ e2`.
#[derive(Debug, Clone)]
pub struct Disk {
    pub center: Vec<f64>,
    pub radius: f64,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
}

impl Disk {
    /// Disk in the plane of coordinate axes `(a1, a2)`.
    pub fn in_plane(center: Vec<f64>, radius: f64, a1: usize, a2: usize) -> Self {
        let dim = center.len();
        let mut e1 = vec![0.0; dim];
        let mut e2 = vec![0.0; dim];
        e1[a1] = 1.0;
        e2[a2] = 1.0;
        Disk {
            center,
            radius,
            e1,
            e2,
        }
    }

    /// Disk in the xy-plane at height `z` (extra coordinates zero-padded to `dim`).
    pub fn xy(dim: usize, cx: f64, cy: f64, z: f64, radius: f64) -> Self {
        let mut c = vec![0.0; dim];
        c[0] = cx;
        c[1] = cy;
        if dim > 2 {
            c[2] = z;
        }
        Self::in_plane(c, radius, 0, 1)
    }
}

impl Surface for Disk {
    fn eval(&self, u: f64, v: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let r = self.radius * u;
        let (s, c) = (TAU * v).sin_cos();
        let dim = self.center.len();
        let mut x = vec![0.0; dim];
        let mut du = vec![0.0; dim];
        let mut dv = vec![0.0; dim];
        for i in 0..dim {
            let radial = c * self.e1[i] + s * self.e2[i];
            x[i] = self.center[i] + r * radial;
            du[i] = self.radius * radial;
            dv[i] = TAU * r * (-s * self.e1[i] + c * self.e2[i]);
        }
        (x, du, dv)
    }
}

/// Parallelogram `origin + u * edge_u + v * edge_v`.
#[derive(Debug, Clone)]
pub struct Parallelogram {
    pub origin: Vec<f64>,
    pub edge_u: Vec<f64>,
    pub edge_v: Vec<f64>,
}

impl Surface for Parallelogram {
    fn eval(&self, u: f64, v: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let x = self
            .origin
            .iter()
            .zip(&self.edge_u)
            .zip(&self.edge_v)
            .map(|((o, a), b)| o + u * a + v * b)
            .collect();
        (x, self.edge_u.clone(), self.edge_v.clone())
    }
}

/// Circle traversed counter-clockwise with respect to `(e1, e2)`.
#[derive(Debug, Clone)]
pub struct Circle {
    pub center: Vec<f64>,
    pub radius: f64,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
}

impl Circle {
    pub fn xy(dim: usize, cx: f64, cy: f64, z: f64, radius: f64) -> Self {
        let d = Disk::xy(dim, cx, cy, z, radius);
        Circle {
            center: d.center,
            radius,
            e1: d.e1,
            e2: d.e2,
        }
    }
}

impl Curve for Circle {
    fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (s, c) = (TAU * t).sin_cos();
        let x = (0..self.center.len())
            .map(|i| self.center[i] + self.radius * (c * self.e1[i] + s * self.e2[i]))
            .collect();
        let dx = (0..self.center.len())
            .map(|i| TAU * self.radius * (-s * self.e1[i] + c * self.e2[i]))
            .collect();
        (x, dx)
    }
}

/// Straight segment; open, so loop integration rejects it.
#[derive(Debug, Clone)]
pub struct Segment {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl Curve for Segment {
    fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let x = self
            .start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| a + t * (b - a))
            .collect();
        let dx = self.start.iter().zip(&self.end).map(|(a, b)| b - a).collect();
        (x, dx)
    }
}

/// Axis-aligned 3-box spanning three coordinate axes; the remaining
/// coordinates are pinned to `lo`. Oriented by the increasing axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub axes: [usize; 3],
}

impl AxisBox {
    /// Box `[lo, hi]` in a 3-dimensional grid.
    pub fn new3(lo: [f64; 3], hi: [f64; 3]) -> Self {
        AxisBox {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            axes: [0, 1, 2],
        }
    }

    /// Cube of side `side` centred at `c`.
    pub fn cube(c: [f64; 3], side: f64) -> Self {
        let h = 0.5 * side;
        Self::new3([c[0] - h, c[1] - h, c[2] - h], [c[0] + h, c[1] + h, c[2] + h])
    }

    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|&a| self.hi[a] - self.lo[a]).product()
    }

    /// Whether two boxes over the same axes share interior points.
    pub fn overlaps(&self, other: &AxisBox) -> bool {
        self.axes == other.axes
            && self
                .axes
                .iter()
                .all(|&a| self.lo[a] < other.hi[a] && other.lo[a] < self.hi[a])
    }
}

fn check_degree(a: &FormField, expected: usize) -> Result<()> {
    if a.degree() != expected {
        return Err(Error::WrongDegree {
            expected,
            found: a.degree(),
        });
    }
    Ok(())
}

/// Sum per frame slot of `coef[slot * n_comp + comp] * weight[comp]`.
fn contract(values: &[f64], weights: &[f64], acc: &mut [f64]) {
    let n_comp = weights.len();
    for (slot, a) in acc.iter_mut().enumerate() {
        let row = &values[slot * n_comp..(slot + 1) * n_comp];
        *a += row.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>();
    }
}

/// Integral of a 2-form over a surface, one value per frame slot.
pub fn integrate_over_surface(
    a: &FormField,
    surface: &dyn Surface,
    samples: (usize, usize),
) -> Result<Vec<f64>> {
    check_degree(a, 2)?;
    let (nu, nv) = samples;
    if nu == 0 || nv == 0 {
        return Err(Error::Degenerate("zero quadrature samples".into()));
    }
    let interp = Interpolator::new(a);
    let basis = Basis::new(a.dim(), 2);
    let pairs: Vec<(usize, usize)> = basis
        .masks
        .iter()
        .map(|&m| {
            let mut it = super::basis::axes_of(m);
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let slots = a.value_type().slots();
    let mut values = vec![0.0; a.channels()];
    let mut weights = vec![0.0; pairs.len()];
    let mut total = vec![0.0; slots];
    let mut area = 0.0;
    let cell = 1.0 / (nu * nv) as f64;
    for i in 0..nu {
        let mut row = vec![0.0; slots];
        let u = (i as f64 + 0.5) / nu as f64;
        for j in 0..nv {
            let v = (j as f64 + 0.5) / nv as f64;
            let (x, du, dv) = surface.eval(u, v);
            interp.eval(&x, &mut values)?;
            for (w, &(p, q)) in weights.iter_mut().zip(&pairs) {
                *w = du[p] * dv[q] - du[q] * dv[p];
            }
            area += weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            contract(&values, &weights, &mut row);
        }
        for (t, r) in total.iter_mut().zip(row) {
            *t += r * cell;
        }
    }
    if area * cell == 0.0 {
        return Err(Error::Degenerate("surface has zero area".into()));
    }
    Ok(total)
}

/// Integral of a 1-form over a closed curve, one value per frame slot.
pub fn integrate_over_loop(a: &FormField, curve: &dyn Curve, samples: usize) -> Result<Vec<f64>> {
    check_degree(a, 1)?;
    if samples == 0 {
        return Err(Error::Degenerate("zero quadrature samples".into()));
    }
    let (x0, _) = curve.eval(0.0);
    let (x1, _) = curve.eval(1.0);
    let gap = x0
        .iter()
        .zip(&x1)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale = x0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if gap > 1e-12 * scale {
        return Err(Error::OpenCurve(gap));
    }
    let interp = Interpolator::new(a);
    let mut values = vec![0.0; a.channels()];
    let mut total = vec![0.0; a.value_type().slots()];
    let dt = 1.0 / samples as f64;
    for i in 0..samples {
        let (x, dx) = curve.eval((i as f64 + 0.5) * dt);
        interp.eval(&x, &mut values)?;
        contract(&values, &dx, &mut total);
    }
    total.iter_mut().for_each(|t| *t *= dt);
    Ok(total)
}

/// Integral of a 3-form over an axis-aligned 3-box, one value per frame slot.
pub fn integrate_over_box(a: &FormField, vol: &AxisBox, samples: usize) -> Result<Vec<f64>> {
    check_degree(a, 3)?;
    let dim = a.dim();
    let [i, j, k] = vol.axes;
    if vol.lo.len() != dim || vol.hi.len() != dim || !(i < j && j < k && k < dim) {
        return Err(Error::Degenerate(format!("box axes {:?} in dimension {dim}", vol.axes)));
    }
    if vol.volume() <= 0.0 || samples == 0 {
        return Err(Error::Degenerate("box has no volume".into()));
    }
    if !a.grid().contains(&vol.lo) || !a.grid().contains(&vol.hi) {
        let bad = if a.grid().contains(&vol.lo) { &vol.hi } else { &vol.lo };
        return Err(Error::OutsideGrid { point: bad.clone() });
    }
    let comp = Basis::new(dim, 3)
        .index((1 << i) | (1 << j) | (1 << k))
        .expect("3-mask in basis");
    let n_comp = a.n_components();
    let interp = Interpolator::new(a);
    let slots = a.value_type().slots();
    let mut values = vec![0.0; a.channels()];
    let mut total = vec![0.0; slots];
    let step = |ax: usize| (vol.hi[ax] - vol.lo[ax]) / samples as f64;
    let (hi_, hj, hk) = (step(i), step(j), step(k));
    let mut x = vol.lo.clone();
    for a_ in 0..samples {
        x[i] = vol.lo[i] + (a_ as f64 + 0.5) * hi_;
        let mut plane = vec![0.0; slots];
        for b in 0..samples {
            x[j] = vol.lo[j] + (b as f64 + 0.5) * hj;
            for c in 0..samples {
                x[k] = vol.lo[k] + (c as f64 + 0.5) * hk;
                interp.eval(&x, &mut values)?;
                for (s, p) in plane.iter_mut().enumerate() {
                    *p += values[s * n_comp + comp];
                }
            }
        }
        for (t, p) in total.iter_mut().zip(plane) {
            *t += p;
        }
    }
    let dv = hi_ * hj * hk;
    total.iter_mut().for_each(|t| *t *= dv);
    Ok(total)
}
