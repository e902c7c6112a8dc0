//! Pointwise exterior algebra and finite-difference exterior calculus.

use super::basis::{axes_of, wedge_sign, Mask};
use super::field::{antisym_slot, matrix_entry, ConnectionField, FormField, ValueType, VectorField};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// How frame indices of the two operands of a wedge are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// At least one operand is scalar; the other's frame structure is kept.
    None,
    /// `a^a ^ b_a` of two frame vectors (Euclidean frame metric).
    Contract,
    /// `A^a_b ^ v^b`.
    MatrixVector,
    /// `v^a ^ A_ab`, free index `b`.
    VectorMatrix,
    /// `A^a_b ^ B^b_a`.
    Trace,
    /// Graded commutator `A ^ B - (-1)^(pq) B ^ A`, which stays in `so(n)`.
    Commutator,
    /// `so(n)`-valued `u^a ^ v^b - u^b ^ v^a` of two frame vectors.
    AntisymOuter,
}

/// One term `out[res] += coef * a[sa] * b[sb]` of a frame-index product.
#[derive(Debug, Clone, Copy)]
struct FrameTerm {
    sa: usize,
    sb: usize,
    res: usize,
    coef: f64,
}

fn frame_table(a: ValueType, b: ValueType, pairing: Pairing) -> Result<(ValueType, Vec<FrameTerm>)> {
    use ValueType::*;
    let bad = || {
        Err(Error::FramePairing(format!(
            "{pairing:?} pairing of {a:?} with {b:?}"
        )))
    };
    let t = |sa, sb, res, coef| FrameTerm { sa, sb, res, coef };
    match pairing {
        Pairing::None => match (a, b) {
            (Scalar, other) => Ok((other, (0..other.slots()).map(|s| t(0, s, s, 1.0)).collect())),
            (other, Scalar) => Ok((other, (0..other.slots()).map(|s| t(s, 0, s, 1.0)).collect())),
            _ => bad(),
        },
        Pairing::Contract => match (a, b) {
            (FrameVector(n), FrameVector(m)) if n == m => {
                Ok((Scalar, (0..n).map(|i| t(i, i, 0, 1.0)).collect()))
            }
            _ => bad(),
        },
        Pairing::MatrixVector => match (a, b) {
            (FrameMatrixAntisym(n), FrameVector(m)) if n == m => {
                let mut terms = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if let Some((slot, sign)) = matrix_entry(i, j) {
                            terms.push(t(slot, j, i, sign));
                        }
                    }
                }
                Ok((FrameVector(n), terms))
            }
            _ => bad(),
        },
        Pairing::VectorMatrix => match (a, b) {
            (FrameVector(n), FrameMatrixAntisym(m)) if n == m => {
                let mut terms = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if let Some((slot, sign)) = matrix_entry(i, j) {
                            terms.push(t(i, slot, j, sign));
                        }
                    }
                }
                Ok((FrameVector(n), terms))
            }
            _ => bad(),
        },
        Pairing::Trace => match (a, b) {
            (FrameMatrixAntisym(n), FrameMatrixAntisym(m)) if n == m => {
                let mut terms = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if let (Some((s1, g1)), Some((s2, g2))) = (matrix_entry(i, j), matrix_entry(j, i)) {
                            terms.push(t(s1, s2, 0, g1 * g2));
                        }
                    }
                }
                Ok((Scalar, terms))
            }
            _ => bad(),
        },
        Pairing::Commutator => match (a, b) {
            (FrameMatrixAntisym(n), FrameMatrixAntisym(m)) if n == m => {
                // C^i_j = sum_k A^i_k ^ B^k_j - A^k_j ^ B^i_k, stored for i > j
                let mut terms = Vec::new();
                for i in 1..n {
                    for j in 0..i {
                        let res = antisym_slot(i, j);
                        for k in 0..n {
                            if let (Some((s1, g1)), Some((s2, g2))) = (matrix_entry(i, k), matrix_entry(k, j)) {
                                terms.push(t(s1, s2, res, g1 * g2));
                            }
                            if let (Some((s1, g1)), Some((s2, g2))) = (matrix_entry(k, j), matrix_entry(i, k)) {
                                terms.push(t(s1, s2, res, -g1 * g2));
                            }
                        }
                    }
                }
                Ok((FrameMatrixAntisym(n), terms))
            }
            _ => bad(),
        },
        Pairing::AntisymOuter => match (a, b) {
            (FrameVector(n), FrameVector(m)) if n == m => {
                let mut terms = Vec::new();
                for i in 1..n {
                    for j in 0..i {
                        let res = antisym_slot(i, j);
                        terms.push(t(i, j, res, 1.0));
                        terms.push(t(j, i, res, -1.0));
                    }
                }
                Ok((FrameMatrixAntisym(n), terms))
            }
            _ => bad(),
        },
    }
}

/// Pointwise wedge product with the requested frame pairing.
pub fn wedge(a: &FormField, b: &FormField, pairing: Pairing) -> Result<FormField> {
    if !a.grid().approx_eq(b.grid()) {
        return Err(Error::GridMismatch);
    }
    let dim = a.dim();
    let degree = a.degree() + b.degree();
    if degree > dim {
        return Err(Error::DegreeOverflow { degree, dim });
    }
    let (vt, frame_terms) = frame_table(a.value_type(), b.value_type(), pairing)?;
    let mut out = FormField::zeros(a.grid(), degree, vt)?;

    let ba = a.basis();
    let bb = b.basis();
    let bo = out.basis();
    let mut basis_terms = Vec::new();
    for (ia, &ma) in ba.masks.iter().enumerate() {
        for (ib, &mb) in bb.masks.iter().enumerate() {
            let s = wedge_sign(ma, mb);
            if s != 0.0 {
                let io = bo.index(ma | mb).expect("union mask in output basis");
                basis_terms.push((ia, ib, io, s));
            }
        }
    }

    for ft in &frame_terms {
        for &(ia, ib, io, s) in &basis_terms {
            let coef = ft.coef * s;
            let xa = a.component(ft.sa, ia);
            let xb = b.component(ft.sb, ib);
            let dst = out.component_mut(ft.res, io);
            for ((d, &va), &vb) in dst.iter_mut().zip(xa).zip(xb) {
                *d += coef * va * vb;
            }
        }
    }
    Ok(out)
}

/// Derivative of sampled data along one axis.
///
/// Centred second-order differences inside, second-order one-sided
/// differences on the two boundary samples.
pub fn partial_derivative(grid: &GridSpec, src: &[f64], axis: usize, dst: &mut [f64]) {
    let n = grid.resolution[axis];
    let h = grid.spacing(axis);
    let stride = grid.strides()[axis];
    let np = grid.n_points();
    let inv2h = 1.0 / (2.0 * h);
    for base in 0..np {
        // visit each line once, starting from its first sample
        if (base / stride) % n != 0 {
            continue;
        }
        let at = |i: usize| src[base + i * stride];
        dst[base] = (4.0 * (at(1) - at(0)) - (at(2) - at(0))) * inv2h;
        for i in 1..n - 1 {
            dst[base + i * stride] = (at(i + 1) - at(i - 1)) * inv2h;
        }
        dst[base + (n - 1) * stride] =
            (4.0 * (at(n - 1) - at(n - 2)) - (at(n - 1) - at(n - 3))) * inv2h;
    }
}

/// Exterior derivative by finite differences.
pub fn exterior_derivative(a: &FormField) -> Result<FormField> {
    let dim = a.dim();
    let k = a.degree();
    if k >= dim {
        return Err(Error::TopDegreeDerivative(k));
    }
    let mut out = FormField::zeros(a.grid(), k + 1, a.value_type())?;
    let bi = a.basis();
    let bo = out.basis();
    let grid = a.grid().clone();
    let mut scratch = vec![0.0; grid.n_points()];
    for slot in 0..a.value_type().slots() {
        for (ci, &mask) in bi.masks.iter().enumerate() {
            let src = a.component(slot, ci);
            if src.iter().all(|&v| v == 0.0) {
                continue;
            }
            for axis in 0..dim {
                if mask & (1 << axis) != 0 {
                    continue;
                }
                let sign = wedge_sign(1 << axis, mask);
                let co = bo.index(mask | (1 << axis)).expect("mask in output basis");
                partial_derivative(&grid, src, axis, &mut scratch);
                let dst = out.component_mut(slot, co);
                for (d, &v) in dst.iter_mut().zip(&scratch) {
                    *d += sign * v;
                }
            }
        }
    }
    Ok(out)
}

/// Euclidean Hodge dual with orientation `dx^1 ^ ... ^ dx^n`.
pub fn hodge_star(a: &FormField) -> Result<FormField> {
    let dim = a.dim();
    let k = a.degree();
    let mut out = FormField::zeros(a.grid(), dim - k, a.value_type())?;
    let full: Mask = ((1u16 << dim) - 1) as Mask;
    let bi = a.basis();
    let bo = out.basis();
    for slot in 0..a.value_type().slots() {
        for (ci, &mask) in bi.masks.iter().enumerate() {
            let comp = full & !mask;
            let sign = wedge_sign(mask, comp);
            let co = bo.index(comp).expect("complement in output basis");
            let src = a.component(slot, ci);
            let dst = out.component_mut(slot, co);
            for (d, &v) in dst.iter_mut().zip(src) {
                *d = sign * v;
            }
        }
    }
    Ok(out)
}

/// Interior product `i_v a`.
pub fn interior_product(v: &VectorField, a: &FormField) -> Result<FormField> {
    if a.degree() == 0 {
        return Err(Error::ZeroFormContraction);
    }
    if !v.grid().approx_eq(a.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut out = FormField::zeros(a.grid(), a.degree() - 1, a.value_type())?;
    let bi = a.basis();
    let bo = out.basis();
    for slot in 0..a.value_type().slots() {
        for (ci, &mask) in bi.masks.iter().enumerate() {
            for (m, axis) in axes_of(mask).enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let co = bo.index(mask & !(1 << axis)).expect("reduced mask in basis");
                let src = a.component(slot, ci);
                let vc = v.component(axis);
                let dst = out.component_mut(slot, co);
                for ((d, &s), &w) in dst.iter_mut().zip(src).zip(vc) {
                    *d += sign * w * s;
                }
            }
        }
    }
    Ok(out)
}

/// Covariant exterior derivative against a spin connection.
///
/// Frame vectors: `D a = d a + w ^ a`. `so(n)`-valued p-forms:
/// `D A = d A + w ^ A - (-1)^p A ^ w`.
pub fn covariant_derivative(a: &FormField, omega: &ConnectionField) -> Result<FormField> {
    let pairing = match a.value_type() {
        ValueType::Scalar => return Err(Error::ScalarFrameOperand),
        ValueType::FrameVector(_) => Pairing::MatrixVector,
        ValueType::FrameMatrixAntisym(_) => Pairing::Commutator,
    };
    let da = exterior_derivative(a)?;
    let rot = wedge(omega.form(), a, pairing)?;
    da.add(&rot)
}

/// `R = d w + w ^ w`.
pub fn curvature_of(omega: &ConnectionField) -> Result<FormField> {
    let dw = exterior_derivative(omega.form())?;
    // the graded commutator of a 1-form with itself is 2 w ^ w
    let ww = wedge(omega.form(), omega.form(), Pairing::Commutator)?;
    dw.axpy(0.5, &ww)
}
