//! Multi-index bookkeeping for the basis `dx^I` of k-forms.
//!
//! A basis element is a strictly increasing multi-index, stored as a bit
//! mask over the coordinate axes. Components of a degree-k form are listed
//! in lexicographic order of their multi-indices, e.g. in 3D:
//! `dx^dy, dx^dz, dy^dz`.

use crate::grid::AXIS_NAMES;

pub type Mask = u8;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographically ordered k-subsets of `0..dim`, as masks.
pub fn basis_masks(dim: usize, degree: usize) -> Vec<Mask> {
    fn rec(start: usize, dim: usize, left: usize, acc: Mask, out: &mut Vec<Mask>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..dim {
            rec(i + 1, dim, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::with_capacity(binomial(dim, degree));
    if degree <= dim {
        rec(0, dim, degree, 0, &mut out);
    }
    out
}

/// Position of `mask` in the lexicographic list for its degree.
pub fn component_index(dim: usize, mask: Mask) -> usize {
    let degree = mask.count_ones() as usize;
    basis_masks(dim, degree)
        .iter()
        .position(|&m| m == mask)
        .expect("mask outside dimension")
}

pub fn axes_of(mask: Mask) -> impl Iterator<Item = usize> {
    (0..8).filter(move |i| mask & (1 << i) != 0)
}

/// Sign of `dx^I ^ dx^J` relative to the sorted `dx^(I u J)`; zero if they overlap.
pub fn wedge_sign(i: Mask, j: Mask) -> f64 {
    if i & j != 0 {
        return 0.0;
    }
    let mut inversions = 0;
    for a in axes_of(i) {
        inversions += axes_of(j).filter(|&b| b < a).count();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Component label such as `xy` or `xzw`; the 0-form basis is `1`.
pub fn label(mask: Mask) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    axes_of(mask).map(|a| AXIS_NAMES[a]).collect()
}

/// Precomputed component table for one (dim, degree).
#[derive(Debug, Clone)]
pub struct Basis {
    pub dim: usize,
    pub degree: usize,
    pub masks: Vec<Mask>,
    lookup: [usize; 16],
}

impl Basis {
    pub fn new(dim: usize, degree: usize) -> Self {
        let masks = basis_masks(dim, degree);
        let mut lookup = [usize::MAX; 16];
        for (i, &m) in masks.iter().enumerate() {
            lookup[m as usize] = i;
        }
        Basis {
            dim,
            degree,
            masks,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn index(&self, mask: Mask) -> Option<usize> {
        let i = self.lookup[mask as usize];
        (i != usize::MAX).then_some(i)
    }
}
