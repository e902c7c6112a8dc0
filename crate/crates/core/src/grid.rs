//! Regular, axis-aligned, cell-centred grids in 2, 3 or 4 dimensions.
//!
//! Samples sit at cell centres, `x_i = min + (i + 1/2) h`, so a grid with
//! `resolution[k]` cells along axis `k` carries exactly that many samples
//! along it. Flat indices use C order (axis 0 slowest).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_RESOLUTION: usize = 4;
pub const MAX_DIM: usize = 4;

/// Axis names used in headers and CSV columns.
pub const AXIS_NAMES: [&str; MAX_DIM] = ["x", "y", "z", "w"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub extents: Vec<[f64; 2]>,
    pub resolution: Vec<usize>,
}

impl GridSpec {
    pub fn new(extents: Vec<[f64; 2]>, resolution: Vec<usize>) -> Result<Self> {
        let grid = GridSpec {
            extents,
            resolution,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Cube `[-half, half]^dim` with `cells` cells per axis.
    pub fn cube(dim: usize, half: f64, cells: usize) -> Result<Self> {
        Self::new(vec![[-half, half]; dim], vec![cells; dim])
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.extents.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 2..=4")));
        }
        if self.resolution.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "{} extents but {} resolutions",
                dim,
                self.resolution.len()
            )));
        }
        for (axis, (ext, &n)) in self.extents.iter().zip(&self.resolution).enumerate() {
            if n < MIN_RESOLUTION {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: resolution {n} below {MIN_RESOLUTION}"
                )));
            }
            let len = ext[1] - ext[0];
            if !ext[0].is_finite() || !ext[1].is_finite() || !(len > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: extent [{}, {}] has no positive length",
                    ext[0], ext[1]
                )));
            }
            let h = len / n as f64;
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {axis}: spacing {h}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        (self.extents[axis][1] - self.extents[axis][0]) / self.resolution[axis] as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.spacing(a)).collect()
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacings().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn n_points(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacings().iter().product()
    }

    /// Coordinate of sample `i` along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.extents[axis][0] + (i as f64 + 0.5) * self.spacing(axis)
    }

    /// Flat-index stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let dim = self.dim();
        let mut strides = vec![1; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.resolution[a + 1];
        }
        strides
    }

    /// Multi-index of a flat index.
    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim()).rev() {
            let n = self.resolution[a];
            out[a] = flat % n;
            flat /= n;
        }
    }

    /// Physical coordinates of a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim()];
        self.unflatten(flat, &mut idx);
        idx.iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect()
    }

    /// Whether `p` lies inside the closed extents (tolerant to rounding).
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().zip(&self.extents).all(|(&x, e)| {
                let slack = 1e-12 * (e[1] - e[0]);
                x >= e[0] - slack && x <= e[1] + slack
            })
    }

    /// Same extents with every resolution multiplied by `k`.
    pub fn refined(&self, k: usize) -> Self {
        GridSpec {
            extents: self.extents.clone(),
            resolution: self.resolution.iter().map(|&n| n * k).collect(),
        }
    }

    /// Append one extra axis (used to embed static fields into one more dimension).
    pub fn extruded(&self, extent: [f64; 2], cells: usize) -> Result<Self> {
        let mut extents = self.extents.clone();
        extents.push(extent);
        let mut resolution = self.resolution.clone();
        resolution.push(cells);
        Self::new(extents, resolution)
    }

    /// Distance from `p` to the nearest face of the box, over the listed axes.
    pub fn boundary_clearance(&self, p: &[f64], axes: &[usize]) -> f64 {
        axes.iter()
            .map(|&a| (p[a] - self.extents[a][0]).min(self.extents[a][1] - p[a]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn approx_eq(&self, other: &GridSpec) -> bool {
        self.resolution == other.resolution
            && self.extents.len() == other.extents.len()
            && self
                .extents
                .iter()
                .zip(&other.extents)
                .all(|(a, b)| a[0] == b[0] && a[1] == b[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_or_degenerate_axes() {
        assert!(GridSpec::new(vec![[0.0, 1.0]; 2], vec![3, 8]).is_err());
        assert!(GridSpec::new(vec![[0.0, 0.0], [0.0, 1.0]], vec![8, 8]).is_err());
        assert!(GridSpec::new(vec![[0.0, 1.0]], vec![8]).is_err());
        assert!(GridSpec::new(vec![[0.0, 1.0]; 5], vec![8; 5]).is_err());
        assert!(GridSpec::new(vec![[0.0, f64::NAN], [0.0, 1.0]], vec![8, 8]).is_err());
    }

    #[test]
    fn cell_centred_coordinates_and_c_order() {
        let g = GridSpec::new(vec![[0.0, 1.0], [0.0, 2.0], [-1.0, 1.0]], vec![4, 8, 4]).unwrap();
        assert_eq!(g.strides(), vec![32, 4, 1]);
        assert_eq!(g.coord(0, 0), 0.125);
        assert_eq!(g.coord(1, 7), 1.875);
        let flat = 2 * 32 + 5 * 4 + 3;
        let mut idx = [0; 3];
        g.unflatten(flat, &mut idx);
        assert_eq!(idx, [2, 5, 3]);
        assert_eq!(g.point(flat), vec![0.625, 1.375, 0.75]);
    }

    #[test]
    fn refine_and_extrude() {
        let g = GridSpec::cube(3, 1.0, 8).unwrap();
        assert_eq!(g.refined(2).resolution, vec![16; 3]);
        let g4 = g.extruded([0.0, 0.4], 4).unwrap();
        assert_eq!(g4.dim(), 4);
        assert!((g4.spacing(3) - 0.1).abs() < 1e-15);
    }
}
