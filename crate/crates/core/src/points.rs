use alloc::vec::Vec;

use crate::{Error, Result};

/// A flat, row-major list of points of a fixed dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "point dimension must be positive");
        PointSet {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, points: usize) -> Self {
        assert!(dim > 0, "point dimension must be positive");
        PointSet {
            dim,
            coords: Vec::with_capacity(dim * points),
        }
    }

    /// Wraps a row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("point dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        Ok(PointSet { dim, coords })
    }

    /// One-dimensional point set from scalars.
    pub fn from_scalars(values: &[f64]) -> Self {
        PointSet {
            dim: 1,
            coords: values.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.coords[index * self.dim..(index + 1) * self.dim]
    }

    pub fn push(&mut self, point: &[f64]) {
        assert_eq!(point.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(point);
    }

    pub fn extend(&mut self, other: &PointSet) {
        assert_eq!(other.dim, self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(&other.coords);
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.coords
    }

    /// Keeps the first `dim` coordinates of every point.
    pub fn project(&self, dim: usize) -> PointSet {
        assert!(dim > 0 && dim <= self.dim, "projection dimension out of range");
        let mut out = PointSet::with_capacity(dim, self.len());
        for p in self.iter() {
            out.coords.extend_from_slice(&p[..dim]);
        }
        out
    }

    /// Coordinate `j` of every point, in order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.iter().map(|p| p[j]).collect()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a [f64];
    type IntoIter = core::slice::ChunksExact<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn flat_layout_and_projection() {
        let ps = PointSet::from_flat(3, vec![0.0, 0.1, 0.2, 0.5, 0.6, 0.7]).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.point(1), &[0.5, 0.6, 0.7]);
        let proj = ps.project(2);
        assert_eq!(proj.as_flat(), &[0.0, 0.1, 0.5, 0.6]);
        assert_eq!(ps.column(2), vec![0.2, 0.7]);
    }

    #[test]
    fn ragged_buffer_rejected() {
        assert!(PointSet::from_flat(2, vec![0.0, 1.0, 2.0]).is_err());
    }
}
