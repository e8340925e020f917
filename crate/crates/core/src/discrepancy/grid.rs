use alloc::vec;
use alloc::vec::Vec;

use crate::densities::{Domain, Proposal, TargetDensity};
use crate::{Error, PointSet, Result};

/// Largest number of grid anchors a [`DeltaCover`] builds by default.
pub const DEFAULT_GRID_BUDGET: u64 = 1 << 24;

/// Grid estimate of a star discrepancy with its sandwich bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyReport {
    /// Largest local discrepancy over the grid anchors.
    pub grid_max: f64,
    pub delta: f64,
    /// `grid_max`, a lower bound on the true star discrepancy.
    pub lower_bound: f64,
    /// `min(grid_max + δ, 1)`.
    pub upper_bound: f64,
    pub n: usize,
    pub grid_m: u32,
}

/// A δ-cover of anchored boxes on a `(2^{m_g} + 1)^d` grid, with the
/// normalized target masses at every anchor precomputed.
///
/// On the cube the anchors are `a/2^{m_g}` and test boxes are half-open
/// `[0, t)`. In real space the anchors are the proposal's marginal
/// quantiles `F_j^{-1}(a/2^{m_g})` and test boxes are closed `(-∞, t]`.
/// `δ` is the largest target mass between opposite corners of a grid cell.
#[derive(Debug, Clone)]
pub struct DeltaCover {
    dim: usize,
    grid_m: u32,
    domain: Domain,
    anchors: Vec<Vec<f64>>,
    // row-major over anchor indices, last axis fastest
    masses: Vec<f64>,
    delta: f64,
}

fn anchor_count(dim: usize, grid_m: u32, budget: u64) -> Result<usize> {
    let side = (1u64 << grid_m) + 1;
    let total = side
        .checked_pow(dim as u32)
        .filter(|&t| t <= budget)
        .ok_or(Error::GridBudget {
            anchors: side.saturating_pow(dim as u32),
            budget,
        })?;
    Ok(total as usize)
}

impl DeltaCover {
    /// Cover for a unit-cube target.
    pub fn cube<D: TargetDensity + ?Sized>(density: &D, grid_m: u32, budget: u64) -> Result<Self> {
        if density.domain() != Domain::UnitCube {
            return Err(Error::InvalidArgument("cube cover needs a unit-cube target"));
        }
        if grid_m > 30 {
            return Err(Error::InvalidArgument("grid resolution too fine"));
        }
        let d = density.dimension();
        anchor_count(d, grid_m, budget)?;
        let side = (1usize << grid_m) + 1;
        let scale = (1u64 << grid_m) as f64;
        let axis: Vec<f64> = (0..side).map(|a| a as f64 / scale).collect();
        Self::build(density, grid_m, Domain::UnitCube, vec![axis; d])
    }

    /// Cover for a real-space target with anchors at the proposal's
    /// marginal quantiles.
    pub fn real<D, P>(density: &D, proposal: &P, grid_m: u32, budget: u64) -> Result<Self>
    where
        D: TargetDensity + ?Sized,
        P: Proposal + ?Sized,
    {
        if !proposal.is_product() {
            return Err(Error::InvalidArgument("real-space cover needs a product proposal"));
        }
        if grid_m > 30 {
            return Err(Error::InvalidArgument("grid resolution too fine"));
        }
        let d = density.dimension();
        if proposal.dimension() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: proposal.dimension(),
            });
        }
        anchor_count(d, grid_m, budget)?;
        let side = (1usize << grid_m) + 1;
        let scale = (1u64 << grid_m) as f64;
        let anchors = (0..d)
            .map(|j| {
                (0..side)
                    .map(|a| proposal.inverse_cdf(j, a as f64 / scale, &[]))
                    .collect()
            })
            .collect();
        Self::build(density, grid_m, Domain::RealSpace, anchors)
    }

    fn build<D: TargetDensity + ?Sized>(
        density: &D,
        grid_m: u32,
        domain: Domain,
        anchors: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let c = density.total_mass();
        if !(c > 0.0) {
            return Err(Error::DegenerateDensity);
        }
        let d = anchors.len();
        let side = anchors[0].len();
        let total = side.pow(d as u32);
        let mut masses = Vec::with_capacity(total);
        let mut index = vec![0usize; d];
        let mut t = vec![0.0; d];
        for _ in 0..total {
            for j in 0..d {
                t[j] = anchors[j][index[j]];
            }
            masses.push(density.box_mass(&t) / c);
            increment(&mut index, side);
        }

        let diagonal: usize = strides(d, side).iter().sum();
        let mut delta = 0.0f64;
        index.iter_mut().for_each(|i| *i = 0);
        for flat in 0..total {
            if index.iter().all(|&i| i + 1 < side) {
                delta = delta.max(masses[flat + diagonal] - masses[flat]);
            }
            increment(&mut index, side);
        }

        Ok(DeltaCover {
            dim: d,
            grid_m,
            domain,
            anchors,
            masses,
            delta,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid_m(&self) -> u32 {
        self.grid_m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Anchor coordinates along axis `j`, ascending.
    pub fn anchors(&self, j: usize) -> &[f64] {
        &self.anchors[j]
    }

    pub fn anchor_count(&self) -> usize {
        self.masses.len()
    }

    /// `(d_j) 2^{-m_g} L / C`, a density-independent `δ` for cube targets
    /// bounded by `L`.
    pub fn conservative_cube_delta(dim: usize, grid_m: u32, bound: f64, total_mass: f64) -> f64 {
        dim as f64 * libm::ldexp(1.0, -(grid_m as i32)) * bound / total_mass
    }

    /// Evaluates the cover on a point set.
    pub fn evaluate(&self, points: &PointSet) -> Result<DiscrepancyReport> {
        if points.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: points.dim(),
            });
        }
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let side = self.anchors[0].len();
        let strides = strides(self.dim, side);
        let mut counts = vec![0u32; self.masses.len()];
        'points: for x in points.iter() {
            let mut flat = 0;
            for j in 0..self.dim {
                // smallest anchor index whose box contains x_j
                let axis = &self.anchors[j];
                let c = match self.domain {
                    Domain::UnitCube => axis.partition_point(|&t| t <= x[j]),
                    Domain::RealSpace => axis.partition_point(|&t| t < x[j]),
                };
                if c == side {
                    continue 'points;
                }
                flat += c * strides[j];
            }
            counts[flat] += 1;
        }
        // inclusive prefix sums along every axis turn cell counts into box counts
        for j in 0..self.dim {
            let stride = strides[j];
            for flat in 0..counts.len() {
                if (flat / stride) % side != 0 {
                    counts[flat] += counts[flat - stride];
                }
            }
        }
        let n = points.len() as f64;
        let grid_max = counts
            .iter()
            .zip(&self.masses)
            .map(|(&k, &f)| (k as f64 / n - f).abs())
            .fold(0.0, f64::max);
        Ok(DiscrepancyReport {
            grid_max,
            delta: self.delta,
            lower_bound: grid_max,
            upper_bound: (grid_max + self.delta).min(1.0),
            n: points.len(),
            grid_m: self.grid_m,
        })
    }
}

fn strides(dim: usize, side: usize) -> Vec<usize> {
    let mut s = vec![1usize; dim];
    for j in (0..dim.saturating_sub(1)).rev() {
        s[j] = s[j + 1] * side;
    }
    s
}

fn increment(index: &mut [usize], side: usize) {
    for i in index.iter_mut().rev() {
        *i += 1;
        if *i < side {
            return;
        }
        *i = 0;
    }
}
