//! Target and proposal densities.
//!
//! A [`TargetDensity`] is an unnormalized `ψ` with its dominating constant
//! `L`, total mass `C` and anchored box mass. A [`Proposal`] is the density
//! `H` that acceptance-rejection draws from, described through its
//! coordinate-wise inverse CDFs. The reference models used by the
//! experiments live in [`examples`](self#functions); user models implement
//! the traits directly or wrap closures in [`FnDensity`].

mod bound;
mod decomposition;
mod models;

use alloc::boxed::Box;
use alloc::vec::Vec;

pub use bound::{estimate_ratio_bound, BoundSearch};
pub use decomposition::{
    example3_decomposition, Decomposition, DecompositionLevel, DensityComponent, FnComponent,
    Interval, Region, RegionDistribution, SineComponent, SquareComponent,
};
pub use models::{
    example1_density, example2_density_and_proposal, GammaProductDensity, MeanExponentialDensity,
    UniformParetoProposal, UniformProposal,
};

use crate::quadrature::{integrate_box, QuadConfig};
use crate::{Error, Result};

/// Where a target density lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `[0, 1]^d`; anchored test boxes are half-open `[0, t)`.
    UnitCube,
    /// `R^d`; anchored test boxes are closed `(-∞, t]`.
    RealSpace,
}

/// An unnormalized target density `ψ`.
pub trait TargetDensity {
    /// Dimension `d = s - 1` of the sample space.
    fn dimension(&self) -> usize;

    fn domain(&self) -> Domain;

    /// `ψ(x) >= 0`.
    fn evaluate(&self, x: &[f64]) -> f64;

    /// `L` with `ψ <= L` on the cube, or `ψ <= L H` in real space.
    fn bound(&self) -> f64;

    /// `C`, the integral of `ψ` over the domain.
    fn total_mass(&self) -> f64;

    /// Integral of `ψ` over the anchored box ending at `t`.
    ///
    /// The default integrates numerically; models with a closed form
    /// override it.
    fn box_mass(&self, t: &[f64]) -> f64 {
        match numeric_box_mass(self, t, 1e-10) {
            Ok(v) => v,
            Err(Error::Accuracy { estimate, .. }) => estimate,
            Err(e) => panic!("box mass failed: {e}"),
        }
    }

    /// Integration limits of coordinate `j`; defaults to the whole domain.
    fn support(&self, _coordinate: usize) -> (f64, f64) {
        match self.domain() {
            Domain::UnitCube => (0.0, 1.0),
            Domain::RealSpace => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// A proposal density `H` sampled through inverse CDFs.
///
/// Coordinate `j` is generated as `F_j^{-1}(u_j | z_1 .. z_{j-1})`. Product
/// proposals ignore the conditioning arguments.
pub trait Proposal {
    fn dimension(&self) -> usize;

    /// `H(z)`, zero outside the support.
    fn evaluate(&self, z: &[f64]) -> f64;

    /// Integral of `H` over its domain.
    fn total_mass(&self) -> f64 {
        1.0
    }

    /// Conditional inverse CDF of coordinate `j` given the previous
    /// coordinates. May return `+∞` at `u = 1` for unbounded supports.
    fn inverse_cdf(&self, coordinate: usize, u: f64, previous: &[f64]) -> f64;

    /// Conditional CDF of coordinate `j` given the previous coordinates.
    fn cdf(&self, coordinate: usize, z: f64, previous: &[f64]) -> f64;

    /// Marginal density `h_j` of a product proposal.
    fn marginal_density(&self, coordinate: usize, z: f64) -> f64;

    /// Whether `H(z) = ∏ h_j(z_j)` times the total mass.
    fn is_product(&self) -> bool {
        true
    }

    /// Points of `(0, 1)` where `F_j^{-1}` changes formula.
    fn breakpoints(&self, _coordinate: usize) -> &[f64] {
        &[]
    }
}

/// Quadrature estimate of the target's mass over its anchored box at `t`.
///
/// Coordinates at or below the support's lower end give an empty box.
pub fn numeric_box_mass<D: TargetDensity + ?Sized>(
    density: &D,
    t: &[f64],
    tolerance: f64,
) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let d = density.dimension();
    if t.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: t.len(),
        });
    }
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for (j, &tj) in t.iter().enumerate() {
        let (lo, hi) = density.support(j);
        if tj <= lo {
            return Ok(0.0);
        }
        lower.push(lo);
        upper.push(tj.min(hi));
    }
    let f = |x: &[f64]| density.evaluate(x);
    let config = QuadConfig {
        abs_tolerance: tolerance,
        rel_tolerance: 0.0,
        max_intervals: 4000,
    };
    integrate_box(&f, &lower, &upper, &config).map(|e| e.value)
}

/// A target density assembled from closures; box masses come from
/// quadrature unless a closed form is supplied.
pub struct FnDensity {
    dimension: usize,
    domain: Domain,
    bound: f64,
    total_mass: f64,
    evaluate: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    box_mass: Option<Box<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
    support: Option<Vec<(f64, f64)>>,
}

impl core::fmt::Debug for FnDensity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnDensity")
            .field("dimension", &self.dimension)
            .field("domain", &self.domain)
            .field("bound", &self.bound)
            .field("total_mass", &self.total_mass)
            .finish_non_exhaustive()
    }
}

impl FnDensity {
    pub fn new(
        dimension: usize,
        domain: Domain,
        bound: f64,
        total_mass: f64,
        evaluate: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnDensity {
            dimension,
            domain,
            bound,
            total_mass,
            evaluate: Box::new(evaluate),
            box_mass: None,
            support: None,
        }
    }

    pub fn with_box_mass(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.box_mass = Some(Box::new(f));
        self
    }

    /// Narrows the integration limits used by the numeric box mass.
    pub fn with_support(mut self, support: Vec<(f64, f64)>) -> Self {
        assert_eq!(support.len(), self.dimension, "support dimension mismatch");
        self.support = Some(support);
        self
    }
}

impl TargetDensity for FnDensity {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.evaluate)(x)
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn box_mass(&self, t: &[f64]) -> f64 {
        match &self.box_mass {
            Some(f) => f(t),
            None => match numeric_box_mass(self, t, 1e-10) {
                Ok(v) => v,
                Err(Error::Accuracy { estimate, .. }) => estimate,
                Err(e) => panic!("box mass failed: {e}"),
            },
        }
    }

    fn support(&self, coordinate: usize) -> (f64, f64) {
        match &self.support {
            Some(s) => s[coordinate],
            None => match self.domain {
                Domain::UnitCube => (0.0, 1.0),
                Domain::RealSpace => (f64::NEG_INFINITY, f64::INFINITY),
            },
        }
    }
}

/// Constants entering the deterministic acceptance-rejection error bound
/// `8 L s b^{t/s} (2p - q) N^{-1/s} / C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParameters {
    /// Parts of the admissible convex covering.
    pub p: u32,
    /// Parts lying inside the acceptance region.
    pub q: u32,
    /// Quality parameter of the driver net.
    pub t: u32,
    pub bound_l: f64,
    pub total_mass: f64,
}

impl BoundParameters {
    pub fn new(p: u32, q: u32, t: u32, bound_l: f64, total_mass: f64) -> Result<Self> {
        if p == 0 || q > p {
            return Err(Error::InvalidArgument("covering counts need p >= 1 and p >= q"));
        }
        if !(total_mass > 0.0) || !(bound_l > 0.0) {
            return Err(Error::InvalidArgument("L and C must be positive"));
        }
        Ok(BoundParameters {
            p,
            q,
            t,
            bound_l,
            total_mass,
        })
    }

    /// Upper bound on the star discrepancy of `n` accepted points drawn with
    /// an `s`-dimensional base-2 driver.
    pub fn discrepancy_bound(&self, s: usize, n: usize) -> f64 {
        let s_f = s as f64;
        8.0 * self.bound_l / self.total_mass
            * s_f
            * libm::pow(2.0, self.t as f64 / s_f)
            * (2 * self.p - self.q) as f64
            * libm::pow(n as f64, -1.0 / s_f)
    }
}
