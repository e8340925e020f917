//! Acceptance-rejection samplers.
//!
//! | function | driver | domain |
//! |---|---|---|
//! | [`rar`] | pseudo-random | cube or `R^{s-1}` |
//! | [`dar_cube`] | Sobol net | `[0,1]^{s-1}` |
//! | [`dar_real`] | Sobol net through [`TransformContext`](crate::transforms::TransformContext) | `R^{s-1}` |
//! | [`drar_sample`] | Sobol sequence, restarted per region | 1-D sum decompositions |
//!
//! Deterministic samplers return every accepted point rather than truncating
//! to the requested count, and report both.

mod dar;
mod drar;
mod rar;

pub use dar::{dar_cube, dar_cube_at, dar_real, dar_real_at, resolution_for};
pub use drar::{
    drar_sample, drar_sample_with, plan_drar, DrarLevelPlan, DrarOutput, DrarPart, DrarPlan,
    PartKind,
};
pub use rar::{rar, RUNAWAY_FACTOR};

use rand_core::RngCore;

use crate::nets::{DirectionNumberTable, SobolSequence, SobolStream};
use crate::{PointSet, Result};

/// Which algorithm produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SamplerTag {
    Rar,
    DarCube,
    DarReal,
    Drar,
    DrarEmbed,
}

impl SamplerTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerTag::Rar => "RAR",
            SamplerTag::DarCube => "DAR_CUBE",
            SamplerTag::DarReal => "DAR_REAL",
            SamplerTag::Drar => "DRAR",
            SamplerTag::DrarEmbed => "DRAR_EMBED",
        }
    }
}

impl core::fmt::Display for SamplerTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accepted points with the bookkeeping needed to interpret them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    /// Accepted points, projected onto the target's coordinates.
    pub points: PointSet,
    /// `M`, the number of driver points consumed.
    pub driver_count: u64,
    pub requested: usize,
    pub tag: SamplerTag,
}

impl SampleSet {
    /// `N`, the number of accepted points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `N / M`.
    pub fn acceptance_ratio(&self) -> f64 {
        self.len() as f64 / self.driver_count as f64
    }
}

/// A stream of points in `[0, 1)^s` feeding a sampler.
pub trait Driver {
    fn dim(&self) -> usize;

    fn next_point(&mut self, out: &mut [f64]);

    /// Starts a fresh prefix. Deterministic drivers rewind to index 0;
    /// random drivers simply continue.
    fn restart(&mut self);
}

/// The Sobol sequence as a driver, in natural order.
#[derive(Debug, Clone)]
pub struct SobolDriver {
    stream: SobolStream,
}

impl SobolDriver {
    pub fn new(dim: usize, table: &DirectionNumberTable) -> Result<Self> {
        Ok(SobolDriver {
            stream: SobolSequence::new(dim, table)?.stream(),
        })
    }

    /// Index of the next point.
    pub fn position(&self) -> u64 {
        self.stream.position()
    }
}

impl Driver for SobolDriver {
    fn dim(&self) -> usize {
        self.stream.dim()
    }

    fn next_point(&mut self, out: &mut [f64]) {
        self.stream.next_point(out);
    }

    fn restart(&mut self) {
        self.stream.restart();
    }
}

/// Independent uniforms from a pseudo-random generator.
#[derive(Debug, Clone)]
pub struct RandomDriver<R> {
    rng: R,
    dim: usize,
}

impl<R: RngCore> RandomDriver<R> {
    pub fn new(dim: usize, rng: R) -> Self {
        assert!(dim > 0, "driver dimension must be positive");
        RandomDriver { rng, dim }
    }

    pub fn into_inner(self) -> R {
        self.rng
    }
}

impl<R: RngCore> Driver for RandomDriver<R> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn next_point(&mut self, out: &mut [f64]) {
        for o in out.iter_mut() {
            *o = uniform(&mut self.rng);
        }
    }

    fn restart(&mut self) {}
}

/// A uniform draw from `[0, 1)` with 53 random bits.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
