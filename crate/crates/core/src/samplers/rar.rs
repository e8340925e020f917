use alloc::vec;

use rand_core::RngCore;

use super::{uniform, SampleSet, SamplerTag};
use crate::densities::{Proposal, TargetDensity};
use crate::{Error, PointSet, Result};

/// Draw budget per requested point before [`rar`] gives up.
pub const RUNAWAY_FACTOR: u64 = 1_000_000;

/// Random acceptance-rejection: draw `X ~ H` by inversion and `u ~ U[0,1)`,
/// keep `X` when `u L H(X) <= ψ(X)`, until `requested` points are kept.
///
/// For cube targets pass a [`UniformProposal`](crate::densities::UniformProposal).
/// Every draw checks `ψ <= L H`; a violation is an error, not a silent bias.
pub fn rar<D, P, R>(target: &D, proposal: &P, requested: usize, rng: &mut R) -> Result<SampleSet>
where
    D: TargetDensity + ?Sized,
    P: Proposal + ?Sized,
    R: RngCore + ?Sized,
{
    let d = target.dimension();
    if proposal.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: proposal.dimension(),
        });
    }
    let bound = target.bound();
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::InvalidArgument("bound L must be positive and finite"));
    }
    let mut points = PointSet::with_capacity(d, requested);
    let mut z = vec![0.0; d];
    let mut draws = 0u64;
    let limit = RUNAWAY_FACTOR.saturating_mul(requested as u64);
    while points.len() < requested {
        if draws >= limit {
            return Err(Error::Runaway {
                draws,
                accepted: points.len(),
            });
        }
        draws += 1;
        for j in 0..d {
            let (head, tail) = z.split_at_mut(j);
            tail[0] = proposal.inverse_cdf(j, uniform(rng), head);
        }
        let h = proposal.evaluate(&z);
        let u = uniform(rng);
        if !(h > 0.0) {
            continue;
        }
        let ratio = target.evaluate(&z) / (bound * h);
        if ratio > 1.0 + 1e-12 {
            return Err(Error::BoundViolation { ratio });
        }
        if u <= ratio {
            points.push(&z);
        }
    }
    Ok(SampleSet {
        points,
        driver_count: draws,
        requested,
        tag: SamplerTag::Rar,
    })
}
