use alloc::vec;

use super::{SampleSet, SamplerTag};
use crate::densities::{Domain, Proposal, TargetDensity};
use crate::nets::{DirectionNumberTable, SobolSequence, MAX_RESOLUTION};
use crate::transforms::TransformContext;
use crate::{Error, PointSet, Result};

/// Smallest `m` with `2^m >= ⌈expected_draws⌉`.
pub fn resolution_for(expected_draws: f64) -> Result<u32> {
    if !(expected_draws >= 0.0) || !expected_draws.is_finite() {
        return Err(Error::InvalidArgument("expected driver size must be finite"));
    }
    let needed = libm::ceil(expected_draws);
    let mut m = 0u32;
    while ((1u64 << m) as f64) < needed {
        m += 1;
        if m > MAX_RESOLUTION {
            return Err(Error::ResolutionUnsupported {
                requested: m,
                max: MAX_RESOLUTION,
            });
        }
    }
    Ok(m)
}

fn check_mass_and_bound<D: TargetDensity + ?Sized>(target: &D) -> Result<(f64, f64)> {
    let c = target.total_mass();
    if !(c > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let l = target.bound();
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidArgument("bound L must be positive and finite"));
    }
    Ok((c, l))
}

/// Grows `m` from `start` until at least 90 % of `requested` is accepted.
fn grow(
    requested: usize,
    start: u32,
    mut run: impl FnMut(u32) -> Result<SampleSet>,
) -> Result<SampleSet> {
    let mut m = start;
    loop {
        let sample = run(m)?;
        if sample.len() as f64 >= 0.9 * requested as f64 || m >= MAX_RESOLUTION {
            return Ok(sample);
        }
        m += 1;
    }
}

/// Deterministic acceptance-rejection on `[0, 1]^{s-1}`.
///
/// Uses a Sobol `(t, m, s)`-net with `2^m >= ⌈N L / C⌉` and keeps `x` when
/// `ψ(x_1 … x_{s-1}) >= L x_s`. If fewer than `0.9 N` points are accepted the
/// net is doubled and the sampler rerun.
pub fn dar_cube<D: TargetDensity + ?Sized>(
    target: &D,
    requested: usize,
    table: &DirectionNumberTable,
) -> Result<SampleSet> {
    let (c, l) = check_mass_and_bound(target)?;
    let m = resolution_for(requested as f64 * l / c)?;
    grow(requested, m, |m| dar_cube_at(target, requested, m, table))
}

/// [`dar_cube`] on a net of exactly `2^m` points.
pub fn dar_cube_at<D: TargetDensity + ?Sized>(
    target: &D,
    requested: usize,
    m: u32,
    table: &DirectionNumberTable,
) -> Result<SampleSet> {
    if target.domain() != Domain::UnitCube {
        return Err(Error::InvalidArgument("dar_cube needs a unit-cube target"));
    }
    let (_, l) = check_mass_and_bound(target)?;
    if m > MAX_RESOLUTION {
        return Err(Error::ResolutionUnsupported {
            requested: m,
            max: MAX_RESOLUTION,
        });
    }
    let d = target.dimension();
    let mut stream = SobolSequence::new(d + 1, table)?.stream();
    let count = 1u64 << m;
    let mut x = vec![0.0; d + 1];
    let mut points = PointSet::new(d);
    for _ in 0..count {
        stream.next_point(&mut x);
        let psi = target.evaluate(&x[..d]);
        if psi > 0.0 && l * x[d] <= psi {
            points.push(&x[..d]);
        }
    }
    Ok(SampleSet {
        points,
        driver_count: count,
        requested,
        tag: SamplerTag::DarCube,
    })
}

/// Deterministic acceptance-rejection on `R^{s-1}` through the inverse
/// Rosenblatt transform of a product proposal.
///
/// `2^m >= ⌈N L ∫H / C⌉` with both integrals over the whole space; `T(x)` is
/// kept when `ψ(z) >= L z_s`, i.e. `u_s <= ψ / (L H)`. The same growth rule
/// as [`dar_cube`] applies.
pub fn dar_real<D, P>(
    target: &D,
    proposal: &P,
    requested: usize,
    table: &DirectionNumberTable,
) -> Result<SampleSet>
where
    D: TargetDensity + ?Sized,
    P: Proposal + ?Sized,
{
    let (c, l) = check_mass_and_bound(target)?;
    let m = resolution_for(requested as f64 * l * proposal.total_mass() / c)?;
    grow(requested, m, |m| dar_real_at(target, proposal, requested, m, table))
}

/// [`dar_real`] on a net of exactly `2^m` points.
pub fn dar_real_at<D, P>(
    target: &D,
    proposal: &P,
    requested: usize,
    m: u32,
    table: &DirectionNumberTable,
) -> Result<SampleSet>
where
    D: TargetDensity + ?Sized,
    P: Proposal + ?Sized,
{
    let (_, l) = check_mass_and_bound(target)?;
    let d = target.dimension();
    if proposal.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: proposal.dimension(),
        });
    }
    if m > MAX_RESOLUTION {
        return Err(Error::ResolutionUnsupported {
            requested: m,
            max: MAX_RESOLUTION,
        });
    }
    let transform = TransformContext::new(proposal);
    let mut stream = SobolSequence::new(d + 1, table)?.stream();
    let count = 1u64 << m;
    let mut u = vec![0.0; d + 1];
    let mut z = vec![0.0; d + 1];
    let mut points = PointSet::new(d);
    for _ in 0..count {
        stream.next_point(&mut u);
        // dyadic net coordinates are < 1, so the image is always finite
        debug_assert!(u.iter().all(|&v| v < 1.0));
        match transform.forward_into(&u, &mut z) {
            Ok(()) => {}
            Err(Error::UnboundedImage { .. }) => continue,
            Err(e) => return Err(e),
        }
        let psi = target.evaluate(&z[..d]);
        if psi > 0.0 && l * z[d] <= psi {
            points.push(&z[..d]);
        }
    }
    Ok(SampleSet {
        points,
        driver_count: count,
        requested,
        tag: SamplerTag::DarReal,
    })
}
