use alloc::vec::Vec;

use super::{Driver, SampleSet, SamplerTag, SobolDriver, RUNAWAY_FACTOR};
use crate::densities::{Decomposition, RegionDistribution};
use crate::nets::DirectionNumberTable;
use crate::{Error, PointSet, Result};

/// Masses and quotas of one level of a reduced acceptance-rejection plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrarLevelPlan {
    /// `∫_{S_ℓ} ψ_ℓ`, the residual's mass on the small set.
    pub small_mass: f64,
    /// `∫_{L_ℓ} H_ℓ`.
    pub large_mass: f64,
    /// `N_{1,ℓ}`.
    pub small_quota: usize,
    /// `N_{2,ℓ}`.
    pub large_quota: usize,
}

/// Quotas for sampling a decomposed density with [`drar_sample`].
#[derive(Debug)]
pub struct DrarPlan<'a> {
    decomposition: &'a Decomposition,
    requested: usize,
    levels: Vec<DrarLevelPlan>,
}

/// Which set of a level a part of the output came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartKind {
    /// Acceptance-rejection on `S_ℓ`.
    Small,
    /// Inversion on `L_ℓ`.
    Large,
}

/// Quotas `N_{1,ℓ} = ⌈N ∫_{S_ℓ} ψ_ℓ / ∫ψ⌉` and `N_{2,ℓ} = ⌈N ∫_{L_ℓ} H_ℓ / ∫ψ⌉`.
pub fn plan_drar(decomposition: &Decomposition, requested: usize) -> Result<DrarPlan<'_>> {
    let k = decomposition.component_count();
    let total = decomposition.total_mass();
    let n = requested as f64;
    let mut levels = Vec::with_capacity(k);
    for (level, regions) in decomposition.levels().iter().enumerate() {
        let small_mass = decomposition.mass(level..k, &regions.small)?;
        let large_mass = decomposition.mass(level..level + 1, &regions.large)?;
        for mass in [small_mass, large_mass] {
            if mass < 0.0 && mass < -1e-12 * total {
                return Err(Error::Decomposition { level, mass });
            }
        }
        let quota = |mass: f64| libm::ceil(n * mass.max(0.0) / total) as usize;
        levels.push(DrarLevelPlan {
            small_mass: small_mass.max(0.0),
            large_mass: large_mass.max(0.0),
            small_quota: quota(small_mass),
            large_quota: quota(large_mass),
        });
    }
    Ok(DrarPlan {
        decomposition,
        requested,
        levels,
    })
}

impl<'a> DrarPlan<'a> {
    pub fn decomposition(&self) -> &'a Decomposition {
        self.decomposition
    }

    pub fn requested(&self) -> usize {
        self.requested
    }

    pub fn levels(&self) -> &[DrarLevelPlan] {
        &self.levels
    }

    /// `Σ_ℓ N_{1,ℓ} + N_{2,ℓ}`, the exact size of the output.
    pub fn total_quota(&self) -> usize {
        self.levels.iter().map(|l| l.small_quota + l.large_quota).sum()
    }

    /// `α_ℓ`, the share of the total mass sampled by rejection at level `ℓ`.
    pub fn alpha(&self, level: usize) -> f64 {
        self.levels[level].small_mass / self.decomposition.total_mass()
    }

    /// `β_ℓ`, the share of the total mass sampled by inversion at level `ℓ`.
    pub fn beta(&self, level: usize) -> f64 {
        self.levels[level].large_mass / self.decomposition.total_mass()
    }

    /// The distribution a part is meant to follow: the residual on `S_ℓ`,
    /// or `H_ℓ` on `L_ℓ`, renormalized.
    pub fn part_distribution(&self, level: usize, kind: PartKind) -> Result<RegionDistribution<'a>> {
        let k = self.decomposition.component_count();
        let regions = &self.decomposition.levels()[level];
        match kind {
            PartKind::Small => self.decomposition.restricted(level..k, &regions.small),
            PartKind::Large => self.decomposition.restricted(level..level + 1, &regions.large),
        }
    }
}

/// One sub-sample of a reduced acceptance-rejection run.
#[derive(Debug, Clone, PartialEq)]
pub struct DrarPart {
    pub level: usize,
    pub kind: PartKind,
    pub points: Vec<f64>,
    /// Driver points consumed by this part.
    pub driver_count: u64,
}

/// The union sample together with its parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DrarOutput {
    pub samples: SampleSet,
    pub parts: Vec<DrarPart>,
}

/// Reduced acceptance-rejection driven by the two-dimensional Sobol
/// sequence, restarted from index 0 for every part.
pub fn drar_sample(plan: &DrarPlan<'_>, table: &DirectionNumberTable) -> Result<DrarOutput> {
    let mut driver = SobolDriver::new(2, table)?;
    drar_sample_with(plan, &mut driver)
}

/// Reduced acceptance-rejection with an arbitrary driver of dimension at
/// least 2.
///
/// For each level, `N_{1,ℓ}` points come from acceptance-rejection on `S_ℓ`
/// (`z = F^{-1}_{H_ℓ,S_ℓ}(x_1)`, kept when `x_2 H_ℓ(z) <= ψ_ℓ(z)`, drawing
/// until exactly `N_{1,ℓ}` are kept) and `N_{2,ℓ}` from
/// `F^{-1}_{H_ℓ,L_ℓ}(x_1)` over the first `N_{2,ℓ}` driver points.
pub fn drar_sample_with(plan: &DrarPlan<'_>, driver: &mut dyn Driver) -> Result<DrarOutput> {
    if driver.dim() < 2 {
        return Err(Error::InvalidArgument("reduced acceptance-rejection needs a 2-D driver"));
    }
    let decomposition = plan.decomposition;
    let k = decomposition.component_count();
    let mut x = alloc::vec![0.0; driver.dim()];
    let mut parts = Vec::with_capacity(2 * k);

    for (level, quotas) in plan.levels.iter().enumerate() {
        if quotas.small_quota > 0 {
            let proposal = decomposition.restricted(level..level + 1, &decomposition.levels()[level].small)?;
            let h = decomposition.component(level);
            let limit = RUNAWAY_FACTOR.saturating_mul(quotas.small_quota as u64);
            let mut points = Vec::with_capacity(quotas.small_quota);
            let mut draws = 0u64;
            driver.restart();
            while points.len() < quotas.small_quota {
                if draws >= limit {
                    return Err(Error::Runaway {
                        draws,
                        accepted: points.len(),
                    });
                }
                driver.next_point(&mut x);
                draws += 1;
                let z = proposal.inverse_cdf(x[0])?;
                let hz = h.evaluate(z);
                let psi = decomposition.evaluate_components(level..k, z);
                if hz > 0.0 && psi > 0.0 && x[1] * hz <= psi {
                    points.push(z);
                }
            }
            parts.push(DrarPart {
                level,
                kind: PartKind::Small,
                points,
                driver_count: draws,
            });
        }
        if quotas.large_quota > 0 {
            let target = decomposition.restricted(level..level + 1, &decomposition.levels()[level].large)?;
            let mut points = Vec::with_capacity(quotas.large_quota);
            driver.restart();
            for _ in 0..quotas.large_quota {
                driver.next_point(&mut x);
                points.push(target.inverse_cdf(x[0])?);
            }
            parts.push(DrarPart {
                level,
                kind: PartKind::Large,
                points,
                driver_count: quotas.large_quota as u64,
            });
        }
    }

    let mut all = Vec::with_capacity(plan.total_quota());
    for p in &parts {
        all.extend_from_slice(&p.points);
    }
    let samples = SampleSet {
        points: PointSet::from_scalars(&all),
        driver_count: parts.iter().map(|p| p.driver_count).sum(),
        requested: plan.requested,
        tag: if k > 2 { SamplerTag::DrarEmbed } else { SamplerTag::Drar },
    };
    Ok(DrarOutput { samples, parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{example3_decomposition, DensityComponent, Interval, SquareComponent};
    use alloc::boxed::Box;
    use alloc::vec;
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn example3_quotas() {
        let d = example3_decomposition();
        let plan = plan_drar(&d, 1000).unwrap();
        let levels = plan.levels();
        assert_eq!(levels[0].small_quota, 115);
        assert_eq!(levels[0].large_quota, 217);
        assert_eq!(levels[1].small_quota, 0);
        assert_eq!(levels[1].large_quota, 670);
        assert_eq!(plan.total_quota(), 1002);
        let shares: f64 = (0..2).map(|l| plan.alpha(l) + plan.beta(l)).sum();
        assert!((shares - 1.0).abs() < 1e-14);
    }

    #[test]
    fn example3_sample_respects_regions_and_quotas() {
        let d = example3_decomposition();
        let table = DirectionNumberTable::bundled();
        for n in [10, 1000] {
            let plan = plan_drar(&d, n).unwrap();
            let out = drar_sample(&plan, &table).unwrap();
            assert_eq!(out.samples.len(), plan.total_quota());
            assert!(out.samples.len() >= n && out.samples.len() <= n + 3);
            for part in &out.parts {
                let regions = &d.levels()[part.level];
                let region = match part.kind {
                    PartKind::Small => &regions.small,
                    PartKind::Large => &regions.large,
                };
                assert!(part.points.iter().all(|&x| region.contains(x)));
            }
        }
    }

    #[test]
    fn single_component_is_pure_inversion() {
        let components: Vec<Box<dyn DensityComponent>> = vec![Box::new(SquareComponent)];
        let d = Decomposition::new(Interval::new(0.0, 1.0), components).unwrap();
        let plan = plan_drar(&d, 8).unwrap();
        assert_eq!(plan.levels().len(), 1);
        assert_eq!(plan.levels()[0].small_quota, 0);
        assert_eq!(plan.levels()[0].large_quota, 8);
        let out = drar_sample(&plan, &DirectionNumberTable::bundled()).unwrap();
        // van der Corput points through x = u^{1/3}
        let expected = [0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875].map(libm::cbrt);
        for (got, want) in out.samples.points.as_flat().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(out.samples.tag, SamplerTag::Drar);
    }

    #[test]
    fn large_region_inverse_endpoint() {
        let d = example3_decomposition();
        let plan = plan_drar(&d, 100).unwrap();
        let dist = plan.part_distribution(0, PartKind::Large).unwrap();
        assert!((dist.inverse_cdf(1.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }
}
