//! One-dimensional sum decompositions `ψ = H_1 + … + H_k` and the region
//! bookkeeping used by reduced acceptance-rejection.
//!
//! Level `ℓ` works on a domain `D_ℓ` with the residual `ψ_ℓ = Σ_{i≥ℓ} H_i`.
//! Its small set `S_ℓ = {x ∈ D_ℓ : ψ_ℓ(x) < H_ℓ(x)}` is sampled by
//! acceptance-rejection from `H_ℓ`; its large set `L_ℓ = D_ℓ \ S_ℓ` gets
//! `H_ℓ` by inversion, and the remaining residual is passed down with
//! `D_{ℓ+1} = L_ℓ`. The last level has an empty small set.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;
use core::fmt;
use core::ops::Range;

use super::{Domain, TargetDensity};
use crate::quadrature::{integrate, QuadConfig};
use crate::{Error, Result};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A finite union of disjoint intervals, kept sorted. Endpoints are treated
/// as measure-zero: membership is closed on both sides.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region {
    intervals: Vec<Interval>,
}

impl Region {
    pub fn empty() -> Self {
        Region::default()
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Region::from_intervals([Interval::new(lo, hi)])
    }

    /// Normalizes the input: degenerate pieces are dropped and overlapping
    /// or touching pieces merged.
    pub fn from_intervals(pieces: impl IntoIterator<Item = Interval>) -> Self {
        let mut pieces: Vec<Interval> = pieces.into_iter().filter(|p| p.hi > p.lo).collect();
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut intervals: Vec<Interval> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match intervals.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => intervals.push(p),
            }
        }
        Region { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn intersect(&self, other: &Region) -> Region {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if hi > lo {
                    out.push(Interval { lo, hi });
                }
            }
        }
        Region::from_intervals(out)
    }

    pub fn minus(&self, other: &Region) -> Region {
        let mut pieces = self.intervals.clone();
        for b in &other.intervals {
            let mut next = Vec::with_capacity(pieces.len() + 1);
            for p in pieces {
                if p.lo < b.lo {
                    next.push(Interval { lo: p.lo, hi: p.hi.min(b.lo) });
                }
                if b.hi < p.hi {
                    next.push(Interval { lo: p.lo.max(b.hi), hi: p.hi });
                }
            }
            pieces = next;
        }
        Region::from_intervals(pieces)
    }
}

/// A non-negative-mass summand `H_i` of a decomposed density.
pub trait DensityComponent: Send + Sync {
    fn evaluate(&self, x: f64) -> f64;

    /// An antiderivative `G` with `G' = H`, if known in closed form.
    fn antiderivative(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Solves `G(x) = y` for `x` in `[lo, hi]`, if `G` has a closed-form
    /// inverse there.
    fn antiderivative_inverse(&self, _y: f64, _lo: f64, _hi: f64) -> Option<f64> {
        None
    }
}

/// `H(x) = x²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SquareComponent;

impl DensityComponent for SquareComponent {
    fn evaluate(&self, x: f64) -> f64 {
        x * x
    }

    fn antiderivative(&self, x: f64) -> Option<f64> {
        Some(x * x * x / 3.0)
    }

    fn antiderivative_inverse(&self, y: f64, _lo: f64, _hi: f64) -> Option<f64> {
        Some(libm::cbrt(3.0 * y))
    }
}

/// `H(x) = sin(ωx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineComponent {
    frequency: f64,
}

impl SineComponent {
    pub fn new(frequency: f64) -> Self {
        assert!(frequency > 0.0, "frequency must be positive");
        SineComponent { frequency }
    }
}

impl DensityComponent for SineComponent {
    fn evaluate(&self, x: f64) -> f64 {
        libm::sin(self.frequency * x)
    }

    fn antiderivative(&self, x: f64) -> Option<f64> {
        Some((1.0 - libm::cos(self.frequency * x)) / self.frequency)
    }

    fn antiderivative_inverse(&self, y: f64, lo: f64, hi: f64) -> Option<f64> {
        // closed form only on the first positive half-wave
        let half_wave = core::f64::consts::PI / self.frequency;
        if lo < 0.0 || hi > half_wave * (1.0 + 1e-15) {
            return None;
        }
        let c = (1.0 - self.frequency * y).clamp(-1.0, 1.0);
        Some(libm::acos(c) / self.frequency)
    }
}

/// A component given by a closure; masses and inverses are numeric.
pub struct FnComponent<F>(pub F);

impl<F> fmt::Debug for FnComponent<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnComponent(..)")
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> DensityComponent for FnComponent<F> {
    fn evaluate(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Regions of one level of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionLevel {
    /// `D_ℓ`.
    pub domain: Region,
    /// `S_ℓ`, where the residual falls below `H_ℓ`.
    pub small: Region,
    /// `L_ℓ = D_ℓ \ S_ℓ`.
    pub large: Region,
}

/// A density on an interval written as a sum of components, together with
/// its level regions.
pub struct Decomposition {
    domain: Interval,
    components: Vec<Box<dyn DensityComponent>>,
    levels: Vec<DecompositionLevel>,
    total_mass: f64,
    bound: f64,
}

impl fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Decomposition")
            .field("domain", &self.domain)
            .field("components", &self.components.len())
            .field("levels", &self.levels)
            .field("total_mass", &self.total_mass)
            .finish()
    }
}

const MASS_TOLERANCE: f64 = 1e-12;
const SCAN_POINTS: usize = 2048;

impl Decomposition {
    /// Builds the levels, locating each `S_ℓ` by a sign scan of
    /// `Σ_{i>ℓ} H_i` refined by bisection.
    pub fn new(domain: Interval, components: Vec<Box<dyn DensityComponent>>) -> Result<Self> {
        Self::build(domain, components, None)
    }

    /// Builds the levels from explicitly supplied small sets, one per level
    /// except the last (whose small set is always empty). Each is clipped to
    /// its level domain.
    pub fn with_regions(
        domain: Interval,
        components: Vec<Box<dyn DensityComponent>>,
        small: Vec<Region>,
    ) -> Result<Self> {
        if components.is_empty() || small.len() + 1 != components.len() {
            return Err(Error::InvalidArgument(
                "need one explicit small region per level except the last",
            ));
        }
        Self::build(domain, components, Some(small))
    }

    fn build(
        domain: Interval,
        components: Vec<Box<dyn DensityComponent>>,
        small: Option<Vec<Region>>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("decomposition needs a component"));
        }
        if !(domain.lo.is_finite() && domain.hi.is_finite() && domain.hi > domain.lo) {
            return Err(Error::InvalidArgument("domain must be a finite non-empty interval"));
        }
        let mut this = Decomposition {
            domain,
            components,
            levels: Vec::new(),
            total_mass: 0.0,
            bound: 0.0,
        };
        let k = this.components.len();
        let mut current = Region::interval(domain.lo, domain.hi);
        for level in 0..k {
            let s = if level + 1 == k {
                Region::empty()
            } else {
                match &small {
                    Some(given) => given[level].intersect(&current),
                    None => this.detect_small(level, &current),
                }
            };
            let l = current.minus(&s);
            this.levels.push(DecompositionLevel {
                domain: current,
                small: s,
                large: l.clone(),
            });
            current = l;
        }

        let whole = Region::interval(domain.lo, domain.hi);
        this.total_mass = this.mass(0..k, &whole)?;
        if !(this.total_mass > 0.0) {
            return Err(Error::DegenerateDensity);
        }
        for level in 0..k {
            let small_mass = this.mass(level..k, &this.levels[level].small)?;
            let large_mass = this.mass(level..level + 1, &this.levels[level].large)?;
            for mass in [small_mass, large_mass] {
                if mass < -MASS_TOLERANCE * this.total_mass {
                    return Err(Error::Decomposition { level, mass });
                }
            }
        }
        let peak = (0..=SCAN_POINTS)
            .map(|i| this.evaluate_sum(domain.lo + domain.length() * i as f64 / SCAN_POINTS as f64))
            .fold(0.0, f64::max);
        this.bound = peak * 1.01;
        Ok(this)
    }

    fn detect_small(&self, level: usize, region: &Region) -> Region {
        let k = self.components.len();
        let tail = |x: f64| -> f64 {
            self.components[level + 1..k].iter().map(|c| c.evaluate(x)).sum()
        };
        let mut pieces = Vec::new();
        for iv in region.intervals() {
            let step = iv.length() / SCAN_POINTS as f64;
            let mut start: Option<f64> = None;
            let mut prev_x = iv.lo;
            let mut prev_neg = tail(iv.lo) < 0.0;
            if prev_neg {
                start = Some(iv.lo);
            }
            for i in 1..=SCAN_POINTS {
                let x = if i == SCAN_POINTS { iv.hi } else { iv.lo + step * i as f64 };
                let neg = tail(x) < 0.0;
                if neg != prev_neg {
                    let root = bisect_sign_change(&tail, prev_x, x, prev_neg);
                    if neg {
                        start = Some(root);
                    } else if let Some(s) = start.take() {
                        pieces.push(Interval { lo: s, hi: root });
                    }
                }
                prev_x = x;
                prev_neg = neg;
            }
            if let Some(s) = start {
                pieces.push(Interval { lo: s, hi: iv.hi });
            }
        }
        Region::from_intervals(pieces)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, index: usize) -> &dyn DensityComponent {
        self.components[index].as_ref()
    }

    pub fn levels(&self) -> &[DecompositionLevel] {
        &self.levels
    }

    /// `∫_D ψ`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// `Σ_{i ∈ components} H_i(x)`.
    pub fn evaluate_components(&self, components: Range<usize>, x: f64) -> f64 {
        self.components[components].iter().map(|c| c.evaluate(x)).sum()
    }

    fn evaluate_sum(&self, x: f64) -> f64 {
        self.evaluate_components(0..self.components.len(), x)
    }

    /// `∫_region Σ_{i ∈ components} H_i`.
    pub fn mass(&self, components: Range<usize>, region: &Region) -> Result<f64> {
        let mut total = 0.0;
        for iv in region.intervals() {
            total += self.segment_mass(components.clone(), iv.lo, iv.hi)?;
        }
        Ok(total)
    }

    fn segment_mass(&self, components: Range<usize>, a: f64, b: f64) -> Result<f64> {
        let mut total = 0.0;
        for c in &self.components[components] {
            total += match (c.antiderivative(a), c.antiderivative(b)) {
                (Some(ga), Some(gb)) => gb - ga,
                _ => {
                    integrate(|x| c.evaluate(x), a, b, &QuadConfig::with_tolerance(1e-14))
                        .or_else(|e| match e {
                            Error::Accuracy { estimate, error_estimate } if error_estimate < 1e-9 => {
                                Ok(crate::quadrature::Estimate {
                                    value: estimate,
                                    error: error_estimate,
                                })
                            }
                            other => Err(other),
                        })?
                        .value
                }
            };
        }
        Ok(total)
    }

    /// The normalized distribution of `Σ_{i ∈ components} H_i` restricted to
    /// `region`.
    pub fn restricted(
        &self,
        components: Range<usize>,
        region: &Region,
    ) -> Result<RegionDistribution<'_>> {
        if components.is_empty() || components.end > self.components.len() {
            return Err(Error::InvalidArgument("component range out of bounds"));
        }
        let intervals = region.intervals().to_vec();
        let mut cumulative = Vec::with_capacity(intervals.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for iv in &intervals {
            acc += self.segment_mass(components.clone(), iv.lo, iv.hi)?;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::DegenerateDensity);
        }
        Ok(RegionDistribution {
            decomposition: self,
            components,
            intervals,
            cumulative,
        })
    }

    /// Normalized CDF of the full density, `∫_{lo}^{x} ψ / ∫_D ψ`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.box_mass(&[x]) / self.total_mass
    }
}

fn bisect_sign_change(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, a_negative: bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (f(mid) < 0.0) == a_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

impl TargetDensity for Decomposition {
    fn dimension(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        if self.domain.lo == 0.0 && self.domain.hi == 1.0 {
            Domain::UnitCube
        } else {
            Domain::RealSpace
        }
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        if self.domain.contains(x[0]) {
            self.evaluate_sum(x[0])
        } else {
            0.0
        }
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn box_mass(&self, t: &[f64]) -> f64 {
        let hi = t[0].min(self.domain.hi);
        if hi <= self.domain.lo {
            return 0.0;
        }
        self.segment_mass(0..self.components.len(), self.domain.lo, hi)
            .expect("component mass failed to converge")
    }

    fn support(&self, _coordinate: usize) -> (f64, f64) {
        (self.domain.lo, self.domain.hi)
    }
}

/// A sum of components restricted to a region and renormalized, with its
/// CDF and inverse CDF.
pub struct RegionDistribution<'a> {
    decomposition: &'a Decomposition,
    components: Range<usize>,
    intervals: Vec<Interval>,
    cumulative: Vec<f64>,
}

impl fmt::Debug for RegionDistribution<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegionDistribution")
            .field("components", &self.components)
            .field("intervals", &self.intervals)
            .field("mass", &self.mass())
            .finish()
    }
}

const INVERSION_TOLERANCE: f64 = 1e-12;

impl RegionDistribution<'_> {
    /// Unnormalized mass of the restriction.
    pub fn mass(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    pub fn region(&self) -> Region {
        Region::from_intervals(self.intervals.iter().copied())
    }

    /// Normalized density at `x`, zero outside the region.
    pub fn density(&self, x: f64) -> f64 {
        if self.intervals.iter().any(|iv| iv.contains(x)) {
            self.decomposition.evaluate_components(self.components.clone(), x) / self.mass()
        } else {
            0.0
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (j, iv) in self.intervals.iter().enumerate() {
            if x >= iv.hi {
                acc = self.cumulative[j + 1];
            } else {
                if x > iv.lo {
                    acc = self.cumulative[j]
                        + self.decomposition.segment_mass(self.components.clone(), iv.lo, x)?;
                }
                break;
            }
        }
        Ok((acc / self.mass()).clamp(0.0, 1.0))
    }

    /// Inverse CDF, in closed form when the single component provides one,
    /// otherwise by bisection to `1e-12` on the CDF scale.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidArgument("inverse CDF argument outside [0, 1]"));
        }
        let target = u * self.mass();
        let j = match self.cumulative[1..].iter().position(|&c| target <= c) {
            Some(j) => j,
            None => self.intervals.len() - 1,
        };
        let iv = self.intervals[j];
        let within = target - self.cumulative[j];

        if self.components.len() == 1 {
            let c = self.decomposition.component(self.components.start);
            if let Some(g_lo) = c.antiderivative(iv.lo) {
                if let Some(x) = c.antiderivative_inverse(g_lo + within, iv.lo, iv.hi) {
                    if x.is_finite() {
                        return Ok(x.clamp(iv.lo, iv.hi));
                    }
                }
            }
        }

        let tolerance = INVERSION_TOLERANCE * self.mass();
        let (mut a, mut b) = (iv.lo, iv.hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let f = self
                .decomposition
                .segment_mass(self.components.clone(), iv.lo, mid)?
                - within;
            if f.abs() <= tolerance {
                return Ok(mid);
            }
            if f < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let x = 0.5 * (a + b);
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::Inversion)
        }
    }
}

/// `ψ(x) = x² + sin(4x)` on `[0, 1]` with `H_1 = x²`, `H_2 = sin(4x)`,
/// `S_1 = (π/4, 1]` and `L_1 = [0, π/4]`.
pub fn example3_decomposition() -> Decomposition {
    let components: Vec<Box<dyn DensityComponent>> =
        vec![Box::new(SquareComponent), Box::new(SineComponent::new(4.0))];
    Decomposition::with_regions(
        Interval::new(0.0, 1.0),
        components,
        vec![Region::interval(FRAC_PI_4, 1.0)],
    )
    .expect("example decomposition is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn region_algebra() {
        let a = Region::from_intervals([Interval::new(0.0, 0.4), Interval::new(0.3, 0.6), Interval::new(0.8, 1.0)]);
        assert_eq!(a.intervals(), &[Interval::new(0.0, 0.6), Interval::new(0.8, 1.0)]);
        let b = a.minus(&Region::interval(0.5, 0.9));
        assert_eq!(b.intervals(), &[Interval::new(0.0, 0.5), Interval::new(0.9, 1.0)]);
        let c = a.intersect(&Region::interval(0.5, 0.9));
        assert_eq!(c.intervals(), &[Interval::new(0.5, 0.6), Interval::new(0.8, 0.9)]);
        assert!(Region::interval(0.2, 0.2).is_empty());
        assert_abs_diff_eq!(a.length(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn example3_values() {
        let d = example3_decomposition();
        assert_eq!(d.evaluate(&[0.0]), 0.0);
        let x = FRAC_PI_4;
        assert_abs_diff_eq!(d.evaluate(&[x]) - x * x, 0.0, epsilon = 1e-15);
        let exact = (1.0 - libm::cos(4.0)) / 4.0 + 1.0 / 3.0;
        assert_abs_diff_eq!(d.total_mass(), exact, epsilon = 1e-15);
        assert_abs_diff_eq!(d.total_mass(), 0.746_744, epsilon = 5e-7);
        let q = integrate(|x| libm::sin(4.0 * x) + x * x, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert_abs_diff_eq!(d.total_mass(), q.value, epsilon = 1e-12);
    }

    #[test]
    fn example3_levels() {
        let d = example3_decomposition();
        let levels = d.levels();
        assert_eq!(levels.len(), 2);
        assert_eq!(levels[0].small.intervals(), &[Interval::new(FRAC_PI_4, 1.0)]);
        assert_eq!(levels[0].large.intervals(), &[Interval::new(0.0, FRAC_PI_4)]);
        assert!(levels[1].small.is_empty());
        assert_eq!(levels[1].large, levels[0].large);
        // S_1 mass of ψ
        let s_mass = d.mass(0..2, &levels[0].small).unwrap();
        assert_abs_diff_eq!(s_mass, 0.085_254, epsilon = 1e-6);
        let h1 = d.mass(0..1, &levels[0].large).unwrap();
        assert_abs_diff_eq!(h1, FRAC_PI_4 * FRAC_PI_4 * FRAC_PI_4 / 3.0, epsilon = 1e-15);
        let h2 = d.mass(1..2, &levels[1].large).unwrap();
        assert_abs_diff_eq!(h2, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s_mass + h1 + h2, d.total_mass(), epsilon = 1e-14);
    }

    #[test]
    fn automatic_detection_matches_explicit_regions() {
        let components: Vec<Box<dyn DensityComponent>> =
            vec![Box::new(SquareComponent), Box::new(SineComponent::new(4.0))];
        let d = Decomposition::new(Interval::new(0.0, 1.0), components).unwrap();
        let s = d.levels()[0].small.intervals();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s[0].lo, FRAC_PI_4, epsilon = 1e-14);
        assert_eq!(s[0].hi, 1.0);
    }

    #[test]
    fn restricted_inverses_hit_region_endpoints() {
        let d = example3_decomposition();
        let large = &d.levels()[0].large;
        let h1 = d.restricted(0..1, large).unwrap();
        assert_abs_diff_eq!(h1.inverse_cdf(1.0).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        // x = (π/4) u^{1/3}
        assert_abs_diff_eq!(h1.inverse_cdf(0.125).unwrap(), FRAC_PI_4 * 0.5, epsilon = 1e-15);
        let h2 = d.restricted(1..2, large).unwrap();
        assert_abs_diff_eq!(h2.inverse_cdf(1.0).unwrap(), FRAC_PI_4, epsilon = 1e-12);
        // F(x) = (1 - cos 4x) / 2
        assert_abs_diff_eq!(h2.inverse_cdf(0.5).unwrap(), PI / 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h2.cdf(PI / 8.0).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn numeric_inversion_agrees_with_closed_form() {
        let components: Vec<Box<dyn DensityComponent>> = vec![
            Box::new(FnComponent(|x: f64| x * x)),
            Box::new(FnComponent(|x: f64| libm::sin(4.0 * x))),
        ];
        let numeric = Decomposition::with_regions(
            Interval::new(0.0, 1.0),
            components,
            vec![Region::interval(FRAC_PI_4, 1.0)],
        )
        .unwrap();
        let exact = example3_decomposition();
        for range in [0..1, 0..2] {
            let s = &exact.levels()[0].small;
            let a = exact.restricted(range.clone(), s).unwrap();
            let b = numeric.restricted(range, s).unwrap();
            for u in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
                let xa = a.inverse_cdf(u).unwrap();
                let xb = b.inverse_cdf(u).unwrap();
                assert!((a.cdf(xb).unwrap() - u).abs() < 1e-10, "u={u}");
                assert_abs_diff_eq!(xa, xb, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn negative_residual_is_rejected() {
        // S_1 = [0, 1] forced; then ψ = x - 2 has negative mass there
        let components: Vec<Box<dyn DensityComponent>> = vec![
            Box::new(FnComponent(|x: f64| x)),
            Box::new(FnComponent(|_| -2.0)),
        ];
        let err = Decomposition::with_regions(
            Interval::new(0.0, 1.0),
            components,
            vec![Region::interval(0.0, 0.5)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateDensity | Error::Decomposition { .. }));
    }
}
