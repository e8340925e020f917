//! Discrepancy of samples with respect to their target distributions.
//!
//! * [`star_discrepancy_1d_exact`]: exact Kolmogorov–Smirnov distance.
//! * [`DeltaCover`]: grid estimate in any dimension, bracketed between the
//!   grid maximum and the grid maximum plus `δ`.
//! * [`isotropic_lower_estimate`]: a lower estimate of the isotropic
//!   discrepancy from random convex test sets.
//! * [`fit_rate`]: least-squares slope of `log D` against `log N`.

mod grid;
mod isotropic;

pub use grid::{DeltaCover, DiscrepancyReport, DEFAULT_GRID_BUDGET};
pub use isotropic::{
    ball_cube_volume, halfspace_cube_volume, isotropic_lower_estimate,
    isotropic_lower_estimate_with, local_discrepancy, ConvexTestSet, IsotropicOptions,
};

use alloc::vec::Vec;

use crate::samplers::DrarOutput;
use crate::samplers::DrarPlan;
use crate::{Error, Result};

/// `sup_t |#{x_n < t}/N - F(t)|` for scalar points, computed from order
/// statistics as `max_i max(F(x_(i)) - i/N, (i+1)/N - F(x_(i)))`.
pub fn star_discrepancy_1d_exact(points: &[f64], mut cdf: impl FnMut(f64) -> f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut sorted: Vec<f64> = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let below = f - i as f64 / n;
        let above = (i + 1) as f64 / n - f;
        worst = worst.max(below).max(above);
    }
    Ok(worst)
}

/// A least-squares line `log D = intercept + slope log N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `log D` against `log N` (natural logarithms) over `(N, D)` pairs.
///
/// Needs at least three pairs, all positive, with at least two distinct `N`.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::InvalidArgument("a rate fit needs at least three points"));
    }
    if pairs.iter().any(|&(n, d)| !(n > 0.0 && d > 0.0)) {
        return Err(Error::InvalidArgument("rate fit inputs must be positive"));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| libm::log(p.0)).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| libm::log(p.1)).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Both sides of the decomposition inequality
/// `D*(R) <= Σ_ℓ (N_{1,ℓ}/N) D*_{S_ℓ} + Σ_ℓ (N_{2,ℓ}/N) D*_{L_ℓ} + 1/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleCheck {
    /// Exact discrepancy of the whole output against the normalized target.
    pub total: f64,
    /// The weighted sum of part discrepancies.
    pub weighted_parts: f64,
    /// `1/N` with `N` the requested size.
    pub slack: f64,
}

impl TriangleCheck {
    pub fn right_hand_side(&self) -> f64 {
        self.weighted_parts + self.slack
    }

    /// Holds up to a `1e-12` floating-point allowance.
    pub fn holds(&self) -> bool {
        self.total <= self.right_hand_side() + 1e-12
    }
}

/// Measures every part of a one-dimensional reduced acceptance-rejection
/// sample against its own renormalized distribution, and the union against
/// the whole target.
pub fn triangle_check(plan: &DrarPlan<'_>, output: &DrarOutput) -> Result<TriangleCheck> {
    let decomposition = plan.decomposition();
    let total = star_discrepancy_1d_exact(output.samples.points.as_flat(), |x| decomposition.cdf(x))?;
    let n = plan.requested() as f64;
    let mut weighted_parts = 0.0;
    for part in &output.parts {
        let dist = plan.part_distribution(part.level, part.kind)?;
        let mut failure = None;
        let d = star_discrepancy_1d_exact(&part.points, |x| match dist.cdf(x) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        weighted_parts += part.points.len() as f64 / n * d;
    }
    Ok(TriangleCheck {
        total,
        weighted_parts,
        slack: 1.0 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn van_der_corput(count: u32) -> Vec<f64> {
        (0..count).map(|i| i.reverse_bits() as f64 / 4_294_967_296.0).collect()
    }

    #[test]
    fn single_point() {
        assert_eq!(star_discrepancy_1d_exact(&[0.5], |x| x).unwrap(), 0.5);
        assert_eq!(star_discrepancy_1d_exact(&[], |x| x).unwrap_err(), Error::EmptyPointSet);
    }

    #[test]
    fn van_der_corput_is_one_over_n() {
        for m in 0..=10 {
            let pts = van_der_corput(1 << m);
            let d = star_discrepancy_1d_exact(&pts, |x| x).unwrap();
            assert_eq!(d, 1.0 / (1u32 << m) as f64, "m = {m}");
        }
    }

    #[test]
    fn midpoints_are_half_over_n() {
        let n = 37;
        let pts: Vec<f64> = (0..n).map(|i| libm::sqrt((i as f64 + 0.5) / n as f64)).collect();
        let d = star_discrepancy_1d_exact(&pts, |x| x * x).unwrap();
        assert_abs_diff_eq!(d, 0.5 / n as f64, epsilon = 1e-15);
    }

    #[test]
    fn exact_power_laws() {
        let pairs: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&n| (n, 1.0 / n)).collect();
        let f = fit_rate(&pairs).unwrap();
        assert_abs_diff_eq!(f.slope, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.r_squared, 1.0, epsilon = 1e-14);
        let pairs: Vec<(f64, f64)> = [16.0, 64.0, 256.0, 1024.0]
            .iter()
            .map(|&n| (n, 3.0 / libm::sqrt(n)))
            .collect();
        assert_abs_diff_eq!(fit_rate(&pairs).unwrap().slope, -0.5, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_fits() {
        assert_eq!(
            fit_rate(&[(4.0, 1.0), (4.0, 2.0), (4.0, 3.0)]).unwrap_err(),
            Error::DegenerateFit
        );
        assert!(fit_rate(&[(4.0, 1.0), (8.0, 2.0)]).is_err());
        assert!(fit_rate(&[(4.0, 1.0), (8.0, 0.0), (9.0, 1.0)]).is_err());
    }
}
