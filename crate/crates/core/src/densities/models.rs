use core::f64::consts::PI;

use super::{estimate_ratio_bound, BoundSearch, Domain, Proposal, TargetDensity};

/// `ψ(x) = (1/d) Σ_i e^{-x_i}` on `[0, 1]^d`, a non-product density with
/// `L = 1` and `C = 1 - e^{-1}` in every dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeanExponentialDensity {
    dimension: usize,
}

impl MeanExponentialDensity {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        MeanExponentialDensity { dimension }
    }
}

/// The four-dimensional mean-of-exponentials target used by the first
/// experiment.
pub fn example1_density() -> MeanExponentialDensity {
    MeanExponentialDensity::new(4)
}

impl TargetDensity for MeanExponentialDensity {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn domain(&self) -> Domain {
        Domain::UnitCube
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| libm::exp(-v)).sum::<f64>() / self.dimension as f64
    }

    fn bound(&self) -> f64 {
        1.0
    }

    fn total_mass(&self) -> f64 {
        -libm::expm1(-1.0)
    }

    fn box_mass(&self, t: &[f64]) -> f64 {
        // (1/d) Σ_i (1 - e^{-t_i}) ∏_{j≠i} t_j
        let mut total = 0.0;
        for i in 0..self.dimension {
            let mut term = -libm::expm1(-t[i].clamp(0.0, 1.0));
            for (j, &tj) in t.iter().enumerate() {
                if j != i {
                    term *= tj.clamp(0.0, 1.0);
                }
            }
            total += term;
        }
        total / self.dimension as f64
    }
}

/// Product of `Gamma(3/2, 1)` densities on the positive orthant:
/// `ψ(x) = (2/√π)^d e^{-Σx} ∏ √x_j`, normalized so `C = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaProductDensity {
    dimension: usize,
    bound: f64,
}

impl GammaProductDensity {
    /// `bound` is the `L` with `ψ <= L H` for the proposal it will be paired with.
    pub fn new(dimension: usize, bound: f64) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        GammaProductDensity { dimension, bound }
    }

    /// Regularized lower incomplete gamma `P(3/2, x)`.
    pub fn marginal_cdf(x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let r = libm::sqrt(x);
        libm::erf(r) - 2.0 / libm::sqrt(PI) * r * libm::exp(-x)
    }

    pub fn marginal_density(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            2.0 / libm::sqrt(PI) * libm::exp(-x) * libm::sqrt(x)
        }
    }
}

impl TargetDensity for GammaProductDensity {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn domain(&self) -> Domain {
        Domain::RealSpace
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| Self::marginal_density(v)).product()
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn total_mass(&self) -> f64 {
        1.0
    }

    fn box_mass(&self, t: &[f64]) -> f64 {
        t.iter().map(|&v| Self::marginal_cdf(v)).product()
    }

    fn support(&self, _coordinate: usize) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Uniform proposal `H ≡ 1` on `[0, 1]^d`; its transform is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformProposal {
    dimension: usize,
}

impl UniformProposal {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        UniformProposal { dimension }
    }
}

impl Proposal for UniformProposal {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, z: &[f64]) -> f64 {
        if z.iter().all(|v| (0.0..=1.0).contains(v)) {
            1.0
        } else {
            0.0
        }
    }

    fn inverse_cdf(&self, _coordinate: usize, u: f64, _previous: &[f64]) -> f64 {
        u
    }

    fn cdf(&self, _coordinate: usize, z: f64, _previous: &[f64]) -> f64 {
        z.clamp(0.0, 1.0)
    }

    fn marginal_density(&self, _coordinate: usize, z: f64) -> f64 {
        if (0.0..=1.0).contains(&z) {
            1.0
        } else {
            0.0
        }
    }
}

/// Product proposal whose marginal is uniform with mass ½ on `[0, 1]` and a
/// `1/(2z²)` Pareto tail on `(1, ∞)`.
///
/// The marginal inverse CDF is `2u` for `u <= ½` and `1/(2(1 - u))` above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformParetoProposal {
    dimension: usize,
}

const HALF: [f64; 1] = [0.5];

impl UniformParetoProposal {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        UniformParetoProposal { dimension }
    }

    pub fn marginal_inverse_cdf(u: f64) -> f64 {
        if u <= 0.5 {
            2.0 * u
        } else {
            1.0 / (2.0 * (1.0 - u))
        }
    }

    pub fn marginal_cdf(z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else if z <= 1.0 {
            0.5 * z
        } else {
            1.0 - 0.5 / z
        }
    }

    pub fn marginal_pdf(z: f64) -> f64 {
        if z < 0.0 {
            0.0
        } else if z <= 1.0 {
            0.5
        } else {
            0.5 / (z * z)
        }
    }
}

impl Proposal for UniformParetoProposal {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, z: &[f64]) -> f64 {
        z.iter().map(|&v| Self::marginal_pdf(v)).product()
    }

    fn inverse_cdf(&self, _coordinate: usize, u: f64, _previous: &[f64]) -> f64 {
        Self::marginal_inverse_cdf(u)
    }

    fn cdf(&self, _coordinate: usize, z: f64, _previous: &[f64]) -> f64 {
        Self::marginal_cdf(z)
    }

    fn marginal_density(&self, _coordinate: usize, z: f64) -> f64 {
        Self::marginal_pdf(z)
    }

    fn breakpoints(&self, _coordinate: usize) -> &[f64] {
        &HALF
    }
}

/// The two-dimensional Gamma(3/2) product target with its uniform/Pareto
/// proposal. `L` is a numerically maximized `sup ψ/H` inflated by 1 %.
pub fn example2_density_and_proposal() -> (GammaProductDensity, UniformParetoProposal) {
    let proposal = UniformParetoProposal::new(2);
    let unbounded = GammaProductDensity::new(2, f64::INFINITY);
    let bound = estimate_ratio_bound(&unbounded, &proposal, &BoundSearch::default());
    (GammaProductDensity::new(2, bound), proposal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::numeric_box_mass;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn example1_fixed_values() {
        let d = example1_density();
        assert_eq!(d.evaluate(&[0.0; 4]), 1.0);
        assert_abs_diff_eq!(d.total_mass(), 0.632_120_558_828_557_7, epsilon = 1e-15);
        assert_abs_diff_eq!(d.box_mass(&[1.0; 4]), d.total_mass(), epsilon = 1e-15);
        assert_eq!(d.box_mass(&[0.0, 1.0, 1.0, 1.0]), 0.0);
    }

    #[test]
    fn example1_closed_form_matches_quadrature() {
        let d = example1_density();
        let t = [0.5, 1.0, 1.0, 1.0];
        let q = numeric_box_mass(&d, &t, 1e-10).unwrap();
        assert_abs_diff_eq!(d.box_mass(&t), q, epsilon = 1e-8);
    }

    #[test]
    fn example2_proposal_values() {
        assert_eq!(UniformParetoProposal::marginal_inverse_cdf(0.75), 2.0);
        assert_eq!(UniformParetoProposal::marginal_inverse_cdf(0.5), 1.0);
        assert_eq!(UniformParetoProposal::marginal_inverse_cdf(0.25), 0.5);
        assert_eq!(UniformParetoProposal::marginal_inverse_cdf(1.0), f64::INFINITY);
        let h = UniformParetoProposal::new(2);
        assert_eq!(h.evaluate(&[0.5, 0.5]), 0.25);
        assert_eq!(h.evaluate(&[2.0, 0.5]), 1.0 / 16.0);
        assert_eq!(h.evaluate(&[2.0, 2.0]), 1.0 / 64.0);
        assert_eq!(h.evaluate(&[-0.1, 0.5]), 0.0);
    }

    #[test]
    fn example2_target_normalized() {
        let (psi, _) = example2_density_and_proposal();
        assert_eq!(psi.box_mass(&[f64::INFINITY; 2]), 1.0);
        // (4/π) Γ(3/2)^2 = 1, checked by quadrature over the orthant
        let q = numeric_box_mass(&psi, &[f64::INFINITY, f64::INFINITY], 1e-9).unwrap();
        assert_abs_diff_eq!(q, 1.0, epsilon = 1e-8);
        assert_eq!(psi.evaluate(&[-1.0, 1.0]), 0.0);
    }

    #[test]
    fn example2_box_mass_matches_quadrature() {
        let (psi, _) = example2_density_and_proposal();
        for t in [[0.3, 2.5], [1.0, 1.0], [4.0, 0.1]] {
            let q = numeric_box_mass(&psi, &t, 1e-10).unwrap();
            assert_abs_diff_eq!(psi.box_mass(&t), q, epsilon = 1e-8);
        }
    }

    #[test]
    fn example2_bound_matches_analytic_supremum() {
        // sup ψ/H is attained at x1 = x2 = 5/2 in the Pareto-Pareto quadrant:
        // (16/π) (e^{-5/2} (5/2)^{5/2})^2
        let g = libm::exp(-2.5) * libm::pow(2.5, 2.5);
        let exact = 16.0 / PI * g * g;
        let (psi, _) = example2_density_and_proposal();
        assert_relative_eq!(psi.bound(), exact * 1.01, max_relative = 1e-6);
    }
}
