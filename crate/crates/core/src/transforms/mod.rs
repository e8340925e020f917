//! The inverse Rosenblatt transform `T : [0,1]^s → R^{s-1} × R_+`.
//!
//! `z_j = F_j^{-1}(u_j | z_1 … z_{j-1})` for `j < s` and
//! `z_s = u_s H(z_1 … z_{s-1})`. For product proposals `T` is
//! measure-preserving onto the region under the graph of `H`, so
//! `|det J_T| = 1` wherever the inverse CDFs are differentiable.

use alloc::vec;
use alloc::vec::Vec;

use crate::densities::Proposal;
use crate::{Error, Result};

/// A proposal viewed as a map from the unit cube.
#[derive(Debug, Clone, Copy)]
pub struct TransformContext<'a, P: ?Sized> {
    proposal: &'a P,
}

impl<'a, P: Proposal + ?Sized> TransformContext<'a, P> {
    pub fn new(proposal: &'a P) -> Self {
        TransformContext { proposal }
    }

    pub fn proposal(&self) -> &'a P {
        self.proposal
    }

    /// `s`, one more than the proposal's dimension.
    pub fn dimension(&self) -> usize {
        self.proposal.dimension() + 1
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: len,
            });
        }
        Ok(())
    }

    /// Writes `T(u)` into `z`.
    pub fn forward_into(&self, u: &[f64], z: &mut [f64]) -> Result<()> {
        self.check_len(u.len())?;
        self.check_len(z.len())?;
        let d = self.dimension() - 1;
        for j in 0..=d {
            if !(0.0..=1.0).contains(&u[j]) {
                return Err(Error::InvalidArgument("transform input outside [0, 1]"));
            }
        }
        for j in 0..d {
            let (head, tail) = z.split_at_mut(j);
            let v = self.proposal.inverse_cdf(j, u[j], head);
            if !v.is_finite() {
                return Err(Error::UnboundedImage { coordinate: j });
            }
            tail[0] = v;
        }
        z[d] = u[d] * self.proposal.evaluate(&z[..d]);
        Ok(())
    }

    pub fn forward(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut z = vec![0.0; u.len()];
        self.forward_into(u, &mut z)?;
        Ok(z)
    }

    /// `T^{-1}(z)`; `z` must lie in the region under the graph of `H`.
    pub fn inverse(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_len(z.len())?;
        let d = self.dimension() - 1;
        if !self.in_image(z) {
            return Err(Error::OutsideDomain);
        }
        let h = self.proposal.evaluate(&z[..d]);
        let mut u = vec![0.0; d + 1];
        for j in 0..d {
            u[j] = self.proposal.cdf(j, z[j], &z[..j]);
        }
        u[d] = z[d] / h;
        Ok(u)
    }

    /// Whether `z` lies in `{(y, w) : H(y) > 0, 0 <= w <= H(y)}`, the image
    /// of the cube under `T`.
    pub fn in_image(&self, z: &[f64]) -> bool {
        let d = self.dimension() - 1;
        if z.len() != d + 1 || z.iter().any(|v| v.is_nan()) {
            return false;
        }
        let h = self.proposal.evaluate(&z[..d]);
        h > 0.0 && z[d] >= 0.0 && z[d] <= h
    }

    /// Central-difference estimate of `|det J_T(u)|` with step `h`.
    ///
    /// Fails if any stencil `[u_j - h, u_j + h]` leaves `(0, 1)` or contains
    /// a breakpoint of `F_j^{-1}`.
    pub fn jacobian_determinant_check(&self, u: &[f64], h: f64) -> Result<f64> {
        self.check_len(u.len())?;
        if !(h > 0.0) {
            return Err(Error::InvalidArgument("step must be positive"));
        }
        let s = self.dimension();
        for (j, &uj) in u.iter().enumerate() {
            if uj - h <= 0.0 || uj + h >= 1.0 {
                return Err(Error::InvalidArgument("stencil leaves the open unit cube"));
            }
            if j + 1 < s {
                if let Some(&at) = self
                    .proposal
                    .breakpoints(j)
                    .iter()
                    .find(|&&b| uj - h <= b && b <= uj + h)
                {
                    return Err(Error::Breakpoint { coordinate: j, at });
                }
            }
        }
        // jacobian[i * s + j] = ∂z_i / ∂u_j
        let mut jacobian = vec![0.0; s * s];
        let mut shifted = u.to_vec();
        let mut plus = vec![0.0; s];
        let mut minus = vec![0.0; s];
        for j in 0..s {
            shifted[j] = u[j] + h;
            self.forward_into(&shifted, &mut plus)?;
            shifted[j] = u[j] - h;
            self.forward_into(&shifted, &mut minus)?;
            shifted[j] = u[j];
            for i in 0..s {
                jacobian[i * s + j] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        Ok(determinant(&mut jacobian, s).abs())
    }
}

/// Determinant by Gaussian elimination with partial pivoting; destroys `a`.
pub(crate) fn determinant(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{UniformParetoProposal, UniformProposal};
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_proposal_is_identity() {
        let h = UniformProposal::new(2);
        let t = TransformContext::new(&h);
        let u = [0.3, 0.7, 0.2];
        assert_eq!(t.forward(&u).unwrap(), u.to_vec());
        assert_eq!(t.inverse(&u).unwrap(), u.to_vec());
        assert_abs_diff_eq!(t.jacobian_determinant_check(&u, 1e-3).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn example2_forward_values() {
        let h = UniformParetoProposal::new(2);
        let t = TransformContext::new(&h);
        assert_eq!(t.forward(&[0.25, 0.25, 1.0]).unwrap(), vec![0.5, 0.5, 0.25]);
        assert_eq!(t.forward(&[0.75, 0.75, 0.0]).unwrap(), vec![2.0, 2.0, 0.0]);
        assert_eq!(
            t.forward(&[1.0, 0.5, 0.5]).unwrap_err(),
            Error::UnboundedImage { coordinate: 0 }
        );
    }

    #[test]
    fn example2_inverse_rejects_points_above_graph() {
        let h = UniformParetoProposal::new(2);
        let t = TransformContext::new(&h);
        assert_eq!(t.inverse(&[0.5, 0.5, 0.3]).unwrap_err(), Error::OutsideDomain);
        assert_eq!(t.inverse(&[-0.5, 0.5, 0.0]).unwrap_err(), Error::OutsideDomain);
        let u = t.inverse(&[2.0, 0.5, 0.03125]).unwrap();
        assert_abs_diff_eq!(u[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(u[1], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(u[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn example2_jacobian_is_one() {
        let h = UniformParetoProposal::new(2);
        let t = TransformContext::new(&h);
        for u in [[0.3, 0.3, 0.5], [0.8, 0.6, 0.2]] {
            let det = t.jacobian_determinant_check(&u, 1e-6).unwrap();
            assert!((det - 1.0).abs() < 1e-4, "det = {det}");
        }
    }

    #[test]
    fn jacobian_refuses_breakpoint_stencils() {
        let h = UniformParetoProposal::new(2);
        let t = TransformContext::new(&h);
        assert_eq!(
            t.jacobian_determinant_check(&[0.3, 0.5, 0.5], 1e-6).unwrap_err(),
            Error::Breakpoint { coordinate: 1, at: 0.5 }
        );
        // the last coordinate has no inverse CDF, so 0.5 is fine there
        assert!(t.jacobian_determinant_check(&[0.3, 0.3, 0.5], 1e-6).is_ok());
    }

    #[test]
    fn determinant_of_permutation() {
        let mut a = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(determinant(&mut a, 2), -1.0);
        let mut b = [2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 1.0, 0.0, 4.0];
        assert_eq!(determinant(&mut b, 3), 24.0);
    }
}
