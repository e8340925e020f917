use alloc::vec;
use alloc::vec::Vec;

use super::DyadicPoints;
use crate::{Error, PointSet, Result};

/// A dyadic box `∏ [a_j 2^-d_j, (a_j + 1) 2^-d_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementaryInterval {
    digits: Vec<u32>,
    offsets: Vec<u64>,
}

impl ElementaryInterval {
    pub fn new(digits: Vec<u32>, offsets: Vec<u64>) -> Result<Self> {
        if digits.len() != offsets.len() {
            return Err(Error::DimensionMismatch {
                expected: digits.len(),
                found: offsets.len(),
            });
        }
        if digits.is_empty() {
            return Err(Error::InvalidArgument("interval needs at least one dimension"));
        }
        for (&d, &a) in digits.iter().zip(&offsets) {
            if d > 63 {
                return Err(Error::InvalidArgument("interval digit count above 63"));
            }
            if a >> d != 0 {
                return Err(Error::InvalidArgument("interval offset must be below 2^d"));
            }
        }
        Ok(ElementaryInterval { digits, offsets })
    }

    /// The whole cube `[0, 1)^s`, the only interval of order 0.
    pub fn unit(dim: usize) -> Self {
        ElementaryInterval {
            digits: vec![0; dim],
            offsets: vec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.digits.len()
    }

    pub fn order(&self) -> u32 {
        self.digits.iter().sum()
    }

    pub fn volume(&self) -> f64 {
        libm::ldexp(1.0, -(self.order() as i32))
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    /// Half-open membership; exact because the bounds are dyadic.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.digits.iter().zip(&self.offsets))
            .all(|(&x, (&d, &a))| {
                let lo = libm::ldexp(a as f64, -(d as i32));
                let hi = libm::ldexp((a + 1) as f64, -(d as i32));
                lo <= x && x < hi
            })
    }

    pub fn contains_bits(&self, x: &[u64]) -> bool {
        x.iter()
            .zip(self.digits.iter().zip(&self.offsets))
            .all(|(&x, (&d, &a))| leading_digits(x, d) == a)
    }
}

#[inline]
fn leading_digits(x: u64, d: u32) -> u64 {
    if d == 0 {
        0
    } else {
        x >> (64 - d)
    }
}

/// Number of points inside `interval`.
pub fn count_in_interval(points: &PointSet, interval: &ElementaryInterval) -> Result<usize> {
    if points.dim() != interval.dim() {
        return Err(Error::DimensionMismatch {
            expected: interval.dim(),
            found: points.dim(),
        });
    }
    Ok(points.iter().filter(|p| interval.contains(p)).count())
}

/// Calls `f` with every `(d_1, .., d_s)` of non-negative integers summing to `k`.
pub fn for_each_shape(s: usize, k: u32, mut f: impl FnMut(&[u32])) {
    fn rec(shape: &mut Vec<u32>, j: usize, left: u32, f: &mut impl FnMut(&[u32])) {
        if j + 1 == shape.len() {
            shape[j] = left;
            f(shape);
            return;
        }
        for d in 0..=left {
            shape[j] = d;
            rec(shape, j + 1, left - d, f);
        }
    }
    if s == 0 {
        return;
    }
    let mut shape = vec![0u32; s];
    rec(&mut shape, 0, k, &mut f);
}

/// Whether every elementary interval of exactly order `k` holds `|P| / 2^k`
/// points. Counts all `2^k` boxes of each shape in one pass.
pub fn all_fair_at_order(points: &DyadicPoints, k: u32) -> bool {
    let n = points.len();
    if k > 63 || (n >> k) << k != n {
        return false;
    }
    let expected = n >> k;
    let s = points.dim();
    let mut counts = vec![0usize; 1usize << k];
    let mut fair = true;
    for_each_shape(s, k, |shape| {
        if !fair {
            return;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for p in points.iter() {
            let mut cell = 0u64;
            for (&x, &d) in p.iter().zip(shape) {
                cell = (cell << d) | leading_digits(x, d);
            }
            counts[cell as usize] += 1;
        }
        fair = counts.iter().all(|&c| c == expected);
    });
    fair
}

/// Outcome of an exhaustive fairness audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetAudit {
    pub m: u32,
    /// Smallest `t` consistent with the audited orders.
    pub t: u32,
    /// Highest order up to which every elementary interval is fair.
    pub fair_order: u32,
    /// Highest order examined.
    pub orders_checked: u32,
}

/// Smallest `t` such that every elementary interval of order at most `m - t`
/// is fair, searching orders up to `min(k_max, m)`.
///
/// Fairness at order `k` implies fairness at every lower order (each box of
/// order `k - 1` is a union of two of order `k`), so the search walks upward
/// and stops at the first unfair order. When every order up to `k_max < m`
/// is fair the returned `t = m - k_max` is an upper bound.
pub fn audit_t_value(points: &DyadicPoints, m: u32, k_max: u32) -> Result<NetAudit> {
    if m > 63 || points.len() != 1usize << m {
        return Err(Error::InvalidArgument("audit needs exactly 2^m points"));
    }
    let top = k_max.min(m);
    let mut fair_order = 0;
    let mut checked = 0;
    for k in 1..=top {
        checked = k;
        if !all_fair_at_order(points, k) {
            break;
        }
        fair_order = k;
    }
    Ok(NetAudit {
        m,
        t: m - fair_order,
        fair_order,
        orders_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{sobol_points, DigitalNet, DirectionNumberTable};

    #[test]
    fn shapes_enumerated_once() {
        let mut n = 0;
        for_each_shape(3, 4, |s| {
            assert_eq!(s.iter().sum::<u32>(), 4);
            n += 1;
        });
        // C(4 + 2, 2)
        assert_eq!(n, 15);
    }

    #[test]
    fn van_der_corput_quarter() {
        let pts = sobol_points(2, 1, &DirectionNumberTable::default()).unwrap();
        let iv = ElementaryInterval::new(vec![2], vec![0]).unwrap();
        assert_eq!(count_in_interval(&pts, &iv).unwrap(), 1);
    }

    #[test]
    fn order_zero_counts_everything() {
        let table = DirectionNumberTable::bundled();
        let pts = sobol_points(5, 3, &table).unwrap();
        assert_eq!(count_in_interval(&pts, &ElementaryInterval::unit(3)).unwrap(), 32);
    }

    #[test]
    fn dimension_mismatch() {
        let pts = PointSet::from_scalars(&[0.1]);
        assert!(count_in_interval(&pts, &ElementaryInterval::unit(2)).is_err());
    }

    #[test]
    fn offset_out_of_range() {
        assert!(ElementaryInterval::new(vec![2], vec![4]).is_err());
    }

    #[test]
    fn two_dimensional_sobol_is_a_zero_net() {
        let table = DirectionNumberTable::bundled();
        let net = DigitalNet::sobol(8, 2, &table).unwrap();
        let audit = audit_t_value(&net.points_dyadic(), 8, 8).unwrap();
        assert_eq!(audit.t, 0);
        // brute force every order-8 box through the float path as well
        let pts = net.points();
        for d1 in 0..=8u32 {
            let d2 = 8 - d1;
            for a1 in 0..(1u64 << d1) {
                for a2 in 0..(1u64 << d2) {
                    let iv = ElementaryInterval::new(vec![d1, d2], vec![a1, a2]).unwrap();
                    assert_eq!(count_in_interval(&pts, &iv).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn van_der_corput_is_a_zero_net() {
        let net = DigitalNet::sobol(10, 1, &DirectionNumberTable::default()).unwrap();
        assert_eq!(audit_t_value(&net.points_dyadic(), 10, 10).unwrap().t, 0);
    }

    #[test]
    fn duplicated_points_are_not_fair() {
        let bits = PointSet::from_scalars(&[0.0, 0.0, 0.5, 0.5]);
        let dy = DyadicPoints::from_point_set(&bits).unwrap();
        let audit = audit_t_value(&dy, 2, 2).unwrap();
        assert_eq!(audit.t, 1);
    }
}
