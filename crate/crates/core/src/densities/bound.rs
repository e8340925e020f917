use alloc::vec;
use alloc::vec::Vec;

use super::{Proposal, TargetDensity};

/// Settings for [`estimate_ratio_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSearch {
    /// Multi-start grid density per axis inside each cell.
    pub starts_per_axis: usize,
    /// Relative inflation applied to the best ratio found.
    pub slack: f64,
    pub max_iterations: usize,
}

impl Default for BoundSearch {
    fn default() -> Self {
        BoundSearch {
            starts_per_axis: 3,
            slack: 0.01,
            max_iterations: 2000,
        }
    }
}

/// Estimates `sup ψ/H` by multi-start Nelder–Mead in the proposal's
/// uniform coordinates, one search per cell between inverse-CDF
/// breakpoints, and returns it inflated by `search.slack`.
pub fn estimate_ratio_bound<D, P>(target: &D, proposal: &P, search: &BoundSearch) -> f64
where
    D: TargetDensity + ?Sized,
    P: Proposal + ?Sized,
{
    let d = proposal.dimension();
    assert_eq!(target.dimension(), d, "target and proposal dimensions differ");
    let edges: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut e = vec![0.0];
            e.extend_from_slice(proposal.breakpoints(j));
            e.push(1.0);
            e
        })
        .collect();

    let ratio = |u: &[f64]| -> f64 {
        let mut z = vec![0.0; d];
        for j in 0..d {
            z[j] = proposal.inverse_cdf(j, u[j], &z[..j]);
        }
        if z.iter().any(|v| !v.is_finite()) {
            return 0.0;
        }
        let h = proposal.evaluate(&z);
        if h > 0.0 {
            target.evaluate(&z) / h
        } else {
            0.0
        }
    };

    let mut best = 0.0f64;
    let mut cell = vec![0usize; d];
    loop {
        let lo: Vec<f64> = (0..d).map(|j| edges[j][cell[j]]).collect();
        let hi: Vec<f64> = (0..d).map(|j| edges[j][cell[j] + 1]).collect();
        best = best.max(search_cell(&ratio, &lo, &hi, search));
        // next cell, odometer order
        let mut j = 0;
        loop {
            if j == d {
                return best * (1.0 + search.slack);
            }
            cell[j] += 1;
            if cell[j] + 1 < edges[j].len() {
                break;
            }
            cell[j] = 0;
            j += 1;
        }
    }
}

fn search_cell(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], search: &BoundSearch) -> f64 {
    let d = lo.len();
    let k = search.starts_per_axis.max(1);
    let mut best = 0.0f64;
    let mut idx = vec![0usize; d];
    loop {
        let start: Vec<f64> = (0..d)
            .map(|j| lo[j] + (hi[j] - lo[j]) * (idx[j] as f64 + 0.5) / k as f64)
            .collect();
        best = best.max(nelder_mead_max(f, &start, lo, hi, search.max_iterations));
        let mut j = 0;
        loop {
            if j == d {
                return best;
            }
            idx[j] += 1;
            if idx[j] < k {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Maximizes `f` over the open box `(lo, hi)`; iterates are clamped to a
/// slightly shrunken box so inverse CDFs stay finite.
fn nelder_mead_max(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_iterations: usize,
) -> f64 {
    let d = start.len();
    let clamp = |x: &mut [f64]| {
        for j in 0..d {
            let w = hi[j] - lo[j];
            x[j] = x[j].clamp(lo[j] + 1e-12 * w, hi[j] - 1e-9 * w);
        }
    };
    let g = |x: &[f64]| -f(x);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(start.to_vec());
    for j in 0..d {
        let mut v = start.to_vec();
        v[j] += 0.1 * (hi[j] - lo[j]);
        clamp(&mut v);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| g(v)).collect();

    for _ in 0..max_iterations {
        // order: best (lowest g) first
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        if spread.abs() <= 1e-14 * (1.0 + values[0].abs()) {
            let size: f64 = (1..=d)
                .map(|i| {
                    simplex[i]
                        .iter()
                        .zip(&simplex[0])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if size < 1e-12 {
                break;
            }
        }

        let mut centroid = vec![0.0; d];
        for v in &simplex[..d] {
            for j in 0..d {
                centroid[j] += v[j] / d as f64;
            }
        }
        let along = |t: f64| {
            let mut x: Vec<f64> = (0..d)
                .map(|j| centroid[j] + t * (simplex[d][j] - centroid[j]))
                .collect();
            clamp(&mut x);
            x
        };

        let reflected = along(-1.0);
        let fr = g(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = g(&expanded);
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
        } else if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
        } else {
            let contracted = if fr < values[d] { along(-0.5) } else { along(0.5) };
            let fc = g(&contracted);
            if fc < values[d].min(fr) {
                simplex[d] = contracted;
                values[d] = fc;
            } else {
                // shrink toward the best vertex
                for i in 1..=d {
                    for j in 0..d {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    clamp(&mut simplex[i]);
                    values[i] = g(&simplex[i]);
                }
            }
        }
    }
    -values.iter().copied().fold(f64::INFINITY, f64::min)
}
