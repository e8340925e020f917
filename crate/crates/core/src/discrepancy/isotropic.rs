use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::grid::{DeltaCover, DEFAULT_GRID_BUDGET};
use crate::densities::{Domain, TargetDensity};
use crate::samplers::uniform;
use crate::transforms::determinant;
use crate::{Error, PointSet, Result};

/// A convex subset of `[0, 1]^s` with a computable volume.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexTestSet {
    /// `{x : normal · x <= offset}` intersected with the cube.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// Closed ball intersected with the cube.
    Ball { center: Vec<f64>, radius: f64 },
    /// Convex hull of `s + 1` vertices inside the cube, stored row-major.
    Simplex { vertices: Vec<f64> },
    /// `[0, corner)`.
    AnchoredBox { corner: Vec<f64> },
}

impl ConvexTestSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexTestSet::HalfSpace { normal, .. } => normal.len(),
            ConvexTestSet::Ball { center, .. } => center.len(),
            ConvexTestSet::Simplex { vertices } => {
                // (s + 1) s = len
                let len = vertices.len();
                (libm::sqrt(4.0 * len as f64 + 1.0) as usize - 1) / 2
            }
            ConvexTestSet::AnchoredBox { corner } => corner.len(),
        }
    }

    /// Lebesgue measure of the set within the unit cube.
    pub fn volume(&self) -> f64 {
        match self {
            ConvexTestSet::HalfSpace { normal, offset } => halfspace_cube_volume(normal, *offset),
            ConvexTestSet::Ball { center, radius } => ball_cube_volume(center, *radius),
            ConvexTestSet::Simplex { vertices } => {
                let s = self.dim();
                let mut m = simplex_edges(vertices, s);
                let mut fact = 1.0;
                for k in 2..=s {
                    fact *= k as f64;
                }
                determinant(&mut m, s).abs() / fact
            }
            ConvexTestSet::AnchoredBox { corner } => {
                corner.iter().map(|c| c.clamp(0.0, 1.0)).product()
            }
        }
    }
}

// columns are v_i - v_0: m[r * s + c] = v_{c+1}[r] - v_0[r]
fn simplex_edges(vertices: &[f64], s: usize) -> Vec<f64> {
    let mut m = vec![0.0; s * s];
    for c in 0..s {
        for r in 0..s {
            m[r * s + c] = vertices[(c + 1) * s + r] - vertices[r];
        }
    }
    m
}

/// Inverse of an `n × n` matrix by Gauss–Jordan elimination.
fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        for k in 0..n {
            a.swap(pivot * n + k, col * n + k);
            inv.swap(pivot * n + k, col * n + k);
        }
        let p = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for row in 0..n {
            if row != col {
                let f = a[row * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        a[row * n + k] -= f * a[col * n + k];
                        inv[row * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// `|#{x_n ∈ A}/N - vol(A)|`.
pub fn local_discrepancy(points: &PointSet, set: &ConvexTestSet) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let s = points.dim();
    if set.dim() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: set.dim(),
        });
    }
    let inside = match set {
        ConvexTestSet::HalfSpace { normal, offset } => points
            .iter()
            .filter(|x| x.iter().zip(normal).map(|(a, b)| a * b).sum::<f64>() <= *offset)
            .count(),
        ConvexTestSet::Ball { center, radius } => {
            let r2 = radius * radius;
            points
                .iter()
                .filter(|x| x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2)
                .count()
        }
        ConvexTestSet::Simplex { vertices } => {
            let Some(inv) = invert(&simplex_edges(vertices, s), s) else {
                return Ok(0.0);
            };
            let mut lambda = vec![0.0; s];
            points
                .iter()
                .filter(|x| {
                    for (r, l) in lambda.iter_mut().enumerate() {
                        *l = (0..s).map(|c| inv[r * s + c] * (x[c] - vertices[c])).sum();
                    }
                    lambda.iter().all(|&l| l >= 0.0) && lambda.iter().sum::<f64>() <= 1.0
                })
                .count()
        }
        ConvexTestSet::AnchoredBox { corner } => points
            .iter()
            .filter(|x| x.iter().zip(corner).all(|(a, c)| a < c))
            .count(),
    };
    Ok((inside as f64 / points.len() as f64 - set.volume()).abs())
}

/// Volume of `{x ∈ [0,1]^s : w · x <= b}` by inclusion–exclusion over the
/// cube's vertices. Components with `|w_j| < 1e-12` are treated as zero.
pub fn halfspace_cube_volume(normal: &[f64], offset: f64) -> f64 {
    // reflect x_j → 1 - x_j so every weight is positive
    let mut b = offset;
    let mut w: Vec<f64> = Vec::with_capacity(normal.len());
    for &wj in normal {
        if wj.abs() < 1e-12 {
            continue;
        }
        if wj < 0.0 {
            b -= wj;
        }
        w.push(wj.abs());
    }
    let k = w.len();
    if k == 0 {
        return if b >= 0.0 { 1.0 } else { 0.0 };
    }
    let total: f64 = w.iter().sum();
    if b <= 0.0 {
        return 0.0;
    }
    if b >= total {
        return 1.0;
    }
    let mut acc = 0.0;
    for mask in 0u32..(1 << k) {
        let shift: f64 = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| w[j]).sum();
        let r = b - shift;
        if r > 0.0 {
            let term = libm::pow(r, k as f64);
            if mask.count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    let mut denom: f64 = w.iter().product();
    for i in 2..=k {
        denom *= i as f64;
    }
    (acc / denom).clamp(0.0, 1.0)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const BALL_NODES: usize = 24;

/// Volume of a closed ball intersected with `[0, 1]^s`.
///
/// Integrates slice volumes over the first coordinate after the substitution
/// `x_1 = c_1 + r sin θ`, which removes the square-root endpoint behaviour;
/// the θ range is split wherever the slice radius crosses a face, edge or
/// corner distance, so each piece is smooth for Gauss–Legendre.
pub fn ball_cube_volume(center: &[f64], radius: f64) -> f64 {
    if !(radius > 0.0) || center.is_empty() {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(BALL_NODES);
    ball_volume_rec(center, radius, &nodes, &weights)
}

fn ball_volume_rec(center: &[f64], r: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let c1 = center[0];
    let lo = (c1 - r).max(0.0);
    let hi = (c1 + r).min(1.0);
    if lo >= hi {
        return 0.0;
    }
    if center.len() == 1 {
        return hi - lo;
    }
    let rest = &center[1..];
    let theta_lo = libm::asin(((lo - c1) / r).clamp(-1.0, 1.0));
    let theta_hi = libm::asin(((hi - c1) / r).clamp(-1.0, 1.0));

    let mut cuts = vec![theta_lo, theta_hi];
    // distances from the sub-center to every face combination of the sub-cube
    let k = rest.len();
    let mut choice = vec![0u8; k];
    loop {
        let mut d2 = 0.0;
        let mut any = false;
        for (j, &ch) in choice.iter().enumerate() {
            match ch {
                1 => {
                    d2 += rest[j] * rest[j];
                    any = true;
                }
                2 => {
                    d2 += (1.0 - rest[j]) * (1.0 - rest[j]);
                    any = true;
                }
                _ => {}
            }
        }
        let b = libm::sqrt(d2);
        if any && b > 0.0 && b < r {
            let t = libm::acos(b / r);
            for cut in [t, -t] {
                if cut > theta_lo && cut < theta_hi {
                    cuts.push(cut);
                }
            }
        }
        let mut j = 0;
        loop {
            if j == k {
                break;
            }
            choice[j] += 1;
            if choice[j] < 3 {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    cuts.sort_by(f64::total_cmp);

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wt) in nodes.iter().zip(weights) {
            let theta = mid + half * x;
            let rho = r * libm::cos(theta);
            if rho > 0.0 {
                total += wt * half * rho * ball_volume_rec(rest, rho, nodes, weights);
            }
        }
    }
    total
}

/// Trial settings for [`isotropic_lower_estimate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicOptions {
    pub trials: usize,
    pub seed: u64,
    /// Also evaluate every anchored box `[0, a/2^g)` on this grid.
    pub anchored_grid: Option<u32>,
    /// Largest dimension for which ball trials are used; above it the ball
    /// slot is given to another half-space.
    pub max_ball_dimension: usize,
}

impl Default for IsotropicOptions {
    fn default() -> Self {
        IsotropicOptions {
            trials: 10_000,
            seed: 0,
            anchored_grid: None,
            max_ball_dimension: 3,
        }
    }
}

/// Lower estimate of the isotropic discrepancy `J_N` from `trials` random
/// half-spaces, balls and simplices, cycled in that order.
pub fn isotropic_lower_estimate(points: &PointSet, trials: usize, seed: u64) -> Result<f64> {
    isotropic_lower_estimate_with(
        points,
        &IsotropicOptions {
            trials,
            seed,
            ..Default::default()
        },
    )
}

struct UniformCube(usize);

impl TargetDensity for UniformCube {
    fn dimension(&self) -> usize {
        self.0
    }
    fn domain(&self) -> Domain {
        Domain::UnitCube
    }
    fn evaluate(&self, _x: &[f64]) -> f64 {
        1.0
    }
    fn bound(&self) -> f64 {
        1.0
    }
    fn total_mass(&self) -> f64 {
        1.0
    }
    fn box_mass(&self, t: &[f64]) -> f64 {
        t.iter().map(|v| v.clamp(0.0, 1.0)).product()
    }
}

pub fn isotropic_lower_estimate_with(points: &PointSet, options: &IsotropicOptions) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if options.trials == 0 && options.anchored_grid.is_none() {
        return Err(Error::InvalidArgument("need at least one trial"));
    }
    if points.as_flat().iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidArgument("isotropic discrepancy needs points in the unit cube"));
    }
    let s = points.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut best = 0.0f64;
    for trial in 0..options.trials {
        let set = match trial % 3 {
            1 if s <= options.max_ball_dimension => random_ball(&mut rng, s),
            2 => random_simplex(&mut rng, s),
            _ => random_halfspace(&mut rng, s),
        };
        best = best.max(local_discrepancy(points, &set)?);
    }
    if let Some(g) = options.anchored_grid {
        let cover = DeltaCover::cube(&UniformCube(s), g, DEFAULT_GRID_BUDGET)?;
        best = best.max(cover.evaluate(points)?.grid_max);
    }
    Ok(best)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller, first output only
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

fn random_halfspace(rng: &mut ChaCha8Rng, s: usize) -> ConvexTestSet {
    let normal = loop {
        let w: Vec<f64> = (0..s).map(|_| gaussian(rng)).collect();
        let norm = libm::sqrt(w.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            continue;
        }
        let w: Vec<f64> = w.iter().map(|v| v / norm).collect();
        if w.iter().all(|v| v.abs() >= 1e-3) {
            break w;
        }
    };
    let offset = normal.iter().map(|w| w * uniform(rng)).sum();
    ConvexTestSet::HalfSpace { normal, offset }
}

fn random_ball(rng: &mut ChaCha8Rng, s: usize) -> ConvexTestSet {
    let center = (0..s).map(|_| uniform(rng)).collect();
    let radius = 0.75 * (1.0 - uniform(rng));
    ConvexTestSet::Ball { center, radius }
}

fn random_simplex(rng: &mut ChaCha8Rng, s: usize) -> ConvexTestSet {
    ConvexTestSet::Simplex {
        vertices: (0..(s + 1) * s).map(|_| uniform(rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadConfig};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn whole_cube_contributes_nothing() {
        let pts = PointSet::from_flat(2, vec![0.1, 0.2, 0.7, 0.9]).unwrap();
        let whole = ConvexTestSet::AnchoredBox { corner: vec![1.0 + 1e-9, 1.0 + 1e-9] };
        assert_eq!(local_discrepancy(&pts, &whole).unwrap(), 0.0);
        let half = ConvexTestSet::HalfSpace { normal: vec![1.0, 1.0], offset: 2.0 };
        assert_eq!(local_discrepancy(&pts, &half).unwrap(), 0.0);
    }

    #[test]
    fn origin_points_against_half_space() {
        let pts = PointSet::from_flat(2, vec![0.0; 20]).unwrap();
        let set = ConvexTestSet::HalfSpace { normal: vec![1.0, 0.0], offset: 0.5 };
        assert_eq!(local_discrepancy(&pts, &set).unwrap(), 0.5);
    }

    #[test]
    fn halfspace_volumes() {
        assert_abs_diff_eq!(halfspace_cube_volume(&[1.0, 1.0], 1.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(halfspace_cube_volume(&[1.0, 1.0], 0.5), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(halfspace_cube_volume(&[-1.0, 0.0], -0.25), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(halfspace_cube_volume(&[1.0, 1.0, 1.0], 1.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(halfspace_cube_volume(&[1.0, 1.0, 1.0], 1.0), 1.0 / 6.0, epsilon = 1e-15);
        // cross-check an oblique cut by quadrature
        let (w1, w2, b) = (0.3, -0.8, -0.1);
        let q = integrate(
            |x| ((b - w1 * x) / w2).clamp(0.0, 1.0),
            0.0,
            1.0,
            &QuadConfig::default(),
        )
        .unwrap();
        // w2 < 0: the set is x2 >= (b - w1 x1)/w2
        assert_abs_diff_eq!(halfspace_cube_volume(&[w1, w2], b), 1.0 - q.value, epsilon = 1e-10);
    }

    #[test]
    fn ball_volumes() {
        assert_abs_diff_eq!(ball_cube_volume(&[0.5, 0.5], 0.5), PI / 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ball_cube_volume(&[0.0, 0.0], 1.0), PI / 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ball_cube_volume(&[0.5, 0.5, 0.5], 0.5), PI / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ball_cube_volume(&[0.0, 0.0, 0.0], 1.0), PI / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ball_cube_volume(&[0.5, 0.5], 2.0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ball_cube_volume(&[0.3], 0.5), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn ball_volume_matches_quadrature_when_clipped() {
        let (cx, cy, r) = (0.2, 0.9, 0.45);
        let q = integrate(
            |x| {
                let h2 = r * r - (x - cx) * (x - cx);
                if h2 <= 0.0 {
                    return 0.0;
                }
                let h = libm::sqrt(h2);
                ((cy + h).min(1.0) - (cy - h).max(0.0)).max(0.0)
            },
            0.0,
            1.0,
            &QuadConfig::with_tolerance(1e-13),
        )
        .unwrap();
        assert_abs_diff_eq!(ball_cube_volume(&[cx, cy], r), q.value, epsilon = 1e-11);
    }

    #[test]
    fn simplex_volume() {
        let unit = ConvexTestSet::Simplex { vertices: vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0] };
        assert_eq!(unit.dim(), 2);
        assert_abs_diff_eq!(unit.volume(), 0.5, epsilon = 1e-15);
        let tet = ConvexTestSet::Simplex {
            vertices: vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        };
        assert_eq!(tet.dim(), 3);
        assert_abs_diff_eq!(tet.volume(), 1.0 / 6.0, epsilon = 1e-15);
        let pts = PointSet::from_flat(2, vec![0.1, 0.1, 0.9, 0.9]).unwrap();
        assert_abs_diff_eq!(local_discrepancy(&pts, &unit).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn estimate_is_deterministic_and_dominates_grid() {
        let table = crate::nets::DirectionNumberTable::bundled();
        let pts = crate::nets::sobol_points(8, 2, &table).unwrap();
        let a = isotropic_lower_estimate(&pts, 300, 7).unwrap();
        let b = isotropic_lower_estimate(&pts, 300, 7).unwrap();
        assert_eq!(a, b);
        let with_grid = isotropic_lower_estimate_with(
            &pts,
            &IsotropicOptions { trials: 300, seed: 7, anchored_grid: Some(8), ..Default::default() },
        )
        .unwrap();
        let grid = DeltaCover::cube(&UniformCube(2), 8, DEFAULT_GRID_BUDGET)
            .unwrap()
            .evaluate(&pts)
            .unwrap();
        assert!(with_grid >= grid.grid_max);
        assert!(with_grid >= a);
    }
}
