use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use detar_core::densities::{
    example1_density, example2_density_and_proposal, example3_decomposition, TargetDensity,
    UniformParetoProposal, UniformProposal,
};
use detar_core::discrepancy::{
    fit_rate, halfspace_cube_volume, star_discrepancy_1d_exact, DeltaCover, DEFAULT_GRID_BUDGET,
};
use detar_core::nets::{sobol_points, sobol_prefix, DirectionNumberTable};
use detar_core::samplers::{dar_cube_at, drar_sample, plan_drar, rar};
use detar_core::transforms::TransformContext;
use detar_core::PointSet;

fn table() -> DirectionNumberTable {
    DirectionNumberTable::bundled()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sobol_nets_nest_and_project(m in 0u32..10, s in 1usize..8, k in 1usize..8) {
        let t = table();
        let small = sobol_points(m, s, &t).unwrap();
        let large = sobol_points(m + 1, s, &t).unwrap();
        prop_assert_eq!(small.as_flat(), &large.as_flat()[..small.as_flat().len()]);
        let k = k.min(s);
        prop_assert_eq!(small.project(k), sobol_points(m, k, &t).unwrap());
    }

    #[test]
    fn sobol_prefix_agrees_with_net(m in 1u32..10, extra in 0u64..300) {
        let t = table();
        let count = (1u64 << m).min(extra + 1);
        let prefix = sobol_prefix(count, 3, &t).unwrap();
        let net = sobol_points(m, 3, &t).unwrap();
        prop_assert_eq!(prefix.as_flat(), &net.as_flat()[..prefix.as_flat().len()]);
    }

    #[test]
    fn fit_slope_is_scale_invariant(
        ds in prop::collection::vec(1e-6f64..1.0, 3..10),
        scale in 1e-3f64..1e3,
    ) {
        let pairs: Vec<(f64, f64)> = ds.iter().enumerate().map(|(i, &d)| (((i + 1) * 100) as f64, d)).collect();
        let scaled: Vec<(f64, f64)> = pairs.iter().map(|&(n, d)| (n, d * scale)).collect();
        let a = fit_rate(&pairs).unwrap();
        let b = fit_rate(&scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() <= 1e-12);
        prop_assert!((b.intercept - a.intercept - scale.ln()).abs() <= 1e-9);
    }

    #[test]
    fn example1_box_mass_is_monotone(
        t in prop::collection::vec(0.0f64..=1.0, 4),
        bump in prop::collection::vec(0.0f64..=0.5, 4),
    ) {
        let psi = example1_density();
        let u: Vec<f64> = t.iter().zip(&bump).map(|(a, b)| (a + b).min(1.0)).collect();
        let (lo, hi) = (psi.box_mass(&t), psi.box_mass(&u));
        prop_assert!(lo >= 0.0 && lo <= hi + 1e-15 && hi <= psi.total_mass() + 1e-15);
    }

    #[test]
    fn example2_transform_round_trip(u in prop::collection::vec(0.0f64..1.0, 3)) {
        let h = UniformParetoProposal::new(2);
        let t = TransformContext::new(&h);
        let z = t.forward(&u).unwrap();
        prop_assert!(t.in_image(&z) || u[2] == 0.0 && z[2] == 0.0);
        let back = t.inverse(&z).unwrap();
        for (a, b) in u.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
    }

    #[test]
    fn exact_discrepancy_is_bracketed(points in prop::collection::vec(0.0f64..1.0, 1..200)) {
        let n = points.len() as f64;
        let d = star_discrepancy_1d_exact(&points, |x| x).unwrap();
        prop_assert!(d >= 0.5 / n - 1e-15 && d <= 1.0);
    }

    #[test]
    fn grid_sandwich_in_one_dimension(seed in any::<u64>(), n in 1usize..150, grid in 1u32..9) {
        let d = example3_decomposition();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<f64> = (0..n).map(|_| detar_core::samplers::uniform(&mut rng)).collect();
        let exact = star_discrepancy_1d_exact(&pts, |x| d.cdf(x)).unwrap();
        let r = DeltaCover::cube(&d, grid, DEFAULT_GRID_BUDGET).unwrap().evaluate(&PointSet::from_scalars(&pts)).unwrap();
        prop_assert!(r.lower_bound <= exact + 1e-12);
        prop_assert!(exact <= r.upper_bound + 1e-12);
        prop_assert!(r.upper_bound <= 1.0);
    }

    #[test]
    fn drar_output_size_is_the_quota_sum(n in 1usize..3000) {
        let d = example3_decomposition();
        let plan = plan_drar(&d, n).unwrap();
        let out = drar_sample(&plan, &table()).unwrap();
        prop_assert_eq!(out.samples.len(), plan.total_quota());
        prop_assert!(out.samples.len() >= n && out.samples.len() <= n + 3);
        let parts: usize = out.parts.iter().map(|p| p.points.len()).sum();
        prop_assert_eq!(parts, out.samples.len());
    }

    #[test]
    fn rar_is_reproducible(seed in any::<u64>(), n in 1usize..200) {
        let psi = example1_density();
        let h = UniformProposal::new(4);
        let a = rar(&psi, &h, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = rar(&psi, &h, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn halfspace_and_complement_fill_the_cube(
        w in prop::collection::vec(-1.0f64..1.0, 1..6),
        b in -2.0f64..2.0,
    ) {
        let neg: Vec<f64> = w.iter().map(|v| -v).collect();
        let v = halfspace_cube_volume(&w, b) + halfspace_cube_volume(&neg, -b);
        prop_assert!((v - 1.0).abs() < 1e-9, "{}", v);
    }
}

#[test]
fn cube_acceptance_geometry() {
    let psi = example1_density();
    let t = table();
    let s = dar_cube_at(&psi, 0, 12, &t).unwrap();
    let net = sobol_points(12, 5, &t).unwrap();
    let mut accepted = 0;
    for x in net.iter() {
        let v = psi.evaluate(&x[..4]);
        if v >= x[4] {
            accepted += 1;
            assert!(v > 0.0);
        } else {
            assert!(v < x[4]);
        }
    }
    assert_eq!(accepted, s.len());
}

#[test]
fn real_space_acceptance_ratio_tracks_bound() {
    let (psi, h) = example2_density_and_proposal();
    let s = detar_core::samplers::dar_real_at(&psi, &h, 0, 16, &table()).unwrap();
    let ratio = s.acceptance_ratio();
    assert!((ratio - 1.0 / psi.bound()).abs() < 0.005, "{ratio}");
}

#[test]
fn dar_cube_acceptance_ratio_converges() {
    let psi = example1_density();
    let target = psi.total_mass() / psi.bound();
    let errors: Vec<f64> = (8..=16)
        .map(|m| (dar_cube_at(&psi, 0, m, &table()).unwrap().acceptance_ratio() - target).abs())
        .collect();
    // trend, not strict monotonicity
    let fit = fit_rate(
        &errors
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0.0)
            .map(|(i, &e)| (((8 + i) as f64).exp2(), e))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert!(fit.slope < 0.0, "slope {}", fit.slope);
    // constant measured at the coarsest net, M^{-1/s} with s = 5
    let c = errors[0] * (8.0f64 / 5.0).exp2();
    assert!(errors[8] < 2.0 * c * (-16.0f64 / 5.0).exp2(), "{} vs c = {c}", errors[8]);
}
