mod common;

use common::{brute_force_mmd, rng};
use proptest::prelude::*;
use rand::Rng;
use sigregime::market::{self, GbmParams, RegimePointSpec};
use sigregime::metrics::{distance_matrix, gaussian_kernel, mmd, pooled_median_bandwidth, KernelConfig, RegimePoint};
use sigregime::seeding;

fn sample<R: Rng>(r: &mut R, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| r.random_range(-2.0..2.0)).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mmd_matches_brute_force(seed in any::<u64>(), m in 1usize..=8, n in 1usize..=8, dim in 1usize..=6, sigma in 0.2f64..5.0) {
        let mut r = rng(seed);
        let (x, y) = (sample(&mut r, m, dim), sample(&mut r, n, dim));
        let cfg = KernelConfig::new(sigma).unwrap();
        let got = mmd(&RegimePoint::new(x.clone()).unwrap(), &RegimePoint::new(y.clone()).unwrap(), &cfg).unwrap();
        prop_assert!((got - brute_force_mmd(&x, &y, sigma)).abs() <= 1e-12);
    }

    #[test]
    fn mmd_is_symmetric_and_non_negative(seed in any::<u64>(), m in 1usize..=8, n in 1usize..=8, dim in 1usize..=6) {
        let mut r = rng(seed);
        let x = RegimePoint::new(sample(&mut r, m, dim)).unwrap();
        let y = RegimePoint::new(sample(&mut r, n, dim)).unwrap();
        let cfg = KernelConfig::new(1.0).unwrap();
        let (xy, yx) = (mmd(&x, &y, &cfg).unwrap(), mmd(&y, &x, &cfg).unwrap());
        prop_assert!(xy >= 0.0);
        prop_assert_eq!(xy, yx);
        prop_assert_eq!(mmd(&x, &x, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn kernel_lies_in_unit_interval(seed in any::<u64>(), dim in 1usize..=6) {
        let mut r = rng(seed);
        let v = sample(&mut r, 2, dim);
        let cfg = KernelConfig::new(0.7).unwrap();
        let k = gaussian_kernel(&v[0], &v[1], &cfg).unwrap();
        prop_assert!(k > 0.0 && k < 1.0);
        prop_assert_eq!(gaussian_kernel(&v[0], &v[0], &cfg).unwrap(), 1.0);
    }
}

#[test]
fn distance_matrix_agrees_with_pairwise_mmd() {
    let mut r = rng(3);
    let points: Vec<RegimePoint> = (0..5)
        .map(|_| RegimePoint::new(sample(&mut r, 4, 3)).unwrap())
        .collect();
    let cfg = KernelConfig::new(1.3).unwrap();
    let d = distance_matrix(&points, &cfg).unwrap();
    for i in 0..5 {
        assert_eq!(d[(i, i)], 0.0);
        for j in 0..5 {
            assert_eq!(d[(i, j)], mmd(&points[i], &points[j], &cfg).unwrap());
            assert_eq!(d[(i, j)], d[(j, i)]);
        }
    }
}

#[test]
fn regimes_with_different_volatility_are_further_apart() {
    let spec = RegimePointSpec {
        n_paths: 40,
        depth: 3,
        steps: 100,
        factorial_scaling: true,
        include_t0: false,
    };
    let r1 = GbmParams::new(0.05, 0.10).unwrap();
    let r2 = GbmParams::new(0.05, 0.20).unwrap();
    let (mut across, mut within) = (0.0, 0.0);
    for rep in 0..10u64 {
        let seed = |tag: u64| seeding::derive_seed(2024, &[rep, tag]);
        let a = market::regime_point(&r1, &spec, seed(0)).unwrap();
        let b = market::regime_point(&r1, &spec, seed(1)).unwrap();
        let c = market::regime_point(&r2, &spec, seed(2)).unwrap();
        let cfg = pooled_median_bandwidth(&[a.clone(), b.clone(), c.clone()]).unwrap();
        across += mmd(&a, &c, &cfg).unwrap();
        within += mmd(&a, &b, &cfg).unwrap();
    }
    assert!(across > within, "across {across} within {within}");
}
