mod common;

use binomratio_core::model::{limit_law, ModelParams, Regime};
use binomratio_core::sampling::{draw_binomial, simulate_batch, standardized_statistic, Binomial, Lane, SeedSpec};
use common::*;
use proptest::prelude::*;
use rand::distr::Distribution;
use std::time::Instant;

#[test]
fn ks_against_exact_cdf() {
    let cdf = binomial_cdf(50, 0.3);
    assert!((cdf[50] - 1.0).abs() < 1e-12);
    for seed in 0..3 {
        let mut rng = SeedSpec::new(seed, 0).rng(Lane::X);
        let draws: Vec<u64> = (0..100_000).map(|_| draw_binomial(50, 0.3, &mut rng)).collect();
        let d = ks_statistic(&draws, &cdf);
        assert!(d < ks_critical_001(draws.len()), "seed {seed}: {d}");
    }
}

#[test]
fn ks_in_the_rejection_regime() {
    // n p = 300, well inside the acceptance-rejection branch
    let cdf = binomial_cdf(1000, 0.3);
    let mut rng = SeedSpec::new(8, 0).rng(Lane::Y);
    let draws: Vec<u64> = (0..100_000).map(|_| draw_binomial(1000, 0.3, &mut rng)).collect();
    assert!(ks_statistic(&draws, &cdf) < ks_critical_001(draws.len()));
}

#[test]
fn ks_detects_a_wrong_distribution() {
    let mut rng = SeedSpec::new(8, 0).rng(Lane::X);
    let draws: Vec<u64> = (0..100_000).map(|_| draw_binomial(50, 0.31, &mut rng)).collect();
    assert!(ks_statistic(&draws, &binomial_cdf(50, 0.3)) > ks_critical_001(draws.len()));
}

#[test]
fn throughput_at_the_collapse_scale() {
    let dist = Binomial::new(2_000_000_000, 0.5).unwrap();
    let mut rng = SeedSpec::new(1, 0).rng(Lane::Y);
    let draws = 200_000;
    let start = Instant::now();
    let mut acc = 0u64;
    for _ in 0..draws {
        acc = acc.wrapping_add(dist.sample(&mut rng));
    }
    let rate = draws as f64 / start.elapsed().as_secs_f64();
    assert!(acc > 0);
    assert!(rate >= 1e5, "{rate:.0} draws/s");
}

#[test]
fn case_ii_batch_matches_limit_variance() {
    let params = ModelParams::new(1_000_000, 1_000_000, 0.5, 15.0, 15.0).unwrap();
    let regime = Regime::case_ii(1.0).unwrap();
    let batch = simulate_batch(&params, regime, 100_000, SeedSpec::new(21, 0)).unwrap();
    let theory = limit_law(&params, regime).unwrap().variance;
    assert!((batch.variance() / theory - 1.0).abs() < 0.10);
    assert_eq!(batch.zero_numerator_count, 0);
}

#[test]
fn case_ii_moments_approach_the_limit() {
    let regime = Regime::case_ii(1.0).unwrap();
    let (mut var_err, mut mean_err) = (Vec::new(), Vec::new());
    for n in [10_000u64, 100_000, 1_000_000] {
        let params = ModelParams::new(n, n, 0.5, 15.0, 15.0).unwrap();
        let theory = limit_law(&params, regime).unwrap().variance;
        let (mut var, mut mean) = (0.0, 0.0);
        // eight streams of 1e6 keep Monte Carlo noise below the n = 1e5 bias
        for k in 0..8 {
            let b = simulate_batch(&params, regime, 1_000_000, SeedSpec::new(22, k)).unwrap();
            var += b.variance() / 8.0;
            mean += b.mean() / 8.0;
        }
        var_err.push((var - theory).abs());
        mean_err.push((mean / theory.sqrt()).abs());
    }
    assert!(var_err[1] < var_err[0] && var_err[2] < var_err[1], "{var_err:?}");
    assert!(mean_err[1] < mean_err[0] && mean_err[2] < mean_err[1], "{mean_err:?}");
}

#[test]
fn expm1_path_matches_direct_arithmetic_exhaustively() {
    let mut worst = 0.0f64;
    for &(n, m) in &[(1u64, 2u64), (10, 10), (120, 35), (1000, 200)] {
        for s in 1..=5 {
            for r in 1..=5 {
                let params = ModelParams::new(n, m, 0.3, s as f64, r as f64).unwrap();
                let law = limit_law(&params, Regime::CaseI).unwrap();
                for x in 0..=n {
                    for y in 0..=m {
                        if x + y > 0 {
                            let (direct, size) = direct_statistic(x, y, &law);
                            worst = worst.max((standardized_statistic(x, y, &law) - direct).abs() / size);
                        }
                    }
                }
            }
        }
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

proptest! {
    #[test]
    fn statistic_is_monotone(
        n in 10u64..100_000,
        m in 10u64..100_000,
        s in 0.5f64..10.0,
        r in 0.5f64..10.0,
        x_frac in 0.05f64..0.95,
        y_frac in 0.05f64..0.95,
    ) {
        let params = ModelParams::new(n, m, 0.5, s, r).unwrap();
        let law = limit_law(&params, Regime::case_ii(m as f64 / n as f64).unwrap()).unwrap();
        let x = ((n as f64 * x_frac) as u64).max(1);
        let y = ((m as f64 * y_frac) as u64).max(1);
        // more of a fixed total in X raises T
        prop_assert!(standardized_statistic(x + 1, y - 1, &law) > standardized_statistic(x, y, &law));
        // more Y with X fixed lowers T
        prop_assert!(standardized_statistic(x, y + 1, &law) < standardized_statistic(x, y, &law));
    }
}
