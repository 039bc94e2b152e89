use proptest::prelude::*;

use perimetry::embedding::Truncation;
use perimetry::lattice::{grid_box, triangular_ball};
use perimetry::percolation::{
    estimate_pc, p_grid, reaches_by_search, sample_and_query, sweep, trial_threshold, PercolationConfig,
    PercolationDomain,
};

#[test]
fn coupled_indicators_are_monotone() {
    let t = Truncation::new(grid_box(9).unwrap());
    let d = PercolationDomain::new(&t, t.center(), None).unwrap();
    let grid = p_grid(0.0, 1.0, 0.1).unwrap();
    for trial in 0..2000 {
        let mut prev = false;
        for &p in &grid {
            let now = sample_and_query(&t.emb, &d, PercolationConfig { p, seed: 17, trial });
            assert!(!prev || now, "trial {trial} drops at p={p}");
            prev = now;
        }
    }
}

#[test]
fn sweep_matches_per_level_queries() {
    let t = Truncation::new(triangular_ball(5).unwrap());
    let d = PercolationDomain::new(&t, 0, None).unwrap();
    let grid = p_grid(0.1, 0.9, 0.1).unwrap();
    let s = sweep(&t.emb, &d, &grid, 300, 4).unwrap();
    for row in &s.rows {
        let hits = (0..300)
            .filter(|&trial| reaches_by_search(&t.emb, &d, PercolationConfig { p: row.p, seed: 4, trial }))
            .count();
        assert_eq!(row.theta_hat, hits as f64 / 300.0);
        assert!(row.ci_lo <= row.theta_hat && row.theta_hat <= row.ci_hi);
    }
}

#[test]
fn z2_box_32_near_half() {
    let t = Truncation::new(grid_box(65).unwrap());
    let d = PercolationDomain::new(&t, t.center(), None).unwrap();
    let s = sweep(&t.emb, &d, &[0.5], 400, 2024).unwrap();
    let th = s.rows[0].theta_hat;
    assert!(th > 0.05 && th < 0.95, "theta(0.5) = {th}");
}

#[test]
fn estimate_is_reproducible() {
    let t = Truncation::new(grid_box(21).unwrap());
    let d = PercolationDomain::new(&t, t.center(), None).unwrap();
    let grid = p_grid(0.3, 0.7, 0.02).unwrap();
    let a = estimate_pc(&sweep(&t.emb, &d, &grid, 100, 8).unwrap(), 200, 9).unwrap();
    let b = estimate_pc(&sweep(&t.emb, &d, &grid, 100, 8).unwrap(), 200, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.interval.0 <= a.point && a.point <= a.interval.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn threshold_decides_every_level(seed in any::<u64>(), trial in 0u64..1000, p in 0.0f64..1.0) {
        let t = Truncation::new(grid_box(7).unwrap());
        let d = PercolationDomain::new(&t, t.center(), None).unwrap();
        let th = trial_threshold(&t.emb, &d, seed, trial);
        let cfg = PercolationConfig { p, seed, trial };
        prop_assert_eq!(sample_and_query(&t.emb, &d, cfg), th < p);
        prop_assert_eq!(reaches_by_search(&t.emb, &d, cfg), th < p);
    }
}
