//! Statistical behavior of the simulation harness: generator moments,
//! estimation consistency, covariance sanity, and power-curve shape.

mod support;

use autocal::data::Sample;
use autocal::simulation::{
    power_study, replicate_stats, simulate_sample, Contamination, ContaminationKind,
    CriticalSource, GammaLevelModel, PowerConfig,
};
use autocal::stats::{estimate_null_model, lift_points};
use autocal::testing::TestId;
use support::cholesky_ok;

fn level_means(sample: &Sample, levels: &[f64]) -> Vec<(f64, usize)> {
    levels
        .iter()
        .map(|&l| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for o in sample.observations() {
                if o.prediction == l {
                    sum += o.response;
                    count += 1;
                }
            }
            (sum / count as f64, count)
        })
        .collect()
}

#[test]
fn generator_hits_its_level_means() {
    let m = GammaLevelModel::table_example();
    let n = 100_000;

    let clean = simulate_sample(&m, n, Contamination::None, 42).unwrap();
    for (k, (mean, count)) in level_means(&clean, m.levels()).iter().enumerate() {
        let level = m.levels()[k];
        let tol = 4.0 * (level / 3.0).sqrt() / (*count as f64).sqrt();
        assert!((mean - level).abs() < tol, "level {level}: mean {mean} (tol {tol})");
    }

    let global = simulate_sample(&m, n, Contamination::Global { delta: 0.5 }, 43).unwrap();
    for (k, (mean, count)) in level_means(&global, m.levels()).iter().enumerate() {
        let level = m.levels()[k];
        let tol = 4.0 * (level / 3.0).sqrt() / (*count as f64).sqrt();
        assert!((mean - level - 0.5).abs() < tol, "level {level}: mean {mean}");
    }

    let local = simulate_sample(&m, n, Contamination::Local { level: 5, delta: 1.0 }, 44).unwrap();
    let means = level_means(&local, m.levels());
    for (k, (mean, count)) in means.iter().enumerate() {
        let level = m.levels()[k];
        let want = if k == 5 { level + 1.0 } else { level };
        let tol = 4.0 * (level / 3.0).sqrt() / (*count as f64).sqrt();
        assert!((mean - want).abs() < tol, "level {level}: mean {mean} want {want}");
    }
}

#[test]
fn estimation_recovers_the_generator() {
    let m = GammaLevelModel::table_example();
    let sample = simulate_sample(&m, 200_000, Contamination::None, 7).unwrap();
    let est = estimate_null_model(&sample, m.null_model().partition()).unwrap();
    for k in 0..m.k() {
        assert!(
            (est.probs()[k] - m.probs()[k]).abs() < 0.005,
            "prob {k}: {} vs {}",
            est.probs()[k],
            m.probs()[k]
        );
        let want = m.levels()[k] / 3.0;
        assert!(
            (est.variances()[k] - want).abs() < 0.15,
            "variance {k}: {} vs {want}",
            est.variances()[k]
        );
    }
}

#[test]
fn lift_table_covers_cohort_means() {
    // Across 100 independent samples, cohort means should sit within three
    // standard errors of their level essentially always.
    let m = GammaLevelModel::table_example();
    let mut inside = 0u32;
    let mut total = 0u32;
    for rep in 0..100u64 {
        let sample = simulate_sample(&m, 2_000, Contamination::None, 9_000 + rep).unwrap();
        for p in lift_points(&sample, m.null_model().partition()).unwrap() {
            let tau = (p.level / 3.0).sqrt();
            let half = 3.0 * tau / (p.count as f64).sqrt();
            total += 1;
            if (p.response_mean - p.level).abs() <= half {
                inside += 1;
            }
        }
    }
    assert_eq!(total, 600);
    assert!(inside >= 590, "coverage {inside}/600");
}

#[test]
fn replication_covariances_are_positive_semidefinite() {
    let m = GammaLevelModel::table_example();
    let s = replicate_stats(&m, 400, 1_000, 0.05, 20_000, None, 3).unwrap();
    assert!(cholesky_ok(&s.cov_scaled_increments, 1e-9));
    assert!(cholesky_ok(&s.cov_scaled_walk, 1e-9));
    for i in 0..m.k() {
        for j in 0..m.k() {
            assert_eq!(s.cov_scaled_increments[i][j], s.cov_scaled_increments[j][i]);
        }
        assert!(
            s.mean_scaled_increments[i].abs() < 0.1,
            "mean {i}: {}",
            s.mean_scaled_increments[i]
        );
    }
}

#[test]
fn global_power_curves_rise_monotonically_up_to_noise() {
    let m = GammaLevelModel::table_example();
    let reps = 800;
    let study = power_study(
        &m,
        &PowerConfig {
            n: 1000,
            reps,
            grid: vec![0.0, 0.1, 0.2, 0.3, 0.5, 1.0],
            contamination: ContaminationKind::Global,
            level: 0.05,
            mc_draws: 100_000,
            seed: 14,
            source: CriticalSource::TrueModel,
        },
    )
    .unwrap();
    let slack = 2.0 / (reps as f64).sqrt();
    for c in &study.curves {
        for w in c.points.windows(2) {
            assert!(
                w[1].rate >= w[0].rate - slack,
                "{:?}: {} then {}",
                c.test,
                w[0].rate,
                w[1].rate
            );
        }
        let last = c.points.last().unwrap();
        assert!(last.rate > 0.99, "{:?} at delta 1: {}", c.test, last.rate);
    }
}

/// Local contamination of an interior level: all five level-based tests
/// track each other, dominate the walk maxima, and saturate by delta = 1.
#[test]
fn interior_local_contamination_keeps_level_tests_together() {
    let m = GammaLevelModel::table_example();
    let reps = 1_500;
    let study = power_study(
        &m,
        &PowerConfig {
            n: 1000,
            reps,
            grid: vec![0.0, 0.2, 0.35, 0.5, 0.75, 1.0],
            contamination: ContaminationKind::Local { level: 3 },
            level: 0.05,
            mc_draws: 200_000,
            seed: 25,
            source: CriticalSource::TrueModel,
        },
    )
    .unwrap();

    let rate = |t: TestId, gi: usize| -> f64 {
        study.curves[t.index()].points[gi].rate
    };
    let five = [TestId::T1a, TestId::T1b, TestId::T3a, TestId::T3b, TestId::T3c];

    for gi in 0..study.grid.len() {
        // The five level-based tests stay within 0.25 of one another.
        let rates: Vec<f64> = five.iter().map(|&t| rate(t, gi)).collect();
        let lo = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = rates.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi - lo <= 0.25, "gap {} at delta {}", hi - lo, study.grid[gi]);

        // Each of them at least matches the walk maxima (within noise):
        // an interior cohort shift cancels in long prefix sums.
        let walk = rate(TestId::T2a, gi).max(rate(TestId::T2b, gi));
        for (&t, &r) in five.iter().zip(&rates) {
            assert!(r >= walk - 0.05, "{t:?} {r} below walks {walk} at delta {}", study.grid[gi]);
        }
    }

    for t in TestId::ALL {
        let last = rate(t, study.grid.len() - 1);
        assert!(last >= 0.95, "{t:?} at delta 1: {last}");
    }
}

#[test]
fn estimated_criticals_hold_the_null_level_roughly() {
    // With per-replication estimated critical values the null rejection
    // rate stays near the nominal level.
    let m = GammaLevelModel::table_example();
    let study = power_study(
        &m,
        &PowerConfig {
            n: 500,
            reps: 400,
            grid: vec![0.0, 1.0],
            contamination: ContaminationKind::Global,
            level: 0.05,
            mc_draws: 20_000,
            seed: 77,
            source: CriticalSource::EstimatedPerReplication { reference_n: 2_000 },
        },
    )
    .unwrap();
    for c in &study.curves {
        let null = c.points[0].rate;
        assert!(null > 0.01 && null < 0.12, "{:?} null rate {null}", c.test);
        assert!(c.points[1].rate > 0.99, "{:?} power {}", c.test, c.points[1].rate);
    }
}
