use approx::assert_relative_eq;
use leastdiff::riskbench::{
    binomial_test_half, comparison_study, decorrelated, default_series_base, draw_sample, expected_t_ratio,
    generate_comparison_pairs, generate_series, ks_statistic, run_comparison_study, spearman, t_critical, t_ratio,
    ComparisonSettings, ORACLE,
};
use leastdiff::stream::{substream, Purpose};
use leastdiff::{
    Candidate, Designation, Error, Measure, PopulationConfig, Regime, Scale, StudyDesign,
};

fn config(mu_x: f64, mu_y: f64, sigma: f64, size: usize, alpha: f64) -> PopulationConfig {
    PopulationConfig::new(mu_x, mu_y, sigma, sigma, size, size, alpha).unwrap()
}

#[test]
fn zero_spread_samples_are_constant() {
    let c = config(3.0, 5.0, 0.0, 6, 0.05);
    let s = draw_sample(&c, &mut substream(1, Purpose::Sample, 0, 0));
    assert!(s.x.iter().all(|&v| v == 3.0) && s.y.iter().all(|&v| v == 5.0));
    assert_eq!((s.x.len(), s.y.len()), (6, 6));
}

#[test]
fn sample_mean_is_within_the_clt_band() {
    let c = config(10.0, 12.0, 4.0, 10_000, 0.05);
    let s = draw_sample(&c, &mut substream(2, Purpose::Sample, 0, 0));
    let mean = s.x.iter().sum::<f64>() / s.x.len() as f64;
    assert!((mean - 10.0).abs() <= 4.0 * 4.0 / 100.0, "{mean}");
}

#[test]
fn samples_are_reproducible_per_substream() {
    let c = config(1.0, 2.0, 1.0, 8, 0.05);
    let a = draw_sample(&c, &mut substream(3, Purpose::Sample, 4, 5));
    let b = draw_sample(&c, &mut substream(3, Purpose::Sample, 4, 5));
    let other = draw_sample(&c, &mut substream(3, Purpose::Sample, 4, 6));
    assert_eq!(a, b);
    assert_ne!(a, other);
}

#[test]
fn growing_one_group_keeps_the_other() {
    let small = config(1.0, 2.0, 1.0, 8, 0.05);
    let big = PopulationConfig { n: 20, ..small };
    let a = draw_sample(&small, &mut substream(4, Purpose::Sample, 0, 0));
    let b = draw_sample(&big, &mut substream(4, Purpose::Sample, 0, 0));
    assert_eq!(a.x, b.x);
    assert_eq!(a.y[..], b.y[..8]);
}

#[test]
fn t_ratio_behaves() {
    let null = config(50.0, 50.0, 5.0, 500, 0.025);
    assert!(expected_t_ratio(&null, 1, 0, 100).unwrap().abs() < 0.15);

    let near = config(50.0, 52.0, 5.0, 20, 0.025);
    let far = config(50.0, 54.0, 5.0, 20, 0.025);
    let r1 = expected_t_ratio(&near, 2, 0, 400).unwrap();
    let r2 = expected_t_ratio(&far, 2, 0, 400).unwrap();
    assert_relative_eq!(r2 / r1, 2.0, max_relative = 0.1);

    let strict = PopulationConfig { alpha_dm: 0.005, ..near };
    assert!(t_critical(&strict) > t_critical(&near));
    let s = draw_sample(&near, &mut substream(5, Purpose::Sample, 0, 0));
    assert!(t_ratio(&s, &strict).unwrap().abs() < t_ratio(&s, &near).unwrap().abs());
}

#[test]
fn binomial_test_matches_exact_values() {
    // 2 * P(X <= 3), X ~ Binomial(10, 1/2) = 2 * 176 / 1024
    assert_relative_eq!(binomial_test_half(3, 10), 352.0 / 1024.0, max_relative = 1e-12);
    assert_relative_eq!(binomial_test_half(7, 10), 352.0 / 1024.0, max_relative = 1e-12);
    assert_eq!(binomial_test_half(5, 10), 1.0);
    assert!(binomial_test_half(0, 200) < 1e-50);
}

#[test]
fn ks_statistic_of_known_samples() {
    assert_eq!(ks_statistic(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
    assert_eq!(ks_statistic(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
    assert_relative_eq!(ks_statistic(&[1.0, 2.0, 3.0, 4.0], &[2.5, 3.5]), 0.5, epsilon = 1e-15);
}

#[test]
fn spearman_uses_average_ranks() {
    assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]), 1.0);
    assert_eq!(spearman(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]), -1.0);
    assert_eq!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), 0.0);
    // Pearson correlation of ranks (1, 2.5, 2.5, 4) and (1, 2, 3, 4).
    assert_relative_eq!(spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]), 0.9486832980505138, epsilon = 1e-12);
}

#[test]
fn series_vary_only_their_measure() {
    let base = default_series_base(Regime::Positive);
    for measure in Measure::RAW.into_iter().chain(Measure::RELATIVE) {
        let series = generate_series(measure, 6, &base).unwrap();
        assert_eq!(series.configs.len(), 6);
        for w in series.configs.windows(2) {
            assert!(measure.stronger(&w[1], &w[0]), "{measure} does not strengthen");
        }
        let scale = if measure.is_relative() { Scale::Relative } else { Scale::Raw };
        for other in Measure::for_scale(scale) {
            if other == measure || series.coupled.contains(&other) {
                continue;
            }
            let first = other.value(&series.configs[0]);
            assert!(series.configs.iter().all(|c| (other.value(c) - first).abs() <= 1e-12 * first.abs().max(1.0)));
        }
    }
    assert!(generate_series(Measure::MuDm, 6, &base).unwrap().coupled.contains(&Measure::RMuDm));
    assert!(matches!(generate_series(Measure::DfD, 4, &base), Err(Error::InfeasibleSeries(_))));
}

#[test]
fn pairs_are_fair_and_regime_filtered() {
    let settings = ComparisonSettings {
        pairs: 200,
        samples: 10,
        ..ComparisonSettings::desk(Scale::Raw, Regime::Positive, StudyDesign::Individual(Measure::MuDm), 21)
    };
    let set = generate_comparison_pairs(&settings).unwrap();
    assert_eq!(set.pairs.len(), 200);
    let exp1 = set.pairs.iter().filter(|p| p.truth(Measure::MuDm) == Designation::Exp1Stronger).count();
    assert!((76..=124).contains(&exp1), "{exp1}");
    for p in &set.pairs {
        for other in [Measure::SigmaD, Measure::DfD, Measure::AlphaDm] {
            assert_eq!(p.truth(other), Designation::Exp2Stronger);
        }
    }
    assert!(set.t_ratios.iter().flatten().all(|&r| r > 1.0));
    assert!(decorrelated(&set.pairs, Scale::Raw, &[Measure::MuDm]));
}

#[test]
fn small_study_scores_random_and_oracle_as_expected() {
    let settings = ComparisonSettings {
        pairs: 60,
        samples: 10,
        draws: 1000,
        candidates: vec![Candidate::DeltaL, Candidate::Rnd],
        ..ComparisonSettings::desk(Scale::Raw, Regime::Negative, StudyDesign::Individual(Measure::SigmaD), 5)
    };
    let set = generate_comparison_pairs(&settings).unwrap();
    let report = run_comparison_study(&settings, &set).unwrap();
    let oracle = report.row(ORACLE, Measure::SigmaD).unwrap();
    assert_eq!(oracle.mean_error, 0.0);
    let rnd = report.row("rnd", Measure::SigmaD).unwrap();
    // 99% binomial band around one half for this many trials.
    let band = 2.576 * 0.5 / (rnd.n_trials as f64).sqrt();
    assert!((rnd.mean_error - 0.5).abs() <= band, "{}", rnd.mean_error);
    assert!(report.rows.iter().all(|r| (0.0..=1.0).contains(&r.mean_error)));
    assert_eq!(comparison_study(&settings).unwrap(), report);
}

#[test]
fn infeasible_regime_is_reported() {
    let settings = ComparisonSettings {
        pairs: 50,
        samples: 5,
        max_attempts: 1,
        ..ComparisonSettings::desk(Scale::Raw, Regime::Positive, StudyDesign::Simultaneous, 1)
    };
    assert!(matches!(generate_comparison_pairs(&settings), Err(Error::RegimeInfeasible { .. })));
    let too_few = ComparisonSettings { pairs: 10, ..settings };
    assert!(matches!(generate_comparison_pairs(&too_few), Err(Error::InvalidInput { .. })));
}
