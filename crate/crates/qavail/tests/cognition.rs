use proptest::prelude::*;
use qavail::cognition::{
    correlation_summary, letter_position_oracle, recall_under_budget, run_letter_scenario,
    run_names_scenario, Agreement, GroupOutcome, GroupSpec, LetterExperiment, LetterScenario,
    Lexicon, NamesScenario, ScenarioResult,
};
use qavail::estimate::register_estimate;
use qavail::{Error, GuessPrep, Oracle};

fn names(sizes: (usize, usize), factors: (f64, f64), m: usize, trials: usize) -> NamesScenario {
    NamesScenario {
        groups: [
            GroupSpec::new("first", sizes.0, factors.0),
            GroupSpec::new("second", sizes.1, factors.1),
        ],
        register_dim: m,
        budget: 60,
        trials,
    }
}

/// Width of the register grid around outcome `y`, in count units.
fn grid_step(n: usize, y: usize, m: usize) -> f64 {
    n as f64 * (register_estimate(y + 1, m) - register_estimate(y, m)).abs()
}

fn synthetic(recalled: [u64; 2], t_hat: [f64; 2]) -> ScenarioResult {
    let groups: Vec<GroupOutcome> = (0..2)
        .map(|i| GroupOutcome {
            label: format!("g{i}"),
            t_true: 10,
            a: 0.2 + 0.1 * i as f64,
            speed: 1,
            capacity: 10,
            recalled: recalled[i],
            y: 0,
            a_hat: t_hat[i] / 20.0,
            t_hat: t_hat[i],
        })
        .collect();
    let agreement = Agreement::from_groups(&groups);
    ScenarioResult {
        seed: 0,
        groups,
        agreement,
    }
}

#[test]
fn names_weights_and_modal_counts() {
    let report = run_names_scenario(&names((19, 20), (2.0, 1.0), 32, 10), 1).unwrap();
    let [famous, other] = &report.distributions[..] else {
        panic!("two groups expected")
    };
    assert!((famous.a - 38.0 / 58.0).abs() < 1e-12);
    assert!((other.a - 20.0 / 58.0).abs() < 1e-12);
    // Modal counts follow aN (≈25.6 and ≈13.4) up to the register grid, not the true sizes.
    assert!(famous.modal_t_hat > 19.0);
    assert!(other.modal_t_hat < 20.0);
    assert!((famous.modal_t_hat - famous.a * 39.0).abs() < grid_step(39, 9, 32));
    assert!((other.modal_t_hat - other.a * 39.0).abs() < grid_step(39, 6, 32));
}

#[test]
fn names_unbiased_control() {
    for (s1, s2) in [(19, 20), (5, 30), (12, 12)] {
        let m = 32;
        let report = run_names_scenario(&names((s1, s2), (1.0, 1.0), m, 4), 9).unwrap();
        let n = s1 + s2;
        for (g, size) in report.distributions.iter().zip([s1, s2]) {
            assert!((g.a - size as f64 / n as f64).abs() < 1e-12);
            let y = (g.modal_t_hat / n as f64).sqrt().asin() / std::f64::consts::PI * m as f64;
            let y = y.round() as usize;
            let step = grid_step(n, y, m).max(grid_step(n, y.saturating_sub(1), m));
            assert!(
                (g.modal_t_hat - size as f64).abs() <= step,
                "sizes ({s1},{s2}): modal {} vs {size}",
                g.modal_t_hat
            );
        }
    }
}

#[test]
fn symmetric_groups_always_tie() {
    let report = run_names_scenario(&names((1, 1), (1.0, 1.0), 4, 20), 3).unwrap();
    assert!(report.trials.iter().all(|r| r.agreement == Agreement::Tie));
    assert_eq!(report.summary.ties, 20);
    assert_eq!(report.summary.agreement_rate, None);
    assert_eq!(report.summary.rate(), Err(Error::NoSignal));
}

#[test]
fn names_is_a_pure_function_of_seed() {
    let params = names((19, 20), (2.0, 1.0), 16, 8);
    let a = run_names_scenario(&params, 77).unwrap();
    let b = run_names_scenario(&params, 77).unwrap();
    assert_eq!(a, b);
    let c = run_names_scenario(&params, 78).unwrap();
    assert_eq!(a.trials[1], c.trials[0]);
}

#[test]
fn names_rejects_degenerate_groups() {
    assert!(run_names_scenario(&names((0, 3), (1.0, 1.0), 8, 4), 0).is_err());
    assert!(run_names_scenario(&names((3, 3), (0.0, 1.0), 8, 4), 0).is_err());
}

#[test]
fn summary_extremes() {
    let agree: Vec<_> = (0..4).map(|_| synthetic([5, 2], [3.0, 1.0])).collect();
    let s = correlation_summary(&agree).unwrap();
    assert_eq!(s.agreement_rate, Some(1.0));

    let anti: Vec<_> = (0..4).map(|_| synthetic([5, 2], [1.0, 3.0])).collect();
    let s = correlation_summary(&anti).unwrap();
    assert_eq!(s.agreement_rate, Some(0.0));

    let mixed = vec![
        synthetic([5, 2], [3.0, 1.0]),
        synthetic([5, 5], [3.0, 1.0]),
        synthetic([5, 2], [1.0, 3.0]),
    ];
    let s = correlation_summary(&mixed).unwrap();
    assert_eq!((s.agreements, s.ties, s.disagreements), (1, 1, 1));
    assert_eq!(s.agreement_rate, Some(0.5));

    assert!(correlation_summary(&agree[..1]).is_err());
}

#[test]
fn recall_budget_accounting() {
    let prep = GuessPrep::UniformFourier;
    let oracle = Oracle::new(4, [0]).unwrap();
    let tally = recall_under_budget(&prep, &oracle, 10, 5).unwrap();
    // a = 1/4: two steps per attempt, every attempt succeeds.
    assert_eq!(tally.attempts, 5);
    assert_eq!(tally.recalled, 5);
    assert_eq!(tally.time_used, 10);

    let none = recall_under_budget(&prep, &Oracle::new(4, []).unwrap(), 10, 5).unwrap();
    assert_eq!(none.attempts, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weight_factor_monotonicity(size1 in 1usize..30, size2 in 1usize..30, f in 0.1f64..5.0, bump in 0.01f64..3.0) {
        let run = |factor: f64| {
            let report = run_names_scenario(&names((size1, size2), (factor, 1.0), 8, 2), 0).unwrap();
            let g = &report.trials[0].groups[0];
            (g.a, g.speed, g.capacity)
        };
        let (a0, speed0, cap0) = run(f);
        let (a1, speed1, cap1) = run(f + bump);
        prop_assert!(a1 > a0);
        prop_assert!(speed1 <= speed0);
        prop_assert!(cap1 >= cap0);
    }

    #[test]
    fn disjoint_group_masses_sum_to_at_most_one(size1 in 1usize..30, size2 in 1usize..30, f1 in 0.1f64..5.0, f2 in 0.1f64..5.0) {
        let report = run_names_scenario(&names((size1, size2), (f1, f2), 8, 2), 0).unwrap();
        let total: f64 = report.trials[0].groups.iter().map(|g| g.a).sum();
        prop_assert!(total <= 1.0 + 1e-12);
    }
}

#[test]
fn bundled_lexicon_partitions() {
    let lex = Lexicon::sample();
    let first = letter_position_oracle(&lex, 'r', 1).unwrap().good_count();
    let third = letter_position_oracle(&lex, 'r', 3).unwrap().good_count();
    assert_eq!(lex.len(), 240);
    assert_eq!((first, third), (27, 54));
}

#[test]
fn letter_boost_flips_the_partition_masses() {
    let lex = Lexicon::sample();
    let boosted = LetterExperiment::new(&lex, &LetterScenario::default()).unwrap();
    let d = boosted.distributions();
    assert!(d[0].t_true < d[1].t_true);
    assert!(d[0].a > d[1].a);
    assert!(d[0].modal_t_hat > d[1].modal_t_hat);

    let control = LetterScenario {
        boost: 1.0,
        ..LetterScenario::default()
    };
    let d = LetterExperiment::new(&lex, &control)
        .unwrap()
        .distributions();
    assert!(d[0].a < d[1].a);
    assert!(d[0].modal_t_hat < d[1].modal_t_hat);
}

#[test]
fn letter_scenario_is_deterministic() {
    let lex = Lexicon::sample();
    let params = LetterScenario::default();
    assert_eq!(
        run_letter_scenario(&lex, &params, 5).unwrap(),
        run_letter_scenario(&lex, &params, 5).unwrap()
    );
}

#[test]
fn letter_scenario_needs_both_partitions() {
    let lex = Lexicon::new(vec!["rat".into(), "ran".into()], None).unwrap();
    assert_eq!(
        run_letter_scenario(&lex, &LetterScenario::default(), 0).unwrap_err(),
        Error::EmptyPartition("position-3".into())
    );
    let bad_boost = LetterScenario {
        boost: 0.0,
        ..LetterScenario::default()
    };
    assert!(run_letter_scenario(&Lexicon::sample(), &bad_boost, 0).is_err());
}

#[test]
fn names_agreement_rate_converges() {
    // Expected untied agreement at M = 32 is about 0.955.
    let params = NamesScenario {
        trials: 4000,
        ..NamesScenario::default()
    };
    let s = run_names_scenario(&params, 11).unwrap().summary;
    let rate = s.agreement_rate.unwrap();
    assert!((rate - 0.955).abs() < 0.015, "rate {rate}");
    assert!(s.rank_correlation.unwrap() > 0.5);
}
