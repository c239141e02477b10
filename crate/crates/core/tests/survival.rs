mod oracle;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use repurpose::survival::{
    average_ranks, cox_fit, cox_univariable, km_curve, nes, ssgsea, tertile_stratify, ExpressionMatrix,
    StratifiedCohort, SurvivalRecord, SurvivalRecords,
};

/// Random matrix; `quantize` rounds values to create ties.
fn random_matrix(rng: &mut ChaCha8Rng, genes: usize, samples: usize, quantize: bool) -> ExpressionMatrix {
    let values = (0..genes * samples)
        .map(|_| {
            let v: f64 = rng.gen_range(-3.0..3.0);
            if quantize {
                v.round()
            } else {
                v
            }
        })
        .collect();
    ExpressionMatrix::new(
        (0..genes).map(|g| format!("G{g}")).collect(),
        (0..samples).map(|s| format!("S{s}")).collect(),
        values,
    )
    .unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, genes: usize) -> Vec<String> {
    let size = rng.gen_range(1..genes);
    rand::seq::index::sample(rng, genes, size)
        .into_iter()
        .map(|g| format!("G{g}"))
        .collect()
}

#[test]
fn ranks_average_over_ties() {
    assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
}

#[test]
fn identical_groups_give_unit_hazard() {
    let mut surv = SurvivalRecords::new();
    let c = StratifiedCohort {
        high: (0..6).map(|i| format!("H{i}")).collect(),
        low: (0..6).map(|i| format!("L{i}")).collect(),
        excluded: vec![],
    };
    for i in 0..6 {
        let r = SurvivalRecord {
            time: 10.0 + 7.0 * i as f64,
            event: i % 3 != 0,
        };
        surv.insert(format!("H{i}"), r);
        surv.insert(format!("L{i}"), r);
    }
    let fit = cox_univariable(&c, &surv).unwrap();
    assert_eq!(fit.hr, 1.0);
    assert_eq!(fit.beta, 0.0);
}

#[test]
fn tertiles_of_ten() {
    let samples: Vec<String> = (0..10).map(|i| format!("S{i}")).collect();
    let scores: Vec<f64> = (0..10).map(f64::from).collect();
    let c = tertile_stratify(&samples, &scores).unwrap();
    assert_eq!((c.high.len(), c.low.len(), c.excluded.len()), (3, 3, 4));
    assert_eq!(c.high, vec!["S9", "S8", "S7"]);
    assert_eq!(c.low, vec!["S2", "S1", "S0"]);
}

#[test]
fn km_steps_at_events_only() {
    let mut surv = SurvivalRecords::new();
    for (id, time, event) in [("a", 1.0, true), ("b", 2.0, false), ("c", 3.0, true), ("d", 4.0, true)] {
        surv.insert(id.into(), SurvivalRecord { time, event });
    }
    let curve = km_curve(&["a", "b", "c", "d"], &surv).unwrap();
    let want = [(0.0, 1.0), (1.0, 0.75), (3.0, 0.375), (4.0, 0.0)];
    assert_eq!(curve.len(), want.len());
    for (got, want) in curve.iter().zip(want) {
        assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12);
    }
}

fn two_group_fixture(rng: &mut ChaCha8Rng) -> Vec<(f64, bool, f64)> {
    let n = rng.gen_range(10..30);
    let beta: f64 = rng.gen_range(-1.5..1.5);
    (0..2 * n)
        .map(|i| {
            let x = (i % 2) as f64;
            let t = -(1.0 - rng.gen::<f64>()).ln() / (beta * x).exp();
            let c = rng.gen_range(0.3..3.0);
            // rounding creates tied event times
            ((t.min(c) * 20.0).ceil() / 20.0, t <= c, x)
        })
        .collect()
}

#[test]
fn cox_matches_grid_search_of_partial_likelihood() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    while checked < 8 {
        let data = two_group_fixture(&mut rng);
        let fit = cox_fit(&data).unwrap();
        if !fit.converged {
            continue;
        }
        let grid = oracle::grid_search_beta(&data, -5.0, 5.0, 1e-4);
        assert!((fit.hr - grid.exp()).abs() < 1e-3, "fit {} grid {}", fit.beta, grid);
        let ll = oracle::breslow_loglik(&data, fit.beta);
        assert!(ll >= oracle::breslow_loglik(&data, fit.beta + 1e-3));
        assert!(ll >= oracle::breslow_loglik(&data, fit.beta - 1e-3));
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ssgsea_matches_running_sum(seed in any::<u64>(), quantize in any::<bool>(), tau in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let genes = rng.gen_range(2..=50);
        let samples = rng.gen_range(1..=10);
        let m = random_matrix(&mut rng, genes, samples, quantize);
        let set = random_set(&mut rng, genes);
        let got = ssgsea(&m, &set, tau).unwrap();
        let members: Vec<bool> = m.genes().iter().map(|g| set.contains(g)).collect();
        for (s, es) in got.iter().enumerate() {
            let want = oracle::brute_es(&m.column(s), &members, tau);
            prop_assert!((es - want).abs() < 1e-9, "sample {}: {} vs {}", s, es, want);
        }
    }

    #[test]
    fn ssgsea_is_invariant_under_monotone_transforms(seed in any::<u64>(), quantize in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let genes = rng.gen_range(2..=50);
        let m = random_matrix(&mut rng, genes, 4, quantize);
        let set = random_set(&mut rng, genes);
        let mut t = m.clone();
        for s in 0..4 {
            let col: Vec<f64> = m.column(s).iter().map(|v| 3.0 * v.exp() + 1.0).collect();
            t.set_column(s, &col);
        }
        prop_assert_eq!(ssgsea(&m, &set, 0.25).unwrap(), ssgsea(&t, &set, 0.25).unwrap());
    }

    #[test]
    fn nes_is_standardized(es in prop::collection::vec(-10.0f64..10.0, 3..20)) {
        prop_assume!(es.iter().any(|v| (v - es[0]).abs() > 1e-6));
        let z = nes(&es).unwrap();
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        prop_assert!(mean.abs() < 1e-9 && (var - 1.0).abs() < 1e-9);
    }

    #[test]
    fn label_swap_inverts_hazard(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = two_group_fixture(&mut rng);
        let mut surv = SurvivalRecords::new();
        let mut c = StratifiedCohort { high: vec![], low: vec![], excluded: vec![] };
        for (i, &(time, event, x)) in data.iter().enumerate() {
            let id = format!("P{i:03}");
            surv.insert(id.clone(), SurvivalRecord { time, event });
            if x == 1.0 { c.high.push(id) } else { c.low.push(id) }
        }
        let fit = cox_univariable(&c, &surv).unwrap();
        prop_assume!(fit.converged);
        let swapped = StratifiedCohort { high: c.low.clone(), low: c.high.clone(), excluded: vec![] };
        let back = cox_univariable(&swapped, &surv).unwrap();
        prop_assert!((back.hr - 1.0 / fit.hr).abs() < 1e-10, "{:?} {:?}", fit, back);
        prop_assert!((back.p - fit.p).abs() < 1e-9);
    }

    #[test]
    fn tertile_sizes_follow_floor_rule(n in 3usize..60, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<String> = (0..n).map(|i| format!("S{i:02}")).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0f64).round()).collect();
        let c = tertile_stratify(&samples, &scores).unwrap();
        prop_assert_eq!(c.high.len(), n / 3);
        prop_assert_eq!(c.low.len(), n / 3);
        prop_assert_eq!(c.excluded.len(), n - 2 * (n / 3));
    }
}
